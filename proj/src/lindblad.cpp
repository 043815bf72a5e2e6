#include "depol/lindblad.hpp"

#include "depol/algebra.hpp"

#include <unsupported/Eigen/KroneckerProduct>
#include <unsupported/Eigen/MatrixFunctions>

#include <algorithm>
#include <cmath>

namespace depol {

Mat dissipator(const Mat& C, const Mat& rho) { return dissipator(C, C, rho); }

Mat dissipator(const Mat& CL, const Mat& CR, const Mat& rho) {
    if (CL.rows() != CL.cols() || CR.rows() != CR.cols() ||
        rho.rows() != CL.rows() || rho.cols() != CR.rows())
        throw std::invalid_argument("dissipator: dimension mismatch");
    return 2.0 * CL * rho * CR.adjoint() - CL.adjoint() * CL * rho -
           rho * CR.adjoint() * CR;
}

Mat pair_generator(int N, int Np, const DepolarizerRates& rates) {
    if (N < 0 || Np < 0)
        throw std::invalid_argument("pair_generator: negative block label");
    const int dl = N + 1, dr = Np + 1;
    const StokesMatrices l = stokes_matrices(N);
    const StokesMatrices r = stokes_matrices(Np);
    const Mat Il = Mat::Identity(dl, dl), Ir = Mat::Identity(dr, dr);
    const double dN = double(N - Np);

    Mat G = -rates.gamma0 * dN * dN * Mat::Identity(dl * dr, dl * dr);
    // vec(L rho R) = (R^T (x) L) vec(rho), column-major vectorization.
    auto add = [&G](cplx w, const Mat& L, const Mat& R) {
        G += w * Eigen::kroneckerProduct(R.transpose(), L).eval();
    };
    add(2.0 * rates.gamma, l.Splus, r.Sminus);  // 2 S+ rho S+^dag, S+^dag = S-
    add(-rates.gamma, Mat(l.Sminus * l.Splus), Ir);
    add(-rates.gamma, Il, Mat(r.Sminus * r.Splus));
    add(2.0 * rates.gamma, l.Sminus, r.Splus);
    add(-rates.gamma, Mat(l.Splus * l.Sminus), Ir);
    add(-rates.gamma, Il, Mat(r.Splus * r.Sminus));
    return G;
}

namespace {

// Map between a block matrix and its column-major vectorization.
Vec vectorize(const Mat& m) {
    return Eigen::Map<const Vec>(m.data(), m.size());
}

Mat devectorize(const Vec& v, int rows, int cols) {
    return Eigen::Map<const Mat>(v.data(), rows, cols);
}

// One Dormand-Prince RK5(4) step; returns the 5th-order solution and the
// embedded error estimate.
void dopri_step(const Mat& G, const Vec& y, double h, Vec& y5, Vec& err) {
    const Vec k1 = G * y;
    const Vec k2 = G * (y + h * (1.0 / 5.0) * k1);
    const Vec k3 = G * (y + h * (3.0 / 40.0 * k1 + 9.0 / 40.0 * k2));
    const Vec k4 =
        G * (y + h * (44.0 / 45.0 * k1 - 56.0 / 15.0 * k2 + 32.0 / 9.0 * k3));
    const Vec k5 =
        G * (y + h * (19372.0 / 6561.0 * k1 - 25360.0 / 2187.0 * k2 +
                      64448.0 / 6561.0 * k3 - 212.0 / 729.0 * k4));
    const Vec k6 =
        G * (y + h * (9017.0 / 3168.0 * k1 - 355.0 / 33.0 * k2 +
                      46732.0 / 5247.0 * k3 + 49.0 / 176.0 * k4 -
                      5103.0 / 18656.0 * k5));
    y5 = y + h * (35.0 / 384.0 * k1 + 500.0 / 1113.0 * k3 + 125.0 / 192.0 * k4 -
                  2187.0 / 6784.0 * k5 + 11.0 / 84.0 * k6);
    const Vec k7 = G * y5;
    const Vec y4 = y + h * (5179.0 / 57600.0 * k1 + 7571.0 / 16695.0 * k3 +
                            393.0 / 640.0 * k4 - 92097.0 / 339200.0 * k5 +
                            187.0 / 2100.0 * k6 + 1.0 / 40.0 * k7);
    err = y5 - y4;
}

Vec rk_integrate(const Mat& G, Vec y, double t_end, const RkOptions& opt) {
    double t = 0.0;
    double h = t_end / 16.0;
    Vec y5, err;
    while (t < t_end) {
        h = std::min(h, t_end - t);
        dopri_step(G, y, h, y5, err);
        double sum = 0.0;
        for (Eigen::Index i = 0; i < y.size(); ++i) {
            const double sc =
                opt.abs_tol +
                opt.rel_tol * std::max(std::abs(y(i)), std::abs(y5(i)));
            const double e = std::abs(err(i)) / sc;
            sum += e * e;
        }
        const double enorm = std::sqrt(sum / double(y.size()));
        if (enorm <= 1.0) {
            t += h;
            y = y5;
        }
        const double factor =
            std::clamp(0.9 * std::pow(std::max(enorm, 1e-12), -0.2), 0.2, 5.0);
        h *= factor;
        if (h < 1e-14 * std::max(t_end, 1.0))
            throw std::runtime_error(
                "evolve(rk-adaptive): step-size underflow (stiff problem; "
                "use exact-expm)");
    }
    return y;
}

}  // namespace

TwoModeState depolarizing_rhs(const TwoModeState& state,
                              const DepolarizerRates& rates) {
    TwoModeState out;
    out.n_max = state.n_max;
    for (const auto& [key, rho] : state.blocks) {
        const auto [N, Np] = key;
        const StokesMatrices l = stokes_matrices(N);
        const StokesMatrices r = stokes_matrices(Np);
        const double dN = double(N - Np);
        out.at(N, Np) = -rates.gamma0 * dN * dN * rho +
                        rates.gamma * dissipator(l.Splus, r.Splus, rho) +
                        rates.gamma * dissipator(l.Sminus, r.Sminus, rho);
    }
    return out;
}

TwoModeState evolve(const TwoModeState& state, double t,
                    const DepolarizerRates& rates, EvolveMethod method,
                    const RkOptions& rk) {
    if (t < 0.0) throw std::invalid_argument("evolve: negative time");
    if (t == 0.0) return state;
    TwoModeState out;
    out.n_max = state.n_max;
    out.discarded_weight = state.discarded_weight;
    for (const auto& [key, rho] : state.blocks) {
        const auto [N, Np] = key;
        const Mat G = pair_generator(N, Np, rates);
        Vec v = vectorize(rho);
        if (method == EvolveMethod::ExactExpm) {
            const Mat P = Mat(G * t).exp();
            v = P * v;
        } else {
            v = rk_integrate(G, v, t, rk);
        }
        out.at(N, Np) = devectorize(v, N + 1, Np + 1);
    }
    return out;
}

std::vector<cplx> generator_spectrum(int N, int Np,
                                     const DepolarizerRates& rates) {
    const Mat G = pair_generator(N, Np, rates);
    Eigen::ComplexEigenSolver<Mat> es(G, /*computeEigenvectors=*/false);
    std::vector<cplx> ev(es.eigenvalues().data(),
                         es.eigenvalues().data() + es.eigenvalues().size());
    std::sort(ev.begin(), ev.end(), [](cplx a, cplx b) {
        if (a.real() != b.real()) return a.real() > b.real();
        return a.imag() > b.imag();
    });
    return ev;
}

double coherence_rate(int N, const DepolarizerRates& rates) {
    const auto ev = generator_spectrum(N, N, rates);
    for (const cplx& e : ev)
        if (e.real() < -1e-12) return -e.real();
    return 0.0;
}

Mat steady_state(int N) {
    return Mat::Identity(N + 1, N + 1) / double(N + 1);
}

DecayFit fit_decay_rate(const std::vector<double>& times,
                        const std::vector<double>& values) {
    if (times.size() != values.size())
        throw std::invalid_argument("fit_decay_rate: size mismatch");
    if (times.size() < 4)
        throw std::invalid_argument("fit_decay_rate: need >= 4 samples");
    const std::size_t n = times.size();
    double tbar = 0.0, ybar = 0.0;
    std::vector<double> logv(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (values[i] <= 0.0)
            throw std::invalid_argument("fit_decay_rate: non-positive value");
        logv[i] = std::log(values[i]);
        tbar += times[i];
        ybar += logv[i];
    }
    tbar /= double(n);
    ybar /= double(n);
    double sty = 0.0, stt = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sty += (times[i] - tbar) * (logv[i] - ybar);
        stt += (times[i] - tbar) * (times[i] - tbar);
    }
    DecayFit fit;
    const double slope = stt > 0.0 ? sty / stt : 0.0;
    fit.rate = -slope;
    double ss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double r = logv[i] - (ybar + slope * (times[i] - tbar));
        ss += r * r;
    }
    fit.residual = std::sqrt(ss / double(n));
    fit.exponential = fit.residual <= 1e-3;
    return fit;
}

}  // namespace depol
