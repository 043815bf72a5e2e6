#include "depol/sphere.hpp"

#include "depol/algebra.hpp"

#include <cmath>

namespace depol {

namespace {

constexpr int kMaxFact = 80;

const long double* factorials() {
    static const auto table = [] {
        static long double f[kMaxFact + 1];
        f[0] = 1.0L;
        for (int i = 1; i <= kMaxFact; ++i) f[i] = f[i - 1] * i;
        return f;
    }();
    return table;
}

int doubled(double x, const char* what) {
    const double d = 2.0 * x;
    const double r = std::round(d);
    if (std::abs(d - r) > 1e-9)
        throw std::invalid_argument(std::string(what) +
                                    ": not integer or half-integer");
    return int(r);
}

void check_indices(int S2, int m2, int mp2) {
    if (S2 < 0) throw std::invalid_argument("wigner: S < 0");
    if ((S2 - m2) % 2 != 0 || (S2 - mp2) % 2 != 0)
        throw std::invalid_argument("wigner: m, m' must match S integrality");
    if (std::abs(m2) > S2 || std::abs(mp2) > S2)
        throw std::invalid_argument("wigner: |m| or |m'| exceeds S");
}

// Varshalovich explicit sum in doubled indices.
double wigner_d2(int S2, int m2, int mp2, double theta) {
    check_indices(S2, m2, mp2);
    const long double* fact = factorials();
    const int Spm = (S2 + m2) / 2, Smm = (S2 - m2) / 2;
    const int Spmp = (S2 + mp2) / 2, Smmp = (S2 - mp2) / 2;
    const int dm = (m2 - mp2) / 2;  // m - m'
    const long double pref =
        sqrtl(fact[Spm] * fact[Smm] * fact[Spmp] * fact[Smmp]);
    const double c = std::cos(theta / 2.0), s = std::sin(theta / 2.0);
    const int kmin = std::max(0, -dm);
    const int kmax = std::min(Smm, Spmp);
    long double sum = 0.0L;
    for (int k = kmin; k <= kmax; ++k) {
        const long double den =
            fact[Smm - k] * fact[Spmp - k] * fact[k] * fact[k + dm];
        long double term = powl(c, S2 - 2 * k - dm) * powl(s, 2 * k + dm) / den;
        if (k % 2 != 0) term = -term;
        sum += term;
    }
    long double result = pref * sum;
    if (dm % 2 != 0) result = -result;  // overall (-1)^(m - m')
    return double(result);
}

}  // namespace

double wigner_d(double S, double m, double mp, double theta) {
    return wigner_d2(doubled(S, "S"), doubled(m, "m"), doubled(mp, "m'"),
                     theta);
}

cplx wigner_D(double S, double m, double mp, double phi, double theta,
              double psi) {
    return std::polar(1.0, -(m * phi + mp * psi)) * wigner_d(S, m, mp, theta);
}

cplx spherical_harmonic(int S, int m, double theta, double phi) {
    // Y_{Sm} = sqrt((2S+1)/4pi) conj(D^S_{m,0}(phi, theta, .)).
    return std::sqrt((2.0 * S + 1.0) / (4.0 * M_PI)) *
           std::polar(1.0, m * phi) * wigner_d(S, m, 0, theta);
}

SphereGrid SphereGrid::build(int s_max) {
    if (s_max < 0) throw std::invalid_argument("SphereGrid: s_max < 0");
    SphereGrid grid;
    grid.s_max = s_max;
    const int n = 2 * (s_max + 1);
    grid.cos_theta.resize(n);
    grid.theta.resize(n);
    grid.w_theta.resize(n);
    // Gauss-Legendre nodes by Newton iteration on P_n.
    for (int i = 0; i < n; ++i) {
        double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0, p1 = x;
            for (int j = 2; j <= n; ++j) {
                const double p2 = ((2 * j - 1) * x * p1 - (j - 1) * p0) / j;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        grid.cos_theta[n - 1 - i] = x;
        grid.theta[n - 1 - i] = std::acos(x);
        grid.w_theta[n - 1 - i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    const int nphi = 2 * s_max + 1;
    grid.phi.resize(nphi);
    for (int j = 0; j < nphi; ++j) grid.phi[j] = 2.0 * M_PI * j / nphi;
    return grid;
}

Eigen::MatrixXcd pair_kernel(const Mat& rho, int N, int Np,
                             const SphereGrid& grid) {
    if (rho.rows() != N + 1 || rho.cols() != Np + 1)
        throw std::invalid_argument("pair_kernel: block dimension mismatch");
    const double weight =
        std::sqrt(double(N + 1) * double(Np + 1)) / (4.0 * M_PI);
    Eigen::MatrixXcd out(grid.n_theta(), grid.n_phi());
    for (std::size_t i = 0; i < grid.n_theta(); ++i) {
        for (std::size_t j = 0; j < grid.n_phi(); ++j) {
            const Vec cl =
                su2_coherent_amplitudes(N, grid.theta[i], grid.phi[j], 0.0);
            const Vec cr =
                su2_coherent_amplitudes(Np, grid.theta[i], grid.phi[j], 0.0);
            out(i, j) = weight * (cl.adjoint() * rho * cr)(0, 0);
        }
    }
    return out;
}

Eigen::MatrixXd su2_q_sphere(const Mat& block_state, const SphereGrid& grid) {
    if (block_state.rows() != block_state.cols())
        throw std::invalid_argument("su2_q_sphere: non-square block");
    if ((block_state - block_state.adjoint()).norm() > 1e-10)
        throw std::invalid_argument("su2_q_sphere: non-Hermitian block");
    const int N = int(block_state.rows()) - 1;
    return pair_kernel(block_state, N, N, grid).real();
}

cplx MultipoleCoefficients::at(double S, double m, double mp) const {
    const MultipoleKey key{doubled(S, "S"), doubled(m, "m"), doubled(mp, "m'")};
    auto it = entries.find(key);
    return it == entries.end() ? cplx(0.0) : it->second;
}

void MultipoleCoefficients::set(double S, double m, double mp, cplx value) {
    entries[{doubled(S, "S"), doubled(m, "m"), doubled(mp, "m'")}] = value;
}

namespace {

// Quadrature transform of complex samples into the fixed-m' channel.
void transform_into(MultipoleCoefficients& out, const Eigen::MatrixXcd& f,
                    const SphereGrid& grid, int S2min, int S2max, int mp2) {
    const double wphi = 2.0 * M_PI / double(grid.n_phi());
    for (int S2 = S2min; S2 <= S2max; S2 += 2) {
        for (int m2 = -S2; m2 <= S2; m2 += 2) {
            const double m = m2 / 2.0;
            cplx acc = 0.0;
            for (std::size_t i = 0; i < grid.n_theta(); ++i) {
                const double dv =
                    wigner_d2(S2, m2, mp2, grid.theta[i]) * grid.w_theta[i];
                cplx phi_sum = 0.0;
                for (std::size_t j = 0; j < grid.n_phi(); ++j)
                    phi_sum += std::polar(1.0, m * grid.phi[j]) * f(i, j);
                acc += dv * phi_sum;
            }
            acc *= wphi * std::sqrt((S2 + 1.0) / (4.0 * M_PI));
            const MultipoleKey key{S2, m2, mp2};
            auto it = out.entries.find(key);
            if (it == out.entries.end())
                out.entries[key] = acc;
            else
                it->second += acc;
        }
    }
}

double exponent(const MultipoleKey& key, const DepolarizerRates& rates,
                Kappa kappa) {
    const double S = key.S2 / 2.0, m = key.m2 / 2.0, mp = key.mp2 / 2.0;
    return -(kappa.k2 * rates.gamma * (S * (S + 1.0) - m * m) +
             kappa.k1 * rates.gamma0 * mp * mp);
}

}  // namespace

MultipoleCoefficients multipole_transform(const Eigen::MatrixXd& samples,
                                          const SphereGrid& grid, int s_max) {
    if (s_max > grid.s_max)
        throw std::invalid_argument("multipole_transform: band limit exceeds grid");
    MultipoleCoefficients out;
    out.s_max = s_max;
    out.psi_integrated = true;
    transform_into(out, samples.cast<cplx>(), grid, 0, 2 * s_max, 0);
    return out;
}

Eigen::MatrixXd multipole_reconstruct(const MultipoleCoefficients& coeffs,
                                      const SphereGrid& grid) {
    Eigen::MatrixXd out =
        Eigen::MatrixXd::Zero(grid.n_theta(), grid.n_phi());
    for (const auto& [key, c] : coeffs.entries) {
        if (key.mp2 != 0) continue;
        const double S = key.S2 / 2.0, m = key.m2 / 2.0;
        const double norm = std::sqrt((key.S2 + 1.0) / (4.0 * M_PI));
        for (std::size_t i = 0; i < grid.n_theta(); ++i) {
            const double dv = wigner_d(S, m, 0.0, grid.theta[i]);
            for (std::size_t j = 0; j < grid.n_phi(); ++j)
                out(i, j) += (c * norm * dv *
                              std::polar(1.0, -m * grid.phi[j]))
                                 .real();
        }
    }
    return out;
}

MultipoleCoefficients block_pair_multipoles(const Mat& rho, int N, int Np,
                                            const SphereGrid& grid) {
    if (2 * grid.s_max < N + Np)
        throw std::invalid_argument("block_pair_multipoles: grid band limit too small");
    MultipoleCoefficients out;
    out.s_max = (N + Np) / 2.0;
    out.psi_integrated = (N == Np);
    const Eigen::MatrixXcd f = pair_kernel(rho, N, Np, grid);
    transform_into(out, f, grid, std::abs(N - Np), N + Np, N - Np);
    return out;
}

MultipoleCoefficients state_multipoles(const TwoModeState& state,
                                       const SphereGrid& grid) {
    MultipoleCoefficients out;
    out.s_max = state.n_max;
    out.psi_integrated = true;
    for (const auto& [key, rho] : state.blocks) {
        const auto [N, Np] = key;
        if (N != Np) out.psi_integrated = false;
        const Eigen::MatrixXcd f = pair_kernel(rho, N, Np, grid);
        transform_into(out, f, grid, std::abs(N - Np), N + Np, N - Np);
    }
    return out;
}

MultipoleCoefficients propagate_multipoles(const MultipoleCoefficients& c,
                                           double t,
                                           const DepolarizerRates& rates,
                                           Kappa kappa) {
    if (t < 0.0)
        throw std::invalid_argument("propagate_multipoles: negative time");
    MultipoleCoefficients out = c;
    for (auto& [key, value] : out.entries)
        value *= std::exp(exponent(key, rates, kappa) * t);
    return out;
}

Calibration calibrate_exponents(const std::vector<double>& times,
                                const std::vector<MultipoleCoefficients>& series,
                                const DepolarizerRates& rates) {
    if (times.size() != series.size() || times.size() < 2)
        throw std::invalid_argument("calibrate_exponents: bad series");
    // log(c(t)/c(0)) = -(k2 gamma A + k1 gamma0 B) t with
    // A = S(S+1) - m^2, B = m'^2; least squares over channels and times.
    std::vector<std::array<double, 3>> rows;  // (k1 column, k2 column, y)
    const MultipoleCoefficients& c0 = series.front();
    for (const auto& [key, v0] : c0.entries) {
        if (std::abs(v0) < 1e-8) continue;
        const double S = key.S2 / 2.0, m = key.m2 / 2.0, mp = key.mp2 / 2.0;
        const double A = S * (S + 1.0) - m * m;
        const double B = mp * mp;
        for (std::size_t i = 1; i < times.size(); ++i) {
            auto it = series[i].entries.find(key);
            if (it == series[i].entries.end()) continue;
            if (std::abs(it->second) < 1e-8) continue;
            const double y = std::log(std::abs(it->second) / std::abs(v0));
            rows.push_back({-rates.gamma0 * B * times[i],
                            -rates.gamma * A * times[i], y});
        }
    }
    bool any_k1 = false, any_k2 = false;
    for (const auto& r : rows) {
        any_k1 |= r[0] != 0.0;
        any_k2 |= r[1] != 0.0;
    }
    if (rows.empty() || (!any_k1 && !any_k2))
        throw std::runtime_error("calibrate_exponents: degenerate channel set");
    Eigen::MatrixXd A(rows.size(), (any_k1 && any_k2) ? 2 : 1);
    Eigen::VectorXd y(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (any_k1 && any_k2) {
            A(i, 0) = rows[i][0];
            A(i, 1) = rows[i][1];
        } else {
            A(i, 0) = any_k1 ? rows[i][0] : rows[i][1];
        }
        y(i) = rows[i][2];
    }
    const Eigen::VectorXd sol = A.colPivHouseholderQr().solve(y);
    Calibration cal;
    cal.has_k1 = any_k1;
    cal.has_k2 = any_k2;
    if (any_k1 && any_k2) {
        cal.k1 = sol(0);
        cal.k2 = sol(1);
    } else if (any_k1) {
        cal.k1 = sol(0);
    } else {
        cal.k2 = sol(0);
    }
    cal.residual = std::sqrt((A * sol - y).squaredNorm() / double(rows.size()));
    return cal;
}

MultipoleCoefficients pointmass_coefficients(double theta0, double phi0,
                                             double psi0, int s_max) {
    if (s_max < 0)
        throw std::invalid_argument("pointmass_coefficients: s_max < 0");
    MultipoleCoefficients out;
    out.s_max = s_max;
    out.psi_integrated = false;
    for (int S2 = 0; S2 <= 2 * s_max; ++S2) {
        const double norm = std::sqrt((S2 + 1.0) / (4.0 * M_PI));
        for (int m2 = -S2; m2 <= S2; m2 += 2) {
            for (int mp2 = -S2; mp2 <= S2; mp2 += 2) {
                const double S = S2 / 2.0, m = m2 / 2.0, mp = mp2 / 2.0;
                out.entries[{S2, m2, mp2}] =
                    norm * std::conj(wigner_D(S, m, mp, phi0, theta0, psi0));
            }
        }
    }
    return out;
}

double depolarization_measure(const MultipoleCoefficients& c,
                              const DepolarizerRates& rates, Kappa kappa,
                              double t) {
    if (t < 0.0)
        throw std::invalid_argument("depolarization_measure: negative time");
    double total = 0.0;
    for (const auto& [key, value] : c.entries)
        total += std::norm(value) * std::exp(2.0 * exponent(key, rates, kappa) * t);
    return total;
}

std::array<double, 3> dipole_moments_from_multipoles(
    const MultipoleCoefficients& c, int N) {
    const double conv = std::sqrt(4.0 * M_PI / 3.0) * double(N + 2);
    const cplx splus = std::sqrt(2.0) * conv * c.at(1.0, -1.0, 0.0);
    return {splus.real(), splus.imag(), conv * c.at(1.0, 0.0, 0.0).real()};
}

}  // namespace depol
