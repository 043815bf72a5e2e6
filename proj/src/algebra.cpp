#include "depol/algebra.hpp"

#include <cmath>

namespace depol {

StokesMatrices stokes_matrices(int N) {
    if (N < 0) throw std::invalid_argument("stokes_matrices: N must be >= 0");
    const int d = N + 1;
    StokesMatrices s;
    s.N = N;
    s.Splus = Mat::Zero(d, d);
    for (int k = 0; k + 1 < d; ++k)
        s.Splus(k + 1, k) = 2.0 * std::sqrt(double(k + 1) * double(N - k));
    s.Sminus = s.Splus.adjoint();
    s.S1 = (s.Splus + s.Sminus) / 2.0;
    s.S2 = (s.Splus - s.Sminus) / cplx(0.0, 2.0);
    s.S3 = Mat::Zero(d, d);
    for (int k = 0; k < d; ++k) s.S3(k, k) = 2.0 * (k - N / 2.0);
    s.S0 = double(N) * Mat::Identity(d, d);
    return s;
}

Vec su2_coherent_amplitudes(int N, double theta, double phi, double psi) {
    if (theta < 0.0 || theta > M_PI)
        throw std::invalid_argument("su2_coherent: theta outside [0, pi]");
    const cplx ap = std::polar(std::cos(theta / 2.0), (phi - psi) / 2.0);
    const cplx am = std::polar(std::sin(theta / 2.0), -(phi + psi) / 2.0);
    Vec c(N + 1);
    // sqrt(binom(N,k)) built up multiplicatively.
    double binom = 1.0;
    cplx apk = 1.0;
    for (int k = 0; k <= N; ++k) {
        c(k) = std::sqrt(binom) * apk * std::pow(am, N - k);
        apk *= ap;
        binom *= double(N - k) / double(k + 1);
    }
    return c;
}

TwoModeState su2_coherent_state(int N, double theta, double phi, double psi) {
    const Vec c = su2_coherent_amplitudes(N, theta, phi, psi);
    TwoModeState state;
    state.n_max = N;
    state.at(N, N) = c * c.adjoint();
    return state;
}

TwoModeState fock_state(int N, int k) {
    if (N < 0 || k < 0 || k > N)
        throw std::invalid_argument("fock_state: need 0 <= k <= N");
    TwoModeState state;
    state.n_max = N;
    Mat& block = state.at(N, N);
    block(k, k) = 1.0;
    return state;
}

TwoModeState two_mode_coherent_state(cplx alpha_plus, cplx alpha_minus,
                                     int n_max) {
    if (n_max < 0)
        throw std::invalid_argument("two_mode_coherent_state: n_max < 0");
    // Unnormalized block amplitudes a_N(k) = alpha_plus^k alpha_minus^(N-k)
    //   / sqrt(k! (N-k)!); the overall exp(-r^2/2) is absorbed by the final
    // renormalization over the truncation.
    std::vector<Vec> amp(n_max + 1);
    double kept = 0.0;
    for (int N = 0; N <= n_max; ++N) {
        Vec a(N + 1);
        for (int k = 0; k <= N; ++k) {
            double lognorm = 0.0;
            for (int j = 2; j <= k; ++j) lognorm += std::log(double(j));
            for (int j = 2; j <= N - k; ++j) lognorm += std::log(double(j));
            a(k) = std::pow(alpha_plus, k) * std::pow(alpha_minus, N - k) *
                   std::exp(-0.5 * lognorm);
        }
        amp[N] = a;
        kept += a.squaredNorm();
    }
    const double r2 = std::norm(alpha_plus) + std::norm(alpha_minus);
    const double total = std::exp(r2);  // sum over all N of ||a_N||^2
    TwoModeState state;
    state.n_max = n_max;
    state.discarded_weight = 1.0 - kept / total;
    const double scale = 1.0 / kept;
    for (int N = 0; N <= n_max; ++N)
        for (int Np = 0; Np <= n_max; ++Np)
            state.at(N, Np) = scale * amp[N] * amp[Np].adjoint();
    return state;
}

TwoModeState mixed_state(
    const std::vector<std::pair<double, TwoModeState>>& components) {
    double wsum = 0.0;
    for (const auto& [w, s] : components) wsum += w;
    if (std::abs(wsum - 1.0) > 1e-12)
        throw std::invalid_argument("mixed_state: weights must sum to 1");
    TwoModeState out;
    for (const auto& [w, s] : components) {
        out.n_max = std::max(out.n_max, s.n_max);
        for (const auto& [key, m] : s.blocks)
            out.at(key.first, key.second) += w * m;
    }
    return out;
}

}  // namespace depol
