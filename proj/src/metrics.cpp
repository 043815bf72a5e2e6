#include "depol/metrics.hpp"

#include "depol/algebra.hpp"

#include <cmath>

namespace depol {

std::array<double, 4> stokes_moments(const TwoModeState& state) {
    std::array<double, 4> s{};
    for (const auto& [key, rho] : state.blocks) {
        const auto [N, Np] = key;
        if (N != Np) continue;
        const StokesMatrices sm = stokes_matrices(N);
        s[0] += (rho * sm.S0).trace().real();
        s[1] += (rho * sm.S1).trace().real();
        s[2] += (rho * sm.S2).trace().real();
        s[3] += (rho * sm.S3).trace().real();
    }
    return s;
}

double degree_of_polarization(const TwoModeState& state) {
    const auto s = stokes_moments(state);
    if (s[0] <= 0.0) return 0.0;
    return std::sqrt(s[1] * s[1] + s[2] * s[2] + s[3] * s[3]) / s[0];
}

UncertaintyCheck uncertainty_check(const TwoModeState& state) {
    // <S^2> = Sum_N w_N N(N+2) by the Casimir identity on each block.
    double s2 = 0.0;
    for (const auto& [key, rho] : state.blocks) {
        const auto [N, Np] = key;
        if (N != Np) continue;
        s2 += rho.trace().real() * double(N) * double(N + 2);
    }
    const auto s = stokes_moments(state);
    UncertaintyCheck out;
    out.lhs = s2 - (s[1] * s[1] + s[2] * s[2] + s[3] * s[3]);
    out.rhs = 2.0 * s[0];
    out.holds = out.lhs >= out.rhs - 1e-9;
    return out;
}

double purity(const TwoModeState& state) {
    double p = 0.0;
    for (const auto& [key, rho] : state.blocks) {
        const Mat* mirror = state.find(key.second, key.first);
        if (mirror) p += (rho * *mirror).trace().real();
    }
    return p;
}

BlochRecord one_photon_analytic(const BlochRecord& r0, double t,
                                double r_xy) {
    const double exy = std::exp(-r_xy * t);
    const double ez = std::exp(-2.0 * r_xy * t);
    return {r0.x * exy, r0.y * exy, r0.z * ez};
}

Trajectory compute_trajectory(const TwoModeState& initial,
                              const std::vector<double>& times,
                              const DepolarizerRates& rates) {
    Trajectory traj;
    traj.times = times;
    const std::size_t n = times.size();
    traj.s0.resize(n);
    traj.s1.resize(n);
    traj.s2.resize(n);
    traj.s3.resize(n);
    traj.dop.resize(n);
    traj.purity.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const TwoModeState st = evolve(initial, times[i], rates);
        const auto s = stokes_moments(st);
        traj.s0[i] = s[0];
        traj.s1[i] = s[1];
        traj.s2[i] = s[2];
        traj.s3[i] = s[3];
        traj.dop[i] = degree_of_polarization(st);
        traj.purity[i] = purity(st);
    }
    return traj;
}

}  // namespace depol
