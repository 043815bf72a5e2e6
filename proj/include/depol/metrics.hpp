#pragma once

#include "depol/core.hpp"
#include "depol/lindblad.hpp"

#include <array>
#include <vector>

namespace depol {

// (<S0>, <S1>, <S2>, <S3>).
std::array<double, 4> stokes_moments(const TwoModeState& state);

// P = |<S>| / <S0>, defined as 0 when <S0> = 0.
double degree_of_polarization(const TwoModeState& state);

struct UncertaintyCheck {
    double lhs = 0.0;  // (Delta S)^2 = <S^2> - |<S>|^2
    double rhs = 0.0;  // 2 <S0>
    bool holds = false;
};

UncertaintyCheck uncertainty_check(const TwoModeState& state);

// Tr rho^2.
double purity(const TwoModeState& state);

struct BlochRecord {
    double x = 0.0, y = 0.0, z = 0.0;
};

// One-photon closed form: x, y decay at the calibrated coherence rate r_xy,
// z at exactly 2 r_xy. The 2:1 ratio is the structural content; the absolute
// scale comes from the generator spectrum (r_xy = 8 gamma under the literal
// conventions used here), not from any quoted constant.
BlochRecord one_photon_analytic(const BlochRecord& r0, double t,
                                double r_xy);

struct Trajectory {
    std::vector<double> times;
    std::vector<double> s0, s1, s2, s3;
    std::vector<double> dop;
    std::vector<double> purity;
};

// Evolves the initial state to every requested time (exact exponential) and
// records moments, degree of polarization and purity.
Trajectory compute_trajectory(const TwoModeState& initial,
                              const std::vector<double>& times,
                              const DepolarizerRates& rates);

}  // namespace depol
