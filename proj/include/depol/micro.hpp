#pragma once

#include "depol/core.hpp"

#include <utility>
#include <vector>

namespace depol {

struct AtomConfig {
    double g_abs = 0.0;    // coupling magnitude |g_a|
    double detuning = 0.0; // Delta_a = omega_a - omega
    double gamma_a = 0.0;  // atomic damping rate
    double nbar = 0.0;     // thermal occupation
    double phase = 0.0;    // random phase phi_a (coupling e^{+-i phase/2})

    // Dispersive-regime flag: |g| << |Delta| (threshold g/|Delta| <= 0.2).
    bool far_off_resonance() const;
};

// Field (two modes, total photons <= n_max) (x) atoms (one qubit each).
struct MicroSystem {
    std::vector<AtomConfig> atoms;
    int n_max = 0;
    std::vector<std::pair<int, int>> field_basis;  // (N, k) labels
    int field_dim = 0;
    int atom_dim = 0;  // 2^(number of atoms)
    Mat H;             // Hermitian
    std::vector<std::pair<Mat, double>> dissipators;  // (C, rate): rate * L[C]
};

// H = omega N_field + Sum_a (omega_a/2) sigma_z
//     + Sum_a |g_a| (e^{+i phi_a/2} a+^dag + e^{-i phi_a/2} a-^dag) sigma-_a
//     + h.c., with omega_a = omega + detuning_a;
// dissipators {(sigma-_a, gamma_a (nbar_a+1)/2), (sigma+_a, gamma_a nbar_a/2)}.
MicroSystem build_system(const std::vector<AtomConfig>& atoms, int n_max,
                         double omega = 0.0);

// Full-superoperator matrix exponential evolution (the problem is stiff).
Mat evolve_full(const MicroSystem& sys, const Mat& rho0, double t);

// Evolve once, evaluate at many times (shared eigendecomposition).
std::vector<Mat> evolve_full_series(const MicroSystem& sys, const Mat& rho0,
                                    const std::vector<double>& times);

// Partial trace over all atoms.
Mat trace_out_atoms(const MicroSystem& sys, const Mat& rho);

// gamma_eff = Sum_a |g_a|^4 / (gamma_a Delta_a^2 nbar_a).
double effective_gamma(const std::vector<AtomConfig>& atoms);

struct AdiabaticReport {
    double fitted_rate = 0.0;
    double predicted_rate = 0.0;  // r_xy from generator_spectrum(1,1,.)
    double ratio = 0.0;           // fitted / predicted (1 when both are 0)
    double relative_error = 0.0;  // |ratio - 1|
    double fit_residual = 0.0;
    bool regime_ok = true;   // all atoms far off resonance
    bool exponential = true; // fit residual below the regime threshold
};

// Central experiment: field starts in (|1,0> + |0,1>)/sqrt(2), atoms in the
// infinite-temperature mixture; the decay of the intra-block coherence
// |<1,0| rho_f |0,1>| is fitted over sim_times and compared with the
// effective-model prediction.
AdiabaticReport validate_adiabatic(const std::vector<AtomConfig>& atoms,
                                   int n_max,
                                   const std::vector<double>& sim_times);

// Canonical time grid for the validation fit: 17 points spanning
// 0.3 / predicted rate.
std::vector<double> default_sim_times(const std::vector<AtomConfig>& atoms);

}  // namespace depol
