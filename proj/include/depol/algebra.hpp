#pragma once

#include "depol/core.hpp"

#include <vector>

namespace depol {

// Stokes operator matrices restricted to the block of total photon number N,
// in the k-ascending basis: <N,k+1|S+|N,k> = 2 sqrt((k+1)(N-k)),
// S3 = diag(2(k - N/2)), S0 = N * I.
struct StokesMatrices {
    int N = 0;
    Mat S0, S1, S2, S3, Splus, Sminus;
};

StokesMatrices stokes_matrices(int N);

// Amplitudes of the SU(2) coherent state |N; theta, phi, psi> over k = 0..N:
//   c_k = sqrt(binom(N,k)) alpha_plus^k alpha_minus^(N-k)
// with alpha_plus = e^{+i(phi-psi)/2} cos(theta/2),
//      alpha_minus = e^{-i(phi+psi)/2} sin(theta/2).
// The sign of phi is fixed by requiring <S+-> = N e^{-+i phi} sin(theta)
// (verified by unit test), which gives
//   <S> = N (sin(theta) cos(phi), -sin(theta) sin(phi), cos(theta)).
Vec su2_coherent_amplitudes(int N, double theta, double phi, double psi);

TwoModeState su2_coherent_state(int N, double theta, double phi, double psi);

// |N,k> (k photons in the + mode, N-k in the - mode).
TwoModeState fock_state(int N, int k);

// Two-mode (quadrature) coherent state |alpha_plus> (x) |alpha_minus>,
// truncated at n_max total photons and renormalized; the discarded weight is
// recorded in the result's metadata.
TwoModeState two_mode_coherent_state(cplx alpha_plus, cplx alpha_minus,
                                     int n_max);

// Convex mixture; weights must sum to 1 within 1e-12.
TwoModeState mixed_state(
    const std::vector<std::pair<double, TwoModeState>>& components);

}  // namespace depol
