#pragma once

#include "depol/core.hpp"

#include <vector>

namespace depol {

// Rates of the depolarizing generator
//   rho' = gamma0 L[S0] rho + gamma (L[S+] + L[S-]) rho,
// with L[C] rho = 2 C rho C^dag - {C^dag C, rho}.
struct DepolarizerRates {
    double gamma = 0.0;   // multiplies L[S+] and L[S-]
    double gamma0 = 0.0;  // multiplies L[S0]

    // Special case gamma0 = 2 gamma (phase-averaged microscopic limit).
    static DepolarizerRates mesb(double gamma) { return {gamma, 2.0 * gamma}; }
};

// L[C] rho = 2 C rho C^dag - C^dag C rho - rho C^dag C on a square block.
Mat dissipator(const Mat& C, const Mat& rho);

// Block-pair dissipator: rho_{N,N'} picks up the left copy of C on block N
// and the right copy on block N':
//   2 CL rho CR^dag - CL^dag CL rho - rho CR^dag CR.
Mat dissipator(const Mat& CL, const Mat& CR, const Mat& rho);

// Dense matrix of the generator acting on vectorized (column-major)
// rho_{N,N'} blocks; dimension (N+1)(N'+1).
Mat pair_generator(int N, int Np, const DepolarizerRates& rates);

// Right-hand side of the master equation, block-pair local.
TwoModeState depolarizing_rhs(const TwoModeState& state,
                              const DepolarizerRates& rates);

enum class EvolveMethod { ExactExpm, RkAdaptive };

struct RkOptions {
    double abs_tol = 1e-10;
    double rel_tol = 1e-8;
};

TwoModeState evolve(const TwoModeState& state, double t,
                    const DepolarizerRates& rates,
                    EvolveMethod method = EvolveMethod::ExactExpm,
                    const RkOptions& rk = {});

// Eigenvalues of pair_generator(N, N', rates), sorted by real part
// descending (ties by imaginary part).
std::vector<cplx> generator_spectrum(int N, int Np,
                                     const DepolarizerRates& rates);

// Slowest nonzero decay rate of the diagonal-block generator: the coherence
// rate r_xy = -Re(lambda_1) of generator_spectrum(N, N, rates).
double coherence_rate(int N, const DepolarizerRates& rates);

// I/(N+1): the unique stationary state of every diagonal block.
Mat steady_state(int N);

struct DecayFit {
    double rate = 0.0;      // least-squares slope of -log(value) vs time
    double residual = 0.0;  // RMS residual of the log-linear fit
    bool exponential = true;  // residual <= 1e-3
};

// Least-squares exponential-decay fit; requires >= 4 samples, all positive.
DecayFit fit_decay_rate(const std::vector<double>& times,
                        const std::vector<double>& values);

}  // namespace depol
