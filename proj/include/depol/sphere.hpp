#pragma once

#include "depol/core.hpp"
#include "depol/lindblad.hpp"

#include <array>
#include <map>
#include <vector>

namespace depol {

// Wigner small-d matrix element d^S_{m,m'}(theta) in the Varshalovich
// convention (explicit Jacobi sum). S, m, m' may be half-integers of the
// same integrality; throws std::invalid_argument otherwise.
double wigner_d(double S, double m, double mp, double theta);

// D^S_{m,m'}(phi, theta, psi) = e^{-i m phi} d^S_{m,m'}(theta) e^{-i m' psi}
// (zyz Euler angles).
cplx wigner_D(double S, double m, double mp, double phi, double theta,
              double psi);

// Orthonormal spherical harmonic; related to D by
// conj(D^S_{m,0}(phi,theta,.)) = sqrt(4pi/(2S+1)) Y_{S,m}(theta, phi).
cplx spherical_harmonic(int S, int m, double theta, double phi);

// Product quadrature grid: Gauss-Legendre in cos(theta) with 2(s_max+1)
// nodes, 2 s_max + 1 uniform phi nodes. Exact for products of harmonics of
// degree <= s_max.
struct SphereGrid {
    int s_max = 0;
    std::vector<double> cos_theta, theta, w_theta;  // Gauss-Legendre
    std::vector<double> phi;                        // uniform, weight 2pi/n

    static SphereGrid build(int s_max);

    std::size_t n_theta() const { return theta.size(); }
    std::size_t n_phi() const { return phi.size(); }
};

// Multipole index; S, m, m' stored doubled so half-integers stay exact.
struct MultipoleKey {
    int S2 = 0, m2 = 0, mp2 = 0;
    auto operator<=>(const MultipoleKey&) const = default;
};

// Expansion coefficients over orthonormalized D-functions
//   Dtil^S_{m,m'}(phi,theta) = sqrt((2S+1)/4pi) D^S_{m,m'}(phi, theta, 0),
//   c^S_{m,m'} = Integral conj(Dtil) f dOmega.
// The transform is unitary on the sphere marginal: Sum |c|^2 = Int |f|^2.
struct MultipoleCoefficients {
    double s_max = 0.0;
    bool psi_integrated = false;  // only m' = 0 entries present
    std::map<MultipoleKey, cplx> entries;

    cplx at(double S, double m, double mp) const;
    void set(double S, double m, double mp, cplx value);
};

// Husimi Q of a single-block state on the grid:
//   Q_N(theta, phi) = (N+1)/(4pi) <N;theta,phi,0| rho |N;theta,phi,0>.
// Row i = theta node, column j = phi node.
Eigen::MatrixXd su2_q_sphere(const Mat& block_state, const SphereGrid& grid);

// Complex block-pair kernel g_{N,N'} = <n_N| rho_{N,N'} |n_{N'}> at psi = 0,
// weighted by sqrt((N+1)(N'+1))/(4pi) so the diagonal case is Q_N.
Eigen::MatrixXcd pair_kernel(const Mat& rho, int N, int Np,
                             const SphereGrid& grid);

// psi-integrated transform of real samples (m' = 0 channel only).
MultipoleCoefficients multipole_transform(const Eigen::MatrixXd& samples,
                                          const SphereGrid& grid, int s_max);

// Reconstruct real samples from psi-integrated coefficients.
Eigen::MatrixXd multipole_reconstruct(const MultipoleCoefficients& coeffs,
                                      const SphereGrid& grid);

// Multipoles of one block pair: fixed m' = (N - N')/2,
// S = |N-N'|/2 .. (N+N')/2.
MultipoleCoefficients block_pair_multipoles(const Mat& rho, int N, int Np,
                                            const SphereGrid& grid);

// Multipoles of the full state's Q function: every populated block pair
// contributes into its (S, m, m' = (N-N')/2) channels.
MultipoleCoefficients state_multipoles(const TwoModeState& state,
                                       const SphereGrid& grid);

// Exact diagonal propagator: each c^S_{m,m'} is multiplied by
//   exp(-[k2 gamma (S(S+1) - m^2) + k1 gamma0 m'^2] t),
// with the calibrated defaults kappa = (k1, k2) = (4, 8).
struct Kappa {
    double k1 = 4.0, k2 = 8.0;
};

MultipoleCoefficients propagate_multipoles(const MultipoleCoefficients& c,
                                           double t,
                                           const DepolarizerRates& rates,
                                           Kappa kappa = {});

struct Calibration {
    double k1 = 0.0, k2 = 0.0;
    bool has_k1 = false, has_k2 = false;  // channel coverage
    double residual = 0.0;                // RMS log-domain residual
};

// Least-squares (k1, k2) from a time series of multipole coefficients of the
// same initial state; throws on a degenerate channel set.
Calibration calibrate_exponents(const std::vector<double>& times,
                                const std::vector<MultipoleCoefficients>& series,
                                const DepolarizerRates& rates);

// Band-limited point mass at (theta0, phi0, psi0):
// c^S_{m,m'} = conj(Dtil^S_{m,m'}(phi0, theta0)) e^{+i m' psi0}.
MultipoleCoefficients pointmass_coefficients(double theta0, double phi0,
                                             double psi0, int s_max);

// Unnormalized depolarization measure D(t) = Sum |c|^2 exp(2 E t): the
// squared norm of the propagated distribution (Parseval).
double depolarization_measure(const MultipoleCoefficients& c,
                              const DepolarizerRates& rates, Kappa kappa,
                              double t);

// Stokes first moments from the S = 1, m' = 0 channels of a block-N Q
// function: s3 = sqrt(4pi/3)(N+2) c^1_{0,0},
// s1 + i s2 = sqrt(2) sqrt(4pi/3) (N+2) c^1_{-1,0}.
std::array<double, 3> dipole_moments_from_multipoles(
    const MultipoleCoefficients& c, int N);

}  // namespace depol
