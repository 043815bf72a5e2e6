#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "depol/algebra.hpp"
#include "depol/lindblad.hpp"
#include "depol/metrics.hpp"
#include "depol/sphere.hpp"

#include <cmath>
#include <random>

using namespace depol;

namespace {

Mat random_density(int N, std::mt19937_64& rng) {
    std::normal_distribution<double> gauss;
    Mat A(N + 1, N + 1);
    for (int i = 0; i <= N; ++i)
        for (int j = 0; j <= N; ++j) A(i, j) = cplx(gauss(rng), gauss(rng));
    Mat rho = A * A.adjoint();
    return rho / rho.trace();
}

double quad_integral(const Eigen::MatrixXd& f, const SphereGrid& g) {
    double acc = 0.0;
    for (std::size_t i = 0; i < g.n_theta(); ++i)
        for (std::size_t j = 0; j < g.n_phi(); ++j)
            acc += g.w_theta[i] * f(i, j);
    return acc * 2.0 * M_PI / double(g.n_phi());
}

}  // namespace

TEST_CASE("wigner small-d known values") {
    const double th = 0.8;
    CHECK(wigner_d(1, 0, 0, th) == doctest::Approx(std::cos(th)));
    CHECK(wigner_d(1, 1, 0, th) ==
          doctest::Approx(-std::sin(th) / std::sqrt(2.0)));
    CHECK(wigner_d(1, 0, 1, th) ==
          doctest::Approx(std::sin(th) / std::sqrt(2.0)));
    CHECK(wigner_d(1, 1, 1, th) ==
          doctest::Approx((1.0 + std::cos(th)) / 2.0));
    CHECK(wigner_d(0.5, 0.5, 0.5, th) == doctest::Approx(std::cos(th / 2.0)));
    CHECK(wigner_d(0.5, 0.5, -0.5, th) ==
          doctest::Approx(-std::sin(th / 2.0)));
    CHECK(wigner_d(2, 0, 0, th) ==
          doctest::Approx(0.5 * (3.0 * std::cos(th) * std::cos(th) - 1.0)));
    CHECK_THROWS(wigner_d(1, 0.5, 0, th));  // mixed integrality
    // Unitarity of the d-matrix row.
    double row = 0.0;
    for (int mp = -1; mp <= 1; ++mp) {
        const double v = wigner_d(1, 1, mp, th);
        row += v * v;
    }
    CHECK(row == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("spherical harmonics match D-function reduction") {
    const double th = 1.1, ph = 2.0;
    CHECK(spherical_harmonic(0, 0, th, ph).real() ==
          doctest::Approx(1.0 / std::sqrt(4.0 * M_PI)));
    CHECK(spherical_harmonic(1, 0, th, ph).real() ==
          doctest::Approx(std::sqrt(3.0 / (4.0 * M_PI)) * std::cos(th)));
    const cplx y11 = spherical_harmonic(1, 1, th, ph);
    const cplx expect = -std::sqrt(3.0 / (8.0 * M_PI)) * std::sin(th) *
                        std::exp(cplx(0.0, ph));
    CHECK(std::abs(y11 - expect) <= 1e-12);
    for (int S = 0; S <= 3; ++S)
        for (int m = -S; m <= S; ++m) {
            const cplx viaD =
                std::sqrt((2.0 * S + 1.0) / (4.0 * M_PI)) *
                std::conj(wigner_D(S, m, 0, ph, th, 0.0));
            CHECK(std::abs(spherical_harmonic(S, m, th, ph) - viaD) <= 1e-12);
        }
}

TEST_CASE("grid quadrature is orthonormal for harmonics up to s_max") {
    const int s_max = 6;
    const SphereGrid g = SphereGrid::build(s_max);
    for (int S = 0; S <= 3; ++S)
        for (int Sp = 0; Sp <= 3; ++Sp)
            for (int m = -S; m <= S; ++m)
                for (int mp = -Sp; mp <= Sp; ++mp) {
                    cplx acc = 0.0;
                    for (std::size_t i = 0; i < g.n_theta(); ++i)
                        for (std::size_t j = 0; j < g.n_phi(); ++j)
                            acc += g.w_theta[i] *
                                   std::conj(spherical_harmonic(
                                       S, m, g.theta[i], g.phi[j])) *
                                   spherical_harmonic(Sp, mp, g.theta[i],
                                                      g.phi[j]);
                    acc *= 2.0 * M_PI / double(g.n_phi());
                    const double expect = (S == Sp && m == mp) ? 1.0 : 0.0;
                    CHECK(std::abs(acc - expect) <= 1e-12);
                }
}

TEST_CASE("multipole transform round trip and parseval") {
    const int s_max = 5;
    const SphereGrid g = SphereGrid::build(s_max);
    // Band-limited real function from random coefficients.
    std::mt19937_64 rng(11);
    std::normal_distribution<double> gauss;
    MultipoleCoefficients ref;
    ref.s_max = s_max;
    ref.psi_integrated = true;
    for (int S = 0; S <= s_max; ++S) {
        ref.set(S, 0, 0, cplx(gauss(rng), 0.0));
        for (int m = 1; m <= S; ++m) {
            const cplx c(gauss(rng), gauss(rng));
            ref.set(S, m, 0, c);
            // Reality of f: c^S_{-m} = (-1)^m conj(c^S_m).
            ref.set(S, -m, 0, std::pow(-1.0, m) * std::conj(c));
        }
    }
    const Eigen::MatrixXd f = multipole_reconstruct(ref, g);
    const MultipoleCoefficients back = multipole_transform(f, g, s_max);
    for (const auto& [key, c] : ref.entries)
        CHECK(std::abs(c - back.at(key.S2 / 2.0, key.m2 / 2.0, 0.0)) <= 1e-10);
    double norm2 = 0.0;
    for (const auto& [key, c] : ref.entries) norm2 += std::norm(c);
    CHECK(quad_integral(f.cwiseProduct(f), g) ==
          doctest::Approx(norm2).epsilon(1e-10));
}

TEST_CASE("husimi q of a block: normalization and coherent-state peak") {
    const int N = 4;
    const double th0 = 1.0, ph0 = 2.2;
    const SphereGrid g = SphereGrid::build(2 * N);
    const TwoModeState st = su2_coherent_state(N, th0, ph0, 0.0);
    const Eigen::MatrixXd q = su2_q_sphere(*st.find(N, N), g);
    CHECK(quad_integral(q, g) == doctest::Approx(1.0).epsilon(1e-12));
    // Max over the grid is near the state's direction.
    Eigen::Index imax = 0, jmax = 0;
    q.maxCoeff(&imax, &jmax);
    CHECK(std::abs(g.theta[imax] - th0) <= 0.3);
    CHECK(std::abs(std::remainder(g.phi[jmax] - ph0, 2.0 * M_PI)) <= 0.5);
    // Peak value (N+1)/4pi at the exact point.
    const TwoModeState probe = su2_coherent_state(N, th0, ph0, 0.0);
    double peak = 0.0;
    const Vec amp = su2_coherent_amplitudes(N, th0, ph0, 0.0);
    peak = (amp.adjoint() * (*st.find(N, N)) * amp).value().real() *
           double(N + 1) / (4.0 * M_PI);
    CHECK(peak == doctest::Approx(double(N + 1) / (4.0 * M_PI)));
}

TEST_CASE("state multipoles carry reality symmetry and the trace channel") {
    std::mt19937_64 rng(21);
    TwoModeState st;
    st.n_max = 3;
    st.at(2, 2) = 0.7 * random_density(2, rng);
    st.at(3, 3) = 0.3 * random_density(3, rng);
    const SphereGrid g = SphereGrid::build(6);
    const MultipoleCoefficients c = state_multipoles(st, g);
    CHECK(c.psi_integrated);
    // c^0_{00} = (total Q mass) / sqrt(4pi) = 1/sqrt(4pi).
    CHECK(std::abs(c.at(0, 0, 0) - cplx(1.0 / std::sqrt(4.0 * M_PI), 0.0)) <=
          1e-12);
    for (const auto& [key, v] : c.entries) {
        if (key.m2 < 0) continue;
        const cplx mirror = c.at(key.S2 / 2.0, -key.m2 / 2.0, 0.0);
        CHECK(std::abs(mirror - std::pow(-1.0, key.m2 / 2) * std::conj(v)) <=
              1e-12);
    }
}

TEST_CASE("exact propagator matches fock evolution, diagonal blocks") {
    std::mt19937_64 rng(77);
    const DepolarizerRates rates{0.3, 0.17};
    TwoModeState st;
    st.n_max = 4;
    st.at(3, 3) = 0.5 * random_density(3, rng);
    st.at(4, 4) = 0.5 * random_density(4, rng);
    const SphereGrid g = SphereGrid::build(8);
    const MultipoleCoefficients c0 = state_multipoles(st, g);
    for (double t : {0.05, 0.3, 1.0}) {
        const MultipoleCoefficients prop = propagate_multipoles(c0, t, rates);
        const MultipoleCoefficients oracle =
            state_multipoles(evolve(st, t, rates), g);
        for (const auto& [key, a] : prop.entries)
            CHECK(std::abs(a - oracle.at(key.S2 / 2.0, key.m2 / 2.0,
                                         key.mp2 / 2.0)) <= 1e-12);
    }
}

TEST_CASE("exact propagator matches fock evolution, off-diagonal pair") {
    // Pair (2,1): half-integer S and m' = 1/2; exercises the gamma0 channel.
    const DepolarizerRates rates{0.2, 0.4};
    TwoModeState st;
    st.n_max = 2;
    Mat coh(3, 2);
    coh << cplx(0.2, 0.1), cplx(-0.1, 0.05), cplx(0.0, 0.3), cplx(0.15, 0.0),
        cplx(0.05, -0.2), cplx(0.1, 0.1);
    st.at(2, 1) = coh;
    st.at(1, 2) = coh.adjoint();
    st.at(1, 1) = 0.5 * steady_state(1);
    st.at(2, 2) = 0.5 * steady_state(2);
    const SphereGrid g = SphereGrid::build(6);
    const MultipoleCoefficients c0 = state_multipoles(st, g);
    CHECK_FALSE(c0.psi_integrated);
    CHECK(std::abs(c0.at(1.5, 0.5, 0.5)) > 1e-8);  // half-integer channel live
    for (double t : {0.1, 0.6}) {
        const MultipoleCoefficients prop = propagate_multipoles(c0, t, rates);
        const MultipoleCoefficients oracle =
            state_multipoles(evolve(st, t, rates), g);
        for (const auto& [key, a] : prop.entries)
            CHECK(std::abs(a - oracle.at(key.S2 / 2.0, key.m2 / 2.0,
                                         key.mp2 / 2.0)) <= 1e-12);
    }
    // Spot-check one decay factor: channel (S, m, m') = (1/2, 1/2, 1/2)
    // has exponent k2 g (3/4 - 1/4) + k1 g0 / 4 with (k1, k2) = (4, 8).
    const double t = 0.6;
    const double expo = 8.0 * rates.gamma * 0.5 + 4.0 * rates.gamma0 * 0.25;
    const MultipoleCoefficients prop = propagate_multipoles(c0, t, rates);
    CHECK(std::abs(prop.at(0.5, 0.5, 0.5) -
                   c0.at(0.5, 0.5, 0.5) * std::exp(-expo * t)) <= 1e-14);
}

TEST_CASE("calibration recovers (4, 8)") {
    const DepolarizerRates rates{0.25, 0.35};
    const TwoModeState st = two_mode_coherent_state({0.9, 0.2}, {0.5, -0.4}, 5);
    const SphereGrid g = SphereGrid::build(5);
    std::vector<double> times{0.0, 0.08, 0.2, 0.45, 0.9};
    std::vector<MultipoleCoefficients> series;
    for (double t : times)
        series.push_back(state_multipoles(evolve(st, t, rates), g));
    const Calibration cal = calibrate_exponents(times, series, rates);
    REQUIRE(cal.has_k1);
    REQUIRE(cal.has_k2);
    CHECK(cal.k1 == doctest::Approx(4.0).epsilon(1e-7));
    CHECK(cal.k2 == doctest::Approx(8.0).epsilon(1e-7));
    CHECK(cal.residual <= 1e-7);
}

TEST_CASE("point mass coefficients reconstruct a peaked distribution") {
    const double th0 = 0.9, ph0 = 1.3;
    const MultipoleCoefficients c = pointmass_coefficients(th0, ph0, 0.0, 12);
    // m' = 0 sub-series evaluated back at the point: sum (2S+1)/4pi grows
    // with the band limit (delta-like), and at an antipodal point it stays
    // small.
    const SphereGrid g = SphereGrid::build(12);
    MultipoleCoefficients marginal;
    marginal.s_max = 12;
    marginal.psi_integrated = true;
    for (const auto& [key, v] : c.entries)
        if (key.mp2 == 0) marginal.set(key.S2 / 2.0, key.m2 / 2.0, 0.0, v);
    const Eigen::MatrixXd f = multipole_reconstruct(marginal, g);
    Eigen::Index imax = 0, jmax = 0;
    f.maxCoeff(&imax, &jmax);
    CHECK(std::abs(g.theta[imax] - th0) <= 0.2);
    CHECK(std::abs(std::remainder(g.phi[jmax] - ph0, 2.0 * M_PI)) <= 0.3);
}

TEST_CASE("depolarization measure equals the q-function norm and decays") {
    std::mt19937_64 rng(5);
    const DepolarizerRates rates{0.3, 0.2};
    TwoModeState st;
    st.n_max = 3;
    st.at(2, 2) = 0.4 * random_density(2, rng);
    st.at(3, 3) = 0.6 * random_density(3, rng);
    const SphereGrid g = SphereGrid::build(8);
    const MultipoleCoefficients c0 = state_multipoles(st, g);
    double prev = 1e300;
    for (double t : {0.0, 0.1, 0.4, 1.0, 4.0}) {
        const double d = depolarization_measure(c0, rates, {}, t);
        const Eigen::MatrixXd q_rows = [&] {
            Eigen::MatrixXd acc =
                Eigen::MatrixXd::Zero(g.n_theta(), g.n_phi());
            const TwoModeState ev = evolve(st, t, rates);
            for (const auto& [key, rho] : ev.blocks)
                if (key.first == key.second) acc += su2_q_sphere(rho, g);
            return acc;
        }();
        CHECK(d == doctest::Approx(quad_integral(q_rows.cwiseProduct(q_rows),
                                                 g))
                       .epsilon(1e-9));
        CHECK(d <= prev + 1e-12);
        prev = d;
    }
    // Asymptote: only the S = 0 channel survives.
    const double floor = std::norm(c0.at(0, 0, 0));
    CHECK(depolarization_measure(c0, rates, {}, 1e4) ==
          doctest::Approx(floor).epsilon(1e-12));
}

TEST_CASE("dipole moments from multipoles equal the operator moments") {
    for (int N : {1, 2, 4}) {
        const TwoModeState st = su2_coherent_state(N, 1.2, 0.8, 0.0);
        const SphereGrid g = SphereGrid::build(2 * N);
        const auto dip =
            dipole_moments_from_multipoles(state_multipoles(st, g), N);
        const auto s = stokes_moments(st);
        CHECK(dip[0] == doctest::Approx(s[1]).epsilon(1e-10));
        CHECK(dip[1] == doctest::Approx(s[2]).epsilon(1e-10));
        CHECK(dip[2] == doctest::Approx(s[3]).epsilon(1e-10));
    }
}

namespace {
// Q of the weighted mixture within one block, used below.
}  // namespace

TEST_CASE("q of su2 coherent mixture of two antipodal states is symmetric") {
    const int N = 2;
    const TwoModeState a = su2_coherent_state(N, 0.4, 0.0, 0.0);
    const TwoModeState b = su2_coherent_state(N, M_PI - 0.4, M_PI, 0.0);
    const TwoModeState m = mixed_state({{0.5, a}, {0.5, b}});
    const SphereGrid g = SphereGrid::build(2 * N);
    const Eigen::MatrixXd q = su2_q_sphere(*m.find(N, N), g);
    CHECK(quad_integral(q, g) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(q.minCoeff() >= -1e-14);
}
