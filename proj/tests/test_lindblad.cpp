#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "depol/algebra.hpp"
#include "depol/lindblad.hpp"
#include "depol/metrics.hpp"

#include <cmath>
#include <random>

using namespace depol;

namespace {

// Random density matrix on block N (Wishart construction).
Mat random_density(int N, std::mt19937_64& rng) {
    std::normal_distribution<double> gauss;
    Mat A(N + 1, N + 1);
    for (int i = 0; i <= N; ++i)
        for (int j = 0; j <= N; ++j) A(i, j) = cplx(gauss(rng), gauss(rng));
    Mat rho = A * A.adjoint();
    return rho / rho.trace();
}

}  // namespace

TEST_CASE("one-photon generator spectrum is {0, -8g, -8g, -16g}") {
    const double g = 0.25;
    const auto ev = generator_spectrum(1, 1, {g, 0.7});
    REQUIRE(ev.size() == 4);
    CHECK(std::abs(ev[0]) <= 1e-12);
    CHECK(ev[1].real() == doctest::Approx(-8.0 * g).epsilon(1e-12));
    CHECK(ev[2].real() == doctest::Approx(-8.0 * g).epsilon(1e-12));
    CHECK(ev[3].real() == doctest::Approx(-16.0 * g).epsilon(1e-12));
    for (const cplx& e : ev) CHECK(std::abs(e.imag()) <= 1e-12);
    // gamma0 does not touch diagonal blocks.
    const auto ev2 = generator_spectrum(1, 1, {g, 123.0});
    for (std::size_t i = 0; i < 4; ++i)
        CHECK(std::abs(ev[i] - ev2[i]) <= 1e-10);
    CHECK(coherence_rate(1, {g, 0.0}) == doctest::Approx(8.0 * g));
}

TEST_CASE("off-diagonal pair (1,0) decays uniformly at gamma0 + 4 gamma") {
    const double g = 0.3, g0 = 0.11;
    const auto ev = generator_spectrum(1, 0, {g, g0});
    REQUIRE(ev.size() == 2);
    for (const cplx& e : ev) {
        CHECK(e.real() == doctest::Approx(-(g0 + 4.0 * g)).epsilon(1e-12));
        CHECK(std::abs(e.imag()) <= 1e-12);
    }
}

TEST_CASE("diagonal blocks relax to the maximally mixed state") {
    std::mt19937_64 rng(12345);
    const DepolarizerRates rates{0.5, 0.2};
    for (int N = 1; N <= 6; ++N) {
        TwoModeState st;
        st.n_max = N;
        st.at(N, N) = random_density(N, rng);
        const TwoModeState out = evolve(st, 30.0 / rates.gamma, rates);
        CHECK((*out.find(N, N) - steady_state(N)).norm() <= 1e-8);
        // Null space is one-dimensional ...
        const auto ev = generator_spectrum(N, N, rates);
        int zeros = 0;
        for (const cplx& e : ev) zeros += std::abs(e) <= 1e-9 ? 1 : 0;
        CHECK(zeros == 1);
        // ... and spanned by the identity.
        const Mat G = pair_generator(N, N, rates);
        const Mat id = steady_state(N);
        CHECK((G * Eigen::Map<const Vec>(id.data(), id.size())).norm() <=
              1e-12);
    }
}

TEST_CASE("evolution is trace preserving, hermiticity preserving, a semigroup") {
    std::mt19937_64 rng(99);
    const DepolarizerRates rates{0.4, 0.15};
    TwoModeState st;
    st.n_max = 3;
    st.at(2, 2) = 0.6 * random_density(2, rng);
    st.at(3, 3) = 0.4 * random_density(3, rng);
    Mat coh(3, 4);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 4; ++j) coh(i, j) = cplx(0.05 * i, 0.03 * j);
    st.at(2, 3) = coh;
    st.at(3, 2) = coh.adjoint();

    const TwoModeState a = evolve(st, 0.7, rates);
    CHECK(a.trace() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(a.hermiticity_defect() <= 1e-12);

    const TwoModeState b = evolve(evolve(st, 0.3, rates), 0.4, rates);
    for (const auto& [key, m] : a.blocks)
        CHECK((m - *b.find(key.first, key.second)).norm() <= 1e-10);
}

TEST_CASE("adaptive integrator matches the exact exponential") {
    std::mt19937_64 rng(7);
    const DepolarizerRates rates{0.8, 0.3};
    TwoModeState st;
    st.n_max = 4;
    st.at(4, 4) = random_density(4, rng);
    st.at(4, 2) = Mat::Constant(5, 3, cplx(0.1, -0.05));
    st.at(2, 4) = st.at(4, 2).adjoint();
    st.at(2, 2) = random_density(2, rng);
    const TwoModeState ex = evolve(st, 0.5, rates, EvolveMethod::ExactExpm);
    const TwoModeState rk = evolve(st, 0.5, rates, EvolveMethod::RkAdaptive);
    for (const auto& [key, m] : ex.blocks)
        CHECK((m - *rk.find(key.first, key.second)).norm() <= 1e-7);
}

TEST_CASE("rhs agrees with the generator matrix") {
    std::mt19937_64 rng(3);
    const DepolarizerRates rates{0.35, 0.12};
    TwoModeState st;
    st.n_max = 3;
    st.at(3, 3) = random_density(3, rng);
    st.at(3, 1) = Mat::Constant(4, 2, cplx(0.2, 0.1));
    const TwoModeState d = depolarizing_rhs(st, rates);
    for (const auto& [key, rho] : st.blocks) {
        const Mat G = pair_generator(key.first, key.second, rates);
        const Vec v = G * Eigen::Map<const Vec>(rho.data(), rho.size());
        const Mat expect =
            Eigen::Map<const Mat>(v.data(), rho.rows(), rho.cols());
        CHECK((*d.find(key.first, key.second) - expect).norm() <= 1e-12);
    }
}

TEST_CASE("one-photon bloch decay: z-rate exactly twice the xy-rate") {
    const double g = 0.2;
    const DepolarizerRates rates{g, 0.0};
    const TwoModeState st = su2_coherent_state(1, 1.0, 0.4, 0.0);
    std::vector<double> times, x, z;
    for (int i = 1; i <= 12; ++i) {
        const double t = 0.05 * i;
        const auto s = stokes_moments(evolve(st, t, rates));
        times.push_back(t);
        x.push_back(std::abs(s[1]));
        z.push_back(std::abs(s[3]));
    }
    const DecayFit fx = fit_decay_rate(times, x);
    const DecayFit fz = fit_decay_rate(times, z);
    CHECK(fx.residual <= 1e-9);
    CHECK(fz.residual <= 1e-9);
    CHECK(fx.rate == doctest::Approx(8.0 * g).epsilon(1e-9));
    CHECK(fz.rate == doctest::Approx(16.0 * g).epsilon(1e-9));
    CHECK(fz.rate / fx.rate == doctest::Approx(2.0).epsilon(1e-9));
}

TEST_CASE("fit_decay_rate contract") {
    std::vector<double> t{0.0, 0.1, 0.2, 0.3, 0.4};
    std::vector<double> v;
    for (double ti : t) v.push_back(2.0 * std::exp(-3.0 * ti));
    const DecayFit fit = fit_decay_rate(t, v);
    CHECK(fit.rate == doctest::Approx(3.0).epsilon(1e-12));
    CHECK(fit.exponential);

    std::vector<double> bent;
    for (double ti : t) bent.push_back(std::exp(-3.0 * ti * ti));
    CHECK_FALSE(fit_decay_rate(t, bent).exponential);

    CHECK_THROWS(fit_decay_rate({0.0, 0.1, 0.2}, {1.0, 0.9, 0.8}));
    CHECK_THROWS(fit_decay_rate(t, {1.0, 0.5, 0.0, -0.1, 0.1}));
}
