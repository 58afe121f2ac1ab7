#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "dyngal/equations.hpp"
#include "support.hpp"

using namespace dyngal;
using dyngal::testkit::property_cases;
using dyngal::testkit::rng_for;

namespace {

constexpr double pi = std::numbers::pi;

/// -1/2 i 2 pi k sum_{p+q=k} u_p u_q for |k| <= k_cut, by direct convolution.
SpectralField<1> burgers_rhs_oracle(const SpectralField<1>& u) {
    const int kc = u.grid().k_cut();
    SpectralField<1> out(u.grid());
    for (int k = -kc; k <= kc; ++k) {
        Complex acc{};
        for (int p = -kc; p <= kc; ++p) {
            const int q = k - p;
            if (std::abs(q) <= kc) acc += u(p) * u(q);
        }
        out(k) = -0.5 * Complex(0.0, 2.0 * pi * k) * acc;
    }
    return out;
}

} // namespace

TEST(Burgers, SineRightHandSide) {
    const auto g = Grid<1>::dealiased(64);
    const auto rhs = to_physical(burgers_rhs(sine_initial(g)));
    for (std::size_t m = 0; m < rhs.size(); ++m)
        EXPECT_NEAR(rhs[m], -pi * std::sin(4.0 * pi * rhs.x(m)), 1e-12);
}

TEST(Burgers, MatchesDirectConvolution) {
    for (int seed = 0; seed < property_cases; ++seed) {
        auto rng = rng_for(seed);
        const auto g = Grid<1>::dealiased(std::size_t{16} << (seed % 4));
        const auto u = testkit::random_truncated(g, rng);
        const auto fast = burgers_rhs(u);
        const auto slow = burgers_rhs_oracle(u);
        EXPECT_LT(testkit::max_coeff_diff(fast, slow), 1e-11 * testkit::max_coeff(slow)) << seed;
    }
}

TEST(Burgers, InviscidEnergyNeutral) {
    for (int seed = 0; seed < property_cases; ++seed) {
        auto rng = rng_for(seed);
        const auto g = Grid<1>::dealiased(256);
        const auto u = testkit::random_truncated(g, rng);
        const auto r = burgers_rhs(u);
        EXPECT_LT(std::abs(inner(u, r)), 1e-12 * std::sqrt(energy(u) * energy(r)));
    }
}

TEST(Burgers, ViscousDissipation) {
    for (int seed = 0; seed < property_cases; ++seed) {
        auto rng = rng_for(seed);
        const auto g = Grid<1>::dealiased(128);
        const auto u = testkit::random_truncated(g, rng);
        const double nu = 1e-3 * (1 + seed % 5);
        const double dissipation = nu * energy(spectral_derivative(u));
        EXPECT_NEAR(inner(u, burgers_rhs(u, {nu})), -dissipation, 1e-10 * dissipation);
    }
    EXPECT_THROW(burgers_rhs(sine_initial(Grid<1>::dealiased(8)), {-1.0}), ArgumentError);
}

TEST(Euler2D, EnergyAndEnstrophyNeutral) {
    for (int seed = 0; seed < property_cases; ++seed) {
        auto rng = rng_for(seed);
        const auto g = Grid<2>::dealiased(seed % 2 ? 16 : 32);
        auto w = testkit::random_truncated(g, rng);
        w(0, 0) = 0.0;
        const auto r = euler2d_rhs(w);
        const double scale = std::sqrt(energy(w) * energy(r));
        EXPECT_LT(std::abs(inner(w, r)), 1e-12 * scale);
        EXPECT_LT(std::abs(inner(streamfunction(w), r)), 1e-12 * scale);
        EXPECT_LT(std::abs(r(0, 0)), 1e-12 * testkit::max_coeff(r));
    }
}

TEST(Euler2D, VelocityIsDivergenceFreeAndRecoversVorticity) {
    auto rng = rng_for(3);
    const auto g = Grid<2>::dealiased(32);
    auto w = testkit::random_truncated(g, rng);
    w(0, 0) = 0.0;
    const auto [u, v] = velocity(w);
    const auto div = spectral_derivative(u, 0) + spectral_derivative(v, 1);
    EXPECT_LT(testkit::max_coeff(div), 1e-12 * testkit::max_coeff(w));
    const auto curl = spectral_derivative(v, 0) - spectral_derivative(u, 1);
    EXPECT_LT(testkit::max_coeff_diff(curl, w), 1e-12 * testkit::max_coeff(w));
    EXPECT_NEAR(kinetic_energy(w), energy(u) + energy(v), 1e-12 * kinetic_energy(w));
}

TEST(Euler2D, SteadyStates) {
    const auto g = Grid<2>::dealiased(32);
    EXPECT_LT(testkit::max_coeff(euler2d_rhs(taylor_green(g))), 1e-13);
    SpectralField<2> single(g);
    single.set_mode(3, -2, {0.4, 0.7});
    EXPECT_LT(testkit::max_coeff(euler2d_rhs(single)), 1e-12);
    const auto tg = to_physical(taylor_green(g));
    EXPECT_NEAR(tg(3, 5), std::cos(2 * pi * 3 / 32.0) * std::cos(2 * pi * 5 / 32.0), 1e-14);
}

TEST(Euler2D, NonZeroMeanRejected) {
    auto w = taylor_green(Grid<2>::dealiased(16));
    w(0, 0) = 0.5;
    EXPECT_THROW(streamfunction(w), IntegrityError);
    EXPECT_THROW(euler2d_rhs(w), IntegrityError);
}

TEST(Euler2D, DiagnosticsOfTaylorGreen) {
    const auto w = taylor_green(Grid<2>::dealiased(16));
    EXPECT_NEAR(enstrophy(w), 0.125, 1e-15);
    EXPECT_NEAR(kinetic_energy(w), 0.25 / (8.0 * pi * pi), 1e-15);
}

TEST(RandomVorticity, BandEnstrophyAndDeterminism) {
    const auto g = Grid<2>::dealiased(64);
    const auto a = random_vorticity(g, 42);
    EXPECT_NEAR(enstrophy(a), 50.0, 1e-10);
    EXPECT_LT(hermitian_defect(a), 1e-15);
    const std::size_t n = g.n();
    for (std::size_t i = 0; i < a.size(); ++i) {
        const int kx = wavenumber(i / n, n), ky = wavenumber(i % n, n);
        const long shell = std::lround(std::sqrt(static_cast<double>(kx * kx + ky * ky)));
        if (shell < 2 || shell > 10) {
            EXPECT_EQ(a.coeffs()[i], Complex{});
        }
    }
    EXPECT_EQ(testkit::max_coeff_diff(a, random_vorticity(g, 42)), 0.0);
    EXPECT_GT(testkit::max_coeff_diff(a, random_vorticity(g, 43)), 0.1);
    EXPECT_NEAR(enstrophy(random_vorticity(g, 1, 3.0, 1, 5)), 3.0, 1e-12);
    EXPECT_THROW(random_vorticity(g, 1, 1.0, 2, 40), ConfigurationError);
}
