#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "dyngal/oracle.hpp"
#include "support.hpp"

using namespace dyngal;
using dyngal::testkit::rng_for;

namespace {

constexpr double pi = std::numbers::pi;

/// Characteristic foot by plain bisection on [0, 1/2] restricted to the
/// increasing branch, located by dense sampling.
double foot_by_bisection(double x, double t) {
    auto f = [&](double y) { return y + t * std::sin(2 * pi * y) - x; };
    double hi = 0.5;
    for (int i = 1; i <= 200000; ++i) {
        const double y = 0.5 * i / 200000.0;
        if (1.0 + 2 * pi * t * std::cos(2 * pi * y) <= 0.0) {
            hi = y;
            break;
        }
    }
    double lo = 0.0;
    if (f(hi) < 0.0) return hi;
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        (f(mid) < 0.0 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

/// Lax-Oleinik formula u = (x - y*) / t, y* minimizing U0(y) + (x - y)^2 / (2t),
/// with U0(y) = (1 - cos 2 pi y) / (2 pi), by grid search and golden-section refinement.
double hopf_lax(double x, double t) {
    auto cost = [&](double y) { return (1.0 - std::cos(2 * pi * y)) / (2 * pi) + (x - y) * (x - y) / (2 * t); };
    double best = x, best_c = cost(x);
    const int samples = 20000;
    for (int i = 0; i <= samples; ++i) {
        const double y = x - 1.0 + 2.0 * i / samples;
        if (const double c = cost(y); c < best_c) best_c = c, best = y;
    }
    double a = best - 2.0 / samples, b = best + 2.0 / samples;
    const double r = (std::sqrt(5.0) - 1.0) / 2.0;
    for (int i = 0; i < 200; ++i) {
        const double c = b - r * (b - a), d = a + r * (b - a);
        (cost(c) < cost(d) ? b : a) = (cost(c) < cost(d) ? d : c);
    }
    return (x - 0.5 * (a + b)) / t;
}

} // namespace

TEST(Oracle, InitialCondition) {
    for (double x : {0.0, 0.1, 0.25, 0.6, 0.9}) EXPECT_NEAR(oracle::entropy_eval(x, 0.0), std::sin(2 * pi * x), 1e-15);
    EXPECT_THROW(oracle::entropy_eval(0.2, -0.1), ArgumentError);
    EXPECT_THROW(oracle::analytic_energy(-1.0), ArgumentError);
}

TEST(Oracle, MatchesBisectionReference) {
    const double x0 = foot_by_bisection(0.25, 0.1);
    EXPECT_NEAR(oracle::characteristic_foot(0.25, 0.1), x0, 1e-13);
    EXPECT_NEAR(oracle::entropy_eval(0.25, 0.1), std::sin(2 * pi * x0), 1e-13);
    for (double t : {0.05, 0.159, 0.2, 0.3, 0.5})
        for (double x : {0.01, 0.1, 0.3, 0.45, 0.499})
            EXPECT_NEAR(oracle::characteristic_foot(x, t), foot_by_bisection(x, t), 1e-12) << x << " " << t;
}

TEST(Oracle, FootSolvesCharacteristicEquation) {
    auto rng = rng_for(0);
    std::uniform_real_distribution<double> X(0.0, 0.5), T(0.0, 0.6);
    for (int i = 0; i < 10000; ++i) {
        const double x = X(rng), t = T(rng);
        const double y = oracle::characteristic_foot(x, t);
        ASSERT_GE(y, 0.0);
        ASSERT_LE(y, 0.5);
        ASSERT_NEAR(y + t * std::sin(2 * pi * y), x, 1e-12) << x << " " << t;
    }
}

TEST(Oracle, OddAndPeriodic) {
    auto rng = rng_for(1);
    std::uniform_real_distribution<double> X(-2.0, 2.0), T(0.0, 0.6);
    for (int i = 0; i < 10000; ++i) {
        const double x = X(rng), t = T(rng);
        const double u = oracle::entropy_eval(x, t);
        ASSERT_NEAR(oracle::entropy_eval(-x, t), -u, 1e-13);
        ASSERT_NEAR(oracle::entropy_eval(x + 1.0, t), u, 1e-12);
        ASSERT_LE(std::abs(u), 1.0);
    }
    EXPECT_EQ(oracle::entropy_eval(0.5, 0.3), 0.0);
    EXPECT_EQ(oracle::entropy_eval(0.0, 0.3), 0.0);
}

TEST(Oracle, AgreesWithHopfLaxFormula) {
    auto rng = rng_for(2);
    std::uniform_real_distribution<double> X(0.0, 1.0), T(0.02, 0.5);
    for (int i = 0; i < 200; ++i) {
        const double x = X(rng), t = T(rng);
        if (std::abs(x - 0.5) < 0.02) continue;
        EXPECT_NEAR(oracle::entropy_eval(x, t), hopf_lax(x, t), 1e-7) << x << " " << t;
    }
}

TEST(Oracle, ShockAfterBreakingTime) {
    EXPECT_NEAR(oracle::shock_time, 1.0 / (2 * pi), 1e-17);
    const double left = oracle::entropy_eval(0.5 - 1e-12, 0.3);
    EXPECT_GT(left, 0.3);
    EXPECT_NEAR(oracle::entropy_eval(0.5 + 1e-12, 0.3), -left, 1e-9);
    EXPECT_LT(std::abs(oracle::entropy_eval(0.5 - 1e-9, 0.1)), 1e-6);
}

TEST(Oracle, EnergyConservedBeforeShockAndDecaysAfter) {
    for (double t : {0.0, 0.05, 0.1, 0.15}) EXPECT_NEAR(oracle::analytic_energy(t), 0.5, 1e-12) << t;
    double prev = oracle::analytic_energy(oracle::shock_time);
    for (double t = oracle::shock_time + 0.01; t <= 0.6; t += 0.01) {
        const double e = oracle::analytic_energy(t);
        EXPECT_LT(e, prev) << t;
        prev = e;
    }
}

TEST(Oracle, QuadratureMatchesClosedForm) {
    for (double t = 0.0; t <= 0.6; t += 0.025)
        EXPECT_NEAR(oracle::analytic_energy(t), oracle::analytic_energy_closed_form(t), 1e-11) << t;
}

TEST(Oracle, SampledEnergyConvergesToAnalytic) {
    const auto g = Grid<1>::dealiased(1 << 14);
    EXPECT_NEAR(mean_square(oracle::entropy_sample(g, 0.3)), oracle::analytic_energy(0.3), 1e-4);
}
