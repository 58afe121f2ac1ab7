#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "dyngal/spectral.hpp"
#include "support.hpp"

using namespace dyngal;
using dyngal::testkit::property_cases;
using dyngal::testkit::rng_for;

namespace {

const double two_pi = 2.0 * std::numbers::pi;

PhysicalField<1> sample(const Grid<1>& g, double (*f)(double)) {
    PhysicalField<1> p(g);
    for (std::size_t m = 0; m < p.size(); ++m) p[m] = f(p.x(m));
    return p;
}

double sin1(double x) { return std::sin(two_pi * x); }

} // namespace

TEST(Grid, RejectsInvalidSizes) {
    EXPECT_THROW(Grid<1>(12, 3), ConfigurationError);
    EXPECT_THROW(Grid<1>(4, 1), ConfigurationError);
    EXPECT_THROW(Grid<1>(16, 8), ConfigurationError);
    EXPECT_NO_THROW(Grid<1>(16, 5));
}

TEST(Grid, PaddedSizeExceedsThreeCutoffs) {
    for (std::size_t n : {8u, 64u, 1024u}) {
        const auto g = Grid<1>::dealiased(n);
        EXPECT_EQ(g.k_cut(), static_cast<int>(n / 3));
        EXPECT_EQ(g.padded_n(), n);
    }
    const Grid<1> g(32, 15);
    EXPECT_GT(g.padded_n(), 3u * 15u);
    EXPECT_EQ(g.padded_n(), 64u);
}

TEST(ToSpectral, SingleSineMode) {
    const auto s = to_spectral(sample(Grid<1>::dealiased(8), sin1));
    EXPECT_NEAR(s(1).real(), 0.0, 1e-15);
    EXPECT_NEAR(s(1).imag(), -0.5, 1e-15);
    EXPECT_NEAR(s(-1).imag(), 0.5, 1e-15);
    for (int k : {0, 2, 3, -2, -3, -4}) EXPECT_LT(std::abs(s(k)), 1e-15) << k;
}

TEST(ToSpectral, ZeroField) {
    const auto s = to_spectral(PhysicalField<1>(Grid<1>::dealiased(16)));
    for (const auto& c : s.coeffs()) EXPECT_EQ(c, Complex{});
}

TEST(ToSpectral, MatchesDirectSummation) {
    const auto g = Grid<1>::dealiased(64);
    const auto p = sample(g, [](double x) { return std::sin(two_pi * x) + 0.3 * std::cos(3.0 * two_pi * x); });
    const auto s = to_spectral(p);
    const auto ref = testkit::direct_dft(std::vector<double>(p.values().begin(), p.values().end()));
    for (std::size_t k = 0; k < 64; ++k) {
        if (k == 32) continue;
        EXPECT_NEAR(std::abs(s.coeffs()[k] - ref[k]), 0.0, 1e-15) << k;
    }
    EXPECT_NEAR(s(1).imag(), -0.5, 1e-15);
    EXPECT_NEAR(s(3).real(), 0.15, 1e-15);
    EXPECT_NEAR(s(-3).real(), 0.15, 1e-15);
}

TEST(ToPhysical, ConstantMode) {
    SpectralField<1> s(Grid<1>::dealiased(16));
    s(0) = 1.0;
    const auto one = to_physical(s);
    for (double v : one.values()) EXPECT_NEAR(v, 1.0, 1e-15);
    const auto zero = to_physical(SpectralField<1>(Grid<1>::dealiased(16)));
    for (double v : zero.values()) EXPECT_EQ(v, 0.0);
}

TEST(ToPhysical, RejectsBrokenHermitianSymmetry) {
    SpectralField<1> s(Grid<1>::dealiased(16));
    s(2) = Complex(1.0, 0.5);
    EXPECT_THROW(to_physical(s), IntegrityError);
    SpectralField<2> s2(Grid<2>::dealiased(8));
    s2(1, 2) = 1.0;
    EXPECT_THROW(to_physical(s2), IntegrityError);
}

TEST(SpectralProperties, RoundTripAllSizes) {
    int cases = 0;
    for (std::size_t n = 8; n <= 4096; n *= 2) {
        for (int seed = 0; seed < 12; ++seed, ++cases) {
            auto rng = rng_for(seed + 100 * n);
            const auto g = Grid<1>::dealiased(n);
            // Samples of a real field without a Nyquist component.
            auto s = testkit::random_spectral(g, rng, static_cast<int>(n / 2) - 1);
            const auto p = to_physical(s);
            const auto back = to_physical(to_spectral(p));
            double scale = 0.0;
            for (double v : p.values()) scale = std::max(scale, std::abs(v));
            EXPECT_LE(testkit::max_abs_diff(std::vector<double>(p.values().begin(), p.values().end()), back.values()),
                      1e-13 * scale)
                << "n=" << n << " seed=" << seed;
        }
    }
    EXPECT_GE(cases, property_cases);
}

TEST(SpectralProperties, RoundTrip2D) {
    for (int seed = 0; seed < property_cases; ++seed) {
        auto rng = rng_for(seed);
        const auto g = Grid<2>::dealiased(seed % 2 ? 16 : 32);
        const auto s = testkit::random_spectral(g, rng, static_cast<int>(g.n() / 2) - 1);
        const auto back = to_spectral(to_physical(s));
        EXPECT_LE(testkit::max_coeff_diff(s, back), 1e-13 * testkit::max_coeff(s));
    }
}

TEST(SpectralProperties, Parseval) {
    for (int seed = 0; seed < property_cases; ++seed) {
        auto rng = rng_for(seed);
        const std::size_t n = std::size_t{8} << (seed % 9);
        const auto p = testkit::random_physical(Grid<1>::dealiased(n), rng);
        // The Nyquist component is discarded by design; compare with its removal.
        const auto s = to_spectral(p);
        const auto q = to_physical(s);
        EXPECT_NEAR(energy(s), mean_square(q), 1e-12 * mean_square(q));
    }
    for (int seed = 0; seed < property_cases; ++seed) {
        auto rng = rng_for(seed + 7);
        const auto s = testkit::random_spectral(Grid<2>::dealiased(16), rng, 7);
        const auto p = to_physical(s);
        EXPECT_NEAR(energy(s), mean_square(p), 1e-12 * energy(s));
    }
}

TEST(FourierProject, Examples) {
    const auto g = Grid<1>::dealiased(32);
    const auto s = to_spectral(sample(g, sin1));
    EXPECT_NEAR(energy(fourier_project(s, 0)), 0.0, 1e-30);
    EXPECT_EQ(testkit::max_coeff_diff(fourier_project(s, 16), s), 0.0);
    EXPECT_THROW(fourier_project(s, -1), ArgumentError);
    EXPECT_THROW(fourier_project(s, 17), ArgumentError);
}

TEST(FourierProject, EnergyIdempotenceSelfAdjoint) {
    for (int seed = 0; seed < property_cases; ++seed) {
        auto rng = rng_for(seed);
        const auto g = Grid<1>::dealiased(64);
        const auto a = testkit::random_spectral(g, rng, 31);
        const auto b = testkit::random_spectral(g, rng, 31);
        const int k = seed % 32;
        const auto pa = fourier_project(a, k);
        EXPECT_LE(energy(pa), energy(a));
        EXPECT_EQ(testkit::max_coeff_diff(fourier_project(pa, k), pa), 0.0);
        const double lhs = inner(pa, b), rhs = inner(a, fourier_project(b, k));
        EXPECT_NEAR(lhs, rhs, 1e-12 * (std::abs(lhs) + 1.0));
    }
}

namespace {

SpectralField<1> brute_convolution(const SpectralField<1>& a, const SpectralField<1>& b) {
    const int kc = a.grid().k_cut();
    SpectralField<1> out(a.grid());
    for (int k = -kc; k <= kc; ++k) {
        Complex acc{};
        for (int p = -kc; p <= kc; ++p) {
            const int q = k - p;
            if (std::abs(q) <= kc) acc += a(p) * b(q);
        }
        out(k) = acc;
    }
    return out;
}

SpectralField<2> brute_convolution(const SpectralField<2>& a, const SpectralField<2>& b) {
    const int kc = a.grid().k_cut();
    SpectralField<2> out(a.grid());
    for (int kx = -kc; kx <= kc; ++kx)
        for (int ky = -kc; ky <= kc; ++ky) {
            Complex acc{};
            for (int px = -kc; px <= kc; ++px)
                for (int py = -kc; py <= kc; ++py) {
                    const int qx = kx - px, qy = ky - py;
                    if (std::abs(qx) <= kc && std::abs(qy) <= kc) acc += a(px, py) * b(qx, qy);
                }
            out(kx, ky) = acc;
        }
    return out;
}

} // namespace

TEST(DealiasedProduct, SineSquared) {
    const auto g = Grid<1>::dealiased(16);
    const auto s = to_spectral(sample(g, sin1));
    const auto p = dealiased_product(s, s);
    EXPECT_NEAR(p(0).real(), 0.5, 1e-15);
    EXPECT_NEAR(p(2).real(), -0.25, 1e-15);
    EXPECT_NEAR(p(-2).real(), -0.25, 1e-15);
    EXPECT_NEAR(std::abs(p(1)), 0.0, 1e-15);
}

TEST(DealiasedProduct, ZeroAndMismatch) {
    const auto g = Grid<1>::dealiased(16);
    auto rng = rng_for(1);
    const auto a = testkit::random_truncated(g, rng);
    EXPECT_EQ(testkit::max_coeff(dealiased_product(SpectralField<1>(g), a)), 0.0);
    EXPECT_THROW(dealiased_product(a, SpectralField<1>(Grid<1>::dealiased(32))), ConfigurationError);
}

TEST(DealiasedProduct, ExhaustiveSmallGridsMatchConvolution) {
    int cases = 0;
    for (std::size_t n : {8u, 16u, 32u, 64u}) {
        for (int kc = 1; 2 * kc < static_cast<int>(n); ++kc)
        for (int seed = 0; seed < 2; ++seed) {
            const Grid<1> g(n, kc);
            auto rng = rng_for(n * 1000 + kc * 10 + seed);
            const auto a = testkit::random_truncated(g, rng);
            const auto b = testkit::random_truncated(g, rng);
            const auto fast = dealiased_product(a, b);
            const auto slow = brute_convolution(a, b);
            EXPECT_LE(testkit::max_coeff_diff(fast, slow), 1e-12 * testkit::max_coeff(slow)) << n << " " << kc;
            ++cases;
        }
    }
    for (std::size_t n : {8u, 16u}) {
        for (int kc = 1; 3 * kc <= static_cast<int>(n); ++kc) {
            const Grid<2> g(n, kc);
            auto rng = rng_for(n * 77 + kc);
            const auto a = testkit::random_truncated(g, rng);
            const auto b = testkit::random_truncated(g, rng);
            EXPECT_LE(testkit::max_coeff_diff(dealiased_product(a, b), brute_convolution(a, b)),
                      1e-12 * testkit::max_coeff(brute_convolution(a, b)));
            ++cases;
        }
    }
    EXPECT_GE(cases, property_cases);
}

TEST(DealiasedProduct, RandomKcut5) {
    const Grid<1> g(32, 5);
    for (int seed = 0; seed < property_cases; ++seed) {
        auto rng = rng_for(seed);
        const auto a = testkit::random_truncated(g, rng);
        const auto b = testkit::random_truncated(g, rng);
        const auto slow = brute_convolution(a, b);
        EXPECT_LE(testkit::max_coeff_diff(dealiased_product(a, b), slow), 1e-12 * testkit::max_coeff(slow));
        EXPECT_EQ(energy_above_cutoff(dealiased_product(a, b)), 0.0);
    }
}

TEST(SpectralDerivative, SineAndConstant) {
    const auto g = Grid<1>::dealiased(32);
    const auto d = spectral_derivative(to_spectral(sample(g, sin1)));
    const auto p = to_physical(d);
    for (std::size_t m = 0; m < p.size(); ++m) EXPECT_NEAR(p[m], two_pi * std::cos(two_pi * p.x(m)), 1e-13);
    SpectralField<1> c(g);
    c(0) = 3.0;
    EXPECT_EQ(testkit::max_coeff(spectral_derivative(c)), 0.0);
    EXPECT_THROW(spectral_derivative(c, 1), ArgumentError);
}

TEST(SpectralDerivative, SecondDerivativeComposition) {
    for (int seed = 0; seed < property_cases; ++seed) {
        auto rng = rng_for(seed);
        const auto g = Grid<1>::dealiased(64);
        const auto s = testkit::random_truncated(g, rng);
        const auto twice = spectral_derivative(spectral_derivative(s));
        // Independent symbol: -(2 pi k)^2
        SpectralField<1> ref(g);
        for (int k = -g.k_cut(); k <= g.k_cut(); ++k) ref(k) = -(two_pi * k) * (two_pi * k) * s(k);
        EXPECT_LE(testkit::max_coeff_diff(twice, ref), 1e-12 * testkit::max_coeff(ref));
    }
}

TEST(SpectralDerivative, TwoDimensionalAxes) {
    const auto g = Grid<2>::dealiased(16);
    PhysicalField<2> p(g);
    for (std::size_t ix = 0; ix < 16; ++ix)
        for (std::size_t iy = 0; iy < 16; ++iy) p(ix, iy) = std::sin(two_pi * p.x(ix)) * std::cos(2 * two_pi * p.x(iy));
    const auto dx = to_physical(spectral_derivative(to_spectral(p), 0));
    const auto dy = to_physical(spectral_derivative(to_spectral(p), 1));
    for (std::size_t ix = 0; ix < 16; ++ix)
        for (std::size_t iy = 0; iy < 16; ++iy) {
            const double x = p.x(ix), y = p.x(iy);
            EXPECT_NEAR(dx(ix, iy), two_pi * std::cos(two_pi * x) * std::cos(2 * two_pi * y), 1e-12);
            EXPECT_NEAR(dy(ix, iy), -2 * two_pi * std::sin(two_pi * x) * std::sin(2 * two_pi * y), 1e-12);
        }
}

TEST(Energy, Examples) {
    const auto g = Grid<1>::dealiased(64);
    EXPECT_NEAR(energy(to_spectral(sample(g, sin1))), 0.5, 1e-15);
    EXPECT_EQ(energy(SpectralField<1>(g)), 0.0);
}

TEST(SpectralField, NyquistZeroAndHermitianAfterOperations) {
    auto rng = rng_for(3);
    const auto g = Grid<1>::dealiased(32);
    const auto p = testkit::random_physical(g, rng);
    const auto s = to_spectral(p);
    EXPECT_EQ(s.coeffs()[16], Complex{});
    EXPECT_EQ(hermitian_defect(s), 0.0);
    const auto d = spectral_derivative(s);
    EXPECT_EQ(d.coeffs()[16], Complex{});
    EXPECT_LE(hermitian_defect(dealiased_product(s, s)), 1e-15);
    EXPECT_THROW(s(16), ArgumentError);
}
