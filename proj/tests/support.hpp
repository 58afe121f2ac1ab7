#pragma once

// Shared helpers for the test suites: seeded random fields and brute-force
// reference computations independent of the FFT-based library code.

#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <random>
#include <vector>

#include "dyngal/spectral.hpp"

namespace dyngal::testkit {

inline constexpr int property_cases = 100;

inline std::mt19937_64 rng_for(std::uint64_t seed) { return std::mt19937_64(0x5eed0000ull + seed); }

template <int Dim>
PhysicalField<Dim> random_physical(const Grid<Dim>& g, std::mt19937_64& rng) {
    std::normal_distribution<double> N(0.0, 1.0);
    PhysicalField<Dim> p(g);
    for (auto& v : p.values()) v = N(rng);
    return p;
}

/// Random Hermitian spectrum supported on |k| <= k_max (per direction).
template <int Dim>
SpectralField<Dim> random_spectral(const Grid<Dim>& g, std::mt19937_64& rng, int k_max) {
    std::normal_distribution<double> N(0.0, 1.0);
    SpectralField<Dim> s(g);
    if constexpr (Dim == 1) {
        s(0) = N(rng);
        for (int k = 1; k <= k_max; ++k) s.set_mode(k, {N(rng), N(rng)});
    } else {
        for (int kx = -k_max; kx <= k_max; ++kx)
            for (int ky = 0; ky <= k_max; ++ky) {
                if (ky == 0 && kx < 0) continue;
                s.set_mode(kx, ky, {N(rng), N(rng)});
            }
    }
    return s;
}

template <int Dim>
SpectralField<Dim> random_truncated(const Grid<Dim>& g, std::mt19937_64& rng) {
    return random_spectral(g, rng, g.k_cut());
}

/// Direct O(n^2) DFT with 1/n normalization.
inline std::vector<std::complex<double>> direct_dft(const std::vector<double>& u) {
    const std::size_t n = u.size();
    std::vector<std::complex<double>> c(n);
    for (std::size_t k = 0; k < n; ++k) {
        std::complex<double> acc{};
        for (std::size_t m = 0; m < n; ++m)
            acc += u[m] * std::polar(1.0, -2.0 * std::numbers::pi * static_cast<double>(k * m % n) / static_cast<double>(n));
        c[k] = acc / static_cast<double>(n);
    }
    return c;
}

inline double max_abs_diff(const std::vector<double>& a, std::span<const double> b) {
    double d = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
    return d;
}

template <int Dim>
double max_coeff_diff(const SpectralField<Dim>& a, const SpectralField<Dim>& b) {
    double d = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a.coeffs()[i] - b.coeffs()[i]));
    return d;
}

template <int Dim>
double max_coeff(const SpectralField<Dim>& a) {
    double d = 0.0;
    for (const auto& c : a.coeffs()) d = std::max(d, std::abs(c));
    return d;
}

} // namespace dyngal::testkit
