#pragma once

#include <bit>
#include <cstddef>
#include <string>

#include "dyngal/errors.hpp"

namespace dyngal {

inline bool is_power_of_two(std::size_t v) { return v != 0 && std::has_single_bit(v); }

/// Wavenumber carried by FFT-ordered index `idx` on an `n`-point axis,
/// in the range [-n/2, n/2).
constexpr int wavenumber(std::size_t idx, std::size_t n) {
    return idx < n / 2 ? static_cast<int>(idx) : static_cast<int>(idx) - static_cast<int>(n);
}

/// FFT-ordered index of wavenumber `k` (|k| <= n/2) on an `n`-point axis.
constexpr std::size_t index_of(int k, std::size_t n) {
    return k >= 0 ? static_cast<std::size_t>(k) : static_cast<std::size_t>(static_cast<int>(n) + k);
}

/// Uniform collocation grid on the unit torus [0,1)^Dim with `n` points per direction.
///
/// Fourier modes with |k| > k_cut (per direction) are kept at zero; quadratic
/// products are evaluated on a padded grid of `padded_n()` points so that the
/// pseudo-spectral product equals the Galerkin convolution.
template <int Dim>
class Grid {
    static_assert(Dim == 1 || Dim == 2, "only 1D and 2D grids are supported");

public:
    static constexpr int dim = Dim;

    Grid(std::size_t n, int k_cut) : n_(n), k_cut_(k_cut) {
        if (!is_power_of_two(n) || n < 8)
            throw ConfigurationError("grid size must be a power of two >= 8, got " + std::to_string(n));
        if (k_cut < 0 || 2 * static_cast<std::size_t>(k_cut) >= n)
            throw ConfigurationError("k_cut must satisfy 0 <= k_cut < n/2, got " + std::to_string(k_cut));
    }

    /// Grid with the 2/3-rule cutoff k_cut = floor(n/3): products need no padding.
    static Grid dealiased(std::size_t n) {
        if (!is_power_of_two(n) || n < 8)
            throw ConfigurationError("grid size must be a power of two >= 8, got " + std::to_string(n));
        return Grid(n, static_cast<int>(n / 3));
    }

    std::size_t n() const noexcept { return n_; }
    int k_cut() const noexcept { return k_cut_; }
    double dx() const noexcept { return 1.0 / static_cast<double>(n_); }
    int levels() const noexcept { return std::countr_zero(n_); }

    std::size_t size() const noexcept { return Dim == 1 ? n_ : n_ * n_; }

    /// Smallest power of two M >= n with M > 3*k_cut.
    std::size_t padded_n() const noexcept {
        std::size_t m = std::bit_ceil(static_cast<std::size_t>(3 * k_cut_ + 1));
        return m < n_ ? n_ : m;
    }

    friend bool operator==(const Grid&, const Grid&) = default;

private:
    std::size_t n_;
    int k_cut_;
};

} // namespace dyngal
