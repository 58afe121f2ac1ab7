#pragma once

// Fourier representation of real periodic fields on the unit torus, with
// Galerkin truncation, dealiased products and spectral differentiation.
//
// Coefficients follow u_k = (1/n^d) sum_m u(x_m) exp(-2 pi i k.x_m), so that
// sum_k |u_k|^2 equals the continuous L2 norm squared on [0,1)^d.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "dyngal/errors.hpp"
#include "dyngal/fft.hpp"
#include "dyngal/grid.hpp"

namespace dyngal {

using Complex = std::complex<double>;

/// Samples of a real field at the collocation points x_m = m/n (row-major in 2D,
/// x being the slow index).
template <int Dim>
class PhysicalField {
public:
    explicit PhysicalField(Grid<Dim> grid) : grid_(grid), values_(grid.size(), 0.0) {}
    PhysicalField(Grid<Dim> grid, std::vector<double> values) : grid_(grid), values_(std::move(values)) {
        if (values_.size() != grid_.size())
            throw IntegrityError("physical field has " + std::to_string(values_.size()) + " samples, grid needs " +
                                 std::to_string(grid_.size()));
    }

    const Grid<Dim>& grid() const noexcept { return grid_; }
    std::span<double> values() noexcept { return values_; }
    std::span<const double> values() const noexcept { return values_; }
    std::size_t size() const noexcept { return values_.size(); }

    double& operator[](std::size_t i) { return values_[i]; }
    double operator[](std::size_t i) const { return values_[i]; }

    double& operator()(std::size_t ix, std::size_t iy) requires(Dim == 2) { return values_[ix * grid_.n() + iy]; }
    double operator()(std::size_t ix, std::size_t iy) const requires(Dim == 2) { return values_[ix * grid_.n() + iy]; }

    double x(std::size_t m) const noexcept { return static_cast<double>(m) * grid_.dx(); }

private:
    Grid<Dim> grid_;
    std::vector<double> values_;
};

/// Continuous L2 norm squared, i.e. the mean of squares over the collocation grid.
template <int Dim>
double mean_square(const PhysicalField<Dim>& p) {
    double s = 0.0;
    for (double v : p.values()) s += v * v;
    return s / static_cast<double>(p.size());
}

/// Fourier coefficients of a real periodic field, stored in full FFT order
/// (index k >= 0 at k, k < 0 at n + k; row-major with kx slow in 2D).
/// The Nyquist line k = -n/2 is kept at zero.
template <int Dim>
class SpectralField {
public:
    explicit SpectralField(Grid<Dim> grid) : grid_(grid), coeffs_(grid.size(), Complex{}) {}

    const Grid<Dim>& grid() const noexcept { return grid_; }
    std::span<Complex> coeffs() noexcept { return coeffs_; }
    std::span<const Complex> coeffs() const noexcept { return coeffs_; }
    std::size_t size() const noexcept { return coeffs_.size(); }

    Complex& operator()(int k) requires(Dim == 1) { return coeffs_[checked_index(k)]; }
    Complex operator()(int k) const requires(Dim == 1) { return coeffs_[checked_index(k)]; }
    Complex& operator()(int kx, int ky) requires(Dim == 2) {
        return coeffs_[checked_index(kx) * grid_.n() + checked_index(ky)];
    }
    Complex operator()(int kx, int ky) const requires(Dim == 2) {
        return coeffs_[checked_index(kx) * grid_.n() + checked_index(ky)];
    }

    /// Sets the coefficient of `k` and its conjugate partner.
    void set_mode(int k, Complex c) requires(Dim == 1) {
        (*this)(k) = c;
        (*this)(-k) = std::conj(c);
        if (k == 0) (*this)(0) = c.real();
    }
    void set_mode(int kx, int ky, Complex c) requires(Dim == 2) {
        (*this)(kx, ky) = c;
        (*this)(-kx, -ky) = std::conj(c);
        if (kx == 0 && ky == 0) (*this)(0, 0) = c.real();
    }

    SpectralField& operator+=(const SpectralField& o) {
        check_same(o);
        for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] += o.coeffs_[i];
        return *this;
    }
    SpectralField& operator-=(const SpectralField& o) {
        check_same(o);
        for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] -= o.coeffs_[i];
        return *this;
    }
    SpectralField& operator*=(double a) {
        for (auto& c : coeffs_) c *= a;
        return *this;
    }
    /// this += a * x
    SpectralField& axpy(double a, const SpectralField& x) {
        check_same(x);
        for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] += a * x.coeffs_[i];
        return *this;
    }

    friend SpectralField operator+(SpectralField a, const SpectralField& b) { return a += b; }
    friend SpectralField operator-(SpectralField a, const SpectralField& b) { return a -= b; }
    friend SpectralField operator*(double s, SpectralField a) { return a *= s; }
    friend SpectralField operator*(SpectralField a, double s) { return a *= s; }

    bool all_finite() const {
        return std::all_of(coeffs_.begin(), coeffs_.end(),
                           [](const Complex& c) { return std::isfinite(c.real()) && std::isfinite(c.imag()); });
    }

private:
    std::size_t checked_index(int k) const {
        const int half = static_cast<int>(grid_.n() / 2);
        if (k < -half || k >= half)
            throw ArgumentError("wavenumber " + std::to_string(k) + " outside [-n/2, n/2)");
        return index_of(k, grid_.n());
    }
    void check_same(const SpectralField& o) const {
        if (!(grid_ == o.grid_)) throw ConfigurationError("spectral fields live on different grids");
    }

    Grid<Dim> grid_;
    std::vector<Complex> coeffs_;
};

namespace detail {

// Index of the conjugate partner of FFT-ordered index i.
inline std::size_t mirror_index(std::size_t i, std::size_t n) { return (n - i) % n; }

template <int Dim>
std::size_t mirror(std::size_t flat, std::size_t n) {
    if constexpr (Dim == 1) {
        return mirror_index(flat, n);
    } else {
        return mirror_index(flat / n, n) * n + mirror_index(flat % n, n);
    }
}

template <int Dim>
bool on_nyquist(std::size_t flat, std::size_t n) {
    if constexpr (Dim == 1) {
        return flat == n / 2;
    } else {
        return flat / n == n / 2 || flat % n == n / 2;
    }
}

template <int Dim>
int max_abs_wavenumber(std::size_t flat, std::size_t n) {
    if constexpr (Dim == 1) {
        return std::abs(wavenumber(flat, n));
    } else {
        return std::max(std::abs(wavenumber(flat / n, n)), std::abs(wavenumber(flat % n, n)));
    }
}

// Projects onto Hermitian-symmetric coefficients and clears the Nyquist line.
template <int Dim>
void hermitian_clean(std::span<Complex> c, std::size_t n) {
    for (std::size_t i = 0; i < c.size(); ++i) {
        const std::size_t j = mirror<Dim>(i, n);
        if (j < i) continue;
        if (on_nyquist<Dim>(i, n)) {
            c[i] = c[j] = Complex{};
        } else if (i == j) {
            c[i] = c[i].real();
        } else {
            const Complex avg = 0.5 * (c[i] + std::conj(c[j]));
            c[i] = avg;
            c[j] = std::conj(avg);
        }
    }
}

// Half spectrum (last axis 0..m/2) on an m-point grid built from the modes
// |k| <= k_keep of a field stored on its own n-point grid.
template <int Dim>
std::vector<Complex> half_spectrum_on(const SpectralField<Dim>& s, std::size_t m, int k_keep) {
    const std::size_t n = s.grid().n();
    const std::size_t h = m / 2 + 1;
    const auto c = s.coeffs();
    std::vector<Complex> half(fft::half_spectrum_size(Dim, m), Complex{});
    k_keep = std::min<int>(k_keep, static_cast<int>(n / 2) - 1);
    if constexpr (Dim == 1) {
        for (int k = 0; k <= k_keep; ++k) half[static_cast<std::size_t>(k)] = c[index_of(k, n)];
    } else {
        for (int kx = -k_keep; kx <= k_keep; ++kx) {
            const std::size_t src_row = index_of(kx, n) * n;
            const std::size_t dst_row = index_of(kx, m) * h;
            for (int ky = 0; ky <= k_keep; ++ky)
                half[dst_row + static_cast<std::size_t>(ky)] = c[src_row + static_cast<std::size_t>(ky)];
        }
    }
    return half;
}

// Samples on an m-point grid of the modes |k| <= k_keep of `s`.
template <int Dim>
std::vector<double> samples_on(const SpectralField<Dim>& s, std::size_t m, int k_keep) {
    auto half = half_spectrum_on(s, m, k_keep);
    std::vector<double> out(Dim == 1 ? m : m * m);
    fft::backward(Dim, m, half.data(), out.data());
    return out;
}

// Fourier coefficients |k| <= k_keep of samples on an m-point grid, written
// into a field on `grid` (all other modes zero).
template <int Dim>
SpectralField<Dim> coefficients_from(std::span<const double> values, std::size_t m, const Grid<Dim>& grid,
                                     int k_keep) {
    std::vector<Complex> half(fft::half_spectrum_size(Dim, m));
    fft::forward(Dim, m, values.data(), half.data());
    const std::size_t n = grid.n();
    const std::size_t h = m / 2 + 1;
    const double scale = 1.0 / static_cast<double>(Dim == 1 ? m : m * m);
    k_keep = std::min<int>({k_keep, static_cast<int>(n / 2) - 1, static_cast<int>(m / 2) - 1});
    SpectralField<Dim> out(grid);
    auto c = out.coeffs();
    if constexpr (Dim == 1) {
        for (int k = 0; k <= k_keep; ++k) {
            const Complex v = half[static_cast<std::size_t>(k)] * scale;
            c[index_of(k, n)] = v;
            c[index_of(-k, n)] = std::conj(v);
        }
    } else {
        for (int kx = -k_keep; kx <= k_keep; ++kx) {
            for (int ky = 0; ky <= k_keep; ++ky) {
                const Complex v = half[index_of(kx, m) * h + static_cast<std::size_t>(ky)] * scale;
                c[index_of(kx, n) * n + index_of(ky, n)] = v;
                c[index_of(-kx, n) * n + index_of(-ky, n)] = std::conj(v);
            }
        }
    }
    hermitian_clean<Dim>(c, n);
    return out;
}

} // namespace detail

/// Largest deviation |u_k - conj(u_{-k})| over all stored modes.
template <int Dim>
double hermitian_defect(const SpectralField<Dim>& s) {
    const std::size_t n = s.grid().n();
    const auto c = s.coeffs();
    double defect = 0.0;
    for (std::size_t i = 0; i < c.size(); ++i)
        defect = std::max(defect, std::abs(c[i] - std::conj(c[detail::mirror<Dim>(i, n)])));
    return defect;
}

/// Forward transform: samples -> Fourier coefficients (1/n^d normalization).
template <int Dim>
SpectralField<Dim> to_spectral(const PhysicalField<Dim>& p) {
    const auto& g = p.grid();
    const int keep = static_cast<int>(g.n() / 2) - 1;
    return detail::coefficients_from<Dim>(p.values(), g.n(), g, keep);
}

/// Inverse transform. Throws IntegrityError when the coefficients are not the
/// spectrum of a real field.
template <int Dim>
PhysicalField<Dim> to_physical(const SpectralField<Dim>& s) {
    double scale = 0.0;
    for (const auto& c : s.coeffs()) scale = std::max(scale, std::abs(c));
    if (hermitian_defect(s) > 1e-12 * scale)
        throw IntegrityError("spectral field is not Hermitian symmetric");
    const std::size_t n = s.grid().n();
    return PhysicalField<Dim>(s.grid(), detail::samples_on(s, n, static_cast<int>(n / 2) - 1));
}

/// Zeroes every mode with |k| > k_max in some direction.
template <int Dim>
SpectralField<Dim> fourier_project(SpectralField<Dim> s, int k_max) {
    const std::size_t n = s.grid().n();
    if (k_max < 0 || static_cast<std::size_t>(k_max) > n / 2)
        throw ArgumentError("fourier_project needs 0 <= k_max <= n/2");
    auto c = s.coeffs();
    for (std::size_t i = 0; i < c.size(); ++i)
        if (detail::max_abs_wavenumber<Dim>(i, n) > k_max) c[i] = Complex{};
    return s;
}

/// Galerkin truncation to the grid's dealiasing cutoff.
template <int Dim>
SpectralField<Dim> truncate(SpectralField<Dim> s) {
    const int k_cut = s.grid().k_cut();
    return fourier_project(std::move(s), k_cut);
}

/// Sum of |u_k|^2 over the modes beyond the dealiasing cutoff.
template <int Dim>
double energy_above_cutoff(const SpectralField<Dim>& s) {
    const std::size_t n = s.grid().n();
    const int k_cut = s.grid().k_cut();
    const auto c = s.coeffs();
    double e = 0.0;
    for (std::size_t i = 0; i < c.size(); ++i)
        if (detail::max_abs_wavenumber<Dim>(i, n) > k_cut) e += std::norm(c[i]);
    return e;
}

/// Samples of the truncated field on the padded product grid.
template <int Dim>
std::vector<double> padded_samples(const SpectralField<Dim>& s) {
    return detail::samples_on(s, s.grid().padded_n(), s.grid().k_cut());
}

/// Truncated Fourier coefficients of samples given on the padded product grid.
template <int Dim>
SpectralField<Dim> from_padded_samples(std::span<const double> values, const Grid<Dim>& grid) {
    return detail::coefficients_from<Dim>(values, grid.padded_n(), grid, grid.k_cut());
}

/// Galerkin product P(a b) of two truncated fields, evaluated pseudo-spectrally
/// on a grid of more than 3*k_cut points so that no aliasing survives the truncation.
template <int Dim>
SpectralField<Dim> dealiased_product(const SpectralField<Dim>& a, const SpectralField<Dim>& b) {
    if (!(a.grid() == b.grid())) throw ConfigurationError("dealiased_product: fields live on different grids");
    std::vector<double> pa = padded_samples(a);
    if (&a == &b) {
        for (double& v : pa) v *= v;
    } else {
        const std::vector<double> pb = padded_samples(b);
        for (std::size_t i = 0; i < pa.size(); ++i) pa[i] *= pb[i];
    }
    return from_padded_samples<Dim>(pa, a.grid());
}

/// Multiplies each coefficient by 2 pi i k_axis (axis 0 = x, 1 = y).
template <int Dim>
SpectralField<Dim> spectral_derivative(SpectralField<Dim> s, int axis = 0) {
    if (axis < 0 || axis >= Dim) throw ArgumentError("derivative axis out of range");
    const std::size_t n = s.grid().n();
    auto c = s.coeffs();
    for (std::size_t i = 0; i < c.size(); ++i) {
        const std::size_t along = Dim == 1 ? i : (axis == 0 ? i / n : i % n);
        const int k = wavenumber(along, n);
        c[i] *= Complex(0.0, 2.0 * std::numbers::pi * k);
        if (along == n / 2) c[i] = Complex{};
    }
    return s;
}

/// ||u||^2 = sum_k |u_k|^2, equal to the integral of u^2 over the unit torus.
template <int Dim>
double energy(const SpectralField<Dim>& s) {
    double e = 0.0;
    for (const auto& c : s.coeffs()) e += std::norm(c);
    return e;
}

/// Real L2 inner product (a, b) of two real fields.
template <int Dim>
double inner(const SpectralField<Dim>& a, const SpectralField<Dim>& b) {
    if (!(a.grid() == b.grid())) throw ConfigurationError("inner: fields live on different grids");
    double s = 0.0;
    const auto ca = a.coeffs();
    const auto cb = b.coeffs();
    for (std::size_t i = 0; i < ca.size(); ++i) s += ca[i].real() * cb[i].real() + ca[i].imag() * cb[i].imag();
    return s;
}

} // namespace dyngal
