#pragma once

// Periodized orthonormal wavelet transforms (Shannon, Meyer, Daubechies-12)
// on dyadic grids, hard thresholding, the iterative CVS threshold estimate
// and safety-zone dilation of retained-coefficient masks.
//
// Coefficient layout (Mallat order):
//   1D: [mean | level 0 (1) | level 1 (2) | ... | level J-1 (n/2)],
//       level j occupying indices [2^j, 2^{j+1}).
//   2D: n x n array, x slow; level j (s = 2^j) has three s x s bands:
//       band 0 at x in [0,s),  y in [s,2s)
//       band 1 at x in [s,2s), y in [0,s)
//       band 2 at x in [s,2s), y in [s,2s)
// Coefficients are normalized against the continuous L2 norm on the unit
// torus: mean^2 + sum of squared details = ||u||^2.

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numbers>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "dyngal/errors.hpp"
#include "dyngal/fft.hpp"
#include "dyngal/spectral.hpp"

namespace dyngal {

enum class WaveletKind { Shannon, Meyer, Daubechies12 };

struct WaveletFamily {
    WaveletKind kind = WaveletKind::Shannon;

    /// Shannon and Meyer are defined through Fourier-domain windows.
    bool spectral() const noexcept { return kind != WaveletKind::Daubechies12; }

    std::string_view name() const noexcept {
        switch (kind) {
        case WaveletKind::Shannon: return "shannon";
        case WaveletKind::Meyer: return "meyer";
        case WaveletKind::Daubechies12: return "daubechies12";
        }
        return "unknown";
    }

    static WaveletFamily parse(std::string_view s) {
        if (s == "shannon") return {WaveletKind::Shannon};
        if (s == "meyer") return {WaveletKind::Meyer};
        if (s == "daubechies12" || s == "db12" || s == "daubechies") return {WaveletKind::Daubechies12};
        throw ConfigurationError("unknown wavelet family '" + std::string(s) + "'");
    }

    friend bool operator==(const WaveletFamily&, const WaveletFamily&) = default;
};

namespace wavelet_detail {

// 12-tap extremal-phase Daubechies low-pass filter (6 vanishing moments),
// normalized to sum sqrt(2).
inline constexpr std::array<double, 12> daubechies12_lowpass = {
    0.1115407433501094636213239,   0.4946238903984530856772042,    0.7511339080210953506789345,
    0.3152503517091976290859897,   -0.2262646939654398200763145,   -0.1297668675672619355622896,
    0.09750160558732304910234355,  0.02752286553030572862554084,   -0.03158203931748602956507908,
    0.0005538422011614961392519184, 0.004777257510945510639635975, -0.001077301085308479564852622,
};

inline constexpr std::array<double, 12> daubechies12_highpass = [] {
    std::array<double, 12> g{};
    for (std::size_t t = 0; t < g.size(); ++t)
        g[t] = (t % 2 == 0 ? 1.0 : -1.0) * daubechies12_lowpass[g.size() - 1 - t];
    return g;
}();

// Meyer auxiliary function: nu(t) + nu(1-t) = 1 on [0,1].
inline double meyer_nu(double t) {
    t = std::clamp(t, 0.0, 1.0);
    return t * t * t * t * (35.0 - 84.0 * t + 70.0 * t * t - 20.0 * t * t * t);
}

// Low-pass transfer function H(k) of one cascade step on an m-periodic signal
// (real and even in k, |H(k)|^2 + |H(k+m/2)|^2 = 2).
inline double spectral_lowpass(WaveletKind kind, long k, long m) {
    k = ((k % m) + m) % m;
    if (2 * k >= m) k -= m;
    const long a = std::abs(k);
    if (kind == WaveletKind::Shannon) {
        if (4 * a < m) return std::numbers::sqrt2;
        if (4 * a == m) return 1.0;
        return 0.0;
    }
    // Meyer: sqrt(2) * phi_hat(4 pi k / m)
    if (6 * a <= m) return std::numbers::sqrt2;
    if (3 * a >= m) return 0.0;
    const double t = 6.0 * static_cast<double>(a) / static_cast<double>(m) - 1.0;
    return std::numbers::sqrt2 * std::cos(0.5 * std::numbers::pi * meyer_nu(t));
}

inline Complex spectrum_at(std::span<const Complex> half, std::size_t k, std::size_t m) {
    k %= m;
    return k <= m / 2 ? half[k] : std::conj(half[m - k]);
}

inline void spectral_analysis(WaveletKind kind, std::span<const double> x, std::span<double> approx,
                              std::span<double> detail) {
    const std::size_t m = x.size();
    const std::size_t q = m / 2;
    const long ml = static_cast<long>(m);
    if (m == 2) {
        const double h0 = spectral_lowpass(kind, 0, 2), h1 = spectral_lowpass(kind, 1, 2);
        const double x0 = x[0] + x[1], x1 = x[0] - x[1];
        approx[0] = 0.5 * (h0 * x0 + h1 * x1);
        detail[0] = 0.5 * (h1 * x0 - h0 * x1);
        return;
    }
    std::vector<Complex> xs(m / 2 + 1);
    fft::forward(1, m, x.data(), xs.data());
    std::vector<Complex> a(q / 2 + 1), d(q / 2 + 1);
    for (std::size_t k = 0; k <= q / 2; ++k) {
        const Complex xk = spectrum_at(xs, k, m);
        const Complex xs_ = spectrum_at(xs, k + q, m);
        const double hk = spectral_lowpass(kind, static_cast<long>(k), ml);
        const double hs = spectral_lowpass(kind, static_cast<long>(k + q), ml);
        const Complex phase = std::polar(1.0, 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(m));
        a[k] = 0.5 * (hk * xk + hs * xs_);
        d[k] = 0.5 * phase * (hs * xk - hk * xs_);
    }
    const double inv_q = 1.0 / static_cast<double>(q);
    if (q == 1) {
        approx[0] = a[0].real();
        detail[0] = d[0].real();
        return;
    }
    fft::backward(1, q, a.data(), approx.data());
    fft::backward(1, q, d.data(), detail.data());
    for (std::size_t i = 0; i < q; ++i) {
        approx[i] *= inv_q;
        detail[i] *= inv_q;
    }
}

inline void spectral_synthesis(WaveletKind kind, std::span<const double> approx, std::span<const double> detail,
                               std::span<double> x) {
    const std::size_t m = x.size();
    const std::size_t q = m / 2;
    const long ml = static_cast<long>(m);
    if (m == 2) {
        const double h0 = spectral_lowpass(kind, 0, 2), h1 = spectral_lowpass(kind, 1, 2);
        const double x0 = h0 * approx[0] + h1 * detail[0];
        const double x1 = h1 * approx[0] - h0 * detail[0];
        x[0] = 0.5 * (x0 + x1);
        x[1] = 0.5 * (x0 - x1);
        return;
    }
    std::vector<Complex> a(q / 2 + 1), d(q / 2 + 1);
    if (q == 1) {
        a[0] = approx[0];
        d[0] = detail[0];
    } else {
        fft::forward(1, q, approx.data(), a.data());
        fft::forward(1, q, detail.data(), d.data());
    }
    std::vector<Complex> xs(m / 2 + 1);
    for (std::size_t k = 0; k <= m / 2; ++k) {
        const double hk = spectral_lowpass(kind, static_cast<long>(k), ml);
        const double hs = spectral_lowpass(kind, static_cast<long>(k + q), ml);
        const Complex phase = std::polar(1.0, -2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(m));
        xs[k] = hk * spectrum_at(a, k, q) + phase * hs * spectrum_at(d, k, q);
    }
    fft::backward(1, m, xs.data(), x.data());
    const double inv_m = 1.0 / static_cast<double>(m);
    for (double& v : x) v *= inv_m;
}

inline void filter_analysis(std::span<const double> x, std::span<double> approx, std::span<double> detail) {
    const auto& h = daubechies12_lowpass;
    const auto& g = daubechies12_highpass;
    const std::size_t m = x.size();
    for (std::size_t i = 0; i < m / 2; ++i) {
        double a = 0.0, d = 0.0;
        for (std::size_t t = 0; t < h.size(); ++t) {
            const double v = x[(2 * i + t) % m];
            a += h[t] * v;
            d += g[t] * v;
        }
        approx[i] = a;
        detail[i] = d;
    }
}

inline void filter_synthesis(std::span<const double> approx, std::span<const double> detail, std::span<double> x) {
    const auto& h = daubechies12_lowpass;
    const auto& g = daubechies12_highpass;
    const std::size_t m = x.size();
    std::fill(x.begin(), x.end(), 0.0);
    for (std::size_t i = 0; i < m / 2; ++i)
        for (std::size_t t = 0; t < h.size(); ++t) x[(2 * i + t) % m] += h[t] * approx[i] + g[t] * detail[i];
}

} // namespace wavelet_detail

/// One orthonormal periodic analysis step: x (length m) -> approx, detail (m/2 each).
inline void analysis_step(WaveletFamily f, std::span<const double> x, std::span<double> approx,
                          std::span<double> detail) {
    if (f.spectral())
        wavelet_detail::spectral_analysis(f.kind, x, approx, detail);
    else
        wavelet_detail::filter_analysis(x, approx, detail);
}

/// Exact inverse of `analysis_step`.
inline void synthesis_step(WaveletFamily f, std::span<const double> approx, std::span<const double> detail,
                           std::span<double> x) {
    if (f.spectral())
        wavelet_detail::spectral_synthesis(f.kind, approx, detail, x);
    else
        wavelet_detail::filter_synthesis(approx, detail, x);
}

/// Position of a coefficient in the Mallat layout.
struct CoeffIndex {
    int level = -1;  ///< -1 for the mean
    int band = 0;    ///< 2D orientation band (0..2); always 0 in 1D
    std::size_t px = 0;
    std::size_t py = 0;
};

/// Maps between flat storage offsets and (level, band, position).
template <int Dim>
struct CoeffLayout {
    std::size_t n;

    std::size_t size() const noexcept { return Dim == 1 ? n : n * n; }
    int levels() const noexcept { return std::countr_zero(n); }

    std::size_t flat(int level, std::size_t i) const requires(Dim == 1) { return (std::size_t{1} << level) + i; }

    std::size_t flat(int level, int band, std::size_t px, std::size_t py) const requires(Dim == 2) {
        const std::size_t s = std::size_t{1} << level;
        const std::size_t x = band == 0 ? px : s + px;
        const std::size_t y = band == 1 ? py : s + py;
        return x * n + y;
    }

    CoeffIndex locate(std::size_t flat_index) const {
        if constexpr (Dim == 1) {
            if (flat_index == 0) return {};
            const int j = std::bit_width(flat_index) - 1;
            return {j, 0, flat_index - (std::size_t{1} << j), 0};
        } else {
            const std::size_t x = flat_index / n, y = flat_index % n;
            const std::size_t top = std::max(x, y);
            if (top == 0) return {};
            const int j = std::bit_width(top) - 1;
            const std::size_t s = std::size_t{1} << j;
            const int band = (x >= s && y >= s) ? 2 : (x >= s ? 1 : 0);
            return {j, band, x >= s ? x - s : x, y >= s ? y - s : y};
        }
    }

    friend bool operator==(const CoeffLayout&, const CoeffLayout&) = default;
};

/// Mean value plus per-level detail coefficients of an orthonormal periodic
/// wavelet decomposition.
template <int Dim>
class WaveletCoeffs {
public:
    WaveletCoeffs(std::size_t n, WaveletFamily family) : layout_{n}, family_(family), data_(layout_.size(), 0.0) {}

    const CoeffLayout<Dim>& layout() const noexcept { return layout_; }
    std::size_t n() const noexcept { return layout_.n; }
    int levels() const noexcept { return layout_.levels(); }
    WaveletFamily family() const noexcept { return family_; }

    std::span<double> data() noexcept { return data_; }
    std::span<const double> data() const noexcept { return data_; }

    double& mean() noexcept { return data_[0]; }
    double mean() const noexcept { return data_[0]; }

    std::span<double> level(int j) requires(Dim == 1) {
        return std::span<double>(data_).subspan(std::size_t{1} << j, std::size_t{1} << j);
    }
    std::span<const double> level(int j) const requires(Dim == 1) {
        return std::span<const double>(data_).subspan(std::size_t{1} << j, std::size_t{1} << j);
    }

    double& operator()(int j, std::size_t i) requires(Dim == 1) { return data_[layout_.flat(j, i)]; }
    double operator()(int j, std::size_t i) const requires(Dim == 1) { return data_[layout_.flat(j, i)]; }
    double& operator()(int j, int band, std::size_t px, std::size_t py) requires(Dim == 2) {
        return data_[layout_.flat(j, band, px, py)];
    }
    double operator()(int j, int band, std::size_t px, std::size_t py) const requires(Dim == 2) {
        return data_[layout_.flat(j, band, px, py)];
    }

    /// mean^2 + sum of squared details; equals ||u||^2 by orthonormality.
    double energy() const {
        double e = 0.0;
        for (double v : data_) e += v * v;
        return e;
    }

private:
    CoeffLayout<Dim> layout_;
    WaveletFamily family_;
    std::vector<double> data_;
};

/// Retained-coefficient set, stored in the same layout as WaveletCoeffs.
/// The mean is always retained.
template <int Dim>
class CoeffMask {
public:
    CoeffMask(std::size_t n, bool retained) : layout_{n}, keep_(layout_.size(), retained ? 1 : 0) { keep_[0] = 1; }

    const CoeffLayout<Dim>& layout() const noexcept { return layout_; }
    std::size_t n() const noexcept { return layout_.n; }
    std::size_t size() const noexcept { return keep_.size(); }

    bool operator[](std::size_t flat) const { return keep_[flat] != 0; }
    void set(std::size_t flat, bool v) {
        if (flat != 0) keep_[flat] = v ? 1 : 0;
    }

    bool retained(int j, std::size_t i) const requires(Dim == 1) { return keep_[layout_.flat(j, i)] != 0; }
    bool retained(int j, int band, std::size_t px, std::size_t py) const requires(Dim == 2) {
        return keep_[layout_.flat(j, band, px, py)] != 0;
    }

    std::size_t count() const {
        std::size_t c = 0;
        for (auto v : keep_) c += v;
        return c;
    }
    double fraction() const { return static_cast<double>(count()) / static_cast<double>(keep_.size()); }

    /// True when every retained entry of `other` is retained here.
    bool contains(const CoeffMask& other) const {
        if (!(layout_ == other.layout_)) return false;
        for (std::size_t i = 0; i < keep_.size(); ++i)
            if (other.keep_[i] && !keep_[i]) return false;
        return true;
    }

    friend bool operator==(const CoeffMask&, const CoeffMask&) = default;

private:
    CoeffLayout<Dim> layout_;
    std::vector<std::uint8_t> keep_;
};

namespace wavelet_detail {

// Applies `step` along every length-m line of the leading m x m block of an
// n x n row-major array, along y (axis 1, contiguous) or x (axis 0).
template <class Step>
void for_each_line(std::span<double> a, std::size_t n, std::size_t m, int axis, Step&& step) {
    std::vector<double> line(m), out(m);
    for (std::size_t r = 0; r < m; ++r) {
        for (std::size_t c = 0; c < m; ++c) line[c] = axis == 1 ? a[r * n + c] : a[c * n + r];
        step(std::span<const double>(line), std::span<double>(out));
        for (std::size_t c = 0; c < m; ++c) (axis == 1 ? a[r * n + c] : a[c * n + r]) = out[c];
    }
}

} // namespace wavelet_detail

/// Forward periodic orthonormal wavelet transform of physical samples.
template <int Dim>
WaveletCoeffs<Dim> fwt(const PhysicalField<Dim>& p, WaveletFamily family) {
    const std::size_t n = p.grid().n();
    if (!is_power_of_two(n) || n < 2) throw ConfigurationError("wavelet transform needs a power-of-two grid");
    WaveletCoeffs<Dim> w(n, family);
    auto out = w.data();
    std::vector<double> work(p.values().begin(), p.values().end());
    if constexpr (Dim == 1) {
        std::vector<double> approx(n / 2);
        for (std::size_t m = n; m >= 2; m /= 2) {
            analysis_step(family, std::span<const double>(work).first(m), std::span<double>(approx).first(m / 2),
                          out.subspan(m / 2, m / 2));
            std::copy_n(approx.begin(), m / 2, work.begin());
        }
        out[0] = work[0];
    } else {
        auto step = [&](std::span<const double> line, std::span<double> res) {
            const std::size_t h = line.size() / 2;
            analysis_step(family, line, res.first(h), res.subspan(h, h));
        };
        for (std::size_t m = n; m >= 2; m /= 2) {
            wavelet_detail::for_each_line(std::span<double>(work), n, m, 1, step);
            wavelet_detail::for_each_line(std::span<double>(work), n, m, 0, step);
        }
        std::copy(work.begin(), work.end(), out.begin());
    }
    const double scale = 1.0 / (Dim == 1 ? std::sqrt(static_cast<double>(n)) : static_cast<double>(n));
    for (double& v : out) v *= scale;
    return w;
}

/// Inverse of `fwt`.
template <int Dim>
PhysicalField<Dim> iwt(const WaveletCoeffs<Dim>& w, const Grid<Dim>& grid) {
    const std::size_t n = w.n();
    if (grid.n() != n) throw IntegrityError("wavelet coefficient layout does not match the grid");
    const double scale = Dim == 1 ? std::sqrt(static_cast<double>(n)) : static_cast<double>(n);
    std::vector<double> coeffs(w.data().begin(), w.data().end());
    for (double& v : coeffs) v *= scale;
    const WaveletFamily family = w.family();
    if constexpr (Dim == 1) {
        std::vector<double> work(n), next(n);
        work[0] = coeffs[0];
        for (std::size_t m = 2; m <= n; m *= 2) {
            synthesis_step(family, std::span<const double>(work).first(m / 2),
                           std::span<const double>(coeffs).subspan(m / 2, m / 2), std::span<double>(next).first(m));
            std::copy_n(next.begin(), m, work.begin());
        }
        return PhysicalField<Dim>(grid, std::move(work));
    } else {
        auto step = [&](std::span<const double> line, std::span<double> res) {
            const std::size_t h = line.size() / 2;
            synthesis_step(family, line.first(h), line.subspan(h, h), res);
        };
        for (std::size_t m = 2; m <= n; m *= 2) {
            wavelet_detail::for_each_line(std::span<double>(coeffs), n, m, 0, step);
            wavelet_detail::for_each_line(std::span<double>(coeffs), n, m, 1, step);
        }
        return PhysicalField<Dim>(grid, std::move(coeffs));
    }
}

template <int Dim>
PhysicalField<Dim> iwt(const WaveletCoeffs<Dim>& w) {
    return iwt(w, Grid<Dim>::dealiased(w.n()));
}

/// Zeroes every coefficient outside the mask (the mean is always kept).
template <int Dim>
WaveletCoeffs<Dim> apply_mask(WaveletCoeffs<Dim> w, const CoeffMask<Dim>& mask) {
    if (!(w.layout() == mask.layout())) throw IntegrityError("mask layout does not match the coefficients");
    auto d = w.data();
    for (std::size_t i = 1; i < d.size(); ++i)
        if (!mask[i]) d[i] = 0.0;
    return w;
}

/// Hard thresholding: details with |c| <= eps are removed.
template <int Dim>
std::pair<WaveletCoeffs<Dim>, CoeffMask<Dim>> hard_threshold(WaveletCoeffs<Dim> w, double eps) {
    if (!(eps >= 0.0)) throw ArgumentError("threshold must be non-negative");
    CoeffMask<Dim> mask(w.n(), false);
    auto d = w.data();
    for (std::size_t i = 1; i < d.size(); ++i) {
        if (std::abs(d[i]) > eps)
            mask.set(i, true);
        else
            d[i] = 0.0;
    }
    return {std::move(w), std::move(mask)};
}

/// How sigma[.] of the sub-threshold set is measured.
enum class SigmaConvention { MeanCentered, RootMeanSquare };

/// Starting value of the threshold iteration.
enum class InitialThreshold {
    NormRoot,     ///< q * sqrt(||u|| / 2 / N)
    EnergyRatio,  ///< q * sqrt(||u||^2 / (2 N))
};

struct ThresholdOptions {
    SigmaConvention sigma = SigmaConvention::MeanCentered;
    InitialThreshold initial = InitialThreshold::NormRoot;
    double rel_tol = 1e-12;
    int max_iterations = 100;
};

/// Initial threshold eps_0 for compression parameter q.
template <int Dim>
double initial_threshold(const WaveletCoeffs<Dim>& w, double q, const ThresholdOptions& opts = {}) {
    const double total = static_cast<double>(w.data().size());
    const double e = w.energy();
    if (opts.initial == InitialThreshold::NormRoot) return q * std::sqrt(std::sqrt(e) / 2.0 / total);
    return q * std::sqrt(e / (2.0 * total));
}

/// Fixed-point iteration eps <- q * sigma[details with |c| <= eps], started at eps0.
template <int Dim>
double iterate_threshold(const WaveletCoeffs<Dim>& w, double q, double eps0, const ThresholdOptions& opts = {}) {
    if (!(q > 0.0)) throw ArgumentError("compression parameter q must be positive");
    const auto d = w.data();
    double eps = eps0;
    for (int it = 0; it < opts.max_iterations; ++it) {
        double sum = 0.0, sum_sq = 0.0;
        std::size_t count = 0;
        for (std::size_t i = 1; i < d.size(); ++i) {
            if (std::abs(d[i]) <= eps) {
                sum += d[i];
                sum_sq += d[i] * d[i];
                ++count;
            }
        }
        if (count == 0) return eps;
        const double cnt = static_cast<double>(count);
        double var = sum_sq / cnt;
        if (opts.sigma == SigmaConvention::MeanCentered) var = std::max(0.0, var - (sum / cnt) * (sum / cnt));
        const double next = q * std::sqrt(var);
        if (std::abs(next - eps) <= opts.rel_tol * std::max(std::abs(next), std::abs(eps))) return next;
        eps = next;
    }
    return eps;
}

/// Threshold estimated iteratively from eps_0 = initial_threshold(w, q).
template <int Dim>
double iterative_threshold(const WaveletCoeffs<Dim>& w, double q, const ThresholdOptions& opts = {}) {
    if (!(q > 0.0)) throw ArgumentError("compression parameter q must be positive");
    if (w.data().empty()) throw ArgumentError("empty coefficient set");
    return iterate_threshold(w, q, initial_threshold(w, q, opts), opts);
}

/// Adds the neighbours in position and scale of every retained detail:
/// 1D: (j, i+-1) periodic, parent (j-1, i/2), children (j+1, 2i), (j+1, 2i+1).
/// 2D: per orientation band, the 4 position neighbours, the parent and the 4 children.
template <int Dim>
CoeffMask<Dim> safety_zone(const CoeffMask<Dim>& mask) {
    CoeffMask<Dim> out = mask;
    const auto& lay = mask.layout();
    const int levels = lay.levels();
    for (std::size_t f = 1; f < mask.size(); ++f) {
        if (!mask[f]) continue;
        const CoeffIndex c = lay.locate(f);
        const std::size_t s = std::size_t{1} << c.level;
        if constexpr (Dim == 1) {
            out.set(lay.flat(c.level, (c.px + 1) % s), true);
            out.set(lay.flat(c.level, (c.px + s - 1) % s), true);
            if (c.level > 0) out.set(lay.flat(c.level - 1, c.px / 2), true);
            if (c.level + 1 < levels) {
                out.set(lay.flat(c.level + 1, 2 * c.px), true);
                out.set(lay.flat(c.level + 1, 2 * c.px + 1), true);
            }
        } else {
            const int j = c.level, b = c.band;
            out.set(lay.flat(j, b, (c.px + 1) % s, c.py), true);
            out.set(lay.flat(j, b, (c.px + s - 1) % s, c.py), true);
            out.set(lay.flat(j, b, c.px, (c.py + 1) % s), true);
            out.set(lay.flat(j, b, c.px, (c.py + s - 1) % s), true);
            if (j > 0) out.set(lay.flat(j - 1, b, c.px / 2, c.py / 2), true);
            if (j + 1 < levels)
                for (std::size_t a = 0; a < 2; ++a)
                    for (std::size_t e = 0; e < 2; ++e) out.set(lay.flat(j + 1, b, 2 * c.px + a, 2 * c.py + e), true);
        }
    }
    return out;
}

} // namespace dyngal
