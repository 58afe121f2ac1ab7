#pragma once

// Thin FFTW wrapper: cached real<->half-complex plans, executed on caller arrays.

#include <complex>
#include <cstddef>
#include <map>
#include <memory>
#include <mutex>
#include <tuple>

#include <fftw3.h>

namespace dyngal::fft {

namespace detail {

struct PlanDeleter {
    void operator()(fftw_plan p) const { fftw_destroy_plan(p); }
};
using PlanHandle = std::unique_ptr<std::remove_pointer_t<fftw_plan>, PlanDeleter>;

enum class Kind { R2C, C2R };

inline std::size_t real_size(int rank, std::size_t n) { return rank == 1 ? n : n * n; }
inline std::size_t half_size(int rank, std::size_t n) { return rank == 1 ? n / 2 + 1 : n * (n / 2 + 1); }

// The FFTW planner is not re-entrant; execution with new arrays is.
inline fftw_plan cached_plan(Kind kind, int rank, std::size_t n) {
    static std::mutex mutex;
    static std::map<std::tuple<Kind, int, std::size_t>, PlanHandle> plans;

    std::lock_guard lock(mutex);
    auto key = std::make_tuple(kind, rank, n);
    if (auto it = plans.find(key); it != plans.end()) return it->second.get();

    double* r = fftw_alloc_real(real_size(rank, n));
    fftw_complex* c = fftw_alloc_complex(half_size(rank, n));
    const int ni = static_cast<int>(n);
    const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
    fftw_plan p = nullptr;
    if (kind == Kind::R2C)
        p = rank == 1 ? fftw_plan_dft_r2c_1d(ni, r, c, flags) : fftw_plan_dft_r2c_2d(ni, ni, r, c, flags);
    else
        p = rank == 1 ? fftw_plan_dft_c2r_1d(ni, c, r, flags) : fftw_plan_dft_c2r_2d(ni, ni, c, r, flags);
    fftw_free(r);
    fftw_free(c);
    return plans.emplace(key, PlanHandle(p)).first->second.get();
}

} // namespace detail

/// Number of complex outputs of a real transform of n^rank points.
inline std::size_t half_spectrum_size(int rank, std::size_t n) { return detail::half_size(rank, n); }

/// Unnormalized forward transform X_k = sum_m x_m exp(-2 pi i k m / n) (row-major in 2D),
/// returning the non-redundant half spectrum (last axis 0..n/2).
inline void forward(int rank, std::size_t n, const double* in, std::complex<double>* out) {
    fftw_execute_dft_r2c(detail::cached_plan(detail::Kind::R2C, rank, n), const_cast<double*>(in),
                         reinterpret_cast<fftw_complex*>(out));
}

/// Unnormalized inverse of `forward`. The input half spectrum is overwritten.
inline void backward(int rank, std::size_t n, std::complex<double>* in, double* out) {
    fftw_execute_dft_c2r(detail::cached_plan(detail::Kind::C2R, rank, n),
                         reinterpret_cast<fftw_complex*>(in), out);
}

} // namespace dyngal::fft
