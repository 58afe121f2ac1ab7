#pragma once

// Dealiased Galerkin right-hand sides: 1D Burgers and 2D incompressible
// Euler in vorticity form, plus their quadratic invariants and initial data.

#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <map>
#include <numbers>
#include <random>
#include <vector>

#include "dyngal/errors.hpp"
#include "dyngal/spectral.hpp"

namespace dyngal {

struct BurgersParams {
    double nu = 0.0;
};

/// -1/2 d/dx P(u^2) + nu u_xx
inline SpectralField<1> burgers_rhs(const SpectralField<1>& u, const BurgersParams& params = {}) {
    if (params.nu < 0.0) throw ArgumentError("viscosity must be non-negative");
    auto rhs = spectral_derivative(dealiased_product(u, u));
    rhs *= -0.5;
    if (params.nu > 0.0) rhs.axpy(params.nu, spectral_derivative(spectral_derivative(u)));
    return rhs;
}

namespace equations_detail {

inline double laplacian_symbol(int kx, int ky) {
    const double two_pi = 2.0 * std::numbers::pi;
    return -two_pi * two_pi * static_cast<double>(kx * kx + ky * ky);
}

} // namespace equations_detail

/// Stream function psi = Laplacian^{-1} omega (zero mean). Throws IntegrityError
/// when omega has a non-zero mean.
inline SpectralField<2> streamfunction(const SpectralField<2>& omega) {
    const std::size_t n = omega.grid().n();
    double scale = 0.0;
    for (const auto& c : omega.coeffs()) scale = std::max(scale, std::abs(c));
    if (std::abs(omega.coeffs()[0]) > 1e-12 * scale)
        throw IntegrityError("vorticity has a non-zero mean; the Laplacian is not invertible");
    SpectralField<2> psi(omega.grid());
    auto out = psi.coeffs();
    const auto in = omega.coeffs();
    for (std::size_t i = 1; i < in.size(); ++i)
        out[i] = in[i] / equations_detail::laplacian_symbol(wavenumber(i / n, n), wavenumber(i % n, n));
    return psi;
}

/// Velocity (u, v) = (-d_y psi, d_x psi) from vorticity.
inline std::array<SpectralField<2>, 2> velocity(const SpectralField<2>& omega) {
    const auto psi = streamfunction(omega);
    auto u = spectral_derivative(psi, 1);
    u *= -1.0;
    return {std::move(u), spectral_derivative(psi, 0)};
}

/// -P(u . grad omega) with the product evaluated on the dealiasing grid.
inline SpectralField<2> euler2d_rhs(const SpectralField<2>& omega) {
    const auto [u, v] = velocity(omega);
    const auto u_p = padded_samples(u);
    const auto v_p = padded_samples(v);
    const auto wx_p = padded_samples(spectral_derivative(omega, 0));
    const auto wy_p = padded_samples(spectral_derivative(omega, 1));
    std::vector<double> adv(u_p.size());
    for (std::size_t i = 0; i < adv.size(); ++i) adv[i] = -(u_p[i] * wx_p[i] + v_p[i] * wy_p[i]);
    return from_padded_samples<2>(adv, omega.grid());
}

/// Kinetic energy ||u||^2 = sum |omega_k|^2 / |2 pi k|^2.
inline double kinetic_energy(const SpectralField<2>& omega) {
    const std::size_t n = omega.grid().n();
    const auto c = omega.coeffs();
    double e = 0.0;
    for (std::size_t i = 1; i < c.size(); ++i)
        e += std::norm(c[i]) / -equations_detail::laplacian_symbol(wavenumber(i / n, n), wavenumber(i % n, n));
    return e;
}

/// Enstrophy Z = 1/2 ||omega||^2.
inline double enstrophy(const SpectralField<2>& omega) { return 0.5 * energy(omega); }

/// u(x, 0) = sin(2 pi x).
inline SpectralField<1> sine_initial(const Grid<1>& grid) {
    SpectralField<1> s(grid);
    s.set_mode(1, Complex(0.0, -0.5));
    return s;
}

/// Taylor-Green vorticity cos(2 pi x) cos(2 pi y), a steady state of 2D Euler.
inline SpectralField<2> taylor_green(const Grid<2>& grid) {
    SpectralField<2> s(grid);
    for (int sx : {-1, 1})
        for (int sy : {-1, 1}) s(sx, sy) = 0.25;
    return s;
}

/// Seeded random vorticity supported on k_min <= |k| <= k_max, with equal
/// enstrophy per integer shell, uniformly random phases and ||omega||^2 = 2 * enstrophy.
inline SpectralField<2> random_vorticity(const Grid<2>& grid, std::uint64_t seed, double enstrophy_target = 50.0,
                                         int k_min = 2, int k_max = 10) {
    if (k_min < 1 || k_max < k_min || k_max > grid.k_cut())
        throw ConfigurationError("random vorticity band must satisfy 1 <= k_min <= k_max <= k_cut");
    std::mt19937_64 rng(seed);
    auto uniform = [&rng] { return static_cast<double>(rng() >> 11) * 0x1.0p-53; };

    // One representative per conjugate pair: ky > 0, or ky == 0 and kx > 0.
    std::map<int, std::vector<std::array<int, 2>>> shells;
    for (int kx = -k_max; kx <= k_max; ++kx)
        for (int ky = 0; ky <= k_max; ++ky) {
            if (ky == 0 && kx <= 0) continue;
            const int shell = static_cast<int>(std::lround(std::sqrt(static_cast<double>(kx * kx + ky * ky))));
            if (shell >= k_min && shell <= k_max) shells[shell].push_back({kx, ky});
        }

    SpectralField<2> s(grid);
    const double per_shell = 2.0 * enstrophy_target / static_cast<double>(shells.size());
    for (const auto& [shell, modes] : shells) {
        // Each pair contributes 2 |c|^2 to ||omega||^2.
        const double amp = std::sqrt(per_shell / (2.0 * static_cast<double>(modes.size())));
        for (const auto& k : modes) s.set_mode(k[0], k[1], std::polar(amp, 2.0 * std::numbers::pi * uniform()));
    }
    return s;
}

} // namespace dyngal
