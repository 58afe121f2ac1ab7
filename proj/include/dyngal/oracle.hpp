#pragma once

// Entropy solution of the inviscid Burgers equation u_t + (u^2/2)_x = 0 with
// u(x, 0) = sin(2 pi x) on the unit torus. The solution is odd about x = 1/2,
// where a stationary shock forms at t_s = 1/(2 pi).

#include <algorithm>
#include <cmath>
#include <numbers>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "dyngal/errors.hpp"
#include "dyngal/spectral.hpp"

namespace dyngal::oracle {

inline constexpr double shock_time = 1.0 / (2.0 * std::numbers::pi);

namespace detail {

// Upper end of the increasing branch of x0 -> x0 + t sin(2 pi x0) on [0, 1/2].
inline double monotone_limit(double t) {
    if (t <= shock_time) return 0.5;
    return std::acos(-1.0 / (2.0 * std::numbers::pi * t)) / (2.0 * std::numbers::pi);
}

} // namespace detail

/// Characteristic foot x0 in [0, 1/2] with x0 + t sin(2 pi x0) = x, for x in [0, 1/2].
/// Safeguarded Newton on the increasing branch.
inline double characteristic_foot(double x, double t) {
    if (x <= 0.0) return 0.0;
    const double two_pi = 2.0 * std::numbers::pi;
    double lo = 0.0, hi = detail::monotone_limit(t);
    if (x >= 0.5 && t <= shock_time) return 0.5;
    double x0 = std::clamp(x, lo, hi);
    for (int it = 0; it < 60; ++it) {
        const double f = x0 + t * std::sin(two_pi * x0) - x;
        if (std::abs(f) <= 1e-14) break;
        if (f < 0.0)
            lo = x0;
        else
            hi = x0;
        const double df = 1.0 + two_pi * t * std::cos(two_pi * x0);
        double next = df > 0.0 ? x0 - f / df : 0.5 * (lo + hi);
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
        if (next == x0) break;
        x0 = next;
    }
    return x0;
}

/// u_ref(x, t).
inline double entropy_eval(double x, double t) {
    if (t < 0.0) throw ArgumentError("entropy solution needs t >= 0");
    x -= std::floor(x);
    if (t == 0.0) return std::sin(2.0 * std::numbers::pi * x);
    if (x == 0.0 || x == 0.5) return 0.0;
    if (x > 0.5) return -entropy_eval(1.0 - x, t);
    return std::sin(2.0 * std::numbers::pi * characteristic_foot(x, t));
}

/// u_ref sampled on the collocation points of `grid`.
inline PhysicalField<1> entropy_sample(const Grid<1>& grid, double t) {
    PhysicalField<1> p(grid);
    for (std::size_t m = 0; m < p.size(); ++m) p[m] = entropy_eval(p.x(m), t);
    return p;
}

/// ||u_ref(., t)||^2 by adaptive Gauss-Kronrod quadrature over one half, doubled.
inline double analytic_energy(double t) {
    if (t < 0.0) throw ArgumentError("analytic_energy needs t >= 0");
    auto f = [t](double x) {
        const double u = entropy_eval(x, t);
        return u * u;
    };
    double err = 0.0;
    const double half = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, 0.0, 0.5, 20, 1e-13, &err);
    return 2.0 * half;
}

/// Closed form of analytic_energy through the foot x0* of the characteristic
/// reaching the shock.
inline double analytic_energy_closed_form(double t) {
    const double pi = std::numbers::pi;
    const double x0 = characteristic_foot(0.5, t);
    const double s = std::sin(2.0 * pi * x0);
    return 2.0 * (0.5 * x0 - std::sin(4.0 * pi * x0) / (8.0 * pi) + t * s * s * s / 3.0);
}

} // namespace dyngal::oracle
