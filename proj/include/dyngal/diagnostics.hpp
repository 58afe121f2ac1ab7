#pragma once

// Measured quantities: the filtered-vs-dissipated discrepancy delta and the
// time-integrated relative L2 error against the entropy solution.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <variant>
#include <vector>

#include "dyngal/errors.hpp"
#include "dyngal/oracle.hpp"
#include "dyngal/spectral.hpp"

namespace dyngal {

/// delta = (E0 - E(t_b)) - ||(1 - P(t_b+)) u(t_b)||^2
inline double delta(double e0, double e_tb, double jump_loss) { return (e0 - e_tb) - jump_loss; }

/// ||u - u_ref||^2 / ||u_ref||^2 on the collocation grid.
inline double relative_error(std::span<const double> u, std::span<const double> ref) {
    if (u.size() != ref.size()) throw ArgumentError("relative_error: sample counts differ");
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
        num += (u[i] - ref[i]) * (u[i] - ref[i]);
        den += ref[i] * ref[i];
    }
    if (den == 0.0) throw ArgumentError("relative_error: reference field vanishes");
    return num / den;
}

/// Online trapezoidal integral over [t0, t1] of the relative L2 error of a
/// Burgers trajectory against the entropy solution. Snapshots must arrive in
/// increasing time; the integrand is linearly interpolated at t0 and t1.
class ErrorAccumulator {
public:
    ErrorAccumulator(double t0, double t1) : t0_(t0), t1_(t1) {
        if (!(t1 > t0) || t0 < 0.0) throw ArgumentError("error window must satisfy 0 <= t0 < t1");
    }

    /// Default window [t_s - dt, 0.3], clipped at t = 0.
    static ErrorAccumulator standard(double dt) { return {std::max(0.0, oracle::shock_time - dt), 0.3}; }

    double t0() const noexcept { return t0_; }
    double t1() const noexcept { return t1_; }

    /// Adds a snapshot given by samples or by Fourier coefficients.
    template <class Field>
    void add(double t, const Field& u) {
        if (last_t_ && t <= *last_t_) throw ArgumentError("snapshots must arrive in increasing time");
        if (!first_t_) first_t_ = t;
        if (t < t0_) {
            pending_ = u;
            last_t_ = t;
            last_e_.reset();
            return;
        }
        if (last_t_ && *last_t_ >= t1_) {
            last_t_ = t;
            return;
        }
        if (last_t_ && !last_e_ && pending_) last_e_ = sample(*last_t_, *pending_);
        pending_.reset();
        const double e = sample(t, Snapshot(u));
        if (last_t_ && last_e_) integrate(*last_t_, *last_e_, t, e);
        last_t_ = t;
        last_e_ = e;
    }

    bool covers() const { return first_t_ && last_t_ && *first_t_ <= t0_ && *last_t_ >= t1_; }

    /// The integral; throws ArgumentError unless the snapshots cover [t0, t1].
    double value() const {
        if (!covers()) throw ArgumentError("trajectory does not cover the error window");
        return integral_;
    }

private:
    using Snapshot = std::variant<PhysicalField<1>, SpectralField<1>>;

    static double sample(double t, const Snapshot& snap) {
        const PhysicalField<1> u = std::holds_alternative<PhysicalField<1>>(snap)
                                       ? std::get<PhysicalField<1>>(snap)
                                       : to_physical(std::get<SpectralField<1>>(snap));
        const auto ref = oracle::entropy_sample(u.grid(), t);
        return relative_error(u.values(), ref.values());
    }

    void integrate(double ta, double ea, double tb, double eb) {
        const double lo = std::max(ta, t0_), hi = std::min(tb, t1_);
        if (!(hi > lo)) return;
        auto at = [&](double s) { return ea + (eb - ea) * (s - ta) / (tb - ta); };
        integral_ += 0.5 * (hi - lo) * (at(lo) + at(hi));
    }

    double t0_, t1_;
    double integral_ = 0.0;
    std::optional<double> first_t_, last_t_, last_e_;
    std::optional<Snapshot> pending_;
};

/// Batch form over stored snapshots (times increasing).
inline double error_functional(std::span<const double> times, std::span<const PhysicalField<1>> snapshots, double t0,
                               double t1) {
    if (times.size() != snapshots.size()) throw ArgumentError("one snapshot per time required");
    ErrorAccumulator acc(t0, t1);
    for (std::size_t i = 0; i < times.size(); ++i) acc.add(times[i], snapshots[i]);
    return acc.value();
}

} // namespace dyngal
