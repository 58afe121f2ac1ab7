#pragma once

// Explicit Runge-Kutta integrators with a projection hook after every
// substage, and the driver that couples them to a dynamical projector.

#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <optional>
#include <string_view>

#include "dyngal/errors.hpp"
#include "dyngal/projectors.hpp"
#include "dyngal/spectral.hpp"

namespace dyngal {

enum class Scheme { RK4, RK3LowStorage };

inline std::string_view scheme_name(Scheme s) { return s == Scheme::RK4 ? "rk4" : "rk3ls"; }

inline Scheme parse_scheme(std::string_view s) {
    if (s == "rk4") return Scheme::RK4;
    if (s == "rk3ls" || s == "rk3") return Scheme::RK3LowStorage;
    throw ConfigurationError("unknown time scheme '" + std::string(s) + "'");
}

struct NoProjection {
    template <class State>
    void operator()(State&) const {}
};

/// Classical RK4 step; `project` is applied to every substage state and to the result.
template <class State, class Rhs, class Project = NoProjection>
State rk4_step(const State& u, double dt, Rhs&& rhs, Project&& project = {}) {
    const State k1 = rhs(u);
    State y = u + (0.5 * dt) * k1;
    project(y);
    const State k2 = rhs(y);
    y = u + (0.5 * dt) * k2;
    project(y);
    const State k3 = rhs(y);
    y = u + dt * k3;
    project(y);
    const State k4 = rhs(y);
    State out = u + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    project(out);
    return out;
}

/// Williamson 2N-storage third-order scheme.
inline constexpr double rk3ls_a[3] = {0.0, -5.0 / 9.0, -153.0 / 128.0};
inline constexpr double rk3ls_b[3] = {1.0 / 3.0, 15.0 / 16.0, 8.0 / 15.0};

template <class State, class Rhs, class Project = NoProjection>
State rk3_low_storage_step(const State& u0, double dt, Rhs&& rhs, Project&& project = {}) {
    State u = u0;
    State q = dt * rhs(u);
    for (int s = 0;; ++s) {
        u = u + rk3ls_b[s] * q;
        project(u);
        if (s == 2) break;
        q = rk3ls_a[s + 1] * q + dt * rhs(u);
    }
    return u;
}

struct StepperConfig {
    Scheme scheme = Scheme::RK4;
    double dt = 0.0;
    double t_end = 0.0;
    std::size_t stride = 1;  ///< sink is called every `stride` steps (and at t = 0 and t_end)

    static double dt_from_ratio(double dx, double cfl_ratio) {
        if (!(cfl_ratio > 0.0)) throw ConfigurationError("cfl_ratio must be positive");
        return dx / cfl_ratio;
    }
};

/// Number of steps of size <= dt covering [0, t_end].
inline std::size_t step_count(double dt, double t_end) {
    const double r = t_end / dt;
    auto n = static_cast<std::size_t>(std::ceil(r - 1e-9 * r));
    return n == 0 ? 1 : n;
}

/// State handed to the trajectory sink.
template <int Dim>
struct StepView {
    double t;
    std::size_t step;
    const SpectralField<Dim>& u;
    const DissipationLedger& ledger;
    const DynamicalProjector<Dim>& projector;
};

/// First projector change seen during a run.
struct JumpRecord {
    double t = 0.0;
    double energy_before = 0.0;
    double energy_after = 0.0;
    double loss = 0.0;
    double dealias_loss = 0.0;
};

template <int Dim>
struct RunResult {
    SpectralField<Dim> u;
    double t = 0.0;
    std::size_t steps = 0;
    double initial_energy = 0.0;  ///< ||u(0+)||^2 after the initial projection
    std::optional<JumpRecord> first_jump;
};

/// Integrates du/dt = rhs(u) on [0, t_end] with the dynamical projector applied
/// at every step start and after every substage. Throws BlowUpError on a
/// non-finite state.
template <int Dim, class Rhs, class Sink>
RunResult<Dim> advance(SpectralField<Dim> u, Rhs&& rhs, DynamicalProjector<Dim>& projector,
                       const StepperConfig& cfg, DissipationLedger& ledger, Sink&& sink) {
    if (!(cfg.dt > 0.0) || !(cfg.t_end > 0.0)) throw ConfigurationError("dt and t_end must be positive");
    const std::size_t stride = cfg.stride == 0 ? 1 : cfg.stride;
    const std::size_t n_steps = step_count(cfg.dt, cfg.t_end);

    RunResult<Dim> res{std::move(u), 0.0, 0, 0.0, std::nullopt};
    IntervalEvent ev;
    res.u = projector.begin_interval(0.0, std::move(res.u), ledger, &ev);
    res.initial_energy = energy(res.u);
    sink(StepView<Dim>{0.0, 0, res.u, ledger, projector});

    double t = 0.0;
    for (std::size_t step = 1; step <= n_steps; ++step) {
        const double t_next = step == n_steps ? cfg.t_end : static_cast<double>(step) * cfg.dt;
        const double h = t_next - t;
        auto project = [&](SpectralField<Dim>& y) { y = projector.reapply(std::move(y)); };
        res.u = cfg.scheme == Scheme::RK4 ? rk4_step(res.u, h, rhs, project)
                                          : rk3_low_storage_step(res.u, h, rhs, project);
        t = t_next;
        if (!res.u.all_finite()) throw BlowUpError(t);
        if (step < n_steps) {
            ev = {};
            res.u = projector.begin_interval(t, std::move(res.u), ledger, &ev);
            if (ev.changed && !res.first_jump)
                res.first_jump = JumpRecord{t, ev.energy_before, energy(res.u), ev.loss, ev.dealias_loss};
        }
        if (step % stride == 0 || step == n_steps) sink(StepView<Dim>{t, step, res.u, ledger, projector});
    }
    res.t = t;
    res.steps = n_steps;
    return res;
}

template <int Dim, class Rhs>
RunResult<Dim> advance(SpectralField<Dim> u, Rhs&& rhs, DynamicalProjector<Dim>& projector,
                       const StepperConfig& cfg, DissipationLedger& ledger) {
    return advance(std::move(u), std::forward<Rhs>(rhs), projector, cfg, ledger, [](const StepView<Dim>&) {});
}

} // namespace dyngal
