#pragma once

// Dynamical Galerkin projectors: time- and state-dependent orthogonal
// projections applied to a spectral state, and the ledger of the energy
// they remove at each discontinuity.

#include <cmath>
#include <cstddef>
#include <iomanip>
#include <limits>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <type_traits>
#include <variant>
#include <vector>

#include "dyngal/errors.hpp"
#include "dyngal/spectral.hpp"
#include "dyngal/wavelets.hpp"

namespace dyngal {

/// Ledger tags.
namespace tags {
inline constexpr std::string_view jump = "jump";        ///< projector change at a step start
inline constexpr std::string_view rezero = "rezero";    ///< re-application to the state at a later step start
inline constexpr std::string_view dealias = "dealias";  ///< truncation of modes a wavelet filter pushed past k_cut
} // namespace tags

struct LedgerEntry {
    double t = 0.0;
    double loss = 0.0;
    double cumulative = 0.0;
    std::string tag;
};

/// Running record of energy removed by projector applications.
class DissipationLedger {
public:
    /// Appends a positive loss; zero and round-off-negative losses are not recorded.
    void record(double t, double loss, std::string_view tag) {
        if (!(loss > 0.0)) return;
        cumulative_ += loss;
        entries_.push_back({t, loss, cumulative_, std::string(tag)});
    }

    double cumulative() const noexcept { return cumulative_; }
    const std::vector<LedgerEntry>& entries() const noexcept { return entries_; }
    bool empty() const noexcept { return entries_.empty(); }

    double total(std::string_view tag) const {
        double s = 0.0;
        for (const auto& e : entries_)
            if (e.tag == tag) s += e.loss;
        return s;
    }
    std::size_t count(std::string_view tag) const {
        std::size_t c = 0;
        for (const auto& e : entries_) c += e.tag == tag;
        return c;
    }

    /// CSV with a versioned comment line and columns t,loss,cumulative,tag.
    void write_csv(std::ostream& os) const {
        os << "# dyngal ledger v1\n";
        os << "t,loss,cumulative,tag\n";
        os << std::setprecision(17);
        for (const auto& e : entries_) os << e.t << ',' << e.loss << ',' << e.cumulative << ',' << e.tag << '\n';
    }

private:
    double cumulative_ = 0.0;
    std::vector<LedgerEntry> entries_;
};

/// Outcome of one projector application.
template <int Dim>
struct FilterResult {
    SpectralField<Dim> field;
    double loss = 0.0;          ///< energy removed by the projection itself
    double dealias_loss = 0.0;  ///< energy removed by re-truncating to |k| <= k_cut
};

template <int Dim>
struct CvsResult : FilterResult<Dim> {
    double epsilon = 0.0;
    double retained_fraction = 1.0;
    CoeffMask<Dim> mask;
};

/// Zeroes the modes +-k_f (1D), or every mode with kx = +-k_f or ky = +-k_f (2D).
template <int Dim>
FilterResult<Dim> fourier_filter(const SpectralField<Dim>& s, int k_f) {
    const std::size_t n = s.grid().n();
    if (k_f <= 0 || 2 * static_cast<std::size_t>(k_f) >= n) throw ConfigurationError("filter wavenumber out of range");
    FilterResult<Dim> r{s};
    auto c = r.field.coeffs();
    for (std::size_t i = 0; i < c.size(); ++i) {
        bool hit;
        if constexpr (Dim == 1)
            hit = std::abs(wavenumber(i, n)) == k_f;
        else
            hit = std::abs(wavenumber(i / n, n)) == k_f || std::abs(wavenumber(i % n, n)) == k_f;
        if (hit) {
            r.loss += std::norm(c[i]);
            c[i] = Complex{};
        }
    }
    return r;
}

/// Wavelet-space projection onto the coefficients retained by `mask`,
/// followed by the return to the dealiased Fourier space.
template <int Dim>
FilterResult<Dim> masked_filter(const SpectralField<Dim>& s, WaveletFamily family, const CoeffMask<Dim>& mask) {
    const double e_in = energy(s);
    const auto w = apply_mask(fwt(to_physical(s), family), mask);
    const auto p = iwt(w, s.grid());
    const double e_mid = mean_square(p);
    FilterResult<Dim> r{truncate(to_spectral(p))};
    r.loss = e_in - e_mid;
    r.dealias_loss = e_mid - energy(r.field);
    return r;
}

/// Removes the single wavelet coefficient (j_f, i_f) (1D).
inline FilterResult<1> wavelet_filter(const SpectralField<1>& s, WaveletFamily family, int j_f, std::size_t i_f) {
    const int levels = s.grid().levels();
    if (j_f < 0 || j_f >= levels || i_f >= (std::size_t{1} << j_f))
        throw ConfigurationError("wavelet index (j_f, i_f) outside the coefficient layout");
    CoeffMask<1> mask(s.grid().n(), true);
    mask.set(mask.layout().flat(j_f, i_f), false);
    return masked_filter(s, family, mask);
}

/// CVS filter: threshold estimate, hard thresholding, optional safety zone,
/// reconstruction and dealiasing.
template <int Dim>
CvsResult<Dim> cvs_filter(const SpectralField<Dim>& s, WaveletFamily family, double q, bool safety,
                          const ThresholdOptions& opts = {}) {
    const double e_in = energy(s);
    auto w = fwt(to_physical(s), family);
    const double eps = iterative_threshold(w, q, opts);
    auto mask = hard_threshold(w, eps).second;
    if (safety) mask = safety_zone(mask);
    const auto filtered = apply_mask(std::move(w), mask);
    const auto p = iwt(filtered, s.grid());
    const double e_mid = mean_square(p);
    CvsResult<Dim> r{{truncate(to_spectral(p))}, eps, mask.fraction(), std::move(mask)};
    r.loss = e_in - e_mid;
    r.dealias_loss = e_mid - energy(r.field);
    return r;
}

struct IdentityRule {};

/// Removes Fourier modes +-k_f while t_b <= t < t_e.
struct FourierPunctualRule {
    int k_f = 2;
    double t_b = 0.0;
    double t_e = 0.0;
};

/// Removes wavelet coefficient (j_f, i_f) while t_b <= t < t_e.
struct WaveletPunctualRule {
    WaveletFamily family;
    int j_f = 0;
    std::size_t i_f = 0;
    double t_b = 0.0;
    double t_e = 0.0;
};

/// Coherent vorticity simulation filter, re-evaluated at every step.
struct CvsRule {
    WaveletFamily family;
    double q = 8.0;
    bool safety = true;
    ThresholdOptions threshold = {};
};

using ProjectorRule = std::variant<IdentityRule, FourierPunctualRule, WaveletPunctualRule, CvsRule>;

inline std::string describe(const ProjectorRule& rule) {
    std::ostringstream os;
    std::visit(
        [&](const auto& r) {
            using R = std::decay_t<decltype(r)>;
            if constexpr (std::is_same_v<R, IdentityRule>)
                os << "identity";
            else if constexpr (std::is_same_v<R, FourierPunctualRule>)
                os << "fourier(k_f=" << r.k_f << ", [" << r.t_b << ", " << r.t_e << "))";
            else if constexpr (std::is_same_v<R, WaveletPunctualRule>)
                os << "wavelet(" << r.family.name() << ", j_f=" << r.j_f << ", i_f=" << r.i_f << ", [" << r.t_b
                   << ", " << r.t_e << "))";
            else
                os << "cvs(" << r.family.name() << ", q=" << r.q << (r.safety ? ", safety" : "") << ")";
        },
        rule);
    return os.str();
}

/// Statistics of the most recent CVS threshold evaluation.
struct CvsStats {
    double epsilon = std::numeric_limits<double>::quiet_NaN();
    double retained_fraction = std::numeric_limits<double>::quiet_NaN();
};

/// Energies around the projector change at a step start.
struct IntervalEvent {
    bool changed = false;       ///< a jump was applied at this instant
    double energy_before = 0.0; ///< ||u(t)||^2
    double loss = 0.0;          ///< jump loss
    double dealias_loss = 0.0;
};

/// A rule-driven projector that is piecewise constant in time.
///
/// `begin_interval` evaluates P(t+) at a step start, applies it to the state
/// and records what it removes. `reapply` re-zeroes the filtered modes of a
/// punctual rule after an RK substage without recording: these removals are
/// part of integrating du/dt = P f(u) and vanish with the step size. Punctual
/// rules are active for step starts t_b <= t < t_e. CVS is applied once per
/// step, at the step start.
template <int Dim>
class DynamicalProjector {
public:
    explicit DynamicalProjector(ProjectorRule rule = IdentityRule{}) : rule_(std::move(rule)) {
        if constexpr (Dim == 2)
            if (std::holds_alternative<WaveletPunctualRule>(rule_))
                throw ConfigurationError("punctual wavelet filtering is only available in 1D");
        if (const auto* c = std::get_if<CvsRule>(&rule_); c && !(c->q > 0.0))
            throw ConfigurationError("CVS compression parameter q must be positive");
    }

    const ProjectorRule& rule() const noexcept { return rule_; }
    std::string description() const { return describe(rule_); }
    const CvsStats& cvs_stats() const noexcept { return stats_; }

    /// Whether a punctual rule is switched on at time t (CVS: always).
    bool active(double t) const {
        return std::visit(
            [&](const auto& r) -> bool {
                using R = std::decay_t<decltype(r)>;
                if constexpr (std::is_same_v<R, IdentityRule>)
                    return false;
                else if constexpr (std::is_same_v<R, CvsRule>)
                    return true;
                else
                    return r.t_b <= t && t < r.t_e;
            },
            rule_);
    }

    /// One-shot application P(t+) s with a fresh evaluation of the rule.
    SpectralField<Dim> apply(double t, const SpectralField<Dim>& s, DissipationLedger& ledger, bool record) {
        if (!active(t)) return s;
        auto r = evaluate(s);
        if (record) {
            ledger.record(t, r.loss, tags::jump);
            ledger.record(t, r.dealias_loss, tags::dealias);
        }
        return std::move(r.field);
    }

    /// Evaluates P(t+) at a step start and applies it when it is active. The
    /// removal is a jump when a punctual rule switches on (every step for CVS)
    /// and a re-zeroing otherwise.
    SpectralField<Dim> begin_interval(double t, SpectralField<Dim> s, DissipationLedger& ledger,
                                      IntervalEvent* event = nullptr) {
        const bool now = active(t);
        const bool jump = now && (!was_active_ || std::holds_alternative<CvsRule>(rule_));
        was_active_ = now;
        if (!now) return s;
        auto r = evaluate(s);
        if (!jump) {
            ledger.record(t, r.loss, tags::rezero);
            ledger.record(t, r.dealias_loss, tags::dealias);
            return std::move(r.field);
        }
        const double e_before = energy(s);
        ledger.record(t, r.loss, tags::jump);
        ledger.record(t, r.dealias_loss, tags::dealias);
        if (event) *event = {true, e_before, r.loss, r.dealias_loss};
        return std::move(r.field);
    }

    /// Re-zeroes the modes removed by an active punctual rule (CVS and identity: no-op).
    SpectralField<Dim> reapply(SpectralField<Dim> s) const {
        if (!was_active_) return s;
        if (const auto* f = std::get_if<FourierPunctualRule>(&rule_)) return std::move(fourier_filter(s, f->k_f).field);
        if constexpr (Dim == 1)
            if (const auto* w = std::get_if<WaveletPunctualRule>(&rule_))
                return std::move(wavelet_filter(s, w->family, w->j_f, w->i_f).field);
        return s;
    }

private:
    FilterResult<Dim> evaluate(const SpectralField<Dim>& s) {
        return std::visit(
            [&](const auto& rule) -> FilterResult<Dim> {
                using R = std::decay_t<decltype(rule)>;
                if constexpr (std::is_same_v<R, IdentityRule>)
                    return {s};
                else if constexpr (std::is_same_v<R, FourierPunctualRule>)
                    return fourier_filter(s, rule.k_f);
                else if constexpr (std::is_same_v<R, WaveletPunctualRule>) {
                    if constexpr (Dim == 1)
                        return wavelet_filter(s, rule.family, rule.j_f, rule.i_f);
                    else
                        return {s};
                } else {
                    auto c = cvs_filter(s, rule.family, rule.q, rule.safety, rule.threshold);
                    stats_ = {c.epsilon, c.retained_fraction};
                    return FilterResult<Dim>{std::move(c.field), c.loss, c.dealias_loss};
                }
            },
            rule_);
    }

    ProjectorRule rule_;
    bool was_active_ = false;
    CvsStats stats_;
};

} // namespace dyngal
