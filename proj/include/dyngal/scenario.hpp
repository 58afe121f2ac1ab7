#pragma once

// Experiment descriptions: INI scenario files, single runs with CSV/JSON
// artifacts, parameter sweeps and the built-in figure presets.
//
// Scenario grammar (INI, '#' or ';' comments):
//
//   [scenario]  name, equation = burgers1d | euler2d, n, k_cut, nu,
//               initial = sine | random | taylor-green | file, initial_file,
//               seed, enstrophy, scheme = rk4 | rk3ls, cfl_ratio, dt, t_end
//   [projector] rule = identity | fourier | wavelet | cvs, k_f, j_f, i_f, t_b, t_e,
//               family = shannon | meyer | daubechies12, q, safety,
//               sigma = mean-centered | rms, initial_threshold = norm-root | energy-ratio
//   [output]    dir, stride, field_times, reference, error_functional = auto | on | off,
//               error_stride
//   [sweep]     n, cfl_ratio, dt   (comma-separated lists; cartesian product)

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <nlohmann/json.hpp>

#include "dyngal/diagnostics.hpp"
#include "dyngal/equations.hpp"
#include "dyngal/errors.hpp"
#include "dyngal/oracle.hpp"
#include "dyngal/projectors.hpp"
#include "dyngal/spectral.hpp"
#include "dyngal/timestepping.hpp"

namespace dyngal {

inline constexpr const char* trajectory_schema = "# dyngal trajectory v1";
inline constexpr const char* field_schema = "# dyngal field v1";
inline constexpr const char* sweep_schema = "# dyngal sweep v1";
inline constexpr const char* reference_schema = "# dyngal reference v1";
inline constexpr const char* summary_schema = "dyngal summary v1";

enum class Equation { Burgers1D, Euler2D };
enum class InitialKind { Sine, Random, TaylorGreen, File };
enum class Toggle { Auto, On, Off };

struct ScenarioConfig {
    std::string name = "run";
    Equation equation = Equation::Burgers1D;
    std::size_t n = 2048;
    std::optional<int> k_cut;
    double nu = 0.0;
    InitialKind initial = InitialKind::Sine;
    std::string initial_file;
    std::uint64_t seed = 1;
    double enstrophy = 50.0;
    Scheme scheme = Scheme::RK4;
    double cfl_ratio = 16.0;
    std::optional<double> dt;
    double t_end = 0.3;

    ProjectorRule rule = IdentityRule{};

    std::string output_dir = "out";
    std::size_t stride = 1;
    std::vector<double> field_times;
    bool reference = false;
    Toggle error_functional = Toggle::Auto;
    std::size_t error_stride = 1;

    std::vector<std::size_t> sweep_n;
    std::vector<double> sweep_cfl;
    std::vector<double> sweep_dt;

    double dx() const { return 1.0 / static_cast<double>(n); }
    double time_step() const { return dt ? *dt : StepperConfig::dt_from_ratio(dx(), cfl_ratio); }
    bool has_sweep() const { return !sweep_n.empty() || !sweep_cfl.empty() || !sweep_dt.empty(); }

    /// The error functional needs the sine entropy solution over [t_s - dt, 0.3].
    bool computes_error_functional() const {
        const bool possible = equation == Equation::Burgers1D && initial == InitialKind::Sine && nu == 0.0 &&
                              t_end >= 0.3 - 1e-12;
        if (error_functional == Toggle::On && !possible)
            throw ConfigurationError("output.error_functional needs an inviscid sine Burgers run reaching t = 0.3");
        return error_functional != Toggle::Off && possible;
    }
};

namespace scenario_detail {

using boost::property_tree::ptree;

inline const std::map<std::string, std::set<std::string>>& allowed_keys() {
    static const std::map<std::string, std::set<std::string>> keys = {
        {"scenario",
         {"name", "equation", "n", "k_cut", "nu", "initial", "initial_file", "seed", "enstrophy", "scheme",
          "cfl_ratio", "dt", "t_end"}},
        {"projector",
         {"rule", "k_f", "j_f", "i_f", "t_b", "t_e", "family", "q", "safety", "sigma", "initial_threshold"}},
        {"output", {"dir", "stride", "field_times", "reference", "error_functional", "error_stride"}},
        {"sweep", {"n", "cfl_ratio", "dt"}},
    };
    return keys;
}

inline std::string trim(std::string s) {
    const auto ws = " \t\r\n";
    s.erase(0, s.find_first_not_of(ws));
    s.erase(s.find_last_not_of(ws) + 1);
    return s;
}

class Reader {
public:
    explicit Reader(const ptree& root) : root_(root) {}

    std::optional<std::string> raw(const std::string& path) const {
        if (auto v = root_.get_optional<std::string>(ptree::path_type(path, '.'))) return trim(*v);
        return std::nullopt;
    }

    std::string str(const std::string& path, std::string def) const { return raw(path).value_or(std::move(def)); }

    double real(const std::string& path, double def) const {
        auto v = raw(path);
        return v ? to_real(path, *v) : def;
    }
    std::optional<double> opt_real(const std::string& path) const {
        auto v = raw(path);
        if (!v) return std::nullopt;
        return to_real(path, *v);
    }

    long long integer(const std::string& path, long long def) const {
        auto v = raw(path);
        return v ? to_integer(path, *v) : def;
    }
    std::optional<long long> opt_integer(const std::string& path) const {
        auto v = raw(path);
        if (!v) return std::nullopt;
        return to_integer(path, *v);
    }

    bool boolean(const std::string& path, bool def) const {
        auto v = raw(path);
        if (!v) return def;
        if (*v == "true" || *v == "yes" || *v == "on" || *v == "1") return true;
        if (*v == "false" || *v == "no" || *v == "off" || *v == "0") return false;
        throw ConfigurationError(path + ": expected a boolean, got '" + *v + "'");
    }

    std::vector<double> reals(const std::string& path) const {
        std::vector<double> out;
        for (const auto& item : items(path)) out.push_back(to_real(path, item));
        return out;
    }
    std::vector<long long> integers(const std::string& path) const {
        std::vector<long long> out;
        for (const auto& item : items(path)) out.push_back(to_integer(path, item));
        return out;
    }

private:
    std::vector<std::string> items(const std::string& path) const {
        std::vector<std::string> out;
        auto v = raw(path);
        if (!v) return out;
        std::stringstream ss(*v);
        std::string item;
        while (std::getline(ss, item, ',')) {
            item = trim(item);
            if (!item.empty()) out.push_back(item);
        }
        return out;
    }

    static double to_real(const std::string& path, const std::string& s) {
        try {
            std::size_t used = 0;
            const double v = std::stod(s, &used);
            if (used == s.size() && std::isfinite(v)) return v;
        } catch (const std::exception&) {
        }
        throw ConfigurationError(path + ": expected a number, got '" + s + "'");
    }
    static long long to_integer(const std::string& path, const std::string& s) {
        try {
            std::size_t used = 0;
            const long long v = std::stoll(s, &used);
            if (used == s.size()) return v;
        } catch (const std::exception&) {
        }
        throw ConfigurationError(path + ": expected an integer, got '" + s + "'");
    }

    const ptree& root_;
};

inline void check_keys(const ptree& root) {
    const auto& allowed = allowed_keys();
    for (const auto& [section, body] : root) {
        auto it = allowed.find(section);
        if (it == allowed.end()) throw ConfigurationError("unknown section '" + section + "'");
        if (!body.data().empty() && body.empty())
            throw ConfigurationError("key '" + section + "' must belong to a section");
        for (const auto& [key, value] : body)
            if (!it->second.count(key)) throw ConfigurationError("unknown key '" + section + "." + key + "'");
    }
}

inline ProjectorRule parse_rule(const Reader& r) {
    const std::string rule = r.str("projector.rule", "identity");
    auto family = [&](const char* def) {
        try {
            return WaveletFamily::parse(r.str("projector.family", def));
        } catch (const ConfigurationError& e) {
            throw ConfigurationError(std::string("projector.family: ") + e.what());
        }
    };
    if (rule == "identity") return IdentityRule{};
    if (rule == "fourier") {
        FourierPunctualRule f;
        f.k_f = static_cast<int>(r.integer("projector.k_f", 2));
        f.t_b = r.real("projector.t_b", 0.16);
        f.t_e = r.real("projector.t_e", 0.2);
        if (f.k_f <= 0) throw ConfigurationError("projector.k_f must be positive");
        if (!(f.t_e > f.t_b)) throw ConfigurationError("projector.t_e must exceed projector.t_b");
        return f;
    }
    if (rule == "wavelet") {
        WaveletPunctualRule w;
        w.family = family("meyer");
        const long long j = r.integer("projector.j_f", 1), i = r.integer("projector.i_f", 1);
        if (j < 0 || i < 0) throw ConfigurationError("projector.j_f and projector.i_f must be non-negative");
        w.j_f = static_cast<int>(j);
        w.i_f = static_cast<std::size_t>(i);
        w.t_b = r.real("projector.t_b", 0.16);
        w.t_e = r.real("projector.t_e", 0.2);
        if (!(w.t_e > w.t_b)) throw ConfigurationError("projector.t_e must exceed projector.t_b");
        return w;
    }
    if (rule == "cvs") {
        CvsRule c;
        c.family = family("shannon");
        c.q = r.real("projector.q", 8.0);
        if (!(c.q > 0.0)) throw ConfigurationError("projector.q must be positive");
        c.safety = r.boolean("projector.safety", true);
        const std::string sigma = r.str("projector.sigma", "mean-centered");
        if (sigma == "mean-centered")
            c.threshold.sigma = SigmaConvention::MeanCentered;
        else if (sigma == "rms")
            c.threshold.sigma = SigmaConvention::RootMeanSquare;
        else
            throw ConfigurationError("projector.sigma: expected mean-centered or rms, got '" + sigma + "'");
        const std::string init = r.str("projector.initial_threshold", "norm-root");
        if (init == "norm-root")
            c.threshold.initial = InitialThreshold::NormRoot;
        else if (init == "energy-ratio")
            c.threshold.initial = InitialThreshold::EnergyRatio;
        else
            throw ConfigurationError("projector.initial_threshold: expected norm-root or energy-ratio, got '" + init +
                                     "'");
        return c;
    }
    throw ConfigurationError("projector.rule: unknown rule '" + rule + "'");
}

} // namespace scenario_detail

/// Builds a validated configuration from a parsed INI tree; `overrides`
/// are "section.key=value" assignments applied first.
inline ScenarioConfig parse_config(boost::property_tree::ptree root, const std::vector<std::string>& overrides = {}) {
    using namespace scenario_detail;
    for (const auto& o : overrides) {
        const auto eq = o.find('=');
        if (eq == std::string::npos || o.find('.') > eq)
            throw ConfigurationError("override '" + o + "' is not of the form section.key=value");
        root.put(ptree::path_type(trim(o.substr(0, eq)), '.'), trim(o.substr(eq + 1)));
    }
    check_keys(root);
    Reader r(root);
    ScenarioConfig c;
    c.name = r.str("scenario.name", c.name);

    const std::string eq = r.str("scenario.equation", "burgers1d");
    if (eq == "burgers1d")
        c.equation = Equation::Burgers1D;
    else if (eq == "euler2d")
        c.equation = Equation::Euler2D;
    else
        throw ConfigurationError("scenario.equation: unknown equation '" + eq + "'");

    const long long n = r.integer("scenario.n", c.equation == Equation::Euler2D ? 256 : 2048);
    if (n < 8 || !is_power_of_two(static_cast<std::size_t>(n)))
        throw ConfigurationError("scenario.n: must be a power of two >= 8");
    c.n = static_cast<std::size_t>(n);
    if (auto k = r.opt_integer("scenario.k_cut")) {
        if (*k < 1 || 3 * static_cast<std::size_t>(*k) > c.n)
            throw ConfigurationError("scenario.k_cut: must satisfy 1 <= k_cut <= n/3");
        c.k_cut = static_cast<int>(*k);
    }
    c.nu = r.real("scenario.nu", 0.0);
    if (c.nu < 0.0) throw ConfigurationError("scenario.nu: must be non-negative");

    const std::string init = r.str("scenario.initial", c.equation == Equation::Euler2D ? "random" : "sine");
    if (init == "sine")
        c.initial = InitialKind::Sine;
    else if (init == "random")
        c.initial = InitialKind::Random;
    else if (init == "taylor-green")
        c.initial = InitialKind::TaylorGreen;
    else if (init == "file")
        c.initial = InitialKind::File;
    else
        throw ConfigurationError("scenario.initial: unknown initial condition '" + init + "'");
    if (c.equation == Equation::Burgers1D && (c.initial == InitialKind::Random || c.initial == InitialKind::TaylorGreen))
        throw ConfigurationError("scenario.initial: '" + init + "' is a 2D initial condition");
    if (c.equation == Equation::Euler2D && c.initial == InitialKind::Sine)
        throw ConfigurationError("scenario.initial: 'sine' is a 1D initial condition");
    c.initial_file = r.str("scenario.initial_file", "");
    if (c.initial == InitialKind::File && c.initial_file.empty())
        throw ConfigurationError("scenario.initial_file: required for initial = file");
    const long long seed = r.integer("scenario.seed", 1);
    if (seed < 0) throw ConfigurationError("scenario.seed: must be non-negative");
    c.seed = static_cast<std::uint64_t>(seed);
    c.enstrophy = r.real("scenario.enstrophy", c.enstrophy);
    if (!(c.enstrophy > 0.0)) throw ConfigurationError("scenario.enstrophy: must be positive");

    try {
        c.scheme = parse_scheme(r.str("scenario.scheme", c.equation == Equation::Euler2D ? "rk3ls" : "rk4"));
    } catch (const ConfigurationError& e) {
        throw ConfigurationError(std::string("scenario.scheme: ") + e.what());
    }
    c.cfl_ratio = r.real("scenario.cfl_ratio", c.cfl_ratio);
    if (!(c.cfl_ratio > 0.0)) throw ConfigurationError("scenario.cfl_ratio: must be positive");
    c.dt = r.opt_real("scenario.dt");
    if (c.dt && !(*c.dt > 0.0)) throw ConfigurationError("scenario.dt: must be positive");
    c.t_end = r.real("scenario.t_end", c.t_end);
    if (!(c.t_end > 0.0)) throw ConfigurationError("scenario.t_end: must be positive");

    c.rule = parse_rule(r);
    if (c.equation == Equation::Euler2D && std::holds_alternative<WaveletPunctualRule>(c.rule))
        throw ConfigurationError("projector.rule: punctual wavelet filtering is only available for burgers1d");

    c.output_dir = r.str("output.dir", c.output_dir);
    const long long stride = r.integer("output.stride", 1);
    if (stride < 1) throw ConfigurationError("output.stride: must be >= 1");
    c.stride = static_cast<std::size_t>(stride);
    c.field_times = r.reals("output.field_times");
    std::sort(c.field_times.begin(), c.field_times.end());
    c.reference = r.boolean("output.reference", false);
    const std::string ef = r.str("output.error_functional", "auto");
    if (ef == "auto")
        c.error_functional = Toggle::Auto;
    else if (ef == "on" || ef == "true")
        c.error_functional = Toggle::On;
    else if (ef == "off" || ef == "false")
        c.error_functional = Toggle::Off;
    else
        throw ConfigurationError("output.error_functional: expected auto, on or off");
    const long long es = r.integer("output.error_stride", 1);
    if (es < 1) throw ConfigurationError("output.error_stride: must be >= 1");
    c.error_stride = static_cast<std::size_t>(es);
    if (c.reference && !(c.equation == Equation::Burgers1D && c.initial == InitialKind::Sine && c.nu == 0.0))
        throw ConfigurationError("output.reference: only available for inviscid sine Burgers runs");

    for (long long v : r.integers("sweep.n")) {
        if (v < 8 || !is_power_of_two(static_cast<std::size_t>(v)))
            throw ConfigurationError("sweep.n: entries must be powers of two >= 8");
        c.sweep_n.push_back(static_cast<std::size_t>(v));
    }
    c.sweep_cfl = r.reals("sweep.cfl_ratio");
    c.sweep_dt = r.reals("sweep.dt");
    for (double v : c.sweep_cfl)
        if (!(v > 0.0)) throw ConfigurationError("sweep.cfl_ratio: entries must be positive");
    for (double v : c.sweep_dt)
        if (!(v > 0.0)) throw ConfigurationError("sweep.dt: entries must be positive");
    if (!c.sweep_cfl.empty() && !c.sweep_dt.empty())
        throw ConfigurationError("sweep: give either cfl_ratio or dt, not both");
    (void)c.computes_error_functional();
    return c;
}

inline ScenarioConfig parse_config_text(const std::string& text, const std::vector<std::string>& overrides = {}) {
    boost::property_tree::ptree root;
    std::istringstream is(text);
    try {
        boost::property_tree::ini_parser::read_ini(is, root);
    } catch (const boost::property_tree::ini_parser_error& e) {
        throw ConfigurationError(std::string("config parse error: ") + e.what());
    }
    return parse_config(std::move(root), overrides);
}

inline ScenarioConfig load_config(const std::filesystem::path& path, const std::vector<std::string>& overrides = {}) {
    std::ifstream in(path);
    if (!in) throw ConfigurationError("cannot open config file '" + path.string() + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config_text(ss.str(), overrides);
}

/// Per-run results, also serialized as summary.json.
struct RunSummary {
    std::string name;
    std::string status = "ok";
    std::string error_kind;
    std::string message;
    std::optional<double> error_time;

    std::size_t n = 0;
    double dt = 0.0;
    double cfl_ratio = 0.0;
    std::size_t steps = 0;
    double t_end = 0.0;
    double initial_energy = 0.0;
    double final_energy = 0.0;
    std::optional<double> final_enstrophy;
    double ledger_total = 0.0;
    double ledger_jump = 0.0;
    double ledger_rezero = 0.0;
    double ledger_dealias = 0.0;
    std::size_t ledger_entries = 0;
    double max_energy_change = 0.0;  ///< max over outputs of |E(t) - E(0)|
    double max_audit = 0.0;          ///< max over outputs of |E(0) - E(t) - ledger(t)| (2D: in ||omega||^2)
    std::optional<JumpRecord> first_jump;
    std::optional<double> delta;
    std::optional<double> error_functional;
    std::optional<double> analytic_final_energy;
    std::string projector;

    bool ok() const { return status == "ok"; }
};

inline nlohmann::json to_json(const RunSummary& s) {
    using nlohmann::json;
    auto opt = [](const std::optional<double>& v) -> json { return v ? json(*v) : json(nullptr); };
    json j = {
        {"schema", summary_schema},
        {"name", s.name},
        {"status", s.status},
        {"n", s.n},
        {"dt", s.dt},
        {"cfl_ratio", s.cfl_ratio},
        {"steps", s.steps},
        {"t_end", s.t_end},
        {"projector", s.projector},
        {"initial_energy", s.initial_energy},
        {"final_energy", s.final_energy},
        {"final_enstrophy", opt(s.final_enstrophy)},
        {"ledger_total", s.ledger_total},
        {"ledger_by_tag", {{"jump", s.ledger_jump}, {"rezero", s.ledger_rezero}, {"dealias", s.ledger_dealias}}},
        {"ledger_entries", s.ledger_entries},
        {"max_energy_change", s.max_energy_change},
        {"max_audit", s.max_audit},
        {"delta", opt(s.delta)},
        {"error_functional", opt(s.error_functional)},
        {"analytic_final_energy", opt(s.analytic_final_energy)},
    };
    if (s.first_jump)
        j["first_jump"] = {{"t", s.first_jump->t},
                           {"energy_before", s.first_jump->energy_before},
                           {"energy_after", s.first_jump->energy_after},
                           {"loss", s.first_jump->loss},
                           {"dealias_loss", s.first_jump->dealias_loss}};
    else
        j["first_jump"] = nullptr;
    if (!s.ok()) j["error"] = {{"kind", s.error_kind}, {"message", s.message}, {"t", opt(s.error_time)}};
    return j;
}

namespace scenario_detail {

inline std::ofstream open_out(const std::filesystem::path& p) {
    std::ofstream os(p);
    if (!os) throw ConfigurationError("cannot write '" + p.string() + "'");
    os << std::setprecision(17);
    return os;
}

inline std::string csv_number(double v) {
    if (std::isnan(v)) return "nan";
    std::ostringstream os;
    os << std::setprecision(17) << v;
    return os.str();
}

inline std::vector<double> read_samples(const std::string& path, std::size_t expected) {
    std::ifstream in(path);
    if (!in) throw ConfigurationError("scenario.initial_file: cannot open '" + path + "'");
    std::vector<double> values;
    std::string line;
    while (std::getline(in, line)) {
        line = trim(line);
        if (line.empty() || line[0] == '#' || std::isalpha(static_cast<unsigned char>(line[0]))) continue;
        std::stringstream ss(line);
        std::string cell;
        std::vector<double> row;
        while (std::getline(ss, cell, ',')) row.push_back(std::stod(cell));
        if (row.size() > 2)
            values.insert(values.end(), row.begin(), row.end());
        else
            values.push_back(row.back());
    }
    if (values.size() != expected)
        throw ConfigurationError("scenario.initial_file: expected " + std::to_string(expected) + " samples, found " +
                                 std::to_string(values.size()));
    return values;
}

template <int Dim>
Grid<Dim> make_grid(const ScenarioConfig& c) {
    return c.k_cut ? Grid<Dim>(c.n, *c.k_cut) : Grid<Dim>::dealiased(c.n);
}

template <int Dim>
SpectralField<Dim> initial_state(const ScenarioConfig& c, const Grid<Dim>& grid) {
    if (c.initial == InitialKind::File)
        return truncate(to_spectral(PhysicalField<Dim>(grid, read_samples(c.initial_file, grid.size()))));
    if constexpr (Dim == 1) {
        return sine_initial(grid);
    } else {
        if (c.initial == InitialKind::TaylorGreen) return taylor_green(grid);
        return random_vorticity(grid, c.seed, c.enstrophy);
    }
}

template <int Dim>
void write_field(const std::filesystem::path& p, double t, const SpectralField<Dim>& s) {
    auto os = open_out(p);
    const auto phys = to_physical(s);
    os << field_schema << " t=" << t << "\n";
    if constexpr (Dim == 1) {
        os << "x,u\n";
        for (std::size_t m = 0; m < phys.size(); ++m) os << phys.x(m) << ',' << phys[m] << '\n';
    } else {
        const std::size_t n = s.grid().n();
        os << "n," << n << "\n";
        for (std::size_t ix = 0; ix < n; ++ix) {
            for (std::size_t iy = 0; iy < n; ++iy) os << (iy ? "," : "") << phys(ix, iy);
            os << '\n';
        }
    }
}

template <int Dim>
RunSummary run_dim(const ScenarioConfig& c, const std::filesystem::path& dir) {
    namespace fs = std::filesystem;
    const bool write = !dir.empty();
    const Grid<Dim> grid = make_grid<Dim>(c);
    const double dt = c.time_step();
    const bool want_error = c.computes_error_functional();

    RunSummary s;
    s.name = c.name;
    s.n = c.n;
    s.dt = dt;
    s.cfl_ratio = c.dx() / dt;
    s.t_end = c.t_end;

    DynamicalProjector<Dim> projector(c.rule);
    s.projector = projector.description();
    DissipationLedger ledger;
    StepperConfig sc{c.scheme, dt, c.t_end, 1};

    std::ofstream traj, ref;
    std::ofstream field_index;
    if (write) {
        fs::create_directories(dir);
        traj = open_out(dir / "trajectory.csv");
        traj << trajectory_schema << "\n" << "t,E,Z,ledger,eps,retained\n";
        if (c.reference) {
            ref = open_out(dir / "reference.csv");
            ref << reference_schema << "\n" << "t,E_ref\n";
        }
        if (!c.field_times.empty()) {
            fs::create_directories(dir / "fields");
            field_index = open_out(dir / "fields" / "index.csv");
            field_index << field_schema << "\n" << "file,t\n";
        }
    }

    std::optional<ErrorAccumulator> err;
    if constexpr (Dim == 1)
        if (want_error) err.emplace(ErrorAccumulator::standard(dt));

    std::size_t next_field = 0;
    double e0 = 0.0;
    const std::size_t n_steps = step_count(dt, c.t_end);

    auto sink = [&](const StepView<Dim>& v) {
        // Ledger units: ||u||^2 in 1D, ||omega||^2 in 2D.
        const double q = energy(v.u);
        if (v.step == 0) e0 = q;
        s.max_audit = std::max(s.max_audit, std::abs(e0 - q - v.ledger.cumulative()));
        double e_out = 0.0, z_out = std::numeric_limits<double>::quiet_NaN();
        if constexpr (Dim == 1) {
            e_out = q;
        } else {
            e_out = kinetic_energy(v.u);
            z_out = enstrophy(v.u);
        }
        if (v.step == 0) s.initial_energy = e_out;
        s.max_energy_change = std::max(s.max_energy_change, std::abs(e_out - s.initial_energy));
        if constexpr (Dim == 1)
            if (err && (v.step % c.error_stride == 0 || v.step == n_steps)) err->add(v.t, v.u);
        if (!write) return;
        if (v.step % c.stride == 0 || v.step == n_steps) {
            const auto& st = v.projector.cvs_stats();
            traj << csv_number(v.t) << ',' << csv_number(e_out) << ',' << csv_number(z_out) << ','
                 << csv_number(v.ledger.cumulative()) << ',' << csv_number(st.epsilon) << ','
                 << csv_number(st.retained_fraction) << '\n';
            if (c.reference) ref << csv_number(v.t) << ',' << csv_number(oracle::analytic_energy(v.t)) << '\n';
        }
        while (next_field < c.field_times.size() &&
               (v.t >= c.field_times[next_field] - 1e-12 || v.step == n_steps)) {
            const std::string name = "field_" + std::to_string(next_field) + ".csv";
            write_field<Dim>(dir / "fields" / name, v.t, v.u);
            field_index << name << ',' << csv_number(v.t) << '\n';
            ++next_field;
        }
    };

    auto finish = [&](const SpectralField<Dim>* u) {
        s.ledger_total = ledger.cumulative();
        s.ledger_jump = ledger.total(tags::jump);
        s.ledger_rezero = ledger.total(tags::rezero);
        s.ledger_dealias = ledger.total(tags::dealias);
        s.ledger_entries = ledger.entries().size();
        if (u) {
            if constexpr (Dim == 1) {
                s.final_energy = energy(*u);
            } else {
                s.final_energy = kinetic_energy(*u);
                s.final_enstrophy = enstrophy(*u);
            }
        }
        if (write) {
            auto lo = open_out(dir / "ledger.csv");
            ledger.write_csv(lo);
        }
    };

    try {
        const auto u0 = initial_state<Dim>(c, grid);
        RunResult<Dim> res = [&] {
            if constexpr (Dim == 1) {
                const BurgersParams params{c.nu};
                return advance(u0, [&](const SpectralField<1>& u) { return burgers_rhs(u, params); }, projector, sc,
                               ledger, sink);
            } else {
                return advance(u0, [](const SpectralField<2>& w) { return euler2d_rhs(w); }, projector, sc, ledger,
                               sink);
            }
        }();
        s.steps = res.steps;
        if (res.first_jump) {
            s.first_jump = res.first_jump;
            s.delta = delta(res.initial_energy, res.first_jump->energy_after, res.first_jump->loss);
        }
        if (err) s.error_functional = err->value();
        if constexpr (Dim == 1)
            if (c.equation == Equation::Burgers1D && c.initial == InitialKind::Sine && c.nu == 0.0)
                s.analytic_final_energy = oracle::analytic_energy(c.t_end);
        finish(&res.u);
    } catch (const BlowUpError& e) {
        s.status = "error";
        s.error_kind = "blowup";
        s.message = e.what();
        s.error_time = e.time();
        finish(nullptr);
    }
    return s;
}

inline void write_json(const std::filesystem::path& p, const nlohmann::json& j) {
    auto os = open_out(p);
    os << j.dump(2) << '\n';
}

} // namespace scenario_detail

/// Executes one scenario. When `dir` is non-empty, writes trajectory.csv,
/// ledger.csv, summary.json (or error.json on blow-up) and optional fields/.
inline RunSummary run_scenario(const ScenarioConfig& c, const std::filesystem::path& dir = {}) {
    RunSummary s = c.equation == Equation::Burgers1D ? scenario_detail::run_dim<1>(c, dir)
                                                     : scenario_detail::run_dim<2>(c, dir);
    if (!dir.empty()) {
        const auto j = to_json(s);
        scenario_detail::write_json(dir / (s.ok() ? "summary.json" : "error.json"), j);
    }
    return s;
}

/// Worker count from DYNGAL_WORKERS (default: hardware concurrency).
inline unsigned worker_count() {
    if (const char* env = std::getenv("DYNGAL_WORKERS")) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end != env && *end == '\0' && v >= 1) return static_cast<unsigned>(v);
        throw ConfigurationError("DYNGAL_WORKERS must be a positive integer");
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

/// Cartesian expansion of the sweep axes into single-run configurations.
inline std::vector<ScenarioConfig> expand_sweep(const ScenarioConfig& base) {
    std::vector<std::size_t> ns = base.sweep_n.empty() ? std::vector<std::size_t>{base.n} : base.sweep_n;
    std::vector<ScenarioConfig> out;
    for (std::size_t n : ns) {
        auto member = base;
        member.n = n;
        member.sweep_n.clear();
        member.sweep_cfl.clear();
        member.sweep_dt.clear();
        if (member.k_cut && 3 * static_cast<std::size_t>(*member.k_cut) > n) member.k_cut.reset();
        if (!base.sweep_cfl.empty()) {
            for (double r : base.sweep_cfl) {
                auto m = member;
                m.cfl_ratio = r;
                m.dt.reset();
                out.push_back(m);
            }
        } else if (!base.sweep_dt.empty()) {
            for (double dt : base.sweep_dt) {
                auto m = member;
                m.dt = dt;
                out.push_back(m);
            }
        } else {
            out.push_back(member);
        }
    }
    for (std::size_t i = 0; i < out.size(); ++i) out[i].name = base.name + "_" + std::to_string(i);
    return out;
}

/// Runs every sweep member (in parallel across `workers`) and writes sweep.csv
/// with one row per member; failed members are marked and the sweep continues.
inline std::vector<RunSummary> run_sweep(const ScenarioConfig& base, const std::filesystem::path& dir = {},
                                         unsigned workers = 1) {
    const auto members = expand_sweep(base);
    std::vector<RunSummary> results(members.size());
    std::atomic<std::size_t> next{0};
    auto work = [&] {
        for (std::size_t i; (i = next.fetch_add(1)) < members.size();) {
            const auto sub = dir.empty() ? std::filesystem::path{} : dir / ("member_" + std::to_string(i));
            try {
                results[i] = run_scenario(members[i], sub);
            } catch (const std::exception& e) {
                RunSummary s;
                s.name = members[i].name;
                s.n = members[i].n;
                s.dt = members[i].time_step();
                s.cfl_ratio = members[i].dx() / s.dt;
                s.status = "error";
                s.error_kind = "exception";
                s.message = e.what();
                results[i] = s;
                if (!sub.empty()) {
                    std::filesystem::create_directories(sub);
                    scenario_detail::write_json(sub / "error.json", to_json(s));
                }
            }
        }
    };
    workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(members.size())));
    if (workers == 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
        for (auto& t : pool) t.join();
    }
    if (!dir.empty()) {
        std::filesystem::create_directories(dir);
        auto os = scenario_detail::open_out(dir / "sweep.csv");
        using scenario_detail::csv_number;
        auto opt = [](const std::optional<double>& v) { return csv_number(v ? *v : std::nan("")); };
        os << sweep_schema << "\n" << "n,dt,cfl,E_functional,delta,final_E,ledger,status\n";
        for (const auto& r : results)
            os << r.n << ',' << csv_number(r.dt) << ',' << csv_number(r.cfl_ratio) << ',' << opt(r.error_functional)
               << ',' << opt(r.delta) << ',' << csv_number(r.ok() ? r.final_energy : std::nan("")) << ','
               << csv_number(r.ledger_total) << ',' << r.status << '\n';
    }
    return results;
}

struct Preset {
    std::string name;
    std::string description;
    std::string ini;
};

/// Built-in scenarios for each figure, at desk scale.
inline const std::vector<Preset>& presets() {
    static const std::vector<Preset> list = {
        {"fig4_1a", "Burgers N=2048, Fourier mode k_f=2 removed on [0.16, 0.2): one energy step",
         "[scenario]\nname = fig4_1a\nn = 2048\nt_end = 0.3\n"
         "[projector]\nrule = fourier\nk_f = 2\nt_b = 0.16\nt_e = 0.2\n"},
        {"fig4_1b", "Burgers N=2048, Meyer coefficient (1,1) removed on [0.16, 0.2): one energy step",
         "[scenario]\nname = fig4_1b\nn = 2048\nt_end = 0.3\n"
         "[projector]\nrule = wavelet\nfamily = meyer\nj_f = 1\ni_f = 1\nt_b = 0.16\nt_e = 0.2\n"},
        {"fig4_2_fourier", "delta vs dt sweep, Fourier k_f=2",
         "[scenario]\nname = fig4_2_fourier\nn = 2048\nt_end = 0.17\n"
         "[projector]\nrule = fourier\nk_f = 2\nt_b = 0.16\nt_e = 0.2\n"
         "[sweep]\ncfl_ratio = 16, 32, 64, 128\n"},
        {"fig4_2_shannon", "delta vs dt sweep, Shannon coefficient (1,1)",
         "[scenario]\nname = fig4_2_shannon\nn = 2048\nt_end = 0.17\n"
         "[projector]\nrule = wavelet\nfamily = shannon\nj_f = 1\ni_f = 1\nt_b = 0.16\nt_e = 0.2\n"
         "[sweep]\ncfl_ratio = 16, 32, 64, 128\n"},
        {"fig4_2_meyer", "delta vs dt sweep, Meyer coefficient (1,1)",
         "[scenario]\nname = fig4_2_meyer\nn = 2048\nt_end = 0.17\n"
         "[projector]\nrule = wavelet\nfamily = meyer\nj_f = 1\ni_f = 1\nt_b = 0.16\nt_e = 0.2\n"
         "[sweep]\ncfl_ratio = 16, 32, 64, 128\n"},
        {"fig4_2_daubechies", "delta vs dt sweep, Daubechies-12 coefficient (0,0)",
         "[scenario]\nname = fig4_2_daubechies\nn = 2048\nt_end = 0.17\n"
         "[projector]\nrule = wavelet\nfamily = daubechies12\nj_f = 0\ni_f = 0\nt_b = 0.16\nt_e = 0.2\n"
         "[sweep]\ncfl_ratio = 16, 32, 64, 128\n"},
        {"fig5_1_galerkin", "Burgers N=16384, Galerkin truncated, snapshots at t = 0.1644, 0.1793, 0.3",
         "[scenario]\nname = fig5_1_galerkin\nn = 16384\nt_end = 0.3\n"
         "[output]\nstride = 64\nfield_times = 0.1644, 0.1793, 0.3\nerror_functional = off\n"},
        {"fig5_1_cvs", "Burgers N=16384, CVS Shannon q=8 with safety zone, snapshots at t = 0.1644, 0.1793, 0.3",
         "[scenario]\nname = fig5_1_cvs\nn = 16384\nt_end = 0.3\n"
         "[projector]\nrule = cvs\nfamily = shannon\nq = 8\nsafety = true\n"
         "[output]\nstride = 64\nfield_times = 0.1644, 0.1793, 0.3\nerror_functional = off\n"},
        {"fig5_2b", "error functional vs dx sweep, CVS Shannon q=8 with safety zone",
         "[scenario]\nname = fig5_2b\nt_end = 0.3\n"
         "[projector]\nrule = cvs\nfamily = shannon\nq = 8\nsafety = true\n"
         "[output]\nstride = 16\n"
         "[sweep]\nn = 1024, 2048, 4096, 8192\n"},
        {"fig5_2c", "error functional vs dx sweep, CVS Shannon q=8 without safety zone",
         "[scenario]\nname = fig5_2c\nt_end = 0.3\n"
         "[projector]\nrule = cvs\nfamily = shannon\nq = 8\nsafety = false\n"
         "[output]\nstride = 16\n"
         "[sweep]\nn = 1024, 2048, 4096, 8192\n"},
        {"fig5_3_safety", "Burgers N=2048 energy evolution, CVS Shannon q=8 with safety zone, with reference energy",
         "[scenario]\nname = fig5_3_safety\nn = 2048\nt_end = 0.3\n"
         "[projector]\nrule = cvs\nfamily = shannon\nq = 8\nsafety = true\n"
         "[output]\nstride = 8\nreference = true\n"},
        {"fig5_3_nosafety", "Burgers N=2048 energy evolution, CVS Shannon q=8 without safety zone",
         "[scenario]\nname = fig5_3_nosafety\nn = 2048\nt_end = 0.3\n"
         "[projector]\nrule = cvs\nfamily = shannon\nq = 8\nsafety = false\n"
         "[output]\nstride = 8\nreference = true\n"},
        {"fig5_4_galerkin", "2D Euler n=256 (qualitative stand-in for 1024^2), Galerkin truncated, enstrophy trace",
         "[scenario]\nname = fig5_4_galerkin\nequation = euler2d\nn = 256\ninitial = random\nseed = 1\n"
         "scheme = rk3ls\nt_end = 0.5\n"
         "[output]\nstride = 16\n"},
        {"fig5_4_cvs", "2D Euler n=256 (qualitative stand-in for 1024^2), CVS Shannon q=8 on vorticity",
         "[scenario]\nname = fig5_4_cvs\nequation = euler2d\nn = 256\ninitial = random\nseed = 1\n"
         "scheme = rk3ls\nt_end = 0.5\n"
         "[projector]\nrule = cvs\nfamily = shannon\nq = 8\nsafety = true\n"
         "[output]\nstride = 16\n"},
    };
    return list;
}

inline const Preset& find_preset(const std::string& name) {
    for (const auto& p : presets())
        if (p.name == name) return p;
    throw ConfigurationError("unknown preset '" + name + "'");
}

} // namespace dyngal
