// dyngal: command-line runner for dynamical Galerkin experiments.
//
//   dyngal run <config.ini> [--set section.key=value]... [--out DIR]
//   dyngal sweep <config.ini> [--set ...]... [--out DIR] [--workers N]
//   dyngal preset <name> [--set ...]... [--out DIR] [--print]
//   dyngal list-presets
//
// Exit status: 0 success, 1 failed run (blow-up, failed sweep member), 2 bad configuration.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "dyngal/scenario.hpp"

namespace fs = std::filesystem;

namespace {

struct Options {
    std::string config;
    std::string preset;
    std::vector<std::string> overrides;
    std::string out;
    unsigned workers = 0;
    bool print = false;
};

void write_error(const fs::path& dir, const std::string& kind, const std::string& message) {
    const nlohmann::json j = {{"schema", dyngal::summary_schema},
                              {"status", "error"},
                              {"error", {{"kind", kind}, {"message", message}, {"t", nullptr}}}};
    std::error_code ec;
    fs::create_directories(dir, ec);
    std::ofstream os(dir / "error.json");
    if (os) os << j.dump(2) << '\n';
}

void print_summary(const dyngal::RunSummary& s, const fs::path& dir) {
    std::cout << s.name << ": " << s.status << "  n=" << s.n << " dt=" << s.dt << " steps=" << s.steps
              << " E(end)=" << s.final_energy << " ledger=" << s.ledger_total;
    if (s.delta) std::cout << " delta=" << *s.delta;
    if (s.error_functional) std::cout << " E_functional=" << *s.error_functional;
    if (!s.ok()) std::cout << "  (" << s.message << ")";
    std::cout << "\n  -> " << dir.string() << "\n";
}

int execute(dyngal::ScenarioConfig cfg, const Options& opt, bool sweep) {
    const fs::path dir = opt.out.empty() ? fs::path(cfg.output_dir) : fs::path(opt.out);
    if (!sweep) {
        const auto s = dyngal::run_scenario(cfg, dir);
        print_summary(s, dir);
        return s.ok() ? 0 : 1;
    }
    const unsigned workers = opt.workers ? opt.workers : dyngal::worker_count();
    const auto results = dyngal::run_sweep(cfg, dir, workers);
    bool ok = true;
    for (std::size_t i = 0; i < results.size(); ++i) {
        print_summary(results[i], dir / ("member_" + std::to_string(i)));
        ok = ok && results[i].ok();
    }
    std::cout << "sweep table: " << (dir / "sweep.csv").string() << "\n";
    return ok ? 0 : 1;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Dynamical Galerkin projection experiments (Burgers 1D, Euler 2D)"};
    app.require_subcommand(1);
    Options opt;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--set", opt.overrides, "Override a config key: section.key=value")->allow_extra_args(false);
        sub->add_option("--out", opt.out, "Output directory (overrides output.dir)");
    };

    auto* run = app.add_subcommand("run", "Run one scenario");
    run->add_option("config", opt.config, "Scenario INI file")->required();
    add_common(run);

    auto* sweep = app.add_subcommand("sweep", "Run the cartesian sweep of a scenario");
    sweep->add_option("config", opt.config, "Scenario INI file")->required();
    sweep->add_option("--workers", opt.workers, "Parallel runs (default: DYNGAL_WORKERS or core count)");
    add_common(sweep);

    auto* preset = app.add_subcommand("preset", "Run a built-in figure preset");
    preset->add_option("name", opt.preset, "Preset name (see list-presets)")->required();
    preset->add_option("--workers", opt.workers, "Parallel runs for sweep presets");
    preset->add_flag("--print", opt.print, "Print the preset's INI text and exit");
    add_common(preset);

    auto* list = app.add_subcommand("list-presets", "List built-in presets");

    CLI11_PARSE(app, argc, argv);

    if (list->parsed()) {
        for (const auto& p : dyngal::presets()) std::cout << p.name << "\t" << p.description << "\n";
        return 0;
    }

    const fs::path fallback_dir = opt.out.empty() ? fs::path("out") : fs::path(opt.out);
    try {
        if (preset->parsed()) {
            const auto& p = dyngal::find_preset(opt.preset);
            if (opt.print) {
                std::cout << p.ini;
                return 0;
            }
            auto cfg = dyngal::parse_config_text(p.ini, opt.overrides);
            if (opt.out.empty()) opt.out = (fs::path("runs") / p.name).string();
            return execute(cfg, opt, cfg.has_sweep());
        }
        auto cfg = dyngal::load_config(opt.config, opt.overrides);
        if (run->parsed() && cfg.has_sweep())
            throw dyngal::ConfigurationError("config has [sweep] axes; use 'dyngal sweep'");
        return execute(cfg, opt, sweep->parsed());
    } catch (const dyngal::ConfigurationError& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        write_error(fallback_dir, "configuration", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        write_error(fallback_dir, "runtime", e.what());
        return 1;
    }
}
