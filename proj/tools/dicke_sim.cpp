// dicke_sim.cpp: Command-line scenario runner: run, presets, converge, sweep.

#include <CLI11.hpp>

#include <cstdio>
#include <exception>
#include <iostream>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "dicke/dicke.hpp"

namespace {

using namespace dicke;

struct RunOptions {
    std::string preset;
    std::string config;
    std::string fidelity_level;
    std::optional<int> cutoff;
    std::optional<double> dt;
    std::optional<double> gt_end;
    std::string out;
};

ScenarioConfig resolve(const RunOptions& o) {
    if (o.preset.empty() == o.config.empty()) throw ConfigError("give exactly one of --preset or --config");
    ScenarioConfig cfg = o.preset.empty() ? load_scenario(o.config) : find_preset(o.preset).config;
    if (!o.fidelity_level.empty()) cfg.fidelity_level = fidelity_level_from_string(o.fidelity_level);
    if (o.cutoff) cfg.cutoff = *o.cutoff;
    if (o.dt) cfg.grid.dt = *o.dt;
    if (o.gt_end) {
        cfg.grid.gt_end_over_pi = *o.gt_end;
        cfg.grid.default_horizon = false;
    }
    if (!o.out.empty()) cfg.output_path = o.out;
    if (cfg.output_path.empty()) cfg.output_path = cfg.name + ".csv";
    validate(cfg);
    return cfg;
}

void report(const ScenarioResult& r, std::ostream& os) {
    os << r.config.name << ": " << r.grid.total_steps() << " steps of " << r.grid.dt() << " s, "
       << r.grid.sample_count() << " samples, " << r.wall_seconds << " s -> " << r.config.output_path << '\n';
    for (const auto& w : r.warnings) os << "  warning: " << w << '\n';
}

int cmd_run(const RunOptions& o) {
    const ScenarioConfig cfg = resolve(o);
    const ScenarioResult r = run_scenario(cfg);
    write_outputs(r, cfg.output_path);
    report(r, std::cout);
    return exit_code::success;
}

int cmd_presets() {
    std::printf("%-18s %2s %-14s %-7s %12s %12s %10s %6s %10s %10s %10s %9s %6s %7s\n", "name", "N", "kind",
                "regime", "delta_r/2pi", "delta_b/2pi", "Omega/2pi", "s", "h/(Oe/2)", "omega/2pi", "omega_q/2pi",
                "g/2pi", "cutoff", "gt/pi");
    for (const auto& p : presets()) {
        const auto& c = p.config;
        std::printf("%-18s %2d %-14s %-7s %12.6g %12.6g %10.6g %6.3g %10.3g %10.6g %10.6g %9.6g %6d %7.3g\n",
                    c.name.c_str(), c.model.n_qubits, to_string(c.model.kind).c_str(),
                    to_string(p.expected_regime).c_str(), p.delta_r_hz, p.delta_b_hz, p.rabi_hz, c.model.s,
                    p.h_over_rabi_eta, c.model.omega / kTwoPi, c.model.omega_q / kTwoPi, c.model.g / kTwoPi, c.cutoff,
                    c.grid.gt_end_over_pi);
    }
    const auto& c = presets().front().config;
    std::printf("common: nu/2pi = %.6g Hz, Omega/2pi = %.6g Hz, eta = %.3g, Gamma/2pi = %.6g Hz (Omega*eta/100)\n",
                c.ion.nu / kTwoPi, presets().front().rabi_hz, c.ion.eta, c.ion.gamma / kTwoPi);
    return exit_code::success;
}

int cmd_converge(const std::string& preset) {
    const ConvergenceReport rep = convergence_check(find_preset(preset).config);
    std::cout << convergence_json(rep).dump(2) << '\n';
    return rep.passed ? exit_code::success : exit_code::numerical_failure;
}

int classify(const std::exception_ptr& e) {
    try {
        std::rethrow_exception(e);
    } catch (const MemoryGuardError&) {
        return exit_code::memory_guard;
    } catch (const ConfigError&) {
        return exit_code::config_error;
    } catch (const std::logic_error&) {  // out-of-range states, malformed inputs
        return exit_code::config_error;
    } catch (...) {
        return exit_code::numerical_failure;
    }
}

// One worker per scenario; each writes only its own files.
int cmd_sweep(const std::string& path) {
    const std::vector<ScenarioConfig> configs = load_sweep(path);
    std::vector<std::exception_ptr> errors(configs.size());
    std::mutex io;
    std::vector<std::thread> workers;
    for (std::size_t k = 0; k < configs.size(); ++k) {
        workers.emplace_back([&, k] {
            try {
                const ScenarioResult r = run_scenario(configs[k]);
                write_outputs(r, configs[k].output_path);
                const std::lock_guard lock(io);
                report(r, std::cout);
            } catch (...) {
                errors[k] = std::current_exception();
            }
        });
    }
    for (auto& w : workers) w.join();
    int code = exit_code::success;
    for (std::size_t k = 0; k < configs.size(); ++k) {
        if (!errors[k]) continue;
        try {
            std::rethrow_exception(errors[k]);
        } catch (const std::exception& e) {
            std::cerr << "error: " << configs[k].name << ": " << e.what() << '\n';
        }
        if (code == exit_code::success) code = classify(errors[k]);
    }
    return code;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Trapped-ion analog simulation of generalized Dicke models"};
    app.set_version_flag("--version", std::string(kVersion));
    app.require_subcommand(1);

    RunOptions run_opts;
    auto* run = app.add_subcommand("run", "Run one scenario and write CSV + metadata");
    auto* preset_opt = run->add_option("--preset", run_opts.preset, "Built-in preset name");
    auto* config_opt = run->add_option("--config", run_opts.config, "Scenario config file (JSON)")->check(CLI::ExistingFile);
    preset_opt->excludes(config_opt);
    run->add_option("--fidelity-level", run_opts.fidelity_level, "full | sideband_rwa")
        ->check(CLI::IsMember({"full", "sideband_rwa"}));
    run->add_option("--cutoff", run_opts.cutoff, "Fock cutoff");
    run->add_option("--dt", run_opts.dt, "Integration step (seconds)");
    run->add_option("--gt-end", run_opts.gt_end, "Horizon g*t_end in units of pi");
    run->add_option("--out", run_opts.out, "Output CSV path");

    app.add_subcommand("presets", "List built-in presets");

    std::string converge_preset;
    auto* converge = app.add_subcommand("converge", "Check dt and cutoff convergence of a preset");
    converge->add_option("--preset", converge_preset, "Preset name")->required();

    std::string sweep_config;
    auto* sweep = app.add_subcommand("sweep", "Run several scenarios concurrently");
    sweep->add_option("--config", sweep_config, "Sweep config file (JSON)")->required()->check(CLI::ExistingFile);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? exit_code::success : exit_code::config_error;
    }

    try {
        if (*run) return cmd_run(run_opts);
        if (app.got_subcommand("presets")) return cmd_presets();
        if (*converge) return cmd_converge(converge_preset);
        if (*sweep) return cmd_sweep(sweep_config);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return classify(std::current_exception());
    }
    return exit_code::success;
}
