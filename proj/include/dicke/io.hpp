// io.hpp: Scenario config files (JSON, frequencies in Hz), CSV trajectories and
// the JSON metadata sidecar.

#pragma once

#include <json.hpp>

#include <chrono>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "dicke/scenario.hpp"

namespace dicke {

using json = nlohmann::json;

// ------------------------------ Config parsing ------------------------------

namespace detail {

template <typename T>
T field(const json& obj, const char* key, const std::string& where) {
    try {
        return obj.at(key).get<T>();
    } catch (const json::exception& e) {
        throw ConfigError(where + "." + key + ": " + e.what());
    }
}

template <typename T>
void read_if(const json& obj, const char* key, T& out, const std::string& where) {
    if (obj.contains(key)) out = field<T>(obj, key, where);
}

inline void read_hz(const json& obj, const char* key, double& out, const std::string& where) {
    if (obj.contains(key)) out = kTwoPi * field<double>(obj, key, where);
}

inline void check_keys(const json& obj, std::initializer_list<const char*> allowed, const std::string& where) {
    if (!obj.is_object()) throw ConfigError(where + ": expected an object");
    for (const auto& [key, value] : obj.items()) {
        bool known = false;
        for (const char* a : allowed) known = known || key == a;
        if (!known) throw ConfigError(where + ": unknown field '" + key + "'");
    }
}

}  // namespace detail

// A scenario object may start from a preset ("preset": name) and override any
// field; otherwise it is built from defaults. Frequencies are in Hz.
inline ScenarioConfig scenario_from_json(const json& j) {
    using namespace detail;
    check_keys(j, {"name", "preset", "model", "ion", "noise", "fidelity_level", "initial_state", "grid", "cutoff",
                   "reference_noise", "output", "max_dim"},
               "config");
    ScenarioConfig cfg;
    if (j.contains("preset")) cfg = find_preset(field<std::string>(j, "preset", "config")).config;
    read_if(j, "name", cfg.name, "config");

    if (j.contains("model")) {
        const json& m = j.at("model");
        check_keys(m, {"kind", "n_qubits", "omega_hz", "omega_q_hz", "g_hz", "h_hz", "s"}, "model");
        if (m.contains("kind")) cfg.model.kind = model_kind_from_string(field<std::string>(m, "kind", "model"));
        read_if(m, "n_qubits", cfg.model.n_qubits, "model");
        read_hz(m, "omega_hz", cfg.model.omega, "model");
        read_hz(m, "omega_q_hz", cfg.model.omega_q, "model");
        read_hz(m, "g_hz", cfg.model.g, "model");
        read_hz(m, "h_hz", cfg.model.h, "model");
        read_if(m, "s", cfg.model.s, "model");
    }
    if (j.contains("ion")) {
        const json& i = j.at("ion");
        check_keys(i, {"nu_hz", "omega0_hz", "eta"}, "ion");
        read_hz(i, "nu_hz", cfg.ion.nu, "ion");
        read_hz(i, "omega0_hz", cfg.ion.omega0, "ion");
        read_if(i, "eta", cfg.ion.eta, "ion");
    }
    if (j.contains("noise")) {
        const json& n = j.at("noise");
        check_keys(n, {"gamma_hz"}, "noise");
        read_hz(n, "gamma_hz", cfg.ion.gamma, "noise");
    }
    if (j.contains("fidelity_level")) {
        cfg.fidelity_level = fidelity_level_from_string(field<std::string>(j, "fidelity_level", "config"));
    }
    if (j.contains("initial_state")) {
        const json& s = j.at("initial_state");
        check_keys(s, {"phonons", "spins", "dicke_excitations"}, "initial_state");
        read_if(s, "phonons", cfg.initial.phonons, "initial_state");
        if (s.contains("spins") && s.contains("dicke_excitations")) {
            throw ConfigError("initial_state: give either spins or dicke_excitations, not both");
        }
        if (s.contains("spins")) {
            cfg.initial.spins = field<std::string>(s, "spins", "initial_state");
            cfg.initial.dicke_excitations.reset();
        }
        if (s.contains("dicke_excitations")) {
            cfg.initial.dicke_excitations = field<int>(s, "dicke_excitations", "initial_state");
            cfg.initial.spins.clear();
        }
    }
    if (j.contains("grid")) {
        const json& g = j.at("grid");
        check_keys(g, {"gt_end_over_pi", "dt_seconds", "samples"}, "grid");
        if (g.contains("gt_end_over_pi")) {
            cfg.grid.gt_end_over_pi = field<double>(g, "gt_end_over_pi", "grid");
            cfg.grid.default_horizon = false;
        }
        if (g.contains("dt_seconds")) cfg.grid.dt = field<double>(g, "dt_seconds", "grid");
        read_if(g, "samples", cfg.grid.samples, "grid");
    }
    read_if(j, "cutoff", cfg.cutoff, "config");
    if (j.contains("reference_noise")) {
        cfg.reference_noise = reference_noise_from_string(field<std::string>(j, "reference_noise", "config"));
    }
    if (j.contains("output")) {
        const json& o = j.at("output");
        check_keys(o, {"path", "format"}, "output");
        read_if(o, "path", cfg.output_path, "output");
        if (o.contains("format") && field<std::string>(o, "format", "output") != "csv") {
            throw ConfigError("output.format: only 'csv' is supported");
        }
    }
    read_if(j, "max_dim", cfg.max_dim, "config");
    validate(cfg);
    return cfg;
}

inline json read_json_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path.string() + "'");
    try {
        return json::parse(in, nullptr, true, /*ignore_comments=*/true);
    } catch (const json::parse_error& e) {
        throw ConfigError("config file '" + path.string() + "': " + e.what());
    }
}

inline ScenarioConfig load_scenario(const std::filesystem::path& path) { return scenario_from_json(read_json_file(path)); }

// {"scenarios": [ ... ]}; every entry needs a distinct output path.
inline std::vector<ScenarioConfig> load_sweep(const std::filesystem::path& path) {
    const json j = read_json_file(path);
    if (!j.contains("scenarios") || !j.at("scenarios").is_array()) {
        throw ConfigError("sweep config: expected a 'scenarios' array");
    }
    std::vector<ScenarioConfig> out;
    for (const auto& s : j.at("scenarios")) out.push_back(scenario_from_json(s));
    for (std::size_t a = 0; a < out.size(); ++a) {
        if (out[a].output_path.empty()) out[a].output_path = out[a].name + ".csv";
        for (std::size_t b = 0; b < a; ++b)
            if (out[a].output_path == out[b].output_path) {
                throw ConfigError("sweep config: scenarios '" + out[b].name + "' and '" + out[a].name +
                                  "' share output path " + out[a].output_path);
            }
    }
    return out;
}

// --------------------------------- Output -----------------------------------

inline constexpr const char* kCsvHeader =
    "t_seconds,gt,phonon_ion,excitation_ion,parity_ion,sz_ion,phonon_model,excitation_model,parity_model,sz_model,"
    "fidelity";

namespace detail {

inline void put(std::string& line, double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);  // "C" locale in a fresh process
    line += buf;
}

}  // namespace detail

inline std::string trajectory_csv(const ScenarioResult& r) {
    std::string out = kCsvHeader;
    out += '\n';
    for (std::size_t k = 0; k < r.ion.samples.size(); ++k) {
        const auto& i = r.ion.samples[k];
        const auto& m = r.model.samples[k];
        std::string line;
        for (double v : {i.t, i.gt, i.phonon, i.excitation, i.parity, i.sz, m.phonon, m.excitation, m.parity, m.sz}) {
            detail::put(line, v);
            line += ',';
        }
        detail::put(line, i.fidelity.value_or(0.0));
        out += line;
        out += '\n';
    }
    return out;
}

inline json tone_json(const Tone& t) {
    return {{"kind", to_string(t.kind)},
            {"rabi_hz", t.rabi / kTwoPi},
            {"detuning_small_hz", t.detuning_small / kTwoPi},
            {"phase_rad", t.phase}};
}

// Everything except the "run" block is a function of the config alone.
inline json scenario_metadata(const ScenarioResult& r) {
    const ScenarioConfig& c = r.config;
    json tones = json::array();
    for (const auto& t : r.drive.tones) tones.push_back(tone_json(t));
    json lasers = {{"red_hz", r.drive.laser_red / kTwoPi}, {"blue_hz", r.drive.laser_blue / kTwoPi}};
    if (r.drive.laser_carrier) lasers["carrier_hz"] = *r.drive.laser_carrier / kTwoPi;

    json meta = {
        {"scenario", c.name},
        {"version", kVersion},
        {"model",
         {{"kind", to_string(c.model.kind)},
          {"n_qubits", c.model.n_qubits},
          {"omega_hz", c.model.omega / kTwoPi},
          {"omega_q_hz", c.model.omega_q / kTwoPi},
          {"g_hz", c.model.g / kTwoPi},
          {"h_hz", c.model.h / kTwoPi},
          {"s", c.model.s}}},
        {"ion",
         {{"nu_hz", c.ion.nu / kTwoPi}, {"omega0_hz", c.ion.omega0 / kTwoPi}, {"eta", c.ion.eta}}},
        {"noise", {{"gamma_hz", c.ion.gamma / kTwoPi}, {"lindblad", "per-qubit sigma_z dephasing"}}},
        {"collective_dephasing",
         {{"factor", collective_dephasing_factor(c.model.n_qubits)},
          {"note", "coherences between fully polarized states decay at N times the single-qubit rate"}}},
        {"reference_noise", to_string(c.reference_noise)},
        {"tones", tones},
        {"laser_frequencies", lasers},
        {"fidelity_level", to_string(c.fidelity_level)},
        {"initial_state",
         c.initial.dicke_excitations
             ? json{{"phonons", c.initial.phonons}, {"dicke_excitations", *c.initial.dicke_excitations}}
             : json{{"phonons", c.initial.phonons}, {"spins", c.initial.spins}}},
        {"cutoff", c.cutoff},
        {"hilbert_dim", r.space.dim()},
        {"max_top_fock_population", r.top_fock_population},
        {"grid",
         {{"t_end_seconds", r.t_end},
          {"gt_end_over_pi", c.grid.gt_end_over_pi},
          {"horizon_is_default", c.grid.default_horizon},
          {"dt_seconds", r.grid.dt()},
          {"dt_recommended_seconds", r.recommended_dt},
          {"dt_overridden", c.grid.dt.has_value()},
          {"steps", r.grid.total_steps()},
          {"samples", r.grid.sample_count()}}},
        {"stretch_mode", {{"probability", r.stretch_mode.probability}, {"bound", kStretchModeBound}}},
        {"warnings", r.warnings},
    };
    if (c.model.omega > 0.0) {
        meta["regime"] = {{"label", to_string(r.regime.label)},
                          {"ratio", r.regime.ratio},
                          {"thresholds", {{"usc", kUscThreshold}, {"dsc", kDscThreshold}}}};
    }
    return meta;
}

inline std::filesystem::path sidecar_path(const std::filesystem::path& csv) {
    std::filesystem::path p = csv;
    p.replace_extension(".meta.json");
    return p;
}

inline std::string utc_timestamp() {
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

// Writes the CSV and its sidecar. The CSV is byte-identical across runs of the
// same config; timestamps and timings live only in the sidecar's "run" block.
inline void write_outputs(const ScenarioResult& r, const std::filesystem::path& csv_path) {
    if (csv_path.has_parent_path()) std::filesystem::create_directories(csv_path.parent_path());
    {
        std::ofstream out(csv_path, std::ios::binary);
        if (!out) throw ConfigError("cannot write output file '" + csv_path.string() + "'");
        out << trajectory_csv(r);
    }
    json meta = scenario_metadata(r);
    meta["run"] = {{"timestamp_utc", utc_timestamp()}, {"wall_seconds", r.wall_seconds}};
    std::ofstream side(sidecar_path(csv_path), std::ios::binary);
    if (!side) throw ConfigError("cannot write metadata file '" + sidecar_path(csv_path).string() + "'");
    side << meta.dump(2) << '\n';
}

inline json convergence_json(const ConvergenceReport& rep) {
    json refinements = json::array();
    for (const auto& r : rep.refinements) {
        json cols = json::object();
        for (const auto& [name, v] : r.max_change) cols[name] = v;
        refinements.push_back({{"name", r.name},
                               {"dt_seconds", r.dt},
                               {"cutoff", r.cutoff},
                               {"max_abs_change", cols},
                               {"worst", r.worst},
                               {"passed", r.passed},
                               {"wall_seconds", r.wall_seconds}});
    }
    return {{"scenario", rep.scenario},
            {"base_dt_seconds", rep.base_dt},
            {"base_cutoff", rep.base_cutoff},
            {"base_wall_seconds", rep.base_wall_seconds},
            {"refinement_wall_seconds", rep.refinement_wall_seconds},
            {"tolerance", rep.tolerance},
            {"refinements", refinements},
            {"passed", rep.passed}};
}

}  // namespace dicke
