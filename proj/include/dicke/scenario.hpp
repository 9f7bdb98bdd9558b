// scenario.hpp: Paired ion/model scenario runs, built-in presets and the
// convergence check.
//
// A scenario maps a Dicke-family model onto ion drive tones, evolves the ion
// system (master equation with dephasing Γ) and the model reference in the same
// interaction frame on one time grid, and measures both at every sample.

#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <future>
#include <optional>
#include <string>
#include <thread>
#include <variant>
#include <vector>

#include "dicke/dynamics.hpp"
#include "dicke/ionsim.hpp"
#include "dicke/mapping.hpp"
#include "dicke/models.hpp"
#include "dicke/observables.hpp"
#include "dicke/version.hpp"

namespace dicke {

enum class ReferenceNoise { unitary, dephasing };

inline std::string to_string(ReferenceNoise r) { return r == ReferenceNoise::unitary ? "unitary" : "dephasing"; }

inline ReferenceNoise reference_noise_from_string(std::string_view s) {
    if (s == "unitary") return ReferenceNoise::unitary;
    if (s == "dephasing") return ReferenceNoise::dephasing;
    throw ConfigError("unknown reference_noise '" + std::string(s) + "'");
}

struct InitialStateSpec {
    int phonons{1};
    std::string spins;                     // empty: all qubits down
    std::optional<int> dicke_excitations;  // symmetric Dicke state instead of `spins`
};

struct GridSpec {
    double gt_end_over_pi{4.0};  // horizon g·t_end in units of π
    bool default_horizon{true};
    std::optional<double> dt;  // seconds; default from the step rule
    int samples{500};
};

inline constexpr int kDefaultCutoffWeak = 8;
inline constexpr int kDefaultCutoffStrong = 20;
inline constexpr double kDefaultHorizonWeak = 4.0;
inline constexpr double kDefaultHorizonStrong = 20.0;

struct ScenarioConfig {
    std::string name{"custom"};
    ModelSpec model;
    IonParams ion;  // ion.gamma is the ion-system dephasing rate
    FidelityLevel fidelity_level{FidelityLevel::sideband_rwa};
    InitialStateSpec initial;
    GridSpec grid;
    int cutoff{kDefaultCutoffWeak};
    ReferenceNoise reference_noise{ReferenceNoise::unitary};
    std::string output_path;
    std::size_t max_dim{kDefaultMaxDim};
};

inline void validate(const ScenarioConfig& cfg) {
    validate(cfg.model);
    validate(cfg.ion);
    if (!(cfg.model.g > 0.0)) throw ConfigError("scenario '" + cfg.name + "': model g must be > 0 (horizon is in units of g·t)");
    if (!(cfg.grid.gt_end_over_pi > 0.0)) throw ConfigError("scenario '" + cfg.name + "': gt_end must be > 0");
    if (cfg.grid.samples < 2) throw ConfigError("scenario '" + cfg.name + "': samples must be >= 2");
    if (cfg.grid.dt && !(*cfg.grid.dt > 0.0)) throw ConfigError("scenario '" + cfg.name + "': dt must be > 0");
    if (cfg.cutoff < 1) throw ConfigError("scenario '" + cfg.name + "': cutoff must be >= 1");
    if (cfg.initial.phonons < 0 || cfg.initial.phonons > cfg.cutoff) {
        throw ConfigError("scenario '" + cfg.name + "': initial phonon number outside [0, cutoff]");
    }
}

// -------------------------------- Presets -----------------------------------

struct Preset {
    ScenarioConfig config;
    double delta_r_hz{0.0};
    double delta_b_hz{0.0};
    double rabi_hz{0.0};       // Ω (or Ω^r)
    double h_over_rabi_eta{0.0};  // h in units of Ωη/2
    Regime expected_regime{Regime::WF};
};

namespace detail {

inline Preset make_preset(std::string name, int n_qubits, double delta_r_hz, double delta_b_hz,
                          double s, double h_units, Regime regime, std::optional<int> cutoff = {}) {
    IonParams ion;
    ion.nu = kTwoPi * 3.0e6;
    ion.omega0 = kTwoPi * 1.0e14;
    ion.eta = 0.05;
    const double rabi = kTwoPi * 50.0e3;
    ion.gamma = rabi * ion.eta / 100.0;

    const double delta_r = kTwoPi * delta_r_hz;
    const double delta_b = kTwoPi * delta_b_hz;
    std::vector<Tone> tones{{ToneKind::red, rabi, delta_r, kSidebandPhase},
                            {ToneKind::blue, s * rabi, delta_b, kSidebandPhase}};
    if (h_units > 0.0) {
        const double omega_q = -0.5 * (delta_r + delta_b);
        const double h = h_units * rabi * ion.eta / 2.0;
        tones.push_back({ToneKind::carrier, 2.0 * h, -omega_q, kCarrierPhase});
    }

    Preset p;
    p.config.name = std::move(name);
    p.config.ion = ion;
    p.config.model = model_from_tones(tones, ion, n_qubits);
    const bool weak = regime == Regime::WF;
    p.config.cutoff = cutoff.value_or(weak ? kDefaultCutoffWeak : kDefaultCutoffStrong);
    p.config.grid.gt_end_over_pi = weak ? kDefaultHorizonWeak : kDefaultHorizonStrong;
    p.config.initial.phonons = 1;
    p.delta_r_hz = delta_r_hz;
    p.delta_b_hz = delta_b_hz;
    p.rabi_hz = 50.0e3;
    p.h_over_rabi_eta = h_units;
    p.expected_regime = regime;
    return p;
}

}  // namespace detail

// Common constants: ν = 2π×3 MHz, ω⁰ = 2π×10¹⁴ Hz, Ω^r = 2π×50 kHz, η = 0.05, Γ = Ωη/100.
inline const std::vector<Preset>& presets() {
    static const std::vector<Preset> table = [] {
        using detail::make_preset;
        return std::vector<Preset>{
            make_preset("dicke3_wf", 3, 0.0, -125.0e3, 1.0, 0.0, Regime::WF),
            make_preset("dicke3_usc", 3, -100.0, -2700.0, 1.0, 0.0, Regime::USC),
            make_preset("biased2_wf_h_g", 2, 0.0, -125.0e3, 1.0, 1.0, Regime::WF),
            make_preset("biased2_wf_h_5g", 2, 0.0, -125.0e3, 1.0, 5.0, Regime::WF),
            make_preset("biased2_usc_h_g", 2, -100.0, -2700.0, 1.0, 1.0, Regime::USC),
            make_preset("biased2_usc_h_5g", 2, -100.0, -2700.0, 1.0, 5.0, Regime::USC),
            // The dephased s = 3 runs spread over more Fock levels; 40 passes the
            // cutoff + 5 convergence check over the default horizon.
            make_preset("anis2_usc_s3", 2, -100.0, -7700.0, 3.0, 0.0, Regime::USC, 40),
            make_preset("anis2_usc_s5", 2, -100.0, -12700.0, 5.0, 0.0, Regime::USC),
            make_preset("anis2_dsc_s3", 2, -112.0, -7238.0, 3.0, 0.0, Regime::DSC, 40),
            make_preset("anis2_dsc_s5", 2, -187.0, -12063.0, 5.0, 0.0, Regime::DSC),
        };
    }();
    return table;
}

inline const Preset& find_preset(std::string_view name) {
    for (const auto& p : presets())
        if (p.config.name == name) return p;
    throw ConfigError("unknown preset '" + std::string(name) + "'");
}

// ------------------------------- Execution ----------------------------------

inline QuantumState initial_state(const ScenarioConfig& cfg, const HilbertSpace& space) {
    if (cfg.initial.dicke_excitations) return dicke_state(space, *cfg.initial.dicke_excitations, cfg.initial.phonons);
    const std::string spins = cfg.initial.spins.empty() ? std::string(static_cast<std::size_t>(space.n_qubits), 'd')
                                                        : cfg.initial.spins;
    return basis_state(space, cfg.initial.phonons, spins);
}

// Unitary or master-equation propagation behind one stepping interface.
// Γ = 0 uses the state-vector integrator; the two are equivalent then.
class Evolver {
public:
    Evolver(const TimeDependentHamiltonian& h, double gamma, const QuantumState& psi0, const TimeGrid& grid)
        : prop_(make(h, gamma, psi0, grid)) {}

    void advance() {
        std::visit([](auto& p) { p.advance(); }, prop_);
    }
    [[nodiscard]] bool done() const {
        return std::visit([](const auto& p) { return p.done(); }, prop_);
    }
    [[nodiscard]] double time() const {
        return std::visit([](const auto& p) { return p.time(); }, prop_);
    }
    [[nodiscard]] QuantumState state() const {
        return std::visit([](const auto& p) { return p.state(); }, prop_);
    }

private:
    using Variant = std::variant<UnitaryPropagator, LindbladPropagator>;

    static Variant make(const TimeDependentHamiltonian& h, double gamma, const QuantumState& psi0, const TimeGrid& grid) {
        if (gamma > 0.0) return Variant(std::in_place_type<LindbladPropagator>, h, NoiseSpec{gamma}, psi0, grid);
        return Variant(std::in_place_type<UnitaryPropagator>, h, psi0, grid);
    }

    Variant prop_;
};

struct ScenarioResult {
    ScenarioConfig config;
    HilbertSpace space;
    DriveSet drive;
    RegimeLabel regime;
    StretchModeEstimate stretch_mode;
    std::vector<std::string> warnings;
    double t_end{0.0};
    double recommended_dt{0.0};
    TimeGrid grid{1.0, 1.0, 2};
    Trajectory ion;
    Trajectory model;
    double top_fock_population{0.0};  // max over samples and both runs of P(n = cutoff)
    double wall_seconds{0.0};
};

// Population of the highest retained Fock level above which the truncation is
// reported as a warning.
inline constexpr double kTruncationWarning = 1e-4;

namespace detail {

// Step used when the config does not override it: the finest of the tone rule
// and the Hamiltonian rule for both the ion drive and the model reference.
inline double default_timestep(const ScenarioConfig& cfg, const DriveSet& drive, const TimeDependentHamiltonian& ion_h,
                               const TimeDependentHamiltonian& model_h, double t_end) {
    return std::min({recommended_timestep(cfg.ion, drive.tones, cfg.fidelity_level, t_end),
                     recommended_timestep(ion_h, t_end), recommended_timestep(model_h, t_end)});
}

}  // namespace detail

// Called at every sample with the ion and model states, for checks that need
// more than the recorded observables.
using SampleObserver = std::function<void(int sample, const QuantumState& ion, const QuantumState& model)>;

inline ScenarioResult run_scenario(const ScenarioConfig& cfg, const SampleObserver& observer = {}) {
    const auto start = std::chrono::steady_clock::now();
    validate(cfg);
    ScenarioResult r;
    r.config = cfg;
    r.space = make_space(cfg.model.n_qubits, cfg.cutoff, cfg.max_dim);
    r.warnings = validate(cfg.ion);
    r.drive = tones_from_model(cfg.model, cfg.ion);
    if (cfg.model.omega > 0.0) r.regime = classify_regime(cfg.model);
    double max_rabi = 0.0;
    for (const auto& t : r.drive.tones) max_rabi = std::max(max_rabi, t.rabi);
    r.stretch_mode = stretch_mode_error(cfg.ion, max_rabi, cfg.model.n_qubits);
    if (r.stretch_mode.exceeds_bound) r.warnings.push_back("stretch-mode excitation probability exceeds 1e-4");

    r.t_end = cfg.grid.gt_end_over_pi * kPi / cfg.model.g;
    const TimeDependentHamiltonian ion_h = ion_hamiltonian(cfg.ion, r.drive.tones, r.space, cfg.fidelity_level);
    const TimeDependentHamiltonian model_h = build_model(cfg.model, r.space, Picture::interaction);
    r.recommended_dt = detail::default_timestep(cfg, r.drive, ion_h, model_h, r.t_end);
    r.grid = TimeGrid(r.t_end, cfg.grid.dt.value_or(r.recommended_dt), cfg.grid.samples);
    if (r.grid.dt() > r.recommended_dt * (1.0 + 1e-12)) {
        r.warnings.push_back("time step exceeds the recommended step; results may be inaccurate");
    }

    const QuantumState psi0 = initial_state(cfg, r.space);
    const double model_gamma = cfg.reference_noise == ReferenceNoise::dephasing ? cfg.ion.gamma : 0.0;
    Evolver ion(ion_h, cfg.ion.gamma, psi0, r.grid);
    Evolver model(model_h, model_gamma, psi0, r.grid);
    const ObservableSet obs(r.space);
    Eigen::VectorXd top_level = Eigen::VectorXd::Zero(r.space.dim());
    for (Eigen::Index i = 0; i < r.space.dim(); ++i)
        if (r.space.phonons_of(i) == cfg.cutoff) top_level(i) = 1.0;
    auto top_population = [&](const QuantumState& st) {
        return st.is_pure() ? st.vector().cwiseAbs2().dot(top_level) : st.matrix().diagonal().real().dot(top_level);
    };

    const TrajectoryMetadata meta{cfg.name, to_string(cfg.fidelity_level), cfg.cutoff, r.grid.dt(), kVersion};
    r.ion.metadata = meta;
    r.model.metadata = meta;
    const auto n = static_cast<std::size_t>(r.grid.sample_count());
    r.ion.samples.reserve(n);
    r.model.samples.reserve(n);

    auto record = [&] {
        const QuantumState ion_state = ion.state();
        const QuantumState model_state = model.state();
        ObservableSample si = obs.measure(ion.time(), cfg.model.g, ion_state);
        si.fidelity = fidelity(model_state, ion_state);
        r.ion.samples.push_back(si);
        r.model.samples.push_back(obs.measure(model.time(), cfg.model.g, model_state));
        r.top_fock_population = std::max({r.top_fock_population, top_population(ion_state), top_population(model_state)});
        if (observer) observer(static_cast<int>(r.ion.samples.size()) - 1, ion_state, model_state);
    };
    try {
        record();
        while (!ion.done()) {
            ion.advance();
            model.advance();
            record();
        }
    } catch (const NumericalError& e) {
        throw NumericalError("scenario '" + cfg.name + "': " + e.what());
    }
    if (r.top_fock_population > kTruncationWarning) {
        char buf[160];
        std::snprintf(buf, sizeof buf, "Fock level n = %d (the cutoff) reaches population %.2g; raise the cutoff",
                      cfg.cutoff, r.top_fock_population);
        r.warnings.emplace_back(buf);
    }
    r.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return r;
}

// ------------------------------ Convergence ---------------------------------

inline constexpr double kConvergenceTolerance = 1e-3;

struct ConvergenceFactors {
    bool halve_dt{true};
    int raise_cutoff_by{5};  // 0 disables
};

struct RefinementReport {
    std::string name;  // "halve_dt" or "raise_cutoff"
    double dt{0.0};
    int cutoff{0};
    std::vector<std::pair<std::string, double>> max_change;  // per observable column
    double worst{0.0};
    bool passed{false};
    double wall_seconds{0.0};
};

struct ConvergenceReport {
    std::string scenario;
    double base_dt{0.0};
    int base_cutoff{0};
    double base_wall_seconds{0.0};
    double refinement_wall_seconds{0.0};  // elapsed time of the concurrent refinement runs
    double tolerance{kConvergenceTolerance};
    std::vector<RefinementReport> refinements;
    bool passed{false};
};

namespace detail {

inline std::vector<std::pair<std::string, double>> max_abs_changes(const ScenarioResult& a, const ScenarioResult& b) {
    if (a.ion.samples.size() != b.ion.samples.size()) throw std::invalid_argument("convergence: sample grids differ");
    std::vector<std::pair<std::string, double>> out{{"phonon_ion", 0.0},   {"excitation_ion", 0.0}, {"parity_ion", 0.0},
                                                    {"sz_ion", 0.0},       {"phonon_model", 0.0},   {"excitation_model", 0.0},
                                                    {"parity_model", 0.0}, {"sz_model", 0.0},       {"fidelity", 0.0}};
    auto upd = [](double& slot, double x, double y) { slot = std::max(slot, std::abs(x - y)); };
    for (std::size_t k = 0; k < a.ion.samples.size(); ++k) {
        const auto& ai = a.ion.samples[k];
        const auto& bi = b.ion.samples[k];
        const auto& am = a.model.samples[k];
        const auto& bm = b.model.samples[k];
        upd(out[0].second, ai.phonon, bi.phonon);
        upd(out[1].second, ai.excitation, bi.excitation);
        upd(out[2].second, ai.parity, bi.parity);
        upd(out[3].second, ai.sz, bi.sz);
        upd(out[4].second, am.phonon, bm.phonon);
        upd(out[5].second, am.excitation, bm.excitation);
        upd(out[6].second, am.parity, bm.parity);
        upd(out[7].second, am.sz, bm.sz);
        upd(out[8].second, ai.fidelity.value_or(0.0), bi.fidelity.value_or(0.0));
    }
    return out;
}

}  // namespace detail

// Reruns the scenario once per refinement factor and reports the largest
// absolute change of every observable column against the base run.
inline ConvergenceReport convergence_check(const ScenarioConfig& cfg, const ConvergenceFactors& factors = {},
                                           double tolerance = kConvergenceTolerance) {
    const ScenarioResult base = run_scenario(cfg);
    ConvergenceReport report;
    report.scenario = cfg.name;
    report.base_dt = base.grid.dt();
    report.base_cutoff = cfg.cutoff;
    report.base_wall_seconds = base.wall_seconds;
    report.tolerance = tolerance;

    auto rerun = [&base, tolerance](std::string name, ScenarioConfig refined) {
        const ScenarioResult res = run_scenario(refined);
        RefinementReport rr;
        rr.name = std::move(name);
        rr.dt = res.grid.dt();
        rr.cutoff = refined.cutoff;
        rr.max_change = detail::max_abs_changes(base, res);
        for (const auto& [col, v] : rr.max_change) rr.worst = std::max(rr.worst, v);
        rr.passed = rr.worst < tolerance;
        rr.wall_seconds = res.wall_seconds;
        return rr;
    };

    // The refinements are independent runs; with more than one hardware
    // thread they execute concurrently.
    const auto policy = std::thread::hardware_concurrency() > 1 ? std::launch::async : std::launch::deferred;
    const auto start = std::chrono::steady_clock::now();
    std::vector<std::future<RefinementReport>> jobs;
    if (factors.halve_dt) {
        ScenarioConfig refined = cfg;
        refined.grid.dt = base.grid.dt() / 2.0;
        jobs.push_back(std::async(policy, rerun, "halve_dt", refined));
    }
    if (factors.raise_cutoff_by > 0) {
        ScenarioConfig refined = cfg;
        refined.grid.dt = base.grid.dt();
        refined.cutoff = cfg.cutoff + factors.raise_cutoff_by;
        jobs.push_back(std::async(policy, rerun, "raise_cutoff", refined));
    }
    for (auto& job : jobs) report.refinements.push_back(job.get());
    report.refinement_wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    report.passed = std::all_of(report.refinements.begin(), report.refinements.end(),
                                [](const RefinementReport& r) { return r.passed; });
    return report;
}

}  // namespace dicke
