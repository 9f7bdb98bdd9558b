#include <catch_amalgamated.hpp>

#include "dicke/io.hpp"
#include "dicke/scenario.hpp"

using namespace dicke;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

ScenarioConfig short_run(const std::string& preset, double gt_end_over_pi, int samples = 51) {
    ScenarioConfig cfg = find_preset(preset).config;
    cfg.grid.gt_end_over_pi = gt_end_over_pi;
    cfg.grid.default_horizon = false;
    cfg.grid.samples = samples;
    return cfg;
}

}  // namespace

TEST_CASE("preset table", "[scenario]") {
    CHECK(presets().size() == 10);
    const std::vector<std::string> names{"dicke3_wf",        "dicke3_usc",   "biased2_wf_h_g", "biased2_wf_h_5g",
                                         "biased2_usc_h_g",  "biased2_usc_h_5g", "anis2_usc_s3", "anis2_usc_s5",
                                         "anis2_dsc_s3",     "anis2_dsc_s5"};
    for (std::size_t k = 0; k < names.size(); ++k) CHECK(presets()[k].config.name == names[k]);
    const Preset& s5 = find_preset("anis2_dsc_s5");
    CHECK(s5.delta_r_hz == -187.0);
    CHECK(s5.delta_b_hz == -12063.0);
    const double rabi_eta_half = kTwoPi * 50e3 * 0.05 / 2.0;
    CHECK_THAT(find_preset("biased2_wf_h_g").config.model.h, WithinRel(rabi_eta_half, 1e-14));
    CHECK_THAT(find_preset("biased2_usc_h_5g").config.model.h, WithinRel(5.0 * rabi_eta_half, 1e-14));
    for (const auto& p : presets()) {
        CHECK(p.config.ion.nu == kTwoPi * 3e6);
        CHECK(p.config.ion.eta == 0.05);
        const bool s3 = p.config.name.ends_with("_s3");
        CHECK(p.config.cutoff == (s3 ? 40 : p.expected_regime == Regime::WF ? 8 : 20));
        CHECK(p.config.grid.gt_end_over_pi == (p.expected_regime == Regime::WF ? 4.0 : 20.0));
        CHECK(p.config.fidelity_level == FidelityLevel::sideband_rwa);
        CHECK(p.config.initial.phonons == 1);
    }
    CHECK_THROWS_AS(find_preset("dicke4"), ConfigError);
}

TEST_CASE("scenario validation", "[scenario]") {
    ScenarioConfig cfg = find_preset("dicke3_wf").config;
    cfg.grid.gt_end_over_pi = 0.0;
    CHECK_THROWS_AS(validate(cfg), ConfigError);
    cfg = find_preset("dicke3_wf").config;
    cfg.initial.phonons = 9;
    CHECK_THROWS_AS(validate(cfg), ConfigError);
    cfg = find_preset("dicke3_wf").config;
    cfg.max_dim = 16;
    CHECK_THROWS_AS(run_scenario(cfg), MemoryGuardError);
    CHECK(reference_noise_from_string("dephasing") == ReferenceNoise::dephasing);
    CHECK_THROWS_AS(reference_noise_from_string("loud"), ConfigError);
}

TEST_CASE("initial states", "[scenario]") {
    ScenarioConfig cfg = find_preset("dicke3_wf").config;
    const auto s = make_space(3, cfg.cutoff);
    CHECK(max_abs(initial_state(cfg, s).vector() - basis_state(s, 1, "ddd").vector()) == 0.0);
    cfg.initial.dicke_excitations = 1;
    cfg.initial.phonons = 0;
    CHECK(max_abs(initial_state(cfg, s).vector() - dicke_state(s, 1, 0).vector()) == 0.0);
}

TEST_CASE("paired run basics", "[scenario]") {
    const ScenarioResult r = run_scenario(short_run("biased2_wf_h_g", 0.5));
    REQUIRE(r.ion.samples.size() == 51);
    REQUIRE(r.model.samples.size() == 51);
    CHECK_THAT(*r.ion.samples.front().fidelity, WithinAbs(1.0, 1e-8));
    CHECK(r.ion.samples.front().excitation == 1.0);
    CHECK(r.ion.samples.front().parity == -1.0);
    CHECK_THAT(r.ion.samples.back().gt, WithinRel(0.5 * kPi, 1e-12));
    CHECK(r.grid.dt() <= r.recommended_dt);
    CHECK(r.regime.label == Regime::WF);
    for (const auto& x : r.ion.samples) {
        CHECK(*x.fidelity <= 1.0);
        CHECK(*x.fidelity > 0.9);  // Γ·t_end ≈ 0.005 over this horizon
    }
}

TEST_CASE("unitary reference conserves parity in the plain model", "[scenario]") {
    const ScenarioResult r = run_scenario(short_run("dicke3_usc", 2.0));
    for (const auto& x : r.model.samples) CHECK_THAT(x.parity, WithinAbs(-1.0, 1e-6));
}

TEST_CASE("dephasing reference matches the ion at sideband level", "[scenario]") {
    ScenarioConfig cfg = short_run("anis2_usc_s3", 1.0, 21);
    cfg.reference_noise = ReferenceNoise::dephasing;
    const ScenarioResult r = run_scenario(cfg);
    for (const auto& x : r.ion.samples) CHECK_THAT(*x.fidelity, WithinAbs(1.0, 1e-8));
}

TEST_CASE("identical configs give identical trajectories", "[scenario]") {
    const ScenarioConfig cfg = short_run("anis2_dsc_s5", 0.5, 26);
    CHECK(trajectory_csv(run_scenario(cfg)) == trajectory_csv(run_scenario(cfg)));
}

TEST_CASE("convergence check", "[scenario]") {
    const ScenarioConfig cfg = short_run("dicke3_wf", 1.0);
    const ConvergenceReport ok = convergence_check(cfg);
    REQUIRE(ok.refinements.size() == 2);
    CHECK(ok.refinements[0].name == "halve_dt");
    CHECK_THAT(ok.refinements[0].dt, WithinRel(ok.base_dt / 2.0, 1e-14));
    CHECK(ok.refinements[1].cutoff == cfg.cutoff + 5);
    CHECK(ok.refinements[0].worst < 1e-4);
    CHECK(ok.passed);

    const ConvergenceReport strict = convergence_check(cfg, {true, 0}, 1e-9);
    REQUIRE(strict.refinements.size() == 1);
    CHECK_FALSE(strict.passed);

    // RK4 refuses steps far beyond the stability-safe rule instead of returning garbage.
    ScenarioConfig coarse = cfg;
    coarse.grid.dt = 10.0 * ok.base_dt;
    CHECK_THROWS_AS(run_scenario(coarse), NumericalError);
}

TEST_CASE("Fock truncation is reported", "[scenario]") {
    const ScenarioResult ok = run_scenario(short_run("dicke3_wf", 0.5));
    CHECK(ok.top_fock_population < 1e-12);
    CHECK(ok.warnings.empty());

    // One phonon plus the coupling into n = 2 saturates a cutoff of 2.
    ScenarioConfig tight = short_run("dicke3_wf", 0.5);
    tight.cutoff = 2;
    const ScenarioResult r = run_scenario(tight);
    CHECK(r.top_fock_population > kTruncationWarning);
    REQUIRE(r.warnings.size() == 1);
    CHECK(r.warnings.front().find("raise the cutoff") != std::string::npos);
    CHECK(scenario_metadata(r)["max_top_fock_population"] == r.top_fock_population);
}
