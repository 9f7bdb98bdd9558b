// mapping.hpp: Conversion between ion drive tones and Dicke-family model parameters,
// coupling-regime classification and error-budget estimates.

#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "dicke/ionsim.hpp"
#include "dicke/models.hpp"

namespace dicke {

inline constexpr double kSidebandPhase = -kPi / 2.0;
inline constexpr double kCarrierPhase = 0.0;

struct DriveSet {
    std::vector<Tone> tones;  // red, blue, then carrier when biased
    // Absolute laser frequencies ω⁰ + Δ (rad/s), informational.
    double laser_red{0.0};
    double laser_blue{0.0};
    std::optional<double> laser_carrier;
};

// g = Ω^r η/2, s = Ω^b/Ω^r, h = Ω^c/2, δ^r = ω − ω_q, δ^b = −(ω + ω_q), δ^c = −ω_q,
// φ^r = φ^b = −π/2, φ^c = 0. If `rabi_red` is given it must agree with 2g/η.
inline DriveSet tones_from_model(const ModelSpec& spec, const IonParams& ion,
                                 std::optional<double> rabi_red = std::nullopt) {
    validate(spec);
    validate(ion);
    if (spec.omega < 0.0 || spec.omega_q < 0.0) {
        throw ConfigError("tones_from_model: negative model frequencies cannot be mapped");
    }
    const double omega_r = 2.0 * spec.g / ion.eta;
    if (rabi_red) {
        if (!(*rabi_red > 0.0)) throw ConfigError("tones_from_model: rabi_red must be > 0");
        if (std::abs(*rabi_red - omega_r) > 1e-12 * omega_r) {
            throw ConfigError("tones_from_model: rabi_red inconsistent with g = rabi_red * eta / 2");
        }
    }

    DriveSet out;
    const Tone red{ToneKind::red, omega_r, spec.omega - spec.omega_q, kSidebandPhase};
    const Tone blue{ToneKind::blue, spec.s * omega_r, -(spec.omega + spec.omega_q), kSidebandPhase};
    out.tones = {red, blue};
    out.laser_red = ion.omega0 + laser_detuning(red, ion.nu);
    out.laser_blue = ion.omega0 + laser_detuning(blue, ion.nu);
    if (spec.kind == ModelKind::biased) {
        const Tone carrier{ToneKind::carrier, 2.0 * spec.h, -spec.omega_q, kCarrierPhase};
        out.tones.push_back(carrier);
        out.laser_carrier = ion.omega0 + laser_detuning(carrier, ion.nu);
    }
    return out;
}

// Inverse of tones_from_model: ω = (δ^r − δ^b)/2, ω_q = −(δ^r + δ^b)/2.
inline ModelSpec model_from_tones(const std::vector<Tone>& tones, const IonParams& ion, int n_qubits) {
    validate(ion);
    const Tone* red = nullptr;
    const Tone* blue = nullptr;
    const Tone* carrier = nullptr;
    for (const Tone& t : tones) {
        if (t.kind == ToneKind::red) red = &t;
        if (t.kind == ToneKind::blue) blue = &t;
        if (t.kind == ToneKind::carrier) carrier = &t;
    }
    if (!red || !blue) throw ConfigError("model_from_tones: both red and blue sideband tones are required");
    if (!(red->rabi > 0.0)) throw ConfigError("model_from_tones: red Rabi frequency must be > 0");
    if (!(blue->rabi >= 0.0)) throw ConfigError("model_from_tones: blue Rabi frequency must be >= 0");
    auto check_phase = [](const Tone& t, double expected) {
        if (std::abs(t.phase - expected) > 1e-12) {
            throw ConfigError("model_from_tones: " + to_string(t.kind) + " phase does not match the model mapping");
        }
    };
    check_phase(*red, kSidebandPhase);
    check_phase(*blue, kSidebandPhase);

    ModelSpec spec;
    spec.n_qubits = n_qubits;
    spec.omega = 0.5 * (red->detuning_small - blue->detuning_small);
    spec.omega_q = -0.5 * (red->detuning_small + blue->detuning_small);
    spec.g = 0.5 * red->rabi * ion.eta;
    spec.s = blue->rabi / red->rabi;
    if (carrier) {
        check_phase(*carrier, kCarrierPhase);
        if (spec.s != 1.0) throw ConfigError("model_from_tones: carrier tone requires equal sideband Rabi frequencies");
        spec.kind = ModelKind::biased;
        spec.h = 0.5 * carrier->rabi;
        if (std::abs(carrier->detuning_small + spec.omega_q) > 1e-12 * std::max(1.0, spec.omega_q)) {
            throw ConfigError("model_from_tones: carrier detuning must equal -omega_q");
        }
    } else if (spec.s == 0.0) {
        spec.kind = ModelKind::tavis_cummings;
    } else if (spec.s == 1.0) {
        spec.kind = ModelKind::dicke;
    } else {
        spec.kind = ModelKind::anisotropic;
    }
    validate(spec);
    return spec;
}

// ------------------------------- Regimes ------------------------------------

enum class Regime { WF, USC, DSC };

inline std::string to_string(Regime r) {
    switch (r) {
        case Regime::WF: return "WF";
        case Regime::USC: return "USC";
        case Regime::DSC: return "DSC";
    }
    return "?";
}

inline constexpr double kUscThreshold = 0.1;
inline constexpr double kDscThreshold = 1.0;

struct RegimeLabel {
    Regime label{Regime::WF};
    double ratio{0.0};  // max(g, s·g) / ω
};

inline RegimeLabel classify_regime(const ModelSpec& spec) {
    if (!(spec.omega > 0.0)) throw ConfigError("classify_regime: omega must be > 0");
    const double r = std::max(spec.g, spec.s * spec.g) / spec.omega;
    Regime label = Regime::WF;
    if (r >= kDscThreshold)
        label = Regime::DSC;
    else if (r >= kUscThreshold)
        label = Regime::USC;
    return {label, r};
}

// ----------------------------- Error budget --------------------------------

inline constexpr double kStretchModeBound = 1e-4;

struct StretchModeEstimate {
    double probability{0.0};
    bool exceeds_bound{false};
};

// Off-resonant stretch-mode excitation probability (√N η Ω / ((√3 − 1) ν))².
inline StretchModeEstimate stretch_mode_error(const IonParams& ion, double rabi, int n_qubits) {
    if (!(ion.nu > 0.0)) throw ConfigError("stretch_mode_error: nu must be > 0");
    const double amp = std::sqrt(static_cast<double>(n_qubits)) * ion.eta * rabi / ((std::sqrt(3.0) - 1.0) * ion.nu);
    const double p = amp * amp;
    return {p, p >= kStretchModeBound};
}

// Collective dephasing scales coherence decay with N² instead of N; for the
// qubit counts simulated here the correction factor is N (at most 3).
inline double collective_dephasing_factor(int n_qubits) { return static_cast<double>(n_qubits); }

}  // namespace dicke
