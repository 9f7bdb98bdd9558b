// ionsim.hpp: Trapped-ion drive Hamiltonians in the interaction picture of
// ν a†a + ω⁰ Σz/2, after the optical RWA and to first order in the Lamb-Dicke
// parameter. Two fidelity levels:
//   full          every tone contributes (Ω/2)Σ⁺e^{i(φ−Δt)}[1 + iη(a e^{−iνt} + a†e^{iνt})] + H.c.,
//                 off-resonant terms included
//   sideband_rwa  only the slow carrier / red / blue resonant pieces survive

#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <string_view>
#include <vector>

#include "dicke/algebra.hpp"
#include "dicke/hamiltonian.hpp"

namespace dicke {

struct IonParams {
    double nu{kTwoPi * 3.0e6};       // trap frequency (rad/s)
    double omega0{kTwoPi * 1.0e14};  // optical transition; informational only, never integrated
    double eta{0.05};                // Lamb-Dicke parameter
    double gamma{0.0};               // dephasing rate Γ (rad/s)
};

// Throws ConfigError on hard violations; returns soft warnings.
inline std::vector<std::string> validate(const IonParams& ion) {
    if (!(ion.nu > 0.0)) throw ConfigError("IonParams: nu must be > 0");
    if (!(ion.eta > 0.0) || ion.eta > 0.2) throw ConfigError("IonParams: eta must lie in (0, 0.2]");
    if (!(ion.gamma >= 0.0)) throw ConfigError("IonParams: gamma must be >= 0");
    std::vector<std::string> warnings;
    if (ion.eta > 0.1) warnings.push_back("eta > 0.1: first-order Lamb-Dicke expansion is marginal");
    return warnings;
}

enum class ToneKind { carrier, red, blue };

inline std::string to_string(ToneKind k) {
    switch (k) {
        case ToneKind::carrier: return "carrier";
        case ToneKind::red: return "red";
        case ToneKind::blue: return "blue";
    }
    return "?";
}

struct Tone {
    ToneKind kind{ToneKind::carrier};
    double rabi{0.0};            // Ω (rad/s)
    double detuning_small{0.0};  // δ of this resonance (rad/s)
    double phase{0.0};           // φ (rad)
};

// Offset of the laser detuning from the resonance: Δ = offset + δ.
inline double sideband_offset(ToneKind kind, double nu) {
    switch (kind) {
        case ToneKind::carrier: return 0.0;
        case ToneKind::red: return -nu;
        case ToneKind::blue: return nu;
    }
    return 0.0;
}

// Δ = ω_L − ω⁰
inline double laser_detuning(const Tone& tone, double nu) { return sideband_offset(tone.kind, nu) + tone.detuning_small; }

enum class FidelityLevel { full, sideband_rwa };

inline std::string to_string(FidelityLevel l) { return l == FidelityLevel::full ? "full" : "sideband_rwa"; }

inline FidelityLevel fidelity_level_from_string(std::string_view s) {
    if (s == "full") return FidelityLevel::full;
    if (s == "sideband_rwa") return FidelityLevel::sideband_rwa;
    throw ConfigError("unknown fidelity level '" + std::string(s) + "'");
}

namespace detail {

inline void check_tones(const std::vector<Tone>& tones) {
    if (tones.empty()) throw ConfigError("ion_hamiltonian: tone list is empty");
    for (std::size_t i = 0; i < tones.size(); ++i) {
        if (!(tones[i].rabi >= 0.0)) throw ConfigError("ion_hamiltonian: negative Rabi frequency");
        for (std::size_t j = i + 1; j < tones.size(); ++j)
            if (tones[i].kind == tones[j].kind)
                throw ConfigError("ion_hamiltonian: duplicate " + to_string(tones[i].kind) + " tone");
    }
}

inline cplx unit_phase(double phi) { return {std::cos(phi), std::sin(phi)}; }

}  // namespace detail

inline TimeDependentHamiltonian ion_hamiltonian(const IonParams& ion, const std::vector<Tone>& tones,
                                                const HilbertSpace& space, FidelityLevel level) {
    validate(ion);
    detail::check_tones(tones);
    const auto [a, a_dag] = ladder(space);
    const Operator sigma_plus = collective_spin(space, SpinOp::sigma_plus);
    const Operator a_sp = a * sigma_plus;
    const Operator adag_sp = a_dag * sigma_plus;
    const cplx i_unit{0.0, 1.0};

    TimeDependentHamiltonian h(space);
    for (const Tone& tone : tones) {
        const std::string name = to_string(tone.kind);
        const cplx drive = 0.5 * tone.rabi * detail::unit_phase(tone.phase);       // (Ω/2)e^{iφ}
        const cplx sideband = i_unit * (0.5 * tone.rabi * ion.eta) * detail::unit_phase(tone.phase);  // i(Ωη/2)e^{iφ}
        const double delta = tone.detuning_small;

        if (level == FidelityLevel::sideband_rwa) {
            switch (tone.kind) {
                case ToneKind::carrier: h.add_rotating(sigma_plus, drive, -delta, "carrier S+"); break;
                case ToneKind::red: h.add_rotating(a_sp, sideband, -delta, "red a S+"); break;
                case ToneKind::blue: h.add_rotating(adag_sp, sideband, -delta, "blue a+ S+"); break;
            }
            continue;
        }

        // Envelope frequencies: −Δ for the bare term, −Δ ∓ ν for the a / a† terms.
        // Written as −δ − (offset ± ν) so the resonant combination is exactly −δ.
        const double offset = sideband_offset(tone.kind, ion.nu);
        h.add_rotating(sigma_plus, drive, -delta - offset, name + ": S+");
        h.add_rotating(a_sp, sideband, -delta - (offset + ion.nu), name + ": a S+");
        h.add_rotating(adag_sp, sideband, -delta - (offset - ion.nu), name + ": a+ S+");
    }
    return h;
}

// Step satisfying ≥ 40 points per period of the fastest envelope.
// full: ω_max = 2ν + max|Δ|; sideband_rwa: ω_max = max|δ|.
// With no oscillating envelope the step falls back to t_total / 1000.
inline double recommended_timestep(const IonParams& ion, const std::vector<Tone>& tones, FidelityLevel level,
                                   double t_total) {
    double w_max = 0.0;
    for (const Tone& tone : tones) {
        if (level == FidelityLevel::full)
            w_max = std::max(w_max, 2.0 * ion.nu + std::abs(laser_detuning(tone, ion.nu)));
        else
            w_max = std::max(w_max, std::abs(tone.detuning_small));
    }
    if (w_max == 0.0) return t_total / 1000.0;
    return kTwoPi / (40.0 * w_max);
}

// Same rule applied to an arbitrary Hamiltonian, where the fastest scale also
// includes the coupling strength ‖H‖ (dominant for large Fock cutoffs).
inline double recommended_timestep(const TimeDependentHamiltonian& h, double t_total) {
    const double w_max = std::max(h.max_frequency(), h.norm_bound());
    if (w_max == 0.0) return t_total / 1000.0;
    return kTwoPi / (40.0 * w_max);
}

}  // namespace dicke
