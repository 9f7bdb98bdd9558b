// models.hpp: Dicke-family Hamiltonians (plain, biased, anisotropic, Tavis-Cummings),
// parity and number operators, and Dicke / product basis states.

#pragma once

#include <bit>
#include <cmath>
#include <string>
#include <string_view>
#include <vector>

#include "dicke/algebra.hpp"
#include "dicke/hamiltonian.hpp"

namespace dicke {

enum class ModelKind { dicke, biased, anisotropic, tavis_cummings };

inline std::string to_string(ModelKind k) {
    switch (k) {
        case ModelKind::dicke: return "dicke";
        case ModelKind::biased: return "biased";
        case ModelKind::anisotropic: return "anisotropic";
        case ModelKind::tavis_cummings: return "tavis_cummings";
    }
    return "?";
}

inline ModelKind model_kind_from_string(std::string_view s) {
    if (s == "dicke") return ModelKind::dicke;
    if (s == "biased") return ModelKind::biased;
    if (s == "anisotropic") return ModelKind::anisotropic;
    if (s == "tavis_cummings") return ModelKind::tavis_cummings;
    throw ConfigError("unknown model kind '" + std::string(s) + "'");
}

// All frequencies are angular (rad/s).
struct ModelSpec {
    ModelKind kind{ModelKind::dicke};
    int n_qubits{1};
    double omega{0.0};    // boson mode
    double omega_q{0.0};  // qubit splitting
    double g{0.0};        // rotating (Tavis-Cummings) coupling
    double h{0.0};        // transverse bias
    double s{1.0};        // counter-rotating weight relative to g
};

inline void validate(const ModelSpec& spec) {
    auto fail = [](const std::string& msg) { throw ConfigError("ModelSpec: " + msg); };
    if (spec.n_qubits < 1) fail("n_qubits must be >= 1");
    if (!(spec.g >= 0.0)) fail("g must be >= 0");
    if (!(spec.h >= 0.0)) fail("h must be >= 0");
    if (!(spec.s >= 0.0)) fail("s must be >= 0");
    if (!std::isfinite(spec.omega) || !std::isfinite(spec.omega_q)) fail("frequencies must be finite");
    switch (spec.kind) {
        case ModelKind::dicke:
            if (spec.h != 0.0 || spec.s != 1.0) fail("kind dicke requires h = 0 and s = 1");
            break;
        case ModelKind::tavis_cummings:
            if (spec.h != 0.0 || spec.s != 0.0) fail("kind tavis_cummings requires h = 0 and s = 0");
            break;
        case ModelKind::biased:
            if (spec.s != 1.0) fail("kind biased requires s = 1");
            break;
        case ModelKind::anisotropic:
            if (spec.h != 0.0) fail("kind anisotropic requires h = 0");
            break;
    }
}

enum class Picture { static_frame, interaction };

// Static:      ω a†a + (ω_q/2) Σz + g(aΣ⁺ + H.c.) + s·g(a†Σ⁺ + H.c.) + h Σx
// Interaction: g(aΣ⁺ e^{i(ω_q−ω)t} + H.c.) + s·g(a†Σ⁺ e^{i(ω_q+ω)t} + H.c.) + h(Σ⁺ e^{iω_q t} + H.c.)
inline TimeDependentHamiltonian build_model(const ModelSpec& spec, const HilbertSpace& space, Picture picture) {
    validate(spec);
    if (spec.n_qubits != space.n_qubits) {
        throw ConfigError("build_model: spec has " + std::to_string(spec.n_qubits) + " qubits, space has " +
                          std::to_string(space.n_qubits));
    }
    const auto [a, a_dag] = ladder(space);
    const Operator sigma_plus = collective_spin(space, SpinOp::sigma_plus);
    const Operator a_sp = a * sigma_plus;
    const Operator adag_sp = a_dag * sigma_plus;
    const double sg = spec.s * spec.g;

    TimeDependentHamiltonian h(space);
    if (picture == Picture::static_frame) {
        h.add_static(a_dag * a, spec.omega, "omega a+a");
        h.add_static(collective_spin(space, SpinOp::sigma_z), 0.5 * spec.omega_q, "omega_q/2 Sz");
        h.add_rotating(a_sp, spec.g, 0.0, "g a S+");
        if (sg != 0.0) h.add_rotating(adag_sp, sg, 0.0, "s g a+ S+");
        if (spec.h != 0.0) h.add_static(collective_spin(space, SpinOp::sigma_x), spec.h, "h Sx");
    } else {
        h.add_rotating(a_sp, spec.g, spec.omega_q - spec.omega, "g a S+");
        if (sg != 0.0) h.add_rotating(adag_sp, sg, spec.omega_q + spec.omega, "s g a+ S+");
        if (spec.h != 0.0) h.add_rotating(sigma_plus, spec.h, spec.omega_q, "h S+");
    }
    return h;
}

// ------------------------------ Observables --------------------------------

inline int spin_ups(unsigned spins) { return static_cast<int>(std::popcount(spins)); }

// n̂ = a†a + Σ_m |↑_m⟩⟨↑_m|
inline Operator excitation_number(const HilbertSpace& space) {
    return diagonal_operator(space, [&](Eigen::Index i) {
        return cplx{static_cast<double>(space.phonons_of(i) + spin_ups(space.spins_of(i))), 0.0};
    });
}

inline Operator phonon_number(const HilbertSpace& space) {
    return diagonal_operator(space, [&](Eigen::Index i) { return cplx{static_cast<double>(space.phonons_of(i)), 0.0}; });
}

// S^z = Σ_m σ_m^z / 2
inline Operator spin_z(const HilbertSpace& space) {
    return diagonal_operator(space, [&](Eigen::Index i) {
        return cplx{spin_ups(space.spins_of(i)) - 0.5 * space.n_qubits, 0.0};
    });
}

// P = exp(iπ n̂); n̂ has integer spectrum so entries are exactly ±1.
inline Operator parity_operator(const HilbertSpace& space) {
    return diagonal_operator(space, [&](Eigen::Index i) {
        const int n = space.phonons_of(i) + spin_ups(space.spins_of(i));
        return cplx{(n % 2 == 0) ? 1.0 : -1.0, 0.0};
    });
}

// --------------------------------- States ----------------------------------

// Normalized symmetric superposition of all C(N,k) configurations with k up
// spins, tensored with Fock level `phonons`.
inline QuantumState dicke_state(const HilbertSpace& space, int excitations, int phonons) {
    if (excitations < 0 || excitations > space.n_qubits) {
        throw std::out_of_range("dicke_state: excitations " + std::to_string(excitations) + " outside [0, N]");
    }
    if (phonons < 0 || phonons > space.fock_cutoff) {
        throw std::out_of_range("dicke_state: phonons " + std::to_string(phonons) + " outside [0, cutoff]");
    }
    std::vector<unsigned> configs;
    for (unsigned s = 0; s < static_cast<unsigned>(space.qubit_dim()); ++s)
        if (spin_ups(s) == excitations) configs.push_back(s);
    const double amp = 1.0 / std::sqrt(static_cast<double>(configs.size()));
    Vector psi = Vector::Zero(space.dim());
    for (unsigned s : configs) psi(space.index(phonons, s)) = amp;
    return QuantumState::pure(space, std::move(psi));
}

// Parses spin strings such as "↓↓↑", "ddu" or "DDU" (qubit 1 first).
inline std::vector<bool> parse_spins(std::string_view text) {
    std::vector<bool> ups;
    for (std::size_t i = 0; i < text.size();) {
        const char c = text[i];
        if (c == 'u' || c == 'U' || c == '1') {
            ups.push_back(true);
            ++i;
        } else if (c == 'd' || c == 'D' || c == '0') {
            ups.push_back(false);
            ++i;
        } else if (text.substr(i, 3) == "\xE2\x86\x91") {  // ↑
            ups.push_back(true);
            i += 3;
        } else if (text.substr(i, 3) == "\xE2\x86\x93") {  // ↓
            ups.push_back(false);
            i += 3;
        } else if (c == ',' || c == ' ') {
            ++i;
        } else {
            throw ConfigError("cannot parse spin string '" + std::string(text) + "'");
        }
    }
    return ups;
}

inline QuantumState basis_state(const HilbertSpace& space, int phonons, std::string_view spins) {
    const auto ups = parse_spins(spins);
    if (static_cast<int>(ups.size()) != space.n_qubits) {
        throw ConfigError("basis_state: spin string has " + std::to_string(ups.size()) + " qubits, space has " +
                          std::to_string(space.n_qubits));
    }
    if (phonons < 0 || phonons > space.fock_cutoff) {
        throw ConfigError("basis_state: phonon number " + std::to_string(phonons) + " outside [0, cutoff]");
    }
    unsigned s = 0;
    for (int m = 1; m <= space.n_qubits; ++m)
        if (ups[static_cast<std::size_t>(m - 1)]) s |= space.qubit_bit(m);
    Vector psi = Vector::Zero(space.dim());
    psi(space.index(phonons, s)) = 1.0;
    return QuantumState::pure(space, std::move(psi));
}

}  // namespace dicke
