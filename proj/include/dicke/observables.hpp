// observables.hpp: Expectation values, Jozsa fidelity and per-sample trajectory observables.

#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "dicke/algebra.hpp"
#include "dicke/dynamics.hpp"
#include "dicke/models.hpp"

namespace dicke {

inline double expectation(const Operator& op, const QuantumState& state) {
    require_same_space(op.space, state.space(), "expectation");
    if (!op.hermitian(1e-9)) throw std::invalid_argument("expectation: operator is not Hermitian");
    cplx value;
    if (state.is_pure()) {
        const Vector& psi = state.vector();
        value = psi.dot(op.matrix * psi);  // dot() conjugates the left operand
    } else {
        value = op.matrix.cwiseProduct(state.matrix().transpose()).sum();
    }
    if (std::abs(value.imag()) >= 1e-7) {
        throw NumericalError("expectation: imaginary residue " + std::to_string(value.imag()) + " >= 1e-7");
    }
    return value.real();
}

// F(ρ, σ) = (Tr √(√ρ σ √ρ))². Pure arguments use the equivalent closed forms
// |⟨ψ|φ⟩|² and ⟨ψ|σ|ψ⟩.
inline double fidelity(const QuantumState& reference, const QuantumState& actual) {
    require_same_space(reference.space(), actual.space(), "fidelity");
    reference.validate();
    actual.validate();
    double f = 0.0;
    if (reference.is_pure() && actual.is_pure()) {
        f = std::norm(reference.vector().dot(actual.vector()));
    } else if (reference.is_pure() || actual.is_pure()) {
        const Vector& psi = reference.is_pure() ? reference.vector() : actual.vector();
        const Matrix& rho = reference.is_pure() ? actual.matrix() : reference.matrix();
        f = psi.dot(rho * psi).real();
    } else {
        const Matrix root = detail::psd_sqrt(reference.matrix());
        Matrix inner = root * actual.matrix() * root;
        inner = (0.5 * (inner + inner.adjoint())).eval();
        Eigen::SelfAdjointEigenSolver<Matrix> solver(inner, Eigen::EigenvaluesOnly);
        const Eigen::VectorXd& ev = solver.eigenvalues();
        if (ev.minCoeff() < -1e-7) throw NumericalError("fidelity: intermediate matrix not PSD");
        const double trace_root = ev.cwiseMax(0.0).cwiseSqrt().sum();
        f = trace_root * trace_root;
    }
    if (f > 1.0 + 1e-7 || f < -1e-7) {
        throw NumericalError("fidelity: value " + std::to_string(f) + " outside [0, 1] beyond 1e-7");
    }
    return std::clamp(f, 0.0, 1.0);
}

// ------------------------------ Trajectories --------------------------------

struct ObservableSample {
    double t{0.0};
    double gt{0.0};
    double phonon{0.0};
    double excitation{0.0};
    double parity{0.0};
    double sz{0.0};
    std::optional<double> fidelity;
};

struct TrajectoryMetadata {
    std::string scenario;
    std::string fidelity_level;
    int cutoff{0};
    double dt{0.0};
    std::string version;
};

struct Trajectory {
    std::vector<ObservableSample> samples;
    TrajectoryMetadata metadata;
};

// Diagonals of a†a, n̂, P and S^z. All four are diagonal in the product basis,
// so expectation values reduce to weighted sums of populations.
class ObservableSet {
public:
    explicit ObservableSet(const HilbertSpace& space)
        : space_(space),
          phonon_(phonon_number(space).matrix.diagonal().real()),
          excitation_(excitation_number(space).matrix.diagonal().real()),
          parity_(parity_operator(space).matrix.diagonal().real()),
          sz_(spin_z(space).matrix.diagonal().real()) {}

    [[nodiscard]] ObservableSample measure(double t, double g, const QuantumState& state) const {
        require_same_space(space_, state.space(), "measure");
        const Eigen::VectorXd pop =
            state.is_pure() ? Eigen::VectorXd(state.vector().cwiseAbs2()) : Eigen::VectorXd(state.matrix().diagonal().real());
        ObservableSample s;
        s.t = t;
        s.gt = g * t;
        s.phonon = pop.dot(phonon_);
        s.excitation = pop.dot(excitation_);
        s.parity = pop.dot(parity_);
        s.sz = pop.dot(sz_);
        return s;
    }

private:
    HilbertSpace space_;
    Eigen::VectorXd phonon_, excitation_, parity_, sz_;
};

inline Trajectory measure_trajectory(const SampledStates& states, const SampledStates* reference,
                                     const ModelSpec& spec, const HilbertSpace& space) {
    if (states.times.size() != states.states.size()) throw std::invalid_argument("measure_trajectory: malformed samples");
    if (reference && reference->times != states.times) {
        throw std::invalid_argument("measure_trajectory: reference sample grid differs from the trajectory grid");
    }
    const ObservableSet obs(space);
    Trajectory traj;
    traj.samples.reserve(states.states.size());
    for (std::size_t k = 0; k < states.states.size(); ++k) {
        ObservableSample s = obs.measure(states.times[k], spec.g, states.states[k]);
        if (reference) s.fidelity = fidelity(reference->states[k], states.states[k]);
        traj.samples.push_back(s);
    }
    return traj;
}

}  // namespace dicke
