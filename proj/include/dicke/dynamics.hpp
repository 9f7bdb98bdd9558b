// dynamics.hpp: Fixed-step RK4 propagation of pure states (Schrödinger equation) and
// density matrices (Lindblad master equation with per-qubit σz dephasing).

#pragma once

#include <Eigen/Cholesky>

#include <bit>
#include <cmath>
#include <complex>
#include <optional>
#include <string>
#include <vector>

#include "dicke/algebra.hpp"
#include "dicke/hamiltonian.hpp"

namespace dicke {

// dρ/dt gains Γ Σ_m (σ_m^z ρ σ_m^z − ρ).
struct NoiseSpec {
    double dephasing_rate{0.0};  // Γ (rad/s)
};

// Uniform output samples at t_j = j·t_end/(samples−1); each sample interval
// holds an integer number of equal RK4 steps no longer than `dt`.
class TimeGrid {
public:
    TimeGrid(double t_end, double dt, int sample_count = 500)
        : t_end_(t_end), dt_max_(dt), samples_(sample_count) {
        if (!(dt > 0.0)) throw ConfigError("TimeGrid: dt must be > 0");
        if (!(t_end >= dt)) throw ConfigError("TimeGrid: t_end must be >= dt");
        if (sample_count < 2) throw ConfigError("TimeGrid: need at least 2 samples");
        const double interval = t_end / (samples_ - 1);
        steps_per_sample_ = static_cast<long>(std::ceil(interval / dt * (1.0 - 1e-12)));
        if (steps_per_sample_ < 1) steps_per_sample_ = 1;
        dt_ = interval / static_cast<double>(steps_per_sample_);
    }

    [[nodiscard]] double t_end() const { return t_end_; }
    [[nodiscard]] double max_dt() const { return dt_max_; }
    [[nodiscard]] double dt() const { return dt_; }
    [[nodiscard]] int sample_count() const { return samples_; }
    [[nodiscard]] long steps_per_sample() const { return steps_per_sample_; }
    [[nodiscard]] long total_steps() const { return steps_per_sample_ * (samples_ - 1); }
    [[nodiscard]] double sample_time(int j) const { return t_end_ * j / (samples_ - 1); }
    [[nodiscard]] double step_time(long k) const { return dt_ * static_cast<double>(k); }

    [[nodiscard]] std::vector<double> sample_times() const {
        std::vector<double> t(static_cast<std::size_t>(samples_));
        for (int j = 0; j < samples_; ++j) t[static_cast<std::size_t>(j)] = sample_time(j);
        return t;
    }

private:
    double t_end_;
    double dt_max_;
    int samples_;
    long steps_per_sample_{1};
    double dt_{0.0};
};

struct SampledStates {
    std::vector<double> times;
    std::vector<QuantumState> states;
};

// ------------------------------ Pure states ---------------------------------

namespace detail {

// Basis indices carrying amplitude in the initial state, closed under H: the
// propagators evolve only this block and embed it back when sampling.
inline std::vector<Eigen::Index> evolution_support(const TimeDependentHamiltonian& h, const QuantumState& state) {
    std::vector<Eigen::Index> seed;
    const Eigen::Index dim = state.space().dim();
    for (Eigen::Index i = 0; i < dim; ++i) {
        const bool occupied = state.is_pure() ? state.vector()(i) != cplx{} : state.matrix().row(i).squaredNorm() > 0.0;
        if (occupied) seed.push_back(i);
    }
    return reachable_support(h, seed);
}

}  // namespace detail

class UnitaryPropagator {
public:
    UnitaryPropagator(const TimeDependentHamiltonian& h, const QuantumState& psi0, const TimeGrid& grid)
        : grid_(grid), space_(h.space()), support_(checked_support(h, psi0)), h_now_(h, support_), h_mid_(h, support_) {
        psi_ = psi0.vector()(support_);
        h_now_.assemble(grid_.step_time(0));
    }

    [[nodiscard]] int sample_index() const { return sample_; }
    [[nodiscard]] double time() const { return grid_.sample_time(sample_); }
    [[nodiscard]] bool done() const { return sample_ >= grid_.sample_count() - 1; }
    [[nodiscard]] QuantumState state() const {
        Vector full = Vector::Zero(space_.dim());
        full(support_) = psi_;
        return QuantumState::pure(space_, std::move(full));
    }
    // Basis states the evolution can reach; amplitudes elsewhere stay zero.
    [[nodiscard]] const std::vector<Eigen::Index>& support() const { return support_; }

    void advance() {
        for (long k = 0; k < grid_.steps_per_sample(); ++k) step();
        ++sample_;
    }

private:
    static std::vector<Eigen::Index> checked_support(const TimeDependentHamiltonian& h, const QuantumState& psi0) {
        if (!psi0.is_pure()) throw std::invalid_argument("evolve_unitary: initial state must be pure");
        require_same_space(h.space(), psi0.space(), "evolve_unitary");
        psi0.validate();
        return detail::evolution_support(h, psi0);
    }

    void step() {
        const double h = grid_.dt();
        const double t_mid = grid_.step_time(step_) + 0.5 * h;
        const cplx minus_i{0.0, -1.0};

        k_ = minus_i * (h_now_.matrix() * psi_);  // assembled at the current step time
        acc_ = k_;
        const auto& mid = h_mid_.assemble(t_mid);
        tmp_ = psi_ + (0.5 * h) * k_;
        k_ = minus_i * (mid * tmp_);
        acc_ += 2.0 * k_;
        tmp_ = psi_ + (0.5 * h) * k_;
        k_ = minus_i * (mid * tmp_);
        acc_ += 2.0 * k_;
        ++step_;
        tmp_ = psi_ + h * k_;
        k_ = minus_i * (h_now_.assemble(grid_.step_time(step_)) * tmp_);
        acc_ += k_;
        psi_ += (h / 6.0) * acc_;

        const double norm = psi_.norm();
        if (!std::isfinite(norm)) {
            throw NumericalError("evolve_unitary: non-finite amplitudes at t = " + std::to_string(grid_.step_time(step_)));
        }
        const double drift = std::abs(norm - 1.0);
        if (drift > 1e-6) {
            throw NumericalError("evolve_unitary: norm drift " + std::to_string(drift) +
                                 " exceeds 1e-6 (time step too large?)");
        }
        if (drift > 1e-12) psi_ /= norm;
    }

    TimeGrid grid_;
    HilbertSpace space_;
    std::vector<Eigen::Index> support_;
    CompiledHamiltonian h_now_;
    CompiledHamiltonian h_mid_;
    Vector psi_, k_, acc_, tmp_;
    long step_{0};
    int sample_{0};
};

inline SampledStates evolve_unitary(const TimeDependentHamiltonian& h, const QuantumState& psi0, const TimeGrid& grid) {
    UnitaryPropagator prop(h, psi0, grid);
    SampledStates out;
    out.times.push_back(prop.time());
    out.states.push_back(prop.state());
    while (!prop.done()) {
        prop.advance();
        out.times.push_back(prop.time());
        out.states.push_back(prop.state());
    }
    return out;
}

// ---------------------------- Density matrices ------------------------------

// Strang splitting: half a step of the exact dephasing channel, one RK4 step of
// the Schrödinger equation applied from both sides (ρ → T ρ T†), and another
// half dephasing step. Both factors are completely positive, so ρ stays
// positive semidefinite up to round-off.
class LindbladPropagator {
    // Row-major: the sparse-times-dense kernel then streams contiguous rows.
    using Dense = Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

public:
    LindbladPropagator(const TimeDependentHamiltonian& h, const NoiseSpec& noise, const QuantumState& rho0,
                       const TimeGrid& grid)
        : grid_(grid),
          space_(h.space()),
          support_(checked_support(h, noise, rho0)),
          h_now_(h, support_),
          h_mid_(h, support_),
          h_next_(h, support_) {
        rho_ = rho0.density()(support_, support_);

        // Σ_m (σ_m^z ρ σ_m^z − ρ) acts entrywise: (i,j) decays at 2Γ for every
        // qubit whose spin differs between basis states i and j.
        has_noise_ = noise.dephasing_rate > 0.0;
        if (has_noise_) {
            const auto dim = static_cast<Eigen::Index>(support_.size());
            half_decay_.resize(dim, dim);
            for (Eigen::Index j = 0; j < dim; ++j) {
                const unsigned sj = space_.spins_of(support_[static_cast<std::size_t>(j)]);
                for (Eigen::Index i = 0; i < dim; ++i) {
                    const unsigned si = space_.spins_of(support_[static_cast<std::size_t>(i)]);
                    half_decay_(i, j) = std::exp(-noise.dephasing_rate * grid_.dt() * std::popcount(si ^ sj));
                }
            }
        }
        h_now_.assemble(grid_.step_time(0));
        check_sample();
    }

    [[nodiscard]] int sample_index() const { return sample_; }
    [[nodiscard]] double time() const { return grid_.sample_time(sample_); }
    [[nodiscard]] bool done() const { return sample_ >= grid_.sample_count() - 1; }
    [[nodiscard]] QuantumState state() const {
        Matrix full = Matrix::Zero(space_.dim(), space_.dim());
        full(support_, support_) = rho_;
        return QuantumState::mixed(space_, std::move(full));
    }
    [[nodiscard]] const std::vector<Eigen::Index>& support() const { return support_; }

    void advance() {
        for (long k = 0; k < grid_.steps_per_sample(); ++k) step();
        ++sample_;
        check_sample();
    }

private:
    static std::vector<Eigen::Index> checked_support(const TimeDependentHamiltonian& h, const NoiseSpec& noise,
                                                     const QuantumState& rho0) {
        if (!(noise.dephasing_rate >= 0.0)) throw ConfigError("NoiseSpec: dephasing rate must be >= 0");
        require_same_space(h.space(), rho0.space(), "evolve_lindblad");
        rho0.validate();
        return detail::evolution_support(h, rho0);
    }

    // y ← T y for the RK4 Schrödinger step over [t, t+h].
    void propagate(Dense& y) {
        const double h = grid_.dt();
        const cplx minus_i{0.0, -1.0};
        k_.noalias() = minus_i * (h_now_.matrix() * y);
        acc_ = k_;
        tmp_ = y + (0.5 * h) * k_;
        k_.noalias() = minus_i * (h_mid_.matrix() * tmp_);
        acc_ += 2.0 * k_;
        tmp_ = y + (0.5 * h) * k_;
        k_.noalias() = minus_i * (h_mid_.matrix() * tmp_);
        acc_ += 2.0 * k_;
        tmp_ = y + h * k_;
        k_.noalias() = minus_i * (h_next_.matrix() * tmp_);
        acc_ += k_;
        y += (h / 6.0) * acc_;
    }

    void step() {
        const double h = grid_.dt();
        const double t = grid_.step_time(step_);
        h_mid_.assemble(t + 0.5 * h);
        h_next_.assemble(grid_.step_time(step_ + 1));

        if (has_noise_) rho_.array() *= half_decay_.array();
        propagate(rho_);                 // T ρ
        half_ = rho_.adjoint();          // ρ† T†
        propagate(half_);                // T ρ† T†
        rho_ = half_.adjoint();          // T ρ T†
        if (has_noise_) rho_.array() *= half_decay_.array();

        std::swap(h_now_, h_next_);
        ++step_;

        // T is a contraction to O(h^6), like the unitary stepper; undo the loss.
        const double tr = rho_.trace().real();
        if (!std::isfinite(tr)) {
            throw NumericalError("evolve_lindblad: non-finite density matrix at t = " +
                                 std::to_string(grid_.step_time(step_)));
        }
        const double drift = std::abs(tr - 1.0);
        if (drift > 1e-6) {
            throw NumericalError("evolve_lindblad: trace drift " + std::to_string(drift) + " exceeds 1e-6 in one step at t = " +
                                 std::to_string(grid_.step_time(step_)) + " (time step too large?)");
        }
        if (drift > 1e-12) rho_ /= tr;
    }

    void check_sample() {
        rho_ = (0.5 * (rho_ + rho_.adjoint())).eval();
        const double t = time();
        const cplx tr = rho_.trace();
        if (!std::isfinite(tr.real()) || !rho_.allFinite()) {
            throw NumericalError("evolve_lindblad: non-finite density matrix at t = " + std::to_string(t));
        }
        if (std::abs(tr - cplx{1.0, 0.0}) > 1e-6) {
            throw NumericalError("evolve_lindblad: trace drift exceeds 1e-6 at t = " + std::to_string(t));
        }
        rho_ /= tr.real();
        // ρ + 1e-5·I is positive definite iff the minimum eigenvalue exceeds −1e-5.
        shifted_ = rho_;
        shifted_.diagonal().array() += 1e-5;
        Eigen::LLT<Matrix> llt(shifted_);
        if (llt.info() != Eigen::Success) {
            throw NumericalError("evolve_lindblad: eigenvalue below -1e-5 at t = " + std::to_string(t));
        }
    }

    TimeGrid grid_;
    HilbertSpace space_;
    std::vector<Eigen::Index> support_;
    CompiledHamiltonian h_now_;
    CompiledHamiltonian h_mid_;
    CompiledHamiltonian h_next_;
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> half_decay_;
    bool has_noise_{false};
    Dense rho_, half_, k_, acc_, tmp_;
    Matrix shifted_;
    long step_{0};
    int sample_{0};
};

inline SampledStates evolve_lindblad(const TimeDependentHamiltonian& h, const NoiseSpec& noise,
                                     const QuantumState& rho0, const TimeGrid& grid) {
    LindbladPropagator prop(h, noise, rho0, grid);
    SampledStates out;
    out.times.push_back(prop.time());
    out.states.push_back(prop.state());
    while (!prop.done()) {
        prop.advance();
        out.times.push_back(prop.time());
        out.states.push_back(prop.state());
    }
    return out;
}

}  // namespace dicke
