// algebra.hpp: Truncated Fock ⊗ N-qubit operator algebra.
//
// Basis ordering is boson ⊗ qubit_1 ⊗ … ⊗ qubit_N. A basis index is
//   index = n · 2^N + spins
// where n is the Fock level and bit (N − m) of `spins` is the state of qubit m
// (1 = ↑, 0 = ↓). Qubit 1 is therefore the most significant spin bit.

#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <string>
#include <utility>
#include <variant>

#include "dicke/errors.hpp"

namespace dicke {

using cplx = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;
inline constexpr std::size_t kDefaultMaxDim = 4096;

// ------------------------------ Hilbert space ------------------------------

struct HilbertSpace {
    int n_qubits{1};
    int fock_cutoff{0};  // highest retained Fock level

    [[nodiscard]] Eigen::Index boson_dim() const { return fock_cutoff + 1; }
    [[nodiscard]] Eigen::Index qubit_dim() const { return Eigen::Index{1} << n_qubits; }
    [[nodiscard]] Eigen::Index dim() const { return boson_dim() * qubit_dim(); }

    [[nodiscard]] Eigen::Index index(int phonons, unsigned spins) const {
        return static_cast<Eigen::Index>(phonons) * qubit_dim() + static_cast<Eigen::Index>(spins);
    }
    [[nodiscard]] int phonons_of(Eigen::Index i) const { return static_cast<int>(i / qubit_dim()); }
    [[nodiscard]] unsigned spins_of(Eigen::Index i) const {
        return static_cast<unsigned>(i % qubit_dim());
    }
    // Bit mask of qubit m (1-based) inside a spin configuration.
    [[nodiscard]] unsigned qubit_bit(int m) const { return 1u << (n_qubits - m); }

    friend bool operator==(const HilbertSpace&, const HilbertSpace&) = default;
};

inline HilbertSpace make_space(int n_qubits, int fock_cutoff, std::size_t max_dim = kDefaultMaxDim) {
    if (n_qubits < 1) {
        throw ConfigError("make_space: n_qubits must be >= 1, got " + std::to_string(n_qubits));
    }
    if (fock_cutoff < 0) {
        throw ConfigError("make_space: fock_cutoff must be >= 0, got " + std::to_string(fock_cutoff));
    }
    if (n_qubits > 30) {
        throw MemoryGuardError("make_space: " + std::to_string(n_qubits) + " qubits exceed the dimension guard");
    }
    HilbertSpace space{n_qubits, fock_cutoff};
    const auto dim = static_cast<std::size_t>(space.dim());
    if (dim > max_dim) {
        throw MemoryGuardError("make_space: dimension " + std::to_string(dim) + " exceeds guard " +
                               std::to_string(max_dim));
    }
    return space;
}

// -------------------------------- Operators --------------------------------

inline double max_abs(const Matrix& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

// Hermiticity check with tolerance relative to the largest entry (floor of 1).
inline bool is_hermitian(const Matrix& m, double tol) {
    if (m.rows() != m.cols()) return false;
    const double scale = std::max(1.0, max_abs(m));
    return max_abs(m - m.adjoint()) <= tol * scale;
}

struct Operator {
    HilbertSpace space;
    Matrix matrix;

    [[nodiscard]] Operator adjoint() const { return {space, matrix.adjoint()}; }
    [[nodiscard]] bool hermitian(double tol = 1e-10) const { return is_hermitian(matrix, tol); }

    Operator& operator+=(const Operator& o) {
        matrix += o.matrix;
        return *this;
    }
    Operator& operator-=(const Operator& o) {
        matrix -= o.matrix;
        return *this;
    }
};

inline void require_same_space(const HilbertSpace& a, const HilbertSpace& b, const char* where) {
    if (!(a == b)) throw std::invalid_argument(std::string(where) + ": operands live on different spaces");
}

inline Operator operator+(Operator a, const Operator& b) {
    require_same_space(a.space, b.space, "operator+");
    a += b;
    return a;
}
inline Operator operator-(Operator a, const Operator& b) {
    require_same_space(a.space, b.space, "operator-");
    a -= b;
    return a;
}
inline Operator operator*(const Operator& a, const Operator& b) {
    require_same_space(a.space, b.space, "operator*");
    return {a.space, a.matrix * b.matrix};
}
inline Operator operator*(cplx c, const Operator& a) { return {a.space, c * a.matrix}; }
inline Operator operator*(double c, const Operator& a) { return {a.space, c * a.matrix}; }

inline Operator commutator(const Operator& a, const Operator& b) { return a * b - b * a; }

inline Operator identity(const HilbertSpace& space) {
    return {space, Matrix::Identity(space.dim(), space.dim())};
}

inline Operator zero_operator(const HilbertSpace& space) {
    return {space, Matrix::Zero(space.dim(), space.dim())};
}

// Operator that is diagonal in the computational basis, with entry f(index).
template <typename F>
Operator diagonal_operator(const HilbertSpace& space, F&& f) {
    Operator op = zero_operator(space);
    for (Eigen::Index i = 0; i < space.dim(); ++i) op.matrix(i, i) = f(i);
    return op;
}

inline Matrix kron(const Matrix& a, const Matrix& b) {
    Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

// --------------------------- Ladder and spin ops ---------------------------

struct LadderPair {
    Operator a;
    Operator a_dagger;
};

inline LadderPair ladder(const HilbertSpace& space) {
    if (space.fock_cutoff < 1) {
        throw ConfigError("ladder: fock_cutoff must be >= 1 for phonon operators");
    }
    Matrix boson = Matrix::Zero(space.boson_dim(), space.boson_dim());
    for (Eigen::Index n = 1; n < space.boson_dim(); ++n) boson(n - 1, n) = std::sqrt(static_cast<double>(n));
    Operator a{space, kron(boson, Matrix::Identity(space.qubit_dim(), space.qubit_dim()))};
    return {a, a.adjoint()};
}

enum class SpinOp { sigma_z, sigma_x, sigma_plus, sigma_minus };

namespace detail {

inline Matrix single_qubit_matrix(SpinOp which) {
    // basis order within one qubit: {|↓⟩, |↑⟩}
    Matrix m = Matrix::Zero(2, 2);
    switch (which) {
        case SpinOp::sigma_z:
            m(0, 0) = -1.0;
            m(1, 1) = 1.0;
            break;
        case SpinOp::sigma_x:
            m(0, 1) = 1.0;
            m(1, 0) = 1.0;
            break;
        case SpinOp::sigma_plus:  // |↑⟩⟨↓|
            m(1, 0) = 1.0;
            break;
        case SpinOp::sigma_minus:
            m(0, 1) = 1.0;
            break;
    }
    return m;
}

}  // namespace detail

// Embeds the 2×2 operator on qubit m (1-based), identity on the boson and other qubits.
inline Operator spin(const HilbertSpace& space, SpinOp which, int m) {
    if (m < 1 || m > space.n_qubits) {
        throw std::out_of_range("spin: qubit index " + std::to_string(m) + " outside [1, " +
                                std::to_string(space.n_qubits) + "]");
    }
    const Matrix local = detail::single_qubit_matrix(which);
    Operator op = zero_operator(space);
    const unsigned bit = space.qubit_bit(m);
    for (Eigen::Index col = 0; col < space.dim(); ++col) {
        const int n = space.phonons_of(col);
        const unsigned s = space.spins_of(col);
        const int in = (s & bit) ? 1 : 0;
        for (int out = 0; out < 2; ++out) {
            const cplx v = local(out, in);
            if (v == cplx{}) continue;
            const unsigned s_out = out ? (s | bit) : (s & ~bit);
            op.matrix(space.index(n, s_out), col) = v;
        }
    }
    return op;
}

// Σ = Σ_m σ_m of the requested kind.
inline Operator collective_spin(const HilbertSpace& space, SpinOp which) {
    Operator total = zero_operator(space);
    for (int m = 1; m <= space.n_qubits; ++m) total += spin(space, which, m);
    return total;
}

// ---------------------- Hermitian matrix functions -------------------------

namespace detail {

inline Eigen::SelfAdjointEigenSolver<Matrix> hermitian_eigen(const Matrix& m, const char* where) {
    if (!is_hermitian(m, 1e-9)) {
        throw NumericalError(std::string(where) + ": input is not Hermitian within 1e-9");
    }
    const Matrix sym = 0.5 * (m + m.adjoint());
    Eigen::SelfAdjointEigenSolver<Matrix> solver(sym);
    if (solver.info() != Eigen::Success) {
        throw NumericalError(std::string(where) + ": eigendecomposition failed");
    }
    return solver;
}

// PSD square root of a Hermitian matrix; eigenvalues in [-1e-7, 0) are clamped.
inline Matrix psd_sqrt(const Matrix& m) {
    const auto solver = hermitian_eigen(m, "herm_sqrt");
    Eigen::VectorXd ev = solver.eigenvalues();
    if (ev.size() > 0 && ev.minCoeff() < -1e-7) {
        throw NumericalError("herm_sqrt: eigenvalue " + std::to_string(ev.minCoeff()) + " below -1e-7");
    }
    ev = ev.cwiseMax(0.0).cwiseSqrt();
    const Matrix& u = solver.eigenvectors();
    return u * ev.asDiagonal() * u.adjoint();
}

}  // namespace detail

inline Operator herm_sqrt(const Operator& m) { return {m.space, detail::psd_sqrt(m.matrix)}; }

// exp(−i·h·dt) via eigendecomposition.
inline Operator herm_propagator(const Operator& h, double dt) {
    const auto solver = detail::hermitian_eigen(h.matrix, "herm_propagator");
    const Eigen::VectorXd& ev = solver.eigenvalues();
    Vector phases(ev.size());
    for (Eigen::Index i = 0; i < ev.size(); ++i) phases(i) = std::exp(cplx{0.0, -ev(i) * dt});
    const Matrix& u = solver.eigenvectors();
    return {h.space, u * phases.asDiagonal() * u.adjoint()};
}

// ------------------------------ Quantum state ------------------------------

// Either a normalized state vector or a unit-trace density matrix.
class QuantumState {
public:
    static QuantumState pure(const HilbertSpace& space, Vector psi) {
        if (psi.size() != space.dim()) throw std::invalid_argument("QuantumState::pure: dimension mismatch");
        return QuantumState(space, std::move(psi));
    }
    static QuantumState mixed(const HilbertSpace& space, Matrix rho) {
        if (rho.rows() != space.dim() || rho.cols() != space.dim()) {
            throw std::invalid_argument("QuantumState::mixed: dimension mismatch");
        }
        return QuantumState(space, std::move(rho));
    }

    [[nodiscard]] const HilbertSpace& space() const { return space_; }
    [[nodiscard]] bool is_pure() const { return std::holds_alternative<Vector>(data_); }
    [[nodiscard]] const Vector& vector() const { return std::get<Vector>(data_); }
    [[nodiscard]] const Matrix& matrix() const { return std::get<Matrix>(data_); }

    // Density matrix, promoting pure states to |ψ⟩⟨ψ|.
    [[nodiscard]] Matrix density() const {
        if (is_pure()) return vector() * vector().adjoint();
        return matrix();
    }

    [[nodiscard]] QuantumState promoted() const { return mixed(space_, density()); }

    // Throws NumericalError when the state violates its representation's invariants.
    void validate() const {
        if (is_pure()) {
            const double norm = vector().norm();
            if (!std::isfinite(norm) || std::abs(norm - 1.0) > 1e-9) {
                throw NumericalError("QuantumState: pure-state norm " + std::to_string(norm) + " not within 1e-9 of 1");
            }
            return;
        }
        const Matrix& rho = matrix();
        const cplx tr = rho.trace();
        if (!std::isfinite(tr.real()) || std::abs(tr - cplx{1.0, 0.0}) > 1e-9) {
            throw NumericalError("QuantumState: trace deviates from 1 by more than 1e-9");
        }
        if (max_abs(rho - rho.adjoint()) > 1e-10) {
            throw NumericalError("QuantumState: density matrix not Hermitian within 1e-10");
        }
        // ρ + 1e-7·I admits a Cholesky factor iff the smallest eigenvalue exceeds −1e-7.
        Matrix shifted = 0.5 * (rho + rho.adjoint());
        shifted.diagonal().array() += 1e-7;
        if (Eigen::LLT<Matrix>(shifted).info() != Eigen::Success) {
            throw NumericalError("QuantumState: density matrix has eigenvalue below -1e-7");
        }
    }

private:
    QuantumState(const HilbertSpace& space, Vector psi) : space_(space), data_(std::move(psi)) {}
    QuantumState(const HilbertSpace& space, Matrix rho) : space_(space), data_(std::move(rho)) {}

    HilbertSpace space_;
    std::variant<Vector, Matrix> data_;
};

}  // namespace dicke
