// hamiltonian.hpp: Time-dependent Hamiltonians built from rotating operator terms,
// and the sparse assembly kernel used by the integrators.

#pragma once

#include <Eigen/Sparse>

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "dicke/algebra.hpp"

namespace dicke {

// One contribution amplitude · e^{i·frequency·t} · op. When `add_adjoint` is set
// the Hermitian-conjugate partner conj(amplitude) · e^{−i·frequency·t} · op† is
// implied; otherwise the term must be Hermitian and time independent.
struct RotatingTerm {
    Operator op;
    cplx amplitude{1.0, 0.0};
    double frequency{0.0};  // rad/s
    bool add_adjoint{true};
    std::string label;

    [[nodiscard]] cplx envelope(double t) const {
        if (frequency == 0.0) return amplitude;
        const double phase = frequency * t;
        return amplitude * cplx{std::cos(phase), std::sin(phase)};
    }
};

class TimeDependentHamiltonian {
public:
    explicit TimeDependentHamiltonian(const HilbertSpace& space) : space_(space) {}

    // Hermitian, time-independent term coefficient · op.
    void add_static(const Operator& op, double coefficient, std::string label) {
        require_same_space(space_, op.space, "add_static");
        if (!op.hermitian(1e-12)) throw std::invalid_argument("add_static: operator '" + label + "' is not Hermitian");
        terms_.push_back({op, cplx{coefficient, 0.0}, 0.0, false, std::move(label)});
    }

    // amplitude · e^{i·frequency·t} · op + H.c.
    void add_rotating(const Operator& op, cplx amplitude, double frequency, std::string label) {
        require_same_space(space_, op.space, "add_rotating");
        terms_.push_back({op, amplitude, frequency, true, std::move(label)});
    }

    void add_term(RotatingTerm term) {
        require_same_space(space_, term.op.space, "add_term");
        terms_.push_back(std::move(term));
    }

    [[nodiscard]] const HilbertSpace& space() const { return space_; }
    [[nodiscard]] const std::vector<RotatingTerm>& terms() const { return terms_; }

    [[nodiscard]] Operator at(double t) const {
        Operator h = zero_operator(space_);
        for (const auto& term : terms_) {
            const cplx c = term.envelope(t);
            h.matrix += c * term.op.matrix;
            if (term.add_adjoint) h.matrix += std::conj(c) * term.op.matrix.adjoint();
        }
        return h;
    }

    // Largest |frequency| among envelopes whose coefficient is nonzero.
    [[nodiscard]] double max_frequency() const {
        double w = 0.0;
        for (const auto& term : terms_)
            if (term.amplitude != cplx{}) w = std::max(w, std::abs(term.frequency));
        return w;
    }

    // Upper bound on ‖H(t)‖₂ valid for every t: the spectral norm of the
    // nonnegative matrix M = Σ |amplitude|·(|op| + |op†|), which dominates |H(t)|
    // entrywise.
    [[nodiscard]] double norm_bound() const {
        const Eigen::Index dim = space_.dim();
        Eigen::MatrixXd m = Eigen::MatrixXd::Zero(dim, dim);
        for (const auto& term : terms_) {
            const Eigen::MatrixXd a = term.op.matrix.cwiseAbs();
            const double w = std::abs(term.amplitude);
            if (term.add_adjoint)
                m += w * (a + a.transpose());
            else
                m += w * a;
        }
        if (m.isZero(0.0)) return 0.0;
        const Eigen::MatrixXd sym = 0.5 * (m + m.transpose());
        return Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(sym, Eigen::EigenvaluesOnly).eigenvalues().cwiseAbs().maxCoeff();
    }

private:
    HilbertSpace space_;
    std::vector<RotatingTerm> terms_;
};

// --------------------------- Sparse assembly kernel -------------------------

// Basis states connected to `seed` through the nonzero pattern of any term:
// the smallest coordinate subspace that contains the seed and is invariant
// under H(t) for every t. Returned sorted.
inline std::vector<Eigen::Index> reachable_support(const TimeDependentHamiltonian& h,
                                                   const std::vector<Eigen::Index>& seed) {
    const Eigen::Index dim = h.space().dim();
    std::vector<std::vector<Eigen::Index>> neighbours(static_cast<std::size_t>(dim));
    for (const auto& term : h.terms()) {
        if (term.amplitude == cplx{}) continue;
        for (Eigen::Index j = 0; j < dim; ++j)
            for (Eigen::Index i = 0; i < dim; ++i)
                if (term.op.matrix(i, j) != cplx{}) {
                    neighbours[static_cast<std::size_t>(i)].push_back(j);
                    neighbours[static_cast<std::size_t>(j)].push_back(i);
                }
    }
    std::vector<char> seen(static_cast<std::size_t>(dim), 0);
    std::vector<Eigen::Index> stack;
    for (Eigen::Index i : seed) {
        if (i < 0 || i >= dim) throw std::out_of_range("reachable_support: seed index outside the space");
        if (!seen[static_cast<std::size_t>(i)]) {
            seen[static_cast<std::size_t>(i)] = 1;
            stack.push_back(i);
        }
    }
    while (!stack.empty()) {
        const Eigen::Index i = stack.back();
        stack.pop_back();
        for (Eigen::Index j : neighbours[static_cast<std::size_t>(i)]) {
            if (!seen[static_cast<std::size_t>(j)]) {
                seen[static_cast<std::size_t>(j)] = 1;
                stack.push_back(j);
            }
        }
    }
    std::vector<Eigen::Index> out;
    for (Eigen::Index i = 0; i < dim; ++i)
        if (seen[static_cast<std::size_t>(i)]) out.push_back(i);
    return out;
}

// Fixed sparsity pattern covering every term (and its adjoint). assemble(t)
// rewrites the value array in place; the pattern never changes. With a
// support, the matrix is the block of H on those basis states (in the given
// order), which must be an invariant subspace.
class CompiledHamiltonian {
public:
    using Sparse = Eigen::SparseMatrix<cplx, Eigen::RowMajor>;

    explicit CompiledHamiltonian(const TimeDependentHamiltonian& h, std::vector<Eigen::Index> support = {})
        : space_(h.space()), support_(std::move(support)) {
        const Eigen::Index full = space_.dim();
        if (support_.empty()) {
            support_.resize(static_cast<std::size_t>(full));
            for (Eigen::Index i = 0; i < full; ++i) support_[static_cast<std::size_t>(i)] = i;
        }
        std::vector<Eigen::Index> position(static_cast<std::size_t>(full), -1);
        for (std::size_t k = 0; k < support_.size(); ++k) {
            const Eigen::Index i = support_[k];
            if (i < 0 || i >= full || position[static_cast<std::size_t>(i)] >= 0) {
                throw std::invalid_argument("CompiledHamiltonian: support indices must be distinct basis indices");
            }
            position[static_cast<std::size_t>(i)] = static_cast<Eigen::Index>(k);
        }
        const auto dim = static_cast<Eigen::Index>(support_.size());

        // Entries of m restricted to the support, as (row, col, value).
        auto restricted = [&](const Matrix& m) {
            std::vector<Eigen::Triplet<cplx>> out;
            for (Eigen::Index j = 0; j < full; ++j) {
                const Eigen::Index cj = position[static_cast<std::size_t>(j)];
                for (Eigen::Index i = 0; i < full; ++i) {
                    if (m(i, j) == cplx{}) continue;
                    const Eigen::Index ci = position[static_cast<std::size_t>(i)];
                    if ((ci < 0) != (cj < 0)) {
                        throw std::invalid_argument("CompiledHamiltonian: support is not an invariant subspace");
                    }
                    if (ci >= 0) out.emplace_back(ci, cj, m(i, j));
                }
            }
            return out;
        };

        std::vector<std::vector<Eigen::Triplet<cplx>>> parts;
        for (const auto& term : h.terms()) {
            parts.push_back(restricted(term.op.matrix));
            if (term.add_adjoint) parts.push_back(restricted(term.op.matrix.adjoint()));
        }
        std::vector<Eigen::Triplet<cplx>> pattern;
        for (const auto& part : parts)
            for (const auto& e : part) pattern.emplace_back(e.row(), e.col(), cplx{1.0, 0.0});
        matrix_.resize(dim, dim);
        matrix_.setFromTriplets(pattern.begin(), pattern.end());
        matrix_.makeCompressed();

        std::size_t p = 0;
        for (const auto& term : h.terms()) {
            const std::size_t own = p;
            p += term.add_adjoint ? 2 : 1;
            if (term.amplitude == cplx{}) continue;
            contributions_.push_back({term.amplitude, term.frequency, false, slots_of(parts[own])});
            if (term.add_adjoint) contributions_.push_back({term.amplitude, term.frequency, true, slots_of(parts[own + 1])});
        }
    }

    // Basis indices of the rows/columns of matrix(), in order.
    [[nodiscard]] const std::vector<Eigen::Index>& support() const { return support_; }
    [[nodiscard]] const HilbertSpace& space() const { return space_; }
    [[nodiscard]] Eigen::Index nonzeros() const { return matrix_.nonZeros(); }
    // Matrix as of the most recent assemble() call.
    [[nodiscard]] const Sparse& matrix() const { return matrix_; }

    const Sparse& assemble(double t) {
        cplx* values = matrix_.valuePtr();
        std::fill(values, values + matrix_.nonZeros(), cplx{});
        for (const auto& c : contributions_) {
            cplx coeff = c.amplitude;
            if (c.frequency != 0.0) {
                const double phase = c.frequency * t;
                coeff *= cplx{std::cos(phase), std::sin(phase)};
            }
            if (c.conjugate) coeff = std::conj(coeff);
            for (const auto& [slot, v] : c.entries) values[slot] += coeff * v;
        }
        return matrix_;
    }

private:
    struct Contribution {
        cplx amplitude;
        double frequency;
        bool conjugate;
        std::vector<std::pair<Eigen::Index, cplx>> entries;  // (value slot, matrix entry)
    };

    std::vector<std::pair<Eigen::Index, cplx>> slots_of(const std::vector<Eigen::Triplet<cplx>>& entries) const {
        std::vector<std::pair<Eigen::Index, cplx>> out;
        out.reserve(entries.size());
        const auto* outer = matrix_.outerIndexPtr();
        const auto* inner = matrix_.innerIndexPtr();
        for (const auto& e : entries) {
            const auto* begin = inner + outer[e.row()];
            const auto* end = inner + outer[e.row() + 1];
            const auto* pos = std::lower_bound(begin, end, static_cast<int>(e.col()));
            out.emplace_back(static_cast<Eigen::Index>(pos - inner), e.value());
        }
        return out;
    }

    HilbertSpace space_;
    std::vector<Eigen::Index> support_;
    Sparse matrix_;
    std::vector<Contribution> contributions_;
};

}  // namespace dicke
