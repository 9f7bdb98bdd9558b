// test_support.hpp: Seeded random matrices and small helpers shared by the unit tests.

#pragma once

#include <random>

#include "dicke/algebra.hpp"

namespace dicke::test {

inline Matrix random_matrix(std::mt19937_64& rng, Eigen::Index n) {
    std::normal_distribution<double> d(0.0, 1.0);
    Matrix m(n, n);
    for (Eigen::Index j = 0; j < n; ++j)
        for (Eigen::Index i = 0; i < n; ++i) m(i, j) = cplx{d(rng), d(rng)};
    return m;
}

inline Matrix random_hermitian(std::mt19937_64& rng, Eigen::Index n) {
    const Matrix m = random_matrix(rng, n);
    return 0.5 * (m + m.adjoint());
}

inline Matrix random_psd(std::mt19937_64& rng, Eigen::Index n) {
    const Matrix m = random_matrix(rng, n);
    return m * m.adjoint();
}

inline Matrix random_density(std::mt19937_64& rng, Eigen::Index n) {
    Matrix rho = random_psd(rng, n);
    return rho / rho.trace();
}

inline Vector random_unit_vector(std::mt19937_64& rng, Eigen::Index n) {
    std::normal_distribution<double> d(0.0, 1.0);
    Vector v(n);
    for (Eigen::Index i = 0; i < n; ++i) v(i) = cplx{d(rng), d(rng)};
    return v.normalized();
}

}  // namespace dicke::test
