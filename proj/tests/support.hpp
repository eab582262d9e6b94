#pragma once

#include "abskkt/dense.hpp"
#include "abskkt/testgen.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>

namespace abskkt::test {

inline constexpr double kEps = std::numeric_limits<double>::epsilon();

inline double max_abs_diff(const Vector& a, const Vector& b) {
    return norm_inf(a - b);
}

inline double max_abs_diff(const Matrix& a, const Matrix& b) {
    return max_abs(a - b);
}

inline Matrix random_matrix(std::size_t rows, std::size_t cols, std::uint64_t seed,
                            double lo = -1.0, double hi = 1.0) {
    return gen_random_real(rows, cols, lo, hi, seed);
}

inline Vector random_vector(std::size_t n, std::uint64_t seed, double lo = -1.0, double hi = 1.0) {
    return random_matrix(1, n, seed, lo, hi).row_vector(0);
}

inline Matrix random_symmetric(std::size_t n, std::uint64_t seed) {
    Matrix m = random_matrix(n, n, seed);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < i; ++j) {
            m(j, i) = m(i, j);
        }
    }
    return m;
}

/// Random lower triangle with diagonal entries in [1, 2] (well conditioned).
inline Matrix random_lower(std::size_t n, std::uint64_t seed) {
    Matrix l = random_matrix(n, n, seed, -0.5, 0.5);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            l(i, j) = 0.0;
        }
        l(i, i) = 1.0 + std::abs(l(i, i)) * 2.0;
    }
    return l;
}

/// Solves a small square system with partial-pivot Gaussian elimination.
inline Vector gauss_solve(Matrix a, Vector b) {
    const std::size_t n = a.rows();
    for (std::size_t k = 0; k < n; ++k) {
        std::size_t piv = k;
        for (std::size_t i = k + 1; i < n; ++i) {
            if (std::abs(a(i, k)) > std::abs(a(piv, k))) {
                piv = i;
            }
        }
        for (std::size_t j = 0; j < n; ++j) {
            std::swap(a(k, j), a(piv, j));
        }
        std::swap(b[k], b[piv]);
        for (std::size_t i = k + 1; i < n; ++i) {
            const double f = a(i, k) / a(k, k);
            for (std::size_t j = k; j < n; ++j) {
                a(i, j) -= f * a(k, j);
            }
            b[i] -= f * b[k];
        }
    }
    Vector x(n);
    for (std::size_t i = n; i-- > 0;) {
        double acc = b[i];
        for (std::size_t j = i + 1; j < n; ++j) {
            acc -= a(i, j) * x[j];
        }
        x[i] = acc / a(i, i);
    }
    return x;
}

/// Minimum-norm solution of a full-row-rank A x = b through the normal equations.
inline Vector normal_equations_min_norm(const Matrix& a, const Vector& b) {
    return mat_tvec(a, gauss_solve(mat_mul(a, transpose(a)), b));
}

} // namespace abskkt::test
