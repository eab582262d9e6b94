#pragma once

// Reference KKT solvers and the dense factorizations they rest on:
// symmetric indefinite LDL^T with Bunch-Kaufman pivoting, Householder RQ and
// a one-sided Jacobi SVD used for condition numbers.

#include "abskkt/dense.hpp"
#include "abskkt/kkt.hpp"

#include <optional>
#include <vector>

namespace abskkt {

/// One block of D: a scalar (size 1) or the symmetric 2x2 [[a, b], [b, c]].
struct PivotBlock {
    std::size_t start = 0;
    std::size_t size = 1;
    double a = 0.0;
    double b = 0.0;
    double c = 0.0;
};

/// P^T M P = L D L^T, with L unit lower triangular and D block diagonal.
/// Position i of the factored matrix is row/column perm.at(i) of M.
struct LdltFactorization {
    Matrix l;
    std::vector<PivotBlock> blocks;
    Permutation perm;

    std::size_t size() const noexcept { return l.rows(); }
    /// The block-diagonal D as a dense matrix.
    Matrix d_dense() const;
    /// L D L^T, to compare against P^T M P.
    Matrix reconstruct() const;
};

/// Bunch-Kaufman partial pivoting. A 1x1 pivot with |d| <= pivot_min, a 2x2
/// block with |det| <= pivot_min * max|entry|, or an all-zero column throws
/// SingularError with the step index. Unset pivot_min means size * eps * ||M||_inf.
/// Only the lower triangle of M is read.
LdltFactorization ldlt_factor(const Matrix& m, std::optional<double> pivot_min = std::nullopt);

Vector ldlt_solve(const LdltFactorization& f, const Vector& rhs);
/// Column-by-column over the shared factorization.
Matrix ldlt_solve(const LdltFactorization& f, const Matrix& rhs);

/// Elementary reflector I - tau v v^T acting on entries 0..pivot, v[pivot] = 1.
struct Reflector {
    std::size_t pivot = 0;
    Vector v;
    double tau = 0.0;
};

enum class ReflectorSign {
    /// beta = -sign(alpha) ||x||, no cancellation in alpha - beta.
    standard,
    /// beta = +sign(alpha) ||x||; a second valid RQ used for invariance checks.
    flipped,
};

/// A = [0, R] Q with Q = H_1 ... H_m.
struct RqFactorization {
    Matrix r;                          ///< m x m upper triangular
    std::vector<Reflector> reflectors; ///< in the order they were applied to A
    std::size_t n = 0;

    /// Q v
    Vector apply_q(const Vector& v) const;
    /// Q^T v
    Vector apply_qt(const Vector& v) const;
    /// Q M (every column)
    Matrix apply_q(const Matrix& mat) const;
    /// M Q^T (every row)
    Matrix apply_qt_right(const Matrix& mat) const;
    Matrix q_dense() const;
};

/// Householder RQ of an m x n matrix, m <= n.
RqFactorization rq_factor(const Matrix& a, ReflectorSign sign = ReflectorSign::standard);

/// Full (n+m) symmetric indefinite LDL^T solve.
KktSolution kkt_solve_direct(const KktSystem& sys, double pivot_min = 0.0);

/// Range-space method: factor B, solve B [Atilde^T, btilde] = [A^T, b],
/// C = A Atilde^T, C y = A btilde - c, then L D L^T x = b - A^T y.
KktSolution kkt_solve_range_space(const KktSystem& sys, double pivot_min = 0.0);

/// Null-space method via A = [0, R] Q.
KktSolution kkt_solve_null_space(const KktSystem& sys, double pivot_min = 0.0,
                                 ReflectorSign sign = ReflectorSign::standard);

/// Singular values in descending order (one-sided Jacobi).
Vector singular_values(const Matrix& m);

/// sigma_max / sigma_min of a square matrix; +infinity when sigma_min = 0.
double condition_estimate(const Matrix& m);

} // namespace abskkt
