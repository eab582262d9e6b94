#include "abskkt/error.hpp"
#include "abskkt/reference.hpp"

namespace abskkt {

namespace {

KktSolution reference_failure(const char* method, const Error& e) {
    KktSolution sol;
    sol.status = KktStatus::reference_failure;
    sol.message = std::string(method) + ": " + e.what();
    return sol;
}

} // namespace

KktSolution kkt_solve_direct(const KktSystem& sys, double pivot_min) {
    sys.validate();
    const std::size_t n = sys.n();
    const std::size_t m = sys.m();
    try {
        const LdltFactorization f = ldlt_factor(sys.assemble(), pivot_min);
        const Vector z = ldlt_solve(f, concat(sys.b, sys.c));
        KktSolution sol;
        sol.x = Vector(std::vector<double>(z.begin(), z.begin() + static_cast<std::ptrdiff_t>(n)));
        sol.y = Vector(std::vector<double>(z.begin() + static_cast<std::ptrdiff_t>(n), z.end()));
        sol.detected_rank = n + m;
        return sol;
    } catch (const SingularError& e) {
        return reference_failure("direct", e);
    }
}

KktSolution kkt_solve_range_space(const KktSystem& sys, double pivot_min) {
    sys.validate();
    const std::size_t n = sys.n();
    const std::size_t m = sys.m();
    try {
        const LdltFactorization fb = ldlt_factor(sys.B, pivot_min);
        // Right-hand sides [A^T, b].
        Matrix rhs(n, m + 1);
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < m; ++j) {
                rhs(i, j) = sys.A(j, i);
            }
            rhs(i, m) = sys.b[i];
        }
        const Matrix sol_rhs = ldlt_solve(fb, rhs);

        // C = A Atilde^T, assembled from its lower triangle.
        Matrix cmat(m, m);
        for (std::size_t i = 0; i < m; ++i) {
            auto ai = sys.A.row(i);
            for (std::size_t j = 0; j <= i; ++j) {
                double acc = 0.0;
                for (std::size_t k = 0; k < n; ++k) {
                    acc += ai[k] * sol_rhs(k, j);
                }
                cmat(i, j) = acc;
                cmat(j, i) = acc;
            }
        }
        const Vector btilde = sol_rhs.col_vector(m);
        const Vector cy_rhs = mat_vec(sys.A, btilde) - sys.c;

        KktSolution sol;
        if (m > 0) {
            sol.y = ldlt_solve(ldlt_factor(cmat, pivot_min), cy_rhs);
        } else {
            sol.y = Vector();
        }
        sol.x = ldlt_solve(fb, sys.b - mat_tvec(sys.A, sol.y));
        sol.detected_rank = n + m;
        return sol;
    } catch (const SingularError& e) {
        return reference_failure("range space", e);
    }
}

KktSolution kkt_solve_null_space(const KktSystem& sys, double pivot_min, ReflectorSign sign) {
    sys.validate();
    const std::size_t n = sys.n();
    const std::size_t m = sys.m();
    const std::size_t k = n - m;
    try {
        const RqFactorization rq = rq_factor(sys.A, sign);
        const Matrix bt = rq.apply_qt_right(rq.apply_q(sys.B));
        const Vector bv = rq.apply_q(sys.b);

        // R x2 = c
        const Vector x2 = tri_solve(rq.r, sys.c, TriangleShape::upper, false, false, pivot_min);

        // B11 x1 = b1 - B12 x2
        Vector x1(k);
        if (k > 0) {
            Matrix b11(k, k);
            Vector rhs1(k);
            for (std::size_t i = 0; i < k; ++i) {
                double acc = bv[i];
                for (std::size_t j = 0; j < m; ++j) {
                    acc -= bt(i, k + j) * x2[j];
                }
                rhs1[i] = acc;
                for (std::size_t j = 0; j < k; ++j) {
                    b11(i, j) = bt(i, j);
                }
            }
            // Q B Q^T is symmetric only up to rounding; ldlt_factor reads the lower triangle.
            x1 = ldlt_solve(ldlt_factor(b11, pivot_min), rhs1);
        }

        // R^T y = b2 - B21 x1 - B22 x2
        Vector rhs2(m);
        for (std::size_t i = 0; i < m; ++i) {
            double acc = bv[k + i];
            for (std::size_t j = 0; j < k; ++j) {
                acc -= bt(k + i, j) * x1[j];
            }
            for (std::size_t j = 0; j < m; ++j) {
                acc -= bt(k + i, k + j) * x2[j];
            }
            rhs2[i] = acc;
        }
        KktSolution sol;
        sol.y = tri_solve(rq.r, rhs2, TriangleShape::upper, /*transposed=*/true, false, pivot_min);
        sol.x = rq.apply_qt(concat(x1, x2));
        sol.detected_rank = n + m;
        return sol;
    } catch (const SingularError& e) {
        return reference_failure("null space", e);
    }
}

} // namespace abskkt
