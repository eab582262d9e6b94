#include "abskkt/kkt.hpp"

#include "abskkt/error.hpp"

#include <algorithm>
#include <cmath>
#include <variant>

namespace abskkt {

void KktSystem::validate() const {
    const std::size_t nn = B.rows();
    if (!B.square()) {
        throw DimensionError("KKT: B must be square", B.rows(), B.cols());
    }
    if (A.cols() != nn) {
        throw DimensionError("KKT: A columns", nn, A.cols());
    }
    if (A.rows() > nn) {
        throw DimensionError("KKT: constraint count exceeds n", nn, A.rows());
    }
    if (b.size() != nn) {
        throw DimensionError("KKT: b length", nn, b.size());
    }
    if (c.size() != A.rows()) {
        throw DimensionError("KKT: c length", A.rows(), c.size());
    }
    for (std::size_t i = 0; i < nn; ++i) {
        for (std::size_t j = 0; j < i; ++j) {
            if (B(i, j) != B(j, i)) {
                throw Error("KKT: B is not symmetric at (" + std::to_string(i) + ", " +
                            std::to_string(j) + ")");
            }
        }
    }
}

Matrix KktSystem::assemble() const {
    const std::size_t nn = n();
    const std::size_t mm = m();
    Matrix k(nn + mm, nn + mm);
    for (std::size_t i = 0; i < nn; ++i) {
        for (std::size_t j = 0; j < nn; ++j) {
            k(i, j) = B(i, j);
        }
    }
    for (std::size_t i = 0; i < mm; ++i) {
        for (std::size_t j = 0; j < nn; ++j) {
            k(nn + i, j) = A(i, j);
            k(j, nn + i) = A(i, j);
        }
    }
    return k;
}

const char* to_string(KktStatus status) noexcept {
    switch (status) {
    case KktStatus::ok:
        return "ok";
    case KktStatus::rank_deficient:
        return "rank_deficient";
    case KktStatus::incompatible:
        return "incompatible";
    case KktStatus::reference_failure:
        return "reference_failure";
    }
    return "unknown";
}

std::pair<Vector, Vector> kkt_residuals(const KktSystem& sys, const Vector& x, const Vector& y) {
    Vector r1 = mat_vec(sys.B, x) + mat_tvec(sys.A, y) - sys.b;
    Vector r2 = mat_vec(sys.A, x) - sys.c;
    return {std::move(r1), std::move(r2)};
}

// ---------------------------------------------------------------------------

Vector recover_multipliers(const KktSystem& sys, const Vector& x, const ImplicitFactors& factors,
                           double pivot_min) {
    if (x.size() != sys.n()) {
        throw DimensionError("recover_multipliers: x length", sys.n(), x.size());
    }
    const Vector r = sys.b - mat_vec(sys.B, x);
    const std::size_t k = factors.p.cols();
    Vector t(k);
    for (std::size_t col = 0; col < k; ++col) {
        double acc = 0.0;
        for (std::size_t j = 0; j < factors.p.rows(); ++j) {
            acc += factors.p(j, col) * r[factors.order.at(j)];
        }
        t[col] = acc;
    }
    const Vector y_acc =
        tri_solve(factors.l, t, TriangleShape::lower, /*transposed=*/true, false, pivot_min);
    Vector y(sys.m());
    for (std::size_t i = 0; i < factors.rows.size(); ++i) {
        y[factors.rows[i]] = y_acc[i];
    }
    return y;
}

Vector recover_multipliers(const KktSystem& sys, const Vector& x, const SolverControls& controls) {
    auto lu = implicit_lu_solve(sys.A, Vector(sys.m()), controls);
    return recover_multipliers(sys, x, extract_implicit_factors(lu.state, sys.A),
                               controls.pivot_min);
}

// ---------------------------------------------------------------------------

namespace {

// Phase-one data shared by the two implicit LU strategies.
struct LuPhaseOne {
    ImplicitLuResult lu;
    ImplicitFactors factors;
};

const TrapezoidalK& trapezoid(const AbaffianState& state) {
    return std::get<TrapezoidalK>(state.rep);
}

// S M for M with n rows: row j of S M is row order(m+j) of M plus
// sum_c K(m+j, c) * row order(c).
Matrix selector_times(const TrapezoidalK& tk, std::size_t m, const Matrix& mat) {
    const std::size_t n = mat.rows();
    Matrix out(n - m, mat.cols());
    for (std::size_t j = 0; j < n - m; ++j) {
        auto oj = out.row(j);
        auto base = mat.row(tk.order.at(m + j));
        std::copy(base.begin(), base.end(), oj.begin());
        auto kj = tk.k.row(m + j);
        for (std::size_t c = 0; c < m; ++c) {
            const double f = kj[c];
            if (f == 0.0) {
                continue;
            }
            auto mc = mat.row(tk.order.at(c));
            for (std::size_t col = 0; col < mat.cols(); ++col) {
                oj[col] += f * mc[col];
            }
        }
    }
    return out;
}

Vector selector_times(const TrapezoidalK& tk, std::size_t m, const Vector& v) {
    const std::size_t n = v.size();
    Vector out(n - m);
    for (std::size_t j = 0; j < n - m; ++j) {
        double acc = v[tk.order.at(m + j)];
        auto kj = tk.k.row(m + j);
        for (std::size_t c = 0; c < m; ++c) {
            acc += kj[c] * v[tk.order.at(c)];
        }
        out[j] = acc;
    }
    return out;
}

// S B S^T in working coordinates. With B split at m into [[B11, B12], [B21, B22]]
// and V = K B11 / 2 + B21, S B S^T = V K^T + K V^T + B22; only the lower
// triangle is computed, so the result is exactly symmetric.
Matrix reduced_matrix(const TrapezoidalK& tk, std::size_t m, const Matrix& b) {
    const std::size_t n = b.rows();
    const std::size_t r = n - m;
    Matrix bw(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        auto src = b.row(tk.order.at(i));
        auto dst = bw.row(i);
        for (std::size_t j = 0; j < n; ++j) {
            dst[j] = src[tk.order.at(j)];
        }
    }
    Matrix v(r, m);
    for (std::size_t j = 0; j < r; ++j) {
        auto vj = v.row(j);
        auto kj = tk.k.row(m + j);
        auto bj = bw.row(m + j);
        std::copy(bj.begin(), bj.begin() + static_cast<std::ptrdiff_t>(m), vj.begin());
        for (std::size_t d = 0; d < m; ++d) {
            const double f = 0.5 * kj[d];
            auto bd = bw.row(d);
            for (std::size_t c = 0; c < m; ++c) {
                vj[c] += f * bd[c];
            }
        }
    }
    Matrix out(r, r);
    for (std::size_t j = 0; j < r; ++j) {
        auto vj = v.row(j);
        auto kj = tk.k.row(m + j);
        for (std::size_t l = 0; l <= j; ++l) {
            auto vl = v.row(l);
            auto kl = tk.k.row(m + l);
            double acc = bw(m + j, m + l);
            for (std::size_t c = 0; c < m; ++c) {
                acc += vj[c] * kl[c] + kj[c] * vl[c];
            }
            out(j, l) = acc;
            out(l, j) = acc;
        }
    }
    return out;
}

KktSolution failure(KktStatus status, std::string message, KktDiagnostics diag = {}) {
    KktSolution sol;
    sol.status = status;
    sol.message = std::move(message);
    sol.diagnostics = diag;
    return sol;
}

// Fills y, the rank contribution of the multiplier solve and the status.
void finish_with_multipliers(const KktSystem& sys, KktSolution& sol, const ImplicitFactors& factors,
                             double pivot_min) {
    try {
        sol.y = recover_multipliers(sys, sol.x, factors, pivot_min);
        sol.detected_rank += factors.rows.size();
    } catch (const SingularError& e) {
        sol.y = Vector(sys.m());
        sol.status = KktStatus::rank_deficient;
        sol.message = e.what();
    }
}

} // namespace

Matrix abaffian_selector(const AbaffianState& state) {
    const auto& tk = trapezoid(state);
    if (!tk.explicit_interchanges) {
        throw Error("abaffian_selector: requires an implicit LU state");
    }
    const std::size_t n = state.n;
    const std::size_t m = tk.pivots.size();
    Matrix s(n - m, n);
    for (std::size_t j = 0; j < n - m; ++j) {
        for (std::size_t c = 0; c < m; ++c) {
            s(j, tk.order.at(c)) = tk.k(m + j, c);
        }
        s(j, tk.order.at(m + j)) = 1.0;
    }
    return s;
}

KktSolution kkt_solve_modified_huang(const KktSystem& sys, const SolverControls& controls) {
    sys.validate();
    const std::size_t n = sys.n();
    const std::size_t m = sys.m();
    SolverControls ctl = controls;
    ctl.collect_incompatible = true;

    KktSolution sol;
    HuangResult phase1 =
        huang_solve(sys.A, sys.c, /*modified=*/true, ctl, std::nullopt, RowSelection::max_projection);
    const ImplicitFactors factors = extract_huang_factors(phase1.state, sys.A);
    const std::size_t accepted1 = phase1.state.accepted_rows;
    const std::size_t skipped1 = phase1.state.skipped_rows.size();

    // Rows of H B carry rounding noise of order eps * ||B||; dividing by
    // ||B|| lets the dependency test's absolute floor catch vanished rows.
    const Matrix& h = std::get<DenseH>(phase1.state.rep).h;
    const double scale = 1.0 / std::max(1.0, norm_inf(sys.B));
    const Matrix hb = scale * mat_mul(h, sys.B);
    const Vector hbv = scale * mat_vec(h, sys.b);
    HuangResult phase2 = huang_solve(hb, hbv, /*modified=*/true, ctl, std::move(phase1.state),
                                     RowSelection::max_projection);

    sol.x = phase2.x;
    sol.diagnostics.phase1_accepted = accepted1;
    sol.diagnostics.phase2_accepted = phase2.state.accepted_rows - accepted1;
    sol.diagnostics.phase2_skipped = phase2.state.skipped_rows.size() - skipped1;
    sol.detected_rank = phase2.state.accepted_rows;

    if (!phase2.state.incompatible_rows.empty()) {
        sol.status = KktStatus::incompatible;
        sol.message = "incompatible row " + std::to_string(phase2.state.incompatible_rows.front().row);
    } else if (accepted1 < m || sol.diagnostics.phase2_accepted < n - m) {
        sol.status = KktStatus::rank_deficient;
        sol.message = "detected rank " + std::to_string(accepted1) + " + " +
                      std::to_string(sol.diagnostics.phase2_accepted);
    }
    finish_with_multipliers(sys, sol, factors, controls.pivot_min);
    return sol;
}

namespace {

// Runs phase one; on breakdown returns the failure solution instead.
std::variant<LuPhaseOne, KktSolution> lu_phase_one(const KktSystem& sys,
                                                   const SolverControls& controls) {
    try {
        ImplicitLuResult lu = implicit_lu_solve(sys.A, sys.c, controls);
        ImplicitFactors factors = extract_implicit_factors(lu.state, sys.A);
        return LuPhaseOne{std::move(lu), std::move(factors)};
    } catch (const RankDeficientError& e) {
        KktDiagnostics diag;
        diag.phase1_accepted = e.step();
        return failure(KktStatus::rank_deficient, e.what(), diag);
    }
}

} // namespace

KktSolution kkt_solve_implicit_lu_direct(const KktSystem& sys, const SolverControls& controls) {
    sys.validate();
    const std::size_t n = sys.n();
    const std::size_t m = sys.m();
    auto first = lu_phase_one(sys, controls);
    if (auto* fail = std::get_if<KktSolution>(&first)) {
        return std::move(*fail);
    }
    auto& one = std::get<LuPhaseOne>(first);

    KktSolution sol;
    sol.diagnostics.phase1_accepted = m;
    if (m == n) {
        sol.x = one.lu.x;
        sol.detected_rank = m;
    } else {
        const auto& tk = trapezoid(one.lu.state);
        const Matrix sb = selector_times(tk, m, sys.B);
        const Vector sbv = selector_times(tk, m, sys.b);
        try {
            ImplicitLuResult two = implicit_lu_solve(sb, sbv, controls, one.lu.state);
            sol.x = std::move(two.x);
            sol.detected_rank = two.state.accepted_rows;
            sol.diagnostics.phase2_accepted = n - m;
        } catch (const RankDeficientError& e) {
            KktDiagnostics diag = sol.diagnostics;
            diag.phase2_accepted = e.step() - m;
            return failure(KktStatus::rank_deficient, e.what(), diag);
        }
    }
    finish_with_multipliers(sys, sol, one.factors, controls.pivot_min);
    return sol;
}

KktSolution kkt_solve_implicit_lu_reduced(const KktSystem& sys, const SolverControls& controls) {
    sys.validate();
    const std::size_t n = sys.n();
    const std::size_t m = sys.m();
    auto first = lu_phase_one(sys, controls);
    if (auto* fail = std::get_if<KktSolution>(&first)) {
        return std::move(*fail);
    }
    auto& one = std::get<LuPhaseOne>(first);

    KktSolution sol;
    sol.diagnostics.phase1_accepted = m;
    sol.x = one.lu.x;
    sol.detected_rank = m;
    if (m < n) {
        const auto& tk = trapezoid(one.lu.state);
        const std::size_t r = n - m;
        const Matrix reduced = reduced_matrix(tk, m, sys.B);
        const Vector rhs = selector_times(tk, m, sys.b - mat_vec(sys.B, one.lu.x));
        try {
            ImplicitLuResult q = implicit_lu_solve(reduced, rhs, controls);
            for (std::size_t l = 0; l < r; ++l) {
                const double ql = q.x[l];
                sol.x[tk.order.at(m + l)] += ql;
                auto kl = tk.k.row(m + l);
                for (std::size_t c = 0; c < m; ++c) {
                    sol.x[tk.order.at(c)] += ql * kl[c];
                }
            }
            sol.detected_rank += q.state.accepted_rows;
            sol.diagnostics.phase2_accepted = r;
        } catch (const RankDeficientError& e) {
            KktDiagnostics diag = sol.diagnostics;
            diag.phase2_accepted = e.step();
            return failure(KktStatus::rank_deficient, e.what(), diag);
        }
    }
    finish_with_multipliers(sys, sol, one.factors, controls.pivot_min);
    return sol;
}

} // namespace abskkt
