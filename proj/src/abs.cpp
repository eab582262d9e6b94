#include "abskkt/abs.hpp"

#include "abskkt/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace abskkt {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

void check_system(const Matrix& a, const Vector& b) {
    if (a.rows() != b.size()) {
        throw DimensionError("right-hand side length", a.rows(), b.size());
    }
}

template <typename Rep>
AbaffianState take_start(std::optional<AbaffianState> start, std::size_t n, AbaffianState fresh,
                         const char* what) {
    if (!start) {
        return fresh;
    }
    if (start->n != n) {
        throw DimensionError(std::string(what) + ": start state dimension", n, start->n);
    }
    if (!std::holds_alternative<Rep>(start->rep)) {
        throw Error(std::string(what) + ": start state has the wrong Abaffian representation");
    }
    return std::move(*start);
}

// Scale for the compatibility test of a dependent row:
// max(1, ||b||, ||a||_1 ||x||), the last term bounding rounding in a^T x.
double compat_scale(std::span<const double> row, const Vector& x, double b_norm) {
    double row_l1 = 0.0;
    for (double e : row) {
        row_l1 += std::abs(e);
    }
    return std::max({1.0, b_norm, row_l1 * norm_inf(x)});
}

// Handles a row whose projection vanished. Returns the outcome to report.
StepOutcome dependent_row(AbaffianState& state, double residual, double tol, double scale,
                          std::size_t row_id, const SolverControls& controls) {
    StepOutcome out;
    out.row = row_id;
    out.residual = residual;
    if (std::abs(residual) <= tol * scale) {
        out.kind = StepKind::skipped_dependent;
        state.skipped_rows.push_back(row_id);
        ++state.rows_processed;
        return out;
    }
    out.kind = StepKind::incompatible;
    if (!controls.collect_incompatible) {
        throw IncompatibleError(row_id, residual);
    }
    ++state.rows_processed;
    state.incompatible_rows.push_back({row_id, residual});
    return out;
}

// Row picker for RowSelection::max_projection. Keeps the projected rows
// q_k = H a_k current under the rank-one updates of H.
class ProjectionPivot {
public:
    ProjectionPivot(const Matrix& a, const Matrix& h)
        : a_(a), q_(mat_mul(a, transpose(h))), norms_(a.rows()), done_(a.rows(), false) {
        for (std::size_t k = 0; k < a.rows(); ++k) {
            norms_[k] = norm_2(a.row_vector(k));
        }
    }

    std::size_t take() {
        std::size_t best = done_.size();
        double best_ratio = -1.0;
        for (std::size_t k = 0; k < done_.size(); ++k) {
            if (done_[k]) {
                continue;
            }
            const double ratio = norms_[k] > 0.0 ? norm_2(q_.row_vector(k)) / norms_[k] : 0.0;
            if (ratio > best_ratio) {
                best_ratio = ratio;
                best = k;
            }
        }
        done_[best] = true;
        return best;
    }

    // H <- H - p p^T / d  gives  q_k <- q_k - p (p^T a_k) / d.
    void update(const Vector& p, double d) {
        const Vector t = mat_vec(a_, p);
        rank1_update_in_place(q_, t, p, 1.0 / d);
    }

private:
    const Matrix& a_;
    Matrix q_;
    std::vector<double> norms_;
    std::vector<bool> done_;
};

Vector project_factored(const SearchHistory& hist, const Vector& v) {
    Vector p = v;
    for (std::size_t j = 0; j < hist.directions.size(); ++j) {
        const Vector& pj = hist.directions[j];
        const double t = dot(pj, v) / hist.pivots[j];
        for (std::size_t k = 0; k < p.size(); ++k) {
            p[k] -= t * pj[k];
        }
    }
    return p;
}

} // namespace

double SolverControls::effective_zero_tol(std::size_t n) const {
    return zero_tol ? *zero_tol : static_cast<double>(std::max<std::size_t>(n, 1)) * kEps * 100.0;
}

void SolverControls::validate() const {
    if (zero_tol && !(*zero_tol > 0.0)) {
        throw Error("zero_tol must be positive");
    }
    if (reproject_count < 1 || reproject_count > 3) {
        throw Error("reproject_count must be 1, 2 or 3");
    }
    if (!(pivot_min >= 0.0)) {
        throw Error("pivot_min must be non-negative");
    }
}

AbaffianState AbaffianState::initial_dense(std::size_t n) {
    AbaffianState s;
    s.n = n;
    s.x = Vector(n);
    s.rep = DenseH{Matrix::identity(n)};
    return s;
}

AbaffianState AbaffianState::initial_factored(std::size_t n) {
    AbaffianState s;
    s.n = n;
    s.x = Vector(n);
    s.rep = FactoredPD{};
    return s;
}

AbaffianState AbaffianState::initial_trapezoidal(std::size_t n, bool explicit_interchanges) {
    AbaffianState s;
    s.n = n;
    s.x = Vector(n);
    s.rep = TrapezoidalK{Matrix(n, n), Permutation(n), {}, explicit_interchanges};
    return s;
}

// ---------------------------------------------------------------------------
// Generic scaled step

StepOutcome scaled_abs_step(AbaffianState& state, const Vector& atv, double residual,
                            const Vector& z, const Vector& w, const SolverControls& controls,
                            double compat_scale_value, std::size_t row_id) {
    auto* dense = std::get_if<DenseH>(&state.rep);
    if (dense == nullptr) {
        throw Error("scaled_abs_step requires a dense Abaffian");
    }
    const std::size_t n = state.n;
    for (const Vector* v : {&atv, &z, &w}) {
        if (v->size() != n) {
            throw DimensionError("scaled_abs_step vector length", n, v->size());
        }
    }
    Matrix& h = dense->h;
    const double tol = controls.effective_zero_tol(n);

    const Vector s = mat_vec(h, atv);
    if (norm_inf(s) <= tol * std::max(1.0, norm_inf(atv))) {
        return dependent_row(state, residual, tol, compat_scale_value, row_id, controls);
    }

    const Vector p = mat_tvec(h, z);
    const double denom = dot(p, atv);
    const Vector u = mat_tvec(h, w);
    const double wts = dot(w, s);
    if (!(std::abs(denom) > controls.pivot_min) || denom == 0.0) {
        throw DegenerateParameterError("z^T H A^T v vanishes at row " + std::to_string(row_id));
    }
    if (!(std::abs(wts) > controls.pivot_min) || wts == 0.0) {
        throw DegenerateParameterError("w^T H A^T v vanishes at row " + std::to_string(row_id));
    }

    const double alpha = residual / denom;
    for (std::size_t k = 0; k < n; ++k) {
        state.x[k] -= alpha * p[k];
    }
    rank1_update_in_place(h, s, u, 1.0 / wts);

    state.history.rows.push_back(row_id);
    state.history.directions.push_back(p);
    state.history.pivots.push_back(denom);
    ++state.accepted_rows;
    ++state.rows_processed;

    StepOutcome out;
    out.kind = StepKind::advanced;
    out.pivot = denom;
    out.row = row_id;
    out.residual = residual;
    return out;
}

// ---------------------------------------------------------------------------
// Huang, dense Abaffian

HuangResult huang_solve(const Matrix& a, const Vector& b, bool modified,
                        const SolverControls& controls, std::optional<AbaffianState> start,
                        RowSelection selection) {
    controls.validate();
    check_system(a, b);
    const std::size_t n = a.cols();
    AbaffianState state =
        take_start<DenseH>(std::move(start), n, AbaffianState::initial_dense(n), "huang_solve");
    const double tol = controls.effective_zero_tol(n);
    const double b_norm = norm_inf(b);
    Matrix& h = std::get<DenseH>(state.rep).h;

    std::optional<ProjectionPivot> pivot;
    if (selection == RowSelection::max_projection) {
        pivot.emplace(a, h);
    }

    for (std::size_t step = 0; step < a.rows(); ++step) {
        const std::size_t i = pivot ? pivot->take() : step;
        const Vector ai = a.row_vector(i);
        const double residual = dot(ai, state.x) - b[i];
        Vector p = mat_vec(h, ai);
        if (norm_inf(p) <= tol * std::max(1.0, norm_inf(ai))) {
            dependent_row(state, residual, tol, compat_scale(a.row(i), state.x, b_norm), i,
                          controls);
            continue;
        }
        if (modified) {
            for (int j = 1; j < controls.reproject_count; ++j) {
                p = mat_vec(h, p);
            }
        }
        const double d = dot(p, ai);
        if (d == 0.0) {
            dependent_row(state, residual, tol, compat_scale(a.row(i), state.x, b_norm), i,
                          controls);
            continue;
        }
        const double alpha = residual / d;
        for (std::size_t k = 0; k < n; ++k) {
            state.x[k] -= alpha * p[k];
        }
        rank1_update_in_place(h, p, p, 1.0 / d);
        if (pivot) {
            pivot->update(p, d);
        }

        state.history.rows.push_back(i);
        state.history.directions.push_back(std::move(p));
        state.history.pivots.push_back(d);
        ++state.accepted_rows;
        ++state.rows_processed;
    }
    return {state.x, std::move(state)};
}

// ---------------------------------------------------------------------------
// Huang, factored Abaffian

HuangResult huang_solve_factored(const Matrix& a, const Vector& b, bool modified,
                                 const SolverControls& controls,
                                 std::optional<AbaffianState> start) {
    controls.validate();
    check_system(a, b);
    const std::size_t n = a.cols();
    AbaffianState state = take_start<FactoredPD>(std::move(start), n,
                                                 AbaffianState::initial_factored(n),
                                                 "huang_solve_factored");
    const double tol = controls.effective_zero_tol(n);
    const double b_norm = norm_inf(b);

    for (std::size_t i = 0; i < a.rows(); ++i) {
        const Vector ai = a.row_vector(i);
        const double residual = dot(ai, state.x) - b[i];
        Vector p = project_factored(state.history, ai);
        if (norm_inf(p) <= tol * std::max(1.0, norm_inf(ai))) {
            dependent_row(state, residual, tol, compat_scale(a.row(i), state.x, b_norm), i,
                          controls);
            continue;
        }
        if (modified) {
            for (int j = 1; j < controls.reproject_count; ++j) {
                p = project_factored(state.history, p);
            }
        }
        const double d = dot(ai, p);
        if (d == 0.0) {
            dependent_row(state, residual, tol, compat_scale(a.row(i), state.x, b_norm), i,
                          controls);
            continue;
        }
        const double alpha = residual / d;
        for (std::size_t k = 0; k < n; ++k) {
            state.x[k] -= alpha * p[k];
        }
        state.history.rows.push_back(i);
        state.history.directions.push_back(std::move(p));
        state.history.pivots.push_back(d);
        ++state.accepted_rows;
        ++state.rows_processed;
    }
    return {state.x, std::move(state)};
}

// ---------------------------------------------------------------------------
// Implicit LU, explicit interchanges

ImplicitLuResult implicit_lu_solve(const Matrix& a, const Vector& b,
                                   const SolverControls& controls,
                                   std::optional<AbaffianState> start) {
    controls.validate();
    check_system(a, b);
    const std::size_t n = a.cols();
    AbaffianState state = take_start<TrapezoidalK>(
        std::move(start), n, AbaffianState::initial_trapezoidal(n, true), "implicit_lu_solve");
    auto& tk = std::get<TrapezoidalK>(state.rep);
    if (!tk.explicit_interchanges) {
        throw Error("implicit_lu_solve: start state comes from implicit LX");
    }
    Matrix& k = tk.k;
    Vector& x = state.x;

    Vector aw(n);
    Vector s(n);
    for (std::size_t r = 0; r < a.rows(); ++r) {
        const std::size_t i = tk.pivots.size();
        if (i == n) {
            throw RankDeficientError(state.rows_processed, 0.0);
        }
        for (std::size_t j = 0; j < n; ++j) {
            aw[j] = a(r, tk.order.at(j));
        }
        // s = H a; rows of H at pivot positions are zero.
        std::size_t best = i;
        double best_abs = -1.0;
        for (std::size_t j = i; j < n; ++j) {
            auto kj = k.row(j);
            double acc = 0.0;
            for (std::size_t c = 0; c < i; ++c) {
                acc += kj[c] * aw[c];
            }
            acc += aw[j];
            s[j] = acc;
            if (std::abs(acc) > best_abs) {
                best_abs = std::abs(acc);
                best = j;
            }
        }
        if (!(best_abs > controls.pivot_min)) {
            throw RankDeficientError(state.rows_processed, best_abs);
        }
        if (best != i) {
            tk.order.swap(i, best);
            std::swap(x[i], x[best]);
            std::swap(s[i], s[best]);
            std::swap(aw[i], aw[best]);
            auto ki = k.row(i);
            auto kb = k.row(best);
            std::swap_ranges(ki.begin(), ki.begin() + static_cast<std::ptrdiff_t>(i), kb.begin());
        }
        const double d = s[i];

        // p = H^T e_i: first i entries are row i of K, then a unit.
        Vector p(n);
        {
            auto ki = k.row(i);
            for (std::size_t c = 0; c < i; ++c) {
                p[c] = ki[c];
            }
            p[i] = 1.0;
        }
        const double residual = dot(aw, x) - b[r];
        const double alpha = residual / d;
        for (std::size_t c = 0; c <= i; ++c) {
            x[c] -= alpha * p[c];
        }

        // Only the K block changes: rows below the new pivot.
        const double scale = 1.0 / d;
        for (std::size_t j = i + 1; j < n; ++j) {
            const double sj = s[j];
            auto kj = k.row(j);
            if (sj != 0.0) {
                for (std::size_t c = 0; c < i; ++c) {
                    kj[c] -= scale * (sj * p[c]);
                }
            }
            kj[i] = -(scale * sj);
        }
        {
            auto ki = k.row(i);
            std::fill(ki.begin(), ki.end(), 0.0);
        }

        tk.pivots.push_back(tk.order.at(i));
        state.history.rows.push_back(r);
        state.history.directions.push_back(std::move(p));
        state.history.pivots.push_back(d);
        ++state.accepted_rows;
        ++state.rows_processed;
    }
    Permutation order = tk.order;
    Vector xo = order.scatter(x);
    return {std::move(xo), std::move(state), std::move(order)};
}

// ---------------------------------------------------------------------------
// Implicit LX, no data movement

ImplicitLxResult implicit_lx_solve(const Matrix& a, const Vector& b,
                                   const SolverControls& controls,
                                   std::optional<AbaffianState> start) {
    controls.validate();
    check_system(a, b);
    const std::size_t n = a.cols();
    AbaffianState state = take_start<TrapezoidalK>(
        std::move(start), n, AbaffianState::initial_trapezoidal(n, false), "implicit_lx_solve");
    auto& tk = std::get<TrapezoidalK>(state.rep);
    if (tk.explicit_interchanges) {
        throw Error("implicit_lx_solve: start state comes from implicit LU");
    }
    Matrix& k = tk.k;
    Vector& x = state.x;
    std::vector<bool> is_pivot(n, false);
    for (std::size_t c : tk.pivots) {
        is_pivot[c] = true;
    }

    Vector s(n);
    for (std::size_t r = 0; r < a.rows(); ++r) {
        if (tk.pivots.size() == n) {
            throw RankDeficientError(state.rows_processed, 0.0);
        }
        auto ar = a.row(r);
        const auto& piv = tk.pivots;
        std::size_t best = n;
        double best_abs = -1.0;
        for (std::size_t j = 0; j < n; ++j) {
            if (is_pivot[j]) {
                s[j] = 0.0;
                continue;
            }
            auto kj = k.row(j);
            double acc = 0.0;
            for (std::size_t c : piv) {
                acc += kj[c] * ar[c];
            }
            acc += ar[j];
            s[j] = acc;
            if (std::abs(acc) > best_abs) {
                best_abs = std::abs(acc);
                best = j;
            }
        }
        if (!(best_abs > controls.pivot_min)) {
            throw RankDeficientError(state.rows_processed, best_abs);
        }
        const double d = s[best];

        Vector p(n);
        {
            auto kb = k.row(best);
            for (std::size_t c : piv) {
                p[c] = kb[c];
            }
            p[best] = 1.0;
        }
        const double residual = dot(ar, x.span()) - b[r];
        const double alpha = residual / d;
        for (std::size_t c : piv) {
            x[c] -= alpha * p[c];
        }
        x[best] -= alpha;

        const double scale = 1.0 / d;
        for (std::size_t j = 0; j < n; ++j) {
            if (is_pivot[j] || j == best) {
                continue;
            }
            const double sj = s[j];
            auto kj = k.row(j);
            if (sj != 0.0) {
                for (std::size_t c : piv) {
                    kj[c] -= scale * (sj * p[c]);
                }
            }
            kj[best] = -(scale * sj);
        }
        {
            auto kb = k.row(best);
            std::fill(kb.begin(), kb.end(), 0.0);
        }

        is_pivot[best] = true;
        tk.pivots.push_back(best);
        state.history.rows.push_back(r);
        state.history.directions.push_back(std::move(p));
        state.history.pivots.push_back(d);
        ++state.accepted_rows;
        ++state.rows_processed;
    }
    std::vector<std::size_t> pivot_columns = tk.pivots;
    Vector xo = x;
    return {std::move(xo), std::move(state), std::move(pivot_columns)};
}

// ---------------------------------------------------------------------------
// Factor extraction and reconstruction

namespace {

// Order that lists pivot columns first, then the rest ascending.
Permutation pivot_order(const TrapezoidalK& tk, std::size_t n) {
    if (tk.explicit_interchanges) {
        return tk.order;
    }
    std::vector<std::size_t> order = tk.pivots;
    std::vector<bool> used(n, false);
    for (std::size_t c : order) {
        used[c] = true;
    }
    for (std::size_t c = 0; c < n; ++c) {
        if (!used[c]) {
            order.push_back(c);
        }
    }
    return Permutation(std::move(order));
}

Matrix rows_times_p(const Matrix& a, const std::vector<std::size_t>& rows, const Matrix& p,
                    const Permutation& order) {
    Matrix l(rows.size(), p.cols());
    for (std::size_t r = 0; r < rows.size(); ++r) {
        auto ar = a.row(rows[r]);
        for (std::size_t t = 0; t < p.cols(); ++t) {
            double acc = 0.0;
            for (std::size_t j = 0; j < p.rows(); ++j) {
                acc += ar[order.at(j)] * p(j, t);
            }
            l(r, t) = acc;
        }
    }
    return l;
}

} // namespace

ImplicitFactors extract_implicit_factors(const AbaffianState& state, const Matrix& a) {
    const auto* tk = std::get_if<TrapezoidalK>(&state.rep);
    if (tk == nullptr) {
        throw Error("extract_implicit_factors: state is not from an implicit LU/LX run");
    }
    if (a.cols() != state.n) {
        throw DimensionError("extract_implicit_factors: A columns", state.n, a.cols());
    }
    const auto& hist = state.history;
    for (std::size_t r : hist.rows) {
        if (r >= a.rows()) {
            throw Error("extract_implicit_factors: state contains rows not present in A");
        }
    }
    const std::size_t m = hist.directions.size();
    Permutation order = pivot_order(*tk, state.n);
    Matrix p(state.n, m);
    for (std::size_t t = 0; t < m; ++t) {
        const Vector& pt = hist.directions[t];
        for (std::size_t j = 0; j < state.n; ++j) {
            p(j, t) = tk->explicit_interchanges ? pt[j] : pt[order.at(j)];
        }
    }
    Matrix l = rows_times_p(a, hist.rows, p, order);
    return {std::move(p), std::move(l), std::move(order), hist.rows};
}

ImplicitFactors extract_huang_factors(const AbaffianState& state, const Matrix& a) {
    if (std::holds_alternative<TrapezoidalK>(state.rep)) {
        throw Error("extract_huang_factors: state is from an implicit LU/LX run");
    }
    if (a.cols() != state.n) {
        throw DimensionError("extract_huang_factors: A columns", state.n, a.cols());
    }
    const auto& hist = state.history;
    const std::size_t r = hist.directions.size();
    Matrix p(state.n, r);
    for (std::size_t t = 0; t < r; ++t) {
        for (std::size_t j = 0; j < state.n; ++j) {
            p(j, t) = hist.directions[t][j];
        }
    }
    Permutation order(state.n);
    Matrix l = rows_times_p(a, hist.rows, p, order);
    return {std::move(p), std::move(l), std::move(order), hist.rows};
}

Matrix reconstruct_abaffian(const AbaffianState& state) {
    const std::size_t n = state.n;
    if (const auto* dense = std::get_if<DenseH>(&state.rep)) {
        return dense->h;
    }
    if (std::holds_alternative<FactoredPD>(state.rep)) {
        Matrix h = Matrix::identity(n);
        for (std::size_t j = 0; j < state.history.directions.size(); ++j) {
            const Vector& p = state.history.directions[j];
            rank1_update_in_place(h, p, p, 1.0 / state.history.pivots[j]);
        }
        return h;
    }
    const auto& tk = std::get<TrapezoidalK>(state.rep);
    Matrix h(n, n);
    if (tk.explicit_interchanges) {
        const std::size_t np = tk.pivots.size();
        for (std::size_t r = np; r < n; ++r) {
            for (std::size_t c = 0; c < np; ++c) {
                h(tk.order.at(r), tk.order.at(c)) = tk.k(r, c);
            }
            h(tk.order.at(r), tk.order.at(r)) = 1.0;
        }
        return h;
    }
    std::vector<bool> is_pivot(n, false);
    for (std::size_t c : tk.pivots) {
        is_pivot[c] = true;
    }
    for (std::size_t r = 0; r < n; ++r) {
        if (is_pivot[r]) {
            continue;
        }
        for (std::size_t c : tk.pivots) {
            h(r, c) = tk.k(r, c);
        }
        h(r, r) = 1.0;
    }
    return h;
}

Vector original_iterate(const AbaffianState& state) {
    if (const auto* tk = std::get_if<TrapezoidalK>(&state.rep)) {
        if (tk->explicit_interchanges) {
            return tk->order.scatter(state.x);
        }
    }
    return state.x;
}

Vector general_solution_apply(const AbaffianState& state, const Vector& q) {
    if (q.size() != state.n) {
        throw DimensionError("general_solution_apply: q length", state.n, q.size());
    }
    if (std::holds_alternative<FactoredPD>(state.rep)) {
        // H is symmetric: H^T q = q - P D^{-1} P^T q.
        return state.x + project_factored(state.history, q);
    }
    return original_iterate(state) + mat_tvec(reconstruct_abaffian(state), q);
}

} // namespace abskkt
