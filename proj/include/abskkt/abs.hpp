#pragma once

// Scaled ABS iteration and its Huang / implicit LU parameterizations.
//
// Every solver processes the rows a_1, ..., a_m of A x = b one at a time,
// starting from x_1 = 0 and H_1 = I unless a previous state is supplied.
// After i accepted steps the Abaffian H_{i+1} annihilates the processed rows
// (H_{i+1} A_i^T = 0), and x_{i+1} + H_{i+1}^T q solves the processed
// subsystem for every q.

#include "abskkt/dense.hpp"

#include <cstddef>
#include <optional>
#include <variant>
#include <vector>

namespace abskkt {

struct SolverControls {
    /// Relative threshold for declaring s_i = 0. Unset means n * eps * 100.
    std::optional<double> zero_tol;
    /// Number of projections in the modified Huang search vector, p = H^j a.
    int reproject_count = 2;
    /// Smallest admissible |pivot| for implicit LU / LX, and the default
    /// singularity threshold of the reference factorizations. Zero means
    /// only exact breakdown is reported.
    double pivot_min = 0.0;
    /// Record incompatible rows and keep going instead of throwing.
    bool collect_incompatible = false;

    double effective_zero_tol(std::size_t n) const;
    /// Throws Error when a field is out of range.
    void validate() const;
};

/// Dense Abaffian (Huang and the generic scaled step).
struct DenseH {
    Matrix h;
};

/// H = I - P D^{-1} P^T, with P and D the accepted directions and pivots kept
/// in AbaffianState::history. H is never formed.
struct FactoredPD {};

/// Implicit LU / LX Abaffian. Rows of H belonging to pivot positions are
/// zero; the remaining rows are [K, I]. `k` is an n x n buffer whose entries
/// k(r, c) are meaningful for non-pivot rows r and pivot columns c.
///
/// With explicit interchanges (implicit LU) `k`, the iterate and the
/// directions are held in working coordinates: working position j carries
/// original column `order.at(j)`, and the first `pivots.size()` positions are
/// the pivots in order. With implicit interchanges (LX) everything stays in
/// original coordinates and `order` is the identity.
struct TrapezoidalK {
    Matrix k;
    Permutation order;
    std::vector<std::size_t> pivots;
    bool explicit_interchanges = true;
};

using AbaffianRep = std::variant<DenseH, FactoredPD, TrapezoidalK>;

struct IncompatibleRow {
    std::size_t row = 0;
    double residual = 0.0;
};

/// Accepted steps in processing order.
struct SearchHistory {
    std::vector<std::size_t> rows;   ///< row index within the system that produced the step
    std::vector<Vector> directions;  ///< p_i, in the coordinates of the state's iterate
    std::vector<double> pivots;      ///< d_i = p_i^T a_i (signed)
};

struct AbaffianState {
    std::size_t n = 0;
    std::size_t rows_processed = 0;
    Vector x;
    AbaffianRep rep;
    std::size_t accepted_rows = 0;
    std::vector<std::size_t> skipped_rows;
    std::vector<IncompatibleRow> incompatible_rows;
    SearchHistory history;

    /// x_1 = 0, H_1 = I in the requested representation.
    static AbaffianState initial_dense(std::size_t n);
    static AbaffianState initial_factored(std::size_t n);
    static AbaffianState initial_trapezoidal(std::size_t n, bool explicit_interchanges);

    /// Detected rank of the rows processed so far.
    std::size_t rank() const noexcept { return accepted_rows; }
};

enum class StepKind { advanced, skipped_dependent, incompatible };

struct StepOutcome {
    StepKind kind = StepKind::advanced;
    double pivot = 0.0;
    std::optional<std::size_t> pivot_index;
    std::size_t row = 0;
    double residual = 0.0;
};

/// One scaled-ABS step on a DenseH state.
///
/// `atv` is A^T v_i (for the basic class, v_i = e_i, the i-th row a_i) and
/// `residual` is r_i^T v_i = v_i^T (A x_i - b). `compat_scale` multiplies
/// zero_tol in the compatibility test for dependent rows. The v_i must be
/// linearly independent across calls; this is not checked.
///
/// Throws DegenerateParameterError when s != 0 but z^T s or w^T s is not
/// above pivot_min (or is exactly zero).
StepOutcome scaled_abs_step(AbaffianState& state, const Vector& atv, double residual,
                            const Vector& z, const Vector& w, const SolverControls& controls,
                            double compat_scale, std::size_t row_id);

struct HuangResult {
    Vector x;
    AbaffianState state;
};

/// Order in which huang_solve visits the rows.
enum class RowSelection {
    natural,
    /// Next row maximizes ||H a_k||_2 / ||a_k||_2 over the unvisited rows
    /// (lowest index on ties). Costs an extra O(rows * n) per step.
    max_projection,
};

/// Huang (modified = false) or modified Huang on A x = b with a dense Abaffian.
/// Dependent compatible rows are skipped; an incompatible row throws
/// IncompatibleError unless controls.collect_incompatible is set.
/// `start` must hold a DenseH of matching dimension.
HuangResult huang_solve(const Matrix& a, const Vector& b, bool modified,
                        const SolverControls& controls = {},
                        std::optional<AbaffianState> start = std::nullopt,
                        RowSelection selection = RowSelection::natural);

/// Same iteration with H kept as I - P D^{-1} P^T. `start` must hold FactoredPD.
HuangResult huang_solve_factored(const Matrix& a, const Vector& b, bool modified,
                                 const SolverControls& controls = {},
                                 std::optional<AbaffianState> start = std::nullopt);

struct ImplicitLuResult {
    Vector x;  ///< original column order
    AbaffianState state;
    Permutation permutation;  ///< working position j holds original column permutation.at(j)
};

/// Implicit LU with explicit column interchanges. Rows must be independent:
/// a step whose max |s_j| is not above pivot_min throws RankDeficientError.
/// Passing the state of an earlier run continues it with further rows given
/// in original column order.
ImplicitLuResult implicit_lu_solve(const Matrix& a, const Vector& b,
                                   const SolverControls& controls = {},
                                   std::optional<AbaffianState> start = std::nullopt);

struct ImplicitLxResult {
    Vector x;
    AbaffianState state;
    std::vector<std::size_t> pivot_columns;
};

/// Implicit LX: as implicit_lu_solve without moving any data.
ImplicitLxResult implicit_lx_solve(const Matrix& a, const Vector& b,
                                   const SolverControls& controls = {},
                                   std::optional<AbaffianState> start = std::nullopt);

/// P and L = A P of the implicit factorization V^T A P = L.
///
/// `p` has one row per variable, listed in `order` (row j of p belongs to
/// original variable order.at(j)); for implicit LU/LX this is pivot order and
/// p is unit upper triangular. `rows` are the accepted rows of A, so l is
/// A(rows, :) * P, square and lower triangular.
struct ImplicitFactors {
    Matrix p;
    Matrix l;
    Permutation order;
    std::vector<std::size_t> rows;
};

/// Requires a TrapezoidalK state produced from `a` alone (no continuation rows).
ImplicitFactors extract_implicit_factors(const AbaffianState& state, const Matrix& a);
/// Factors for a Huang run: P holds the accepted search directions.
ImplicitFactors extract_huang_factors(const AbaffianState& state, const Matrix& a);

/// H_i in original coordinates for any representation.
Matrix reconstruct_abaffian(const AbaffianState& state);
/// The iterate x_i in original coordinates.
Vector original_iterate(const AbaffianState& state);

/// x_i + H_i^T q, both in original coordinates.
Vector general_solution_apply(const AbaffianState& state, const Vector& q);

} // namespace abskkt
