#pragma once

// ABS strategies for the saddle-point system
//
//     [ B  A^T ] [x]   [b]
//     [ A  0   ] [y] = [c],      B symmetric n x n, A m x n, m <= n.
//
// Each strategy first solves the underdetermined block A x = c, then uses the
// resulting Abaffian H_{m+1} (which annihilates A^T) to reduce B x + A^T y = b
// to equations in x alone, and finally recovers y from A^T y = b - B x.

#include "abskkt/abs.hpp"
#include "abskkt/dense.hpp"

#include <string>
#include <utility>

namespace abskkt {

struct KktSystem {
    Matrix B;
    Matrix A;
    Vector b;
    Vector c;

    std::size_t n() const noexcept { return B.rows(); }
    std::size_t m() const noexcept { return A.rows(); }

    /// Checks shapes, m <= n and exact symmetry of B. Throws DimensionError / Error.
    void validate() const;
    /// The assembled (n+m) x (n+m) symmetric matrix.
    Matrix assemble() const;
};

enum class KktStatus { ok, rank_deficient, incompatible, reference_failure };

const char* to_string(KktStatus status) noexcept;

/// Per-phase step counts of an ABS strategy (zero for reference solvers).
struct KktDiagnostics {
    std::size_t phase1_accepted = 0;
    std::size_t phase2_accepted = 0;
    std::size_t phase2_skipped = 0;
};

struct KktSolution {
    Vector x;  ///< empty when the method produced no solution
    Vector y;
    std::size_t detected_rank = 0;
    KktStatus status = KktStatus::ok;
    std::string message;
    KktDiagnostics diagnostics;

    bool has_solution() const noexcept { return !x.empty(); }
};

/// (B x + A^T y - b, A x - c)
std::pair<Vector, Vector> kkt_residuals(const KktSystem& sys, const Vector& x, const Vector& y);

/// Modified Huang on A x = c, then on H_{m+1} B x = H_{m+1} b continuing from
/// the phase-one state, then multiplier recovery with the Huang factors.
/// Rank-deficient input is handled: dependent rows are skipped and reported
/// through status rank_deficient, while x and y are still returned.
KktSolution kkt_solve_modified_huang(const KktSystem& sys, const SolverControls& controls = {});

/// Implicit LU on A x = c, then continued implicit LU on S_m B x = S_m b with
/// S_m = [K_m, I_{n-m}] the nonzero rows of H_{m+1}.
KktSolution kkt_solve_implicit_lu_direct(const KktSystem& sys, const SolverControls& controls = {});

/// Implicit LU on A x = c, then the (n-m)-dimensional reduced system
/// S_m B S_m^T q_2 = S_m (b - B x_{m+1}) by implicit LU, x = x_{m+1} + S_m^T q_2.
KktSolution kkt_solve_implicit_lu_reduced(const KktSystem& sys, const SolverControls& controls = {});

/// Solves L^T y = P^T (b - B x) with L = A P from the given factors. Rows of A
/// not covered by the factors get a zero multiplier. Throws SingularError if a
/// diagonal entry of L is not above pivot_min.
Vector recover_multipliers(const KktSystem& sys, const Vector& x, const ImplicitFactors& factors,
                           double pivot_min = 0.0);

/// As above, building the factors with an implicit LU pass over the rows of A.
Vector recover_multipliers(const KktSystem& sys, const Vector& x, const SolverControls& controls = {});

/// S_m = [K_m, I] of a phase-one implicit LU state, in original coordinates:
/// an (n - m) x n matrix whose rows are the nonzero rows of H_{m+1}.
Matrix abaffian_selector(const AbaffianState& state);

} // namespace abskkt
