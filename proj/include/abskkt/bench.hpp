#pragma once

// Benchmark harness: runs KKT methods over planted problems and reports
// solution error, residual error, detected rank and solve time, plus the
// pairwise win-count tables.

#include "abskkt/abs.hpp"
#include "abskkt/kkt.hpp"
#include "abskkt/testgen.hpp"

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace abskkt {

enum class Method { mod_huang, impl_lu8, impl_lu9, lu_direct, range_space, null_space };

inline constexpr std::array<Method, 6> kAllMethods{Method::mod_huang,  Method::impl_lu8,
                                                   Method::impl_lu9,   Method::lu_direct,
                                                   Method::range_space, Method::null_space};

/// "mod.huang", "impl.lu8", "impl.lu9", "lu_direct", "range_space", "null_space".
std::string_view to_string(Method method) noexcept;
/// Throws ConfigError on unknown names.
Method parse_method(std::string_view name);

KktSolution solve_with(Method method, const KktSystem& sys, const SolverControls& controls);

struct ExperimentReport {
    std::size_t problem = 0;  ///< index of the problem within its suite
    std::string matrix_name;
    std::size_t n = 0;
    std::size_t m = 0;
    Method method = Method::mod_huang;
    KktStatus status = KktStatus::ok;
    /// +infinity when the method returned no solution.
    double solution_error = 0.0;
    double residual_error = 0.0;
    std::size_t rank = 0;
    double time_seconds = 0.0;
    /// Unset when not computed (n + m above the estimation limit).
    std::optional<double> condition;

    bool operator==(const ExperimentReport&) const = default;
};

struct RunOptions {
    int repeat = 1;
    bool timing = true;
};

/// Errors are relative infinity norms: the stacked (x, y) error over
/// max(1, ||(x*, y*)||) and the stacked residual over max(1, ||(b, c)||).
/// Time covers the solve only; with repeat > 1 the minimum is reported.
/// Solver exceptions are turned into a failed row, never propagated.
ExperimentReport run_experiment(const PlantedProblem& problem, Method method,
                                const SolverControls& controls, const RunOptions& options = {});

struct WinTable {
    std::array<std::array<int, 6>, 6> wins{};
    std::array<std::array<int, 6>, 6> ties{};

    int total_wins(Method m) const;
    int total_ties(Method m) const;
};

enum class ErrorMetric { solution, residual };

/// wins[i][k]: problems where method i had the strictly lower error and the
/// two differ by at least 1% relative; ties[i][k]: relative difference below
/// 1% (both zero counts as a tie). Only problems where both methods have
/// status ok are counted.
WinTable compute_win_table(const std::vector<ExperimentReport>& reports, ErrorMetric metric);

struct SuiteConfig {
    std::vector<ProblemSpec> problems;
    std::vector<Method> methods{kAllMethods.begin(), kAllMethods.end()};
    SolverControls controls;
    RunOptions run;
    unsigned jobs = 1;
    /// Condition numbers are estimated only when n + m is at most this.
    std::size_t condition_limit = 500;
};

struct SuiteResult {
    std::vector<ExperimentReport> reports;  ///< problem-major, methods in configured order
    WinTable solution_wins;
    WinTable residual_wins;

    bool any_failure() const;
};

/// Problems x methods. With jobs > 1 cells run concurrently; the report list
/// is the same as for a serial run (apart from measured times).
SuiteResult run_suite(const SuiteConfig& config);

/// The 24-problem grid: IR500, IR500R, IR500S, IR500B, RR100, IDF1, IDF2, IR50
/// at (n, m) = (1000, 900), (1200, 600), (1500, 200), each divided by `scale`.
/// Problem k gets seed splitmix64(base_seed + k).
std::vector<ProblemSpec> grid_preset(std::size_t scale, std::uint64_t base_seed);

/// JSON config: {"seed": S, "methods": [...], "problems": [{"family", "n",
/// "m", "seed"?, "perturbation"?: {"i1","i2","i3","i4"}}], "controls"?:
/// {"zero_tol", "reproject_count", "pivot_min"}, "repeat"?, "jobs"?}.
/// `seed_override` replaces the top-level seed. Throws ConfigError.
SuiteConfig parse_config_json(std::string_view text, std::optional<std::uint64_t> seed_override = {});

/// "0.50D-06" style: two significant digits, mantissa in [0.1, 1).
std::string format_fortran_d(double value);

std::string emit_table(const std::vector<ExperimentReport>& reports);
std::string emit_win_table(const WinTable& table, std::string_view title, std::size_t problems);
std::string emit_csv(const std::vector<ExperimentReport>& reports);
std::string emit_json(const std::vector<ExperimentReport>& reports);
/// Inverse of emit_csv. Throws ConfigError on malformed input.
std::vector<ExperimentReport> parse_csv(std::string_view text);

/// Matrix file: "n m", then the n rows of B, the m rows of A, b and c, all
/// whitespace separated. Throws ConfigError on malformed or short input.
KktSystem parse_matrix_file(std::string_view text);

} // namespace abskkt
