#pragma once

// Seeded generators for the ill-conditioned test families and planted KKT
// problems.
//
// Random streams: every generator call derives its own 64-bit seed with
// SplitMix64 from (problem seed, stream id) and draws from std::mt19937_64,
// whose output sequence is fixed by the C++ standard. Integer and real
// variates are mapped from raw 64-bit outputs by the functions below (the
// standard distributions are implementation-defined), so generated problems
// are identical across platforms and standard libraries.

#include "abskkt/dense.hpp"
#include "abskkt/kkt.hpp"

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <string_view>

namespace abskkt {

enum class Family { IR500, IR500R, IR500C, IR500S, IR500B, RR100, IDF1, IDF2, IDF3, IR50 };

std::string_view to_string(Family family) noexcept;
/// Throws ConfigError on unknown names.
Family parse_family(std::string_view name);

enum class PerturbTarget { rows, columns, symmetric, both };

/// Near-dependency perturbation. Indices are 1-based, as in the usual
/// description of the procedure: row i1 is copied into row i2, entry
/// (i1, i3) is set to zero and entry (i2, i3) to 2^-i4.
struct PerturbSpec {
    std::size_t i1 = 1;
    std::size_t i2 = 2;
    std::size_t i3 = 1;
    int i4 = 40;
    PerturbTarget target = PerturbTarget::rows;

    bool operator==(const PerturbSpec&) const = default;
};

struct ProblemSpec {
    Family family = Family::IR500;
    std::size_t n = 0;
    std::size_t m = 0;
    std::uint64_t seed = 0;
    std::optional<PerturbSpec> perturbation;

    /// Throws ConfigError on inconsistent dimensions or indices.
    void validate() const;
    /// The perturbation to apply (the default one for R/C/S/B families when unset).
    std::optional<PerturbSpec> effective_perturbation() const;
};

struct PlantedProblem {
    ProblemSpec spec;
    KktSystem sys;
    Vector x_star;
    Vector y_star;
    /// Condition number of the assembled KKT matrix, when computed.
    std::optional<double> condition;

    std::string name() const { return std::string(to_string(spec.family)); }
};

/// SplitMix64 finalizer; used to derive independent stream seeds.
std::uint64_t splitmix64(std::uint64_t x) noexcept;
std::mt19937_64 make_stream(std::uint64_t seed, std::uint64_t stream);
/// Uniform integer in [lo, hi] by rejection sampling on raw 64-bit output.
std::int64_t uniform_int(std::mt19937_64& rng, std::int64_t lo, std::int64_t hi);
/// Uniform double in [lo, hi) from the top 53 bits.
double uniform_real(std::mt19937_64& rng, double lo, double hi);

Matrix gen_random_integer(std::size_t rows, std::size_t cols, std::int64_t lo, std::int64_t hi,
                          std::uint64_t seed);
Matrix gen_random_real(std::size_t rows, std::size_t cols, double lo, double hi, std::uint64_t seed);

/// kind 1: |i-j|, kind 2: |i-j|^2, kind 3: |i+j-(m+n)/2|, with 1-based i, j.
Matrix gen_idf(int kind, std::size_t m, std::size_t n);

Matrix perturb_rows(const Matrix& a, const PerturbSpec& p);
Matrix perturb_columns(const Matrix& a, const PerturbSpec& p);
/// Row procedure, then the mirrored column procedure, then (M + M^T) / 2.
Matrix perturb_symmetric(const Matrix& b, const PerturbSpec& p);

enum class SolutionKind { integer, real };

/// Plants x*, y* uniformly in [-10, 10] and sets c = A x*, b = B x* + A^T y*.
PlantedProblem plant_kkt(const Matrix& b_mat, const Matrix& a_mat, SolutionKind kind,
                         std::uint64_t seed);

/// Builds B and A for the family (with its perturbations) and plants a solution.
PlantedProblem make_problem(const ProblemSpec& spec);

} // namespace abskkt
