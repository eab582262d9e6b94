#include "abskkt/testgen.hpp"

#include "abskkt/error.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <utility>

namespace abskkt {

namespace {

constexpr std::array<std::pair<Family, std::string_view>, 10> kFamilyNames{{
    {Family::IR500, "IR500"},
    {Family::IR500R, "IR500R"},
    {Family::IR500C, "IR500C"},
    {Family::IR500S, "IR500S"},
    {Family::IR500B, "IR500B"},
    {Family::RR100, "RR100"},
    {Family::IDF1, "IDF1"},
    {Family::IDF2, "IDF2"},
    {Family::IDF3, "IDF3"},
    {Family::IR50, "IR50"},
}};

enum Stream : std::uint64_t { kStreamB = 1, kStreamA = 2, kStreamX = 3, kStreamY = 4 };

std::optional<PerturbTarget> family_target(Family f) {
    switch (f) {
    case Family::IR500R:
        return PerturbTarget::rows;
    case Family::IR500C:
        return PerturbTarget::columns;
    case Family::IR500S:
        return PerturbTarget::symmetric;
    case Family::IR500B:
        return PerturbTarget::both;
    default:
        return std::nullopt;
    }
}

void check_index(const char* what, std::size_t idx, std::size_t limit) {
    if (idx < 1 || idx > limit) {
        throw DimensionError(std::string("perturbation index ") + what + " out of range 1.." +
                                 std::to_string(limit),
                             limit, idx);
    }
}

void check_perturb(const PerturbSpec& p, std::size_t row_limit, std::size_t col_limit) {
    check_index("i1", p.i1, row_limit);
    check_index("i2", p.i2, row_limit);
    check_index("i3", p.i3, col_limit);
    if (p.i1 == p.i2) {
        throw Error("perturbation requires i1 != i2");
    }
    if (p.i4 < 1) {
        throw Error("perturbation exponent i4 must be at least 1");
    }
}

Matrix symmetrize(const Matrix& m, bool round_to_integer) {
    Matrix s(m.rows(), m.cols());
    for (std::size_t i = 0; i < m.rows(); ++i) {
        for (std::size_t j = 0; j <= i; ++j) {
            double v = (m(i, j) + m(j, i)) / 2.0;
            if (round_to_integer) {
                v = std::round(v);
            }
            s(i, j) = v;
            s(j, i) = v;
        }
    }
    return s;
}

} // namespace

std::string_view to_string(Family family) noexcept {
    for (const auto& [f, name] : kFamilyNames) {
        if (f == family) {
            return name;
        }
    }
    return "?";
}

Family parse_family(std::string_view name) {
    for (const auto& [f, fname] : kFamilyNames) {
        if (fname == name) {
            return f;
        }
    }
    throw ConfigError("unknown matrix family '" + std::string(name) + "'");
}

std::optional<PerturbSpec> ProblemSpec::effective_perturbation() const {
    const auto target = family_target(family);
    if (!target) {
        return perturbation;
    }
    PerturbSpec p = perturbation.value_or(PerturbSpec{});
    p.target = *target;
    return p;
}

void ProblemSpec::validate() const {
    if (n < 1 || m < 1) {
        throw ConfigError("problem dimensions must be positive");
    }
    if (m > n) {
        throw ConfigError("problem requires m <= n (got n=" + std::to_string(n) +
                          ", m=" + std::to_string(m) + ")");
    }
    const auto p = effective_perturbation();
    if (!p) {
        return;
    }
    try {
        switch (p->target) {
        case PerturbTarget::rows:
        case PerturbTarget::both:
            check_perturb(*p, m, n);
            break;
        case PerturbTarget::columns:
            check_perturb(*p, n, m);
            break;
        case PerturbTarget::symmetric:
            check_perturb(*p, n, n);
            break;
        }
    } catch (const Error& e) {
        throw ConfigError(std::string(to_string(family)) + ": " + e.what());
    }
}

// ---------------------------------------------------------------------------

std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::mt19937_64 make_stream(std::uint64_t seed, std::uint64_t stream) {
    return std::mt19937_64(splitmix64(splitmix64(seed) ^ (stream * 0xd1b54a32d192ed03ULL)));
}

std::int64_t uniform_int(std::mt19937_64& rng, std::int64_t lo, std::int64_t hi) {
    const std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
    if (span == 0) {
        return static_cast<std::int64_t>(rng());
    }
    // Reject the top partial bucket so every residue is equally likely.
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                                std::numeric_limits<std::uint64_t>::max() % span;
    std::uint64_t draw = rng();
    while (draw >= limit) {
        draw = rng();
    }
    return lo + static_cast<std::int64_t>(draw % span);
}

double uniform_real(std::mt19937_64& rng, double lo, double hi) {
    const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
    return lo + (hi - lo) * u;
}

Matrix gen_random_integer(std::size_t rows, std::size_t cols, std::int64_t lo, std::int64_t hi,
                          std::uint64_t seed) {
    if (!(lo < hi)) {
        throw Error("gen_random_integer: requires lo < hi");
    }
    auto rng = make_stream(seed, 0);
    Matrix a(rows, cols);
    for (std::size_t i = 0; i < rows; ++i) {
        for (std::size_t j = 0; j < cols; ++j) {
            a(i, j) = static_cast<double>(uniform_int(rng, lo, hi));
        }
    }
    return a;
}

Matrix gen_random_real(std::size_t rows, std::size_t cols, double lo, double hi, std::uint64_t seed) {
    if (!(lo < hi)) {
        throw Error("gen_random_real: requires lo < hi");
    }
    auto rng = make_stream(seed, 0);
    Matrix a(rows, cols);
    for (std::size_t i = 0; i < rows; ++i) {
        for (std::size_t j = 0; j < cols; ++j) {
            a(i, j) = uniform_real(rng, lo, hi);
        }
    }
    return a;
}

Matrix gen_idf(int kind, std::size_t m, std::size_t n) {
    if (kind < 1 || kind > 3) {
        throw Error("gen_idf: kind must be 1, 2 or 3");
    }
    Matrix a(m, n);
    const double centre = (static_cast<double>(m) + static_cast<double>(n)) / 2.0;
    for (std::size_t r = 0; r < m; ++r) {
        for (std::size_t c = 0; c < n; ++c) {
            const double i = static_cast<double>(r + 1);
            const double j = static_cast<double>(c + 1);
            switch (kind) {
            case 1:
                a(r, c) = std::abs(i - j);
                break;
            case 2:
                a(r, c) = (i - j) * (i - j);
                break;
            default:
                a(r, c) = std::abs(i + j - centre);
                break;
            }
        }
    }
    return a;
}

Matrix perturb_rows(const Matrix& a, const PerturbSpec& p) {
    check_perturb(p, a.rows(), a.cols());
    Matrix out = a;
    const std::size_t r1 = p.i1 - 1;
    const std::size_t r2 = p.i2 - 1;
    const std::size_t c3 = p.i3 - 1;
    for (std::size_t j = 0; j < a.cols(); ++j) {
        out(r2, j) = out(r1, j);
    }
    out(r1, c3) = 0.0;
    out(r2, c3) = std::ldexp(1.0, -p.i4);
    return out;
}

Matrix perturb_columns(const Matrix& a, const PerturbSpec& p) {
    check_perturb(p, a.cols(), a.rows());
    Matrix out = a;
    const std::size_t c1 = p.i1 - 1;
    const std::size_t c2 = p.i2 - 1;
    const std::size_t r3 = p.i3 - 1;
    for (std::size_t i = 0; i < a.rows(); ++i) {
        out(i, c2) = out(i, c1);
    }
    out(r3, c1) = 0.0;
    out(r3, c2) = std::ldexp(1.0, -p.i4);
    return out;
}

Matrix perturb_symmetric(const Matrix& b, const PerturbSpec& p) {
    if (!b.square()) {
        throw DimensionError("perturb_symmetric: matrix must be square", b.rows(), b.cols());
    }
    for (std::size_t i = 0; i < b.rows(); ++i) {
        for (std::size_t j = 0; j < i; ++j) {
            if (b(i, j) != b(j, i)) {
                throw Error("perturb_symmetric: input is not symmetric");
            }
        }
    }
    return symmetrize(perturb_columns(perturb_rows(b, p), p), false);
}

// ---------------------------------------------------------------------------

PlantedProblem plant_kkt(const Matrix& b_mat, const Matrix& a_mat, SolutionKind kind,
                         std::uint64_t seed) {
    const std::size_t n = b_mat.rows();
    const std::size_t m = a_mat.rows();
    auto draw = [&](std::size_t len, std::uint64_t stream) {
        auto rng = make_stream(seed, stream);
        Vector v(len);
        for (std::size_t i = 0; i < len; ++i) {
            v[i] = kind == SolutionKind::integer ? static_cast<double>(uniform_int(rng, -10, 10))
                                                 : uniform_real(rng, -10.0, 10.0);
        }
        return v;
    };
    PlantedProblem prob;
    prob.x_star = draw(n, kStreamX);
    prob.y_star = draw(m, kStreamY);
    prob.sys.B = b_mat;
    prob.sys.A = a_mat;
    prob.sys.c = mat_vec(a_mat, prob.x_star);
    prob.sys.b = mat_vec(b_mat, prob.x_star) + mat_tvec(a_mat, prob.y_star);
    prob.sys.validate();
    return prob;
}

PlantedProblem make_problem(const ProblemSpec& spec) {
    spec.validate();
    const std::size_t n = spec.n;
    const std::size_t m = spec.m;
    const std::uint64_t seed_b = splitmix64(spec.seed ^ kStreamB);
    const std::uint64_t seed_a = splitmix64(spec.seed ^ kStreamA);

    Matrix b_mat;
    Matrix a_mat;
    SolutionKind kind = SolutionKind::integer;
    switch (spec.family) {
    case Family::IR500:
    case Family::IR500R:
    case Family::IR500C:
    case Family::IR500S:
    case Family::IR500B:
        b_mat = symmetrize(gen_random_integer(n, n, -500, 500, seed_b), true);
        a_mat = gen_random_integer(m, n, -500, 500, seed_a);
        break;
    case Family::IR50:
        b_mat = symmetrize(gen_random_integer(n, n, -50, 50, seed_b), true);
        a_mat = gen_random_integer(m, n, -50, 50, seed_a);
        break;
    case Family::RR100:
        b_mat = symmetrize(gen_random_real(n, n, -100.0, 100.0, seed_b), false);
        a_mat = gen_random_real(m, n, -100.0, 100.0, seed_a);
        kind = SolutionKind::real;
        break;
    case Family::IDF1:
    case Family::IDF2:
    case Family::IDF3: {
        const int k = spec.family == Family::IDF1 ? 1 : spec.family == Family::IDF2 ? 2 : 3;
        b_mat = gen_idf(k, n, n);
        a_mat = gen_idf(k, m, n);
        break;
    }
    }

    if (const auto p = spec.effective_perturbation()) {
        switch (p->target) {
        case PerturbTarget::rows:
            a_mat = perturb_rows(a_mat, *p);
            break;
        case PerturbTarget::columns:
            a_mat = perturb_columns(a_mat, *p);
            break;
        case PerturbTarget::symmetric:
            b_mat = perturb_symmetric(b_mat, *p);
            break;
        case PerturbTarget::both:
            a_mat = perturb_rows(a_mat, *p);
            b_mat = perturb_symmetric(b_mat, *p);
            break;
        }
    }

    PlantedProblem prob = plant_kkt(b_mat, a_mat, kind, spec.seed);
    prob.spec = spec;
    return prob;
}

} // namespace abskkt
