#include "abskkt/error.hpp"
#include "abskkt/kkt.hpp"
#include "abskkt/reference.hpp"
#include "abskkt/testgen.hpp"
#include "support.hpp"

#include <doctest.h>

#include <functional>

using namespace abskkt;

namespace {

using Solver = std::function<KktSolution(const KktSystem&)>;

const std::vector<std::pair<const char*, Solver>>& strategies() {
    static const std::vector<std::pair<const char*, Solver>> list{
        {"mod.huang", [](const KktSystem& s) { return kkt_solve_modified_huang(s); }},
        {"impl.lu8", [](const KktSystem& s) { return kkt_solve_implicit_lu_direct(s); }},
        {"impl.lu9", [](const KktSystem& s) { return kkt_solve_implicit_lu_reduced(s); }},
    };
    return list;
}

KktSystem hand_case() {
    return {Matrix::identity(2), Matrix{{1, 0}}, Vector{1, 1}, Vector{2}};
}

PlantedProblem ir_problem(std::size_t n, std::size_t m, std::uint64_t seed) {
    ProblemSpec spec;
    spec.family = Family::IR50;
    spec.n = n;
    spec.m = m;
    spec.seed = seed;
    return make_problem(spec);
}

double relative_error(const KktSolution& s, const PlantedProblem& p) {
    const Vector star = concat(p.x_star, p.y_star);
    return norm_inf(concat(s.x, s.y) - star) / norm_inf(star);
}

// Scaled residual bounds for the two KKT blocks.
void check_residual_contract(const KktSystem& sys, const KktSolution& s, double tol) {
    const auto [r1, r2] = kkt_residuals(sys, s.x, s.y);
    const double nx = norm_inf(s.x);
    const double ny = norm_inf(s.y);
    CHECK(norm_inf(r1) <= tol * (norm_inf(sys.B) * nx + norm_inf(sys.A) * ny + norm_inf(sys.b)));
    CHECK(norm_inf(r2) <= tol * (norm_inf(sys.A) * nx + norm_inf(sys.c)));
}

} // namespace

TEST_SUITE("KktSystem") {
    TEST_CASE("validation and assembly") {
        KktSystem s = hand_case();
        CHECK_NOTHROW(s.validate());
        CHECK(s.assemble() == Matrix{{1, 0, 1}, {0, 1, 0}, {1, 0, 0}});
        s.B(0, 1) = 1e-300;
        CHECK_THROWS_AS(s.validate(), Error);
        s = hand_case();
        s.c = Vector{1, 2};
        CHECK_THROWS_AS(s.validate(), DimensionError);
        s = {Matrix::identity(1), Matrix{{1}, {2}}, Vector{1}, Vector{1, 2}};
        CHECK_THROWS(s.validate());
    }

    TEST_CASE("kkt_residuals of the hand case") {
        const auto [r1, r2] = kkt_residuals(hand_case(), Vector{2, 1}, Vector{-1});
        CHECK(r1 == Vector{0, 0});
        CHECK(r2 == Vector{0});
    }
}

TEST_SUITE("ABS strategies") {
    TEST_CASE("hand case x = (2, 1), y = (-1)") {
        for (const auto& [name, solve] : strategies()) {
            CAPTURE(name);
            const KktSolution s = solve(hand_case());
            CHECK(s.status == KktStatus::ok);
            CHECK(test::max_abs_diff(s.x, Vector{2, 1}) <= 4 * test::kEps);
            CHECK(test::max_abs_diff(s.y, Vector{-1}) <= 4 * test::kEps);
            CHECK(s.detected_rank == 3);
        }
    }

    TEST_CASE("m = n: phase one fixes x = c and y = b - c") {
        const Vector b{3, -1, 4};
        const Vector c{1, 5, -9};
        const KktSystem sys{Matrix::identity(3), Matrix::identity(3), b, c};
        for (const auto& [name, solve] : strategies()) {
            CAPTURE(name);
            const KktSolution s = solve(sys);
            CHECK(s.status == KktStatus::ok);
            CHECK(s.x == c);
            CHECK(s.y == b - c);
            CHECK(s.diagnostics.phase2_accepted == 0);
        }
        CHECK(kkt_solve_modified_huang(sys).diagnostics.phase2_skipped == 3);
    }

    TEST_CASE("planted IR instances, n = 60, m = 40") {
        for (std::uint64_t seed = 1; seed <= 5; ++seed) {
            const PlantedProblem p = ir_problem(60, 40, seed);
            for (const auto& [name, solve] : strategies()) {
                CAPTURE(name);
                CAPTURE(seed);
                const KktSolution s = solve(p.sys);
                REQUIRE(s.status == KktStatus::ok);
                CHECK(s.detected_rank == 100);
                CHECK(relative_error(s, p) <= 1e-7);
                check_residual_contract(p.sys, s, 1e-9);
            }
        }
    }

    TEST_CASE("impl.lu8 residual at 1e-10 scale") {
        const PlantedProblem p = ir_problem(60, 40, 17);
        const KktSolution s = kkt_solve_implicit_lu_direct(p.sys);
        const auto [r1, r2] = kkt_residuals(p.sys, s.x, s.y);
        const double scale = norm_inf(p.sys.B) * norm_inf(s.x) + norm_inf(p.sys.A) * norm_inf(s.y) +
                             norm_inf(p.sys.b);
        CHECK(norm_inf(r1) <= 1e-10 * scale);
        CHECK(norm_inf(r2) <= 1e-10 * scale);
    }

    TEST_CASE("strategies agree pairwise on well-conditioned instances") {
        for (std::uint64_t seed = 1; seed <= 5; ++seed) {
            const PlantedProblem p = ir_problem(50 + 10 * seed, 20 + 5 * seed, seed + 100);
            std::vector<Vector> sols;
            for (const auto& [name, solve] : strategies()) {
                const KktSolution s = solve(p.sys);
                sols.push_back(concat(s.x, s.y));
            }
            for (std::size_t i = 0; i < sols.size(); ++i) {
                for (std::size_t j = 0; j < i; ++j) {
                    CHECK(norm_inf(sols[i] - sols[j]) <= 1e-7 * norm_inf(sols[j]));
                }
            }
        }
    }

    TEST_CASE("mod.huang eliminates exactly m phase-two rows on full-rank input") {
        for (std::uint64_t seed = 1; seed <= 5; ++seed) {
            const PlantedProblem p = ir_problem(40, 10 + 5 * seed, seed + 200);
            const KktSolution s = kkt_solve_modified_huang(p.sys);
            CHECK(s.diagnostics.phase1_accepted == p.sys.m());
            CHECK(s.diagnostics.phase2_accepted == p.sys.n() - p.sys.m());
            CHECK(s.diagnostics.phase2_skipped == p.sys.m());
        }
    }

    TEST_CASE("B = I: reduced variant matches the direct variant") {
        for (std::uint64_t seed = 1; seed <= 5; ++seed) {
            const Matrix a = gen_random_integer(12, 30, -9, 9, seed + 300);
            const PlantedProblem p = plant_kkt(Matrix::identity(30), a, SolutionKind::integer, seed);
            const KktSolution s8 = kkt_solve_implicit_lu_direct(p.sys);
            const KktSolution s9 = kkt_solve_implicit_lu_reduced(p.sys);
            CHECK(norm_inf(s8.x - s9.x) <= 1e-10 * norm_inf(s8.x));
        }
    }

    TEST_CASE("dependent constraint rows: mod.huang reports rank loss, implicit LU breaks down") {
        KktSystem sys{Matrix::identity(3), Matrix{{1, 1, 0}, {2, 2, 0}}, Vector{1, 1, 1}, Vector{2, 4}};
        const KktSolution h = kkt_solve_modified_huang(sys);
        CHECK(h.status == KktStatus::rank_deficient);
        CHECK(h.has_solution());
        CHECK(h.diagnostics.phase1_accepted == 1);
        CHECK(kkt_solve_implicit_lu_direct(sys).status == KktStatus::rank_deficient);
        CHECK(kkt_solve_implicit_lu_reduced(sys).status == KktStatus::rank_deficient);

        sys.c = Vector{2, 5};
        CHECK(kkt_solve_modified_huang(sys).status == KktStatus::incompatible);
    }
}

TEST_SUITE("recover_multipliers") {
    TEST_CASE("hand cases") {
        CHECK(test::max_abs_diff(recover_multipliers(hand_case(), Vector{2, 1}), Vector{-1}) <= 1e-15);
        const KktSystem sys{test::random_symmetric(4, 3), Matrix::identity(4), Vector{1, 2, 3, 4},
                            Vector{0, 0, 0, 0}};
        const Vector x{0.5, -1, 2, 0.25};
        CHECK(test::max_abs_diff(recover_multipliers(sys, x), sys.b - mat_vec(sys.B, x)) <= 1e-14);
    }

    TEST_CASE("random full-rank instance satisfies A^T y = b - B x") {
        for (std::uint64_t seed = 1; seed <= 5; ++seed) {
            const PlantedProblem p = ir_problem(50, 30, seed + 400);
            const Vector y = recover_multipliers(p.sys, p.x_star);
            const Vector rhs = p.sys.b - mat_vec(p.sys.B, p.x_star);
            const double scale = norm_inf(p.sys.A) * norm_inf(y) + norm_inf(rhs);
            CHECK(norm_inf(mat_tvec(p.sys.A, y) - rhs) <= 1e-9 * scale);
        }
    }

    TEST_CASE("singular L diagonal is reported") {
        const KktSystem sys = hand_case();
        ImplicitFactors f;
        f.p = Matrix{{1}, {0}};
        f.l = Matrix{{0}};
        f.order = Permutation(2);
        f.rows = {0};
        CHECK_THROWS_AS(recover_multipliers(sys, Vector{2, 1}, f), SingularError);
    }
}

TEST_SUITE("abaffian_selector") {
    TEST_CASE("rows are the nonzero rows of H and annihilate A^T") {
        const Matrix a = gen_random_integer(6, 15, -9, 9, 77);
        const ImplicitLuResult lu = implicit_lu_solve(a, Vector(6));
        const Matrix s = abaffian_selector(lu.state);
        REQUIRE(s.rows() == 9);
        CHECK(norm_inf(mat_mul(s, transpose(a))) <= 1e-10 * norm_inf(a));
        const Matrix h = reconstruct_abaffian(lu.state);
        const auto& tk = std::get<TrapezoidalK>(lu.state.rep);
        for (std::size_t j = 0; j < 9; ++j) {
            const std::size_t row = tk.order.at(6 + j);
            for (std::size_t c = 0; c < 15; ++c) {
                CHECK(s(j, c) == doctest::Approx(h(row, c)).epsilon(1e-14));
            }
        }
    }

    TEST_CASE("pivot block of H B H^T vanishes, so q1 is free") {
        const PlantedProblem p = ir_problem(30, 12, 91);
        const ImplicitLuResult lu = implicit_lu_solve(p.sys.A, p.sys.c);
        const Matrix h = reconstruct_abaffian(lu.state);
        const Matrix hbh = mat_mul(mat_mul(h, p.sys.B), transpose(h));
        const auto& pivots = std::get<TrapezoidalK>(lu.state.rep).pivots;
        double worst = 0.0;
        for (std::size_t r : pivots) {
            for (std::size_t c : pivots) {
                worst = std::max(worst, std::abs(hbh(r, c)));
            }
        }
        CHECK(worst <= 1e-10 * norm_inf(p.sys.B));
    }

    TEST_CASE("requires implicit LU with interchanges") {
        const ImplicitLxResult lx = implicit_lx_solve(Matrix{{1, 2}}, Vector{1});
        CHECK_THROWS_AS(abaffian_selector(lx.state), Error);
    }
}
