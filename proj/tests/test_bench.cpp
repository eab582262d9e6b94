#include "abskkt/bench.hpp"
#include "abskkt/error.hpp"
#include "support.hpp"

#include <doctest.h>

#include <cmath>
#include <limits>

using namespace abskkt;

namespace {

ProblemSpec spec(Family f, std::size_t n, std::size_t m, std::uint64_t seed) {
    ProblemSpec s;
    s.family = f;
    s.n = n;
    s.m = m;
    s.seed = seed;
    return s;
}

PlantedProblem hand_problem() {
    PlantedProblem p;
    p.sys = {Matrix::identity(2), Matrix{{1, 0}}, Vector{1, 1}, Vector{2}};
    p.x_star = Vector{2, 1};
    p.y_star = Vector{-1};
    return p;
}

ExperimentReport row(std::size_t problem, Method m, double err, KktStatus st = KktStatus::ok) {
    ExperimentReport r;
    r.problem = problem;
    r.matrix_name = "IR50";
    r.n = 4;
    r.m = 2;
    r.method = m;
    r.status = st;
    r.solution_error = err;
    r.residual_error = err;
    return r;
}

SuiteConfig small_suite() {
    SuiteConfig cfg;
    cfg.problems = {spec(Family::IR50, 30, 20, 1), spec(Family::RR100, 25, 5, 2),
                    spec(Family::IR500S, 30, 10, 3), spec(Family::IDF2, 20, 8, 4)};
    cfg.run.timing = false;
    return cfg;
}

} // namespace

TEST_SUITE("methods") {
    TEST_CASE("names round trip") {
        for (Method m : kAllMethods) {
            CHECK(parse_method(to_string(m)) == m);
        }
        CHECK(to_string(Method::mod_huang) == "mod.huang");
        CHECK(to_string(Method::impl_lu9) == "impl.lu9");
        CHECK_THROWS_AS(parse_method("lu"), ConfigError);
    }
}

TEST_SUITE("run_experiment") {
    TEST_CASE("hand case through every method") {
        for (Method m : kAllMethods) {
            CAPTURE(to_string(m));
            const ExperimentReport r = run_experiment(hand_problem(), m, {});
            CHECK(r.status == KktStatus::ok);
            CHECK(r.residual_error <= 4 * test::kEps);
            CHECK(r.solution_error <= 4 * test::kEps);
            CHECK(r.rank == 3);
            CHECK(r.n == 2);
            CHECK(r.m == 1);
        }
    }

    TEST_CASE("IR-type 60/40: every method below 1e-10 residual") {
        const PlantedProblem p = make_problem(spec(Family::IR500, 60, 40, 11));
        for (Method m : kAllMethods) {
            CAPTURE(to_string(m));
            const ExperimentReport r = run_experiment(p, m, {});
            CHECK(r.status == KktStatus::ok);
            CHECK(r.residual_error <= 1e-10);
            CHECK(r.rank <= r.n + r.m);
        }
    }

    TEST_CASE("failures become rows with infinite errors") {
        PlantedProblem p = hand_problem();
        p.sys.B = Matrix(2, 2);
        const ExperimentReport r = run_experiment(p, Method::range_space, {});
        CHECK(r.status == KktStatus::reference_failure);
        CHECK(std::isinf(r.solution_error));
        CHECK(std::isinf(r.residual_error));
    }

    TEST_CASE("timing off reports zero; repeat keeps the minimum") {
        const PlantedProblem p = make_problem(spec(Family::IR50, 40, 20, 3));
        CHECK(run_experiment(p, Method::impl_lu8, {}, {1, false}).time_seconds == 0.0);
        CHECK(run_experiment(p, Method::impl_lu8, {}, {3, true}).time_seconds > 0.0);
    }
}

TEST_SUITE("win tables") {
    TEST_CASE("wins, ties and exclusions") {
        const std::vector<ExperimentReport> reports{
            row(0, Method::mod_huang, 1e-10),
            row(0, Method::impl_lu8, 1e-12),
            row(0, Method::range_space, 1.005e-10),
            row(1, Method::mod_huang, 0.0),
            row(1, Method::impl_lu8, 0.0),
            row(1, Method::range_space, 1.0, KktStatus::reference_failure),
        };
        const WinTable t = compute_win_table(reports, ErrorMetric::solution);
        const auto h = static_cast<std::size_t>(Method::mod_huang);
        const auto l = static_cast<std::size_t>(Method::impl_lu8);
        const auto r = static_cast<std::size_t>(Method::range_space);
        CHECK(t.wins[l][h] == 1);
        CHECK(t.wins[h][l] == 0);
        CHECK(t.ties[h][l] == 1);
        CHECK(t.ties[l][h] == 1);
        CHECK(t.ties[h][r] == 1);
        CHECK(t.wins[l][r] == 1);
        CHECK(t.total_wins(Method::impl_lu8) == 2);
        CHECK(t.total_ties(Method::mod_huang) == 2);
    }

    TEST_CASE("accounting identity and zero diagonal on a real suite") {
        const SuiteResult res = run_suite(small_suite());
        for (const WinTable* t : {&res.solution_wins, &res.residual_wins}) {
            for (Method a : kAllMethods) {
                const auto i = static_cast<std::size_t>(a);
                CHECK(t->wins[i][i] == 0);
                CHECK(t->ties[i][i] == 0);
                for (Method b : kAllMethods) {
                    const auto k = static_cast<std::size_t>(b);
                    if (i == k) {
                        continue;
                    }
                    int both_ok = 0;
                    for (std::size_t p = 0; p < 4; ++p) {
                        both_ok += res.reports[p * 6 + i].status == KktStatus::ok &&
                                   res.reports[p * 6 + k].status == KktStatus::ok;
                    }
                    CHECK(t->wins[i][k] + t->wins[k][i] + t->ties[i][k] == both_ok);
                    CHECK(t->ties[i][k] == t->ties[k][i]);
                }
            }
        }
    }
}

TEST_SUITE("run_suite") {
    TEST_CASE("2 problems x 2 methods give 4 rows in configured order") {
        SuiteConfig cfg;
        cfg.problems = {spec(Family::IR50, 12, 6, 1), spec(Family::RR100, 10, 3, 2)};
        cfg.methods = {Method::null_space, Method::mod_huang};
        const SuiteResult res = run_suite(cfg);
        REQUIRE(res.reports.size() == 4);
        CHECK(res.reports[0].problem == 0);
        CHECK(res.reports[0].method == Method::null_space);
        CHECK(res.reports[1].method == Method::mod_huang);
        CHECK(res.reports[3].problem == 1);
        CHECK(res.reports[3].matrix_name == "RR100");
        CHECK(res.reports[0].condition.has_value());
        CHECK_FALSE(res.any_failure());
    }

    TEST_CASE("parallel run equals serial run") {
        SuiteConfig cfg = small_suite();
        const SuiteResult serial = run_suite(cfg);
        cfg.jobs = 4;
        const SuiteResult parallel = run_suite(cfg);
        CHECK(serial.reports == parallel.reports);
        CHECK(emit_csv(serial.reports) == emit_csv(parallel.reports));
    }

    TEST_CASE("condition estimate is skipped above the limit") {
        SuiteConfig cfg;
        cfg.problems = {spec(Family::IR50, 12, 6, 1)};
        cfg.condition_limit = 10;
        CHECK_FALSE(run_suite(cfg).reports[0].condition.has_value());
    }

    TEST_CASE("invalid controls or specs fail before running") {
        SuiteConfig cfg;
        cfg.problems = {spec(Family::IR50, 5, 6, 1)};
        CHECK_THROWS_AS(run_suite(cfg), ConfigError);
        cfg.problems = {spec(Family::IR50, 6, 5, 1)};
        cfg.controls.reproject_count = 9;
        CHECK_THROWS_AS(run_suite(cfg), Error);
    }
}

TEST_SUITE("preset") {
    TEST_CASE("24 problems, scaled shapes, derived seeds") {
        const auto p = grid_preset(10, 1);
        REQUIRE(p.size() == 24);
        CHECK(p[0].family == Family::IR500);
        CHECK(p[0].n == 100);
        CHECK(p[0].m == 90);
        CHECK(p[1].n == 120);
        CHECK(p[1].m == 60);
        CHECK(p[2].n == 150);
        CHECK(p[2].m == 20);
        CHECK(p[23].family == Family::IR50);
        CHECK(p[5].seed == splitmix64(1 + 5));
        CHECK(grid_preset(1, 1)[0].n == 1000);
        CHECK(grid_preset(10000, 1)[2].m == 2);
        CHECK_THROWS_AS(grid_preset(0, 1), ConfigError);
    }
}

TEST_SUITE("config") {
    TEST_CASE("full document") {
        const SuiteConfig cfg = parse_config_json(R"({
            "seed": 7,
            "methods": ["impl.lu8", "null_space"],
            "problems": [
                {"family": "IR500R", "n": 30, "m": 10,
                 "perturbation": {"i1": 2, "i2": 3, "i3": 4, "i4": 30}},
                {"family": "IDF1", "n": 20, "m": 5, "seed": 123}
            ],
            "controls": {"zero_tol": 1e-12, "reproject_count": 3, "pivot_min": 1e-300},
            "repeat": 2,
            "jobs": 3
        })");
        REQUIRE(cfg.methods.size() == 2);
        CHECK(cfg.methods[1] == Method::null_space);
        REQUIRE(cfg.problems.size() == 2);
        CHECK(cfg.problems[0].seed == splitmix64(7));
        CHECK(cfg.problems[1].seed == 123);
        CHECK(cfg.problems[0].perturbation->i4 == 30);
        CHECK(*cfg.controls.zero_tol == 1e-12);
        CHECK(cfg.controls.reproject_count == 3);
        CHECK(cfg.run.repeat == 2);
        CHECK(cfg.jobs == 3);
        CHECK(parse_config_json(R"({"seed": 7, "problems": [{"family": "IR50", "n": 3, "m": 1}]})", 9)
                  .problems[0]
                  .seed == splitmix64(9));
    }

    TEST_CASE("errors are config errors") {
        const char* bad[] = {
            "not json",
            "[]",
            R"({"seed": 1})",
            R"({"problems": [{"family": "XX", "n": 3, "m": 1}]})",
            R"({"problems": [{"family": "IR50", "n": 3, "m": 4}]})",
            R"({"problems": [{"family": "IR50", "n": 3}]})",
            R"({"methods": ["qr"], "problems": []})",
            R"({"problems": [], "controls": {"reproject_count": 0}})",
            R"({"problems": [], "controls": {"zero_tol": -1}})",
            R"({"problems": [{"family": "IR500R", "n": 3, "m": 2, "perturbation": {"target": "diag"}}]})",
            R"({"problems": [{"family": "IR500R", "n": 3, "m": 2, "perturbation": {"i2": 7}}]})",
        };
        for (const char* text : bad) {
            CAPTURE(text);
            CHECK_THROWS_AS(parse_config_json(text), ConfigError);
        }
    }
}

TEST_SUITE("report formats") {
    TEST_CASE("Fortran-style D exponent") {
        CHECK(format_fortran_d(5e-7) == "0.50D-06");
        CHECK(format_fortran_d(0.0) == "0.00D+00");
        CHECK(format_fortran_d(3.7) == "0.37D+01");
        CHECK(format_fortran_d(1.4e-14) == "0.14D-13");
        CHECK(format_fortran_d(-2.2e9) == "-0.22D+10");
        CHECK(format_fortran_d(0.999) == "0.10D+01");
        CHECK(format_fortran_d(std::numeric_limits<double>::infinity()) == "Infinity");
    }

    TEST_CASE("empty report list gives header-only output") {
        CHECK(emit_csv({}) ==
              "problem,matrix,n,m,method,status,solution_error,residual_error,rank,time_seconds,condition\n");
        CHECK(emit_json({}) == "[]\n");
        const std::string table = emit_table({});
        CHECK(table.find("method") != std::string::npos);
        CHECK(table.find("condition number") == std::string::npos);
    }

    TEST_CASE("CSV parse and emit round-trips byte for byte") {
        SuiteConfig cfg = small_suite();
        cfg.run.timing = true;
        const SuiteResult res = run_suite(cfg);
        std::vector<ExperimentReport> reports = res.reports;
        reports[0].solution_error = std::numeric_limits<double>::infinity();
        reports[1].condition.reset();
        const std::string csv = emit_csv(reports);
        const auto parsed = parse_csv(csv);
        CHECK(parsed == reports);
        CHECK(emit_csv(parsed) == csv);
        CHECK_THROWS_AS(parse_csv("bad header\n"), ConfigError);
        CHECK_THROWS_AS(parse_csv(csv + "0,IR50,1\n"), ConfigError);
    }

    TEST_CASE("table groups rows by problem with a condition footer") {
        const SuiteResult res = run_suite(small_suite());
        const std::string table = emit_table(res.reports);
        std::size_t footers = 0;
        for (std::size_t pos = table.find("condition number:"); pos != std::string::npos;
             pos = table.find("condition number:", pos + 1)) {
            ++footers;
        }
        CHECK(footers == 4);
        CHECK(table.find("IR500S") != std::string::npos);
        const std::string wins = emit_win_table(res.solution_wins, "solution error", 4);
        CHECK(wins.find("range_space") != std::string::npos);
        CHECK(wins.find("total") != std::string::npos);
    }

    TEST_CASE("JSON records are flat, infinities become null") {
        std::vector<ExperimentReport> reports{row(0, Method::lu_direct, 1e-3)};
        reports[0].residual_error = std::numeric_limits<double>::infinity();
        const std::string json = emit_json(reports);
        CHECK(json.find("\"method\": \"lu_direct\"") != std::string::npos);
        CHECK(json.find("\"residual_error\": null") != std::string::npos);
        CHECK(json.find("\"condition\": \"n/a\"") != std::string::npos);
    }
}

TEST_SUITE("matrix file") {
    TEST_CASE("parses the hand case") {
        const KktSystem s = parse_matrix_file("2 1\n1 0\n0 1\n1 0\n1 1\n2\n");
        CHECK(s.B == Matrix::identity(2));
        CHECK(s.A == Matrix{{1, 0}});
        CHECK(s.b == Vector{1, 1});
        CHECK(s.c == Vector{2});
    }

    TEST_CASE("malformed input") {
        CHECK_THROWS_AS(parse_matrix_file(""), ConfigError);
        CHECK_THROWS_AS(parse_matrix_file("2 3"), ConfigError);
        CHECK_THROWS_AS(parse_matrix_file("2 1\n1 0 0 1 1 0 1 1"), ConfigError);
        CHECK_THROWS_AS(parse_matrix_file("2 1\n1 0 0 1 1 0 1 1 2 9"), ConfigError);
        CHECK_THROWS_AS(parse_matrix_file("2 1\n1 5 0 1 1 0 1 1 2"), ConfigError);
        CHECK_THROWS_AS(parse_matrix_file("2 1\n1 x 0 1 1 0 1 1 2"), ConfigError);
    }
}
