#include "abskkt/bench.hpp"

#include "abskkt/error.hpp"
#include "abskkt/reference.hpp"

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <functional>
#include <limits>
#include <thread>

namespace abskkt {

namespace {

constexpr std::array<std::pair<Method, std::string_view>, 6> kMethodNames{{
    {Method::mod_huang, "mod.huang"},
    {Method::impl_lu8, "impl.lu8"},
    {Method::impl_lu9, "impl.lu9"},
    {Method::lu_direct, "lu_direct"},
    {Method::range_space, "range_space"},
    {Method::null_space, "null_space"},
}};

constexpr double kInf = std::numeric_limits<double>::infinity();

double finite_or_inf(double v) {
    return std::isfinite(v) ? v : kInf;
}

bool all_finite(const Vector& v) {
    return std::all_of(v.begin(), v.end(), [](double e) { return std::isfinite(e); });
}

// Runs fn(i) for i in [0, count) on up to `jobs` threads.
void parallel_for(std::size_t count, unsigned jobs, const std::function<void(std::size_t)>& fn) {
    if (jobs <= 1 || count <= 1) {
        for (std::size_t i = 0; i < count; ++i) {
            fn(i);
        }
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> workers;
    const unsigned threads = static_cast<unsigned>(std::min<std::size_t>(jobs, count));
    workers.reserve(threads);
    for (unsigned t = 0; t < threads; ++t) {
        workers.emplace_back([&] {
            for (std::size_t i = next++; i < count; i = next++) {
                fn(i);
            }
        });
    }
    for (auto& w : workers) {
        w.join();
    }
}

std::size_t method_index(Method m) {
    return static_cast<std::size_t>(m);
}

} // namespace

std::string_view to_string(Method method) noexcept {
    for (const auto& [m, name] : kMethodNames) {
        if (m == method) {
            return name;
        }
    }
    return "?";
}

Method parse_method(std::string_view name) {
    for (const auto& [m, mname] : kMethodNames) {
        if (mname == name) {
            return m;
        }
    }
    throw ConfigError("unknown method '" + std::string(name) + "'");
}

KktSolution solve_with(Method method, const KktSystem& sys, const SolverControls& controls) {
    switch (method) {
    case Method::mod_huang:
        return kkt_solve_modified_huang(sys, controls);
    case Method::impl_lu8:
        return kkt_solve_implicit_lu_direct(sys, controls);
    case Method::impl_lu9:
        return kkt_solve_implicit_lu_reduced(sys, controls);
    case Method::lu_direct:
        return kkt_solve_direct(sys, controls.pivot_min);
    case Method::range_space:
        return kkt_solve_range_space(sys, controls.pivot_min);
    case Method::null_space:
        return kkt_solve_null_space(sys, controls.pivot_min);
    }
    throw Error("unhandled method");
}

ExperimentReport run_experiment(const PlantedProblem& problem, Method method,
                                const SolverControls& controls, const RunOptions& options) {
    ExperimentReport rep;
    rep.matrix_name = problem.name();
    rep.n = problem.sys.n();
    rep.m = problem.sys.m();
    rep.method = method;
    rep.condition = problem.condition;

    KktSolution sol;
    double best = kInf;
    const int repeat = std::max(1, options.repeat);
    for (int k = 0; k < repeat; ++k) {
        const auto t0 = std::chrono::steady_clock::now();
        try {
            sol = solve_with(method, problem.sys, controls);
        } catch (const std::exception& e) {
            sol = KktSolution{};
            sol.status = method == Method::lu_direct || method == Method::range_space ||
                                 method == Method::null_space
                             ? KktStatus::reference_failure
                             : KktStatus::rank_deficient;
            sol.message = e.what();
        }
        const auto t1 = std::chrono::steady_clock::now();
        best = std::min(best, std::chrono::duration<double>(t1 - t0).count());
    }
    rep.time_seconds = options.timing ? best : 0.0;
    rep.status = sol.status;
    rep.rank = sol.detected_rank;

    if (!sol.has_solution() || sol.y.size() != rep.m || !all_finite(sol.x) || !all_finite(sol.y)) {
        rep.solution_error = kInf;
        rep.residual_error = kInf;
        return rep;
    }
    const Vector err = concat(sol.x - problem.x_star, sol.y - problem.y_star);
    const double star = norm_inf(concat(problem.x_star, problem.y_star));
    rep.solution_error = finite_or_inf(norm_inf(err) / std::max(1.0, star));

    const auto [r1, r2] = kkt_residuals(problem.sys, sol.x, sol.y);
    const double rhs = norm_inf(concat(problem.sys.b, problem.sys.c));
    rep.residual_error = finite_or_inf(norm_inf(concat(r1, r2)) / std::max(1.0, rhs));
    return rep;
}

// ---------------------------------------------------------------------------

int WinTable::total_wins(Method m) const {
    int t = 0;
    for (int v : wins[method_index(m)]) {
        t += v;
    }
    return t;
}

int WinTable::total_ties(Method m) const {
    int t = 0;
    for (int v : ties[method_index(m)]) {
        t += v;
    }
    return t;
}

WinTable compute_win_table(const std::vector<ExperimentReport>& reports, ErrorMetric metric) {
    WinTable table;
    std::size_t begin = 0;
    while (begin < reports.size()) {
        std::size_t end = begin;
        while (end < reports.size() && reports[end].problem == reports[begin].problem) {
            ++end;
        }
        for (std::size_t i = begin; i < end; ++i) {
            for (std::size_t k = begin; k < end; ++k) {
                const auto& ri = reports[i];
                const auto& rk = reports[k];
                if (ri.method == rk.method || ri.status != KktStatus::ok ||
                    rk.status != KktStatus::ok) {
                    continue;
                }
                const double ei = metric == ErrorMetric::solution ? ri.solution_error : ri.residual_error;
                const double ek = metric == ErrorMetric::solution ? rk.solution_error : rk.residual_error;
                const double hi = std::max(ei, ek);
                const std::size_t a = method_index(ri.method);
                const std::size_t b = method_index(rk.method);
                if (hi == 0.0 || std::abs(ei - ek) / hi < 0.01) {
                    ++table.ties[a][b];
                } else if (ei < ek) {
                    ++table.wins[a][b];
                }
            }
        }
        begin = end;
    }
    return table;
}

bool SuiteResult::any_failure() const {
    return std::any_of(reports.begin(), reports.end(),
                       [](const ExperimentReport& r) { return r.status != KktStatus::ok; });
}

SuiteResult run_suite(const SuiteConfig& config) {
    config.controls.validate();
    for (const auto& p : config.problems) {
        p.validate();
    }
    const std::size_t np = config.problems.size();
    const std::size_t nm = config.methods.size();

    std::vector<PlantedProblem> problems(np);
    parallel_for(np, config.jobs, [&](std::size_t i) {
        PlantedProblem prob = make_problem(config.problems[i]);
        if (prob.sys.n() + prob.sys.m() <= config.condition_limit) {
            prob.condition = condition_estimate(prob.sys.assemble());
        }
        problems[i] = std::move(prob);
    });

    SuiteResult result;
    result.reports.resize(np * nm);
    parallel_for(np * nm, config.jobs, [&](std::size_t cell) {
        const std::size_t p = cell / nm;
        ExperimentReport rep =
            run_experiment(problems[p], config.methods[cell % nm], config.controls, config.run);
        rep.problem = p;
        result.reports[cell] = std::move(rep);
    });
    result.solution_wins = compute_win_table(result.reports, ErrorMetric::solution);
    result.residual_wins = compute_win_table(result.reports, ErrorMetric::residual);
    return result;
}

std::vector<ProblemSpec> grid_preset(std::size_t scale, std::uint64_t base_seed) {
    if (scale < 1) {
        throw ConfigError("preset scale must be at least 1");
    }
    constexpr std::array<Family, 8> families{Family::IR500,  Family::IR500R, Family::IR500S,
                                             Family::IR500B, Family::RR100,  Family::IDF1,
                                             Family::IDF2,   Family::IR50};
    constexpr std::array<std::pair<std::size_t, std::size_t>, 3> shapes{
        {{1000, 900}, {1200, 600}, {1500, 200}}};
    std::vector<ProblemSpec> out;
    for (Family f : families) {
        for (const auto& [n, m] : shapes) {
            ProblemSpec spec;
            spec.family = f;
            spec.n = std::max<std::size_t>(n / scale, 2);
            spec.m = std::max<std::size_t>(m / scale, 2);
            spec.seed = splitmix64(base_seed + out.size());
            out.push_back(spec);
        }
    }
    return out;
}

// ---------------------------------------------------------------------------

SuiteConfig parse_config_json(std::string_view text, std::optional<std::uint64_t> seed_override) {
    using nlohmann::json;
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    if (!doc.is_object()) {
        throw ConfigError("config must be a JSON object");
    }
    SuiteConfig cfg;
    try {
        const std::uint64_t base_seed =
            seed_override ? *seed_override : doc.value("seed", std::uint64_t{1});
        if (doc.contains("methods")) {
            cfg.methods.clear();
            for (const auto& m : doc.at("methods")) {
                cfg.methods.push_back(parse_method(m.get<std::string>()));
            }
        }
        if (!doc.contains("problems") || !doc.at("problems").is_array()) {
            throw ConfigError("config needs a 'problems' array");
        }
        for (const auto& p : doc.at("problems")) {
            ProblemSpec spec;
            spec.family = parse_family(p.at("family").get<std::string>());
            spec.n = p.at("n").get<std::size_t>();
            spec.m = p.at("m").get<std::size_t>();
            spec.seed = p.contains("seed") ? p.at("seed").get<std::uint64_t>()
                                           : splitmix64(base_seed + cfg.problems.size());
            if (p.contains("perturbation")) {
                const auto& q = p.at("perturbation");
                PerturbSpec ps;
                ps.i1 = q.value("i1", ps.i1);
                ps.i2 = q.value("i2", ps.i2);
                ps.i3 = q.value("i3", ps.i3);
                ps.i4 = q.value("i4", ps.i4);
                const std::string target = q.value("target", std::string("rows"));
                if (target == "rows") {
                    ps.target = PerturbTarget::rows;
                } else if (target == "columns") {
                    ps.target = PerturbTarget::columns;
                } else if (target == "symmetric") {
                    ps.target = PerturbTarget::symmetric;
                } else if (target == "both") {
                    ps.target = PerturbTarget::both;
                } else {
                    throw ConfigError("unknown perturbation target '" + target + "'");
                }
                spec.perturbation = ps;
            }
            spec.validate();
            cfg.problems.push_back(spec);
        }
        if (doc.contains("controls")) {
            const auto& c = doc.at("controls");
            if (c.contains("zero_tol")) {
                cfg.controls.zero_tol = c.at("zero_tol").get<double>();
            }
            cfg.controls.reproject_count = c.value("reproject_count", cfg.controls.reproject_count);
            cfg.controls.pivot_min = c.value("pivot_min", cfg.controls.pivot_min);
        }
        cfg.run.repeat = doc.value("repeat", cfg.run.repeat);
        cfg.jobs = doc.value("jobs", cfg.jobs);
        cfg.controls.validate();
    } catch (const ConfigError&) {
        throw;
    } catch (const Error& e) {
        throw ConfigError(e.what());
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    return cfg;
}

} // namespace abskkt
