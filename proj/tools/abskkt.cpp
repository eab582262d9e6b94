#include "abskkt/bench.hpp"
#include "abskkt/error.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitSolver = 3;

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw abskkt::ConfigError("cannot open '" + path + "'");
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_output(const std::string& text, const std::string& path) {
    if (path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw abskkt::ConfigError("cannot write '" + path + "'");
    }
    out << text;
}

std::string vector_line(const abskkt::Vector& v) {
    std::string s;
    char buf[40];
    for (std::size_t i = 0; i < v.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%s%.17g", i == 0 ? "" : " ", v[i]);
        s += buf;
    }
    return s;
}

struct BenchArgs {
    std::string config;
    std::string preset;
    std::size_t scale = 1;
    std::string format = "table";
    bool no_timing = false;
    unsigned jobs = 1;
    std::optional<std::uint64_t> seed;
    std::string out;
    int repeat = 1;
};

int run_bench(const BenchArgs& args) {
    abskkt::SuiteConfig cfg;
    if (!args.config.empty()) {
        cfg = abskkt::parse_config_json(read_file(args.config), args.seed);
    } else {
        if (args.preset != "paper") {
            throw abskkt::ConfigError("unknown preset '" + args.preset + "'");
        }
        cfg.problems = abskkt::grid_preset(args.scale, args.seed.value_or(1));
    }
    cfg.jobs = std::max(1u, args.jobs);
    cfg.run.repeat = args.repeat;
    cfg.run.timing = !args.no_timing;

    const abskkt::SuiteResult result = abskkt::run_suite(cfg);
    std::string text;
    if (args.format == "csv") {
        text = abskkt::emit_csv(result.reports);
    } else if (args.format == "json") {
        text = abskkt::emit_json(result.reports);
    } else {
        text = abskkt::emit_table(result.reports);
        text += abskkt::emit_win_table(result.solution_wins, "solution error", cfg.problems.size());
        text += '\n';
        text += abskkt::emit_win_table(result.residual_wins, "residual error", cfg.problems.size());
    }
    write_output(text, args.out);
    return result.any_failure() ? kExitSolver : kExitOk;
}

int run_solve(const std::string& path, const std::string& method_name, const std::string& out) {
    const abskkt::Method method = abskkt::parse_method(method_name);
    const abskkt::KktSystem sys = abskkt::parse_matrix_file(read_file(path));
    abskkt::KktSolution sol;
    try {
        sol = abskkt::solve_with(method, sys, {});
    } catch (const abskkt::Error& e) {
        sol.status = abskkt::KktStatus::rank_deficient;
        sol.message = e.what();
    }
    std::string text = "method: " + std::string(abskkt::to_string(method)) + "\n";
    text += "status: " + std::string(abskkt::to_string(sol.status)) + "\n";
    text += "rank: " + std::to_string(sol.detected_rank) + "\n";
    if (!sol.message.empty()) {
        text += "message: " + sol.message + "\n";
    }
    if (sol.has_solution()) {
        const auto [r1, r2] = abskkt::kkt_residuals(sys, sol.x, sol.y);
        char buf[64];
        std::snprintf(buf, sizeof buf, "%.3e", abskkt::norm_inf(abskkt::concat(r1, r2)));
        text += "residual: " + std::string(buf) + "\n";
        text += "x: " + vector_line(sol.x) + "\n";
        text += "y: " + vector_line(sol.y) + "\n";
    }
    write_output(text, out);
    return sol.status == abskkt::KktStatus::ok ? kExitOk : kExitSolver;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Scaled ABS solvers for KKT systems: benchmark harness and one-off solver"};
    app.require_subcommand(1);

    BenchArgs bench;
    auto* bench_cmd = app.add_subcommand("bench", "Run methods over a problem suite");
    auto* config_opt = bench_cmd->add_option("--config", bench.config, "JSON suite config")
                           ->check(CLI::ExistingFile);
    auto* preset_opt =
        bench_cmd->add_option("--preset", bench.preset, "Built-in suite")->check(CLI::IsMember({"paper"}));
    config_opt->excludes(preset_opt);
    bench_cmd->add_option("--scale", bench.scale, "Dimension divisor for the preset")
        ->check(CLI::PositiveNumber);
    bench_cmd->add_option("--format", bench.format, "Output format")
        ->check(CLI::IsMember({"table", "csv", "json"}));
    bench_cmd->add_flag("--no-timing", bench.no_timing, "Report zero times");
    bench_cmd->add_option("--jobs", bench.jobs, "Concurrent cells")->check(CLI::PositiveNumber);
    bench_cmd->add_option("--seed", bench.seed, "Base seed");
    bench_cmd->add_option("--out", bench.out, "Output file (default stdout)");
    bench_cmd->add_option("--repeat", bench.repeat, "Timed repetitions; minimum is reported")
        ->check(CLI::PositiveNumber);

    std::string matrix_file;
    std::string method_name;
    std::string solve_out;
    auto* solve_cmd = app.add_subcommand("solve", "Solve one KKT system from a matrix file");
    solve_cmd->add_option("--matrix-file", matrix_file, "Matrix file")->required();
    solve_cmd->add_option("--method", method_name, "Method name")->required();
    solve_cmd->add_option("--out", solve_out, "Output file (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitConfig;
    }

    try {
        if (bench_cmd->parsed()) {
            if (bench.config.empty() && bench.preset.empty()) {
                throw abskkt::ConfigError("bench needs --config FILE or --preset paper");
            }
            return run_bench(bench);
        }
        return run_solve(matrix_file, method_name, solve_out);
    } catch (const abskkt::ConfigError& e) {
        std::cerr << "abskkt: config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "abskkt: error: " << e.what() << '\n';
        return kExitSolver;
    }
}
