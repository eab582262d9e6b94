#include "abskkt/bench.hpp"
#include "abskkt/error.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <sstream>

namespace abskkt {

namespace {

constexpr std::string_view kCsvHeader =
    "problem,matrix,n,m,method,status,solution_error,residual_error,rank,time_seconds,condition";

std::string num17(double v) {
    if (std::isinf(v)) {
        return v > 0 ? "inf" : "-inf";
    }
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string pad_right(std::string_view s, std::size_t width) {
    std::string out(s);
    if (out.size() < width) {
        out.append(width - out.size(), ' ');
    }
    return out;
}

std::string pad_left(std::string_view s, std::size_t width) {
    std::string out;
    if (s.size() < width) {
        out.append(width - s.size(), ' ');
    }
    out.append(s);
    return out;
}

KktStatus parse_status(std::string_view s) {
    for (KktStatus st : {KktStatus::ok, KktStatus::rank_deficient, KktStatus::incompatible,
                         KktStatus::reference_failure}) {
        if (to_string(st) == s) {
            return st;
        }
    }
    throw ConfigError("csv: unknown status '" + std::string(s) + "'");
}

double parse_double(const std::string& s) {
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (s.empty() || end != s.c_str() + s.size()) {
        throw ConfigError("csv: bad number '" + s + "'");
    }
    return v;
}

std::size_t parse_size(const std::string& s) {
    if (s.empty() || s.find_first_not_of("0123456789") != std::string::npos) {
        throw ConfigError("csv: bad integer '" + s + "'");
    }
    return static_cast<std::size_t>(std::stoull(s));
}

} // namespace

std::string format_fortran_d(double value) {
    if (std::isnan(value)) {
        return "NaN";
    }
    if (std::isinf(value)) {
        return value > 0 ? "Infinity" : "-Infinity";
    }
    if (value == 0.0) {
        return "0.00D+00";
    }
    // %.1e gives d.dE±xx; shift to 0.dd form.
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.1e", std::abs(value));
    const int digit_hi = buf[0] - '0';
    const int digit_lo = buf[2] - '0';
    const int exponent = std::atoi(buf + 4) + 1;
    char out[32];
    std::snprintf(out, sizeof out, "%s0.%d%dD%c%02d", value < 0 ? "-" : "", digit_hi, digit_lo,
                  exponent < 0 ? '-' : '+', std::abs(exponent));
    return out;
}

std::string emit_table(const std::vector<ExperimentReport>& reports) {
    std::ostringstream os;
    os << " matrix      n      m  method        solution  residual    rank      time\n";
    os << "                                     error     error\n";
    os << ' ' << std::string(72, '-') << '\n';
    for (std::size_t i = 0; i < reports.size(); ++i) {
        const auto& r = reports[i];
        char time_buf[32];
        std::snprintf(time_buf, sizeof time_buf, "%.4f", r.time_seconds);
        os << ' ' << pad_right(r.matrix_name, 8) << pad_left(std::to_string(r.n), 6)
           << pad_left(std::to_string(r.m), 7) << "  " << pad_right(to_string(r.method), 12)
           << "  " << pad_left(format_fortran_d(r.solution_error), 9) << ' '
           << pad_left(format_fortran_d(r.residual_error), 9) << pad_left(std::to_string(r.rank), 8)
           << pad_left(time_buf, 10);
        if (r.status != KktStatus::ok) {
            os << "  [" << to_string(r.status) << ']';
        }
        os << '\n';
        const bool last_of_group = i + 1 == reports.size() || reports[i + 1].problem != r.problem;
        if (last_of_group) {
            os << " condition number: "
               << (r.condition ? format_fortran_d(*r.condition) : std::string("n/a")) << "\n\n";
        }
    }
    return os.str();
}

std::string emit_win_table(const WinTable& table, std::string_view title, std::size_t problems) {
    std::ostringstream os;
    os << ' ' << title << " (" << problems << " problems; wins/ties of row vs column)\n";
    os << ' ' << pad_right("", 12);
    for (Method m : kAllMethods) {
        os << pad_left(to_string(m), 13);
    }
    os << pad_left("total", 10) << '\n';
    for (Method r : kAllMethods) {
        const auto ri = static_cast<std::size_t>(r);
        os << ' ' << pad_right(to_string(r), 12);
        for (Method c : kAllMethods) {
            const auto ci = static_cast<std::size_t>(c);
            const std::string cell = r == c ? std::string("-")
                                            : std::to_string(table.wins[ri][ci]) + "/" +
                                                  std::to_string(table.ties[ri][ci]);
            os << pad_left(cell, 13);
        }
        os << pad_left(std::to_string(table.total_wins(r)), 10) << '\n';
    }
    return os.str();
}

std::string emit_csv(const std::vector<ExperimentReport>& reports) {
    std::string out(kCsvHeader);
    out += '\n';
    for (const auto& r : reports) {
        out += std::to_string(r.problem) + ',' + r.matrix_name + ',' + std::to_string(r.n) + ',' +
               std::to_string(r.m) + ',' + std::string(to_string(r.method)) + ',' +
               std::string(to_string(r.status)) + ',' + num17(r.solution_error) + ',' +
               num17(r.residual_error) + ',' + std::to_string(r.rank) + ',' +
               num17(r.time_seconds) + ',' + (r.condition ? num17(*r.condition) : "n/a") + '\n';
    }
    return out;
}

std::string emit_json(const std::vector<ExperimentReport>& reports) {
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    auto num = [](double v) -> nlohmann::ordered_json {
        if (!std::isfinite(v)) {
            return nullptr;
        }
        return v;
    };
    for (const auto& r : reports) {
        nlohmann::ordered_json rec;
        rec["problem"] = r.problem;
        rec["matrix"] = r.matrix_name;
        rec["n"] = r.n;
        rec["m"] = r.m;
        rec["method"] = std::string(to_string(r.method));
        rec["status"] = std::string(to_string(r.status));
        rec["solution_error"] = num(r.solution_error);
        rec["residual_error"] = num(r.residual_error);
        rec["rank"] = r.rank;
        rec["time_seconds"] = r.time_seconds;
        rec["condition"] = r.condition ? num(*r.condition) : nlohmann::ordered_json("n/a");
        arr.push_back(std::move(rec));
    }
    return arr.dump(2) + '\n';
}

std::vector<ExperimentReport> parse_csv(std::string_view text) {
    std::istringstream is{std::string(text)};
    std::string line;
    if (!std::getline(is, line) || line != kCsvHeader) {
        throw ConfigError("csv: missing or unexpected header");
    }
    std::vector<ExperimentReport> out;
    while (std::getline(is, line)) {
        if (line.empty()) {
            continue;
        }
        std::vector<std::string> f;
        std::istringstream ls(line);
        std::string field;
        while (std::getline(ls, field, ',')) {
            f.push_back(field);
        }
        if (f.size() != 11) {
            throw ConfigError("csv: expected 11 fields, got " + std::to_string(f.size()));
        }
        ExperimentReport r;
        r.problem = parse_size(f[0]);
        r.matrix_name = f[1];
        r.n = parse_size(f[2]);
        r.m = parse_size(f[3]);
        r.method = parse_method(f[4]);
        r.status = parse_status(f[5]);
        r.solution_error = parse_double(f[6]);
        r.residual_error = parse_double(f[7]);
        r.rank = parse_size(f[8]);
        r.time_seconds = parse_double(f[9]);
        if (f[10] != "n/a") {
            r.condition = parse_double(f[10]);
        }
        out.push_back(std::move(r));
    }
    return out;
}

KktSystem parse_matrix_file(std::string_view text) {
    std::istringstream is{std::string(text)};
    std::size_t n = 0;
    std::size_t m = 0;
    if (!(is >> n >> m) || n < 1 || m > n) {
        throw ConfigError("matrix file: header must be 'n m' with 1 <= n and m <= n");
    }
    auto read = [&](const char* what) {
        double v = 0.0;
        if (!(is >> v)) {
            throw ConfigError(std::string("matrix file: missing or bad entry in ") + what);
        }
        return v;
    };
    KktSystem sys;
    sys.B = Matrix(n, n);
    sys.A = Matrix(m, n);
    sys.b = Vector(n);
    sys.c = Vector(m);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            sys.B(i, j) = read("B");
        }
    }
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            sys.A(i, j) = read("A");
        }
    }
    for (std::size_t i = 0; i < n; ++i) {
        sys.b[i] = read("b");
    }
    for (std::size_t i = 0; i < m; ++i) {
        sys.c[i] = read("c");
    }
    std::string extra;
    if (is >> extra) {
        throw ConfigError("matrix file: trailing data '" + extra + "'");
    }
    try {
        sys.validate();
    } catch (const Error& e) {
        throw ConfigError(std::string("matrix file: ") + e.what());
    }
    return sys;
}

} // namespace abskkt
