#include "qsocp_cli/profiles.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <istream>
#include <limits>
#include <map>
#include <ostream>
#include <set>
#include <stdexcept>

namespace qsocp::cli {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void check_id(const std::string& id) {
    if (id.find_first_of(",\n\r") != std::string::npos) {
        throw std::invalid_argument("bench id must not contain commas or newlines: " + id);
    }
}

std::vector<std::string> split(const std::string& line) {
    std::vector<std::string> fields;
    std::size_t start = 0;
    while (true) {
        const std::size_t comma = line.find(',', start);
        fields.push_back(line.substr(start, comma - start));
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
    return fields;
}

double parse_double(const std::string& s, std::size_t line_no) {
    // strtod understands inf and nan, which from_chars spells differently
    // across standard libraries.
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (s.empty() || end != s.c_str() + s.size()) {
        throw std::runtime_error("line " + std::to_string(line_no) + ": bad number '" + s + "'");
    }
    return v;
}

std::size_t parse_size(const std::string& s, std::size_t line_no) {
    std::size_t v = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size()) {
        throw std::runtime_error("line " + std::to_string(line_no) + ": bad count '" + s + "'");
    }
    return v;
}

ProfileCurves make_curves(std::vector<std::string> configs, std::vector<std::string> problems,
                          std::vector<std::vector<double>> metric) {
    ProfileCurves c;
    c.configs = std::move(configs);
    c.problems = std::move(problems);
    c.metric = std::move(metric);
    std::set<double> points;
    for (const auto& row : c.metric) {
        for (double v : row) {
            if (std::isfinite(v)) points.insert(v);
        }
    }
    c.tau.assign(points.begin(), points.end());
    c.rho.resize(c.configs.size());
    for (std::size_t s = 0; s < c.configs.size(); ++s) {
        c.rho[s].reserve(c.tau.size());
        for (double t : c.tau) c.rho[s].push_back(c.value(s, t));
    }
    return c;
}

}  // namespace

void write_records_csv(std::ostream& out, std::span<const BenchRecord> records) {
    out << kBenchCsvHeader << '\n';
    for (const BenchRecord& r : records) {
        check_id(r.problem);
        check_id(r.config);
        check_id(r.status);
        out << r.problem << ',' << r.config << ',' << format_double(r.time_s) << ',' << r.status
            << ',' << format_double(r.objective) << ',' << r.iterations << ','
            << (r.failed ? 1 : 0) << '\n';
    }
}

std::vector<BenchRecord> read_records_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("empty CSV");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != kBenchCsvHeader) throw std::runtime_error("unexpected CSV header: " + line);
    std::vector<BenchRecord> records;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto f = split(line);
        if (f.size() != 7) {
            throw std::runtime_error("line " + std::to_string(line_no) + ": expected 7 fields");
        }
        BenchRecord r;
        r.problem = f[0];
        r.config = f[1];
        r.time_s = parse_double(f[2], line_no);
        r.status = f[3];
        r.objective = parse_double(f[4], line_no);
        r.iterations = parse_size(f[5], line_no);
        if (f[6] != "0" && f[6] != "1") {
            throw std::runtime_error("line " + std::to_string(line_no) + ": failed must be 0 or 1");
        }
        r.failed = f[6] == "1";
        records.push_back(std::move(r));
    }
    return records;
}

double ProfileCurves::value(std::size_t s, double t) const {
    if (problems.empty()) return 0.0;
    std::size_t count = 0;
    for (double v : metric.at(s)) {
        if (v <= t) ++count;
    }
    return static_cast<double>(count) / static_cast<double>(problems.size());
}

PerfProfiles perf_profiles(std::span<const BenchRecord> records) {
    if (records.empty()) throw std::invalid_argument("perf_profiles: no records");
    std::set<std::string> config_set;
    std::set<std::string> problem_set;
    std::map<std::pair<std::string, std::string>, double> best;  // (problem, config) -> t
    for (const BenchRecord& r : records) {
        config_set.insert(r.config);
        problem_set.insert(r.problem);
        const double t = r.failed || !(r.time_s > 0.0) ? kInf : r.time_s;
        auto [it, inserted] = best.try_emplace({r.problem, r.config}, t);
        if (!inserted) it->second = std::min(it->second, t);
    }
    std::vector<std::string> configs(config_set.begin(), config_set.end());
    std::vector<std::string> problems(problem_set.begin(), problem_set.end());

    std::vector<std::vector<double>> times(configs.size(), std::vector<double>(problems.size()));
    for (std::size_t s = 0; s < configs.size(); ++s) {
        for (std::size_t p = 0; p < problems.size(); ++p) {
            const auto it = best.find({problems[p], configs[s]});
            if (it == best.end()) {
                throw std::invalid_argument("perf_profiles: no record for problem '" + problems[p] +
                                            "' with config '" + configs[s] + "'");
            }
            times[s][p] = it->second;
        }
    }
    std::vector<std::vector<double>> ratios = times;
    for (std::size_t p = 0; p < problems.size(); ++p) {
        double fastest = kInf;
        for (std::size_t s = 0; s < configs.size(); ++s) fastest = std::min(fastest, times[s][p]);
        for (std::size_t s = 0; s < configs.size(); ++s) {
            ratios[s][p] = std::isfinite(fastest) ? times[s][p] / fastest : kInf;
        }
    }
    PerfProfiles out;
    out.relative = make_curves(configs, problems, std::move(ratios));
    out.absolute = make_curves(std::move(configs), std::move(problems), std::move(times));
    return out;
}

void write_profiles_csv(std::ostream& out, const PerfProfiles& profiles) {
    out << "kind,config,tau,rho\n";
    auto emit = [&](const char* kind, const ProfileCurves& c) {
        for (std::size_t s = 0; s < c.configs.size(); ++s) {
            for (std::size_t k = 0; k < c.tau.size(); ++k) {
                out << kind << ',' << c.configs[s] << ',' << format_double(c.tau[k]) << ','
                    << format_double(c.rho[s][k]) << '\n';
            }
        }
    };
    emit("relative", profiles.relative);
    emit("absolute", profiles.absolute);
}

}  // namespace qsocp::cli
