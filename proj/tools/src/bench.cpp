#include "qsocp_cli/bench.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <tuple>
#include <stdexcept>

#include "qsocp/generators.hpp"

namespace qsocp::cli {

namespace {

template <typename T>
T parse_number(std::string_view s, std::string_view what) {
    T v{};
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || ec != std::errc() || ptr != s.data() + s.size()) {
        throw std::invalid_argument("bad value for " + std::string(what) + ": '" + std::string(s) + "'");
    }
    return v;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
    std::vector<std::string_view> parts;
    std::size_t start = 0;
    while (true) {
        const std::size_t pos = s.find(sep, start);
        parts.push_back(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return parts;
}

std::string number_id(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", v);
    return buf;
}

}  // namespace

GeneratedProblem generate_family(std::string_view family, const GeneratorParams& p) {
    if (family == "portfolio") {
        const std::size_t ratio = p.ratio.value_or(10);
        return {"portfolio_k" + std::to_string(p.k) + "_r" + std::to_string(ratio) + "_s" +
                    std::to_string(p.seed),
                gen_portfolio(p.k, ratio, p.seed, p.rho)};
    }
    if (family == "lasso") {
        const std::size_t ratio = p.ratio.value_or(2);
        return {"lasso_n" + std::to_string(p.n) + "_r" + std::to_string(ratio) + "_s" +
                    std::to_string(p.seed),
                gen_lasso(p.n, ratio, p.seed)};
    }
    if (family == "mars") {
        return {"mars_N" + std::to_string(p.N) + "_tf" + number_id(p.tf), gen_mars_landing(p.N, p.tf)};
    }
    if (family == "quadcopter") {
        return {"quadcopter_N" + std::to_string(p.N), gen_quadcopter_mpc(p.N)};
    }
    throw std::invalid_argument("unknown family '" + std::string(family) +
                                "' (expected portfolio, lasso, mars or quadcopter)");
}

std::vector<GeneratedProblem> generate_sweep(std::string_view spec, const GeneratorParams& base) {
    const std::size_t colon = spec.find(':');
    const std::size_t eq = spec.find('=', colon);
    if (colon == std::string_view::npos || eq == std::string_view::npos) {
        throw std::invalid_argument("sweep must look like family:param=v1,v2");
    }
    const std::string_view family = spec.substr(0, colon);
    const std::string_view key = spec.substr(colon + 1, eq - colon - 1);
    std::vector<GeneratedProblem> out;
    for (std::string_view v : split(spec.substr(eq + 1), ',')) {
        GeneratorParams p = base;
        if (key == "k") p.k = parse_number<std::size_t>(v, key);
        else if (key == "ratio") p.ratio = parse_number<std::size_t>(v, key);
        else if (key == "n") p.n = parse_number<std::size_t>(v, key);
        else if (key == "N") p.N = parse_number<std::size_t>(v, key);
        else if (key == "tf") p.tf = parse_number<double>(v, key);
        else if (key == "seed") p.seed = parse_number<std::uint64_t>(v, key);
        else throw std::invalid_argument("unknown sweep parameter '" + std::string(key) + "'");
        out.push_back(generate_family(family, p));
    }
    return out;
}

BenchConfig parse_config(std::string_view spec, const Settings& base) {
    BenchConfig c;
    c.settings = base;
    const std::size_t colon = spec.find(':');
    c.name = std::string(spec.substr(0, colon));
    if (c.name.empty() || c.name.find(',') != std::string::npos) {
        throw std::invalid_argument("config name must be non-empty and comma-free");
    }
    if (colon == std::string_view::npos) return c;
    for (std::string_view kv : split(spec.substr(colon + 1), ',')) {
        const std::size_t eq = kv.find('=');
        if (eq == std::string_view::npos) {
            throw std::invalid_argument("config entries must be key=value: '" + std::string(kv) + "'");
        }
        const std::string_view key = kv.substr(0, eq);
        const std::string_view val = kv.substr(eq + 1);
        Settings& s = c.settings;
        if (key == "eps_feas") s.eps_feas = parse_number<double>(val, key);
        else if (key == "eps_gap") s.eps_gap = parse_number<double>(val, key);
        else if (key == "eps_abs") s.eps_abs = parse_number<double>(val, key);
        else if (key == "eps_rel") s.eps_rel = parse_number<double>(val, key);
        else if (key == "max_iter") s.max_iter = parse_number<std::size_t>(val, key);
        else if (key == "static_reg") s.delta_s = parse_number<double>(val, key);
        else if (key == "eps_d") s.eps_d = parse_number<double>(val, key);
        else if (key == "delta_d") s.delta_d = parse_number<double>(val, key);
        else if (key == "eps_ir") s.eps_ir = parse_number<double>(val, key);
        else if (key == "step_fraction") s.step_fraction = parse_number<double>(val, key);
        else if (key == "max_ir_passes") s.max_ir_passes = parse_number<std::size_t>(val, key);
        else throw std::invalid_argument("unknown setting '" + std::string(key) + "'");
    }
    c.settings.validate();
    return c;
}

std::vector<BenchRecord> run_bench(std::span<const GeneratedProblem> problems,
                                   std::span<const BenchConfig> configs, const SolveFn& solver) {
    const SolveFn run = solver ? solver : SolveFn([](const ProblemData& d, const Settings& s) {
        return solve(d, s);
    });
    std::vector<BenchRecord> records;
    records.reserve(problems.size() * configs.size());
    for (const GeneratedProblem& p : problems) {
        for (const BenchConfig& c : configs) {
            BenchRecord r;
            r.problem = p.id;
            r.config = c.name;
            const auto start = std::chrono::steady_clock::now();
            try {
                const SolveResult res = run(p.data, c.settings);
                r.status = std::string(status_name(res.status));
                r.objective = res.objective;
                r.iterations = res.iterations;
                r.failed = res.status == Status::MaxIterations || res.status == Status::NumericalError;
            } catch (const std::exception&) {
                r.status = "ERROR";
                r.objective = std::numeric_limits<double>::quiet_NaN();
                r.failed = true;
            }
            const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start;
            r.time_s = std::max(elapsed.count(), 1e-9);
            records.push_back(std::move(r));
        }
    }
    std::stable_sort(records.begin(), records.end(), [](const BenchRecord& a, const BenchRecord& b) {
        return std::tie(a.problem, a.config) < std::tie(b.problem, b.config);
    });
    return records;
}

}  // namespace qsocp::cli
