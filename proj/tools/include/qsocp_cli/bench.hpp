#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "qsocp/ipm.hpp"
#include "qsocp/problem.hpp"
#include "qsocp_cli/profiles.hpp"

namespace qsocp::cli {

/// Size and seed parameters shared by the generator front ends. Unset
/// ratios fall back to 10 for portfolio and 2 for lasso.
struct GeneratorParams {
    std::size_t k = 5;
    std::optional<std::size_t> ratio;
    std::size_t n = 10;
    std::size_t N = 25;
    double tf = 48.0;
    std::uint64_t seed = 1;
    double rho = 1.0;
};

struct GeneratedProblem {
    std::string id;
    ProblemData data;
};

/// family is one of portfolio, lasso, mars, quadcopter. Throws
/// std::invalid_argument for an unknown family; generator errors propagate.
GeneratedProblem generate_family(std::string_view family, const GeneratorParams& params);

/// "mars:N=25,50" style sweep over one parameter of one family, the other
/// parameters taken from `base`.
std::vector<GeneratedProblem> generate_sweep(std::string_view spec, const GeneratorParams& base);

struct BenchConfig {
    std::string name;
    Settings settings;
};

/// "name" or "name:key=value,key=value" with keys eps_feas, eps_gap, eps_abs,
/// eps_rel, max_iter, static_reg, eps_d, delta_d, eps_ir, step_fraction,
/// max_ir_passes. Throws std::invalid_argument on a malformed spec.
BenchConfig parse_config(std::string_view spec, const Settings& base = {});

using SolveFn = std::function<SolveResult(const ProblemData&, const Settings&)>;

/// Runs every problem under every configuration and returns records sorted
/// by (problem, config). A run is failed when it ends in MAXITER or NUMERR
/// or throws; thrown errors are recorded with status "ERROR".
std::vector<BenchRecord> run_bench(std::span<const GeneratedProblem> problems,
                                   std::span<const BenchConfig> configs,
                                   const SolveFn& solver = {});

}  // namespace qsocp::cli
