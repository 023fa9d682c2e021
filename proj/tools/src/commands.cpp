#include "qsocp_cli/commands.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "qsocp/errors.hpp"
#include "qsocp/instance_io.hpp"
#include "qsocp/ipm.hpp"
#include "qsocp/parsing_info.hpp"
#include "qsocp/plan.hpp"
#include "qsocp/solver_instance.hpp"
#include "qsocp_cli/bench.hpp"
#include "qsocp_cli/profiles.hpp"

namespace qsocp::cli {

namespace {

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

int exit_code(Status s) {
    switch (s) {
        case Status::Optimal: return kExitOptimal;
        case Status::PrimalInfeasible: return kExitPrimalInfeasible;
        case Status::DualInfeasible: return kExitDualInfeasible;
        case Status::MaxIterations: return kExitMaxIterations;
        case Status::NumericalError: return kExitNumericalError;
    }
    return kExitNumericalError;
}

void add_settings_flags(CLI::App& cmd, Settings& s) {
    cmd.add_option("--eps-feas", s.eps_feas, "Feasibility tolerance")->capture_default_str();
    cmd.add_option("--eps-gap", s.eps_gap, "Relative gap tolerance")->capture_default_str();
    cmd.add_option("--eps-abs", s.eps_abs, "Absolute infeasibility tolerance")->capture_default_str();
    cmd.add_option("--eps-rel", s.eps_rel, "Relative infeasibility tolerance")->capture_default_str();
    cmd.add_option("--max-iter", s.max_iter, "Iteration limit")->capture_default_str();
    cmd.add_option("--static-reg", s.delta_s, "Static KKT regularization")->capture_default_str();
}

void add_generator_flags(CLI::App& cmd, GeneratorParams& p) {
    cmd.add_option("--k", p.k, "Portfolio factor count")->capture_default_str();
    cmd.add_option("--ratio", p.ratio, "n/k for portfolio, m/n for lasso");
    cmd.add_option("--n", p.n, "Lasso feature count")->capture_default_str();
    cmd.add_option("--N", p.N, "Horizon length for mars and quadcopter")->capture_default_str();
    cmd.add_option("--tf", p.tf, "Mars time of flight in seconds")->capture_default_str();
    cmd.add_option("--seed", p.seed, "Random seed")->capture_default_str();
    cmd.add_option("--rho", p.rho, "Portfolio risk aversion")->capture_default_str();
}

ProblemData load_problem(const std::string& path) {
    try {
        return read_instance(path);
    } catch (const Error& e) {
        throw UsageError(e.what());
    }
}

CustomizationPlan load_plan_or_usage(const std::string& path) {
    try {
        return load_plan(path);
    } catch (const Error& e) {
        throw UsageError(e.what());
    }
}

std::vector<BenchRecord> read_csv_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw UsageError("cannot open " + path);
    try {
        return read_records_csv(in);
    } catch (const std::runtime_error& e) {
        throw UsageError(path + ": " + e.what());
    }
}

template <typename Write>
void write_text(const std::string& path, std::ostream& fallback, Write write) {
    if (path.empty() || path == "-") {
        write(fallback);
        return;
    }
    std::ofstream f(path);
    if (!f) throw UsageError("cannot write " + path);
    write(f);
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Quadratic SOCP interior-point solver", "qsocp"};
    app.require_subcommand(1);

    Settings settings;
    GeneratorParams gen;

    auto* solve_cmd = app.add_subcommand("solve", "Solve an instance file");
    std::string instance_path;
    std::string plan_path;
    bool as_json = false;
    solve_cmd->add_option("instance", instance_path, "Instance file")->required();
    solve_cmd->add_option("--plan", plan_path, "Customization plan for the instance's family");
    solve_cmd->add_flag("--json", as_json, "Print the report as JSON");
    add_settings_flags(*solve_cmd, settings);

    auto* gen_cmd = app.add_subcommand("generate", "Write a generated instance file");
    std::string family;
    std::string output;
    gen_cmd->add_option("family", family, "portfolio, lasso, mars or quadcopter")->required();
    gen_cmd->add_option("-o,--output", output, "Output instance file")->required();
    add_generator_flags(*gen_cmd, gen);

    auto* analyze_cmd = app.add_subcommand("analyze", "Analyze an instance's family into a plan file");
    analyze_cmd->add_option("instance", instance_path, "Instance file")->required();
    analyze_cmd->add_option("-o,--output", output, "Output plan file")->required();

    auto* parsing_cmd = app.add_subcommand("parsing-info", "Print where each data entry lives");
    parsing_cmd->add_option("instance", instance_path, "Instance file")->required();
    parsing_cmd->add_option("--plan", plan_path, "Plan file (analyzed on the fly if absent)");
    parsing_cmd->add_option("-o,--output", output, "Output text file (default stdout)");

    auto* bench_cmd = app.add_subcommand("bench", "Time solves and write a CSV of records");
    std::vector<std::string> bench_instances;
    std::vector<std::string> sweeps;
    std::vector<std::string> config_specs;
    bench_cmd->add_option("instances", bench_instances, "Instance files");
    bench_cmd->add_option("--sweep", sweeps, "Generator sweep such as mars:N=25,50");
    bench_cmd->add_option("--config", config_specs, "Configuration name[:key=value,...]");
    bench_cmd->add_option("-o,--output", output, "Output CSV (default stdout)");
    add_settings_flags(*bench_cmd, settings);
    add_generator_flags(*bench_cmd, gen);

    auto* prof_cmd = app.add_subcommand("profiles", "Performance profiles from bench CSV files");
    std::vector<std::string> csv_inputs;
    prof_cmd->add_option("records", csv_inputs, "Bench CSV files")->required();
    prof_cmd->add_option("-o,--output", output, "Output CSV (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? 0 : kExitUsage;
    }

    try {
        if (*solve_cmd) {
            settings.validate();
            const ProblemData problem = load_problem(instance_path);
            SolveResult result;
            if (plan_path.empty()) {
                result = solve(problem, settings);
            } else {
                const CustomizationPlan plan = load_plan_or_usage(plan_path);
                SolverInstance inst(plan, settings);
                try {
                    inst.load_instance(problem);
                } catch (const FamilyMismatch& e) {
                    throw UsageError(e.what());
                }
                result = inst.solve();
            }
            const auto& m = result.measures;
            if (as_json) {
                nlohmann::json j{{"status", status_name(result.status)},
                                 {"objective", result.objective},
                                 {"iterations", result.iterations},
                                 {"pres_eq", m.pres_eq},
                                 {"pres_ineq", m.pres_ineq},
                                 {"dres", m.dres},
                                 {"gap", m.gap},
                                 {"time_s", result.solve_time_s}};
                out << j.dump(2) << '\n';
            } else {
                out << "status      " << status_name(result.status) << '\n'
                    << "objective   " << result.objective << '\n'
                    << "iterations  " << result.iterations << '\n'
                    << "pres_eq     " << m.pres_eq << '\n'
                    << "pres_ineq   " << m.pres_ineq << '\n'
                    << "dres        " << m.dres << '\n'
                    << "gap         " << m.gap << '\n'
                    << "time_s      " << result.solve_time_s << '\n';
            }
            return exit_code(result.status);
        }
        if (*gen_cmd) {
            GeneratedProblem g;
            try {
                g = generate_family(family, gen);
            } catch (const std::invalid_argument& e) {
                throw UsageError(e.what());
            } catch (const InvalidProblem& e) {
                throw UsageError(e.what());
            }
            write_instance(output, g.data);
            out << "wrote " << g.id << " (n=" << g.data.n << ", p=" << g.data.p << ", m=" << g.data.m
                << ") to " << output << '\n';
            return 0;
        }
        if (*analyze_cmd) {
            const ProblemData problem = load_problem(instance_path);
            const CustomizationPlan plan = analyze_family(family_of(problem));
            save_plan(output, plan);
            out << "kkt_dim     " << plan.kkt_dim() << '\n'
                << "kkt_nnz     " << plan.kkt_nnz() << '\n'
                << "factor_nnz  " << plan.factor_nnz() << '\n';
            return 0;
        }
        if (*parsing_cmd) {
            const ProblemData problem = load_problem(instance_path);
            const ProblemFamily f = family_of(problem);
            const CustomizationPlan plan =
                plan_path.empty() ? analyze_family(f) : load_plan_or_usage(plan_path);
            ParsingInfo info;
            try {
                info = emit_parsing_info(f, plan);
            } catch (const InvalidProblem& e) {
                throw UsageError(e.what());
            }
            write_text(output, out, [&](std::ostream& o) { o << info.to_text(); });
            return 0;
        }
        if (*bench_cmd) {
            std::vector<GeneratedProblem> problems;
            for (const auto& path : bench_instances) {
                problems.push_back({std::filesystem::path(path).stem().string(), load_problem(path)});
            }
            std::vector<BenchConfig> configs;
            try {
                for (const auto& s : sweeps) {
                    auto more = generate_sweep(s, gen);
                    for (auto& g : more) problems.push_back(std::move(g));
                }
                if (config_specs.empty()) config_specs.push_back("default");
                for (const auto& spec : config_specs) configs.push_back(parse_config(spec, settings));
            } catch (const std::invalid_argument& e) {
                throw UsageError(e.what());
            } catch (const InvalidProblem& e) {
                throw UsageError(e.what());
            }
            if (problems.empty()) throw UsageError("bench needs instance files or --sweep");
            const auto records = run_bench(problems, configs);
            write_text(output, out, [&](std::ostream& o) { write_records_csv(o, records); });
            return 0;
        }
        if (*prof_cmd) {
            std::vector<BenchRecord> records;
            for (const auto& path : csv_inputs) {
                auto more = read_csv_file(path);
                records.insert(records.end(), more.begin(), more.end());
            }
            PerfProfiles profiles;
            try {
                profiles = perf_profiles(records);
            } catch (const std::invalid_argument& e) {
                throw UsageError(e.what());
            }
            write_text(output, out, [&](std::ostream& o) { write_profiles_csv(o, profiles); });
            return 0;
        }
    } catch (const UsageError& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const InvalidProblem& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const DimensionMismatch& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return kExitNumericalError;
    }
    return kExitUsage;
}

}  // namespace qsocp::cli
