#include <benchmark/benchmark.h>

#include <vector>

#include "qsocp/generators.hpp"
#include "qsocp/kkt.hpp"
#include "qsocp/plan.hpp"
#include "qsocp/solver_instance.hpp"

namespace {

using namespace qsocp;

// Full solve through a prepared instance: load the data, run the IPM.
void solve_instance(benchmark::State& state, const ProblemData& pd) {
    const CustomizationPlan plan = analyze_family(family_of(pd));
    SolverInstance inst = instantiate(plan);
    for (auto _ : state) {
        inst.load_instance(pd);
        benchmark::DoNotOptimize(inst.solve().objective);
    }
    state.counters["iterations"] = static_cast<double>(inst.result().iterations);
    state.counters["kkt_dim"] = static_cast<double>(plan.kkt_dim());
}

void BM_MarsLanding(benchmark::State& state) {
    solve_instance(state, gen_mars_landing(static_cast<std::size_t>(state.range(0)), 48.0));
}
BENCHMARK(BM_MarsLanding)->Arg(25)->Arg(50)->Arg(100)->Unit(benchmark::kMicrosecond);

void BM_MarsLandingInfeasible(benchmark::State& state) {
    solve_instance(state, gen_mars_landing(static_cast<std::size_t>(state.range(0)), 25.0));
}
BENCHMARK(BM_MarsLandingInfeasible)->Arg(25)->Arg(100)->Unit(benchmark::kMicrosecond);

void BM_QuadcopterMpc(benchmark::State& state) {
    solve_instance(state, gen_quadcopter_mpc(static_cast<std::size_t>(state.range(0))));
}
BENCHMARK(BM_QuadcopterMpc)->Arg(15)->Arg(30)->Arg(100)->Unit(benchmark::kMicrosecond);

void BM_Portfolio(benchmark::State& state) {
    solve_instance(state, gen_portfolio(static_cast<std::size_t>(state.range(0)), 10, 1));
}
BENCHMARK(BM_Portfolio)->Arg(5)->Arg(20)->Unit(benchmark::kMicrosecond);

void BM_Lasso(benchmark::State& state) {
    solve_instance(state, gen_lasso(static_cast<std::size_t>(state.range(0)), 2, 1));
}
BENCHMARK(BM_Lasso)->Arg(10)->Arg(50)->Unit(benchmark::kMicrosecond);

// Offline analysis: AMD plus symbolic factorization of the expanded KKT pattern.
void BM_AnalyzeFamily(benchmark::State& state) {
    const ProblemFamily fam = family_of(gen_mars_landing(static_cast<std::size_t>(state.range(0)), 48.0));
    for (auto _ : state) benchmark::DoNotOptimize(analyze_family(fam).factor_nnz());
}
BENCHMARK(BM_AnalyzeFamily)->Arg(25)->Arg(100)->Unit(benchmark::kMicrosecond);

// One numeric factorization at unit scaling.
void BM_NumericFactor(benchmark::State& state) {
    const ProblemData pd = gen_mars_landing(static_cast<std::size_t>(state.range(0)), 48.0);
    const CustomizationPlan plan = analyze_family(family_of(pd));
    KKTSolver solver(plan.layout, plan.symbolic, LinearSolverSettings{});
    solver.system().set_data(pd.Q.values, pd.A.values, pd.G.values);
    for (auto _ : state) benchmark::DoNotOptimize(solver.factor());
}
BENCHMARK(BM_NumericFactor)->Arg(25)->Arg(100)->Unit(benchmark::kMicrosecond);

}  // namespace

BENCHMARK_MAIN();
