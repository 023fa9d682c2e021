#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "qsocp/cones.hpp"
#include "qsocp/kkt.hpp"
#include "qsocp/problem.hpp"

namespace qsocp {

struct Settings {
    double eps_feas = 1e-8;
    double eps_gap = 1e-8;
    double eps_abs = 1e-8;
    double eps_rel = 1e-8;
    double delta_s = 1e-7;
    double eps_d = 1e-13;
    double delta_d = 1e-7;
    double eps_ir = 1e-13;
    std::size_t max_iter = 100;
    double step_fraction = 0.99;
    std::size_t max_ir_passes = 10;

    /// Throws InvalidProblem when a field is out of range.
    void validate() const;

    LinearSolverSettings linear() const noexcept {
        return {delta_s, eps_d, delta_d, eps_ir, max_ir_passes};
    }
};

enum class Status { Optimal, PrimalInfeasible, DualInfeasible, MaxIterations, NumericalError };

/// "OPT", "PINF", "DINF", "MAXITER" or "NUMERR".
std::string_view status_name(Status s) noexcept;

/// Homogeneous iterate (x, y, z, s, kappa, tau) and its duality measure.
struct IterateState {
    std::vector<double> x;
    std::vector<double> y;
    std::vector<double> z;
    std::vector<double> s;
    double kappa = 1.0;
    double tau = 1.0;
    double mu = 0.0;

    IterateState() = default;
    IterateState(std::size_t n, std::size_t p, std::size_t m) : x(n), y(p), z(m), s(m) {}
};

/// (s'z + kappa tau) / (l + n_soc + 1)
double duality_measure(const IterateState& state, const ConeSpec& cone) noexcept;

/// r_x = -Qx - A'y - G'z - q tau, r_y = Ax - b tau, r_z = Gx + s - h tau,
/// r_tau = q'x + b'y + h'z + x'Qx / tau + kappa.
/// The products Qx, A'y + G'z, Ax and Gx are kept for the termination test.
struct Residuals {
    std::vector<double> r_x;
    std::vector<double> r_y;
    std::vector<double> r_z;
    double r_tau = 0.0;
    std::vector<double> Qx;
    std::vector<double> ATy_GTz;
    std::vector<double> Ax;
    std::vector<double> Gx;
    double xQx = 0.0;

    Residuals() = default;
    Residuals(std::size_t n, std::size_t p, std::size_t m)
        : r_x(n), r_y(p), r_z(m), Qx(n), ATy_GTz(n), Ax(p), Gx(m) {}
};

void compute_residuals(const ProblemData& problem, const IterateState& state,
                       Residuals& out) noexcept;
Residuals compute_residuals(const ProblemData& problem, const IterateState& state);

/// Quantities compared against the tolerances. Optimality measures use the
/// tau-descaled iterate; infeasibility measures use the raw iterate.
struct TerminationMeasures {
    double pres_eq = 0.0;
    double pres_ineq = 0.0;
    double dres = 0.0;
    double gap = 0.0;
    double pinf_objective = 0.0;  // b'y + h'z
    double pinf_residual = 0.0;   // |A'y + G'z| / max(1, |y| + |z|)
    double dinf_objective = 0.0;  // q'x
    double dinf_Qx = 0.0;
    double dinf_Ax = 0.0;
    double dinf_Gxs = 0.0;
};

TerminationMeasures termination_measures(const ProblemData& problem, const IterateState& state,
                                         const Residuals& residuals) noexcept;

/// Optimality first, then primal, then dual infeasibility; nullopt means
/// continue. Infeasibility requires b'y + h'z < -eps_abs (respectively
/// q'x < -eps_abs), the sign under which (y, z) and x are certificates.
std::optional<Status> check_termination(const TerminationMeasures& measures,
                                        const Settings& settings) noexcept;
std::optional<Status> check_termination(const ProblemData& problem, const IterateState& state,
                                        const Settings& settings);

struct Direction {
    std::vector<double> dx;
    std::vector<double> dy;
    std::vector<double> dz;
    std::vector<double> ds;
    double dkappa = 0.0;
    double dtau = 0.0;

    Direction() = default;
    Direction(std::size_t n, std::size_t p, std::size_t m) : dx(n), dy(p), dz(m), ds(m) {}
};

/// Solver state that persists across iterations: KKT factorization, scaling
/// and scratch buffers, all sized at construction.
class IpmWorkspace {
public:
    IpmWorkspace(KKTLayout layout, SymbolicFactor symbolic, const Settings& settings);

    KKTSolver kkt;
    NTScaling scaling;
    Residuals residuals;
    Direction affine;
    Direction combined;
    std::vector<double> xi1;   // solution of K xi = b1 at the current scaling
    std::vector<double> xi2;
    std::vector<double> rhs;
    std::vector<double> d_x;
    std::vector<double> d_y;
    std::vector<double> d_z;
    std::vector<double> d_s;
    std::vector<double> work_n;
    std::vector<double> work_nm;  // length n + m
    std::vector<double> work_m;  // length 2m
    std::vector<double> work_m2;
    bool refinement_exhausted = false;
};

/// Starting point from the least-squares systems with W = I; returns false
/// on a factorization failure.
bool initialize(const ProblemData& problem, IpmWorkspace& ws, IterateState& state) noexcept;

/// Factors K at the workspace's current scaling and solves K xi1 = b1.
bool factor_and_solve_b1(const ProblemData& problem, IpmWorkspace& ws) noexcept;

/// Solves the linearized system for right-hand sides d = (d_x, d_y, d_z,
/// d_tau), d_s and d_kappa. Requires factor_and_solve_b1 at the current
/// scaling. Returns false on a numerical failure.
bool solve_direction(const ProblemData& problem, IpmWorkspace& ws, const IterateState& state,
                     std::span<const double> d_x, std::span<const double> d_y,
                     std::span<const double> d_z, double d_tau, std::span<const double> d_s,
                     double d_kappa, Direction& out) noexcept;

/// d = -r, d_s = -lambda o lambda, d_kappa = -kappa tau.
bool affine_direction(const ProblemData& problem, IpmWorkspace& ws, const IterateState& state,
                      const Residuals& residuals, Direction& out) noexcept;

/// Largest step in [0, 1] keeping s, z, kappa and tau interior.
double max_step(const IterateState& state, const Direction& dir, const ConeSpec& cone) noexcept;

/// clamp((mu_a / mu)^3, 0, 1) where mu_a is the duality measure after the
/// full affine step to the boundary. `mu_a_out` receives mu_a when given.
double mehrotra_sigma(const IterateState& state, const Direction& affine, const ConeSpec& cone,
                      double* mu_a_out = nullptr) noexcept;

/// d = -(1 - sigma) r, d_s = -(lambda o lambda - sigma mu e + (W^-T ds_a) o (W dz_a)),
/// d_kappa = -(kappa tau - sigma mu + dkappa_a dtau_a).
bool combined_direction(const ProblemData& problem, IpmWorkspace& ws, const IterateState& state,
                        const Residuals& residuals, double sigma, const Direction& affine,
                        Direction& out) noexcept;

/// Moves along `dir` with alpha = min(1, step_fraction * alpha_max) and
/// recomputes mu. Returns alpha; the state is left unchanged when alpha is
/// not above 1e-12.
double step_and_update(IterateState& state, const Direction& dir, const ConeSpec& cone,
                       const Settings& settings) noexcept;

inline constexpr double kMinStep = 1e-12;

struct IterationTrace {
    std::size_t iteration;
    const IterateState& state;
    const Residuals& residuals;
    const NTScaling& scaling;
    double mu;
    double sigma;
    const Direction& affine;
    const Direction& combined;
};

using IterationCallback = std::function<void(const IterationTrace&)>;

struct SolveResult {
    Status status = Status::NumericalError;
    std::vector<double> x;
    std::vector<double> y;
    std::vector<double> z;
    std::vector<double> s;
    double kappa = 0.0;
    double tau = 0.0;
    double objective = 0.0;
    std::size_t iterations = 0;
    TerminationMeasures measures;
    double solve_time_s = 0.0;
    bool refinement_exhausted = false;

    SolveResult() = default;
    SolveResult(std::size_t n, std::size_t p, std::size_t m) : x(n), y(p), z(m), s(m) {}
};

/// The predictor-corrector loop. `state` and `result` must be sized for the
/// problem; nothing is allocated while it runs.
void run_ipm(const ProblemData& problem, IpmWorkspace& ws, const Settings& settings,
             IterateState& state, SolveResult& result,
             const IterationCallback* callback = nullptr) noexcept;

struct CustomizationPlan;

/// Solves one problem. Without a plan the family is analyzed first; with
/// one, the problem must belong to the plan's family.
SolveResult solve(const ProblemData& problem, const Settings& settings = {},
                  const CustomizationPlan* plan = nullptr,
                  const IterationCallback& callback = nullptr);

}  // namespace qsocp
