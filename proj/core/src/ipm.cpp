#include "qsocp/ipm.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

#include "qsocp/errors.hpp"

namespace qsocp {

namespace {

double dot(std::span<const double> a, std::span<const double> b) noexcept {
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
    return acc;
}

double norm2(std::span<const double> a) noexcept { return std::sqrt(dot(a, a)); }

bool all_finite(std::span<const double> a) noexcept {
    for (double v : a) {
        if (!std::isfinite(v)) return false;
    }
    return true;
}

bool finite_direction(const Direction& d) noexcept {
    return all_finite(d.dx) && all_finite(d.dy) && all_finite(d.dz) && all_finite(d.ds) &&
           std::isfinite(d.dkappa) && std::isfinite(d.dtau);
}

// v <- v if inf{a : v + a e in int K} < 0, else v + (1 + a) e.
void shift_into_cone(std::span<double> v, const ConeSpec& cone) noexcept {
    const double a = shift_to_interior(v, cone);
    if (a < 0.0) return;
    for (std::size_t i = 0; i < cone.nn_count; ++i) v[i] += 1.0 + a;
    std::size_t k = cone.nn_count;
    for (std::size_t d : cone.soc_dims) {
        v[k] += 1.0 + a;
        k += d;
    }
}

// Largest a with x + a dx > 0 for a scalar x > 0.
double scalar_step(double x, double dx) noexcept { return dx < 0.0 ? -x / dx : kInfiniteStep; }

}  // namespace

void Settings::validate() const {
    const double positive[] = {eps_feas, eps_gap, eps_abs, eps_rel, delta_s, eps_d, delta_d, eps_ir};
    for (double v : positive) {
        if (!(v > 0.0)) throw InvalidProblem("settings: tolerances must be positive");
    }
    if (max_iter == 0) throw InvalidProblem("settings: max_iter must be positive");
    if (max_ir_passes == 0) throw InvalidProblem("settings: max_ir_passes must be positive");
    if (!(step_fraction > 0.0 && step_fraction < 1.0)) {
        throw InvalidProblem("settings: step_fraction must lie in (0, 1)");
    }
}

std::string_view status_name(Status s) noexcept {
    switch (s) {
        case Status::Optimal: return "OPT";
        case Status::PrimalInfeasible: return "PINF";
        case Status::DualInfeasible: return "DINF";
        case Status::MaxIterations: return "MAXITER";
        case Status::NumericalError: return "NUMERR";
    }
    return "NUMERR";
}

double duality_measure(const IterateState& state, const ConeSpec& cone) noexcept {
    return (dot(state.s, state.z) + state.kappa * state.tau) /
           static_cast<double>(cone.block_count() + 1);
}

void compute_residuals(const ProblemData& problem, const IterateState& st,
                       Residuals& out) noexcept {
    const double tau = st.tau;
    std::fill(out.Qx.begin(), out.Qx.end(), 0.0);
    symmetric_multiply_add(problem.Q, st.x, out.Qx);
    std::fill(out.ATy_GTz.begin(), out.ATy_GTz.end(), 0.0);
    multiply_transpose_add(problem.A, st.y, out.ATy_GTz);
    multiply_transpose_add(problem.G, st.z, out.ATy_GTz);
    std::fill(out.Ax.begin(), out.Ax.end(), 0.0);
    multiply_add(problem.A, st.x, out.Ax);
    std::fill(out.Gx.begin(), out.Gx.end(), 0.0);
    multiply_add(problem.G, st.x, out.Gx);

    for (std::size_t i = 0; i < problem.n; ++i) {
        out.r_x[i] = -out.Qx[i] - out.ATy_GTz[i] - problem.q[i] * tau;
    }
    for (std::size_t i = 0; i < problem.p; ++i) out.r_y[i] = out.Ax[i] - problem.b[i] * tau;
    for (std::size_t i = 0; i < problem.m; ++i) {
        out.r_z[i] = out.Gx[i] + st.s[i] - problem.h[i] * tau;
    }
    out.xQx = dot(st.x, out.Qx);
    out.r_tau = dot(problem.q, st.x) + dot(problem.b, st.y) + dot(problem.h, st.z) +
                out.xQx / tau + st.kappa;
}

Residuals compute_residuals(const ProblemData& problem, const IterateState& state) {
    Residuals r(problem.n, problem.p, problem.m);
    compute_residuals(problem, state, r);
    return r;
}

TerminationMeasures termination_measures(const ProblemData& problem, const IterateState& st,
                                         const Residuals& r) noexcept {
    TerminationMeasures t;
    const double tau = st.tau;
    const double nx = norm2(st.x);
    const double ny = norm2(st.y);
    const double nz = norm2(st.z);
    const double ns = norm2(st.s);
    const double qx = dot(problem.q, st.x);
    const double by_hz = dot(problem.b, st.y) + dot(problem.h, st.z);

    t.pres_eq = norm2(r.r_y) / tau / std::max(1.0, nx / tau + norm2(problem.b));
    t.pres_ineq = norm2(r.r_z) / tau / std::max(1.0, (nx + ns) / tau + norm2(problem.h));
    t.dres = norm2(r.r_x) / tau / std::max(1.0, (nx + ny + nz) / tau + norm2(problem.q));
    t.gap = dot(st.s, st.z) / (tau * tau) / std::max({1.0, -qx / tau, -by_hz / tau});

    t.pinf_objective = by_hz;
    t.pinf_residual = norm2(r.ATy_GTz) / std::max(1.0, ny + nz);
    t.dinf_objective = qx;
    t.dinf_Qx = norm2(r.Qx) / std::max(1.0, nx);
    t.dinf_Ax = norm2(r.Ax) / std::max(1.0, nx);
    double gxs = 0.0;
    for (std::size_t i = 0; i < problem.m; ++i) {
        const double v = r.Gx[i] + st.s[i];
        gxs += v * v;
    }
    t.dinf_Gxs = std::sqrt(gxs) / std::max(1.0, nx + ns);
    return t;
}

std::optional<Status> check_termination(const TerminationMeasures& t,
                                        const Settings& s) noexcept {
    if (t.pres_eq < s.eps_feas && t.pres_ineq < s.eps_feas && t.dres < s.eps_feas &&
        t.gap < s.eps_gap) {
        return Status::Optimal;
    }
    if (t.pinf_objective < -s.eps_abs && t.pinf_residual < s.eps_rel) {
        return Status::PrimalInfeasible;
    }
    if (t.dinf_objective < -s.eps_abs && t.dinf_Qx < s.eps_rel && t.dinf_Ax < s.eps_rel &&
        t.dinf_Gxs < s.eps_rel) {
        return Status::DualInfeasible;
    }
    return std::nullopt;
}

std::optional<Status> check_termination(const ProblemData& problem, const IterateState& state,
                                        const Settings& settings) {
    const Residuals r = compute_residuals(problem, state);
    return check_termination(termination_measures(problem, state, r), settings);
}

IpmWorkspace::IpmWorkspace(KKTLayout layout, SymbolicFactor symbolic, const Settings& settings)
    : kkt(std::move(layout), std::move(symbolic), settings.linear()),
      scaling(kkt.system().layout().family.cone) {
    const KKTLayout& L = kkt.system().layout();
    const std::size_t n = L.n();
    const std::size_t p = L.p();
    const std::size_t m = L.m();
    residuals = Residuals(n, p, m);
    affine = Direction(n, p, m);
    combined = Direction(n, p, m);
    xi1.assign(L.compact_dim(), 0.0);
    xi2.assign(L.compact_dim(), 0.0);
    rhs.assign(L.compact_dim(), 0.0);
    d_x.assign(n, 0.0);
    d_y.assign(p, 0.0);
    d_z.assign(m, 0.0);
    d_s.assign(m, 0.0);
    work_n.assign(n, 0.0);
    work_nm.assign(n + m, 0.0);
    work_m.assign(2 * m, 0.0);
    work_m2.assign(2 * m, 0.0);
}

bool factor_and_solve_b1(const ProblemData& problem, IpmWorkspace& ws) noexcept {
    ws.kkt.system().update_scaling(ws.scaling);
    if (!ws.kkt.factor()) return false;
    build_rhs1(problem, ws.rhs);
    const RefinementResult r = ws.kkt.solve(ws.rhs, ws.xi1);
    ws.refinement_exhausted = ws.refinement_exhausted || r.exhausted;
    return all_finite(ws.xi1);
}

bool initialize(const ProblemData& problem, IpmWorkspace& ws, IterateState& st) noexcept {
    const std::size_t n = problem.n;
    const std::size_t p = problem.p;
    const std::size_t m = problem.m;
    ws.scaling.set_identity();
    ws.kkt.system().update_scaling(ws.scaling);
    if (!ws.kkt.factor()) return false;

    auto& rhs = ws.rhs;
    auto& sol = ws.xi2;
    if (!problem.q_is_zero()) {
        build_rhs1(problem, rhs);
        const RefinementResult r = ws.kkt.solve(rhs, sol);
        ws.refinement_exhausted = ws.refinement_exhausted || r.exhausted;
        std::copy_n(sol.begin(), n, st.x.begin());
        std::copy_n(sol.begin() + static_cast<std::ptrdiff_t>(n), p, st.y.begin());
        for (std::size_t i = 0; i < m; ++i) {
            st.s[i] = -sol[n + p + i];
            st.z[i] = sol[n + p + i];
        }
    } else {
        std::fill(rhs.begin(), rhs.end(), 0.0);
        for (std::size_t i = 0; i < p; ++i) rhs[n + i] = problem.b[i];
        for (std::size_t i = 0; i < m; ++i) rhs[n + p + i] = problem.h[i];
        RefinementResult r = ws.kkt.solve(rhs, sol);
        ws.refinement_exhausted = ws.refinement_exhausted || r.exhausted;
        std::copy_n(sol.begin(), n, st.x.begin());
        for (std::size_t i = 0; i < m; ++i) st.s[i] = -sol[n + p + i];

        std::fill(rhs.begin(), rhs.end(), 0.0);
        for (std::size_t i = 0; i < n; ++i) rhs[i] = -problem.q[i];
        r = ws.kkt.solve(rhs, sol);
        ws.refinement_exhausted = ws.refinement_exhausted || r.exhausted;
        std::copy_n(sol.begin() + static_cast<std::ptrdiff_t>(n), p, st.y.begin());
        for (std::size_t i = 0; i < m; ++i) st.z[i] = sol[n + p + i];
    }
    shift_into_cone(st.s, problem.cone);
    shift_into_cone(st.z, problem.cone);
    st.kappa = 1.0;
    st.tau = 1.0;
    st.mu = duality_measure(st, problem.cone);
    return all_finite(st.x) && all_finite(st.y) && all_finite(st.z) && all_finite(st.s);
}

bool solve_direction(const ProblemData& problem, IpmWorkspace& ws, const IterateState& st,
                     std::span<const double> d_x, std::span<const double> d_y,
                     std::span<const double> d_z, double d_tau, std::span<const double> d_s,
                     double d_kappa, Direction& out) noexcept {
    const std::size_t n = problem.n;
    const std::size_t p = problem.p;
    const std::size_t m = problem.m;
    build_rhs2(ws.scaling, d_x, d_y, d_z, d_s, ws.rhs, ws.work_m);
    const RefinementResult r = ws.kkt.solve(ws.rhs, ws.xi2);
    ws.refinement_exhausted = ws.refinement_exhausted || r.exhausted;

    const double dtau =
        compute_dtau(problem, ws.scaling, st.x, st.tau, st.kappa, ws.xi1, ws.xi2, d_tau,
                     d_kappa, ws.work_nm);
    if (!std::isfinite(dtau)) return false;
    out.dtau = dtau;
    for (std::size_t i = 0; i < n; ++i) out.dx[i] = ws.xi2[i] + dtau * ws.xi1[i];
    for (std::size_t i = 0; i < p; ++i) out.dy[i] = ws.xi2[n + i] + dtau * ws.xi1[n + i];
    for (std::size_t i = 0; i < m; ++i) out.dz[i] = ws.xi2[n + p + i] + dtau * ws.xi1[n + p + i];
    out.dkappa = recover_ds_dkappa(ws.scaling, d_s, out.dz, d_kappa, dtau, st.kappa, st.tau,
                                   out.ds, ws.work_m);
    return finite_direction(out);
}

bool affine_direction(const ProblemData& problem, IpmWorkspace& ws, const IterateState& st,
                      const Residuals& res, Direction& out) noexcept {
    for (std::size_t i = 0; i < problem.n; ++i) ws.d_x[i] = -res.r_x[i];
    for (std::size_t i = 0; i < problem.p; ++i) ws.d_y[i] = -res.r_y[i];
    for (std::size_t i = 0; i < problem.m; ++i) ws.d_z[i] = -res.r_z[i];
    const auto lambda = ws.scaling.lambda();
    jordan_product(lambda, lambda, ws.d_s, problem.cone);
    for (double& v : ws.d_s) v = -v;
    return solve_direction(problem, ws, st, ws.d_x, ws.d_y, ws.d_z, -res.r_tau, ws.d_s,
                           -st.kappa * st.tau, out);
}

double max_step(const IterateState& st, const Direction& dir, const ConeSpec& cone) noexcept {
    double a = step_to_boundary_unchecked(st.s, dir.ds, cone);
    a = std::min(a, step_to_boundary_unchecked(st.z, dir.dz, cone));
    a = std::min(a, scalar_step(st.kappa, dir.dkappa));
    a = std::min(a, scalar_step(st.tau, dir.dtau));
    return a;
}

double mehrotra_sigma(const IterateState& st, const Direction& aff, const ConeSpec& cone,
                      double* mu_a_out) noexcept {
    const double alpha = std::min(1.0, max_step(st, aff, cone));
    double sz = 0.0;
    for (std::size_t i = 0; i < st.s.size(); ++i) {
        sz += (st.s[i] + alpha * aff.ds[i]) * (st.z[i] + alpha * aff.dz[i]);
    }
    const double kt = (st.kappa + alpha * aff.dkappa) * (st.tau + alpha * aff.dtau);
    const double mu_a = (sz + kt) / static_cast<double>(cone.block_count() + 1);
    if (mu_a_out != nullptr) *mu_a_out = mu_a;
    const double mu = duality_measure(st, cone);
    const double ratio = mu_a / mu;
    return std::clamp(ratio * ratio * ratio, 0.0, 1.0);
}

bool combined_direction(const ProblemData& problem, IpmWorkspace& ws, const IterateState& st,
                        const Residuals& res, double sigma, const Direction& aff,
                        Direction& out) noexcept {
    const double c = 1.0 - sigma;
    const double mu = duality_measure(st, problem.cone);
    for (std::size_t i = 0; i < problem.n; ++i) ws.d_x[i] = -c * res.r_x[i];
    for (std::size_t i = 0; i < problem.p; ++i) ws.d_y[i] = -c * res.r_y[i];
    for (std::size_t i = 0; i < problem.m; ++i) ws.d_z[i] = -c * res.r_z[i];

    const std::size_t m = problem.m;
    std::span<double> ws_a(ws.work_m2.data(), m);
    std::span<double> wz_a(ws.work_m2.data() + m, m);
    apply_W_inverse_transpose(ws.scaling, aff.ds, ws_a);
    apply_W(ws.scaling, aff.dz, wz_a);
    jordan_product(ws_a, wz_a, ws_a, problem.cone);
    const auto lambda = ws.scaling.lambda();
    jordan_product(lambda, lambda, ws.d_s, problem.cone);
    for (std::size_t i = 0; i < m; ++i) ws.d_s[i] += ws_a[i];
    for (std::size_t i = 0; i < problem.cone.nn_count; ++i) ws.d_s[i] -= sigma * mu;
    std::size_t k = problem.cone.nn_count;
    for (std::size_t d : problem.cone.soc_dims) {
        ws.d_s[k] -= sigma * mu;
        k += d;
    }
    for (double& v : ws.d_s) v = -v;
    const double d_kappa = -(st.kappa * st.tau - sigma * mu + aff.dkappa * aff.dtau);
    return solve_direction(problem, ws, st, ws.d_x, ws.d_y, ws.d_z, -c * res.r_tau, ws.d_s,
                           d_kappa, out);
}

double step_and_update(IterateState& st, const Direction& dir, const ConeSpec& cone,
                       const Settings& settings) noexcept {
    const double alpha = std::min(1.0, settings.step_fraction * max_step(st, dir, cone));
    if (!(alpha > kMinStep)) return alpha;
    for (std::size_t i = 0; i < st.x.size(); ++i) st.x[i] += alpha * dir.dx[i];
    for (std::size_t i = 0; i < st.y.size(); ++i) st.y[i] += alpha * dir.dy[i];
    for (std::size_t i = 0; i < st.z.size(); ++i) st.z[i] += alpha * dir.dz[i];
    for (std::size_t i = 0; i < st.s.size(); ++i) st.s[i] += alpha * dir.ds[i];
    st.kappa += alpha * dir.dkappa;
    st.tau += alpha * dir.dtau;
    st.mu = duality_measure(st, cone);
    return alpha;
}

void run_ipm(const ProblemData& problem, IpmWorkspace& ws, const Settings& settings,
             IterateState& st, SolveResult& result, const IterationCallback* callback) noexcept {
    const auto start = std::chrono::steady_clock::now();
    const ConeSpec& cone = problem.cone;
    ws.refinement_exhausted = false;
    Status status = Status::NumericalError;
    std::size_t k = 0;
    bool have_measures = false;

    if (initialize(problem, ws, st)) {
        for (;; ++k) {
            compute_residuals(problem, st, ws.residuals);
            result.measures = termination_measures(problem, st, ws.residuals);
            have_measures = true;
            if (const auto done = check_termination(result.measures, settings)) {
                status = *done;
                break;
            }
            if (k >= settings.max_iter) {
                status = Status::MaxIterations;
                break;
            }
            if (!ws.scaling.update(st.s, st.z)) break;
            if (!factor_and_solve_b1(problem, ws)) break;
            if (!affine_direction(problem, ws, st, ws.residuals, ws.affine)) break;
            const double sigma = mehrotra_sigma(st, ws.affine, cone);
            if (!combined_direction(problem, ws, st, ws.residuals, sigma, ws.affine, ws.combined)) {
                break;
            }
            if (callback != nullptr && *callback) {
                (*callback)(IterationTrace{k, st, ws.residuals, ws.scaling, st.mu, sigma,
                                           ws.affine, ws.combined});
            }
            const double alpha = step_and_update(st, ws.combined, cone, settings);
            if (!(alpha > kMinStep)) break;
        }
    }
    if (!have_measures) result.measures = TerminationMeasures{};

    result.status = status;
    result.iterations = k;
    result.kappa = st.kappa;
    result.tau = st.tau;
    result.refinement_exhausted = ws.refinement_exhausted;
    const bool certificate =
        status == Status::PrimalInfeasible || status == Status::DualInfeasible;
    const double scale = certificate ? 1.0 : 1.0 / st.tau;
    for (std::size_t i = 0; i < problem.n; ++i) result.x[i] = st.x[i] * scale;
    for (std::size_t i = 0; i < problem.p; ++i) result.y[i] = st.y[i] * scale;
    for (std::size_t i = 0; i < problem.m; ++i) {
        result.z[i] = st.z[i] * scale;
        result.s[i] = st.s[i] * scale;
    }
    if (certificate) {
        result.objective = std::nan("");
    } else {
        std::fill(ws.work_n.begin(), ws.work_n.end(), 0.0);
        symmetric_multiply_add(problem.Q, result.x, ws.work_n);
        result.objective = 0.5 * dot(result.x, ws.work_n) + dot(problem.q, result.x);
    }
    result.solve_time_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

}  // namespace qsocp
