#include "qsocp/kkt.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "qsocp/errors.hpp"

namespace qsocp {

namespace {

std::size_t slot_of(const SparseCCS& pattern, std::size_t row, std::size_t col) {
    const std::size_t k = pattern.find(row, col);
    if (k == kNoIndex) throw InvalidProblem("kkt_layout: missing structural entry");
    return k;
}

double dot(std::span<const double> a, std::span<const double> b) noexcept {
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
    return acc;
}

}  // namespace

KKTLayout kkt_layout(const ProblemFamily& family) {
    family.validate();
    KKTLayout L;
    L.family = family;
    const std::size_t n = family.n;
    const std::size_t p = family.p;
    const std::size_t m = family.m;
    const ConeSpec& cone = family.cone;
    L.dim = n + p + m + 2 * cone.soc_count();

    L.z_rows.resize(m);
    L.signs.assign(L.dim, -1);
    for (std::size_t j = 0; j < n; ++j) L.signs[j] = 1;
    std::size_t row = n + p;
    for (std::size_t i = 0; i < cone.nn_count; ++i) L.z_rows[i] = row++;
    std::size_t off = cone.nn_count;
    for (std::size_t d : cone.soc_dims) {
        for (std::size_t t = 0; t < d; ++t) L.z_rows[off + t] = row++;
        L.aux_rows.push_back(row);      // v, sign -1
        L.aux_rows.push_back(row + 1);  // u, sign +1
        L.signs[row + 1] = 1;
        row += 2;
        off += d;
    }

    std::vector<Triplet> t;
    for (std::size_t j = 0; j < L.dim; ++j) t.push_back({j, j, 0.0});
    for (std::size_t j = 0; j < n; ++j) {
        for (std::size_t k = family.Q.col_offsets[j]; k < family.Q.col_offsets[j + 1]; ++k) {
            t.push_back({family.Q.row_indices[k], j, 0.0});
        }
        for (std::size_t k = family.A.col_offsets[j]; k < family.A.col_offsets[j + 1]; ++k) {
            t.push_back({j, n + family.A.row_indices[k], 0.0});
        }
        for (std::size_t k = family.G.col_offsets[j]; k < family.G.col_offsets[j + 1]; ++k) {
            t.push_back({j, L.z_rows[family.G.row_indices[k]], 0.0});
        }
    }
    off = cone.nn_count;
    for (std::size_t s = 0; s < cone.soc_count(); ++s) {
        const std::size_t d = cone.soc_dims[s];
        const std::size_t v = L.aux_rows[2 * s];
        const std::size_t u = L.aux_rows[2 * s + 1];
        for (std::size_t i = 1; i < d; ++i) t.push_back({L.z_rows[off + i], v, 0.0});
        for (std::size_t i = 0; i < d; ++i) t.push_back({L.z_rows[off + i], u, 0.0});
        off += d;
    }
    L.pattern = ccs_from_triplets(L.dim, L.dim, t);

    L.diag_slots.resize(L.dim);
    for (std::size_t j = 0; j < L.dim; ++j) L.diag_slots[j] = slot_of(L.pattern, j, j);
    for (std::size_t j = 0; j < n; ++j) {
        for (std::size_t k = family.Q.col_offsets[j]; k < family.Q.col_offsets[j + 1]; ++k) {
            L.Q_slots.push_back(slot_of(L.pattern, family.Q.row_indices[k], j));
        }
    }
    // A and G slots follow the CCS order of their own matrices.
    L.A_slots.resize(family.A.nnz());
    L.G_slots.resize(family.G.nnz());
    for (std::size_t j = 0; j < n; ++j) {
        for (std::size_t k = family.A.col_offsets[j]; k < family.A.col_offsets[j + 1]; ++k) {
            L.A_slots[k] = slot_of(L.pattern, j, n + family.A.row_indices[k]);
        }
        for (std::size_t k = family.G.col_offsets[j]; k < family.G.col_offsets[j + 1]; ++k) {
            L.G_slots[k] = slot_of(L.pattern, j, L.z_rows[family.G.row_indices[k]]);
        }
    }

    for (std::size_t i = 0; i < cone.nn_count; ++i) L.scaling_slots.push_back(L.diag_slots[L.z_rows[i]]);
    off = cone.nn_count;
    for (std::size_t s = 0; s < cone.soc_count(); ++s) {
        const std::size_t d = cone.soc_dims[s];
        const std::size_t v = L.aux_rows[2 * s];
        const std::size_t u = L.aux_rows[2 * s + 1];
        for (std::size_t i = 0; i < d; ++i) L.scaling_slots.push_back(L.diag_slots[L.z_rows[off + i]]);
        for (std::size_t i = 1; i < d; ++i) L.scaling_slots.push_back(slot_of(L.pattern, L.z_rows[off + i], v));
        L.scaling_slots.push_back(L.diag_slots[v]);
        for (std::size_t i = 0; i < d; ++i) L.scaling_slots.push_back(slot_of(L.pattern, L.z_rows[off + i], u));
        L.scaling_slots.push_back(L.diag_slots[u]);
        off += d;
    }
    return L;
}

KKTSystem::KKTSystem(KKTLayout layout, double delta_s)
    : layout_(std::move(layout)), delta_s_(delta_s) {
    matrix_ = layout_.pattern;
    matrix_.values.assign(matrix_.nnz(), 0.0);
    shift_.assign(layout_.dim, delta_s_);
    for (std::size_t j = 0; j < layout_.dim; ++j) {
        const double reg = j < layout_.n() ? delta_s_ : -delta_s_;
        matrix_.values[layout_.diag_slots[j]] = reg;
        shift_[j] = -reg;
    }
    update_scaling(NTScaling(layout_.family.cone));
}

void KKTSystem::set_data(std::span<const double> Q_values, std::span<const double> A_values,
                         std::span<const double> G_values) noexcept {
    auto& val = matrix_.values;
    const SparseCCS& Q = layout_.family.Q;
    for (std::size_t j = 0; j < Q.ncols; ++j) {
        for (std::size_t k = Q.col_offsets[j]; k < Q.col_offsets[j + 1]; ++k) {
            const double reg = Q.row_indices[k] == j ? delta_s_ : 0.0;
            val[layout_.Q_slots[k]] = Q_values[k] + reg;
        }
    }
    for (std::size_t k = 0; k < A_values.size(); ++k) val[layout_.A_slots[k]] = A_values[k];
    for (std::size_t k = 0; k < G_values.size(); ++k) val[layout_.G_slots[k]] = G_values[k];
}

void KKTSystem::update_scaling(const NTScaling& scaling) noexcept {
    auto& val = matrix_.values;
    const auto& slots = layout_.scaling_slots;
    const double ds = delta_s_;
    std::size_t k = 0;
    const auto nn_w = scaling.nn_w();
    for (double w : nn_w) val[slots[k++]] = -w * w - ds;
    const auto socs = scaling.soc();
    for (std::size_t s = 0; s < socs.size(); ++s) {
        const SocScaling& blk = socs[s];
        const auto wbar = scaling.wbar(s);
        const std::size_t d = blk.dim;
        const double eta2 = blk.eta * blk.eta;
        const SocExpansion& e = blk.expansion;
        val[slots[k++]] = -eta2 * e.a - ds;
        for (std::size_t i = 1; i < d; ++i) val[slots[k++]] = -eta2 - ds;
        for (std::size_t i = 1; i < d; ++i) val[slots[k++]] = -eta2 * e.v1 * wbar[i];
        val[slots[k++]] = -eta2 - ds;
        val[slots[k++]] = -eta2 * e.u0;
        for (std::size_t i = 1; i < d; ++i) val[slots[k++]] = -eta2 * e.u1 * wbar[i];
        val[slots[k++]] = eta2 - ds;
    }
}

KKTSystem build_kkt(const ProblemData& problem, const KKTLayout& layout, double delta_s) {
    problem.validate();
    const ProblemFamily& f = layout.family;
    if (problem.n != f.n || problem.p != f.p || problem.m != f.m || !(problem.cone == f.cone) ||
        !problem.Q.same_pattern(f.Q) || !problem.A.same_pattern(f.A) ||
        !problem.G.same_pattern(f.G)) {
        throw FamilyMismatch("build_kkt: problem does not match the layout's family");
    }
    KKTSystem kkt(layout, delta_s);
    kkt.set_data(problem.Q.values, problem.A.values, problem.G.values);
    return kkt;
}

KKTSolver::KKTSolver(KKTLayout layout, SymbolicFactor symbolic,
                     const LinearSolverSettings& settings)
    : system_(std::move(layout), settings.delta_s),
      symbolic_(std::move(symbolic)),
      numeric_(symbolic_),
      refine_(symbolic_.n),
      settings_(settings),
      rhs_full_(symbolic_.n, 0.0),
      sol_full_(symbolic_.n, 0.0) {
    if (symbolic_.n != system_.dim() || symbolic_.value_map.size() != system_.matrix().nnz()) {
        throw InvalidProblem("KKTSolver: symbolic factor does not match the layout");
    }
}

bool KKTSolver::factor() noexcept {
    numeric_ldl(system_.matrix().values, symbolic_, system_.expected_signs(), settings_.eps_d,
                settings_.delta_d, numeric_);
    for (double d : numeric_.D_values) {
        if (!std::isfinite(d)) return false;
    }
    return true;
}

RefinementResult KKTSolver::solve(std::span<const double> rhs, std::span<double> sol) noexcept {
    const KKTLayout& L = system_.layout();
    const std::size_t np = L.n() + L.p();
    std::fill(rhs_full_.begin(), rhs_full_.end(), 0.0);
    for (std::size_t i = 0; i < np; ++i) rhs_full_[i] = rhs[i];
    for (std::size_t i = 0; i < L.m(); ++i) rhs_full_[L.z_rows[i]] = rhs[np + i];
    const RefinementResult r =
        iterative_refinement(system_.matrix(), system_.unregularize_shift(), symbolic_, numeric_,
                             rhs_full_, sol_full_, settings_.eps_ir, settings_.max_ir_passes,
                             refine_);
    for (std::size_t i = 0; i < np; ++i) sol[i] = sol_full_[i];
    for (std::size_t i = 0; i < L.m(); ++i) sol[np + i] = sol_full_[L.z_rows[i]];
    return r;
}

NumericFactor factor(const KKTSystem& kkt, const SymbolicFactor& sym, double eps_d,
                     double delta_d) {
    return numeric_ldl(kkt.matrix(), sym, kkt.expected_signs(), eps_d, delta_d);
}

void build_rhs1(const ProblemData& problem, std::span<double> out) noexcept {
    const std::size_t n = problem.n;
    const std::size_t p = problem.p;
    for (std::size_t i = 0; i < n; ++i) out[i] = -problem.q[i];
    for (std::size_t i = 0; i < p; ++i) out[n + i] = problem.b[i];
    for (std::size_t i = 0; i < problem.m; ++i) out[n + p + i] = problem.h[i];
}

void build_rhs2(const NTScaling& scaling, std::span<const double> d_x,
                std::span<const double> d_y, std::span<const double> d_z,
                std::span<const double> d_s, std::span<double> out,
                std::span<double> work) noexcept {
    const std::size_t n = d_x.size();
    const std::size_t p = d_y.size();
    const std::size_t m = d_z.size();
    for (std::size_t i = 0; i < n; ++i) out[i] = -d_x[i];
    for (std::size_t i = 0; i < p; ++i) out[n + i] = d_y[i];
    std::span<double> tmp = work.first(m);
    jordan_inverse_op_unchecked(scaling.lambda(), d_s, tmp, scaling.cone());
    std::span<double> tail = out.subspan(n + p, m);
    apply_W(scaling, tmp, tail);
    for (std::size_t i = 0; i < m; ++i) tail[i] = d_z[i] - tail[i];
}

SolvePairResult solve_pair(KKTSolver& solver, const ProblemData& problem,
                           const NTScaling& scaling, std::span<const double> d_x,
                           std::span<const double> d_y, std::span<const double> d_z,
                           std::span<const double> d_s, std::span<double> xi1,
                           std::span<double> xi2) {
    const std::size_t dim = problem.n + problem.p + problem.m;
    if (xi1.size() != dim || xi2.size() != dim) {
        throw DimensionMismatch("solve_pair: outputs must have length n + p + m");
    }
    std::vector<double> rhs(dim);
    std::vector<double> work(problem.m);
    SolvePairResult r;
    build_rhs1(problem, rhs);
    r.first = solver.solve(rhs, xi1);
    build_rhs2(scaling, d_x, d_y, d_z, d_s, rhs, work);
    r.second = solver.solve(rhs, xi2);
    return r;
}

double compute_dtau(const ProblemData& problem, const NTScaling& scaling,
                    std::span<const double> x, double tau, double kappa,
                    std::span<const double> xi1, std::span<const double> xi2, double d_tau,
                    double d_kappa, std::span<double> work) noexcept {
    const std::size_t n = problem.n;
    const std::size_t p = problem.p;
    const std::size_t m = problem.m;
    std::span<double> wn = work.first(n);
    std::span<double> wm = work.subspan(n, m);

    std::fill(wn.begin(), wn.end(), 0.0);
    symmetric_multiply_add(problem.Q, x, wn);
    for (std::size_t i = 0; i < n; ++i) wn[i] = problem.q[i] + 2.0 * wn[i] / tau;
    const double num = -d_tau + d_kappa / tau + dot(wn, xi2.first(n)) +
                       dot(problem.b, xi2.subspan(n, p)) + dot(problem.h, xi2.subspan(n + p, m));

    // The direct form keeps the tau row exact for the computed xi1.
    // wn = q + 2Qx/tau, so x'Qx/tau^2 = (x'wn - q'x) / (2 tau).
    const double xqx_tau2 = (dot(x, wn) - dot(problem.q, x)) / (2.0 * tau);
    double den = xqx_tau2 + kappa / tau -
                 (dot(wn, xi1.first(n)) + dot(problem.b, xi1.subspan(n, p)) +
                  dot(problem.h, xi1.subspan(n + p, m)));
    if (!(den > 0.0)) {
        // Cancellation; fall back to the equivalent sum of nonnegative terms.
        for (std::size_t i = 0; i < n; ++i) wn[i] = x[i] / tau - xi1[i];
        apply_W(scaling, xi1.subspan(n + p, m), wm);
        den = quadratic_form(problem.Q, wn) + dot(wm, wm) + kappa / tau;
    }
    if (!(den > 0.0) || !std::isfinite(den)) return std::nan("");
    return num / den;
}

double compute_dtau(const ProblemData& problem, const NTScaling& scaling,
                    std::span<const double> x, double tau, double kappa,
                    std::span<const double> xi1, std::span<const double> xi2, double d_tau,
                    double d_kappa) {
    if (x.size() != problem.n || xi1.size() < problem.n + problem.p + problem.m ||
        xi2.size() < problem.n + problem.p + problem.m) {
        throw DimensionMismatch("compute_dtau: vector lengths do not match the problem");
    }
    std::vector<double> work(problem.n + problem.m);
    return compute_dtau(problem, scaling, x, tau, kappa, xi1, xi2, d_tau, d_kappa, work);
}

double recover_ds_dkappa(const NTScaling& scaling, std::span<const double> d_s,
                         std::span<const double> dz, double d_kappa, double dtau, double kappa,
                         double tau, std::span<double> ds, std::span<double> work) noexcept {
    const std::size_t m = dz.size();
    std::span<double> a = work.first(m);
    std::span<double> b = work.subspan(m, m);
    jordan_inverse_op_unchecked(scaling.lambda(), d_s, a, scaling.cone());
    apply_W(scaling, dz, b);
    for (std::size_t i = 0; i < m; ++i) a[i] -= b[i];
    apply_W(scaling, a, ds);
    return (d_kappa - kappa * dtau) / tau;
}

}  // namespace qsocp
