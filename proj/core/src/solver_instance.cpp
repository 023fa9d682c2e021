#include "qsocp/solver_instance.hpp"

#include <algorithm>
#include <string>

#include "qsocp/errors.hpp"

namespace qsocp {

namespace {

ProblemData storage_for(const ProblemFamily& f) {
    ProblemData d;
    d.n = f.n;
    d.p = f.p;
    d.m = f.m;
    d.cone = f.cone;
    d.Q = f.Q;
    d.A = f.A;
    d.G = f.G;
    d.q.assign(f.n, 0.0);
    d.b.assign(f.p, 0.0);
    d.h.assign(f.m, 0.0);
    return d;
}

// Scatters src into the family pattern of dst, zeroing entries src lacks.
void scatter(const SparseCCS& src, SparseCCS& dst, const char* name) {
    if (src.nrows != dst.nrows || src.ncols != dst.ncols) {
        throw FamilyMismatch(std::string(name) + " has different dimensions than the family");
    }
    if (src.col_offsets.size() != src.ncols + 1 || src.values.size() != src.row_indices.size()) {
        throw FamilyMismatch(std::string(name) + " is not a valid CCS matrix");
    }
    for (std::size_t j = 0; j < dst.ncols; ++j) {
        std::size_t p = src.col_offsets[j];
        const std::size_t pend = src.col_offsets[j + 1];
        for (std::size_t k = dst.col_offsets[j]; k < dst.col_offsets[j + 1]; ++k) {
            const std::size_t row = dst.row_indices[k];
            if (p < pend && src.row_indices[p] < row) break;
            if (p < pend && src.row_indices[p] == row) {
                dst.values[k] = src.values[p++];
            } else {
                dst.values[k] = 0.0;
            }
        }
        if (p != pend) {
            throw FamilyMismatch(std::string(name) + " has a structural nonzero outside the family (column " +
                                 std::to_string(j) + ")");
        }
    }
}

template <class T>
std::size_t bytes_of(const std::vector<T>& v) {
    return v.capacity() * sizeof(T);
}

std::size_t bytes_of(const SparseCCS& a) {
    return bytes_of(a.col_offsets) + bytes_of(a.row_indices) + bytes_of(a.values);
}

}  // namespace

SolverInstance::SolverInstance(const CustomizationPlan& plan, const Settings& settings)
    : settings_(settings),
      problem_(storage_for(plan.family())),
      ws_(plan.layout, plan.symbolic, settings),
      state_(plan.family().n, plan.family().p, plan.family().m),
      result_(plan.family().n, plan.family().p, plan.family().m) {
    settings_.validate();
}

void SolverInstance::load_instance(const ProblemData& problem) {
    if (problem.n != problem_.n || problem.p != problem_.p || problem.m != problem_.m ||
        !(problem.cone == problem_.cone)) {
        throw FamilyMismatch("load_instance: dimensions or cone differ from the family");
    }
    if (problem.q.size() != problem_.n || problem.b.size() != problem_.p ||
        problem.h.size() != problem_.m) {
        throw DimensionMismatch("load_instance: vector lengths do not match");
    }
    scatter(problem.Q, problem_.Q, "Q");
    scatter(problem.A, problem_.A, "A");
    scatter(problem.G, problem_.G, "G");
    std::copy(problem.q.begin(), problem.q.end(), problem_.q.begin());
    std::copy(problem.b.begin(), problem.b.end(), problem_.b.begin());
    std::copy(problem.h.begin(), problem.h.end(), problem_.h.begin());
}

std::span<double> SolverInstance::values(MatrixId id) noexcept {
    switch (id) {
        case MatrixId::Q: return problem_.Q.values;
        case MatrixId::A: return problem_.A.values;
        case MatrixId::G: break;
    }
    return problem_.G.values;
}

const SolveResult& SolverInstance::solve(const IterationCallback* callback) noexcept {
    ws_.kkt.system().set_data(problem_.Q.values, problem_.A.values, problem_.G.values);
    run_ipm(problem_, ws_, settings_, state_, result_, callback);
    return result_;
}

std::size_t SolverInstance::workspace_bytes() const noexcept {
    std::size_t total = bytes_of(problem_.Q) + bytes_of(problem_.A) + bytes_of(problem_.G) +
                        bytes_of(problem_.q) + bytes_of(problem_.b) + bytes_of(problem_.h);
    const KKTSolver& k = ws_.kkt;
    total += bytes_of(k.system().matrix());
    total += bytes_of(k.numeric().L_values) + bytes_of(k.numeric().D_values) +
             bytes_of(k.numeric().C_values) + bytes_of(k.numeric().y) +
             bytes_of(k.numeric().flag) + bytes_of(k.numeric().pattern) +
             bytes_of(k.numeric().col_fill);
    for (const auto* v : {&ws_.xi1, &ws_.xi2, &ws_.rhs, &ws_.d_x, &ws_.d_y, &ws_.d_z, &ws_.d_s,
                          &ws_.work_n, &ws_.work_nm, &ws_.work_m, &ws_.work_m2}) {
        total += bytes_of(*v);
    }
    for (const Direction* d : {&ws_.affine, &ws_.combined}) {
        total += bytes_of(d->dx) + bytes_of(d->dy) + bytes_of(d->dz) + bytes_of(d->ds);
    }
    const Residuals& r = ws_.residuals;
    total += bytes_of(r.r_x) + bytes_of(r.r_y) + bytes_of(r.r_z) + bytes_of(r.Qx) +
             bytes_of(r.ATy_GTz) + bytes_of(r.Ax) + bytes_of(r.Gx);
    total += bytes_of(state_.x) + bytes_of(state_.y) + bytes_of(state_.z) + bytes_of(state_.s);
    total += bytes_of(result_.x) + bytes_of(result_.y) + bytes_of(result_.z) + bytes_of(result_.s);
    total += ws_.scaling.lambda().size() * sizeof(double);
    return total;
}

SolverInstance instantiate(const CustomizationPlan& plan, const Settings& settings) {
    return SolverInstance(plan, settings);
}

SolveResult solve(const ProblemData& problem, const Settings& settings,
                  const CustomizationPlan* plan, const IterationCallback& callback) {
    problem.validate();
    settings.validate();
    CustomizationPlan local;
    if (plan == nullptr) {
        local = analyze_family(family_of(problem));
        plan = &local;
    }
    SolverInstance instance(*plan, settings);
    instance.load_instance(problem);
    return instance.solve(callback ? &callback : nullptr);
}

}  // namespace qsocp
