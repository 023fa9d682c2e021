#include "qsocp/problem.hpp"

#include <string>

#include "qsocp/errors.hpp"

namespace qsocp {

namespace {

void check_matrix(const SparseCCS& a, std::size_t rows, std::size_t cols, const char* name) {
    if (a.nrows != rows || a.ncols != cols) {
        throw DimensionMismatch(std::string(name) + " must be " + std::to_string(rows) + "x" +
                                std::to_string(cols) + ", got " + std::to_string(a.nrows) + "x" +
                                std::to_string(a.ncols));
    }
    a.validate();
}

void check_vector(std::size_t size, std::size_t expected, const char* name) {
    if (size != expected) {
        throw DimensionMismatch(std::string(name) + " has length " + std::to_string(size) +
                                ", expected " + std::to_string(expected));
    }
}

void check_family_dims(std::size_t n, std::size_t p, std::size_t m, const ConeSpec& cone,
                       const SparseCCS& Q, const SparseCCS& A, const SparseCCS& G) {
    cone.validate();
    if (cone.dim() != m) {
        throw DimensionMismatch("cone dimension " + std::to_string(cone.dim()) +
                                " does not match m = " + std::to_string(m));
    }
    if (n == 0) throw InvalidProblem("problem needs at least one variable");
    check_matrix(Q, n, n, "Q");
    check_matrix(A, p, n, "A");
    check_matrix(G, m, n, "G");
    if (!Q.is_upper_triangular()) throw InvalidProblem("Q must hold the upper triangle only");
}

}  // namespace

void ProblemData::validate() const {
    check_family_dims(n, p, m, cone, Q, A, G);
    check_vector(q.size(), n, "q");
    check_vector(b.size(), p, "b");
    check_vector(h.size(), m, "h");
    for (std::size_t j = 0; j < n; ++j) {
        const std::size_t k = Q.find(j, j);
        if (k != kNoIndex && Q.values[k] < 0.0) {
            throw InvalidProblem("Q has a negative diagonal entry at " + std::to_string(j));
        }
    }
}

bool ProblemData::q_is_zero() const noexcept {
    for (double v : Q.values) {
        if (v != 0.0) return false;
    }
    return true;
}

double ProblemData::objective(std::span<const double> x) const {
    std::vector<double> qx(n, 0.0);
    symmetric_multiply_add(Q, x, qx);
    double f = 0.0;
    for (std::size_t i = 0; i < n; ++i) f += x[i] * (0.5 * qx[i] + q[i]);
    return f;
}

ProblemData make_problem(std::size_t n, std::size_t p, const ConeSpec& cone) {
    ProblemData d;
    d.n = n;
    d.p = p;
    d.m = cone.dim();
    d.cone = cone;
    d.Q = SparseCCS(n, n);
    d.A = SparseCCS(p, n);
    d.G = SparseCCS(d.m, n);
    d.q.assign(n, 0.0);
    d.b.assign(p, 0.0);
    d.h.assign(d.m, 0.0);
    return d;
}

const char* matrix_name(MatrixId id) noexcept {
    switch (id) {
        case MatrixId::Q: return "Q";
        case MatrixId::A: return "A";
        case MatrixId::G: return "G";
    }
    return "?";
}

void ProblemFamily::validate() const {
    check_family_dims(n, p, m, cone, Q, A, G);
    for (MatrixId id : {MatrixId::Q, MatrixId::A, MatrixId::G}) {
        const auto& l = labels(id);
        if (!l.empty() && l.size() != pattern(id).nnz()) {
            throw InvalidProblem(std::string(matrix_name(id)) +
                                 " labels must cover every structural nonzero");
        }
    }
}

const SparseCCS& ProblemFamily::pattern(MatrixId id) const noexcept {
    switch (id) {
        case MatrixId::Q: return Q;
        case MatrixId::A: return A;
        case MatrixId::G: break;
    }
    return G;
}

const std::vector<std::string>& ProblemFamily::labels(MatrixId id) const noexcept {
    switch (id) {
        case MatrixId::Q: return Q_labels;
        case MatrixId::A: return A_labels;
        case MatrixId::G: break;
    }
    return G_labels;
}

SparseCCS pattern_only(const SparseCCS& a) {
    SparseCCS out = a;
    out.values.assign(out.nnz(), 0.0);
    return out;
}

ProblemFamily family_of(const ProblemData& problem) {
    ProblemFamily f;
    f.n = problem.n;
    f.p = problem.p;
    f.m = problem.m;
    f.cone = problem.cone;
    f.Q = pattern_only(problem.Q);
    f.A = pattern_only(problem.A);
    f.G = pattern_only(problem.G);
    return f;
}

bool pattern_contains(const SparseCCS& super, const SparseCCS& sub) noexcept {
    if (super.nrows != sub.nrows || super.ncols != sub.ncols) return false;
    for (std::size_t j = 0; j < sub.ncols; ++j) {
        for (std::size_t p = sub.col_offsets[j]; p < sub.col_offsets[j + 1]; ++p) {
            if (super.find(sub.row_indices[p], j) == kNoIndex) return false;
        }
    }
    return true;
}

}  // namespace qsocp
