#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "qsocp/ccs.hpp"
#include "qsocp/cones.hpp"

namespace qsocp {

/// minimize 1/2 x'Qx + q'x  subject to  Ax = b,  Gx + s = h,  s in K.
/// Q holds the upper triangle of a symmetric positive semidefinite matrix.
struct ProblemData {
    std::size_t n = 0;
    std::size_t p = 0;
    std::size_t m = 0;
    SparseCCS Q;
    std::vector<double> q;
    SparseCCS A;
    std::vector<double> b;
    SparseCCS G;
    std::vector<double> h;
    ConeSpec cone;

    /// Checks dimensions, CCS invariants, cone consistency, that Q is upper
    /// triangular and that no diagonal entry of Q is negative. Throws
    /// InvalidProblem or DimensionMismatch.
    void validate() const;

    /// True when Q has no nonzero value.
    bool q_is_zero() const noexcept;

    double objective(std::span<const double> x) const;

    friend bool operator==(const ProblemData&, const ProblemData&) = default;
};

/// Empty m-by-n matrices and zero vectors of the right sizes.
ProblemData make_problem(std::size_t n, std::size_t p, const ConeSpec& cone);

enum class MatrixId { Q, A, G };

const char* matrix_name(MatrixId id) noexcept;

/// Sparsity structure shared by all instances of a problem family. Pattern
/// matrices carry zero values. Labels, when present, name each structural
/// nonzero in CCS order.
struct ProblemFamily {
    std::size_t n = 0;
    std::size_t p = 0;
    std::size_t m = 0;
    ConeSpec cone;
    SparseCCS Q;
    SparseCCS A;
    SparseCCS G;
    std::vector<std::string> Q_labels;
    std::vector<std::string> A_labels;
    std::vector<std::string> G_labels;

    void validate() const;

    const SparseCCS& pattern(MatrixId id) const noexcept;
    const std::vector<std::string>& labels(MatrixId id) const noexcept;

    friend bool operator==(const ProblemFamily&, const ProblemFamily&) = default;
};

ProblemFamily family_of(const ProblemData& problem);

/// Same structure with every value set to zero.
SparseCCS pattern_only(const SparseCCS& a);

/// True when every structural nonzero of `sub` is present in `super`.
bool pattern_contains(const SparseCCS& super, const SparseCCS& sub) noexcept;

}  // namespace qsocp
