#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "qsocp/ccs.hpp"

namespace qsocp {

/// Structure of the LDL^T factor of P M P^T for a fixed symmetric pattern.
///
/// The permuted upper triangle C = upper(P M P^T) is kept alongside the factor
/// pattern so numeric factorization can scatter values without searching.
/// value_map[p] is the position in C of the p-th stored entry of the
/// original upper triangle.
struct SymbolicFactor {
    std::size_t n = 0;
    std::vector<std::size_t> perm;          // perm[k] = original index at position k
    std::vector<std::size_t> inverse_perm;  // inverse_perm[perm[k]] = k
    std::vector<std::size_t> etree;         // parent, kNoIndex for roots
    std::vector<std::size_t> L_col_offsets{0};
    std::vector<std::size_t> L_row_indices;  // strictly lower, ascending per column
    std::vector<std::size_t> C_col_offsets{0};
    std::vector<std::size_t> C_row_indices;
    std::vector<std::size_t> value_map;

    std::size_t nnz_L() const noexcept { return L_row_indices.size(); }

    friend bool operator==(const SymbolicFactor&, const SymbolicFactor&) = default;
};

/// Elimination tree, factor pattern and permuted matrix pattern. Only the
/// structure of `upper` is read. Throws InvalidProblem if `upper` is not
/// square and upper triangular or `perm` is not a permutation of its size.
SymbolicFactor symbolic_ldl(const SparseCCS& upper, const std::vector<std::size_t>& perm);

/// Extra entries in L beyond the strict lower triangle of P M P^T.
std::size_t fill_in(const SparseCCS& upper, const SymbolicFactor& sym);

struct NumericFactor {
    std::vector<double> L_values;
    std::vector<double> D_values;
    std::size_t dyn_reg_count = 0;

    // Factorization workspace; sized once in the constructor.
    std::vector<double> C_values;
    std::vector<double> y;
    std::vector<std::size_t> flag;
    std::vector<std::size_t> pattern;
    std::vector<std::size_t> col_fill;

    NumericFactor() = default;
    explicit NumericFactor(const SymbolicFactor& sym);
};

/// Up-looking LDL^T of P M P^T where `values` are the stored values of the
/// upper triangle in the pattern that `sym` was built from. A pivot with
/// expected_signs[k] * D_k <= eps_d is replaced by expected_signs[k] * delta_d
/// and counted in dyn_reg_count. Signs are indexed by original position.
/// Does not allocate once `num` has been constructed from `sym`.
void numeric_ldl(std::span<const double> values, const SymbolicFactor& sym,
                 std::span<const int> expected_signs, double eps_d, double delta_d,
                 NumericFactor& num) noexcept;

/// Checked convenience form. Throws DimensionMismatch if the pattern of
/// `matrix` differs in size from the analyzed one.
NumericFactor numeric_ldl(const SparseCCS& matrix, const SymbolicFactor& sym,
                          std::span<const int> expected_signs, double eps_d = 1e-13,
                          double delta_d = 1e-7);

/// Solves M x = rhs using the factors. `work` must have length n; `out` may
/// alias `rhs`.
void ldl_solve(const SymbolicFactor& sym, const NumericFactor& num, std::span<const double> rhs,
               std::span<double> out, std::span<double> work) noexcept;

std::vector<double> ldl_solve(const SymbolicFactor& sym, const NumericFactor& num,
                              std::span<const double> rhs);

struct RefinementWorkspace {
    std::vector<double> residual;
    std::vector<double> correction;
    std::vector<double> trial;
    std::vector<double> solve_work;

    RefinementWorkspace() = default;
    explicit RefinementWorkspace(std::size_t n)
        : residual(n), correction(n), trial(n), solve_work(n) {}
};

struct RefinementResult {
    std::size_t passes = 0;
    double residual = 0.0;  // infinity norm of rhs - M x at the returned x
    bool exhausted = false;
};

/// Solves M x = rhs with M = upper + diag(diag_shift) (an empty shift means
/// none) using factors of a nearby regularized matrix, then corrects x until
/// |rhs - M x|_inf < eps_ir. Stops after max_passes corrections or as soon
/// as a correction fails to reduce the residual; the best iterate is kept and
/// `exhausted` is set when the tolerance was not met.
RefinementResult iterative_refinement(const SparseCCS& upper, std::span<const double> diag_shift,
                                      const SymbolicFactor& sym, const NumericFactor& num,
                                      std::span<const double> rhs, std::span<double> x,
                                      double eps_ir, std::size_t max_passes,
                                      RefinementWorkspace& ws) noexcept;

}  // namespace qsocp
