#include "qsocp/ldl.hpp"

#include <algorithm>
#include <cmath>

#include "qsocp/amd.hpp"
#include "qsocp/errors.hpp"

namespace qsocp {

namespace {

double inf_norm(std::span<const double> v) noexcept {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

// r = rhs - (upper + diag(shift)) x
void residual_of(const SparseCCS& upper, std::span<const double> shift,
                 std::span<const double> rhs, std::span<const double> x,
                 std::span<double> r) noexcept {
    std::copy(rhs.begin(), rhs.end(), r.begin());
    symmetric_multiply_add(upper, x, r, -1.0);
    if (!shift.empty()) {
        for (std::size_t i = 0; i < r.size(); ++i) r[i] -= shift[i] * x[i];
    }
}

}  // namespace

SymbolicFactor symbolic_ldl(const SparseCCS& upper, const std::vector<std::size_t>& perm) {
    if (upper.nrows != upper.ncols) throw InvalidProblem("symbolic_ldl: matrix must be square");
    if (!upper.is_upper_triangular()) {
        throw InvalidProblem("symbolic_ldl: expected the upper triangle only");
    }
    const std::size_t n = upper.ncols;
    if (perm.size() != n) throw InvalidProblem("symbolic_ldl: permutation has wrong length");

    SymbolicFactor sym;
    sym.n = n;
    sym.perm = perm;
    sym.inverse_perm = invert_permutation(perm);
    const auto& pinv = sym.inverse_perm;

    // C = upper triangle of P M P^T, with a map from source entries.
    sym.C_col_offsets.assign(n + 1, 0);
    for (std::size_t j = 0; j < n; ++j) {
        for (std::size_t p = upper.col_offsets[j]; p < upper.col_offsets[j + 1]; ++p) {
            const std::size_t i = upper.row_indices[p];
            ++sym.C_col_offsets[std::max(pinv[i], pinv[j]) + 1];
        }
    }
    for (std::size_t k = 0; k < n; ++k) sym.C_col_offsets[k + 1] += sym.C_col_offsets[k];
    const std::size_t nnz = upper.nnz();
    sym.C_row_indices.assign(nnz, 0);
    sym.value_map.assign(nnz, 0);
    {
        std::vector<std::size_t> next(sym.C_col_offsets.begin(), sym.C_col_offsets.end() - 1);
        for (std::size_t j = 0; j < n; ++j) {
            for (std::size_t p = upper.col_offsets[j]; p < upper.col_offsets[j + 1]; ++p) {
                const std::size_t a = pinv[upper.row_indices[p]];
                const std::size_t b = pinv[j];
                const std::size_t col = std::max(a, b);
                const std::size_t q = next[col]++;
                sym.C_row_indices[q] = std::min(a, b);
                sym.value_map[p] = q;
            }
        }
        // Sort rows within each column, carrying the value map along.
        std::vector<std::size_t> where(nnz);
        for (std::size_t p = 0; p < nnz; ++p) where[sym.value_map[p]] = p;
        std::vector<std::size_t> idx;
        for (std::size_t k = 0; k < n; ++k) {
            const std::size_t lo = sym.C_col_offsets[k];
            const std::size_t hi = sym.C_col_offsets[k + 1];
            idx.resize(hi - lo);
            for (std::size_t t = 0; t < idx.size(); ++t) idx[t] = lo + t;
            std::sort(idx.begin(), idx.end(), [&](std::size_t x, std::size_t y) {
                return sym.C_row_indices[x] < sym.C_row_indices[y];
            });
            std::vector<std::size_t> rows(idx.size());
            std::vector<std::size_t> src(idx.size());
            for (std::size_t t = 0; t < idx.size(); ++t) {
                rows[t] = sym.C_row_indices[idx[t]];
                src[t] = where[idx[t]];
            }
            for (std::size_t t = 0; t < idx.size(); ++t) {
                sym.C_row_indices[lo + t] = rows[t];
                sym.value_map[src[t]] = lo + t;
            }
        }
    }

    // Elimination tree and column counts.
    sym.etree.assign(n, kNoIndex);
    std::vector<std::size_t> flag(n, kNoIndex);
    std::vector<std::size_t> count(n, 0);
    for (std::size_t k = 0; k < n; ++k) {
        flag[k] = k;
        for (std::size_t p = sym.C_col_offsets[k]; p < sym.C_col_offsets[k + 1]; ++p) {
            std::size_t i = sym.C_row_indices[p];
            for (; i < k && flag[i] != k; i = sym.etree[i]) {
                if (sym.etree[i] == kNoIndex) sym.etree[i] = k;
                ++count[i];
                flag[i] = k;
            }
        }
    }
    sym.L_col_offsets.assign(n + 1, 0);
    for (std::size_t k = 0; k < n; ++k) sym.L_col_offsets[k + 1] = sym.L_col_offsets[k] + count[k];

    // Row pattern of L: row k touches every column on the etree reach of C(:,k).
    sym.L_row_indices.assign(sym.L_col_offsets[n], 0);
    std::vector<std::size_t> next(sym.L_col_offsets.begin(), sym.L_col_offsets.end() - 1);
    std::fill(flag.begin(), flag.end(), kNoIndex);
    for (std::size_t k = 0; k < n; ++k) {
        flag[k] = k;
        for (std::size_t p = sym.C_col_offsets[k]; p < sym.C_col_offsets[k + 1]; ++p) {
            for (std::size_t i = sym.C_row_indices[p]; flag[i] != k; i = sym.etree[i]) {
                sym.L_row_indices[next[i]++] = k;
                flag[i] = k;
            }
        }
    }
    return sym;
}

std::size_t fill_in(const SparseCCS& upper, const SymbolicFactor& sym) {
    std::size_t strict = 0;
    for (std::size_t j = 0; j < upper.ncols; ++j) {
        for (std::size_t p = upper.col_offsets[j]; p < upper.col_offsets[j + 1]; ++p) {
            if (upper.row_indices[p] != j) ++strict;
        }
    }
    return sym.nnz_L() - strict;
}

NumericFactor::NumericFactor(const SymbolicFactor& sym)
    : L_values(sym.nnz_L(), 0.0),
      D_values(sym.n, 0.0),
      C_values(sym.value_map.size(), 0.0),
      y(sym.n, 0.0),
      flag(sym.n, kNoIndex),
      pattern(sym.n, 0),
      col_fill(sym.n, 0) {}

void numeric_ldl(std::span<const double> values, const SymbolicFactor& sym,
                 std::span<const int> expected_signs, double eps_d, double delta_d,
                 NumericFactor& num) noexcept {
    const std::size_t n = sym.n;
    for (std::size_t p = 0; p < values.size(); ++p) num.C_values[sym.value_map[p]] = values[p];
    num.dyn_reg_count = 0;

    const auto& Cp = sym.C_col_offsets;
    const auto& Ci = sym.C_row_indices;
    const auto& Lp = sym.L_col_offsets;
    const auto& Li = sym.L_row_indices;
    const auto& parent = sym.etree;
    auto& Lx = num.L_values;
    auto& D = num.D_values;
    auto& Y = num.y;
    auto& flag = num.flag;
    auto& pat = num.pattern;
    auto& fill = num.col_fill;

    for (std::size_t k = 0; k < n; ++k) {
        Y[k] = 0.0;
        std::size_t top = n;
        flag[k] = k;
        fill[k] = 0;
        for (std::size_t p = Cp[k]; p < Cp[k + 1]; ++p) {
            std::size_t i = Ci[p];
            Y[i] += num.C_values[p];
            std::size_t len = 0;
            for (; flag[i] != k; i = parent[i]) {
                pat[len++] = i;
                flag[i] = k;
            }
            while (len > 0) pat[--top] = pat[--len];
        }
        D[k] = Y[k];
        Y[k] = 0.0;
        for (; top < n; ++top) {
            const std::size_t i = pat[top];
            const double yi = Y[i];
            Y[i] = 0.0;
            const std::size_t end = Lp[i] + fill[i];
            for (std::size_t p = Lp[i]; p < end; ++p) Y[Li[p]] -= Lx[p] * yi;
            const double lki = yi / D[i];
            D[k] -= lki * yi;
            Lx[end] = lki;
            ++fill[i];
        }
        const double sign = expected_signs[sym.perm[k]] >= 0 ? 1.0 : -1.0;
        if (sign * D[k] <= eps_d) {
            D[k] = sign * delta_d;
            ++num.dyn_reg_count;
        }
    }
}

NumericFactor numeric_ldl(const SparseCCS& matrix, const SymbolicFactor& sym,
                          std::span<const int> expected_signs, double eps_d, double delta_d) {
    if (matrix.ncols != sym.n || matrix.nnz() != sym.value_map.size()) {
        throw DimensionMismatch("numeric_ldl: matrix does not match the analyzed pattern");
    }
    if (expected_signs.size() != sym.n) {
        throw DimensionMismatch("numeric_ldl: expected_signs has wrong length");
    }
    NumericFactor num(sym);
    numeric_ldl(matrix.values, sym, expected_signs, eps_d, delta_d, num);
    return num;
}

void ldl_solve(const SymbolicFactor& sym, const NumericFactor& num, std::span<const double> rhs,
               std::span<double> out, std::span<double> work) noexcept {
    const std::size_t n = sym.n;
    const auto& Lp = sym.L_col_offsets;
    const auto& Li = sym.L_row_indices;
    const auto& Lx = num.L_values;
    for (std::size_t k = 0; k < n; ++k) work[k] = rhs[sym.perm[k]];
    for (std::size_t j = 0; j < n; ++j) {
        const double xj = work[j];
        for (std::size_t p = Lp[j]; p < Lp[j + 1]; ++p) work[Li[p]] -= Lx[p] * xj;
    }
    for (std::size_t j = 0; j < n; ++j) work[j] /= num.D_values[j];
    for (std::size_t j = n; j-- > 0;) {
        double acc = work[j];
        for (std::size_t p = Lp[j]; p < Lp[j + 1]; ++p) acc -= Lx[p] * work[Li[p]];
        work[j] = acc;
    }
    for (std::size_t k = 0; k < n; ++k) out[sym.perm[k]] = work[k];
}

std::vector<double> ldl_solve(const SymbolicFactor& sym, const NumericFactor& num,
                              std::span<const double> rhs) {
    if (rhs.size() != sym.n) throw DimensionMismatch("ldl_solve: rhs has wrong length");
    std::vector<double> out(sym.n);
    std::vector<double> work(sym.n);
    ldl_solve(sym, num, rhs, out, work);
    return out;
}

RefinementResult iterative_refinement(const SparseCCS& upper, std::span<const double> diag_shift,
                                      const SymbolicFactor& sym, const NumericFactor& num,
                                      std::span<const double> rhs, std::span<double> x,
                                      double eps_ir, std::size_t max_passes,
                                      RefinementWorkspace& ws) noexcept {
    const std::size_t n = sym.n;
    std::span<double> r(ws.residual.data(), n);
    std::span<double> dx(ws.correction.data(), n);
    std::span<double> trial(ws.trial.data(), n);

    ldl_solve(sym, num, rhs, x, ws.solve_work);
    residual_of(upper, diag_shift, rhs, x, r);
    RefinementResult result;
    result.residual = inf_norm(r);

    while (result.residual >= eps_ir && result.passes < max_passes) {
        ldl_solve(sym, num, r, dx, ws.solve_work);
        for (std::size_t i = 0; i < n; ++i) trial[i] = x[i] + dx[i];
        ++result.passes;
        residual_of(upper, diag_shift, rhs, trial, dx);
        const double norm = inf_norm(dx);
        if (!(norm < result.residual)) break;
        std::copy(trial.begin(), trial.end(), x.begin());
        std::copy(dx.begin(), dx.end(), r.begin());
        result.residual = norm;
    }
    result.exhausted = !(result.residual < eps_ir);
    return result;
}

}  // namespace qsocp
