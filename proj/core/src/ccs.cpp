#include "qsocp/ccs.hpp"

#include <algorithm>
#include <numeric>
#include <string>

#include "qsocp/errors.hpp"

namespace qsocp {

void SparseCCS::validate() const {
    if (col_offsets.size() != ncols + 1) throw InvalidProblem("ccs: col_offsets has wrong length");
    if (col_offsets.front() != 0) throw InvalidProblem("ccs: col_offsets[0] must be 0");
    if (col_offsets.back() != row_indices.size()) {
        throw InvalidProblem("ccs: col_offsets[ncols] must equal nnz");
    }
    if (values.size() != row_indices.size()) {
        throw InvalidProblem("ccs: values and row_indices differ in length");
    }
    for (std::size_t j = 0; j < ncols; ++j) {
        if (col_offsets[j] > col_offsets[j + 1]) {
            throw InvalidProblem("ccs: col_offsets not nondecreasing");
        }
        for (std::size_t p = col_offsets[j]; p < col_offsets[j + 1]; ++p) {
            if (row_indices[p] >= nrows) throw InvalidProblem("ccs: row index out of range");
            if (p > col_offsets[j] && row_indices[p] <= row_indices[p - 1]) {
                throw InvalidProblem("ccs: rows not strictly increasing in column " +
                                     std::to_string(j));
            }
        }
    }
}

bool SparseCCS::is_upper_triangular() const noexcept {
    for (std::size_t j = 0; j < ncols; ++j) {
        for (std::size_t p = col_offsets[j]; p < col_offsets[j + 1]; ++p) {
            if (row_indices[p] > j) return false;
        }
    }
    return true;
}

bool SparseCCS::same_pattern(const SparseCCS& other) const noexcept {
    return nrows == other.nrows && ncols == other.ncols && col_offsets == other.col_offsets &&
           row_indices == other.row_indices;
}

std::size_t SparseCCS::find(std::size_t row, std::size_t col) const noexcept {
    if (col >= ncols) return kNoIndex;
    const auto first = row_indices.begin() + static_cast<std::ptrdiff_t>(col_offsets[col]);
    const auto last = row_indices.begin() + static_cast<std::ptrdiff_t>(col_offsets[col + 1]);
    const auto it = std::lower_bound(first, last, row);
    if (it == last || *it != row) return kNoIndex;
    return static_cast<std::size_t>(it - row_indices.begin());
}

SparseCCS ccs_from_triplets(std::size_t nrows, std::size_t ncols,
                            std::span<const Triplet> triplets) {
    for (const Triplet& t : triplets) {
        if (t.row >= nrows || t.col >= ncols) {
            throw InvalidProblem("ccs_from_triplets: index (" + std::to_string(t.row) + ", " +
                                 std::to_string(t.col) + ") out of range");
        }
    }
    std::vector<std::size_t> order(triplets.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        const Triplet& x = triplets[a];
        const Triplet& y = triplets[b];
        return x.col != y.col ? x.col < y.col : x.row < y.row;
    });

    SparseCCS out(nrows, ncols);
    out.row_indices.reserve(triplets.size());
    out.values.reserve(triplets.size());
    std::size_t last_row = kNoIndex;
    std::size_t last_col = kNoIndex;
    for (std::size_t idx : order) {
        const Triplet& t = triplets[idx];
        if (t.row == last_row && t.col == last_col) {
            out.values.back() += t.value;
            continue;
        }
        out.row_indices.push_back(t.row);
        out.values.push_back(t.value);
        ++out.col_offsets[t.col + 1];
        last_row = t.row;
        last_col = t.col;
    }
    for (std::size_t j = 0; j < ncols; ++j) out.col_offsets[j + 1] += out.col_offsets[j];
    return out;
}

SparseCCS ccs_identity(std::size_t n, double diag) {
    SparseCCS out(n, n);
    out.row_indices.resize(n);
    out.values.assign(n, diag);
    for (std::size_t j = 0; j < n; ++j) {
        out.row_indices[j] = j;
        out.col_offsets[j + 1] = j + 1;
    }
    return out;
}

SparseCCS transpose(const SparseCCS& a) {
    SparseCCS t(a.ncols, a.nrows);
    t.row_indices.resize(a.nnz());
    t.values.resize(a.nnz());
    for (std::size_t r : a.row_indices) ++t.col_offsets[r + 1];
    for (std::size_t i = 0; i < a.nrows; ++i) t.col_offsets[i + 1] += t.col_offsets[i];
    std::vector<std::size_t> next(t.col_offsets.begin(), t.col_offsets.end() - 1);
    for (std::size_t j = 0; j < a.ncols; ++j) {
        for (std::size_t p = a.col_offsets[j]; p < a.col_offsets[j + 1]; ++p) {
            const std::size_t q = next[a.row_indices[p]]++;
            t.row_indices[q] = j;
            t.values[q] = a.values[p];
        }
    }
    return t;
}

void multiply_add(const SparseCCS& a, std::span<const double> x, std::span<double> y,
                  double alpha) noexcept {
    for (std::size_t j = 0; j < a.ncols; ++j) {
        const double xj = alpha * x[j];
        if (xj == 0.0) continue;
        for (std::size_t p = a.col_offsets[j]; p < a.col_offsets[j + 1]; ++p) {
            y[a.row_indices[p]] += a.values[p] * xj;
        }
    }
}

void multiply_transpose_add(const SparseCCS& a, std::span<const double> x, std::span<double> y,
                            double alpha) noexcept {
    for (std::size_t j = 0; j < a.ncols; ++j) {
        double acc = 0.0;
        for (std::size_t p = a.col_offsets[j]; p < a.col_offsets[j + 1]; ++p) {
            acc += a.values[p] * x[a.row_indices[p]];
        }
        y[j] += alpha * acc;
    }
}

void symmetric_multiply_add(const SparseCCS& upper, std::span<const double> x,
                            std::span<double> y, double alpha) noexcept {
    for (std::size_t j = 0; j < upper.ncols; ++j) {
        double acc = 0.0;
        const double xj = alpha * x[j];
        for (std::size_t p = upper.col_offsets[j]; p < upper.col_offsets[j + 1]; ++p) {
            const std::size_t i = upper.row_indices[p];
            const double v = upper.values[p];
            if (i == j) {
                y[i] += v * xj;
            } else {
                y[i] += v * xj;
                acc += v * x[i];
            }
        }
        y[j] += alpha * acc;
    }
}

double quadratic_form(const SparseCCS& upper, std::span<const double> x) noexcept {
    double acc = 0.0;
    for (std::size_t j = 0; j < upper.ncols; ++j) {
        for (std::size_t p = upper.col_offsets[j]; p < upper.col_offsets[j + 1]; ++p) {
            const std::size_t i = upper.row_indices[p];
            const double t = upper.values[p] * x[i] * x[j];
            acc += i == j ? t : 2.0 * t;
        }
    }
    return acc;
}

}  // namespace qsocp
