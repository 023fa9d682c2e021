#pragma once

#include <cstddef>
#include <limits>
#include <span>
#include <vector>

namespace qsocp {

inline constexpr std::size_t kNoIndex = std::numeric_limits<std::size_t>::max();

struct Triplet {
    std::size_t row = 0;
    std::size_t col = 0;
    double value = 0.0;
};

/// Compressed column storage. Row indices are sorted and unique within each
/// column. Symmetric matrices store the upper triangle only (row <= col).
struct SparseCCS {
    std::size_t nrows = 0;
    std::size_t ncols = 0;
    std::vector<std::size_t> col_offsets{0};
    std::vector<std::size_t> row_indices;
    std::vector<double> values;

    SparseCCS() = default;
    SparseCCS(std::size_t rows, std::size_t cols)
        : nrows(rows), ncols(cols), col_offsets(cols + 1, 0) {}

    std::size_t nnz() const noexcept { return row_indices.size(); }

    /// Throws InvalidProblem if the CCS invariants do not hold.
    void validate() const;

    bool is_upper_triangular() const noexcept;

    /// True when both matrices have identical dimensions and structure.
    bool same_pattern(const SparseCCS& other) const noexcept;

    /// Index of entry (row, col) in values, or kNoIndex if structurally zero.
    std::size_t find(std::size_t row, std::size_t col) const noexcept;

    friend bool operator==(const SparseCCS&, const SparseCCS&) = default;
};

/// Builds canonical CCS; duplicate coordinates are summed. Throws
/// InvalidProblem for out-of-range indices.
SparseCCS ccs_from_triplets(std::size_t nrows, std::size_t ncols, std::span<const Triplet> triplets);

SparseCCS ccs_identity(std::size_t n, double diag = 1.0);

SparseCCS transpose(const SparseCCS& a);

// y += alpha * A x
void multiply_add(const SparseCCS& a, std::span<const double> x, std::span<double> y,
                  double alpha = 1.0) noexcept;
// y += alpha * A^T x
void multiply_transpose_add(const SparseCCS& a, std::span<const double> x, std::span<double> y,
                            double alpha = 1.0) noexcept;
// y += alpha * S x where S is symmetric and `upper` holds its upper triangle.
void symmetric_multiply_add(const SparseCCS& upper, std::span<const double> x,
                            std::span<double> y, double alpha = 1.0) noexcept;
// x' S x where S is symmetric and `upper` holds its upper triangle.
double quadratic_form(const SparseCCS& upper, std::span<const double> x) noexcept;

}  // namespace qsocp
