#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "qsocp/kkt.hpp"
#include "qsocp/ldl.hpp"
#include "qsocp/problem.hpp"

namespace qsocp {

/// Everything a problem family needs that does not depend on data values:
/// the KKT layout (with the family echo, data slots and scaling slots) and
/// the symbolic factorization under the AMD ordering.
struct CustomizationPlan {
    static constexpr std::uint32_t kFormatVersion = 1;

    KKTLayout layout;
    SymbolicFactor symbolic;

    const ProblemFamily& family() const noexcept { return layout.family; }
    std::size_t kkt_dim() const noexcept { return layout.dim; }
    std::size_t kkt_nnz() const noexcept { return layout.pattern.nnz(); }
    std::size_t factor_nnz() const noexcept { return symbolic.nnz_L(); }

    friend bool operator==(const CustomizationPlan&, const CustomizationPlan&) = default;
};

/// Throws InvalidProblem or DimensionMismatch for an inconsistent family.
CustomizationPlan analyze_family(const ProblemFamily& family);

/// Binary layout, little-endian: "CFPL", u32 version, u32 kkt_dim,
/// u32 n, p, m, l, n_soc, soc_dims; for Q, A, G the family pattern as
/// (u32 nnz, col_offsets, row_indices) followed by u32 label count and
/// length-prefixed labels; the permutation; L col offsets, u32 nnz(L),
/// L row indices; etree (0xFFFFFFFF for roots); data slots for Q, A, G;
/// u32 count and scaling slots; CRC-32 of all preceding bytes.
std::vector<std::uint8_t> serialize_plan(const CustomizationPlan& plan);

/// Throws FormatError on bad magic, version mismatch, truncation, checksum
/// failure, or content that disagrees with the re-derived layout.
CustomizationPlan deserialize_plan(std::span<const std::uint8_t> bytes);

void save_plan(const std::filesystem::path& path, const CustomizationPlan& plan);
CustomizationPlan load_plan(const std::filesystem::path& path);

/// Reads a whole file; throws Error when it cannot be opened.
std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& path);
void write_file_bytes(const std::filesystem::path& path, std::span<const std::uint8_t> bytes);

}  // namespace qsocp
