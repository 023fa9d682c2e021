#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "qsocp/problem.hpp"

namespace qsocp {

/// Binary problem container: magic "CFPB", version, sizes, cone, the Q, A
/// and G matrices in CCS form, q, b, h and a trailing CRC32. Values round-trip
/// bitwise.
inline constexpr std::uint32_t kInstanceFormatVersion = 1;

std::vector<std::uint8_t> serialize_instance(const ProblemData& problem);

/// Throws FormatError for bad magic, unknown version, truncation, checksum
/// failure or inconsistent contents.
ProblemData deserialize_instance(std::span<const std::uint8_t> bytes);

void write_instance(const std::filesystem::path& path, const ProblemData& problem);
ProblemData read_instance(const std::filesystem::path& path);

}  // namespace qsocp
