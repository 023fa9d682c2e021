#pragma once

#include <cstdint>
#include <span>

namespace qsocp {

/// CRC-32 (IEEE 802.3, reflected polynomial 0xEDB88320).
std::uint32_t crc32(std::span<const std::uint8_t> bytes) noexcept;

}  // namespace qsocp
