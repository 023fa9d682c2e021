#pragma once

// Little-endian byte streams shared by the plan and instance formats.

#include <bit>
#include <cstdint>
#include <cstring>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "qsocp/crc32.hpp"
#include "qsocp/errors.hpp"

namespace qsocp::detail {

static_assert(std::endian::native == std::endian::little, "little-endian host required");

class ByteWriter {
public:
    void magic(const char (&tag)[5]) { bytes_.insert(bytes_.end(), tag, tag + 4); }

    void u32(std::size_t v) {
        if (v > std::numeric_limits<std::uint32_t>::max()) {
            throw InvalidProblem("value too large for the 32-bit file format");
        }
        const auto x = static_cast<std::uint32_t>(v);
        append(&x, sizeof x);
    }

    void f64(double v) { append(&v, sizeof v); }

    void u32_array(std::span<const std::size_t> v) {
        for (std::size_t x : v) u32(x);
    }

    // kNoIndex maps to 0xFFFFFFFF.
    void index_array(std::span<const std::size_t> v) {
        for (std::size_t x : v) u32(x == std::numeric_limits<std::size_t>::max() ? 0xFFFFFFFFu : x);
    }

    void f64_array(std::span<const double> v) {
        for (double x : v) f64(x);
    }

    void string(const std::string& s) {
        u32(s.size());
        bytes_.insert(bytes_.end(), s.begin(), s.end());
    }

    std::vector<std::uint8_t> finish() {
        const std::uint32_t c = crc32(bytes_);
        append(&c, sizeof c);
        return std::move(bytes_);
    }

private:
    void append(const void* p, std::size_t n) {
        const auto* b = static_cast<const std::uint8_t*>(p);
        bytes_.insert(bytes_.end(), b, b + n);
    }

    std::vector<std::uint8_t> bytes_;
};

class ByteReader {
public:
    // Checks the magic number; the checksum is verified by finish() so that
    // truncation is reported as such rather than as a checksum failure.
    ByteReader(std::span<const std::uint8_t> bytes, const char (&tag)[5], const char* what)
        : what_(what) {
        if (bytes.size() < 4 || std::memcmp(bytes.data(), tag, 4) != 0) {
            if (bytes.size() < 4) fail(FormatError::Kind::Truncated, "file too short");
            fail(FormatError::Kind::BadMagic, "bad magic number");
        }
        if (bytes.size() < 12) fail(FormatError::Kind::Truncated, "file too short");
        body_ = bytes.first(bytes.size() - 4);
        std::uint32_t stored = 0;
        std::memcpy(&stored, bytes.data() + bytes.size() - 4, 4);
        pos_ = 4;
        checksum_ok_ = crc32(body_) == stored;
    }

    void finish() const {
        if (pos_ != body_.size()) fail(FormatError::Kind::Malformed, "trailing bytes");
        if (!checksum_ok_) fail(FormatError::Kind::ChecksumMismatch, "checksum mismatch");
    }

    [[noreturn]] void fail(FormatError::Kind kind, const std::string& msg) const {
        throw FormatError(kind, std::string(what_) + ": " + msg);
    }

    std::uint32_t peek_u32() const {
        if (pos_ + 4 > body_.size()) fail(FormatError::Kind::Truncated, "unexpected end of data");
        std::uint32_t v = 0;
        std::memcpy(&v, body_.data() + pos_, 4);
        return v;
    }

    std::size_t u32() {
        const std::uint32_t v = peek_u32();
        pos_ += 4;
        return v;
    }

    // Guards array lengths against the remaining bytes before allocating.
    void need(std::size_t count, std::size_t width) const {
        if (count > (body_.size() - pos_) / width) {
            fail(FormatError::Kind::Truncated, "unexpected end of data");
        }
    }

    double f64() {
        if (pos_ + 8 > body_.size()) fail(FormatError::Kind::Truncated, "unexpected end of data");
        double v = 0.0;
        std::memcpy(&v, body_.data() + pos_, 8);
        pos_ += 8;
        return v;
    }

    std::vector<std::size_t> u32_array(std::size_t count) {
        need(count, 4);
        std::vector<std::size_t> v(count);
        for (auto& x : v) x = u32();
        return v;
    }

    std::vector<std::size_t> index_array(std::size_t count) {
        std::vector<std::size_t> v = u32_array(count);
        for (auto& x : v) {
            if (x == 0xFFFFFFFFu) x = std::numeric_limits<std::size_t>::max();
        }
        return v;
    }

    std::vector<double> f64_array(std::size_t count) {
        need(count, 8);
        std::vector<double> v(count);
        for (auto& x : v) x = f64();
        return v;
    }

    std::string string() {
        const std::size_t len = u32();
        need(len, 1);
        std::string s(reinterpret_cast<const char*>(body_.data() + pos_), len);
        pos_ += len;
        return s;
    }

private:
    std::span<const std::uint8_t> body_;
    std::size_t pos_ = 0;
    const char* what_;
    bool checksum_ok_ = true;
};

}  // namespace qsocp::detail
