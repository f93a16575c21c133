// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <cstring>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "csivid/errors.hpp"

namespace csivid {

/// Little-endian byte cursor over an in-memory buffer. All multi-byte reads
/// are bounds-checked; running past the end throws TruncatedRecord.
class ByteReader {
  public:
    explicit ByteReader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

    std::size_t remaining() const { return bytes_.size() - pos_; }
    std::size_t position() const { return pos_; }
    bool at_end() const { return pos_ == bytes_.size(); }

    void read_raw(void* dst, std::size_t n) {
        if (remaining() < n) {
            throw TruncatedRecord("unexpected end of stream at byte offset " +
                                  std::to_string(pos_));
        }
        std::memcpy(dst, bytes_.data() + pos_, n);
        pos_ += n;
    }

    std::uint8_t read_u8() {
        std::uint8_t v;
        read_raw(&v, 1);
        return v;
    }

    std::uint16_t read_u16() {
        std::uint8_t b[2];
        read_raw(b, 2);
        return static_cast<std::uint16_t>(b[0] | (b[1] << 8));
    }

    std::uint32_t read_u32() {
        std::uint8_t b[4];
        read_raw(b, 4);
        return static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
               (static_cast<std::uint32_t>(b[2]) << 16) | (static_cast<std::uint32_t>(b[3]) << 24);
    }

    std::uint64_t read_u64() {
        std::uint64_t lo = read_u32();
        std::uint64_t hi = read_u32();
        return lo | (hi << 32);
    }

    float read_f32() {
        std::uint32_t bits = read_u32();
        float v;
        std::memcpy(&v, &bits, 4);
        return v;
    }

    double read_f64() {
        std::uint64_t bits = read_u64();
        double v;
        std::memcpy(&v, &bits, 8);
        return v;
    }

    std::string read_string(std::size_t n) {
        std::string s(n, '\0');
        read_raw(s.data(), n);
        return s;
    }

  private:
    std::span<const std::uint8_t> bytes_;
    std::size_t pos_ = 0;
};

/// Little-endian byte appender.
class ByteWriter {
  public:
    const std::vector<std::uint8_t>& bytes() const { return buf_; }
    std::vector<std::uint8_t> take() { return std::move(buf_); }

    void write_raw(const void* src, std::size_t n) {
        const auto* p = static_cast<const std::uint8_t*>(src);
        buf_.insert(buf_.end(), p, p + n);
    }

    void write_u8(std::uint8_t v) { buf_.push_back(v); }

    void write_u16(std::uint16_t v) {
        buf_.push_back(static_cast<std::uint8_t>(v & 0xff));
        buf_.push_back(static_cast<std::uint8_t>(v >> 8));
    }

    void write_u32(std::uint32_t v) {
        for (int i = 0; i < 4; ++i) buf_.push_back(static_cast<std::uint8_t>((v >> (8 * i)) & 0xff));
    }

    void write_u64(std::uint64_t v) {
        for (int i = 0; i < 8; ++i) buf_.push_back(static_cast<std::uint8_t>((v >> (8 * i)) & 0xff));
    }

    void write_f32(float v) {
        std::uint32_t bits;
        std::memcpy(&bits, &v, 4);
        write_u32(bits);
    }

    void write_f64(double v) {
        std::uint64_t bits;
        std::memcpy(&bits, &v, 8);
        write_u64(bits);
    }

    void write_string(const std::string& s) { write_raw(s.data(), s.size()); }

  private:
    std::vector<std::uint8_t> buf_;
};

/// Reads a whole file into memory. Throws IoError on failure.
std::vector<std::uint8_t> read_file(const std::filesystem::path& path);

/// Writes bytes to `path` atomically (temp file + rename).
void write_file_atomic(const std::filesystem::path& path, std::span<const std::uint8_t> bytes);
void write_file_atomic(const std::filesystem::path& path, const std::string& text);

}  // namespace csivid
