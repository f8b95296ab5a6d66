#pragma once

// Little-endian byte stream helpers shared by the SFST/SFCB/CSF1 readers and
// writers. Not installed; file formats stay byte-exact regardless of host
// endianness.

#include <bit>
#include <cstdint>
#include <cstring>
#include <string>
#include <vector>

#include "sfscsf/errors.hpp"

namespace sfs::detail {

class ByteWriter {
public:
    std::vector<std::uint8_t>& bytes() { return bytes_; }

    void u8(std::uint8_t v) { bytes_.push_back(v); }

    void u16(std::uint16_t v) {
        bytes_.push_back(static_cast<std::uint8_t>(v & 0xff));
        bytes_.push_back(static_cast<std::uint8_t>(v >> 8));
    }

    void u32(std::uint32_t v) {
        for (int i = 0; i < 4; ++i) {
            bytes_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
        }
    }

    void u64(std::uint64_t v) {
        for (int i = 0; i < 8; ++i) {
            bytes_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
        }
    }

    void f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }

    void magic(const char tag[4]) {
        bytes_.insert(bytes_.end(), tag, tag + 4);
    }

private:
    std::vector<std::uint8_t> bytes_;
};

class ByteReader {
public:
    ByteReader(const std::uint8_t* data, std::size_t size) : data_(data), size_(size) {}

    std::size_t remaining() const { return size_ - pos_; }
    std::size_t position() const { return pos_; }

    std::uint8_t u8(const char* field) {
        need(1, field);
        return data_[pos_++];
    }

    std::uint16_t u16(const char* field) {
        need(2, field);
        std::uint16_t v = static_cast<std::uint16_t>(data_[pos_]) |
                          static_cast<std::uint16_t>(data_[pos_ + 1]) << 8;
        pos_ += 2;
        return v;
    }

    std::uint32_t u32(const char* field) {
        need(4, field);
        std::uint32_t v = 0;
        for (int i = 0; i < 4; ++i) {
            v |= static_cast<std::uint32_t>(data_[pos_ + i]) << (8 * i);
        }
        pos_ += 4;
        return v;
    }

    std::uint64_t u64(const char* field) {
        need(8, field);
        std::uint64_t v = 0;
        for (int i = 0; i < 8; ++i) {
            v |= static_cast<std::uint64_t>(data_[pos_ + i]) << (8 * i);
        }
        pos_ += 8;
        return v;
    }

    double f64(const char* field) { return std::bit_cast<double>(u64(field)); }

    void expect_magic(const char tag[4], const char* field) {
        need(4, field);
        if (std::memcmp(data_ + pos_, tag, 4) != 0) {
            throw FormatError(std::string("bad ") + field);
        }
        pos_ += 4;
    }

    const std::uint8_t* raw(std::size_t n, const char* field) {
        need(n, field);
        const std::uint8_t* p = data_ + pos_;
        pos_ += n;
        return p;
    }

private:
    void need(std::size_t n, const char* field) const {
        if (size_ - pos_ < n) {
            throw FormatError(std::string("truncated ") + field);
        }
    }

    const std::uint8_t* data_;
    std::size_t size_;
    std::size_t pos_ = 0;
};

} // namespace sfs::detail
