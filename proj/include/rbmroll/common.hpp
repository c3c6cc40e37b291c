#ifndef RBMROLL_COMMON_HPP
#define RBMROLL_COMMON_HPP

#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace rbmroll {

using Bytes = std::vector<std::uint8_t>;

/// Thrown by the binary parsers (SMF, IDX, PBM, checkpoints) on malformed
/// input. Parsers never crash on arbitrary bytes; they throw this instead.
class ParseError : public std::runtime_error {
public:
    explicit ParseError(const std::string& what) : std::runtime_error(what) {}
};

/// Bounds-checked cursor over a byte buffer. All multi-byte reads are
/// big-endian unless the name says otherwise.
class ByteReader {
public:
    explicit ByteReader(std::span<const std::uint8_t> data) : data_(data) {}

    std::size_t pos() const { return pos_; }
    std::size_t remaining() const { return data_.size() - pos_; }
    bool at_end() const { return pos_ == data_.size(); }

    std::uint8_t u8() {
        need(1);
        return data_[pos_++];
    }

    std::uint16_t u16be() {
        need(2);
        std::uint16_t v = (std::uint16_t(data_[pos_]) << 8) | data_[pos_ + 1];
        pos_ += 2;
        return v;
    }

    std::uint32_t u32be() {
        need(4);
        std::uint32_t v = (std::uint32_t(data_[pos_]) << 24) | (std::uint32_t(data_[pos_ + 1]) << 16) |
                          (std::uint32_t(data_[pos_ + 2]) << 8) | std::uint32_t(data_[pos_ + 3]);
        pos_ += 4;
        return v;
    }

    std::uint16_t u16le() {
        need(2);
        std::uint16_t v = std::uint16_t(data_[pos_]) | (std::uint16_t(data_[pos_ + 1]) << 8);
        pos_ += 2;
        return v;
    }

    std::uint32_t u32le() {
        need(4);
        std::uint32_t v = std::uint32_t(data_[pos_]) | (std::uint32_t(data_[pos_ + 1]) << 8) |
                          (std::uint32_t(data_[pos_ + 2]) << 16) | (std::uint32_t(data_[pos_ + 3]) << 24);
        pos_ += 4;
        return v;
    }

    std::span<const std::uint8_t> bytes(std::size_t n) {
        need(n);
        auto out = data_.subspan(pos_, n);
        pos_ += n;
        return out;
    }

    void skip(std::size_t n) {
        need(n);
        pos_ += n;
    }

private:
    void need(std::size_t n) const {
        if (data_.size() - pos_ < n) throw ParseError("unexpected end of input");
    }

    std::span<const std::uint8_t> data_;
    std::size_t pos_ = 0;
};

/// Append-only byte buffer used by the writers.
class ByteWriter {
public:
    void u8(std::uint8_t v) { out_.push_back(v); }

    void u16be(std::uint16_t v) {
        out_.push_back(std::uint8_t(v >> 8));
        out_.push_back(std::uint8_t(v));
    }

    void u32be(std::uint32_t v) {
        out_.push_back(std::uint8_t(v >> 24));
        out_.push_back(std::uint8_t(v >> 16));
        out_.push_back(std::uint8_t(v >> 8));
        out_.push_back(std::uint8_t(v));
    }

    void u16le(std::uint16_t v) {
        out_.push_back(std::uint8_t(v));
        out_.push_back(std::uint8_t(v >> 8));
    }

    void u32le(std::uint32_t v) {
        out_.push_back(std::uint8_t(v));
        out_.push_back(std::uint8_t(v >> 8));
        out_.push_back(std::uint8_t(v >> 16));
        out_.push_back(std::uint8_t(v >> 24));
    }

    void bytes(std::span<const std::uint8_t> data) { out_.insert(out_.end(), data.begin(), data.end()); }

    void text(const std::string& s) {
        out_.insert(out_.end(), s.begin(), s.end());
    }

    std::size_t size() const { return out_.size(); }
    std::uint8_t& operator[](std::size_t i) { return out_[i]; }

    Bytes take() { return std::move(out_); }
    const Bytes& data() const { return out_; }

private:
    Bytes out_;
};

}  // namespace rbmroll

#endif  // RBMROLL_COMMON_HPP
