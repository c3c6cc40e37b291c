#ifndef RBMROLL_IDX_HPP
#define RBMROLL_IDX_HPP

#include <cctype>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "rbmroll/common.hpp"

namespace rbmroll {

struct GrayImage {
    std::size_t width = 0;
    std::size_t height = 0;
    std::vector<std::uint8_t> pixels;  // row-major, height x width

    std::uint8_t at(std::size_t row, std::size_t col) const { return pixels[row * width + col]; }
};

/// Parses an IDX3 unsigned-byte image container (the MNIST layout):
/// big-endian magic 0x00000803, then count, rows, cols, then raw pixels.
inline std::vector<GrayImage> parse_idx(std::span<const std::uint8_t> bytes) {
    ByteReader r(bytes);
    const std::uint32_t magic = r.u32be();
    if (magic != 0x00000803u) throw ParseError("bad IDX magic (expected 0x00000803)");
    const std::uint32_t count = r.u32be();
    const std::uint32_t rows = r.u32be();
    const std::uint32_t cols = r.u32be();
    const std::size_t pixel_count = std::size_t(rows) * cols;
    if (r.remaining() != std::size_t(count) * pixel_count)
        throw ParseError("IDX payload length does not match header");
    std::vector<GrayImage> images;
    images.reserve(count);
    for (std::uint32_t n = 0; n < count; ++n) {
        GrayImage img;
        img.width = cols;
        img.height = rows;
        auto data = r.bytes(pixel_count);
        img.pixels.assign(data.begin(), data.end());
        images.push_back(std::move(img));
    }
    return images;
}

/// Serializes images back to IDX3; all images must share one shape.
inline Bytes write_idx(const std::vector<GrayImage>& images) {
    ByteWriter w;
    w.u32be(0x00000803u);
    w.u32be(std::uint32_t(images.size()));
    const std::size_t rows = images.empty() ? 0 : images.front().height;
    const std::size_t cols = images.empty() ? 0 : images.front().width;
    w.u32be(std::uint32_t(rows));
    w.u32be(std::uint32_t(cols));
    for (const GrayImage& img : images) {
        if (img.height != rows || img.width != cols) throw std::invalid_argument("write_idx: mixed image shapes");
        w.bytes(img.pixels);
    }
    return w.take();
}

/// Minimal binary PGM (P5, maxval <= 255) reader for single grayscale images.
inline GrayImage read_pgm(std::span<const std::uint8_t> bytes) {
    std::size_t pos = 0;
    auto next_token = [&]() -> std::string {
        while (pos < bytes.size()) {
            const char ch = char(bytes[pos]);
            if (ch == '#') {
                while (pos < bytes.size() && bytes[pos] != '\n') ++pos;
            } else if (ch == ' ' || ch == '\t' || ch == '\r' || ch == '\n') {
                ++pos;
            } else {
                break;
            }
        }
        std::string token;
        while (pos < bytes.size() && !std::isspace(int(bytes[pos]))) token.push_back(char(bytes[pos++]));
        if (token.empty()) throw ParseError("truncated PGM header");
        return token;
    };

    auto next_number = [&]() -> long {
        const std::string token = next_token();
        long value = 0;
        for (char ch : token) {
            if (ch < '0' || ch > '9') throw ParseError("malformed PGM header number");
            value = value * 10 + (ch - '0');
            if (value > 1000000) throw ParseError("PGM header number out of range");
        }
        return value;
    };

    if (next_token() != "P5") throw ParseError("unsupported PGM variant (only binary P5)");
    const long width = next_number();
    const long height = next_number();
    const long maxval = next_number();
    if (width < 1 || height < 1) throw ParseError("PGM dimensions must be positive");
    if (maxval < 1 || maxval > 255) throw ParseError("PGM maxval outside 1..255");
    ++pos;  // single whitespace after maxval
    const std::size_t pixel_count = std::size_t(width) * std::size_t(height);
    if (bytes.size() - pos < pixel_count) throw ParseError("truncated PGM payload");
    GrayImage img;
    img.width = std::size_t(width);
    img.height = std::size_t(height);
    img.pixels.assign(bytes.begin() + pos, bytes.begin() + pos + pixel_count);
    return img;
}

}  // namespace rbmroll

#endif  // RBMROLL_IDX_HPP
