#ifndef RBMROLL_CHECKPOINT_HPP
#define RBMROLL_CHECKPOINT_HPP

#include <array>
#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <span>
#include <string>
#include <vector>

#include "rbmroll/common.hpp"
#include "rbmroll/rbm.hpp"

namespace rbmroll {

/// CRC-32 (IEEE, reflected, as used by zip and PNG).
inline std::uint32_t crc32(std::span<const std::uint8_t> data) {
    static const auto table = [] {
        std::array<std::uint32_t, 256> t{};
        for (std::uint32_t n = 0; n < 256; ++n) {
            std::uint32_t c = n;
            for (int k = 0; k < 8; ++k) c = (c & 1) ? 0xEDB88320u ^ (c >> 1) : c >> 1;
            t[n] = c;
        }
        return t;
    }();
    std::uint32_t crc = 0xFFFFFFFFu;
    for (std::uint8_t byte : data) crc = table[(crc ^ byte) & 0xFF] ^ (crc >> 8);
    return crc ^ 0xFFFFFFFFu;
}

namespace checkpoint_detail {

constexpr char kMagic[4] = {'R', 'B', 'M', '1'};
constexpr std::uint16_t kVersion = 1;

inline void put_f64le(ByteWriter& w, double value) {
    std::uint64_t bits;
    static_assert(sizeof(bits) == sizeof(value));
    std::memcpy(&bits, &value, sizeof(bits));
    for (int shift = 0; shift < 64; shift += 8) w.u8(std::uint8_t(bits >> shift));
}

inline double get_f64le(ByteReader& r) {
    std::uint64_t bits = 0;
    for (int shift = 0; shift < 64; shift += 8) bits |= std::uint64_t(r.u8()) << shift;
    double value;
    std::memcpy(&value, &bits, sizeof(value));
    return value;
}

}  // namespace checkpoint_detail

/// Checkpoint layout: "RBM1", version u16, D u32, P u32 (all little-endian),
/// then b, c, W (row-major) as little-endian f64, then CRC32 of everything
/// before it.
inline Bytes serialize_checkpoint(const RbmParams& params) {
    ByteWriter w;
    for (char ch : checkpoint_detail::kMagic) w.u8(std::uint8_t(ch));
    w.u16le(checkpoint_detail::kVersion);
    w.u32le(std::uint32_t(params.num_visible));
    w.u32le(std::uint32_t(params.num_hidden));
    for (double value : params.visible_bias) checkpoint_detail::put_f64le(w, value);
    for (double value : params.hidden_bias) checkpoint_detail::put_f64le(w, value);
    for (double value : params.weights) checkpoint_detail::put_f64le(w, value);
    const std::uint32_t checksum = crc32(w.data());
    w.u32le(checksum);
    return w.take();
}

inline RbmParams deserialize_checkpoint(std::span<const std::uint8_t> bytes) {
    if (bytes.size() < 18) throw ParseError("checkpoint too short");
    const std::size_t payload_size = bytes.size() - 4;
    ByteReader tail(bytes.subspan(payload_size));
    const std::uint32_t stored = tail.u32le();
    if (crc32(bytes.first(payload_size)) != stored) throw ParseError("checkpoint CRC mismatch");

    ByteReader r(bytes.first(payload_size));
    auto magic = r.bytes(4);
    if (!std::equal(magic.begin(), magic.end(), checkpoint_detail::kMagic)) throw ParseError("bad checkpoint magic");
    const std::uint16_t version = r.u16le();
    if (version != checkpoint_detail::kVersion) throw ParseError("unsupported checkpoint version");
    const std::uint32_t D = r.u32le();
    const std::uint32_t P = r.u32le();
    if (D < 1 || P < 1) throw ParseError("checkpoint dimensions must be positive");
    const std::size_t expected = std::size_t(D) * 8 + std::size_t(P) * 8 + std::size_t(D) * P * 8;
    if (r.remaining() != expected) throw ParseError("checkpoint size does not match header");

    RbmParams params(D, P);
    for (std::size_t i = 0; i < D; ++i) params.visible_bias[i] = checkpoint_detail::get_f64le(r);
    for (std::size_t j = 0; j < P; ++j) params.hidden_bias[j] = checkpoint_detail::get_f64le(r);
    for (std::size_t n = 0; n < std::size_t(D) * P; ++n) params.weights[n] = checkpoint_detail::get_f64le(r);
    return params;
}

inline void save_checkpoint(const std::string& path, const RbmParams& params) {
    const Bytes bytes = serialize_checkpoint(params);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open checkpoint for writing: " + path);
    out.write(reinterpret_cast<const char*>(bytes.data()), std::streamsize(bytes.size()));
    if (!out) throw std::runtime_error("failed writing checkpoint: " + path);
}

inline Bytes read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open file: " + path);
    Bytes bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return bytes;
}

inline void write_file(const std::string& path, std::span<const std::uint8_t> bytes) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open file for writing: " + path);
    out.write(reinterpret_cast<const char*>(bytes.data()), std::streamsize(bytes.size()));
    if (!out) throw std::runtime_error("failed writing file: " + path);
}

inline RbmParams load_checkpoint(const std::string& path) { return deserialize_checkpoint(read_file(path)); }

}  // namespace rbmroll

#endif  // RBMROLL_CHECKPOINT_HPP
