#pragma once

// Binary snapshot format, lossless by construction:
//
//   bytes  0..7   magic "TSPSNAP1"
//   bytes  8..11  u32 version (1)
//   bytes 12..15  u32 dims
//   bytes 16..19  u32 points per dim
//   bytes 20..23  u32 reserved (0)
//   bytes 24..31  f64 time
//   then n^dims row-major physical values, 64-bit little-endian floats.

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>

#include "torsplit/grid.hpp"

namespace torsplit {

inline constexpr char snapshot_magic[8] = {'T', 'S', 'P', 'S', 'N', 'A', 'P', '1'};
inline constexpr std::uint32_t snapshot_version = 1;

namespace detail {

inline void put_u32_le(std::string& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

inline void put_f64_le(std::string& out, double v) {
    const std::uint64_t bits = std::bit_cast<std::uint64_t>(v);
    for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((bits >> (8 * i)) & 0xff));
}

inline std::uint32_t get_u32_le(const unsigned char* p) {
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(p[i]) << (8 * i);
    return v;
}

inline double get_f64_le(const unsigned char* p) {
    std::uint64_t bits = 0;
    for (int i = 0; i < 8; ++i) bits |= static_cast<std::uint64_t>(p[i]) << (8 * i);
    return std::bit_cast<double>(bits);
}

}  // namespace detail

struct Snapshot {
    RealField field;
    double time = 0.0;
};

inline void write_snapshot(const std::string& path, const RealField& u, double time) {
    std::string buf;
    buf.reserve(32 + 8 * u.values.size());
    buf.append(snapshot_magic, sizeof(snapshot_magic));
    detail::put_u32_le(buf, snapshot_version);
    detail::put_u32_le(buf, static_cast<std::uint32_t>(u.grid.dims));
    detail::put_u32_le(buf, static_cast<std::uint32_t>(u.grid.n));
    detail::put_u32_le(buf, 0);
    detail::put_f64_le(buf, time);
    for (double v : u.values) detail::put_f64_le(buf, v);

    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("write_snapshot: cannot open '" + path + "'");
    out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
    if (!out) throw std::runtime_error("write_snapshot: write failed for '" + path + "'");
}

inline Snapshot read_snapshot(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("read_snapshot: cannot open '" + path + "'");
    std::string buf((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (buf.size() < 32) throw std::runtime_error("read_snapshot: truncated header in '" + path + "'");
    if (std::memcmp(buf.data(), snapshot_magic, sizeof(snapshot_magic)) != 0)
        throw std::runtime_error("read_snapshot: bad magic in '" + path + "'");
    const auto* p = reinterpret_cast<const unsigned char*>(buf.data());
    const std::uint32_t version = detail::get_u32_le(p + 8);
    if (version != snapshot_version)
        throw std::runtime_error("read_snapshot: unsupported version " + std::to_string(version));
    const std::uint32_t dims = detail::get_u32_le(p + 12);
    const std::uint32_t n = detail::get_u32_le(p + 16);

    Snapshot snap;
    snap.field.grid = GridSpec(static_cast<int>(dims), static_cast<int>(n));  // validates
    snap.time = detail::get_f64_le(p + 24);
    const std::size_t count = snap.field.grid.size();
    if (buf.size() != 32 + 8 * count)
        throw std::runtime_error("read_snapshot: payload size mismatch in '" + path + "'");
    snap.field.values.resize(count);
    for (std::size_t i = 0; i < count; ++i) snap.field.values[i] = detail::get_f64_le(p + 32 + 8 * i);
    return snap;
}

}  // namespace torsplit
