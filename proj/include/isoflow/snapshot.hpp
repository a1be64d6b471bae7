#pragma once

#include <array>
#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iterator>
#include <stdexcept>
#include <string>
#include <vector>

#include "isoflow/error.hpp"
#include "isoflow/trajectory.hpp"

namespace isoflow {

inline constexpr std::uint32_t snapshot_version = 1;

namespace detail {

template <class T>
void put_le(std::vector<unsigned char>& out, T v) {
  std::uint64_t bits = 0;
  if constexpr (sizeof(T) == 8)
    bits = std::bit_cast<std::uint64_t>(v);
  else
    bits = std::uint64_t(std::bit_cast<std::uint32_t>(v));
  for (std::size_t i = 0; i < sizeof(T); ++i) out.push_back(static_cast<unsigned char>(bits >> (8 * i)));
}

template <class T>
T get_le(const unsigned char*& p, const unsigned char* end) {
  if (std::size_t(end - p) < sizeof(T)) throw ValidationError("snapshot: truncated file");
  std::uint64_t bits = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i) bits |= std::uint64_t(p[i]) << (8 * i);
  p += sizeof(T);
  if constexpr (sizeof(T) == 8)
    return std::bit_cast<T>(bits);
  else
    return std::bit_cast<T>(static_cast<std::uint32_t>(bits));
}

}  // namespace detail

/// "ISOF", version, N, M per axis, L per axis, t, then row-major values; all little-endian.
inline std::vector<unsigned char> encode_snapshot(const Snapshot& s) {
  const Grid& g = s.u.grid;
  std::vector<unsigned char> out{'I', 'S', 'O', 'F'};
  detail::put_le(out, snapshot_version);
  detail::put_le(out, std::uint32_t(g.dim));
  for (int d = 0; d < g.dim; ++d) detail::put_le(out, std::uint32_t(g.points));
  for (int d = 0; d < g.dim; ++d) detail::put_le(out, g.half_extent);
  detail::put_le(out, s.t);
  out.reserve(out.size() + 8 * s.u.size());
  for (double v : s.u.values) detail::put_le(out, v);
  return out;
}

inline Snapshot decode_snapshot(const std::vector<unsigned char>& bytes) {
  const unsigned char* p = bytes.data();
  const unsigned char* end = p + bytes.size();
  if (bytes.size() < 4 || std::memcmp(p, "ISOF", 4) != 0) throw ValidationError("snapshot: bad magic");
  p += 4;
  const auto version = detail::get_le<std::uint32_t>(p, end);
  if (version != snapshot_version) throw ValidationError("snapshot: unsupported version " + std::to_string(version));
  const auto dim = int(detail::get_le<std::uint32_t>(p, end));
  if (dim != 1 && dim != 2) throw ValidationError("snapshot: bad dimension");
  std::array<std::uint32_t, 2> m{};
  std::array<double, 2> l{};
  for (int d = 0; d < dim; ++d) m[d] = detail::get_le<std::uint32_t>(p, end);
  for (int d = 0; d < dim; ++d) l[d] = detail::get_le<double>(p, end);
  if (dim == 2 && (m[0] != m[1] || l[0] != l[1])) throw ValidationError("snapshot: anisotropic grids are not supported");
  const double t = detail::get_le<double>(p, end);
  Field u(Grid::make(dim, l[0], int(m[0])));
  for (double& v : u.values) v = detail::get_le<double>(p, end);
  if (p != end) throw ValidationError("snapshot: trailing bytes");
  return Snapshot{t, std::move(u)};
}

inline void write_snapshot(const std::string& path, const Snapshot& s) {
  const auto bytes = encode_snapshot(s);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("snapshot: cannot write '" + path + "'");
  out.write(reinterpret_cast<const char*>(bytes.data()), std::streamsize(bytes.size()));
}

inline Snapshot read_snapshot(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("snapshot: cannot read '" + path + "'");
  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return decode_snapshot(bytes);
}

}  // namespace isoflow
