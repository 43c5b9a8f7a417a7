#include "chdg/snapshot.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>

#include "chdg/errors.hpp"

namespace chdg {

namespace {

void put_u32(std::ostream& o, std::uint32_t v) {
  unsigned char b[4] = {static_cast<unsigned char>(v), static_cast<unsigned char>(v >> 8),
                        static_cast<unsigned char>(v >> 16), static_cast<unsigned char>(v >> 24)};
  o.write(reinterpret_cast<const char*>(b), 4);
}

void put_f64(std::ostream& o, double d) {
  const auto v = std::bit_cast<std::uint64_t>(d);
  unsigned char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
  o.write(reinterpret_cast<const char*>(b), 8);
}

std::uint32_t get_u32(std::istream& in) {
  unsigned char b[4];
  in.read(reinterpret_cast<char*>(b), 4);
  return static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
         (static_cast<std::uint32_t>(b[2]) << 16) | (static_cast<std::uint32_t>(b[3]) << 24);
}

double get_f64(std::istream& in) {
  unsigned char b[8];
  in.read(reinterpret_cast<char*>(b), 8);
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
  return std::bit_cast<double>(v);
}

}  // namespace

void write_snapshot(const std::filesystem::path& path, const Field& f, double time) {
  std::ofstream o(path, std::ios::binary | std::ios::trunc);
  if (!o) throw std::runtime_error("snapshot: cannot open " + path.string() + " for writing");
  o.write("CHDG", 4);
  put_u32(o, 1);
  put_u32(o, static_cast<std::uint32_t>(f.grid.ndims));
  for (int d = 0; d < f.grid.ndims; ++d) put_u32(o, static_cast<std::uint32_t>(f.grid.n[d]));
  put_f64(o, time);
  for (int d = 0; d < f.grid.ndims; ++d) put_f64(o, f.grid.length[d]);
  for (double v : f.values) put_f64(o, v);  // internal layout is dims-row-major
  if (!o) throw std::runtime_error("snapshot: write failed for " + path.string());
}

Snapshot read_snapshot(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("snapshot: cannot open " + path.string());
  char magic[4];
  in.read(magic, 4);
  if (!in || std::memcmp(magic, "CHDG", 4) != 0)
    throw std::runtime_error("snapshot: bad magic in " + path.string());
  const std::uint32_t version = get_u32(in);
  if (version != 1)
    throw std::runtime_error("snapshot: unsupported version " + std::to_string(version));
  const std::uint32_t ndims = get_u32(in);
  if (ndims != 1 && ndims != 2) throw std::runtime_error("snapshot: bad ndims");
  std::uint32_t dims[2] = {0, 1};
  for (std::uint32_t d = 0; d < ndims; ++d) dims[d] = get_u32(in);
  Snapshot s;
  s.time = get_f64(in);
  double len[2] = {0, 0};
  for (std::uint32_t d = 0; d < ndims; ++d) len[d] = get_f64(in);
  Grid g = (ndims == 1) ? Grid::line(static_cast<int>(dims[0]), len[0])
                        : Grid::rect(static_cast<int>(dims[0]), static_cast<int>(dims[1]), len[0],
                                     len[1]);
  s.field = Field(g);
  for (double& v : s.field.values) v = get_f64(in);
  if (!in) throw std::runtime_error("snapshot: truncated file " + path.string());
  return s;
}

}  // namespace chdg
