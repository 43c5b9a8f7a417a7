// snapshot.hpp -- bit-exact binary field snapshots.
//
// Layout (all little-endian):
//   magic "CHDG" (4 bytes), u32 version = 1, u32 ndims, u32 dims[ndims],
//   f64 time, f64 length[ndims], then dims-row-major f64 values.

#ifndef CHDG_SNAPSHOT_HPP
#define CHDG_SNAPSHOT_HPP

#include <filesystem>

#include "chdg/grid.hpp"

namespace chdg {

struct Snapshot {
  Field field;
  double time = 0.0;
};

void write_snapshot(const std::filesystem::path& path, const Field& f, double time);
Snapshot read_snapshot(const std::filesystem::path& path);

}  // namespace chdg

#endif
