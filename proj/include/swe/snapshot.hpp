#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "swe/grid.hpp"

namespace swe {

// Binary snapshot layout, all little-endian:
//   "SWE1" | u32 nx | u32 ny | f64 dx | f64 x0 | f64 y0 | f64 time |
//   h[nx*ny] | hu[nx*ny] | hv[nx*ny] | z[nx*ny]
// Field values cover interior cells only, rows of constant j in order.

struct Snapshot {
  FieldSet fields;
  double time = 0.0;
};

std::vector<std::uint8_t> encodeSnapshot(const FieldSet& fields, double time);
Snapshot decodeSnapshot(std::span<const std::uint8_t> bytes);

void writeSnapshot(const std::filesystem::path& path, const FieldSet& fields, double time);
Snapshot readSnapshot(const std::filesystem::path& path);
/// Reads only the header.
GridSpec readSnapshotGrid(const std::filesystem::path& path);

/// "i,j,x,y,h,hu,hv,z" rows for interior cells. Meant for small grids.
void writeFieldCsv(const std::filesystem::path& path, const FieldSet& fields);

}  // namespace swe
