#pragma once

#include <array>
#include <optional>
#include <span>
#include <vector>

#include "swe/fabric.hpp"
#include "swe/grid.hpp"

namespace swe {

enum class Side { Left = 0, Right = 1, Down = 2, Up = 3 };

inline constexpr std::array<Side, 4> kAllSides{Side::Left, Side::Right, Side::Down, Side::Up};

Side opposite(Side s);
const char* toString(Side s);

struct RankCoords {
  int pi = 0;
  int pj = 0;
  bool operator==(const RankCoords&) const = default;
};

/// pi = R mod Px, pj = R div Px. Throws ConfigError for R outside [0, Px*Py).
RankCoords rankToCoords(int rank, int px, int py);
int coordsToRank(RankCoords c, int px, int py);

struct AxisExtent {
  int n = 0;       ///< local interior cells
  int offset = 0;  ///< global index of the first local interior cell, 0-based
};

/// Block partition of n_global cells over `parts` ranks; the first
/// n_global % parts ranks get one extra cell.
AxisExtent localExtent(int n_global, int parts, int coord);

struct SubdomainLayout {
  int px = 1;
  int py = 1;
  int rank = 0;
  RankCoords coords;
  GridSpec global;
  GridSpec local;  ///< origin already shifted to this tile
  int gi = 0;      ///< global offset of the first interior column
  int gj = 0;      ///< global offset of the first interior row
  std::array<std::optional<int>, 4> neighbor;  ///< indexed by Side

  std::optional<int> neighborAt(Side s) const { return neighbor[static_cast<int>(s)]; }
};

/// Layout of one rank. Throws ConfigError when an axis has more ranks than cells.
SubdomainLayout makeLayout(const GridSpec& global, int px, int py, int rank);

/// Packed halo strip, ordered h-slab, hu-slab, hv-slab.
struct HaloBuffer {
  Side side = Side::Left;
  std::vector<double> payload;

  std::size_t edgeLength() const { return payload.size() / 3; }
};

std::size_t haloEdgeLength(const GridSpec& spec, Side side);

/// Copies the one-cell-deep interior strip adjacent to `side`.
HaloBuffer packHalo(const FieldSet& fields, Side side);
/// Writes a buffer into the halo strip on `side`. Throws on length mismatch.
void unpackHalo(FieldSet& fields, Side side, const HaloBuffer& buffer);

/// Mirror boundary on every side without a neighbour: h and z copied, normal
/// discharge negated, tangential discharge copied.
void applyReflectiveBC(FieldSet& fields, const SubdomainLayout& layout);

struct Subdomain {
  SubdomainLayout layout;
  FieldSet fields;
};

/// Sends this rank's boundary strips to its neighbours (non-blocking).
void postHaloSends(const Subdomain& sub, Fabric& fabric);
/// Receives and unpacks every neighbour strip.
void completeHaloReceives(Subdomain& sub, Fabric& fabric);
/// Post-all-then-wait exchange for a single rank.
void exchangeHalos(Subdomain& sub, Fabric& fabric);
/// Exchange for every subdomain from one thread: all sends, then all receives.
void exchangeHalos(std::span<Subdomain> subs, Fabric& fabric);

/// Copies the tile of `global` (interior plus halo ring) owned by `layout`.
FieldSet scatterTile(const FieldSet& global, const SubdomainLayout& layout);
/// Writes the interior of a tile back into a global field set.
void insertTile(FieldSet& global, const SubdomainLayout& layout, const FieldSet& tile);

/// Splits `workers` into (px, py) with px >= py and px * py == workers,
/// as close to square as possible.
std::pair<int, int> rankGridFor(int workers);

}  // namespace swe
