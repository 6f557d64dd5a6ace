#include "swe/decomposition.hpp"

#include <algorithm>
#include <cmath>

#include "swe/error.hpp"

namespace swe {

Side opposite(Side s) {
  switch (s) {
    case Side::Left: return Side::Right;
    case Side::Right: return Side::Left;
    case Side::Down: return Side::Up;
    case Side::Up: return Side::Down;
  }
  return s;
}

const char* toString(Side s) {
  switch (s) {
    case Side::Left: return "left";
    case Side::Right: return "right";
    case Side::Down: return "down";
    case Side::Up: return "up";
  }
  return "?";
}

RankCoords rankToCoords(int rank, int px, int py) {
  if (px < 1 || py < 1) throw ConfigError("rank grid dimensions must be >= 1");
  if (rank < 0 || rank >= px * py) {
    throw ConfigError("rank " + std::to_string(rank) + " outside a " + std::to_string(px) + "x" +
                      std::to_string(py) + " rank grid");
  }
  return {rank % px, rank / px};
}

int coordsToRank(RankCoords c, int px, int py) {
  if (c.pi < 0 || c.pi >= px || c.pj < 0 || c.pj >= py) throw ConfigError("rank coordinates out of range");
  return c.pj * px + c.pi;
}

AxisExtent localExtent(int n_global, int parts, int coord) {
  if (parts < 1 || coord < 0 || coord >= parts) throw ConfigError("bad partition request");
  if (parts > n_global) {
    throw ConfigError("cannot split " + std::to_string(n_global) + " cells over " + std::to_string(parts) +
                      " ranks");
  }
  const int base = n_global / parts;
  const int extra = n_global % parts;
  const int n = base + (coord < extra ? 1 : 0);
  const int offset = coord * base + std::min(coord, extra);
  return {n, offset};
}

SubdomainLayout makeLayout(const GridSpec& global, int px, int py, int rank) {
  global.validate();
  SubdomainLayout l;
  l.px = px;
  l.py = py;
  l.rank = rank;
  l.coords = rankToCoords(rank, px, py);
  l.global = global;
  const AxisExtent ex = localExtent(global.nx, px, l.coords.pi);
  const AxisExtent ey = localExtent(global.ny, py, l.coords.pj);
  l.gi = ex.offset;
  l.gj = ey.offset;
  l.local = GridSpec{ex.n, ey.n, global.dx, global.x0 + ex.offset * global.dx, global.y0 + ey.offset * global.dx};
  const auto [pi, pj] = l.coords;
  if (pi > 0) l.neighbor[static_cast<int>(Side::Left)] = coordsToRank({pi - 1, pj}, px, py);
  if (pi < px - 1) l.neighbor[static_cast<int>(Side::Right)] = coordsToRank({pi + 1, pj}, px, py);
  if (pj > 0) l.neighbor[static_cast<int>(Side::Down)] = coordsToRank({pi, pj - 1}, px, py);
  if (pj < py - 1) l.neighbor[static_cast<int>(Side::Up)] = coordsToRank({pi, pj + 1}, px, py);
  return l;
}

std::size_t haloEdgeLength(const GridSpec& spec, Side side) {
  return static_cast<std::size_t>(side == Side::Left || side == Side::Right ? spec.ny : spec.nx);
}

namespace {

/// Calls fn(strip position, padded index of the interior cell, padded index
/// of the halo cell) along one side.
template <class Fn>
void forEachStripCell(const GridSpec& s, Side side, Fn&& fn) {
  switch (side) {
    case Side::Left:
      for (int j = 1; j <= s.ny; ++j) fn(static_cast<std::size_t>(j - 1), flatIndex(1, j, s), flatIndex(0, j, s));
      break;
    case Side::Right:
      for (int j = 1; j <= s.ny; ++j)
        fn(static_cast<std::size_t>(j - 1), flatIndex(s.nx, j, s), flatIndex(s.nx + 1, j, s));
      break;
    case Side::Down:
      for (int i = 1; i <= s.nx; ++i) fn(static_cast<std::size_t>(i - 1), flatIndex(i, 1, s), flatIndex(i, 0, s));
      break;
    case Side::Up:
      for (int i = 1; i <= s.nx; ++i)
        fn(static_cast<std::size_t>(i - 1), flatIndex(i, s.ny, s), flatIndex(i, s.ny + 1, s));
      break;
  }
}

}  // namespace

HaloBuffer packHalo(const FieldSet& f, Side side) {
  const std::size_t n = haloEdgeLength(f.spec, side);
  HaloBuffer buf{side, std::vector<double>(3 * n)};
  forEachStripCell(f.spec, side, [&](std::size_t p, std::size_t inner, std::size_t) {
    buf.payload[p] = f.h[inner];
    buf.payload[n + p] = f.hu[inner];
    buf.payload[2 * n + p] = f.hv[inner];
  });
  return buf;
}

void unpackHalo(FieldSet& f, Side side, const HaloBuffer& buf) {
  const std::size_t n = haloEdgeLength(f.spec, side);
  if (buf.payload.size() != 3 * n) {
    throw ConfigError(std::string("halo buffer for the ") + toString(side) + " side has " +
                      std::to_string(buf.payload.size()) + " values, expected " + std::to_string(3 * n));
  }
  forEachStripCell(f.spec, side, [&](std::size_t p, std::size_t, std::size_t halo) {
    f.h[halo] = buf.payload[p];
    f.hu[halo] = buf.payload[n + p];
    f.hv[halo] = buf.payload[2 * n + p];
  });
}

void applyReflectiveBC(FieldSet& f, const SubdomainLayout& layout) {
  for (Side side : kAllSides) {
    if (layout.neighborAt(side)) continue;
    const bool normalIsX = side == Side::Left || side == Side::Right;
    forEachStripCell(f.spec, side, [&](std::size_t, std::size_t inner, std::size_t halo) {
      f.h[halo] = f.h[inner];
      f.z[halo] = f.z[inner];
      f.hu[halo] = normalIsX ? -f.hu[inner] : f.hu[inner];
      f.hv[halo] = normalIsX ? f.hv[inner] : -f.hv[inner];
    });
  }
}

void postHaloSends(const Subdomain& sub, Fabric& fabric) {
  for (Side side : kAllSides) {
    if (const auto nbr = sub.layout.neighborAt(side)) {
      fabric.send(sub.layout.rank, *nbr, static_cast<int>(side), packHalo(sub.fields, side).payload);
    }
  }
}

void completeHaloReceives(Subdomain& sub, Fabric& fabric) {
  for (Side side : kAllSides) {
    if (const auto nbr = sub.layout.neighborAt(side)) {
      // The neighbour sent its strip facing us, tagged with its own side.
      HaloBuffer buf{side, fabric.recv(sub.layout.rank, *nbr, static_cast<int>(opposite(side)))};
      unpackHalo(sub.fields, side, buf);
    }
  }
}

void exchangeHalos(Subdomain& sub, Fabric& fabric) {
  postHaloSends(sub, fabric);
  completeHaloReceives(sub, fabric);
}

void exchangeHalos(std::span<Subdomain> subs, Fabric& fabric) {
  for (const Subdomain& s : subs) postHaloSends(s, fabric);
  for (Subdomain& s : subs) completeHaloReceives(s, fabric);
}

FieldSet scatterTile(const FieldSet& global, const SubdomainLayout& layout) {
  FieldSet tile(layout.local);
  const GridSpec& ls = layout.local;
  for (int j = 0; j <= ls.ny + 1; ++j) {
    for (int i = 0; i <= ls.nx + 1; ++i) {
      const std::size_t src = global.index(layout.gi + i, layout.gj + j);
      const std::size_t dst = tile.index(i, j);
      tile.h[dst] = global.h[src];
      tile.hu[dst] = global.hu[src];
      tile.hv[dst] = global.hv[src];
      tile.z[dst] = global.z[src];
    }
  }
  return tile;
}

void insertTile(FieldSet& global, const SubdomainLayout& layout, const FieldSet& tile) {
  const GridSpec& ls = layout.local;
  for (int j = 1; j <= ls.ny; ++j) {
    for (int i = 1; i <= ls.nx; ++i) {
      const std::size_t dst = global.index(layout.gi + i, layout.gj + j);
      const std::size_t src = tile.index(i, j);
      global.h[dst] = tile.h[src];
      global.hu[dst] = tile.hu[src];
      global.hv[dst] = tile.hv[src];
      global.z[dst] = tile.z[src];
    }
  }
}

std::pair<int, int> rankGridFor(int workers) {
  if (workers < 1) throw ConfigError("worker count must be >= 1");
  int py = static_cast<int>(std::sqrt(static_cast<double>(workers)));
  while (py > 1 && workers % py != 0) --py;
  return {workers / py, py};
}

}  // namespace swe
