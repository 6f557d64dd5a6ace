#include "swe/grid.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "swe/error.hpp"
#include "swe/snapshot.hpp"

namespace swe {

void GridSpec::validate() const {
  if (nx < 1 || ny < 1) {
    throw ConfigError("grid needs at least one interior cell per axis, got " + std::to_string(nx) +
                      "x" + std::to_string(ny));
  }
  if (!(dx > 0.0) || !std::isfinite(dx)) throw ConfigError("grid spacing dx must be positive");
}

double FieldSet::interiorVolume() const {
  const double area = spec.dx * spec.dx;
  double total = 0.0;
  for (int j = 1; j <= spec.ny; ++j) {
    double row = 0.0;
    const std::size_t base = index(0, j);
    for (int i = 1; i <= spec.nx; ++i) row += h[base + i];
    total += row;
  }
  return total * area;
}

double FieldSet::minInteriorDepth() const {
  double lo = std::numeric_limits<double>::infinity();
  for (int j = 1; j <= spec.ny; ++j) {
    const std::size_t base = index(0, j);
    for (int i = 1; i <= spec.nx; ++i) lo = std::min(lo, h[base + i]);
  }
  return lo;
}

std::string toString(ScenarioKind kind) {
  switch (kind) {
    case ScenarioKind::CircularDamBreak: return "circular-dam-break";
    case ScenarioKind::LakeAtRest: return "lake-at-rest";
    case ScenarioKind::DamBreak1D: return "dambreak-1d";
    case ScenarioKind::FromFile: return "from-file";
  }
  return "unknown";
}

ScenarioKind parseScenarioKind(const std::string& name) {
  if (name == "circular-dam-break") return ScenarioKind::CircularDamBreak;
  if (name == "lake-at-rest") return ScenarioKind::LakeAtRest;
  if (name == "dambreak-1d") return ScenarioKind::DamBreak1D;
  if (name == "from-file") return ScenarioKind::FromFile;
  throw ConfigError("unknown scenario kind '" + name + "'");
}

void ScenarioConfig::validate() const {
  if (kind != ScenarioKind::FromFile && n_side < 1) throw ConfigError("n_side must be >= 1");
  if (!(dx > 0.0)) throw ConfigError("dx must be positive");
  if (!(cfl > 0.0 && cfl <= 1.0)) throw ConfigError("cfl must lie in (0, 1]");
  if (!(t_end > 0.0)) throw ConfigError("t_end must be positive");
  if (!(g > 0.0)) throw ConfigError("g must be positive");
  if (rain_rate < 0.0) throw ConfigError("rain_rate must be >= 0");
  if (manning_n < 0.0) throw ConfigError("manning_n must be >= 0");
  if (bump_height < 0.0) throw ConfigError("bump_height must be >= 0");
  if (h_high < 0.0 || h_low < 0.0) throw ConfigError("dam-break depths must be >= 0");
  if (kind == ScenarioKind::FromFile && input_path.empty()) {
    throw ConfigError("from-file scenario needs scenario.input");
  }
}

GridSpec squareGrid(int n_side, double dx) {
  GridSpec spec{n_side, n_side, dx, -0.5 * n_side * dx, -0.5 * n_side * dx};
  spec.validate();
  return spec;
}

GridSpec stripGrid(int n_cells, double dx) {
  GridSpec spec{n_cells, 1, dx, -0.5 * n_cells * dx, -0.5 * dx};
  spec.validate();
  return spec;
}

GridSpec scenarioGrid(const ScenarioConfig& cfg) {
  switch (cfg.kind) {
    case ScenarioKind::DamBreak1D: return stripGrid(cfg.n_side, cfg.dx);
    case ScenarioKind::FromFile: return readSnapshotGrid(cfg.input_path);
    default: return squareGrid(cfg.n_side, cfg.dx);
  }
}

FieldSet initCircularDamBreak(const GridSpec& spec, const ScenarioConfig& cfg) {
  spec.validate();
  if (spec.nx != spec.ny) throw ConfigError("circular dam break needs a square domain");
  const double radius = spec.nx * spec.dx / 5.0;
  FieldSet f(spec);
  for (int j = 1; j <= spec.ny; ++j) {
    const double y = spec.cellCenterY(j);
    for (int i = 1; i <= spec.nx; ++i) {
      const double x = spec.cellCenterX(i);
      f.h[f.index(i, j)] = std::sqrt(x * x + y * y) <= radius ? cfg.h_high : cfg.h_low;
    }
  }
  return f;
}

FieldSet initLakeAtRest(const GridSpec& spec, double bump_height) {
  spec.validate();
  if (bump_height < 0.0) throw ConfigError("bump_height must be >= 0");
  constexpr double kSurface = 1.0;
  const double lx = spec.nx * spec.dx;
  const double ly = spec.ny * spec.dx;
  const double xc = spec.x0 + 0.5 * lx;
  const double yc = spec.y0 + 0.5 * ly;
  const double sigma = std::min(lx, ly) / 8.0;
  FieldSet f(spec);
  for (int j = 1; j <= spec.ny; ++j) {
    const double ry = spec.cellCenterY(j) - yc;
    for (int i = 1; i <= spec.nx; ++i) {
      const double rx = spec.cellCenterX(i) - xc;
      const double bed = bump_height * std::exp(-(rx * rx + ry * ry) / (2.0 * sigma * sigma));
      const std::size_t k = f.index(i, j);
      f.z[k] = bed;
      f.h[k] = std::max(0.0, kSurface - bed);
    }
  }
  return f;
}

FieldSet initDamBreak1D(const GridSpec& spec, const ScenarioConfig& cfg) {
  spec.validate();
  FieldSet f(spec);
  for (int j = 1; j <= spec.ny; ++j) {
    for (int i = 1; i <= spec.nx; ++i) {
      f.h[f.index(i, j)] = spec.cellCenterX(i) <= 0.0 ? cfg.h_high : cfg.h_low;
    }
  }
  return f;
}

FieldSet makeInitialState(const ScenarioConfig& cfg) {
  cfg.validate();
  switch (cfg.kind) {
    case ScenarioKind::CircularDamBreak: return initCircularDamBreak(squareGrid(cfg.n_side, cfg.dx), cfg);
    case ScenarioKind::LakeAtRest: return initLakeAtRest(squareGrid(cfg.n_side, cfg.dx), cfg.bump_height);
    case ScenarioKind::DamBreak1D: return initDamBreak1D(stripGrid(cfg.n_side, cfg.dx), cfg);
    case ScenarioKind::FromFile: return readSnapshot(cfg.input_path).fields;
  }
  throw ConfigError("unhandled scenario kind");
}

}  // namespace swe
