#pragma once

#include <cassert>
#include <cstddef>
#include <string>
#include <vector>

namespace swe {

/// Wet/dry threshold on water depth [m].
inline constexpr double kDryDepth = 1e-12;

/// Uniform Cartesian subgrid. Interior cells are i in [1, nx], j in [1, ny];
/// a one-cell halo ring makes the padded extents (nx+2) x (ny+2).
struct GridSpec {
  int nx = 1;
  int ny = 1;
  double dx = 0.5;
  double x0 = 0.0;  ///< x coordinate of the left interior face
  double y0 = 0.0;  ///< y coordinate of the bottom interior face

  int paddedNx() const { return nx + 2; }
  int paddedNy() const { return ny + 2; }
  std::size_t paddedSize() const {
    return static_cast<std::size_t>(nx + 2) * static_cast<std::size_t>(ny + 2);
  }
  std::size_t interiorSize() const {
    return static_cast<std::size_t>(nx) * static_cast<std::size_t>(ny);
  }
  double cellCenterX(int i) const { return x0 + (i - 0.5) * dx; }
  double cellCenterY(int j) const { return y0 + (j - 0.5) * dx; }

  /// Throws ConfigError unless nx, ny >= 1 and dx > 0.
  void validate() const;
};

/// Row-major offset into a padded array: k = j * (nx + 2) + i.
inline std::size_t flatIndex(int i, int j, const GridSpec& spec) {
  assert(i >= 0 && i < spec.nx + 2 && j >= 0 && j < spec.ny + 2);
  return static_cast<std::size_t>(j) * static_cast<std::size_t>(spec.nx + 2) +
         static_cast<std::size_t>(i);
}

/// Conserved fields plus bed elevation on a padded subgrid.
struct FieldSet {
  GridSpec spec;
  std::vector<double> h;   ///< water depth [m]
  std::vector<double> hu;  ///< x unit discharge [m^2/s]
  std::vector<double> hv;  ///< y unit discharge [m^2/s]
  std::vector<double> z;   ///< bed elevation [m]

  FieldSet() = default;
  explicit FieldSet(const GridSpec& s)
      : spec(s),
        h(s.paddedSize(), 0.0),
        hu(s.paddedSize(), 0.0),
        hv(s.paddedSize(), 0.0),
        z(s.paddedSize(), 0.0) {}

  std::size_t index(int i, int j) const { return flatIndex(i, j, spec); }

  /// Water volume over interior cells, summed row by row.
  double interiorVolume() const;
  /// Smallest interior depth.
  double minInteriorDepth() const;
};

enum class ScenarioKind { CircularDamBreak, LakeAtRest, DamBreak1D, FromFile };

std::string toString(ScenarioKind kind);
ScenarioKind parseScenarioKind(const std::string& name);

struct ScenarioConfig {
  ScenarioKind kind = ScenarioKind::CircularDamBreak;
  int n_side = 100;
  double dx = 0.5;
  double cfl = 0.45;
  double t_end = 1.0;
  double g = 9.81;
  double rain_rate = 0.0;  ///< net source r_o - r_f [m/s]
  double manning_n = 0.0;
  double bump_height = 0.5;  ///< lake-at-rest only
  double h_high = 4.0;       ///< dam-break depth inside the dam / upstream
  double h_low = 1.0;        ///< dam-break depth elsewhere / downstream
  std::string input_path;    ///< from-file only

  void validate() const;
};

/// Square n_side x n_side grid centred on the origin.
GridSpec squareGrid(int n_side, double dx);
/// n_cells x 1 strip centred on x = 0, used for the one-dimensional dam break.
GridSpec stripGrid(int n_cells, double dx);
/// Grid implied by a scenario configuration (reads the header for from-file).
GridSpec scenarioGrid(const ScenarioConfig& cfg);

/// h = h_high inside radius n_side*dx/5 (ties inside), h_low elsewhere.
FieldSet initCircularDamBreak(const GridSpec& spec, const ScenarioConfig& cfg);
/// Gaussian bump of the given peak height under a still surface at 1 m.
FieldSet initLakeAtRest(const GridSpec& spec, double bump_height);
/// h_high for x <= 0, h_low for x > 0, fluid at rest, flat bed.
FieldSet initDamBreak1D(const GridSpec& spec, const ScenarioConfig& cfg);

/// Builds the initial state for any scenario kind.
FieldSet makeInitialState(const ScenarioConfig& cfg);

}  // namespace swe
