#pragma once

#include <array>
#include <vector>

#include "swe/detail/kernels.hpp"
#include "swe/grid.hpp"

namespace swe {

/// Cell state as seen from an edge, in global (x, y) components.
struct CellState {
  double h = 0.0;
  double hu = 0.0;
  double hv = 0.0;
  double z = 0.0;
};

struct RoeAverages {
  double un = 0.0;  ///< normal velocity
  double ut = 0.0;  ///< tangential velocity
  double c = 0.0;   ///< celerity sqrt(g * (hL + hR) / 2)
};

/// Roe-averaged velocities and celerity across an edge with the given normal.
/// Requires at least one wet side.
RoeAverages roeAverages(const CellState& left, const CellState& right, Orientation o, double g);

/// Eigenstructure of one edge jump in edge-normal components
/// (mass, normal discharge, tangential discharge).
struct EdgeDecomposition {
  RoeAverages roe;
  std::array<double, 3> lambda{};                 ///< ascending wave speeds
  std::array<double, 3> alpha{};                  ///< wave strengths
  std::array<double, 3> beta{};                   ///< bed source strengths
  std::array<std::array<double, 3>, 3> evec{};    ///< evec[m] is the m-th eigenvector
  bool skipped = false;                           ///< degenerate (dry) edge
};

/// Decomposes the jump right - left. Edges whose celerity falls below
/// kDegenerateCelerity come back with skipped = true.
EdgeDecomposition edgeDecompose(const CellState& left, const CellState& right, Orientation o,
                                const SolverOptions& opt);

inline constexpr double kDegenerateCelerity = 1e-10;

/// Per-cell sums of upwinded wave contributions for one sweep direction.
/// Components are in global orientation: mass, x discharge, y discharge.
struct EdgeFluxAccumulator {
  GridSpec spec;
  std::vector<double> mass;
  std::vector<double> mx;
  std::vector<double> my;

  EdgeFluxAccumulator() = default;
  explicit EdgeFluxAccumulator(const GridSpec& s)
      : spec(s), mass(s.paddedSize(), 0.0), mx(s.paddedSize(), 0.0), my(s.paddedSize(), 0.0) {}

  void zero();
};

/// Zeroes acc and adds every edge of the given orientation. Fields must have
/// current halos. Throws NumericalError naming the edge on non-finite values.
void accumulateFluxSweep(const FieldSet& fields, Orientation o, const SolverOptions& opt,
                         EdgeFluxAccumulator& acc);

/// Number of edges a sweep visits: (nx+1)*ny for x, nx*(ny+1) for y.
std::size_t sweepEdgeCount(const GridSpec& spec, Orientation o);

}  // namespace swe
