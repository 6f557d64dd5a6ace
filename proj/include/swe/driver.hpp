#pragma once

#include <cmath>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "swe/config.hpp"
#include "swe/fabric.hpp"
#include "swe/grid.hpp"
#include "swe/perf.hpp"

namespace swe {

/// The nine phases of one step, in execution order.
enum class Phase {
  ComputeDt,
  FluxX,
  FluxY,
  DtReduction,
  NewState,
  BoundaryConditions,
  HaloExchange,
  BoundaryAccounting,
  Output,
};

const char* toString(Phase p);

struct AuditEntry {
  long step = 0;
  double t = 0.0;
  double volume = 0.0;
};

struct DtRecord {
  long step = 0;
  std::vector<double> rank_bounds;  ///< every rank's local CFL bound
  double global_dt = 0.0;           ///< after the min-reduction, before clamping
};

/// Deliberate faults used to check that the validation suite notices them.
struct FaultHooks {
  bool flip_beta_sign = false;
  /// Odd ranks update with a different summation order.
  bool rank_dependent_association = false;
};

struct RunOptions {
  std::optional<FieldSet> initial;  ///< overrides the scenario initial state
  std::filesystem::path output_dir;  ///< snapshots go here when non-empty
  bool gather_fields = true;         ///< put the final global state into the report
  bool trace = false;                ///< record phase order and per-rank dt bounds
  FaultHooks hooks;
  /// Called on rank 0 with each gathered snapshot; timing is paused meanwhile.
  std::function<void(const FieldSet&, double t, long step)> on_snapshot;
};

struct RunReport {
  long steps = 0;
  double t_final = 0.0;
  double wall_time_s = 0.0;  ///< simulation loop only
  std::vector<KernelSample> kernels;
  std::vector<AuditEntry> mass_audit;
  std::vector<std::string> snapshot_paths;
  double initial_volume = 0.0;
  double boundary_inflow = 0.0;  ///< reflective walls: exactly zero
  long dt_reductions = 0;        ///< halvings applied over the run
  int px = 1;
  int py = 1;
  FabricStats fabric;
  std::optional<FieldSet> fields;
  std::vector<std::vector<Phase>> phase_trace;  ///< one entry per step
  std::vector<DtRecord> dt_trace;
};

/// Runs the configured scenario on px * py rank workers that talk only
/// through a Fabric. Throws NumericalError with step and rank on failure.
RunReport runSimulation(const RunConfig& cfg, const RunOptions& options = {});

/// Run summary as JSON text: steps, t_final, wall_time_s and per-kernel
/// calls, total_s, flops, bytes.
std::string runSummaryJson(const RunReport& report);

// ---------------------------------------------------------------------------
// Wet-bed dam-break convergence study
// ---------------------------------------------------------------------------

struct DamBreakStudy {
  double length = 100.0;  ///< domain [-L/2, L/2]
  double t_end = 5.0;
  double h_left = 4.0;
  double h_right = 1.0;
  double g = 9.81;
  double cfl = 0.45;
};

struct ConvergenceRow {
  int cells = 0;
  double dx = 0.0;
  double l1_error = 0.0;
  double shock_numeric = 0.0;
  double shock_exact = 0.0;
  long steps = 0;

  bool shockWithin(double cells_tolerance) const {
    return std::abs(shock_numeric - shock_exact) <= cells_tolerance * dx;
  }
};

struct ConvergenceTable {
  std::vector<ConvergenceRow> rows;
  std::vector<double> pairwise_order;  ///< log2-style order between consecutive rows
  double fitted_order = 0.0;           ///< least-squares slope of log(error) against log(dx)
  bool monotone = false;               ///< errors strictly decreasing with resolution
};

/// L1 norm of h - h_exact over interior cells of a strip, times dx.
double stokerL1Error(const FieldSet& fields, double h_left, double h_right, double g, double t);
/// Position where the numerical depth crosses halfway between the middle
/// state and the downstream depth, searching from the right.
double numericalShockPosition(const FieldSet& fields, double h_middle, double h_right);

/// Needs at least three resolutions, sorted ascending.
ConvergenceTable runDambreak1D(const std::vector<int>& resolutions, const DamBreakStudy& study = {});

}  // namespace swe
