#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "swe/config.hpp"
#include "swe/driver.hpp"
#include "swe/perf.hpp"
#include "swe/ppmetrics.hpp"

namespace swe {

// ---------------------------------------------------------------------------
// Resource checks
// ---------------------------------------------------------------------------

/// Rough resident size of a run: global initial state, per-rank tiles with
/// double buffer and flux accumulators, and the gathered result.
std::uint64_t estimateFootprintBytes(const GridSpec& global, int ranks);
/// MemAvailable from /proc/meminfo, or nullopt when it cannot be read.
std::optional<std::uint64_t> availableMemoryBytes();
/// Throws ConfigError when the estimate exceeds `available`.
void checkMemory(const GridSpec& global, int ranks, std::uint64_t available);
unsigned availableCores();

// ---------------------------------------------------------------------------
// Subcommands
// ---------------------------------------------------------------------------

/// Runs once; writes summary.json (and snapshots) under out_dir.
RunReport cmdRun(const RunConfig& cfg, const std::filesystem::path& out_dir, std::ostream& log);

struct ScalingResult {
  std::vector<ScalingRow> rows;
  std::vector<int> n_side;  ///< per row
  std::vector<std::string> warnings;
  bool monotone = true;  ///< strong: median times never increase with workers
};

/// Fixed global problem; median wall time over repetitions per worker count.
/// Writes scaling_strong.csv.
ScalingResult cmdScaleStrong(const RunConfig& cfg, const std::vector<int>& workers, int repetitions,
                             const std::filesystem::path& out_dir, std::ostream& log);

/// ceil(sqrt(workers * cells_per_worker)), computed exactly.
int weakSideFor(int workers, long cells_per_worker);

/// Fixed cells per worker. Writes scaling_weak.csv.
ScalingResult cmdScaleWeak(const RunConfig& cfg, const std::vector<int>& workers, long cells_per_worker,
                           int repetitions, const std::filesystem::path& out_dir, std::ostream& log);

struct RooflineResult {
  std::vector<KernelSample> samples;
  std::vector<RooflinePoint> points;
  PlatformPeaks peaks;
  std::vector<std::string> warnings;  ///< samples above the roof
};

/// Profiles one run and places its kernels under `peaks`. Writes roofline.csv.
RooflineResult cmdRoofline(const RunConfig& cfg, const PlatformPeaks& peaks, const std::filesystem::path& out_dir,
                           std::ostream& log);

/// Probes the host and writes peaks.csv.
PeakEstimate cmdPeaks(const PeakProbeConfig& probe, const std::filesystem::path& out_dir, std::ostream& log);

/// Scores observations against platform peaks; writes pp_report.csv and
/// pp_report.json. An empty platform list means every platform in the
/// peaks file.
PpReport cmdPpReport(const std::filesystem::path& peaks_csv, const std::filesystem::path& observations_csv,
                     std::vector<std::string> platforms, const std::filesystem::path& out_dir, std::ostream& log);

enum class Injection { None, FlipBeta, RankOrder };
Injection parseInjection(const std::string& name);

struct CheckResult {
  std::string name;
  bool passed = false;
  double measured = 0.0;
  double tolerance = 0.0;
  std::string detail;
};

struct ValidationSummary {
  std::vector<CheckResult> checks;
  bool passed() const;
  std::string json() const;
};

/// Lake at rest, symmetry, decomposition equivalence and the Stoker
/// convergence study, at small sizes.
ValidationSummary cmdValidate(Injection inject, std::ostream& log);

}  // namespace swe
