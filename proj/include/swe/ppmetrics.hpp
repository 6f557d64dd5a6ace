#pragma once

#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "swe/perf.hpp"

namespace swe {

struct PlatformObservation {
  std::string platform;
  std::string kernel;
  int n_side = 0;
  double p_achieved = 0.0;  ///< FLOP/s
  double a_achieved = 0.0;  ///< FLOP/byte
  PlatformPeaks peaks;
};

/// Tolerated overshoot of the roof before r is treated as inconsistent data.
inline constexpr double kRooflineSlack = 1.02;

struct RelativePerformance {
  double r = 0.0;
  bool clipped = false;
  std::string warning;
};

/// r = p / min(p_peak, b_peak * a). Values in (1, 1.02] are clipped to 1 with
/// a warning; anything above throws.
RelativePerformance relativePerformance(const PlatformObservation& obs);

/// Harmonic mean; 0 if any r is 0. Throws on an empty set or r outside [0, 1].
double pp1(std::span<const double> rs);
/// Arithmetic mean; 0 for an empty set. Throws on r outside [0, 1].
double pp2(std::span<const double> rs);

struct PpPoint {
  std::string kernel;
  int n_side = 0;
  double pp1 = 0.0;
  double pp2 = 0.0;
  std::map<std::string, double> r;             ///< by platform
  std::vector<std::string> missing_platforms;  ///< scored as zero
};

struct PpReport {
  std::vector<std::string> platforms;
  std::vector<PpPoint> points;  ///< sorted by kernel, then n_side
  std::vector<std::string> warnings;

  /// Rows at one problem size, in kernel order.
  std::vector<PpPoint> table(int n_side) const;
  /// Largest n_side covered by every kernel; 0 when there is none.
  int tableSize() const;
};

/// Scores every (kernel, n_side) pair over the platform set. A pair without
/// an observation for some platform scores PP = 0 and carries a coverage
/// note. Throws on duplicate observations for one platform and pair.
PpReport ppSweep(std::span<const PlatformObservation> observations, std::span<const std::string> platforms);

/// "platform,kernel,n_side,p_achieved_gflops,a_achieved_flops_per_byte",
/// joined with peaks by platform name.
std::vector<PlatformObservation> parseObservationsCsv(const std::string& text,
                                                      std::span<const PlatformPeaks> peaks);
std::vector<PlatformObservation> readObservationsCsv(const std::filesystem::path& path,
                                                     std::span<const PlatformPeaks> peaks);
void writeObservationsCsv(const std::filesystem::path& path, std::span<const PlatformObservation> obs);

/// "kernel,n_side,pp1,pp2,missing"
void writePpReportCsv(const std::filesystem::path& path, const PpReport& report);
std::string ppReportJson(const PpReport& report);
/// Fixed-width text table: kernel, PP1, PP2.
std::string formatPortabilityTable(const PpReport& report, int n_side);

}  // namespace swe
