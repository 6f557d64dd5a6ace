#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "swe/grid.hpp"

namespace swe {

// ---------------------------------------------------------------------------
// Cost models
// ---------------------------------------------------------------------------

enum class KernelId { ComputeDt, FluxX, FluxY, DtReduction, NewState };

inline constexpr std::array<KernelId, 5> kAllKernels{KernelId::ComputeDt, KernelId::FluxX, KernelId::FluxY,
                                                      KernelId::DtReduction, KernelId::NewState};

/// computeDt, fluxX, fluxY, dtReduction, newState.
std::string kernelName(KernelId id);

/// What one unit of work is for a kernel.
enum class CostUnit { Cell, XEdge, YEdge };

/// Analytic operation and traffic counts of one kernel pass.
///
/// FLOP convention: +, -, *, / and sqrt count one each; comparisons, abs and
/// negation count zero. Bytes are algorithmic traffic in 8-byte words: every
/// field value a pass touches is read once and every result written once,
/// independent of caches.
struct KernelCostModel {
  KernelId id;
  double flops_per_item;
  CostUnit unit;
  double bytes_per_cell;

  std::string name() const { return kernelName(id); }
  std::size_t items(const GridSpec& spec) const;
  double flops(const GridSpec& spec) const { return flops_per_item * static_cast<double>(items(spec)); }
  double bytes(const GridSpec& spec) const { return bytes_per_cell * static_cast<double>(spec.interiorSize()); }
};

const KernelCostModel& costModel(KernelId id);

// ---------------------------------------------------------------------------
// Samples and peaks
// ---------------------------------------------------------------------------

struct KernelSample {
  std::string kernel;
  long calls = 0;
  double total_s = 0.0;
  double flops = 0.0;
  double bytes = 0.0;

  double pAchieved() const { return flops / total_s; }  ///< FLOP/s
  double aAchieved() const { return flops / bytes; }    ///< FLOP/byte
};

/// Validates time > 0 and positive counts.
KernelSample makeSample(std::string kernel, long calls, double total_s, double flops, double bytes);

enum class PeakSource { Empirical, Supplied };

struct PlatformPeaks {
  std::string platform;
  double p_peak = 0.0;  ///< FLOP/s
  double b_peak = 0.0;  ///< B/s
  PeakSource source = PeakSource::Supplied;

  double aThresh() const { return p_peak / b_peak; }
  void validate() const;
};

struct RooflinePoint {
  double p_norm = 0.0;
  double a_norm = 0.0;
  double a_thresh = 0.0;
};

/// p_norm = p / p_peak, a_norm = a / a_thresh with a_thresh = p_peak / b_peak.
RooflinePoint rooflineNormalize(double p_achieved, double a_achieved, const PlatformPeaks& peaks);
RooflinePoint rooflineNormalize(const KernelSample& sample, const PlatformPeaks& peaks);

// ---------------------------------------------------------------------------
// Empirical peak probing
// ---------------------------------------------------------------------------

/// Seconds from a monotonic clock.
using Clock = std::function<double()>;
double monotonicSeconds();

struct PeakProbeConfig {
  std::vector<std::size_t> sizes{1u << 10, 1u << 14, 1u << 18, 1u << 22};  ///< doubles per worker
  std::vector<int> fma_ladder{1, 8, 64};  ///< d = a*b + c updates per element per pass
  int repetitions = 5;
  int workers = 1;
  std::size_t elements_per_trial = 1u << 24;  ///< passes = max(1, this / size)
  double min_duration = 1e-5;  ///< shorter trials cannot be resolved and are dropped
  std::string platform = "host";
};

struct PeakTrial {
  std::size_t elements = 0;  ///< per worker
  int fmas = 0;
  std::size_t passes = 0;
  double seconds = 0.0;  ///< median over repetitions
  double flops = 0.0;
  double bytes = 0.0;
  bool dropped = false;

  double flopRate() const { return flops / seconds; }
  double byteRate() const { return bytes / seconds; }
};

struct PeakEstimate {
  PlatformPeaks peaks;
  std::vector<PeakTrial> trials;
  std::vector<std::string> warnings;
};

/// p_peak: best FLOP/s among trials at the top of the FMA ladder.
/// b_peak: best B/s among trials at the bottom of the ladder (streaming).
/// The clock is read exactly twice per repetition, before the start barrier
/// releases the workers and after they have all finished.
PeakEstimate estimatePeaks(const PeakProbeConfig& config, const Clock& clock = monotonicSeconds);

// ---------------------------------------------------------------------------
// Scaling
// ---------------------------------------------------------------------------

enum class ScalingKind { Strong, Weak };

struct ScalingRun {
  int workers = 0;
  double time_s = 0.0;
};

/// Strong: speedup = t_base / t, efficiency = speedup * w_base / w.
/// Weak: efficiency = t_base / t, speedup = efficiency * w / w_base.
struct ScalingRow {
  int workers = 0;
  double time_s = 0.0;
  double speedup = 0.0;
  double efficiency = 0.0;
};

std::vector<ScalingRow> scalingMetrics(ScalingKind kind, const ScalingRun& baseline,
                                       std::span<const ScalingRun> runs);
/// Uses the run with the fewest workers as baseline.
std::vector<ScalingRow> scalingMetrics(ScalingKind kind, std::span<const ScalingRun> runs);

double median(std::vector<double> values);

// ---------------------------------------------------------------------------
// CSV exchange
// ---------------------------------------------------------------------------

/// "platform,p_peak_gflops,b_peak_gbs"
std::vector<PlatformPeaks> readPeaksCsv(const std::filesystem::path& path);
std::vector<PlatformPeaks> parsePeaksCsv(const std::string& text);
void writePeaksCsv(const std::filesystem::path& path, std::span<const PlatformPeaks> peaks);

/// "kernel,p_achieved,a_achieved,p_norm,a_norm" (FLOP/s and FLOP/byte)
void writeRooflineCsv(const std::filesystem::path& path, std::span<const KernelSample> samples,
                      const PlatformPeaks& peaks);

/// "workers,time_s,speedup,efficiency"
void writeScalingCsv(const std::filesystem::path& path, std::span<const ScalingRow> rows);

/// Splits one CSV line on commas; no quoting support.
std::vector<std::string> splitCsvLine(const std::string& line);

}  // namespace swe
