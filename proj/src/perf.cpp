#include "swe/perf.hpp"

#include <algorithm>
#include <barrier>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <thread>

#include "swe/error.hpp"

namespace swe {

std::string kernelName(KernelId id) {
  switch (id) {
    case KernelId::ComputeDt: return "computeDt";
    case KernelId::FluxX: return "fluxX";
    case KernelId::FluxY: return "fluxY";
    case KernelId::DtReduction: return "dtReduction";
    case KernelId::NewState: return "newState";
  }
  return "?";
}

std::size_t KernelCostModel::items(const GridSpec& s) const {
  const auto nx = static_cast<std::size_t>(s.nx);
  const auto ny = static_cast<std::size_t>(s.ny);
  switch (unit) {
    case CostUnit::Cell: return nx * ny;
    case CostUnit::XEdge: return (nx + 1) * ny;
    case CostUnit::YEdge: return nx * (ny + 1);
  }
  return 0;
}

namespace {

// Wet edge, no transonic wave: Roe averages 19, wave decomposition 16,
// entropy check 10, wave strengths and contributions 17, accumulation 6.
constexpr double kFluxFlopsPerEdge = 68.0;

const std::array<KernelCostModel, 5> kModels{{
    {KernelId::ComputeDt, 7.0, CostUnit::Cell, 24.0},
    {KernelId::FluxX, kFluxFlopsPerEdge, CostUnit::XEdge, 56.0},
    {KernelId::FluxY, kFluxFlopsPerEdge, CostUnit::YEdge, 56.0},
    {KernelId::DtReduction, 4.0, CostUnit::Cell, 24.0},
    {KernelId::NewState, 10.0, CostUnit::Cell, 96.0},
}};

}  // namespace

const KernelCostModel& costModel(KernelId id) {
  for (const auto& m : kModels) {
    if (m.id == id) return m;
  }
  throw Error("no cost model for kernel " + kernelName(id));
}

KernelSample makeSample(std::string kernel, long calls, double total_s, double flops, double bytes) {
  if (!(total_s > 0.0)) throw Error("kernel " + kernel + ": sample time must be > 0");
  if (!(flops > 0.0) || !(bytes > 0.0)) throw Error("kernel " + kernel + ": flop and byte totals must be > 0");
  if (calls < 1) throw Error("kernel " + kernel + ": sample needs at least one call");
  return {std::move(kernel), calls, total_s, flops, bytes};
}

void PlatformPeaks::validate() const {
  if (!(p_peak > 0.0) || !(b_peak > 0.0) || !std::isfinite(p_peak) || !std::isfinite(b_peak)) {
    throw ConfigError("platform " + platform + ": peaks must be finite and > 0");
  }
}

RooflinePoint rooflineNormalize(double p_achieved, double a_achieved, const PlatformPeaks& peaks) {
  peaks.validate();
  RooflinePoint pt;
  pt.a_thresh = peaks.aThresh();
  pt.p_norm = p_achieved / peaks.p_peak;
  pt.a_norm = a_achieved / pt.a_thresh;
  return pt;
}

RooflinePoint rooflineNormalize(const KernelSample& s, const PlatformPeaks& peaks) {
  return rooflineNormalize(s.pAchieved(), s.aAchieved(), peaks);
}

double monotonicSeconds() {
  using namespace std::chrono;
  return duration<double>(steady_clock::now().time_since_epoch()).count();
}

double median(std::vector<double> v) {
  if (v.empty()) throw Error("median of an empty set");
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

namespace {

template <int K>
void fmaPass(double* x, std::size_t n, double b, double c) {
  for (std::size_t e = 0; e < n; ++e) {
    double a = x[e];
    for (int r = 0; r < K; ++r) a = a * b + c;
    x[e] = a;
  }
}

void runPass(int fmas, double* x, std::size_t n, double b, double c) {
  switch (fmas) {
    case 1: fmaPass<1>(x, n, b, c); break;
    case 2: fmaPass<2>(x, n, b, c); break;
    case 4: fmaPass<4>(x, n, b, c); break;
    case 8: fmaPass<8>(x, n, b, c); break;
    case 16: fmaPass<16>(x, n, b, c); break;
    case 32: fmaPass<32>(x, n, b, c); break;
    case 64: fmaPass<64>(x, n, b, c); break;
    case 128: fmaPass<128>(x, n, b, c); break;
    default: throw ConfigError("FMA ladder entries must be powers of two up to 128, got " + std::to_string(fmas));
  }
}

}  // namespace

PeakEstimate estimatePeaks(const PeakProbeConfig& cfg, const Clock& clock) {
  if (cfg.sizes.empty() || cfg.fma_ladder.empty()) throw ConfigError("peak probe needs sizes and an FMA ladder");
  if (cfg.repetitions < 1) throw ConfigError("peak probe repetitions must be >= 1");
  if (cfg.workers < 1) throw ConfigError("peak probe workers must be >= 1");
  for (std::size_t s : cfg.sizes) {
    if (s == 0) throw ConfigError("peak probe sizes must be > 0");
  }
  for (int f : cfg.fma_ladder) runPass(f, nullptr, 0, 0.0, 0.0);  // validates the ladder

  const int lo_fma = *std::min_element(cfg.fma_ladder.begin(), cfg.fma_ladder.end());
  const int hi_fma = *std::max_element(cfg.fma_ladder.begin(), cfg.fma_ladder.end());

  PeakEstimate est;
  est.peaks.platform = cfg.platform;
  est.peaks.source = PeakSource::Empirical;

  const auto workers = static_cast<std::size_t>(cfg.workers);
  std::vector<std::vector<double>> arrays(workers);

  for (std::size_t size : cfg.sizes) {
    for (auto& a : arrays) a.assign(size, 1.0);
    const std::size_t passes = std::max<std::size_t>(1, cfg.elements_per_trial / size);
    for (int fmas : cfg.fma_ladder) {
      // b < 1 keeps the iterate bounded: a -> c / (1 - b).
      const double b = 0.5;
      const double c = 0.25;
      std::vector<double> times;
      for (int rep = 0; rep < cfg.repetitions; ++rep) {
        double t0 = 0.0;
        std::barrier start(static_cast<std::ptrdiff_t>(workers + 1));
        std::vector<std::jthread> pool;
        pool.reserve(workers);
        for (std::size_t w = 0; w < workers; ++w) {
          pool.emplace_back([&, w] {
            start.arrive_and_wait();
            for (std::size_t p = 0; p < passes; ++p) runPass(fmas, arrays[w].data(), size, b, c);
          });
        }
        t0 = clock();
        start.arrive_and_wait();
        for (auto& t : pool) t.join();
        times.push_back(clock() - t0);
      }
      PeakTrial trial;
      trial.elements = size;
      trial.fmas = fmas;
      trial.passes = passes;
      trial.seconds = median(times);
      const double work = static_cast<double>(size) * static_cast<double>(passes) * static_cast<double>(workers);
      trial.flops = 2.0 * fmas * work;
      trial.bytes = 16.0 * work;
      if (!(trial.seconds >= cfg.min_duration) || !(trial.seconds > 0.0)) {
        trial.dropped = true;
        std::ostringstream msg;
        msg << "dropped trial size=" << size << " fmas=" << fmas << ": " << trial.seconds
            << " s is below the timer resolution floor of " << cfg.min_duration << " s";
        est.warnings.push_back(msg.str());
      }
      est.trials.push_back(trial);
    }
  }

  for (const PeakTrial& t : est.trials) {
    if (t.dropped) continue;
    if (t.fmas == hi_fma) est.peaks.p_peak = std::max(est.peaks.p_peak, t.flopRate());
    if (t.fmas == lo_fma) est.peaks.b_peak = std::max(est.peaks.b_peak, t.byteRate());
  }
  if (!(est.peaks.p_peak > 0.0) || !(est.peaks.b_peak > 0.0)) {
    throw Error("peak probe: every trial at one end of the FMA ladder was dropped; increase elements_per_trial");
  }
  return est;
}

std::vector<ScalingRow> scalingMetrics(ScalingKind kind, const ScalingRun& base, std::span<const ScalingRun> runs) {
  if (base.workers < 1 || !(base.time_s > 0.0) || !std::isfinite(base.time_s)) {
    throw ConfigError("scaling metrics need a baseline with workers >= 1 and time > 0");
  }
  std::vector<ScalingRow> rows;
  rows.reserve(runs.size());
  for (const ScalingRun& r : runs) {
    if (r.workers < 1 || !(r.time_s > 0.0)) throw ConfigError("scaling run needs workers >= 1 and time > 0");
    ScalingRow row{r.workers, r.time_s, 0.0, 0.0};
    const double ratio = base.time_s / r.time_s;
    const double wr = static_cast<double>(r.workers) / static_cast<double>(base.workers);
    if (kind == ScalingKind::Strong) {
      row.speedup = ratio;
      row.efficiency = ratio / wr;
    } else {
      row.efficiency = ratio;
      row.speedup = ratio * wr;
    }
    rows.push_back(row);
  }
  return rows;
}

std::vector<ScalingRow> scalingMetrics(ScalingKind kind, std::span<const ScalingRun> runs) {
  if (runs.empty()) throw ConfigError("scaling metrics need at least one run to serve as baseline");
  const auto base = std::min_element(runs.begin(), runs.end(),
                                     [](const ScalingRun& a, const ScalingRun& b) { return a.workers < b.workers; });
  return scalingMetrics(kind, *base, runs);
}

std::vector<std::string> splitCsvLine(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) {
    const auto b = cell.find_first_not_of(" \t\r");
    const auto e = cell.find_last_not_of(" \t\r");
    out.push_back(b == std::string::npos ? std::string() : cell.substr(b, e - b + 1));
  }
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

namespace {

double parseNumber(const std::string& s, const std::string& what) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    throw ConfigError("cannot parse " + what + " '" + s + "'");
  }
  if (used != s.size()) throw ConfigError("trailing characters in " + what + " '" + s + "'");
  return v;
}

std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::ofstream openForWrite(const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  out << std::setprecision(17);
  return out;
}

}  // namespace

std::vector<PlatformPeaks> parsePeaksCsv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  std::vector<PlatformPeaks> out;
  bool header = true;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line == "\r" || line[0] == '#') continue;
    const auto cells = splitCsvLine(line);
    if (header) {
      if (cells != std::vector<std::string>{"platform", "p_peak_gflops", "b_peak_gbs"}) {
        throw ConfigError("peaks CSV header must be platform,p_peak_gflops,b_peak_gbs");
      }
      header = false;
      continue;
    }
    if (cells.size() != 3) throw ConfigError("peaks CSV line " + std::to_string(lineno) + ": expected 3 columns");
    PlatformPeaks p;
    p.platform = cells[0];
    p.p_peak = parseNumber(cells[1], "p_peak_gflops") * 1e9;
    p.b_peak = parseNumber(cells[2], "b_peak_gbs") * 1e9;
    p.source = PeakSource::Supplied;
    p.validate();
    out.push_back(p);
  }
  if (header) throw ConfigError("peaks CSV is empty");
  return out;
}

std::vector<PlatformPeaks> readPeaksCsv(const std::filesystem::path& path) { return parsePeaksCsv(slurp(path)); }

void writePeaksCsv(const std::filesystem::path& path, std::span<const PlatformPeaks> peaks) {
  auto out = openForWrite(path);
  out << "platform,p_peak_gflops,b_peak_gbs\n";
  for (const auto& p : peaks) out << p.platform << ',' << p.p_peak / 1e9 << ',' << p.b_peak / 1e9 << '\n';
}

void writeRooflineCsv(const std::filesystem::path& path, std::span<const KernelSample> samples,
                      const PlatformPeaks& peaks) {
  auto out = openForWrite(path);
  out << "kernel,p_achieved,a_achieved,p_norm,a_norm\n";
  for (const auto& s : samples) {
    const RooflinePoint pt = rooflineNormalize(s, peaks);
    out << s.kernel << ',' << s.pAchieved() << ',' << s.aAchieved() << ',' << pt.p_norm << ',' << pt.a_norm << '\n';
  }
}

void writeScalingCsv(const std::filesystem::path& path, std::span<const ScalingRow> rows) {
  auto out = openForWrite(path);
  out << "workers,time_s,speedup,efficiency\n";
  for (const auto& r : rows) out << r.workers << ',' << r.time_s << ',' << r.speedup << ',' << r.efficiency << '\n';
}

}  // namespace swe
