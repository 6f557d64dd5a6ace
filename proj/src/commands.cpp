#include "swe/commands.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <ostream>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "swe/decomposition.hpp"
#include "swe/error.hpp"

namespace swe {

std::uint64_t estimateFootprintBytes(const GridSpec& global, int ranks) {
  // Doubles per padded cell: initial state 4, tile 4, second buffer 4,
  // two accumulators 6, gathered copy 4.
  constexpr std::uint64_t kWordsPerCell = 22;
  const auto nx = static_cast<std::uint64_t>(global.nx);
  const auto ny = static_cast<std::uint64_t>(global.ny);
  const std::uint64_t cells = (nx + 2) * (ny + 2);
  // Each tile adds its own halo ring.
  const std::uint64_t halo = static_cast<std::uint64_t>(std::max(ranks, 1)) * 2 * (nx + ny + 4);
  return (cells + halo) * kWordsPerCell * sizeof(double);
}

std::optional<std::uint64_t> availableMemoryBytes() {
  std::ifstream in("/proc/meminfo");
  std::string key;
  std::uint64_t value = 0;
  std::string unit;
  while (in >> key >> value) {
    std::getline(in, unit);
    if (key == "MemAvailable:") return value * 1024;
  }
  return std::nullopt;
}

void checkMemory(const GridSpec& global, int ranks, std::uint64_t available) {
  const std::uint64_t need = estimateFootprintBytes(global, ranks);
  if (need > available) {
    std::ostringstream msg;
    msg << "estimated footprint " << need / (1u << 20) << " MiB for a " << global.nx << "x" << global.ny
        << " grid exceeds available memory " << available / (1u << 20) << " MiB";
    throw ConfigError(msg.str());
  }
}

unsigned availableCores() { return std::max(1u, std::thread::hardware_concurrency()); }

namespace {

void preflight(const RunConfig& cfg, std::ostream& log) {
  cfg.scenario.validate();
  const GridSpec spec = scenarioGrid(cfg.scenario);
  if (const auto avail = availableMemoryBytes()) checkMemory(spec, cfg.px * cfg.py, *avail);
  const unsigned cores = availableCores();
  if (static_cast<unsigned>(cfg.px * cfg.py) > cores) {
    log << "warning: " << cfg.px * cfg.py << " workers on " << cores << " cores (oversubscribed)\n";
  }
}

void writeText(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  out << text;
}

double timedRun(const RunConfig& cfg) {
  RunOptions opt;
  opt.gather_fields = false;
  return runSimulation(cfg, opt).wall_time_s;
}

}  // namespace

RunReport cmdRun(const RunConfig& cfg, const std::filesystem::path& out_dir, std::ostream& log) {
  preflight(cfg, log);
  RunOptions opt;
  opt.output_dir = out_dir / "snapshots";
  opt.gather_fields = false;
  RunReport rep = runSimulation(cfg, opt);
  const std::string summary = runSummaryJson(rep);
  writeText(out_dir / "summary.json", summary + "\n");
  log << summary << '\n';
  return rep;
}

ScalingResult cmdScaleStrong(const RunConfig& base, const std::vector<int>& workers, int repetitions,
                             const std::filesystem::path& out_dir, std::ostream& log) {
  if (workers.empty()) throw ConfigError("scale-strong needs at least one worker count");
  if (repetitions < 1) throw ConfigError("repetitions must be >= 1");
  ScalingResult res;
  std::vector<ScalingRun> runs;
  for (int w : workers) {
    RunConfig cfg = base;
    std::tie(cfg.px, cfg.py) = rankGridFor(w);
    preflight(cfg, log);
    std::vector<double> times;
    for (int rep = 0; rep < repetitions; ++rep) times.push_back(timedRun(cfg));
    runs.push_back({w, median(times)});
    res.n_side.push_back(cfg.scenario.n_side);
    log << "workers=" << w << " (" << cfg.px << "x" << cfg.py << ") median " << runs.back().time_s << " s\n";
  }
  res.rows = scalingMetrics(ScalingKind::Strong, runs);
  std::vector<std::size_t> order(res.rows.size());
  for (std::size_t k = 0; k < order.size(); ++k) order[k] = k;
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return res.rows[a].workers < res.rows[b].workers; });
  for (std::size_t k = 1; k < order.size(); ++k) {
    const auto& prev = res.rows[order[k - 1]];
    const auto& cur = res.rows[order[k]];
    if (cur.time_s > prev.time_s) {
      res.monotone = false;
      std::ostringstream msg;
      msg << "median time rose from " << prev.time_s << " s at " << prev.workers << " workers to " << cur.time_s
          << " s at " << cur.workers;
      res.warnings.push_back(msg.str());
    }
  }
  for (const auto& w : res.warnings) log << "warning: " << w << '\n';
  writeScalingCsv(out_dir / "scaling_strong.csv", res.rows);
  return res;
}

int weakSideFor(int workers, long cells_per_worker) {
  if (workers < 1 || cells_per_worker < 1) throw ConfigError("weak scaling needs workers >= 1 and cells >= 1");
  const auto total = static_cast<std::uint64_t>(workers) * static_cast<std::uint64_t>(cells_per_worker);
  auto n = static_cast<std::uint64_t>(std::sqrt(static_cast<double>(total)));
  while (n * n > total) --n;
  while (n * n < total) ++n;
  return static_cast<int>(n);
}

ScalingResult cmdScaleWeak(const RunConfig& base, const std::vector<int>& workers, long cells_per_worker,
                           int repetitions, const std::filesystem::path& out_dir, std::ostream& log) {
  if (workers.empty()) throw ConfigError("scale-weak needs at least one worker count");
  if (repetitions < 1) throw ConfigError("repetitions must be >= 1");
  if (base.scenario.kind == ScenarioKind::FromFile || base.scenario.kind == ScenarioKind::DamBreak1D) {
    throw ConfigError("scale-weak needs a square scenario");
  }
  ScalingResult res;
  std::vector<ScalingRun> runs;
  for (int w : workers) {
    RunConfig cfg = base;
    cfg.scenario.n_side = weakSideFor(w, cells_per_worker);
    std::tie(cfg.px, cfg.py) = rankGridFor(w);
    preflight(cfg, log);
    std::vector<double> times;
    for (int rep = 0; rep < repetitions; ++rep) times.push_back(timedRun(cfg));
    runs.push_back({w, median(times)});
    res.n_side.push_back(cfg.scenario.n_side);
    log << "workers=" << w << " n_side=" << cfg.scenario.n_side << " median " << runs.back().time_s << " s\n";
  }
  res.rows = scalingMetrics(ScalingKind::Weak, runs);
  writeScalingCsv(out_dir / "scaling_weak.csv", res.rows);
  return res;
}

RooflineResult cmdRoofline(const RunConfig& cfg, const PlatformPeaks& peaks, const std::filesystem::path& out_dir,
                           std::ostream& log) {
  preflight(cfg, log);
  peaks.validate();
  RunOptions opt;
  opt.gather_fields = false;
  const RunReport rep = runSimulation(cfg, opt);
  RooflineResult res;
  res.samples = rep.kernels;
  res.peaks = peaks;
  for (const auto& s : res.samples) {
    const RooflinePoint pt = rooflineNormalize(s, peaks);
    res.points.push_back(pt);
    if (pt.p_norm > std::max(pt.a_norm, 1.0) * 1.05) {
      std::ostringstream msg;
      msg << s.kernel << " sits above the roof: p_norm=" << pt.p_norm << " a_norm=" << pt.a_norm;
      res.warnings.push_back(msg.str());
    }
    log << s.kernel << ": " << s.pAchieved() / 1e9 << " GFLOP/s, " << s.aAchieved() << " FLOP/B, p_norm "
        << pt.p_norm << ", a_norm " << pt.a_norm << '\n';
  }
  for (const auto& w : res.warnings) log << "warning: " << w << '\n';
  writeRooflineCsv(out_dir / "roofline.csv", res.samples, peaks);
  return res;
}

PeakEstimate cmdPeaks(const PeakProbeConfig& probe, const std::filesystem::path& out_dir, std::ostream& log) {
  if (static_cast<unsigned>(probe.workers) > availableCores()) {
    log << "warning: " << probe.workers << " probe workers on " << availableCores() << " cores\n";
  }
  PeakEstimate est = estimatePeaks(probe);
  for (const auto& w : est.warnings) log << "warning: " << w << '\n';
  log << est.peaks.platform << ": " << est.peaks.p_peak / 1e9 << " GFLOP/s, " << est.peaks.b_peak / 1e9
      << " GB/s\n";
  const PlatformPeaks one[] = {est.peaks};
  writePeaksCsv(out_dir / "peaks.csv", one);
  return est;
}

PpReport cmdPpReport(const std::filesystem::path& peaks_csv, const std::filesystem::path& observations_csv,
                     std::vector<std::string> platforms, const std::filesystem::path& out_dir, std::ostream& log) {
  const auto peaks = readPeaksCsv(peaks_csv);
  const auto obs = readObservationsCsv(observations_csv, peaks);
  if (platforms.empty()) {
    for (const auto& p : peaks) platforms.push_back(p.platform);
  }
  PpReport rep = ppSweep(obs, platforms);
  for (const auto& w : rep.warnings) log << "warning: " << w << '\n';
  for (const auto& p : rep.points) {
    if (p.pp1 > p.pp2) throw Error("PP1 > PP2 for " + p.kernel + "; the report is inconsistent");
  }
  writePpReportCsv(out_dir / "pp_report.csv", rep);
  writeText(out_dir / "pp_report.json", ppReportJson(rep) + "\n");
  log << formatPortabilityTable(rep, rep.tableSize());
  return rep;
}

Injection parseInjection(const std::string& name) {
  if (name.empty() || name == "none") return Injection::None;
  if (name == "flip-beta") return Injection::FlipBeta;
  if (name == "rank-order") return Injection::RankOrder;
  throw ConfigError("unknown injection '" + name + "' (expected flip-beta or rank-order)");
}

bool ValidationSummary::passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.passed; });
}

std::string ValidationSummary::json() const {
  nlohmann::ordered_json j;
  j["passed"] = passed();
  auto arr = nlohmann::ordered_json::array();
  for (const auto& c : checks) {
    arr.push_back({{"name", c.name}, {"passed", c.passed}, {"measured", c.measured}, {"tolerance", c.tolerance},
                   {"detail", c.detail}});
  }
  j["checks"] = arr;
  return j.dump(2);
}

namespace {

CheckResult checkLakeAtRest(const FaultHooks& hooks) {
  RunConfig cfg;
  cfg.scenario.kind = ScenarioKind::LakeAtRest;
  cfg.scenario.n_side = 48;
  cfg.scenario.t_end = 1e9;
  cfg.max_steps = 200;
  cfg.audit_every = 0;
  RunOptions opt;
  opt.hooks = hooks;
  const FieldSet init = makeInitialState(cfg.scenario);
  const RunReport rep = runSimulation(cfg, opt);
  double dev = 0.0;
  for (int j = 1; j <= init.spec.ny; ++j) {
    for (int i = 1; i <= init.spec.nx; ++i) {
      const std::size_t k = init.index(i, j);
      dev = std::max(dev, std::abs((rep.fields->h[k] + rep.fields->z[k]) - (init.h[k] + init.z[k])));
      dev = std::max({dev, std::abs(rep.fields->hu[k]), std::abs(rep.fields->hv[k])});
    }
  }
  return {"lake-at-rest", dev <= 1e-12, dev, 1e-12, std::to_string(rep.steps) + " steps"};
}

CheckResult checkSymmetry(const FaultHooks& hooks) {
  RunConfig cfg;
  cfg.scenario.kind = ScenarioKind::CircularDamBreak;
  cfg.scenario.n_side = 40;
  cfg.scenario.t_end = 1.0;
  cfg.audit_every = 0;
  RunOptions opt;
  opt.hooks = hooks;
  const RunReport rep = runSimulation(cfg, opt);
  const FieldSet& f = *rep.fields;
  const int n = f.spec.nx;
  double worst = 0.0;
  for (int j = 1; j <= n; ++j) {
    for (int i = 1; i <= n; ++i) {
      const double h = f.h[f.index(i, j)];
      worst = std::max({worst, std::abs(h - f.h[f.index(j, i)]), std::abs(h - f.h[f.index(n + 1 - i, j)]),
                        std::abs(h - f.h[f.index(i, n + 1 - j)])});
    }
  }
  return {"symmetry", worst <= 1e-12, worst, 1e-12, "transpose and quadrant mirrors"};
}

CheckResult checkDecomposition(const FaultHooks& hooks) {
  RunConfig cfg;
  cfg.scenario.kind = ScenarioKind::CircularDamBreak;
  cfg.scenario.n_side = 48;
  cfg.scenario.t_end = 1e9;
  cfg.max_steps = 50;
  cfg.audit_every = 0;
  RunOptions opt;
  opt.hooks = hooks;
  const RunReport serial = runSimulation(cfg, opt);
  cfg.px = 2;
  cfg.py = 2;
  const RunReport split = runSimulation(cfg, opt);
  double worst = 0.0;
  std::size_t differing = 0;
  const FieldSet& a = *serial.fields;
  const FieldSet& b = *split.fields;
  for (int j = 1; j <= a.spec.ny; ++j) {
    for (int i = 1; i <= a.spec.nx; ++i) {
      const std::size_t k = a.index(i, j);
      const double d = std::max({std::abs(a.h[k] - b.h[k]), std::abs(a.hu[k] - b.hu[k]), std::abs(a.hv[k] - b.hv[k])});
      if (a.h[k] != b.h[k] || a.hu[k] != b.hu[k] || a.hv[k] != b.hv[k]) ++differing;
      worst = std::max(worst, d);
    }
  }
  return {"decomposition-equivalence", differing == 0, worst, 0.0,
          std::to_string(differing) + " cells differ between 1x1 and 2x2"};
}

CheckResult checkStoker() {
  const ConvergenceTable t = runDambreak1D({100, 200, 400});
  bool shocks = true;
  for (const auto& r : t.rows) shocks = shocks && r.shockWithin(2.0);
  std::ostringstream detail;
  detail << "errors";
  for (const auto& r : t.rows) detail << ' ' << r.l1_error;
  detail << (t.monotone ? "" : " (not decreasing)") << (shocks ? "" : " (shock misplaced)");
  return {"stoker-convergence", t.monotone && shocks && t.fitted_order >= 0.6, t.fitted_order, 0.6, detail.str()};
}

}  // namespace

ValidationSummary cmdValidate(Injection inject, std::ostream& log) {
  FaultHooks hooks;
  hooks.flip_beta_sign = inject == Injection::FlipBeta;
  hooks.rank_dependent_association = inject == Injection::RankOrder;
  ValidationSummary s;
  auto attempt = [&](const char* name, auto&& check) {
    CheckResult r;
    try {
      r = check();
    } catch (const Error& e) {
      r.name = name;
      r.passed = false;
      r.detail = e.what();
    }
    log << (r.passed ? "PASS " : "FAIL ") << r.name << " measured=" << r.measured << " tol=" << r.tolerance << " "
        << r.detail << '\n';
    s.checks.push_back(std::move(r));
  };
  attempt("lake-at-rest", [&] { return checkLakeAtRest(hooks); });
  attempt("symmetry", [&] { return checkSymmetry(hooks); });
  attempt("decomposition-equivalence", [&] { return checkDecomposition(hooks); });
  attempt("stoker-convergence", [] { return checkStoker(); });
  return s;
}

}  // namespace swe
