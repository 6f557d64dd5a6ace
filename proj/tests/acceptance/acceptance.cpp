// Acceptance runner. With no arguments every criterion runs; otherwise only
// the listed numbers. Prints one PASS/FAIL line per criterion and exits
// nonzero when any selected criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "support/cost_oracle.hpp"
#include "support/oracles.hpp"
#include "swe/commands.hpp"
#include "swe/decomposition.hpp"
#include "swe/driver.hpp"
#include "swe/perf.hpp"
#include "swe/ppmetrics.hpp"
#include "swe/timestepping.hpp"

using namespace swe;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double seconds(auto&& fn) {
  const auto t0 = std::chrono::steady_clock::now();
  fn();
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

RunConfig stepped(ScenarioKind kind, int n, long steps) {
  RunConfig cfg;
  cfg.scenario.kind = kind;
  cfg.scenario.n_side = n;
  cfg.scenario.t_end = 1e9;
  cfg.max_steps = steps;
  return cfg;
}

Outcome wellBalanced() {
  const RunConfig cfg = stepped(ScenarioKind::LakeAtRest, 200, 1000);
  const FieldSet init = makeInitialState(cfg.scenario);
  RunReport r;
  const double wall = seconds([&] { r = runSimulation(cfg); });
  const FieldSet& f = *r.fields;
  double dev = 0.0;
  for (int j = 1; j <= f.spec.ny; ++j) {
    for (int i = 1; i <= f.spec.nx; ++i) {
      const std::size_t k = f.index(i, j);
      dev = std::max(dev, std::fabs((f.h[k] + f.z[k]) - (init.h[k] + init.z[k])));
    }
  }
  return {r.steps == 1000 && dev <= 1e-12 && wall < 30.0,
          fmt("steps=%ld max|d(h+z)|=%.3e (tol 1e-12) runtime=%.2fs (limit 30s)", r.steps, dev, wall)};
}

Outcome massConservation() {
  RunConfig cfg = stepped(ScenarioKind::CircularDamBreak, 200, 1000);
  const RunReport r = runSimulation(cfg);
  double drift = 0.0;
  for (const auto& a : r.mass_audit) drift = std::max(drift, std::fabs(a.volume - r.initial_volume) / r.initial_volume);
  return {r.steps >= 1000 && drift <= 1e-10 && !r.mass_audit.empty(),
          fmt("steps=%ld audits=%zu max relative drift=%.3e (tol 1e-10)", r.steps, r.mass_audit.size(), drift)};
}

Outcome symmetry() {
  RunConfig cfg;
  cfg.scenario.n_side = 100;
  cfg.scenario.t_end = 2.0;
  cfg.t_io = 0.2;
  cfg.px = 2;
  cfg.py = 2;
  int snapshots = 0;
  double worst = 0.0;
  RunOptions opt;
  opt.on_snapshot = [&](const FieldSet& f, double, long) {
    ++snapshots;
    const int n = f.spec.nx;
    for (int j = 1; j <= n; ++j) {
      for (int i = 1; i <= n; ++i) {
        const double h = f.h[f.index(i, j)];
        worst = std::max(worst, std::fabs(h - f.h[f.index(j, i)]));
        worst = std::max(worst, std::fabs(h - f.h[f.index(n + 1 - i, j)]));
        worst = std::max(worst, std::fabs(h - f.h[f.index(i, n + 1 - j)]));
      }
    }
  };
  runSimulation(cfg, opt);
  return {snapshots >= 10 && worst <= 1e-12, fmt("snapshots=%d max transpose/mirror difference=%.3e (tol 1e-12)", snapshots, worst)};
}

Outcome decomposition() {
  const RunConfig base = stepped(ScenarioKind::CircularDamBreak, 128, 200);
  const RunReport ref = runSimulation(base);
  std::ostringstream detail;
  bool ok = true;
  for (auto [px, py] : {std::pair{2, 2}, std::pair{4, 1}}) {
    RunConfig cfg = base;
    cfg.px = px;
    cfg.py = py;
    const RunReport r = runSimulation(cfg);
    long differ = 0;
    double maxdiff = 0.0;
    for (std::size_t k = 0; k < ref.fields->h.size(); ++k) {
      const double d = std::max({std::fabs(ref.fields->h[k] - r.fields->h[k]),
                                 std::fabs(ref.fields->hu[k] - r.fields->hu[k]),
                                 std::fabs(ref.fields->hv[k] - r.fields->hv[k])});
      if (ref.fields->h[k] != r.fields->h[k] || ref.fields->hu[k] != r.fields->hu[k] ||
          ref.fields->hv[k] != r.fields->hv[k]) {
        ++differ;
      }
      maxdiff = std::max(maxdiff, d);
    }
    ok = ok && differ == 0 && r.steps == ref.steps;
    detail << "(" << px << "," << py << ") vs (1,1): " << differ << " cells differ, max " << maxdiff << "; ";
  }
  detail << "steps=" << ref.steps << ", bitwise";
  return {ok, detail.str()};
}

Outcome stoker() {
  const ConvergenceTable t = runDambreak1D({200, 400, 800, 1600});
  bool strictly = true;
  for (std::size_t k = 1; k < t.rows.size(); ++k) strictly = strictly && t.rows[k].l1_error < t.rows[k - 1].l1_error;
  bool shocks = true;
  std::ostringstream detail;
  detail << "L1 ";
  for (const auto& r : t.rows) {
    shocks = shocks && r.shockWithin(2.0);
    detail << r.cells << ":" << r.l1_error << " ";
  }
  double worst_shock = 0.0;
  for (const auto& r : t.rows) worst_shock = std::max(worst_shock, std::fabs(r.shock_numeric - r.shock_exact) / r.dx);
  detail << "order=" << t.fitted_order << " (min 0.6) worst shock offset=" << worst_shock << " dx (max 2)";
  return {strictly && t.fitted_order >= 0.6 && shocks, detail.str()};
}

Outcome cflValue() {
  FieldSet f(GridSpec{16, 16, 0.5, 0.0, 0.0});
  std::fill(f.h.begin(), f.h.end(), 1.0);
  const double dt = computeDt(f, 0.45, 9.81);
  const double expected = oracle::stillWaterDt(1.0, 0.5, 0.45, 9.81);
  const double rel = std::fabs(dt - expected) / expected;
  return {rel <= 1e-12, fmt("dt=%.17g closed form cfl*dx/sqrt(g h)=%.17g relative error %.2e (tol 1e-12)", dt,
                            expected, rel)};
}

Outcome metricAlgebra() {
  bool ok = true;
  const std::vector<double> four{0.2, 0.4, 0.6, 0.8};
  ok = ok && pp2(four) == 0.5 && std::fabs(pp1(four) - 0.384) <= 1e-3;
  const std::vector<double> half{0.5, 0.5};
  ok = ok && std::fabs(pp1(half) - 0.5) < 1e-15 && pp2(half) == 0.5;
  const std::vector<double> zero{1.0, 0.0};
  ok = ok && pp1(zero) == 0.0 && pp2(zero) == 0.5;
  ok = ok && pp2(std::vector<double>{}) == 0.0;
  oracle::Gen gen(7);
  long violations = 0;
  for (int trial = 0; trial < 10000; ++trial) {
    std::vector<double> rs(static_cast<std::size_t>(gen.integer(1, 10)));
    for (double& r : rs) r = gen.uniform(0.0, 1.0);
    if (gen.coin(0.05)) rs[0] = 0.0;
    const double h = pp1(rs);
    const double a = pp2(rs);
    if (!(h <= a * (1.0 + 1e-15)) || h < 0.0 || a > 1.0) ++violations;
  }
  return {ok && violations == 0,
          fmt("PP1(0.2,0.4,0.6,0.8)=%.6f PP2=%.6f; AM-HM violations in 10000 vectors: %ld", pp1(four), pp2(four),
              violations)};
}

Outcome roofline() {
  const PlatformPeaks juwels{"JUWELS BOOSTER", 9494.71e9, 1258.40e9, PeakSource::Supplied};
  const double at = juwels.aThresh();
  const RooflinePoint fixed = rooflineNormalize(juwels.p_peak, at, juwels);
  bool ok = std::fabs(at - 7.5450) <= 1e-4 && fixed.p_norm == 1.0 && fixed.a_norm == 1.0;

  PeakProbeConfig probe;
  probe.sizes = {1u << 12, 1u << 16, 1u << 20};
  probe.repetitions = 3;
  probe.elements_per_trial = 1u << 22;
  const PeakEstimate host = estimatePeaks(probe);
  const RunReport r = runSimulation(stepped(ScenarioKind::CircularDamBreak, 256, 20));
  double worst = 0.0;
  for (const KernelSample& s : r.kernels) {
    const RooflinePoint p = rooflineNormalize(s, host.peaks);
    worst = std::max(worst, p.p_norm / std::max(p.a_norm, 1.0));
  }
  ok = ok && worst <= 1.05;
  return {ok, fmt("a_thresh=%.6f fixed point=(%g,%g) host peaks %.2f GFLOP/s %.2f GB/s, worst p_norm/max(a_norm,1)=%.3f "
                  "(max 1.05)",
                  at, fixed.p_norm, fixed.a_norm, host.peaks.p_peak / 1e9, host.peaks.b_peak / 1e9, worst)};
}

Outcome strongScaling() {
  RunConfig cfg = stepped(ScenarioKind::CircularDamBreak, 2048, 10);
  std::ostringstream log;
  const auto dir = std::filesystem::temp_directory_path() / "swe_acceptance_strong";
  const ScalingResult res = cmdScaleStrong(cfg, {1, 2, 4, 8}, 3, dir, log);
  std::filesystem::remove_all(dir);
  const double s8 = res.rows.back().speedup;
  std::ostringstream detail;
  detail << "cores=" << std::thread::hardware_concurrency() << " median times";
  for (const auto& row : res.rows) detail << " w" << row.workers << "=" << row.time_s << "s";
  detail << " speedup(8)=" << s8 << " (min 4.0) monotone=" << (res.monotone ? "yes" : "no");
  return {s8 >= 4.0 && res.monotone, detail.str()};
}

Outcome costModelFidelity() {
  const RunReport r = runSimulation(stepped(ScenarioKind::CircularDamBreak, 32, 20));
  const oracle::MeasuredCosts m = oracle::measureCosts(*r.fields);
  bool ok = true;
  std::ostringstream detail;
  for (KernelId id : kAllKernels) {
    const double model = costModel(id).flops_per_item;
    const double got = m.of(id);
    const double rel = std::fabs(model - got) / got;
    ok = ok && rel <= 0.05;
    detail << kernelName(id) << " model=" << model << " counted=" << got << " ";
  }
  detail << "(tol 5%)";
  return {ok, detail.str()};
}

struct Criterion {
  int id;
  const char* name;
  std::function<Outcome()> run;
};

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> all{
      {1, "well-balancing", wellBalanced},
      {2, "mass conservation", massConservation},
      {3, "radial and mirror symmetry", symmetry},
      {4, "decomposition equivalence", decomposition},
      {5, "Stoker dam break", stoker},
      {6, "CFL timestep value", cflValue},
      {7, "metric algebra", metricAlgebra},
      {8, "roofline normalisation", roofline},
      {9, "strong scaling trend", strongScaling},
      {10, "cost-model fidelity", costModelFidelity},
  };
  std::vector<int> selected;
  for (int a = 1; a < argc; ++a) selected.push_back(std::atoi(argv[a]));
  bool all_pass = true;
  for (const Criterion& c : all) {
    if (!selected.empty() && std::find(selected.begin(), selected.end(), c.id) == selected.end()) continue;
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("threw: ") + e.what()};
    }
    all_pass = all_pass && o.pass;
    std::cout << (o.pass ? "PASS" : "FAIL") << " criterion " << c.id << " (" << c.name << "): " << o.detail
              << std::endl;
  }
  return all_pass ? 0 : 1;
}
