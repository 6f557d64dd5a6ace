#include "swe/driver.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <exception>
#include <mutex>
#include <thread>

#include <json.hpp>

#include "swe/decomposition.hpp"
#include "swe/error.hpp"
#include "swe/riemann.hpp"
#include "swe/snapshot.hpp"
#include "swe/stoker.hpp"
#include "swe/timestepping.hpp"

namespace swe {

const char* toString(Phase p) {
  switch (p) {
    case Phase::ComputeDt: return "computeDt";
    case Phase::FluxX: return "fluxX";
    case Phase::FluxY: return "fluxY";
    case Phase::DtReduction: return "dtReduction";
    case Phase::NewState: return "newState";
    case Phase::BoundaryConditions: return "boundaryConditions";
    case Phase::HaloExchange: return "haloExchange";
    case Phase::BoundaryAccounting: return "boundaryAccounting";
    case Phase::Output: return "output";
  }
  return "?";
}

namespace {

constexpr int kGatherTag = 1 << 20;

struct KernelTally {
  long calls = 0;
  double seconds = 0.0;
};

struct Shared {
  const RunConfig& cfg;
  const RunOptions& opt;
  const FieldSet& initial;
  Fabric& fabric;
  RunReport& report;  // written by rank 0 only
  std::array<KernelTally, kAllKernels.size()> tallies{};
};

std::size_t slot(KernelId id) { return static_cast<std::size_t>(id); }

/// Every rank sends its interior to rank 0, which assembles the global state.
std::optional<FieldSet> gatherToRoot(const Subdomain& sub, Fabric& fabric, const GridSpec& global) {
  const GridSpec& ls = sub.layout.local;
  const std::size_t n = ls.interiorSize();
  std::vector<double> payload(4 * n);
  std::size_t p = 0;
  for (int j = 1; j <= ls.ny; ++j) {
    for (int i = 1; i <= ls.nx; ++i, ++p) {
      const std::size_t k = sub.fields.index(i, j);
      payload[p] = sub.fields.h[k];
      payload[n + p] = sub.fields.hu[k];
      payload[2 * n + p] = sub.fields.hv[k];
      payload[3 * n + p] = sub.fields.z[k];
    }
  }
  const int rank = sub.layout.rank;
  fabric.send(rank, 0, kGatherTag, std::move(payload));
  if (rank != 0) return std::nullopt;

  FieldSet out(global);
  for (int r = 0; r < fabric.size(); ++r) {
    const SubdomainLayout l = makeLayout(global, sub.layout.px, sub.layout.py, r);
    const std::vector<double> buf = fabric.recv(0, r, kGatherTag);
    const std::size_t m = l.local.interiorSize();
    if (buf.size() != 4 * m) throw CommunicationError("gather payload from rank " + std::to_string(r) + " has wrong size");
    std::size_t q = 0;
    for (int j = 1; j <= l.local.ny; ++j) {
      for (int i = 1; i <= l.local.nx; ++i, ++q) {
        const std::size_t k = out.index(l.gi + i, l.gj + j);
        out.h[k] = buf[q];
        out.hu[k] = buf[m + q];
        out.hv[k] = buf[2 * m + q];
        out.z[k] = buf[3 * m + q];
      }
    }
  }
  return out;
}

/// Net discharge through the reflective walls of this tile, mirror halo and
/// adjacent interior averaged per face. Mirrored values cancel exactly.
double wallInflow(const FieldSet& f, const SubdomainLayout& layout, double dt) {
  const GridSpec& s = f.spec;
  double inflow = 0.0;
  auto face = [&](std::size_t inner, std::size_t halo, const std::vector<double>& q, double sign) {
    inflow += sign * 0.5 * (q[inner] + q[halo]);
  };
  if (!layout.neighborAt(Side::Left))
    for (int j = 1; j <= s.ny; ++j) face(f.index(1, j), f.index(0, j), f.hu, 1.0);
  if (!layout.neighborAt(Side::Right))
    for (int j = 1; j <= s.ny; ++j) face(f.index(s.nx, j), f.index(s.nx + 1, j), f.hu, -1.0);
  if (!layout.neighborAt(Side::Down))
    for (int i = 1; i <= s.nx; ++i) face(f.index(i, 1), f.index(i, 0), f.hv, 1.0);
  if (!layout.neighborAt(Side::Up))
    for (int i = 1; i <= s.nx; ++i) face(f.index(i, s.ny), f.index(i, s.ny + 1), f.hv, -1.0);
  return inflow * s.dx * dt;
}

void rankMain(int rank, Shared& sh) {
  const RunConfig& cfg = sh.cfg;
  const ScenarioConfig& sc = cfg.scenario;
  Fabric& fabric = sh.fabric;
  const bool root = rank == 0;
  const GridSpec& global = sh.initial.spec;

  Subdomain sub{makeLayout(global, cfg.px, cfg.py, rank), {}};
  sub.fields = scatterTile(sh.initial, sub.layout);
  FieldSet next = sub.fields;
  EdgeFluxAccumulator accX(sub.layout.local);
  EdgeFluxAccumulator accY(sub.layout.local);

  SolverOptions sopt;
  sopt.g = sc.g;
  sopt.entropy_fix = cfg.entropy_fix;
  sopt.flip_beta_sign = sh.opt.hooks.flip_beta_sign;

  StepParams params;
  params.dx = global.dx;
  params.rain_rate = sc.rain_rate;
  params.manning_n = sc.manning_n;
  params.g = sc.g;
  params.split_association = sh.opt.hooks.rank_dependent_association && rank % 2 == 1;

  const bool output = !sh.opt.output_dir.empty() || static_cast<bool>(sh.opt.on_snapshot);
  double output_seconds = 0.0;
  long last_snapshot_step = -1;

  auto snapshot = [&](double t, long step) {
    fabric.barrier();
    const double t0 = monotonicSeconds();
    if (auto g = gatherToRoot(sub, fabric, global)) {
      if (!sh.opt.output_dir.empty()) {
        char name[48];
        std::snprintf(name, sizeof name, "snapshot_%06ld.swe", step);
        const auto path = sh.opt.output_dir / name;
        std::filesystem::create_directories(sh.opt.output_dir);
        writeSnapshot(path, *g, t);
        sh.report.snapshot_paths.push_back(path.string());
      }
      if (sh.opt.on_snapshot) sh.opt.on_snapshot(*g, t, step);
    }
    fabric.barrier();
    output_seconds += monotonicSeconds() - t0;
    last_snapshot_step = step;
  };

  auto timed = [&](KernelId id, auto&& fn) {
    fabric.barrier();
    const double t0 = monotonicSeconds();
    fn();
    fabric.barrier();
    if (root) {
      auto& tally = sh.tallies[slot(id)];
      ++tally.calls;
      tally.seconds += monotonicSeconds() - t0;
    }
  };

  std::vector<Phase> phases;
  auto mark = [&](Phase p) {
    if (root && sh.opt.trace) phases.push_back(p);
  };

  applyReflectiveBC(sub.fields, sub.layout);
  exchangeHalos(sub, fabric);

  double t = 0.0;
  long step = 0;
  long io_index = 0;
  double ledger = 0.0;

  fabric.barrier();
  const double loop_start = monotonicSeconds();
  try {
    while (sc.t_end - t > 1e-12 * sc.t_end && (cfg.max_steps == 0 || step < cfg.max_steps)) {
      phases.clear();
      double dt = 0.0;

      mark(Phase::ComputeDt);
      timed(KernelId::ComputeDt, [&] {
        const double bound = localDtBound(sub.fields, sc.cfl, sc.g);
        dt = fabric.allreduceMin(rank, bound);
        if (sh.opt.trace) {
          auto all = fabric.allgather(rank, bound);
          if (root) sh.report.dt_trace.push_back({step, std::move(all), dt});
        }
      });
      if (!std::isfinite(dt)) throw NumericalError("no wet cells");
      dt = std::min(dt, sc.t_end - t);
      const double next_io = cfg.t_io > 0.0 ? cfg.t_io * static_cast<double>(io_index + 1) : sc.t_end;
      if (cfg.t_io > 0.0 && next_io - t > 0.0) dt = std::min(dt, next_io - t);

      mark(Phase::FluxX);
      timed(KernelId::FluxX, [&] { accumulateFluxSweep(sub.fields, Orientation::X, sopt, accX); });
      mark(Phase::FluxY);
      timed(KernelId::FluxY, [&] { accumulateFluxSweep(sub.fields, Orientation::Y, sopt, accY); });

      mark(Phase::DtReduction);
      timed(KernelId::DtReduction, [&] {
        const ReductionResult red = computeTimeStepReduction(sub.fields, accX, accY, dt, global.dx,
                                                             sc.rain_rate, cfg.max_reductions);
        const double reduced = fabric.allreduceMin(rank, red.dt);
        if (root) {
          for (double d = dt; d > reduced; d *= 0.5) ++sh.report.dt_reductions;
        }
        dt = reduced;
      });

      mark(Phase::NewState);
      UpdateStatus status;
      timed(KernelId::NewState, [&] {
        params.dt = dt;
        status = computeNewState(sub.fields, accX, accY, params, next);
      });
      if (status.needs_reduction) {
        throw NumericalError("negative depth " + std::to_string(status.worst_depth) + " at local cell (" +
                             std::to_string(status.worst_i) + ", " + std::to_string(status.worst_j) +
                             ") after the timestep reduction");
      }
      std::swap(sub.fields, next);
      t += dt;
      ++step;

      mark(Phase::BoundaryConditions);
      applyReflectiveBC(sub.fields, sub.layout);

      mark(Phase::HaloExchange);
      exchangeHalos(sub, fabric);

      mark(Phase::BoundaryAccounting);
      const double inflow = wallInflow(sub.fields, sub.layout, dt);
      if (inflow != 0.0) throw NumericalError("reflective walls exchanged mass: " + std::to_string(inflow));
      ledger += inflow;
      if (cfg.audit_every > 0 && step % cfg.audit_every == 0) {
        const double volume = fabric.allreduceSum(rank, sub.fields.interiorVolume());
        if (root) sh.report.mass_audit.push_back({step, t, volume});
      }

      mark(Phase::Output);
      if (output) {
        const bool io_due = cfg.t_io > 0.0 && next_io - t <= 1e-12 * sc.t_end;
        const bool at_end = sc.t_end - t <= 1e-12 * sc.t_end;
        if (io_due) ++io_index;
        if (io_due || at_end) snapshot(t, step);
      }
      if (root && sh.opt.trace) sh.report.phase_trace.push_back(phases);
    }
    if (output && last_snapshot_step != step) snapshot(t, step);
  } catch (const NumericalError& e) {
    if (e.step() >= 0) throw;
    throw NumericalError(e.what(), step, rank);
  }
  fabric.barrier();
  const double loop_end = monotonicSeconds();

  const double total_inflow = fabric.allreduceSum(rank, ledger);
  std::optional<FieldSet> gathered;
  if (sh.opt.gather_fields) gathered = gatherToRoot(sub, fabric, global);

  if (root) {
    RunReport& r = sh.report;
    r.steps = step;
    r.t_final = t;
    r.wall_time_s = (loop_end - loop_start) - output_seconds;
    r.boundary_inflow = total_inflow;
    if (gathered) r.fields = std::move(*gathered);
  }
}

}  // namespace

RunReport runSimulation(const RunConfig& cfg, const RunOptions& options) {
  cfg.scenario.validate();
  if (cfg.px < 1 || cfg.py < 1) throw ConfigError("rank grid dimensions must be >= 1");
  if (cfg.max_reductions < 0) throw ConfigError("max_reductions must be >= 0");

  const FieldSet initial = options.initial ? *options.initial : makeInitialState(cfg.scenario);
  initial.spec.validate();
  // Fails early when an axis has more ranks than cells.
  for (int r = 0; r < cfg.px * cfg.py; ++r) (void)makeLayout(initial.spec, cfg.px, cfg.py, r);

  const int ranks = cfg.px * cfg.py;
  Fabric fabric(ranks);
  RunReport report;
  report.px = cfg.px;
  report.py = cfg.py;
  report.initial_volume = initial.interiorVolume();
  Shared shared{cfg, options, initial, fabric, report, {}};

  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(ranks));
  auto worker = [&](int rank) {
    try {
      rankMain(rank, shared);
    } catch (const std::exception& e) {
      errors[static_cast<std::size_t>(rank)] = std::current_exception();
      fabric.abort("rank " + std::to_string(rank) + ": " + e.what());
    }
  };
  if (ranks == 1) {
    worker(0);
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(static_cast<std::size_t>(ranks));
    for (int r = 0; r < ranks; ++r) pool.emplace_back(worker, r);
  }

  // Report the root cause rather than the peers that were woken by the abort.
  std::exception_ptr first;
  for (const auto& e : errors) {
    if (!e) continue;
    try {
      std::rethrow_exception(e);
    } catch (const CommunicationError&) {
      if (!first) first = e;
    } catch (...) {
      std::rethrow_exception(e);
    }
  }
  if (first) std::rethrow_exception(first);

  const GridSpec& spec = initial.spec;
  for (KernelId id : kAllKernels) {
    const KernelTally& tally = shared.tallies[slot(id)];
    if (tally.calls == 0 || !(tally.seconds > 0.0)) continue;
    const KernelCostModel& m = costModel(id);
    const double calls = static_cast<double>(tally.calls);
    report.kernels.push_back(
        makeSample(kernelName(id), tally.calls, tally.seconds, calls * m.flops(spec), calls * m.bytes(spec)));
  }
  report.fabric = fabric.stats();
  return report;
}

std::string runSummaryJson(const RunReport& r) {
  nlohmann::ordered_json j;
  j["steps"] = r.steps;
  j["t_final"] = r.t_final;
  j["wall_time_s"] = r.wall_time_s;
  j["ranks"] = {r.px, r.py};
  nlohmann::ordered_json kernels = nlohmann::ordered_json::object();
  for (const auto& k : r.kernels) {
    kernels[k.kernel] = {{"calls", k.calls}, {"total_s", k.total_s}, {"flops", k.flops}, {"bytes", k.bytes}};
  }
  j["kernels"] = kernels;
  if (!r.mass_audit.empty()) {
    j["volume_initial"] = r.initial_volume;
    j["volume_final"] = r.mass_audit.back().volume;
  }
  j["dt_reductions"] = r.dt_reductions;
  j["boundary_inflow"] = r.boundary_inflow;
  j["fabric"] = {{"messages", r.fabric.messages}, {"bytes", r.fabric.bytes}, {"collectives", r.fabric.collectives}};
  j["snapshots"] = r.snapshot_paths;
  return j.dump(2);
}

double stokerL1Error(const FieldSet& f, double h_left, double h_right, double g, double t) {
  const StokerSolution exact(h_left, h_right, g);
  const GridSpec& s = f.spec;
  double err = 0.0;
  for (int j = 1; j <= s.ny; ++j) {
    for (int i = 1; i <= s.nx; ++i) {
      err += std::abs(f.h[f.index(i, j)] - exact.depth(s.cellCenterX(i), t));
    }
  }
  return err * s.dx / static_cast<double>(s.ny);
}

double numericalShockPosition(const FieldSet& f, double h_middle, double h_right) {
  const GridSpec& s = f.spec;
  const double level = 0.5 * (h_middle + h_right);
  for (int i = s.nx; i >= 1; --i) {
    const double hi = f.h[f.index(i, 1)];
    if (hi <= level) continue;
    if (i == s.nx) return s.cellCenterX(i);
    const double hn = f.h[f.index(i + 1, 1)];
    return s.cellCenterX(i) + (hi - level) / (hi - hn) * s.dx;
  }
  return s.cellCenterX(1);
}

ConvergenceTable runDambreak1D(const std::vector<int>& resolutions, const DamBreakStudy& study) {
  if (resolutions.size() < 3) throw ConfigError("convergence study needs at least three resolutions");
  for (std::size_t k = 1; k < resolutions.size(); ++k) {
    if (resolutions[k] <= resolutions[k - 1]) throw ConfigError("resolutions must be strictly increasing");
  }
  const StokerSolution exact(study.h_left, study.h_right, study.g);
  if (std::abs(exact.shockPosition(study.t_end)) >= 0.5 * study.length ||
      std::sqrt(study.g * study.h_left) * study.t_end >= 0.5 * study.length) {
    throw ConfigError("dam-break waves leave the domain before t_end");
  }

  ConvergenceTable table;
  for (int n : resolutions) {
    RunConfig cfg;
    cfg.scenario.kind = ScenarioKind::DamBreak1D;
    cfg.scenario.n_side = n;
    cfg.scenario.dx = study.length / n;
    cfg.scenario.t_end = study.t_end;
    cfg.scenario.g = study.g;
    cfg.scenario.cfl = study.cfl;
    cfg.scenario.h_high = study.h_left;
    cfg.scenario.h_low = study.h_right;
    cfg.audit_every = 0;
    const RunReport rep = runSimulation(cfg);

    ConvergenceRow row;
    row.cells = n;
    row.dx = cfg.scenario.dx;
    row.steps = rep.steps;
    row.l1_error = stokerL1Error(*rep.fields, study.h_left, study.h_right, study.g, rep.t_final);
    row.shock_numeric = numericalShockPosition(*rep.fields, exact.middleDepth(), study.h_right);
    row.shock_exact = exact.shockPosition(rep.t_final);
    table.rows.push_back(row);
  }

  table.monotone = true;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double m = static_cast<double>(table.rows.size());
  for (std::size_t k = 0; k < table.rows.size(); ++k) {
    const auto& r = table.rows[k];
    const double lx = std::log(r.dx);
    const double ly = std::log(r.l1_error);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
    if (k > 0) {
      const auto& p = table.rows[k - 1];
      table.pairwise_order.push_back(std::log(p.l1_error / r.l1_error) / std::log(p.dx / r.dx));
      if (!(r.l1_error < p.l1_error)) table.monotone = false;
    }
  }
  table.fitted_order = (m * sxy - sx * sy) / (m * sxx - sx * sx);
  return table;
}

}  // namespace swe
