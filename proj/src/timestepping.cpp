#include "swe/timestepping.hpp"

#include <cmath>
#include <sstream>

#include "swe/error.hpp"

namespace swe {
namespace {

detail::ConstFields<double> view(const FieldSet& f) { return {f.h, f.hu, f.hv, f.z}; }

detail::ConstAcc<double> view(const EdgeFluxAccumulator& a) { return {a.mass, a.mx, a.my}; }

void checkShapes(const FieldSet& f, const EdgeFluxAccumulator& ax, const EdgeFluxAccumulator& ay) {
  const std::size_t n = f.spec.paddedSize();
  if (ax.mass.size() != n || ay.mass.size() != n) {
    throw ConfigError("flux accumulators do not match the field grid");
  }
}

void applyManning(FieldSet& out, const StepParams& p) {
  const double n2 = p.manning_n * p.manning_n;
  const GridSpec& s = out.spec;
  for (int j = 1; j <= s.ny; ++j) {
    for (int i = 1; i <= s.nx; ++i) {
      const std::size_t c = out.index(i, j);
      const double h = out.h[c];
      if (!detail::isWet(h)) continue;
      const double u = out.hu[c] / h;
      const double v = out.hv[c] / h;
      const double speed = std::sqrt(u * u + v * v);
      const double factor = 1.0 / (1.0 + p.dt * p.g * n2 * speed / std::pow(h, 4.0 / 3.0));
      out.hu[c] *= factor;
      out.hv[c] *= factor;
    }
  }
}

}  // namespace

double localDtBound(const FieldSet& fields, double cfl, double g) {
  bool any_wet = false;
  const double bound = detail::dtBoundSweep<double>(fields.spec, view(fields), g, any_wet);
  return any_wet ? cfl * bound : std::numeric_limits<double>::infinity();
}

double computeDt(const FieldSet& fields, double cfl, double g) {
  const double dt = localDtBound(fields, cfl, g);
  if (!std::isfinite(dt)) throw NumericalError("no wet cells");
  return dt;
}

UpdateStatus computeNewState(const FieldSet& in, const EdgeFluxAccumulator& accX,
                             const EdgeFluxAccumulator& accY, const StepParams& params, FieldSet& out) {
  checkShapes(in, accX, accY);
  if (out.h.size() != in.h.size()) out = in;
  const double k = params.dt / params.dx;
  const double rain_dt = params.rain_rate * params.dt;
  const UpdateStatus status = detail::newStateSweep<double>(
      in.spec, view(in), view(accX), view(accY), k, rain_dt, params.split_association, {out.h, out.hu, out.hv});
  if (params.manning_n > 0.0) applyManning(out, params);
  return status;
}

ReductionResult computeTimeStepReduction(const FieldSet& fields, const EdgeFluxAccumulator& accX,
                                         const EdgeFluxAccumulator& accY, double dt, double dx,
                                         double rain_rate, int max_reductions) {
  checkShapes(fields, accX, accY);
  double trial = dt;
  int wi = -1;
  int wj = -1;
  double worst = 0.0;
  for (int k = 0; k <= max_reductions; ++k) {
    worst = detail::trialMinDepth<double>(fields.spec, fields.h, accX.mass, accY.mass, trial / dx,
                                          rain_rate * trial, wi, wj);
    if (worst >= -kNegativeDepthTolerance) return {trial, k};
    trial *= 0.5;
  }
  std::ostringstream msg;
  msg << "timestep reduction failed after " << max_reductions << " halvings: cell (" << wi << "," << wj
      << ") still reaches depth " << worst;
  throw NumericalError(msg.str());
}

}  // namespace swe
