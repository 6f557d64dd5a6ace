#pragma once

#include <limits>
#include <span>

#include "swe/detail/kernels.hpp"
#include "swe/grid.hpp"
#include "swe/riemann.hpp"

namespace swe {

/// Depths in (-kNegativeDepthTolerance, 0) are snapped to zero; anything
/// lower asks for a smaller timestep.
inline constexpr double kNegativeDepthTolerance = 1e-14;

struct StepControl {
  double dt = 0.0;
  double cfl = 0.45;
  double t_now = 0.0;
  int reductions_applied = 0;
};

/// cfl * min over wet interior cells of dx / max(|u| + c, |v| + c), or +inf
/// when this grid has no wet interior cell. Used as the per-rank part of the
/// global reduction.
double localDtBound(const FieldSet& fields, double cfl, double g);

/// Same as localDtBound but throws NumericalError("no wet cells") when the
/// grid is completely dry.
double computeDt(const FieldSet& fields, double cfl, double g);

struct StepParams {
  double dt = 0.0;
  double dx = 0.5;
  double rain_rate = 0.0;
  double manning_n = 0.0;
  double g = 9.81;
  /// Mutation canary: subtract the two sweeps one after the other instead of
  /// their sum, which changes rounding.
  bool split_association = false;
};

struct UpdateStatus {
  bool needs_reduction = false;
  int worst_i = -1;
  int worst_j = -1;
  double worst_depth = 0.0;
};

/// Forward Euler update of the interior of `out` from `in`:
/// U - dt/dx (accX + accY), then rain, then Manning friction when enabled.
/// Halo cells of `out` are left untouched. A depth below the negative
/// tolerance is reported through the status instead of thrown.
UpdateStatus computeNewState(const FieldSet& in, const EdgeFluxAccumulator& accX,
                             const EdgeFluxAccumulator& accY, const StepParams& params, FieldSet& out);

struct ReductionResult {
  double dt = 0.0;
  int reductions = 0;
};

/// Largest dt / 2^k, k = 0..max_reductions, whose trial update keeps every
/// interior depth above the negative tolerance. Throws NumericalError naming
/// the worst cell when even k = max_reductions is not enough.
ReductionResult computeTimeStepReduction(const FieldSet& fields, const EdgeFluxAccumulator& accX,
                                         const EdgeFluxAccumulator& accY, double dt, double dx,
                                         double rain_rate = 0.0, int max_reductions = 10);

namespace detail {

template <class Real>
Real dtBoundSweep(const GridSpec& spec, ConstFields<Real> f, double g, bool& any_wet) {
  Real best = Real(std::numeric_limits<double>::infinity());
  any_wet = false;
  for (int j = 1; j <= spec.ny; ++j) {
    const std::size_t base = flatIndex(0, j, spec);
    for (int i = 1; i <= spec.nx; ++i) {
      const std::size_t k = base + static_cast<std::size_t>(i);
      if (!isWet(f.h[k])) continue;
      any_wet = true;
      const Real bound = cellDtBound(f.h[k], f.hu[k], f.hv[k], g, spec.dx);
      if (bound < best) best = bound;
    }
  }
  return best;
}

template <class Real>
struct ConstAcc {
  std::span<const Real> mass, mx, my;
};

template <class Real>
struct MutableFields {
  std::span<Real> h, hu, hv;
};

template <class Real>
UpdateStatus newStateSweep(const GridSpec& spec, ConstFields<Real> in, ConstAcc<Real> ax, ConstAcc<Real> ay,
                           const Real& k, const Real& rain_dt, bool split_association, MutableFields<Real> out) {
  UpdateStatus status;
  for (int j = 1; j <= spec.ny; ++j) {
    const std::size_t base = flatIndex(0, j, spec);
    for (int i = 1; i <= spec.nx; ++i) {
      const std::size_t c = base + static_cast<std::size_t>(i);
      Real h, hu, hv;
      if (split_association) {
        h = ((in.h[c] - k * ax.mass[c]) - k * ay.mass[c]) + rain_dt;
        hu = (in.hu[c] - k * ax.mx[c]) - k * ay.mx[c];
        hv = (in.hv[c] - k * ax.my[c]) - k * ay.my[c];
      } else {
        h = updatedDepth(in.h[c], ax.mass[c], ay.mass[c], k, rain_dt);
        hu = in.hu[c] - k * (ax.mx[c] + ay.mx[c]);
        hv = in.hv[c] - k * (ax.my[c] + ay.my[c]);
      }
      if (h < 0.0) {
        if (h < -kNegativeDepthTolerance) {
          if (!status.needs_reduction || h < status.worst_depth) {
            status.worst_depth = static_cast<double>(h);
            status.worst_i = i;
            status.worst_j = j;
          }
          status.needs_reduction = true;
        }
        h = Real(0.0);
      }
      if (!isWet(h)) {
        hu = Real(0.0);
        hv = Real(0.0);
      }
      out.h[c] = h;
      out.hu[c] = hu;
      out.hv[c] = hv;
    }
  }
  return status;
}

/// Smallest trial depth over the interior, and where it occurs.
template <class Real>
Real trialMinDepth(const GridSpec& spec, std::span<const Real> h, std::span<const Real> ax,
                   std::span<const Real> ay, const Real& k, const Real& rain_dt, int& wi, int& wj) {
  Real lo = Real(std::numeric_limits<double>::infinity());
  for (int j = 1; j <= spec.ny; ++j) {
    const std::size_t base = flatIndex(0, j, spec);
    for (int i = 1; i <= spec.nx; ++i) {
      const std::size_t c = base + static_cast<std::size_t>(i);
      const Real trial = updatedDepth(h[c], ax[c], ay[c], k, rain_dt);
      if (trial < lo) {
        lo = trial;
        wi = i;
        wj = j;
      }
    }
  }
  return lo;
}

}  // namespace detail
}  // namespace swe
