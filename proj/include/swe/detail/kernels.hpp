#pragma once

// Point kernels of the solver, templated on the scalar type so that the same
// code runs on double in production and on an operation-counting type when
// the cost models are audited. Real values only see +, -, *, /, sqrt,
// negation, abs and comparisons.

#include <array>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <type_traits>

#include "swe/error.hpp"
#include "swe/grid.hpp"

namespace swe {

enum class Orientation { X, Y };

struct SolverOptions {
  double g = 9.81;
  bool entropy_fix = true;
  /// Mutation canary: flips the sign of the bed source strength.
  bool flip_beta_sign = false;
};

namespace detail {

/// One side of an edge in edge-normal coordinates.
template <class Real>
struct EdgeState {
  Real h;
  Real qn;  ///< normal unit discharge
  Real qt;  ///< tangential unit discharge
  Real z;
};

template <class Real>
struct Roe {
  Real un, ut, c;
};

template <class Real>
bool isWet(const Real& h) {
  return h > kDryDepth;
}

template <class Real>
Roe<Real> roeAverages(const EdgeState<Real>& L, const EdgeState<Real>& R, double g) {
  using std::sqrt;
  const Real sL = sqrt(L.h);
  const Real sR = sqrt(R.h);
  const Real uL = isWet(L.h) ? L.qn / L.h : Real(0.0);
  const Real vL = isWet(L.h) ? L.qt / L.h : Real(0.0);
  const Real uR = isWet(R.h) ? R.qn / R.h : Real(0.0);
  const Real vR = isWet(R.h) ? R.qt / R.h : Real(0.0);
  const Real denom = sL + sR;
  const Real un = (sL * uL + sR * uR) / denom;
  const Real ut = (sL * vL + sR * vR) / denom;
  const Real hbar = 0.5 * (L.h + R.h);
  const Real c = sqrt(g * hbar);
  return {un, ut, c};
}

/// Eigen-decomposition of one edge jump. Index m = 0, 1, 2 is the wave
/// family with speeds un - c, un, un + c.
template <class Real>
struct Waves {
  Roe<Real> roe;
  std::array<Real, 3> lambda;
  std::array<Real, 3> alpha;
  std::array<Real, 3> beta;
};

/// dz is passed separately so that wet/dry edges can limit the bed step.
template <class Real>
Waves<Real> decompose(const EdgeState<Real>& L, const EdgeState<Real>& R, const Real& dz,
                      const SolverOptions& opt) {
  Waves<Real> w{roeAverages(L, R, opt.g), {}, {}, {}};
  const Real& un = w.roe.un;
  const Real& ut = w.roe.ut;
  const Real& c = w.roe.c;
  const Real dh = R.h - L.h;
  const Real dqn = R.qn - L.qn;
  const Real dqt = R.qt - L.qt;

  w.lambda = {un - c, un, un + c};

  const Real two_c = 2.0 * c;
  const Real t = (dqn - un * dh) / two_c;
  const Real half_dh = 0.5 * dh;
  w.alpha = {half_dh - t, dqt - ut * dh, half_dh + t};

  // g*hbar*dz/(2c) with c^2 = g*hbar; this form cancels exactly against
  // lambda*alpha for a surface at rest.
  Real b = 0.5 * c * dz;
  if (opt.flip_beta_sign) b = -b;
  w.beta = {b, Real(0.0), -b};
  return w;
}

/// Contributions of one edge to its two cells, in (mass, normal, tangential)
/// components. The cell update is U -= dt/dx * (sum of contributions).
template <class Real>
struct EdgeUpdate {
  std::array<Real, 3> left{Real(0.0), Real(0.0), Real(0.0)};
  std::array<Real, 3> right{Real(0.0), Real(0.0), Real(0.0)};
  bool left_receives = true;
  bool right_receives = true;
  bool active = true;
};

template <class Real>
void addWave(std::array<Real, 3>& side, const Real& s, int m, const Waves<Real>& w) {
  if (m == 1) {
    side[2] = side[2] + s;
    return;
  }
  side[0] = side[0] + s;
  side[1] = side[1] + s * w.lambda[m];
  side[2] = side[2] + s * w.roe.ut;
}

/// Upwinds the three waves onto the left/right cells, with a Harten-Hyman
/// split for transonic rarefactions in the acoustic families.
template <class Real>
void distributeWaves(const EdgeState<Real>& L, const EdgeState<Real>& R, const Waves<Real>& w,
                     const SolverOptions& opt, EdgeUpdate<Real>& out) {
  using std::sqrt;
  bool transonic[3] = {false, false, false};
  Real lamL[3] = {Real(0.0), Real(0.0), Real(0.0)};
  Real lamR[3] = {Real(0.0), Real(0.0), Real(0.0)};
  if (opt.entropy_fix && isWet(L.h) && isWet(R.h)) {
    const Real uL = L.qn / L.h;
    const Real uR = R.qn / R.h;
    const Real cL = sqrt(opt.g * L.h);
    const Real cR = sqrt(opt.g * R.h);
    lamL[0] = uL - cL;
    lamR[0] = uR - cR;
    lamL[2] = uL + cL;
    lamR[2] = uR + cR;
    transonic[0] = lamL[0] < 0.0 && lamR[0] > 0.0;
    transonic[2] = lamL[2] < 0.0 && lamR[2] > 0.0;
  }

  // Contributions are collected first and summed afterwards: the left cell
  // in increasing and the right cell in decreasing wave order, so reflecting
  // the edge reproduces every sum bit for bit.
  Real toL[3] = {Real(0.0), Real(0.0), Real(0.0)};
  Real toR[3] = {Real(0.0), Real(0.0), Real(0.0)};
  bool hasL[3] = {false, false, false};
  bool hasR[3] = {false, false, false};
  for (int m = 0; m < 3; ++m) {
    const Real& lam = w.lambda[m];
    const Real& a = w.alpha[m];
    const Real& b = w.beta[m];
    if (transonic[m]) {
      const Real span = lamR[m] - lamL[m];
      const Real lam_minus = lamL[m] * (lamR[m] - lam) / span;
      const Real lam_plus = lamR[m] * (lam - lamL[m]) / span;
      // The source part is not split; it follows the sign of the Roe speed.
      const bool source_left = lam < 0.0;
      toL[m] = source_left ? lam_minus * a - b : lam_minus * a;
      toR[m] = source_left ? lam_plus * a : lam_plus * a - b;
      hasL[m] = hasR[m] = true;
      continue;
    }
    const Real s = lam * a - b;
    if (lam < 0.0) {
      toL[m] = s;
      hasL[m] = true;
    } else if (lam > 0.0) {
      toR[m] = s;
      hasR[m] = true;
    } else {
      toL[m] = toR[m] = 0.5 * s;
      hasL[m] = hasR[m] = true;
    }
  }
  for (int m = 0; m < 3; ++m) {
    if (hasL[m]) addWave(out.left, toL[m], m, w);
  }
  for (int m = 2; m >= 0; --m) {
    if (hasR[m]) addWave(out.right, toR[m], m, w);
  }
}

/// Full edge treatment including wet/dry handling:
///  - both sides dry: no contribution;
///  - one side dry and its bed at or above the wet surface: the edge is a
///    wall for the wet cell (mirror state), the dry cell receives nothing;
///  - otherwise the jump is decomposed with the bed step limited to the wet
///    depth; the dry cell may only gain mass and receives no momentum. If it
///    would lose mass the edge falls back to the wall treatment.
template <class Real>
EdgeUpdate<Real> edgeUpdate(const EdgeState<Real>& L, const EdgeState<Real>& R, const SolverOptions& opt) {
  EdgeUpdate<Real> out;
  const bool wetL = isWet(L.h);
  const bool wetR = isWet(R.h);
  if (!wetL && !wetR) {
    out.active = false;
    out.left_receives = out.right_receives = false;
    return out;
  }

  auto wall = [&]() {
    EdgeUpdate<Real> res;
    if (wetL) {
      const EdgeState<Real> mirror{L.h, -L.qn, L.qt, L.z};
      distributeWaves(L, mirror, decompose(L, mirror, Real(0.0), opt), opt, res);
      res.right = {Real(0.0), Real(0.0), Real(0.0)};
      res.right_receives = false;
    } else {
      const EdgeState<Real> mirror{R.h, -R.qn, R.qt, R.z};
      distributeWaves(mirror, R, decompose(mirror, R, Real(0.0), opt), opt, res);
      res.left = {Real(0.0), Real(0.0), Real(0.0)};
      res.left_receives = false;
    }
    return res;
  };

  Real dz = R.z - L.z;
  if (wetL != wetR) {
    const EdgeState<Real>& W = wetL ? L : R;
    const EdgeState<Real>& D = wetL ? R : L;
    if (D.z >= W.h + W.z) return wall();
    if (wetL && dz < -L.h) dz = -L.h;
    if (wetR && dz > R.h) dz = R.h;
  }

  distributeWaves(L, R, decompose(L, R, dz, opt), opt, out);

  if (!wetR) {
    if (out.right[0] > 0.0) return wall();
    out.right[1] = out.right[2] = Real(0.0);
  } else if (!wetL) {
    if (out.left[0] > 0.0) return wall();
    out.left[1] = out.left[2] = Real(0.0);
  }
  return out;
}

template <class Real>
struct ConstFields {
  std::span<const Real> h, hu, hv, z;
};

template <class Real>
struct AccFields {
  std::span<Real> mass, mx, my;
};

inline std::string edgeName(Orientation o, int i, int j) {
  return o == Orientation::X
             ? "x-edge between cells (" + std::to_string(i) + "," + std::to_string(j) + ") and (" +
                   std::to_string(i + 1) + "," + std::to_string(j) + ")"
             : "y-edge between cells (" + std::to_string(i) + "," + std::to_string(j) + ") and (" +
                   std::to_string(i) + "," + std::to_string(j + 1) + ")";
}

/// Adds the in-going wave contributions of every edge touching an interior
/// cell. Edges are visited in increasing (j, i) order, so each cell receives
/// its left (bottom) edge before its right (top) edge.
template <class Real>
void fluxSweep(const GridSpec& spec, ConstFields<Real> f, Orientation o, const SolverOptions& opt,
               AccFields<Real> acc) {
  const std::size_t stride = static_cast<std::size_t>(spec.nx + 2);
  const bool alongX = o == Orientation::X;
  const int iBegin = alongX ? 0 : 1;
  const int iEnd = spec.nx;  // inclusive
  const int jBegin = alongX ? 1 : 0;
  const int jEnd = spec.ny;
  const std::size_t step = alongX ? 1 : stride;
  // Normal and tangential accumulators for this orientation.
  std::span<Real> accN = alongX ? acc.mx : acc.my;
  std::span<Real> accT = alongX ? acc.my : acc.mx;
  std::span<const Real> qn = alongX ? f.hu : f.hv;
  std::span<const Real> qt = alongX ? f.hv : f.hu;

  for (int j = jBegin; j <= jEnd; ++j) {
    for (int i = iBegin; i <= iEnd; ++i) {
      const std::size_t kL = static_cast<std::size_t>(j) * stride + static_cast<std::size_t>(i);
      const std::size_t kR = kL + step;
      const EdgeState<Real> L{f.h[kL], qn[kL], qt[kL], f.z[kL]};
      const EdgeState<Real> R{f.h[kR], qn[kR], qt[kR], f.z[kR]};
      const EdgeUpdate<Real> e = edgeUpdate(L, R, opt);
      if (!e.active) continue;
      if constexpr (std::is_floating_point_v<Real>) {
        for (int c = 0; c < 3; ++c) {
          if (!std::isfinite(e.left[c]) || !std::isfinite(e.right[c])) {
            throw NumericalError("non-finite flux contribution at " + edgeName(o, i, j));
          }
        }
      }
      const bool leftInterior = alongX ? i >= 1 : j >= 1;
      const bool rightInterior = alongX ? i + 1 <= spec.nx : j + 1 <= spec.ny;
      if (leftInterior && e.left_receives) {
        acc.mass[kL] = acc.mass[kL] + e.left[0];
        accN[kL] = accN[kL] + e.left[1];
        accT[kL] = accT[kL] + e.left[2];
      }
      if (rightInterior && e.right_receives) {
        acc.mass[kR] = acc.mass[kR] + e.right[0];
        accN[kR] = accN[kR] + e.right[1];
        accT[kR] = accT[kR] + e.right[2];
      }
    }
  }
}

/// dx / max(|u| + c, |v| + c) for a wet cell.
template <class Real>
Real cellDtBound(const Real& h, const Real& hu, const Real& hv, double g, double dx) {
  using std::sqrt;
  const Real u = hu / h;
  const Real v = hv / h;
  using std::abs;
  const Real au = abs(u);
  const Real av = abs(v);
  const Real c = sqrt(g * h);
  const Real su = au + c;
  const Real sv = av + c;
  const Real s = su < sv ? sv : su;
  return dx / s;
}

template <class Real>
Real updatedDepth(const Real& h, const Real& ax, const Real& ay, const Real& k, const Real& rain_dt) {
  return (h - k * (ax + ay)) + rain_dt;
}

}  // namespace detail
}  // namespace swe
