#pragma once

// Test-side reference implementations. Nothing here calls into the solver's
// numerics; each oracle is written from the governing equations directly.

#include <array>
#include <cmath>
#include <cstdint>
#include <random>
#include <utility>

#include "swe/grid.hpp"

namespace oracle {

// ---------------------------------------------------------------------------
// Operation-counting scalar
// ---------------------------------------------------------------------------

/// Tallies +, -, *, / and sqrt (one each). Negation, abs and comparisons are
/// free, matching the cost-model convention.
struct Flop {
  double v = 0.0;

  static inline std::uint64_t count = 0;
  static void reset() { count = 0; }

  Flop() = default;
  explicit Flop(double x) : v(x) {}
  explicit operator double() const { return v; }

  friend Flop operator+(Flop a, Flop b) { ++count; return Flop(a.v + b.v); }
  friend Flop operator-(Flop a, Flop b) { ++count; return Flop(a.v - b.v); }
  friend Flop operator*(Flop a, Flop b) { ++count; return Flop(a.v * b.v); }
  friend Flop operator/(Flop a, Flop b) { ++count; return Flop(a.v / b.v); }
  friend Flop operator+(double a, Flop b) { return Flop(a) + b; }
  friend Flop operator-(double a, Flop b) { return Flop(a) - b; }
  friend Flop operator*(double a, Flop b) { return Flop(a) * b; }
  friend Flop operator/(double a, Flop b) { return Flop(a) / b; }
  friend Flop operator+(Flop a, double b) { return a + Flop(b); }
  friend Flop operator-(Flop a, double b) { return a - Flop(b); }
  friend Flop operator*(Flop a, double b) { return a * Flop(b); }
  friend Flop operator/(Flop a, double b) { return a / Flop(b); }
  friend Flop operator-(Flop a) { return Flop(-a.v); }

  friend Flop sqrt(Flop a) { ++count; return Flop(std::sqrt(a.v)); }
  friend Flop abs(Flop a) { return Flop(std::fabs(a.v)); }

  friend bool operator<(Flop a, Flop b) { return a.v < b.v; }
  friend bool operator>(Flop a, Flop b) { return a.v > b.v; }
  friend bool operator<=(Flop a, Flop b) { return a.v <= b.v; }
  friend bool operator>=(Flop a, Flop b) { return a.v >= b.v; }
  friend bool operator<(Flop a, double b) { return a.v < b; }
  friend bool operator>(Flop a, double b) { return a.v > b; }
  friend bool operator<=(Flop a, double b) { return a.v <= b; }
  friend bool operator>=(Flop a, double b) { return a.v >= b; }
  friend bool operator<(double a, Flop b) { return a < b.v; }
  friend bool operator>(double a, Flop b) { return a > b.v; }
};

// ---------------------------------------------------------------------------
// Shallow-water edge reference
// ---------------------------------------------------------------------------

using Vec3 = std::array<double, 3>;
using Mat3 = std::array<Vec3, 3>;  // row-major

/// Edge-normal state: depth, normal discharge, tangential discharge, bed.
struct State {
  double h, qn, qt, z;
};

inline Vec3 physicalFlux(const State& s, double g) {
  const double u = s.qn / s.h;
  return {s.qn, s.qn * u + 0.5 * g * s.h * s.h, s.qt * u};
}

/// Gaussian elimination with partial pivoting.
inline Vec3 solve(Mat3 a, Vec3 b) {
  for (int col = 0; col < 3; ++col) {
    int piv = col;
    for (int r = col + 1; r < 3; ++r) {
      if (std::fabs(a[r][col]) > std::fabs(a[piv][col])) piv = r;
    }
    std::swap(a[col], a[piv]);
    std::swap(b[col], b[piv]);
    for (int r = col + 1; r < 3; ++r) {
      const double f = a[r][col] / a[col][col];
      for (int c = col; c < 3; ++c) a[r][c] -= f * a[col][c];
      b[r] -= f * b[col];
    }
  }
  Vec3 x{};
  for (int r = 2; r >= 0; --r) {
    double s = b[r];
    for (int c = r + 1; c < 3; ++c) s -= a[r][c] * x[c];
    x[r] = s / a[r][r];
  }
  return x;
}

struct Decomposition {
  Vec3 lambda;
  Mat3 evec;  // evec[m] is the m-th eigenvector
  Vec3 alpha;
  Vec3 beta;
  double hbar;
};

/// Roe linearisation of a wet-wet edge. Wave strengths come from solving
/// R alpha = dU and R beta = (0, -g hbar dz, 0) numerically.
inline Decomposition decompose(const State& L, const State& R, double g) {
  const double sl = std::sqrt(L.h);
  const double sr = std::sqrt(R.h);
  const double un = (L.qn / sl + R.qn / sr) / (sl + sr);
  const double ut = (L.qt / sl + R.qt / sr) / (sl + sr);
  const double hbar = 0.5 * (L.h + R.h);
  const double c = std::sqrt(g * hbar);
  Decomposition d;
  d.hbar = hbar;
  d.lambda = {un - c, un, un + c};
  d.evec = {Vec3{1.0, un - c, ut}, Vec3{0.0, 0.0, 1.0}, Vec3{1.0, un + c, ut}};
  Mat3 cols{};
  for (int r = 0; r < 3; ++r) {
    for (int m = 0; m < 3; ++m) cols[r][m] = d.evec[m][r];
  }
  d.alpha = solve(cols, {R.h - L.h, R.qn - L.qn, R.qt - L.qt});
  d.beta = solve(cols, {0.0, -g * hbar * (R.z - L.z), 0.0});
  return d;
}

/// First-order upwind fluctuations without entropy correction: waves with
/// negative speed go left, positive right, zero speed split evenly.
inline std::pair<Vec3, Vec3> fluctuations(const State& L, const State& R, double g) {
  const Decomposition d = decompose(L, R, g);
  Vec3 left{}, right{};
  for (int m = 0; m < 3; ++m) {
    const double s = d.lambda[m] * d.alpha[m] - d.beta[m];
    const double wl = d.lambda[m] < 0.0 ? 1.0 : (d.lambda[m] > 0.0 ? 0.0 : 0.5);
    for (int r = 0; r < 3; ++r) {
      left[r] += wl * s * d.evec[m][r];
      right[r] += (1.0 - wl) * s * d.evec[m][r];
    }
  }
  return {left, right};
}

/// dF + (0, g hbar dz, 0): what the two fluctuations must add up to.
inline Vec3 totalFluctuation(const State& L, const State& R, double g) {
  const Vec3 fl = physicalFlux(L, g);
  const Vec3 fr = physicalFlux(R, g);
  const double hbar = 0.5 * (L.h + R.h);
  return {fr[0] - fl[0], fr[1] - fl[1] + g * hbar * (R.z - L.z), fr[2] - fl[2]};
}

/// Still-water CFL step: cfl * dx / sqrt(g h).
inline double stillWaterDt(double h, double dx, double cfl, double g) { return cfl * dx / std::sqrt(g * h); }

// ---------------------------------------------------------------------------
// Generators
// ---------------------------------------------------------------------------

/// Seeded draws for property tests.
class Gen {
 public:
  explicit Gen(std::uint64_t seed) : rng_(seed) {}

  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }
  bool coin(double p = 0.5) { return std::bernoulli_distribution(p)(rng_); }

  /// Wet state with subcritical-to-moderate velocities.
  State wetState(double hmin = 0.05, double hmax = 5.0, double umax = 3.0) {
    const double h = uniform(hmin, hmax);
    return {h, h * uniform(-umax, umax), h * uniform(-umax, umax), uniform(-1.0, 1.0)};
  }

  std::mt19937_64& engine() { return rng_; }

 private:
  std::mt19937_64 rng_;
};

/// Random field set with a wet interior and consistent halos (copied from
/// the adjacent interior). Some cells may be dry when dry_fraction > 0.
inline swe::FieldSet randomFields(Gen& gen, const swe::GridSpec& spec, double dry_fraction = 0.0) {
  swe::FieldSet f(spec);
  for (int j = 1; j <= spec.ny; ++j) {
    for (int i = 1; i <= spec.nx; ++i) {
      const std::size_t k = f.index(i, j);
      const bool dry = dry_fraction > 0.0 && gen.coin(dry_fraction);
      f.z[k] = gen.uniform(0.0, 0.5);
      f.h[k] = dry ? 0.0 : gen.uniform(0.2, 3.0);
      f.hu[k] = dry ? 0.0 : f.h[k] * gen.uniform(-1.5, 1.5);
      f.hv[k] = dry ? 0.0 : f.h[k] * gen.uniform(-1.5, 1.5);
    }
  }
  auto copy = [&](int di, int dj, int si, int sj) {
    const std::size_t d = f.index(di, dj), s = f.index(si, sj);
    f.h[d] = f.h[s];
    f.hu[d] = f.hu[s];
    f.hv[d] = f.hv[s];
    f.z[d] = f.z[s];
  };
  for (int j = 1; j <= spec.ny; ++j) {
    copy(0, j, 1, j);
    copy(spec.nx + 1, j, spec.nx, j);
  }
  for (int i = 0; i <= spec.nx + 1; ++i) {
    copy(i, 0, i, 1);
    copy(i, spec.ny + 1, i, spec.ny);
  }
  return f;
}

}  // namespace oracle
