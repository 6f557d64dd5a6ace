#include "swe/stoker.hpp"

#include <cmath>

#include "swe/error.hpp"

namespace swe {

StokerSolution::StokerSolution(double h_left, double h_right, double g) : hl_(h_left), hr_(h_right), g_(g) {
  if (!(h_left > h_right && h_right > 0.0 && g > 0.0)) {
    throw ConfigError("wet-bed dam break needs h_left > h_right > 0");
  }
  const double cl = std::sqrt(g * h_left);
  // Velocity behind the rarefaction minus velocity behind the shock; strictly
  // decreasing in the middle depth, so plain bisection is robust.
  auto mismatch = [&](double hm) {
    const double u_rare = 2.0 * (cl - std::sqrt(g * hm));
    const double u_shock = (hm - h_right) * std::sqrt(0.5 * g * (hm + h_right) / (hm * h_right));
    return u_rare - u_shock;
  };
  double lo = h_right;
  double hi = h_left;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    (mismatch(mid) > 0.0 ? lo : hi) = mid;
  }
  hm_ = 0.5 * (lo + hi);
  um_ = 2.0 * (cl - std::sqrt(g * hm_));
  shock_speed_ = hm_ * um_ / (hm_ - h_right);
}

double StokerSolution::depth(double x, double t) const {
  if (t <= 0.0) return x <= 0.0 ? hl_ : hr_;
  const double xi = x / t;
  const double cl = std::sqrt(g_ * hl_);
  const double cm = std::sqrt(g_ * hm_);
  if (xi <= -cl) return hl_;
  if (xi <= um_ - cm) {
    const double s = 2.0 * cl - xi;
    return s * s / (9.0 * g_);
  }
  if (xi <= shock_speed_) return hm_;
  return hr_;
}

double StokerSolution::velocity(double x, double t) const {
  if (t <= 0.0) return 0.0;
  const double xi = x / t;
  const double cl = std::sqrt(g_ * hl_);
  const double cm = std::sqrt(g_ * hm_);
  if (xi <= -cl) return 0.0;
  if (xi <= um_ - cm) return 2.0 * (xi + cl) / 3.0;
  if (xi <= shock_speed_) return um_;
  return 0.0;
}

}  // namespace swe
