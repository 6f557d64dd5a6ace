#pragma once

namespace swe {

/// Exact solution of the wet-bed dam break on a flat frictionless bed
/// (left rarefaction, right shock), dam at x = 0 and released at t = 0.
class StokerSolution {
 public:
  StokerSolution(double h_left, double h_right, double g);

  double depth(double x, double t) const;
  double velocity(double x, double t) const;

  double middleDepth() const { return hm_; }
  double middleVelocity() const { return um_; }
  double shockSpeed() const { return shock_speed_; }
  double shockPosition(double t) const { return shock_speed_ * t; }

 private:
  double hl_, hr_, g_;
  double hm_ = 0.0;
  double um_ = 0.0;
  double shock_speed_ = 0.0;
};

}  // namespace swe
