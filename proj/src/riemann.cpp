#include "swe/riemann.hpp"

#include <algorithm>

namespace swe {
namespace {

detail::EdgeState<double> rotate(const CellState& s, Orientation o) {
  return o == Orientation::X ? detail::EdgeState<double>{s.h, s.hu, s.hv, s.z}
                             : detail::EdgeState<double>{s.h, s.hv, s.hu, s.z};
}

}  // namespace

RoeAverages roeAverages(const CellState& left, const CellState& right, Orientation o, double g) {
  const auto r = detail::roeAverages(rotate(left, o), rotate(right, o), g);
  return {r.un, r.ut, r.c};
}

EdgeDecomposition edgeDecompose(const CellState& left, const CellState& right, Orientation o,
                                const SolverOptions& opt) {
  EdgeDecomposition out;
  if (!detail::isWet(left.h) && !detail::isWet(right.h)) {
    out.skipped = true;
    return out;
  }
  const auto L = rotate(left, o);
  const auto R = rotate(right, o);
  const auto w = detail::decompose(L, R, R.z - L.z, opt);
  out.roe = {w.roe.un, w.roe.ut, w.roe.c};
  if (w.roe.c < kDegenerateCelerity) {
    out.skipped = true;
    return out;
  }
  out.lambda = w.lambda;
  out.alpha = w.alpha;
  out.beta = w.beta;
  out.evec[0] = {1.0, w.lambda[0], w.roe.ut};
  out.evec[1] = {0.0, 0.0, 1.0};
  out.evec[2] = {1.0, w.lambda[2], w.roe.ut};
  return out;
}

void EdgeFluxAccumulator::zero() {
  std::fill(mass.begin(), mass.end(), 0.0);
  std::fill(mx.begin(), mx.end(), 0.0);
  std::fill(my.begin(), my.end(), 0.0);
}

void accumulateFluxSweep(const FieldSet& fields, Orientation o, const SolverOptions& opt,
                         EdgeFluxAccumulator& acc) {
  if (acc.mass.size() != fields.spec.paddedSize()) acc = EdgeFluxAccumulator(fields.spec);
  acc.spec = fields.spec;
  acc.zero();
  detail::fluxSweep<double>(fields.spec, {fields.h, fields.hu, fields.hv, fields.z}, o, opt,
                            {acc.mass, acc.mx, acc.my});
}

std::size_t sweepEdgeCount(const GridSpec& spec, Orientation o) {
  const auto nx = static_cast<std::size_t>(spec.nx);
  const auto ny = static_cast<std::size_t>(spec.ny);
  return o == Orientation::X ? (nx + 1) * ny : nx * (ny + 1);
}

}  // namespace swe
