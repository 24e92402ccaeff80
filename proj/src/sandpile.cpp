#include "dsod/sandpile.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "dsod/common.hpp"

namespace dsod {

namespace {
constexpr double kSqrt3 = 1.7320508075688772935;
}

WeightDistribution WeightDistribution::truncated(double R) {
  if (R <= 0) throw UsageError("truncation level R must be positive");
  WeightDistribution d;
  d.kind = WeightKind::truncated_gaussian;
  d.R = R;
  d.m_R = 0.0;  // E[sigma 1{|sigma|<R}] = 0 for the symmetric gaussian base
  d.v_R = std::erf(R / std::sqrt(2.0)) -
          R * std::sqrt(2.0 / 3.14159265358979323846) * std::exp(-0.5 * R * R);
  return d;
}

WeightDistribution WeightDistribution::parse(const std::string& name, double R) {
  if (name == "gaussian") return gaussian();
  if (name == "rademacher") return rademacher();
  if (name == "uniform") return uniform();
  if (name == "truncated_gaussian" || name == "truncated") return truncated(R);
  throw UsageError("unknown weight distribution: " + name);
}

std::string WeightDistribution::name() const {
  switch (kind) {
    case WeightKind::gaussian: return "gaussian";
    case WeightKind::rademacher: return "rademacher";
    case WeightKind::uniform: return "uniform";
    case WeightKind::truncated_gaussian: return "truncated_gaussian";
  }
  return "?";
}

GridFunction draw_weights(const TorusLattice& lat, const WeightDistribution& dist,
                          GaussianSource& gauss) {
  GridFunction sigma(lat);
  switch (dist.kind) {
    case WeightKind::gaussian:
      for (auto& x : sigma.v) x = gauss.next();
      break;
    case WeightKind::rademacher:
      for (auto& x : sigma.v) x = (gauss.engine().next() >> 63) ? 1.0 : -1.0;
      break;
    case WeightKind::uniform:
      // Uniform on [-sqrt3, sqrt3]: unit variance.
      for (auto& x : sigma.v)
        x = kSqrt3 * (2.0 * gauss.engine().uniform01() - 1.0);
      break;
    case WeightKind::truncated_gaussian:
      for (auto& x : sigma.v) {
        const double g = gauss.next();
        x = (std::abs(g) < dist.R ? g : 0.0) - dist.m_R;
      }
      break;
  }
  return sigma;
}

GridFunction init_configuration(const GridFunction& sigma) {
  double total = 0.0;
  for (double x : sigma.v) total += x;
  const double m = total / static_cast<double>(sigma.lat.size);
  GridFunction s(sigma.lat);
  for (std::size_t i = 0; i < s.v.size(); ++i) s.v[i] = 1.0 + sigma.v[i] - m;
  return s;
}

double parallel_topple_sweep(GridFunction& s, GridFunction& emitted,
                             GridFunction& next) {
  const TorusLattice& lat = s.lat;
  const double inv_deg = 1.0 / (2.0 * lat.d);
  for (std::size_t x = 0; x < lat.size; ++x) {
    const double excess = s.v[x] - 1.0;
    emitted.v[x] = excess > 0.0 ? excess : 0.0;
  }
  double sup_excess = 0.0;
  for (std::size_t x = 0; x < lat.size; ++x) {
    double recv = 0.0;
    for (int axis = 0; axis < lat.d; ++axis) {
      recv += emitted.v[lat.neighbor(x, axis, +1)];
      recv += emitted.v[lat.neighbor(x, axis, -1)];
    }
    const double val = s.v[x] - emitted.v[x] + inv_deg * recv;
    next.v[x] = val;
    sup_excess = std::max(sup_excess, val - 1.0);
  }
  s.v.swap(next.v);
  return sup_excess;
}

StabilizeResult stabilize(GridFunction s, double tol, long max_sweeps,
                          std::ostream* progress,
                          const std::atomic<bool>* cancel) {
  const TorusLattice lat = s.lat;
  Odometer od;
  od.raw = GridFunction(lat);
  GridFunction emitted(lat), next(lat);

  double sup_excess = 0.0;
  for (double v : s.v) sup_excess = std::max(sup_excess, v - 1.0);

  long sweep = 0;
  while (sup_excess > tol) {
    if (cancel != nullptr && cancel->load(std::memory_order_relaxed))
      throw Interrupted("stabilize interrupted at sweep " +
                        std::to_string(sweep));
    if (sweep >= max_sweeps)
      throw NonConvergence("stabilize: sweep budget exhausted (sweeps=" +
                               std::to_string(sweep) + ", residual=" +
                               std::to_string(sup_excess) + ")",
                           sweep, sup_excess);
    sup_excess = parallel_topple_sweep(s, emitted, next);
    for (std::size_t x = 0; x < lat.size; ++x) od.raw.v[x] += emitted.v[x];
    ++sweep;
    if (progress != nullptr && sweep % 10'000 == 0)
      (*progress) << "stabilize: sweep " << sweep << " residual " << sup_excess
                  << '\n';
  }

  od.sweeps = sweep;
  od.residual = sup_excess;
  od.shifted = od.raw;
  const double lo = *std::min_element(od.raw.v.begin(), od.raw.v.end());
  for (auto& v : od.shifted.v) v -= lo;

  StabilizeResult r;
  r.final_config = std::move(s);
  r.odometer = std::move(od);
  return r;
}

}  // namespace dsod
