// Divisible sandpile on the torus: weight draws, initial configuration at
// critical density, synchronous parallel toppling, and stabilization.
//
// One sweep: every site with mass above 1 keeps 1 and emits its excess in
// equal shares along the 2d directed edges. The odometer accumulates emitted
// mass per site. Mass balance over a full run gives
//   (Lap e)(x) = 2d (1 - s(x))   when the final configuration is exactly 1,
// which is what ties the dynamics to the spectral solve in green.hpp.
#pragma once

#include <atomic>
#include <cstdint>
#include <iosfwd>
#include <string>

#include "dsod/rng.hpp"
#include "dsod/torus.hpp"

namespace dsod {

enum class WeightKind { gaussian, rademacher, uniform, truncated_gaussian };

struct WeightDistribution {
  WeightKind kind = WeightKind::gaussian;
  double R = 0.0;    // truncation level (truncated_gaussian only)
  double m_R = 0.0;  // mean removed at draw time
  double v_R = 1.0;  // variance of the truncated draw

  static WeightDistribution gaussian() { return {}; }
  static WeightDistribution rademacher() { return {WeightKind::rademacher, 0, 0, 1}; }
  static WeightDistribution uniform() { return {WeightKind::uniform, 0, 0, 1}; }
  // sigma * 1{|sigma| < R} - m_R for a standard gaussian sigma; m_R = 0 by
  // symmetry, v_R = erf(R/sqrt2) - R sqrt(2/pi) exp(-R^2/2) in closed form.
  static WeightDistribution truncated(double R);

  static WeightDistribution parse(const std::string& name, double R);
  std::string name() const;
};

GridFunction draw_weights(const TorusLattice& lat, const WeightDistribution& dist,
                          GaussianSource& gauss);

// s = 1 + sigma - mean(sigma); total mass is the site count by construction.
GridFunction init_configuration(const GridFunction& sigma);

struct SandpileConfig {
  TorusLattice lat;
  WeightDistribution dist;
  std::uint64_t seed = 1;
  double tol = 1e-10;
  long max_sweeps = 10'000'000;
};

struct Odometer {
  GridFunction raw;      // accumulated emitted mass
  GridFunction shifted;  // raw - min(raw); min is 0 by construction
  long sweeps = 0;
  double residual = 0.0;  // sup_x (s(x) - 1) at termination
};

// One synchronous sweep. `emitted` is overwritten with this sweep's per-site
// emissions, `next` is scratch of the same size. Returns the sup excess of the
// updated configuration. Sites with s <= 1 emit nothing.
double parallel_topple_sweep(GridFunction& s, GridFunction& emitted,
                             GridFunction& next);

struct StabilizeResult {
  GridFunction final_config;
  Odometer odometer;
};

// Sweeps until sup(s - 1) <= tol; throws NonConvergence (with sweep count and
// residual) when max_sweeps is exhausted. Progress goes to *progress every
// 10^4 sweeps when non-null. A set *cancel flag raises Interrupted at the
// next sweep boundary.
StabilizeResult stabilize(GridFunction s, double tol = 1e-10,
                          long max_sweeps = 10'000'000,
                          std::ostream* progress = nullptr,
                          const std::atomic<bool>* cancel = nullptr);

}  // namespace dsod
