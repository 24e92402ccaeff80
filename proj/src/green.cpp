#include "dsod/green.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <string>

#include "dsod/common.hpp"

namespace dsod {

GridFunction expected_hitting_time(const TorusLattice& lat, std::size_t target) {
  if (lat.size > 10'000)
    throw UsageError("hitting-time solve guarded to size <= 10^4");
  if (target >= lat.size) throw UsageError("hitting-time target out of range");

  const auto N = static_cast<Eigen::Index>(lat.size);
  // Unknowns: h(x) for x != target, h(target) = 0.
  // First-step analysis: 2d h(x) - sum_{y~x} h(y) = 2d.
  std::vector<Eigen::Index> row_of(lat.size, -1);
  Eigen::Index m = 0;
  for (std::size_t x = 0; x < lat.size; ++x)
    if (x != target) row_of[x] = m++;

  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(N - 1, N - 1);
  Eigen::VectorXd b = Eigen::VectorXd::Constant(N - 1, 2.0 * lat.d);
  for (std::size_t x = 0; x < lat.size; ++x) {
    if (x == target) continue;
    const Eigen::Index r = row_of[x];
    A(r, r) += 2.0 * lat.d;
    for (int axis = 0; axis < lat.d; ++axis) {
      for (int dir : {+1, -1}) {
        const std::size_t y = lat.neighbor(x, axis, dir);
        if (y != target) A(r, row_of[y]) -= 1.0;
      }
    }
  }

  Eigen::PartialPivLU<Eigen::MatrixXd> lu(A);
  const Eigen::VectorXd h = lu.solve(b);
  const double rel_err = (A * h - b).norm() / b.norm();
  if (!h.allFinite() || rel_err > 1e-8)
    throw SolveFailure("hitting-time solve failed (relative residual " +
                       std::to_string(rel_err) + ")");

  GridFunction out(lat);
  for (std::size_t x = 0; x < lat.size; ++x)
    out.v[x] = (x == target) ? 0.0 : h[row_of[x]];
  return out;
}

double mass_constant_L(const TorusLattice& lat, MassConstantMethod method) {
  if (method == MassConstantMethod::spectral) {
    double acc = 0.0;
    for (std::size_t a = lat.size; a-- > 1;)  // fixed order, a = size-1 .. 1
      acc += 0.25 / sine_energy(lat, a);
    return 2.0 * lat.d * acc / static_cast<double>(lat.size);
  }

  // Hitting route: L = n^{-2d} sum_z E_x[tau_z]. By reversibility and
  // transitivity sum_z E_x[tau_z] = sum_z E_z[tau_x], so one solve per base
  // point; two distinct base points cross-check each other.
  const double norm = 1.0 / (static_cast<double>(lat.size) * static_cast<double>(lat.size));
  const GridFunction h0 = expected_hitting_time(lat, 0);
  double L0 = 0.0;
  for (double v : h0.v) L0 += v;
  L0 *= norm;

  const std::size_t other = lat.size / 2;
  const GridFunction h1 = expected_hitting_time(lat, other);
  double L1 = 0.0;
  for (double v : h1.v) L1 += v;
  L1 *= norm;

  if (std::abs(L0 - L1) > 1e-9 * std::max(1.0, std::abs(L0)))
    throw SolveFailure("mass constant differs across base points");
  return L0;
}

double GreenTable::at(std::size_t x, std::size_t y) const {
  std::size_t diff = 0;
  std::size_t rem_x = x, rem_y = y;
  std::size_t scale = 1;
  for (int i = 0; i < lat.d; ++i) {
    const auto cx = static_cast<int>(rem_x % static_cast<std::size_t>(lat.n));
    const auto cy = static_cast<int>(rem_y % static_cast<std::size_t>(lat.n));
    int c = cy - cx;
    if (c < 0) c += lat.n;
    diff += static_cast<std::size_t>(c) * scale;
    scale *= static_cast<std::size_t>(lat.n);
    rem_x /= static_cast<std::size_t>(lat.n);
    rem_y /= static_cast<std::size_t>(lat.n);
  }
  return row.v[diff];
}

GreenTable green_function(const TorusLattice& lat) {
  GreenTable t;
  t.lat = lat;
  t.L = mass_constant_L(lat, MassConstantMethod::spectral);
  ComplexGridFunction ghat(lat);
  ghat.v[0] = t.L;
  const double c = 2.0 * lat.d / static_cast<double>(lat.size);
  for (std::size_t a = 1; a < lat.size; ++a)
    ghat.v[a] = c / (4.0 * sine_energy(lat, a));
  t.row = real_part(idft(ghat), 1e-9, "green row synthesis");
  return t;
}

GridFunction spectral_odometer(const GridFunction& s) {
  const TorusLattice& lat = s.lat;
  double deficit = 0.0;  // sum of (1 - s)
  for (double v : s.v) deficit += 1.0 - v;
  if (std::abs(deficit) > 1e-6 * static_cast<double>(lat.size))
    throw ZeroMeanViolation("configuration mass differs from site count by " +
                            std::to_string(deficit));

  const ComplexGridFunction shat = dft(s);
  ComplexGridFunction vhat(lat);
  vhat.v[0] = 0.0;  // gauge: zero-mean potential before the min shift
  const double deg = 2.0 * lat.d;
  for (std::size_t a = 1; a < lat.size; ++a) {
    // (1-s)^hat(a) = -shat(a) for a != 0; lambda_a = -4 sine_energy.
    vhat.v[a] = deg * shat.v[a] / (4.0 * sine_energy(lat, a));
  }
  double linf = 0.0;
  for (double v : s.v) linf = std::max(linf, std::abs(v));
  GridFunction v = real_part(idft(vhat), 1e-8 * (1.0 + linf), "odometer synthesis");
  double lo = v.v[0];
  for (double x : v.v) lo = std::min(lo, x);
  for (auto& x : v.v) x -= lo;
  return v;
}

GridFunction w_field(const GridFunction& sigma, const GreenTable& table) {
  const TorusLattice& lat = sigma.lat;
  if (!(lat == table.lat)) throw UsageError("w_field: lattice mismatch");
  const ComplexGridFunction shat = dft(sigma);
  ComplexGridFunction what(lat);
  // Convolution with the green row: what(a) = n^d ghat(a) sigmahat(a) / 2d.
  what.v[0] = shat.v[0] * static_cast<double>(lat.size) * table.L / (2.0 * lat.d);
  for (std::size_t a = 1; a < lat.size; ++a)
    what.v[a] = shat.v[a] / (4.0 * sine_energy(lat, a));
  double linf = 0.0;
  for (double v : sigma.v) linf = std::max(linf, std::abs(v));
  return real_part(idft(what), 1e-8 * (1.0 + linf), "w-field synthesis");
}

}  // namespace dsod
