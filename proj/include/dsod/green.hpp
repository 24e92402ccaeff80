// Green's function of simple random walk on the torus, averaged over targets:
//   g(x,y) = n^{-d} sum_z E_x[ visits to y strictly before hitting z ].
// Spectrally, ghat_x(0) = L (the mass constant) and for a != 0
//   ghat_x(a) = 2d n^{-d} psi_{-a}(x) / (-lambda_a),
// so g(x,y) = L + (2d/n^d) sum_{a!=0} psi_a(y-x)/(-lambda_a): one row
// determines the whole table by translation.
//
// Mass constant, two independent routes (their agreement is a test gate):
//   hitting   L = n^{-2d} sum_z E_x[tau_z]     (dense linear solves)
//   spectral  L = (2d/n^d) sum_{a!=0} 1/(-lambda_a)
#pragma once

#include <cstddef>

#include "dsod/torus.hpp"

namespace dsod {

// E_x[tau_target] for every start x; dense solve, guarded to size <= 10^4.
GridFunction expected_hitting_time(const TorusLattice& lat, std::size_t target);

enum class MassConstantMethod { spectral, hitting };

double mass_constant_L(const TorusLattice& lat,
                       MassConstantMethod method = MassConstantMethod::spectral);

struct GreenTable {
  TorusLattice lat;
  double L = 0.0;
  GridFunction row;  // row[y] = g(0, y)

  // g(x,y) = row[(y - x) mod n] componentwise.
  double at(std::size_t x, std::size_t y) const;
};

GreenTable green_function(const TorusLattice& lat);

// Odometer via the frequency-space Poisson solve: with rhs 2d(1 - s),
//   vhat(a) = 2d (1-s)^hat(a) / lambda_a  (a != 0),  vhat(0) = 0,
// e = v - min v. The factor 2d keeps (Lap e) = 2d(1-s), matching the mass
// balance of the dynamics exactly. Throws ZeroMeanViolation when the
// configuration does not carry total mass n^d.
GridFunction spectral_odometer(const GridFunction& s);

// w(y) = (2d)^{-1} sum_x g(x,y) sigma(x), computed by circular convolution in
// frequency space. Modulo an additive constant this is the centered odometer
// scaled by (2d)^{-1}; pairings against zero-mean test functions coincide.
GridFunction w_field(const GridFunction& sigma, const GreenTable& table);

}  // namespace dsod
