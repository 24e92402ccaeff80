// Continuum-limit machinery: the rescaled field pairing and its exact and
// Monte Carlo statistics.
//
// A lattice field h (indexed by sites x, standing for the point z = x/n of the
// unit torus) is paired against a smooth zero-mean trigonometric polynomial u:
//   <Xi_h, u> = 4 pi^2 n^{(d-4)/2} sum_x h(x) T_n(x),
//   T_n(x) = integral of u over the axis-aligned cell of side 1/n at x/n.
// For u(theta) = sum_nu c_nu e^{2 pi i nu.theta} the cell average factorizes:
// per axis, sin(pi nu_i/n)/(pi nu_i) for nu_i != 0 and 1/n otherwise.
//
// Exact pairing variance against the chi field, derived from Parseval:
//   Var = 16 pi^4 n^{d-4} sum_{z,z'} H(nz,nz') T_n(z) T_n(z')
//       = pi^4 n^{2d-4} sum_{w!=0} |That(w)|^2 / (sum_i sin^2(pi w_i/n))^2,
//   That(w) = sum_{nu = w mod n} c_nu prod_i axisfac(nu_i),
// which tends to ||u||_{-1}^2 = sum_{nu!=0} |c_nu|^2 / ||nu||^4.
//
// Odometer pairings divide by 2d (mass per directed edge) so the dynamics,
// the chi field, and the w field share one limit.
#pragma once

#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include "dsod/sandpile.hpp"
#include "dsod/torus.hpp"

namespace dsod {

struct TestFunction {
  struct Term {
    std::vector<int> nu;          // integer frequency, never zero
    std::complex<double> coeff;
  };
  int d = 1;
  std::vector<Term> terms;  // hermitian-closed: c(-nu) = conj(c(nu))

  // Validates, drops nothing, and completes conjugate partners so the
  // function is real-valued. Throws ZeroMeanViolation on a zero frequency and
  // UsageError on dimension mismatch or inconsistent conjugate pairs.
  static TestFunction make(int d, std::vector<Term> raw);

  // "nu:coeff,nu:coeff,..." with nu components joined by '_' for d >= 2 and
  // coeff either "a" or "a+bi"/"a-bi". Example (d=2): "1_0:0.5,-1_0:0.5".
  static TestFunction parse(int d, const std::string& spec);

  double evaluate(const std::vector<double>& theta) const;
  std::string describe() const;
};

// ||u||_{-1}^2 (the squared negative-one Sobolev norm).
double sobolev_norm_minus1(const TestFunction& u);

// T_n at the cell of `site`.
double cell_average_T(const TestFunction& u, const TorusLattice& lat,
                      std::size_t site);

// K_n = n^d T_n - u(site/n); sup over sites decays like 1/n.
double remainder_K(const TestFunction& u, const TorusLattice& lat,
                   std::size_t site);

// Raw pairing of a lattice field against u.
double pair_field(const GridFunction& h, const TestFunction& u);

// Pairing of a dynamics odometer (mass normalization 1/2d).
double odometer_pairing(const GridFunction& odometer, const TestFunction& u);

// Exact Var <Xi_chi, u>, frequency form (fast, no lattice sweep).
double exact_pairing_variance(const TestFunction& u, const TorusLattice& lat);

// Exact E[R_n(u)^2] where R_n is the remainder part of the pairing: the same
// quadratic form as the variance with n^{-d} K_n in place of T_n, reduced to
// pi^4 n^{-4} sum_{w != 0} |Khat(w)|^2 / (sum_i sin^2(pi w_i/n))^2.
double exact_remainder_variance(const TestFunction& u, const TorusLattice& lat);

struct MomentEstimate {
  double value = 0.0;
  double se = 0.0;
  long trials = 0;
};

// Monte Carlo E[<Xi_w, u>^m] over independent weight draws; trial k uses
// trial_stream(seed, k). Deterministic for fixed seed regardless of workers.
MomentEstimate empirical_moment(const TorusLattice& lat,
                                const WeightDistribution& dist,
                                const TestFunction& u, int m, long trials,
                                std::uint64_t seed, int workers = 1);

// Per-trial pairing samples (the raw material behind empirical_moment).
std::vector<double> mc_w_pairings(const TorusLattice& lat,
                                  const WeightDistribution& dist,
                                  const TestFunction& u, long trials,
                                  std::uint64_t seed, int workers = 1);

struct SobolevNormEstimate {
  double value = 0.0;       // truncated sum over 0 < ||nu||_inf <= M
  double tail_bound = 0.0;  // rigorous bound on the discarded tail
  long cutoff = 0;
};

// ||Xi_h||^2 in the negative Sobolev norm of order eps/2:
//   sum_{nu != 0} ||nu||^{-2 eps} |Xihat(nu)|^2,
//   Xihat(nu) = 4 pi^2 n^{(d-4)/2} sum_x h(x) conj(cell integral of e_nu).
// Requires eps > max(1 + d/4, d/2) (EpsilonTooSmall otherwise) and M >= n.
SobolevNormEstimate sobolev_norm_field(const GridFunction& h, double eps,
                                       long M);

struct PairingReport {
  int d = 1;
  int n = 0;
  std::string mode;  // odometer | chi | w
  double value = 0.0;
  std::uint64_t seed = 0;
};

}  // namespace dsod
