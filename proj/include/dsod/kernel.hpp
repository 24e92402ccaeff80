// Continuum bilaplacian covariance kernel on the unit torus.
//
// The kernel is the frequency sum
//     K(theta) = sum_{nu != 0} e^{2 pi i theta.nu} / ||nu||^4,
// absolutely convergent only for d <= 3.  Three evaluation routes:
//
//   kernel_lowdim     d <= 3, bare partial sum over ||nu||_inf <= M with a
//                     rigorous tail bound 2d 3^{d-1} M^{d-4} / (4-d).
//   kernel_mollified  any d, factor exp(-kappa^2 ||nu||^2), kappa > 0.  The
//                     adaptive cutoff picks M so that the geometric bound on
//                     the ignored mass is <= 1e-10 of the last included
//                     shell.  Axis-aligned queries in high dimension collapse
//                     the zero axes into sum-of-squares representation counts
//                     so the cost stays near M^3 instead of (2M+1)^d.
//   periodized_kernel_limit
//                     the exact kappa -> 0 limit of the mollified sum via
//                     K(theta) = int_0^inf t (prod_i vartheta(theta_i, t) - 1) dt
//                     with vartheta the Gaussian theta function, switched to
//                     its modular image for small t.  Agrees with
//                     kernel_lowdim to machine precision for d <= 3 and is
//                     the only practical route to the limit in d >= 5 where
//                     small kappa would need ~(1/kappa)^d lattice points.
//
// periodized_singularity evaluates only the leading singular part
// pi^{4-d/2} Gamma((d-4)/2) sum_{||w||_inf <= W} ||theta+w||^{4-d} of the
// periodized kernel in d >= 5 (coefficient pi^2 at d = 5).
//
// Shell sums fill one slot per shell and reduce through a fixed pairwise
// tree, so results are byte-identical for every worker count.

#pragma once

#include <vector>

namespace dsod {

struct KernelQuery {
  int d = 1;
  std::vector<double> theta;  // wrapped componentwise into [-1/2, 1/2)
  double kappa = 0.0;         // mollification scale, 0 = bare sum
  long cutoff = 0;            // frequency cutoff M; <= 0 selects automatically
};

struct KernelValue {
  double value = 0.0;
  double tail_bound = 0.0;  // rigorous bound on the omitted frequency mass
  long cutoff = 0;          // cutoff actually used
};

// Wraps a real number into the fundamental domain [-1/2, 1/2).
double wrap_torus(double x);

// Default cutoff when none is given: 1e4 (d=1), 200 (d=2,3), 64 (d>=4).
long default_cutoff(int d);

// Cutoff from the last-shell rule: the geometric tail estimate drops below
// 1e-10 of the last included shell once exp(-kappa^2 (2M+1)) <= 1e-10.
long adaptive_cutoff(double kappa);

// Bare partial sum, d <= 3 only.  Throws DivergentSum for d >= 4 and
// UsageError if kappa != 0.
KernelValue kernel_lowdim(const KernelQuery& q, int workers = 1);

// Mollified sum, any d, kappa > 0 required.
KernelValue kernel_mollified(const KernelQuery& q, int workers = 1);

// Leading singular part of the periodized kernel, d >= 5.  Throws
// SingularPoint if theta is a lattice point.
double periodized_singularity(int d, const std::vector<double>& theta,
                              long shells);

// Exact kappa -> 0 limit of the mollified sum.  Valid for any d when theta
// is not a lattice point, and also at theta = 0 for d <= 3; throws
// DivergentSum for a lattice point with d >= 4.
double periodized_kernel_limit(int d, const std::vector<double>& theta);

namespace detail {
// Internal routes of kernel_mollified, exposed for cross-validation tests.
KernelValue kernel_mollified_direct(const KernelQuery& q, int workers);
KernelValue kernel_mollified_collapsed(const KernelQuery& q, int workers);
}  // namespace detail

}  // namespace dsod
