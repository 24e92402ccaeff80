#include <doctest.h>

#include <cmath>
#include <vector>

#include "dsod/common.hpp"
#include "dsod/kernel.hpp"

using namespace dsod;

namespace {

constexpr double kPi = 3.14159265358979323846;

// d = 1 closed form: K(theta) = -(2 pi^4 / 3) B4(theta) on [0,1), with
// B4(x) = x^4 - 2x^3 + x^2 - 1/30.
double closed_form_1d(double theta) {
  double x = theta - std::floor(theta);
  const double b4 = ((x - 2.0) * x + 1.0) * x * x - 1.0 / 30.0;
  return -2.0 * std::pow(kPi, 4) / 3.0 * b4;
}

KernelQuery make_query(int d, std::vector<double> theta, double kappa = 0.0,
                       long cutoff = 0) {
  KernelQuery q;
  q.d = d;
  q.theta = std::move(theta);
  q.kappa = kappa;
  q.cutoff = cutoff;
  return q;
}

// Brute-force oracle for the leading singular part, straight from its
// definition.
double singularity_oracle(int d, const std::vector<double>& theta, long W) {
  const double coeff =
      std::pow(kPi, 4.0 - d / 2.0) * std::tgamma((d - 4.0) / 2.0);
  std::vector<long> w(theta.size(), -W);
  double acc = 0.0;
  while (true) {
    double r2 = 0.0;
    for (std::size_t i = 0; i < theta.size(); ++i) {
      const double t = theta[i] + double(w[i]);
      r2 += t * t;
    }
    acc += std::pow(r2, (4.0 - d) / 2.0);
    std::size_t axis = 0;
    while (axis < w.size() && ++w[axis] > W) w[axis++] = -W;
    if (axis == w.size()) break;
  }
  return coeff * acc;
}

}  // namespace

TEST_CASE("torus wrap maps into [-1/2, 1/2)") {
  CHECK(wrap_torus(0.75) == doctest::Approx(-0.25));
  CHECK(wrap_torus(-0.25) == doctest::Approx(-0.25));
  CHECK(wrap_torus(1.25) == doctest::Approx(0.25));
  CHECK(wrap_torus(0.5) == doctest::Approx(-0.5));
  CHECK(wrap_torus(-0.5) == doctest::Approx(-0.5));
  CHECK(wrap_torus(3.0) == doctest::Approx(0.0));
}

TEST_CASE("cutoff selection rules") {
  CHECK(default_cutoff(1) == 10000);
  CHECK(default_cutoff(2) == 200);
  CHECK(default_cutoff(3) == 200);
  CHECK(default_cutoff(5) == 64);
  // exp(-kappa^2 (2M+1)) <= 1e-10.
  CHECK(adaptive_cutoff(0.4) == 72);
  CHECK(adaptive_cutoff(0.3) == 128);
  CHECK(adaptive_cutoff(0.2) == 288);
  CHECK(adaptive_cutoff(2.0) == 8);  // floor for large kappa
}

TEST_CASE("one-dimensional kernel against the bernoulli closed form") {
  // K(0) = pi^4/45, K(1/2) = -7 pi^4/360.
  const KernelValue at0 = kernel_lowdim(make_query(1, {0.0}));
  CHECK(std::abs(at0.value - std::pow(kPi, 4) / 45.0) <= 1e-8);
  const KernelValue at_half = kernel_lowdim(make_query(1, {0.5}));
  CHECK(std::abs(at_half.value + 7.0 * std::pow(kPi, 4) / 360.0) <= 1e-8);

  for (const double theta : {0.0, 0.1, 0.2, 0.3, 0.4, 0.5}) {
    const KernelValue kv = kernel_lowdim(make_query(1, {theta}));
    CHECK(std::abs(kv.value - closed_form_1d(theta)) <= 1e-8);
  }
}

TEST_CASE("kernel symmetry and periodicity") {
  const KernelValue plus = kernel_lowdim(make_query(1, {0.3}));
  const KernelValue minus = kernel_lowdim(make_query(1, {-0.3}));
  const KernelValue shifted = kernel_lowdim(make_query(1, {1.3}));
  CHECK(plus.value == doctest::Approx(minus.value).epsilon(1e-14));
  CHECK(plus.value == doctest::Approx(shifted.value).epsilon(1e-14));

  const KernelValue a = kernel_lowdim(make_query(2, {0.2, 0.4}, 0.0, 60));
  const KernelValue b = kernel_lowdim(make_query(2, {0.4, 0.2}, 0.0, 60));
  CHECK(a.value == doctest::Approx(b.value).epsilon(1e-14));
}

TEST_CASE("bare tail bound is honest") {
  for (int d : {1, 2, 3}) {
    std::vector<double> theta(std::size_t(d), 0.0);
    theta[0] = 0.2;
    const KernelValue coarse = kernel_lowdim(make_query(d, theta, 0.0, 40));
    const KernelValue fine = kernel_lowdim(make_query(d, theta, 0.0, 80));
    CHECK(std::abs(fine.value - coarse.value) <= coarse.tail_bound);
    CHECK(fine.tail_bound < coarse.tail_bound);
  }
}

TEST_CASE("bare kernel rejects divergent requests") {
  CHECK_THROWS_AS(kernel_lowdim(make_query(4, {0.1, 0.0, 0.0, 0.0})),
                  DivergentSum);
  CHECK_THROWS_AS(kernel_lowdim(make_query(5, {0.1, 0.0, 0.0, 0.0, 0.0})),
                  DivergentSum);
  CHECK_THROWS_AS(kernel_lowdim(make_query(1, {0.1}, 0.3)), UsageError);
  CHECK_THROWS_AS(kernel_mollified(make_query(1, {0.1}, 0.0)), UsageError);
  CHECK_THROWS_AS(kernel_lowdim(make_query(1, {0.1, 0.2})), UsageError);
}

TEST_CASE("worker count never changes a kernel value") {
  const KernelQuery q = make_query(2, {0.13, 0.31}, 0.0, 120);
  const KernelValue w1 = kernel_lowdim(q, 1);
  const KernelValue w3 = kernel_lowdim(q, 3);
  CHECK(w1.value == w3.value);  // bitwise, fixed reduction tree

  const KernelQuery qm = make_query(3, {0.2, 0.0, 0.0}, 0.5);
  CHECK(kernel_mollified(qm, 1).value == kernel_mollified(qm, 4).value);
}

TEST_CASE("mollified direct and collapsed routes agree") {
  for (const double kappa : {0.5, 0.35}) {
    const KernelQuery q = make_query(3, {0.3, 0.0, 0.0}, kappa, 40);
    const KernelValue direct = detail::kernel_mollified_direct(q, 1);
    const KernelValue collapsed = detail::kernel_mollified_collapsed(q, 1);
    CHECK(direct.value ==
          doctest::Approx(collapsed.value).epsilon(1e-12));
  }
  const KernelQuery q0 = make_query(2, {0.0, 0.0}, 0.6, 30);
  CHECK(detail::kernel_mollified_direct(q0, 1).value ==
        doctest::Approx(detail::kernel_mollified_collapsed(q0, 1).value)
            .epsilon(1e-12));
}

TEST_CASE("mollified kernel assigns the adaptive cutoff") {
  const KernelValue kv = kernel_mollified(make_query(2, {0.1, 0.0}, 0.4));
  CHECK(kv.cutoff == adaptive_cutoff(0.4));
}

TEST_CASE("mollified tail bound is honest") {
  // Weak mollifier and a small cutoff keep the omitted mass well above
  // rounding noise, so the bound is tested at a meaningful magnitude.
  const KernelQuery coarse_q = make_query(2, {0.2, 0.1}, 0.15, 8);
  const KernelQuery fine_q = make_query(2, {0.2, 0.1}, 0.15, 40);
  const KernelValue coarse = kernel_mollified(coarse_q, 1);
  const KernelValue fine = kernel_mollified(fine_q, 1);
  const double diff = std::abs(fine.value - coarse.value);
  CHECK(diff > 1e-12);
  CHECK(diff <= coarse.tail_bound + 1e-13 * std::abs(coarse.value));
}

TEST_CASE("mollified kernel refuses an oversized off-axis request") {
  // kappa = 0.05 forces M ~ 4605; (2M+1)^5 is far beyond the direct budget
  // and two nonzero axes rule out the collapsed route.
  const KernelQuery q = make_query(5, {0.1, 0.2, 0.0, 0.0, 0.0}, 0.05);
  CHECK_THROWS_AS(kernel_mollified(q, 1), UsageError);
}

TEST_CASE("mollified values extrapolate to the bare kernel in d = 1") {
  // One Richardson step in kappa^2 across three mollification levels.
  const double target = closed_form_1d(0.3);
  const double k1 = kernel_mollified(make_query(1, {0.3}, 0.2)).value;
  const double k2 = kernel_mollified(make_query(1, {0.3}, 0.1)).value;
  const double k3 = kernel_mollified(make_query(1, {0.3}, 0.05)).value;
  // Neville on the kappa^2 grid {0.04, 0.01, 0.0025} evaluated at 0.
  const double x1 = 0.04, x2 = 0.01, x3 = 0.0025;
  const double p12 = (x1 * k2 - x2 * k1) / (x1 - x2);
  const double p23 = (x2 * k3 - x3 * k2) / (x2 - x3);
  const double p123 = (x1 * p23 - x3 * p12) / (x1 - x3);
  CHECK(std::abs(k3 - target) > std::abs(p123 - target));  // it helps
  CHECK(std::abs(p123 - target) <= 1e-6);
}

TEST_CASE("theta-integral limit reproduces the low-dimension kernel") {
  for (const double theta : {0.0, 0.1, 0.25, 0.37, 0.5}) {
    CHECK(std::abs(periodized_kernel_limit(1, {theta}) -
                   closed_form_1d(theta)) <= 1e-9);
  }
  // d = 2: compare against a deep bare sum; its true error is far below the
  // geometric tail bound, so use a modest tolerance.
  const KernelValue deep =
      kernel_lowdim(make_query(2, {0.3, 0.1}, 0.0, 2000), 1);
  CHECK(std::abs(periodized_kernel_limit(2, {0.3, 0.1}) - deep.value) <= 1e-5);
}

TEST_CASE("theta-integral limit matches extrapolated mollified sums in d = 5") {
  const std::vector<double> theta{0.25, 0.0, 0.0, 0.0, 0.0};
  const double limit = periodized_kernel_limit(5, theta);
  const double k1 = kernel_mollified(make_query(5, theta, 0.4)).value;
  const double k2 = kernel_mollified(make_query(5, theta, 0.3)).value;
  const double k3 = kernel_mollified(make_query(5, theta, 0.2)).value;
  const double x1 = 0.16, x2 = 0.09, x3 = 0.04;
  const double p12 = (x1 * k2 - x2 * k1) / (x1 - x2);
  const double p23 = (x2 * k3 - x3 * k2) / (x2 - x3);
  const double p123 = (x1 * p23 - x3 * p12) / (x1 - x3);
  CHECK(std::abs(k3 - limit) > std::abs(p123 - limit));
  CHECK(std::abs(p123 - limit) <= 0.01 * std::abs(limit) + 0.01);
}

TEST_CASE("theta-integral limit diverges only at lattice points in high d") {
  CHECK_THROWS_AS(periodized_kernel_limit(5, {0.0, 0.0, 0.0, 0.0, 0.0}),
                  DivergentSum);
  CHECK_THROWS_AS(periodized_kernel_limit(4, {1.0, 0.0, 0.0, 0.0}),
                  DivergentSum);
  CHECK(std::isfinite(periodized_kernel_limit(3, {0.0, 0.0, 0.0})));
}

TEST_CASE("periodized singularity against brute-force image sums") {
  const std::vector<double> t5{0.1, 0.05, 0.0, 0.0, 0.0};
  for (long W : {1L, 2L}) {
    CHECK(periodized_singularity(5, t5, W) ==
          doctest::Approx(singularity_oracle(5, t5, W)).epsilon(1e-12));
  }
  const std::vector<double> t7{0.2, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0};
  CHECK(periodized_singularity(7, t7, 1) ==
        doctest::Approx(singularity_oracle(7, t7, 1)).epsilon(1e-12));
}

TEST_CASE("periodized singularity coefficient is pi^2 in d = 5") {
  // Single image at distance t: PS ~ pi^2 / t as t -> 0.
  const double t = 1e-6;
  const double ps = periodized_singularity(5, {t, 0.0, 0.0, 0.0, 0.0}, 1);
  CHECK(t * ps == doctest::Approx(kPi * kPi).epsilon(1e-3));
}

TEST_CASE("periodized singularity guards its domain") {
  CHECK_THROWS_AS(periodized_singularity(3, {0.1, 0.0, 0.0}, 1), UsageError);
  CHECK_THROWS_AS(periodized_singularity(5, {0.1, 0.0, 0.0, 0.0, 0.0}, 0),
                  UsageError);
  CHECK_THROWS_AS(
      periodized_singularity(5, {0.0, 0.0, 0.0, 0.0, 0.0}, 1), SingularPoint);
  CHECK_THROWS_AS(
      periodized_singularity(5, {1.0, 0.0, 0.0, 0.0, 0.0}, 1), SingularPoint);
}
