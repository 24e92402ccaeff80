#include "dsod/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>

#include "dsod/common.hpp"
#include "dsod/parallel.hpp"

namespace dsod {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kTwoPi = 2.0 * kPi;

double pairwise_sum(const double* v, std::size_t n) {
  if (n == 0) return 0.0;
  if (n == 1) return v[0];
  const std::size_t h = n / 2;
  return pairwise_sum(v, h) + pairwise_sum(v + h, n - h);
}

struct Canon {
  int d = 0;
  std::vector<double> th;  // wrapped, exact zeros where negligible
  double kappa2 = 0.0;
  long cutoff = 0;
  int nonzero_axes = 0;
};

Canon canonicalize(const KernelQuery& q) {
  if (q.d < 1) throw UsageError("kernel dimension must be >= 1");
  if (!q.theta.empty() && static_cast<int>(q.theta.size()) != q.d)
    throw UsageError("theta has wrong dimension");
  if (q.kappa < 0.0) throw UsageError("kappa must be >= 0");
  Canon c;
  c.d = q.d;
  c.kappa2 = q.kappa * q.kappa;
  c.th.assign(static_cast<std::size_t>(q.d), 0.0);
  for (std::size_t i = 0; i < q.theta.size(); ++i) {
    double t = wrap_torus(q.theta[i]);
    if (std::abs(t) < 1e-15) t = 0.0;
    c.th[i] = t;
    if (t != 0.0) ++c.nonzero_axes;
  }
  c.cutoff = q.cutoff > 0 ? q.cutoff
             : q.kappa > 0.0 ? adaptive_cutoff(q.kappa)
                             : default_cutoff(q.d);
  return c;
}

// One ||w||_inf = k shell in a fixed order: pin the first axis attaining the
// sup norm, walk both signs, then run an odometer over the free axes.
double shell_sum(const Canon& c, long k) {
  const int d = c.d;
  double acc = 0.0;
  std::vector<long> w(static_cast<std::size_t>(d), 0);
  for (int pin = 0; pin < d; ++pin) {
    for (int sign = -1; sign <= 1; sign += 2) {
      for (int i = 0; i < d; ++i)
        w[static_cast<std::size_t>(i)] =
            i == pin ? sign * k : (i < pin ? -(k - 1) : -k);
      for (;;) {
        double n2 = 0.0, phase = 0.0;
        for (int i = 0; i < d; ++i) {
          const double wi = static_cast<double>(w[static_cast<std::size_t>(i)]);
          n2 += wi * wi;
          phase += c.th[static_cast<std::size_t>(i)] * wi;
        }
        double term = std::cos(kTwoPi * phase) / (n2 * n2);
        if (c.kappa2 > 0.0) term *= std::exp(-c.kappa2 * n2);
        acc += term;
        int a = d - 1;
        while (a >= 0) {
          if (a == pin) {
            --a;
            continue;
          }
          const long hi = a < pin ? k - 1 : k;
          if (w[static_cast<std::size_t>(a)] < hi) {
            ++w[static_cast<std::size_t>(a)];
            break;
          }
          w[static_cast<std::size_t>(a)] = -hi;
          --a;
        }
        if (a < 0) break;
      }
    }
  }
  return acc;
}

// Shell k holds at most 2d (3k)^{d-1} points, each with ||w|| >= k, so the
// omitted shells are dominated by a(k) = 2d 3^{d-1} k^{d-5} exp(-kappa2 k^2).
double tail_bound_beyond(const Canon& c, long M) {
  const double lead = 2.0 * c.d * std::pow(3.0, c.d - 1);
  if (c.kappa2 == 0.0) {
    if (c.d >= 4) return HUGE_VAL;
    return lead * std::pow(static_cast<double>(M), c.d - 4) / (4.0 - c.d);
  }
  const double a1 = lead * std::pow(static_cast<double>(M) + 1.0, c.d - 5) *
                    std::exp(-c.kappa2 * (M + 1.0) * (M + 1.0));
  const double r = std::pow(2.0, std::max(c.d - 5, 0)) *
                   std::exp(-c.kappa2 * (2.0 * M + 3.0));
  if (r >= 1.0) return HUGE_VAL;
  return a1 / (1.0 - r);
}

KernelValue sum_by_shells(const Canon& c, int workers) {
  const long M = c.cutoff;
  std::vector<double> slots(static_cast<std::size_t>(M), 0.0);
  parallel_for(M, workers, [&](long i) {
    slots[static_cast<std::size_t>(i)] = shell_sum(c, i + 1);
  });
  KernelValue out;
  out.value = pairwise_sum(slots.data(), slots.size());
  out.tail_bound = tail_bound_beyond(c, M);
  out.cutoff = M;
  return out;
}

// Gaussian theta function vartheta(th, t) = sum_k exp(-t k^2) e^{2 pi i k th},
// evaluated through its modular image for small t.
double theta_axis(double th, double t) {
  if (t >= kPi) {
    double s = 1.0;
    for (int k = 1; k <= 8; ++k) {
      const double e = std::exp(-t * k * k);
      if (e < 1e-22) break;
      s += 2.0 * e * std::cos(kTwoPi * k * th);
    }
    return s;
  }
  double s = 0.0;
  for (int m = -6; m <= 6; ++m) {
    const double x = th + m;
    s += std::exp(-kPi * kPi * x * x / t);
  }
  return std::sqrt(kPi / t) * s;
}

// 16-point Gauss-Legendre rule on [-1, 1] (positive abscissae half).
constexpr double kGlx[8] = {
    0.0950125098376374, 0.2816035507792589, 0.4580167776572274,
    0.6178762444026438, 0.7554044083550030, 0.8656312023878318,
    0.9445750230732326, 0.9894009349916499};
constexpr double kGlw[8] = {
    0.1894506104550685, 0.1826034150449236, 0.1691565193950025,
    0.1495959888165767, 0.1246289712555339, 0.0951585116824928,
    0.0622535239386479, 0.0271524594117541};

}  // namespace

double wrap_torus(double x) { return x - std::floor(x + 0.5); }

long default_cutoff(int d) {
  if (d <= 1) return 10000;
  if (d <= 3) return 200;
  return 64;
}

long adaptive_cutoff(double kappa) {
  if (kappa <= 0.0) throw UsageError("adaptive cutoff needs kappa > 0");
  // exp(-kappa^2 (2M+1)) <= 1e-10 makes the geometric tail estimate at most
  // 1e-10 of the last included shell.
  const double m = std::ceil(std::log(1e10) / (2.0 * kappa * kappa) - 0.5);
  return std::max(8L, static_cast<long>(m));
}

KernelValue kernel_lowdim(const KernelQuery& q, int workers) {
  if (q.d >= 4)
    throw DivergentSum(
        "the bare frequency sum diverges for d >= 4; use the mollified sum");
  if (q.kappa != 0.0)
    throw UsageError("bare sum takes kappa = 0; use kernel_mollified");
  return sum_by_shells(canonicalize(q), workers);
}

namespace detail {

KernelValue kernel_mollified_direct(const KernelQuery& q, int workers) {
  return sum_by_shells(canonicalize(q), workers);
}

KernelValue kernel_mollified_collapsed(const KernelQuery& q, int workers) {
  const Canon c = canonicalize(q);
  if (c.nonzero_axes > 1)
    throw UsageError("collapsed kernel sum needs theta on at most one axis");
  const long M = c.cutoff;

  // Fold the zero axes of theta into representation counts: R[s] = number of
  // integer vectors over those axes with entries in [-M, M] and norm^2 = s.
  int pin = -1;
  int zero_axes = 0;
  for (int i = 0; i < c.d; ++i) {
    if (c.th[static_cast<std::size_t>(i)] != 0.0)
      pin = i;
    else
      ++zero_axes;
  }
  const long smax = static_cast<long>(zero_axes) * M * M;
  std::vector<double> r(static_cast<std::size_t>(smax) + 1, 0.0);
  std::vector<double> tmp(r.size());
  r[0] = 1.0;
  long cur = 0;
  for (int a = 0; a < zero_axes; ++a) {
    std::fill(tmp.begin(), tmp.end(), 0.0);
    for (long j = 0; j <= M; ++j) {
      const double wj = j == 0 ? 1.0 : 2.0;
      const long j2 = j * j;
      for (long s = 0; s <= cur; ++s) {
        const double rs = r[static_cast<std::size_t>(s)];
        if (rs != 0.0) tmp[static_cast<std::size_t>(s + j2)] += wj * rs;
      }
    }
    cur += M * M;
    std::swap(r, tmp);
  }
  for (long s = 0; s <= smax; ++s)
    r[static_cast<std::size_t>(s)] *= std::exp(-c.kappa2 * s);

  KernelValue out;
  out.cutoff = M;
  out.tail_bound = tail_bound_beyond(c, M);
  if (pin < 0) {
    double acc = 0.0;
    for (long s = 1; s <= smax; ++s) {
      const double ps = r[static_cast<std::size_t>(s)];
      if (ps != 0.0) acc += ps / (static_cast<double>(s) * s);
    }
    out.value = acc;
    return out;
  }

  const double tp = c.th[static_cast<std::size_t>(pin)];
  std::vector<double> slots(static_cast<std::size_t>(M) + 1, 0.0);
  parallel_for(M + 1, workers, [&](long k) {
    const double q2 = static_cast<double>(k) * k;
    double inner = 0.0;
    for (long s = k == 0 ? 1 : 0; s <= smax; ++s) {
      const double ps = r[static_cast<std::size_t>(s)];
      if (ps != 0.0) {
        const double den = q2 + static_cast<double>(s);
        inner += ps / (den * den);
      }
    }
    const double factor =
        k == 0 ? 1.0
               : 2.0 * std::cos(kTwoPi * tp * k) * std::exp(-c.kappa2 * q2);
    slots[static_cast<std::size_t>(k)] = factor * inner;
  });
  out.value = pairwise_sum(slots.data(), slots.size());
  return out;
}

}  // namespace detail

KernelValue kernel_mollified(const KernelQuery& q, int workers) {
  if (q.kappa <= 0.0)
    throw UsageError("mollified sum needs kappa > 0");
  const Canon c = canonicalize(q);
  const double points = std::pow(2.0 * c.cutoff + 1.0, c.d);
  if (points <= 3.5e8) return detail::kernel_mollified_direct(q, workers);
  if (c.nonzero_axes <= 1)
    return detail::kernel_mollified_collapsed(q, workers);
  throw UsageError(
      "cutoff " + std::to_string(c.cutoff) + " needs about " +
      std::to_string(points) +
      " lattice points at this theta; align theta with one axis or pass a "
      "smaller explicit cutoff");
}

double periodized_singularity(int d, const std::vector<double>& theta,
                              long shells) {
  if (d < 5) throw UsageError("periodized singularity is defined for d >= 5");
  if (shells < 1) throw UsageError("need at least one image shell");
  if (!theta.empty() && static_cast<int>(theta.size()) != d)
    throw UsageError("theta has wrong dimension");
  std::vector<double> th(static_cast<std::size_t>(d), 0.0);
  bool lattice_point = true;
  for (std::size_t i = 0; i < theta.size(); ++i) {
    th[i] = wrap_torus(theta[i]);
    if (std::abs(th[i]) > 1e-15) lattice_point = false;
  }
  if (lattice_point)
    throw SingularPoint("theta is a lattice point; ||theta + w||^{4-d} blows up");

  const double coeff =
      std::pow(kPi, 4.0 - 0.5 * d) * std::tgamma(0.5 * (d - 4));
  const long W = shells;
  std::vector<long> w(static_cast<std::size_t>(d), -W);
  double acc = 0.0;
  for (;;) {
    double r2 = 0.0;
    for (int i = 0; i < d; ++i) {
      const double x = th[static_cast<std::size_t>(i)] +
                       static_cast<double>(w[static_cast<std::size_t>(i)]);
      r2 += x * x;
    }
    acc += std::pow(r2, 0.5 * (4 - d));
    int a = d - 1;
    while (a >= 0 && w[static_cast<std::size_t>(a)] == W) {
      w[static_cast<std::size_t>(a)] = -W;
      --a;
    }
    if (a < 0) break;
    ++w[static_cast<std::size_t>(a)];
  }
  return coeff * acc;
}

double periodized_kernel_limit(int d, const std::vector<double>& theta) {
  if (d < 1) throw UsageError("kernel dimension must be >= 1");
  if (!theta.empty() && static_cast<int>(theta.size()) != d)
    throw UsageError("theta has wrong dimension");
  std::vector<double> th(static_cast<std::size_t>(d), 0.0);
  double norm2 = 0.0;
  for (std::size_t i = 0; i < theta.size(); ++i) {
    th[i] = wrap_torus(theta[i]);
    if (std::abs(th[i]) < 1e-15) th[i] = 0.0;
    norm2 += th[i] * th[i];
  }
  if (norm2 == 0.0 && d >= 4)
    throw DivergentSum("the kernel limit diverges at lattice points for d >= 4");

  // K(theta) = int t (prod_i vartheta(th_i, t) - 1) dt over t in (0, inf),
  // integrated in u = log t.  Below u_min the product is numerically zero
  // (theta != 0), so that stretch contributes the analytic -e^{2 u_min}/2.
  const double u_max = 4.2;
  double u_min, left;
  if (norm2 == 0.0) {
    u_min = -14.0 * std::log(10.0) / (2.0 - 0.5 * d) - 5.0;
    left = 0.0;
  } else {
    u_min = std::min(-25.0, std::log(kPi * kPi * norm2) - 14.0);
    left = -0.5 * std::exp(2.0 * u_min);
  }

  const auto integrand = [&](double u) {
    const double t = std::exp(u);
    double prod = 1.0;
    for (int i = 0; i < d; ++i)
      prod *= theta_axis(th[static_cast<std::size_t>(i)], t);
    return std::exp(2.0 * u) * (prod - 1.0);
  };
  const auto integrate = [&](long panels) {
    const double h = (u_max - u_min) / static_cast<double>(panels);
    std::vector<double> acc(static_cast<std::size_t>(panels), 0.0);
    for (long p = 0; p < panels; ++p) {
      const double mid = u_min + (p + 0.5) * h;
      double s = 0.0;
      for (int j = 0; j < 8; ++j)
        s += kGlw[j] * (integrand(mid + 0.5 * h * kGlx[j]) +
                        integrand(mid - 0.5 * h * kGlx[j]));
      acc[static_cast<std::size_t>(p)] = 0.5 * h * s;
    }
    return pairwise_sum(acc.data(), acc.size());
  };

  long panels = static_cast<long>(std::ceil((u_max - u_min) / 0.5));
  double prev = integrate(panels);
  for (int round = 0; round < 10; ++round) {
    panels *= 2;
    const double next = integrate(panels);
    if (std::abs(next - prev) <= 1e-11 * (1.0 + std::abs(next)))
      return next + left;
    prev = next;
  }
  throw SolveFailure("kernel limit quadrature did not settle");
}

}  // namespace dsod
