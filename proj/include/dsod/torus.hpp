// Discrete torus {0,...,n-1}^d: site indexing, frequency bookkeeping, the
// graph Laplacian, and the discrete Fourier transform pair.
//
// Conventions (used everywhere downstream):
//   character        psi_a(x) = exp(2 pi i x.a / n)
//   forward          fhat(a)  = n^{-d} sum_x f(x) psi_{-a}(x)
//   inverse          f(x)     = sum_a fhat(a) psi_a(x)
//   Laplacian        (Lap f)(x) = sum_{y~x} (f(y) - f(x)),  2d directed edges
//   eigenvalues      Lap psi_a = lambda_a psi_a,  lambda_a = -4 sum_i sin^2(pi a_i/n)
// Sites and frequencies share one flat row-major index (last axis fastest).
// For n = 2 the two directed edges of an axis reach the same site; the
// multiplicity is intentional and consistent with the eigenvalue formula.
#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <vector>

#include "dsod/common.hpp"

namespace dsod {

struct TorusLattice {
  int d = 1;
  int n = 2;
  std::size_t size = 2;  // n^d

  static TorusLattice make(int d, int n);

  std::size_t stride(int axis) const {
    std::size_t s = 1;
    for (int i = d - 1; i > axis; --i) s *= static_cast<std::size_t>(n);
    return s;
  }

  void coords(std::size_t site, int* out) const {
    for (int i = d - 1; i >= 0; --i) {
      out[i] = static_cast<int>(site % static_cast<std::size_t>(n));
      site /= static_cast<std::size_t>(n);
    }
  }

  std::size_t site(const int* c) const {
    std::size_t s = 0;
    for (int i = 0; i < d; ++i)
      s = s * static_cast<std::size_t>(n) + static_cast<std::size_t>(c[i]);
    return s;
  }

  // dir = +1 or -1 along `axis`.
  std::size_t neighbor(std::size_t site, int axis, int dir) const {
    const std::size_t str = stride(axis);
    const int c = static_cast<int>((site / str) % static_cast<std::size_t>(n));
    int cc = c + dir;
    if (cc < 0) cc += n;
    if (cc >= n) cc -= n;
    return site + (static_cast<std::size_t>(cc) - static_cast<std::size_t>(c)) * str;
  }

  bool operator==(const TorusLattice& o) const { return d == o.d && n == o.n; }
};

struct GridFunction {
  TorusLattice lat;
  std::vector<double> v;

  GridFunction() = default;
  explicit GridFunction(const TorusLattice& l) : lat(l), v(l.size, 0.0) {}
  double& operator[](std::size_t i) { return v[i]; }
  double operator[](std::size_t i) const { return v[i]; }
};

struct ComplexGridFunction {
  TorusLattice lat;
  std::vector<std::complex<double>> v;

  ComplexGridFunction() = default;
  explicit ComplexGridFunction(const TorusLattice& l) : lat(l), v(l.size) {}
};

// One frequency component in storage form k in [0,n); centered representative
// lives in (-n/2, n/2], ties at n/2 kept positive.
struct FrequencyIndex {
  std::vector<int> k;

  static int centered(int raw, int n) { return raw > n / 2 ? raw - n : raw; }

  static FrequencyIndex from_site(const TorusLattice& lat, std::size_t flat) {
    FrequencyIndex f;
    f.k.resize(static_cast<std::size_t>(lat.d));
    lat.coords(flat, f.k.data());
    return f;
  }

  double centered_norm_sq(int n) const {
    double s = 0.0;
    for (int raw : k) {
      const double c = centered(raw, n);
      s += c * c;
    }
    return s;
  }
};

// lambda_a = -4 sum_i sin^2(pi a_i / n); a given as raw storage components.
double laplacian_eigenvalue(const TorusLattice& lat, const int* a);
double laplacian_eigenvalue(const TorusLattice& lat, std::size_t flat);

// sum_i sin^2(pi a_i / n) = -lambda_a / 4, the quantity the covariance and
// kernel formulas divide by.
double sine_energy(const TorusLattice& lat, std::size_t flat);

ComplexGridFunction dft(const ComplexGridFunction& f);
ComplexGridFunction dft(const GridFunction& f);
ComplexGridFunction idft(const ComplexGridFunction& fhat);

// Extract the real part, asserting the imaginary residue is below tol.
GridFunction real_part(const ComplexGridFunction& f, double tol, const char* what);

GridFunction discrete_laplacian(const GridFunction& f);

// Exhaustive scan over a != 0 of the eigenvalue bounds, with w the centered
// representative of a:
//   left       pi^2 ||w||^2 - n^2 sum_i sin^2(pi a_i/n) >= 0
//   lower      n^2 sum_i sin^2(pi a_i/n) - 4 ||w||^2 >= 0
//   sandwich   n^{-2} (sum sin^2)^{-1} <= ||pi w||^{-2} + c n^{-2} needs
//              c >= 1/(sum sin^2) - n^2/(pi^2 ||w||^2); max_c_required is the
//              largest such threshold encountered.
struct EigenBoundScan {
  double min_left_margin = 0.0;
  double min_lower_margin = 0.0;
  double max_c_required = 0.0;
};

EigenBoundScan scan_eigenvalue_bounds(const TorusLattice& lat);

}  // namespace dsod
