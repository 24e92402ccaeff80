// Small statistics helpers shared by the Monte Carlo drivers and tests.
// All reductions here are sequential over the input order, so results do not
// depend on how many workers produced the values.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <vector>

namespace dsod {

inline double mean(const std::vector<double>& xs) {
  double s = 0.0;
  for (double x : xs) s += x;
  return s / static_cast<double>(xs.size());
}

// Unbiased sample variance.
inline double sample_variance(const std::vector<double>& xs) {
  const double m = mean(xs);
  double s = 0.0;
  for (double x : xs) s += (x - m) * (x - m);
  return s / static_cast<double>(xs.size() - 1);
}

// Standard error of the sample mean.
inline double standard_error(const std::vector<double>& xs) {
  return std::sqrt(sample_variance(xs) / static_cast<double>(xs.size()));
}

// (k)!! for odd k; (2k-1)!! counts pairings of 2k items.
inline double double_factorial(int k) {
  double r = 1.0;
  for (int i = k; i >= 2; i -= 2) r *= i;
  return r;
}

inline std::vector<double> ranks(const std::vector<double>& xs) {
  const std::size_t n = xs.size();
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::stable_sort(idx.begin(), idx.end(),
                   [&](std::size_t a, std::size_t b) { return xs[a] < xs[b]; });
  std::vector<double> r(n);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && xs[idx[j + 1]] == xs[idx[i]]) ++j;
    const double avg = 0.5 * static_cast<double>(i + j) + 1.0;  // mid-rank ties
    for (std::size_t k = i; k <= j; ++k) r[idx[k]] = avg;
    i = j + 1;
  }
  return r;
}

inline double pearson(const std::vector<double>& x, const std::vector<double>& y) {
  const double mx = mean(x), my = mean(y);
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0.0 || syy == 0.0) return 0.0;
  return sxy / std::sqrt(sxx * syy);
}

inline double spearman_rho(const std::vector<double>& x, const std::vector<double>& y) {
  const auto rx = ranks(x), ry = ranks(y);
  return pearson(rx, ry);
}

// Exact one-sided permutation p-value for positive Spearman association,
// P(rho_perm >= rho_observed) under uniform rank permutations. Only intended
// for short series (n <= 8: at most 8! = 40320 permutations).
inline double spearman_p_positive(const std::vector<double>& x,
                                  const std::vector<double>& y) {
  const std::size_t n = x.size();
  const auto rx = ranks(x);
  auto ry = ranks(y);
  const double observed = pearson(rx, ry);
  std::sort(ry.begin(), ry.end());
  long total = 0, at_least = 0;
  do {
    ++total;
    if (pearson(rx, ry) >= observed - 1e-12) ++at_least;
  } while (std::next_permutation(ry.begin(), ry.end()));
  (void)n;
  return static_cast<double>(at_least) / static_cast<double>(total);
}

}  // namespace dsod
