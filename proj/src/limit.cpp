#include "dsod/limit.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <unordered_map>

#include "dsod/common.hpp"
#include "dsod/green.hpp"
#include "dsod/io.hpp"
#include "dsod/parallel.hpp"
#include "dsod/stats.hpp"

namespace dsod {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kTwoPi = 2.0 * kPi;

// Cell integral factor along one axis: int_{-1/2n}^{1/2n} e^{2 pi i nu t} dt.
double axis_factor(int nu, int n) {
  if (nu == 0) return 1.0 / n;
  return std::sin(kPi * static_cast<double>(nu) / n) / (kPi * nu);
}

bool same_nu(const std::vector<int>& a, const std::vector<int>& b) {
  return a == b;
}

std::vector<int> negated(const std::vector<int>& nu) {
  std::vector<int> m(nu.size());
  for (std::size_t i = 0; i < nu.size(); ++i) m[i] = -nu[i];
  return m;
}

}  // namespace

TestFunction TestFunction::make(int d, std::vector<Term> raw) {
  if (d < 1) throw UsageError("test function dimension must be >= 1");
  TestFunction u;
  u.d = d;
  for (auto& t : raw) {
    if (static_cast<int>(t.nu.size()) != d)
      throw UsageError("test function frequency has wrong dimension");
    if (std::all_of(t.nu.begin(), t.nu.end(), [](int k) { return k == 0; }))
      throw ZeroMeanViolation("test function must have zero mean (no DC term)");
    bool merged = false;
    for (auto& e : u.terms) {
      if (same_nu(e.nu, t.nu)) {
        e.coeff += t.coeff;
        merged = true;
        break;
      }
    }
    if (!merged) u.terms.push_back(t);
  }
  // Complete or verify conjugate partners; realness needs c(-nu) = conj(c(nu)).
  const std::size_t given = u.terms.size();
  for (std::size_t i = 0; i < given; ++i) {
    const auto neg = negated(u.terms[i].nu);
    bool found = false;
    for (std::size_t j = 0; j < u.terms.size(); ++j) {
      if (!same_nu(u.terms[j].nu, neg)) continue;
      found = true;
      if (std::abs(u.terms[j].coeff - std::conj(u.terms[i].coeff)) > 1e-12)
        throw UsageError("test function coefficients are not hermitian");
      break;
    }
    if (!found) u.terms.push_back({neg, std::conj(u.terms[i].coeff)});
  }
  if (u.terms.empty()) throw UsageError("test function has no terms");
  return u;
}

TestFunction TestFunction::parse(int d, const std::string& spec) {
  std::vector<Term> raw;
  std::stringstream entries(spec);
  std::string entry;
  while (std::getline(entries, entry, ',')) {
    if (entry.empty()) continue;
    const auto colon = entry.rfind(':');
    if (colon == std::string::npos)
      throw UsageError("test function term needs nu:coeff, got: " + entry);
    Term t;
    std::stringstream comps(entry.substr(0, colon));
    std::string c;
    while (std::getline(comps, c, '_')) {
      std::size_t used = 0;
      try {
        t.nu.push_back(std::stoi(c, &used));
      } catch (const std::exception&) {
        throw UsageError("bad frequency component: " + c);
      }
      if (used != c.size()) throw UsageError("bad frequency component: " + c);
    }
    const std::string cs = entry.substr(colon + 1);
    double re = 0.0, im = 0.0;
    std::size_t used = 0;
    try {
      re = std::stod(cs, &used);
    } catch (const std::exception&) {
      throw UsageError("bad coefficient: " + cs);
    }
    if (used < cs.size()) {
      std::string rest = cs.substr(used);
      if (rest.back() == 'i' || rest.back() == 'j') {
        rest.pop_back();
        try {
          im = rest.empty() || rest == "+" ? 1.0
               : rest == "-"               ? -1.0
                                           : std::stod(rest);
        } catch (const std::exception&) {
          throw UsageError("bad coefficient: " + cs);
        }
      } else {
        throw UsageError("bad coefficient: " + cs);
      }
    }
    t.coeff = {re, im};
    raw.push_back(std::move(t));
  }
  return make(d, std::move(raw));
}

double TestFunction::evaluate(const std::vector<double>& theta) const {
  std::complex<double> acc = 0.0;
  for (const auto& t : terms) {
    double phase = 0.0;
    for (int i = 0; i < d; ++i) phase += t.nu[static_cast<std::size_t>(i)] * theta[static_cast<std::size_t>(i)];
    acc += t.coeff * std::exp(std::complex<double>(0.0, kTwoPi * phase));
  }
  return acc.real();
}

std::string TestFunction::describe() const {
  std::ostringstream os;
  for (std::size_t i = 0; i < terms.size(); ++i) {
    if (i) os << ',';
    for (std::size_t j = 0; j < terms[i].nu.size(); ++j) {
      if (j) os << '_';
      os << terms[i].nu[j];
    }
    os << ':' << format_double(terms[i].coeff.real());
    if (terms[i].coeff.imag() != 0.0)
      os << (terms[i].coeff.imag() > 0 ? "+" : "")
         << format_double(terms[i].coeff.imag()) << 'i';
  }
  return os.str();
}

double sobolev_norm_minus1(const TestFunction& u) {
  double acc = 0.0;
  for (const auto& t : u.terms) {
    double n2 = 0.0;
    for (int k : t.nu) n2 += static_cast<double>(k) * k;
    acc += std::norm(t.coeff) / (n2 * n2);
  }
  return acc;
}

double cell_average_T(const TestFunction& u, const TorusLattice& lat,
                      std::size_t site) {
  std::vector<int> x(static_cast<std::size_t>(lat.d));
  lat.coords(site, x.data());
  std::complex<double> acc = 0.0;
  for (const auto& t : u.terms) {
    double phase = 0.0, fac = 1.0;
    for (int i = 0; i < lat.d; ++i) {
      phase += static_cast<double>(t.nu[static_cast<std::size_t>(i)]) *
               x[static_cast<std::size_t>(i)];
      fac *= axis_factor(t.nu[static_cast<std::size_t>(i)], lat.n);
    }
    acc += t.coeff * fac * std::exp(std::complex<double>(0.0, kTwoPi * phase / lat.n));
  }
  return acc.real();
}

double remainder_K(const TestFunction& u, const TorusLattice& lat,
                   std::size_t site) {
  std::vector<int> x(static_cast<std::size_t>(lat.d));
  lat.coords(site, x.data());
  std::vector<double> theta(static_cast<std::size_t>(lat.d));
  for (int i = 0; i < lat.d; ++i)
    theta[static_cast<std::size_t>(i)] =
        static_cast<double>(x[static_cast<std::size_t>(i)]) / lat.n;
  return static_cast<double>(lat.size) * cell_average_T(u, lat, site) -
         u.evaluate(theta);
}

double pair_field(const GridFunction& h, const TestFunction& u) {
  const TorusLattice& lat = h.lat;
  if (u.d != lat.d) throw UsageError("pairing: dimension mismatch");
  const double pref =
      4.0 * kPi * kPi *
      std::pow(static_cast<double>(lat.n), 0.5 * (lat.d - 4));
  // Accumulate per term: sum_x h(x) e^{2 pi i nu.x/n} is a DFT coefficient of
  // h at nu mod n, but a direct sweep is exact and cheap for few terms.
  std::complex<double> acc = 0.0;
  std::vector<int> x(static_cast<std::size_t>(lat.d), 0);
  for (std::size_t s = 0; s < lat.size; ++s) {
    lat.coords(s, x.data());
    for (const auto& t : u.terms) {
      double phase = 0.0, fac = 1.0;
      for (int i = 0; i < lat.d; ++i) {
        phase += static_cast<double>(t.nu[static_cast<std::size_t>(i)]) *
                 x[static_cast<std::size_t>(i)];
        fac *= axis_factor(t.nu[static_cast<std::size_t>(i)], lat.n);
      }
      acc += h.v[s] * t.coeff * fac *
             std::exp(std::complex<double>(0.0, kTwoPi * phase / lat.n));
    }
  }
  return pref * acc.real();
}

double odometer_pairing(const GridFunction& odometer, const TestFunction& u) {
  return pair_field(odometer, u) / (2.0 * odometer.lat.d);
}

double exact_pairing_variance(const TestFunction& u, const TorusLattice& lat) {
  if (u.d != lat.d) throw UsageError("pairing variance: dimension mismatch");
  // Fold terms onto frequency residues: That(w) = sum_{nu = w mod n} c prod fac.
  std::unordered_map<std::size_t, std::complex<double>> that;
  for (const auto& t : u.terms) {
    std::size_t flat = 0;
    double fac = 1.0;
    for (int i = 0; i < lat.d; ++i) {
      int r = t.nu[static_cast<std::size_t>(i)] % lat.n;
      if (r < 0) r += lat.n;
      flat = flat * static_cast<std::size_t>(lat.n) + static_cast<std::size_t>(r);
      fac *= axis_factor(t.nu[static_cast<std::size_t>(i)], lat.n);
    }
    that[flat] += t.coeff * fac;
  }
  double acc = 0.0;
  for (const auto& [w, c] : that) {
    if (w == 0) continue;  // the covariance has no flat mode
    const double se = sine_energy(lat, w);
    acc += std::norm(c) / (se * se);
  }
  return std::pow(kPi, 4) * std::pow(static_cast<double>(lat.n), 2.0 * lat.d - 4) *
         acc;
}

double exact_remainder_variance(const TestFunction& u,
                                const TorusLattice& lat) {
  if (u.d != lat.d) throw UsageError("remainder variance: dimension mismatch");
  GridFunction k(lat);
  for (std::size_t s = 0; s < lat.size; ++s) k.v[s] = remainder_K(u, lat, s);
  const ComplexGridFunction khat = dft(k);
  double acc = 0.0;
  for (std::size_t w = 1; w < lat.size; ++w) {
    const double se = sine_energy(lat, w);
    acc += std::norm(khat.v[w]) / (se * se);
  }
  return std::pow(kPi, 4) * std::pow(static_cast<double>(lat.n), -4) * acc;
}

std::vector<double> mc_w_pairings(const TorusLattice& lat,
                                  const WeightDistribution& dist,
                                  const TestFunction& u, long trials,
                                  std::uint64_t seed, int workers) {
  if (trials < 1) throw UsageError("trials must be >= 1");
  const GreenTable table = green_function(lat);
  std::vector<double> values(static_cast<std::size_t>(trials));
  parallel_for(trials, workers, [&](long i) {
    GaussianSource gauss(trial_stream(seed, static_cast<std::uint64_t>(i)));
    const GridFunction sigma = draw_weights(lat, dist, gauss);
    const GridFunction w = w_field(sigma, table);
    values[static_cast<std::size_t>(i)] = pair_field(w, u);
  });
  return values;
}

MomentEstimate empirical_moment(const TorusLattice& lat,
                                const WeightDistribution& dist,
                                const TestFunction& u, int m, long trials,
                                std::uint64_t seed, int workers) {
  if (m < 1) throw UsageError("moment order must be >= 1");
  const auto values = mc_w_pairings(lat, dist, u, trials, seed, workers);
  std::vector<double> powers(values.size());
  for (std::size_t i = 0; i < values.size(); ++i)
    powers[i] = std::pow(values[i], m);
  MomentEstimate est;
  est.value = mean(powers);
  est.se = standard_error(powers);
  est.trials = trials;
  return est;
}

SobolevNormEstimate sobolev_norm_field(const GridFunction& h, double eps,
                                       long M) {
  const TorusLattice& lat = h.lat;
  const double threshold = std::max(1.0 + lat.d / 4.0, lat.d / 2.0);
  if (eps <= threshold)
    throw EpsilonTooSmall("sobolev order eps = " + std::to_string(eps) +
                          " must exceed " + std::to_string(threshold) +
                          " for d = " + std::to_string(lat.d));
  if (M < lat.n) throw UsageError("frequency cutoff M must be >= n");

  const ComplexGridFunction hhat = dft(h);
  const double pref =
      4.0 * kPi * kPi *
      std::pow(static_cast<double>(lat.n), 0.5 * (lat.d - 4)) *
      static_cast<double>(lat.size);

  double acc = 0.0;
  std::vector<int> nu(static_cast<std::size_t>(lat.d), static_cast<int>(-M));
  for (;;) {
    bool all_zero = true;
    for (int k : nu) all_zero &= (k == 0);
    if (!all_zero) {
      double fac = 1.0, n2 = 0.0;
      std::size_t flat = 0;
      for (int i = 0; i < lat.d; ++i) {
        const int k = nu[static_cast<std::size_t>(i)];
        fac *= axis_factor(k, lat.n);
        n2 += static_cast<double>(k) * k;
        int r = k % lat.n;
        if (r < 0) r += lat.n;
        flat = flat * static_cast<std::size_t>(lat.n) + static_cast<std::size_t>(r);
      }
      acc += std::pow(n2, -eps) * std::norm(pref * fac * hhat.v[flat]);
    }
    int axis = lat.d - 1;
    while (axis >= 0 && nu[static_cast<std::size_t>(axis)] == static_cast<int>(M)) {
      nu[static_cast<std::size_t>(axis)] = static_cast<int>(-M);
      --axis;
    }
    if (axis < 0) break;
    ++nu[static_cast<std::size_t>(axis)];
  }

  // |Xihat(nu)| <= 4 pi^2 n^{(d-4)/2} sum_x |h(x)| / n^d uniformly in nu, and
  // the shell ||nu||_inf = k has at most 2d (3k)^{d-1} points with ||nu|| >= k.
  double l1 = 0.0;
  for (double v : h.v) l1 += std::abs(v);
  const double smax = 4.0 * kPi * kPi *
                      std::pow(static_cast<double>(lat.n), 0.5 * (lat.d - 4)) *
                      l1 / static_cast<double>(lat.size);
  const double shells = 2.0 * lat.d * std::pow(3.0, lat.d - 1) *
                        std::pow(static_cast<double>(M), lat.d - 2.0 * eps) /
                        (2.0 * eps - lat.d);

  SobolevNormEstimate out;
  out.value = acc;
  out.tail_bound = smax * smax * shells;
  out.cutoff = M;
  return out;
}

}  // namespace dsod
