#include "dsod/field.hpp"

#include <cmath>

#include "dsod/common.hpp"

namespace dsod {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

// Flat index of -a mod n, componentwise.
std::size_t negate_frequency(const TorusLattice& lat, std::size_t a) {
  std::size_t out = 0;
  std::size_t scale = 1;
  for (int i = 0; i < lat.d; ++i) {
    const auto k = static_cast<int>(a % static_cast<std::size_t>(lat.n));
    const int nk = k == 0 ? 0 : lat.n - k;
    out += static_cast<std::size_t>(nk) * scale;
    scale *= static_cast<std::size_t>(lat.n);
    a /= static_cast<std::size_t>(lat.n);
  }
  return out;
}

}  // namespace

double covariance_H(const TorusLattice& lat, std::size_t x, std::size_t y) {
  std::vector<int> cx(lat.d), cy(lat.d), cz(lat.d);
  lat.coords(x, cx.data());
  lat.coords(y, cy.data());
  double acc = 0.0;
  for (std::size_t z = 1; z < lat.size; ++z) {
    lat.coords(z, cz.data());
    double phase = 0.0;
    for (int i = 0; i < lat.d; ++i)
      phase += static_cast<double>((cy[i] - cx[i]) * cz[i]);
    const double se = sine_energy(lat, z);
    acc += std::cos(kTwoPi * phase / lat.n) / (se * se);
  }
  return acc / (16.0 * static_cast<double>(lat.size));
}

GridFunction covariance_H_row(const TorusLattice& lat) {
  ComplexGridFunction hhat(lat);
  hhat.v[0] = 0.0;
  const double norm = 1.0 / (16.0 * static_cast<double>(lat.size));
  for (std::size_t a = 1; a < lat.size; ++a) {
    const double se = sine_energy(lat, a);
    hhat.v[a] = norm / (se * se);
  }
  return real_part(idft(hhat), 1e-10, "covariance row synthesis");
}

GridFunction sample_chi(const TorusLattice& lat, GaussianSource& gauss) {
  ComplexGridFunction chihat(lat);
  chihat.v[0] = 0.0;
  const double amp = 1.0 / std::sqrt(static_cast<double>(lat.size));
  const double inv_sqrt2 = 0.70710678118654752440;
  for (std::size_t a = 1; a < lat.size; ++a) {
    const std::size_t b = negate_frequency(lat, a);
    const double c = amp / (4.0 * sine_energy(lat, a));
    if (b == a) {
      chihat.v[a] = c * gauss.next();  // self-conjugate: real N(0,1)
    } else if (a < b) {
      const double re = gauss.next();
      const double im = gauss.next();
      chihat.v[a] = c * inv_sqrt2 * std::complex<double>(re, im);
      chihat.v[b] = std::conj(chihat.v[a]);
    }
  }
  return real_part(idft(chihat), 1e-9, "chi synthesis");
}

FieldSample sample_chi(const TorusLattice& lat, std::uint64_t seed) {
  GaussianSource gauss(seed);
  FieldSample s;
  s.kind = FieldKind::chi;
  s.seed = seed;
  s.values = sample_chi(lat, gauss);
  return s;
}

GridFunction sample_eta(const TorusLattice& lat, const GreenTable& table,
                        GaussianSource& gauss) {
  if (!(lat == table.lat)) throw UsageError("sample_eta: lattice mismatch");
  const double sd =
      std::sqrt(static_cast<double>(lat.size)) * table.L / (2.0 * lat.d);
  const double y = sd * gauss.next();
  GridFunction eta = sample_chi(lat, gauss);
  for (auto& v : eta.v) v += y;
  return eta;
}

FieldSample sample_eta(const TorusLattice& lat, const GreenTable& table,
                       std::uint64_t seed) {
  GaussianSource gauss(seed);
  FieldSample s;
  s.kind = FieldKind::eta;
  s.seed = seed;
  s.values = sample_eta(lat, table, gauss);
  return s;
}

}  // namespace dsod
