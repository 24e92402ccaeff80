// Gaussian fields tied to the odometer law.
//
//   H(x,y) = (n^{-d}/16) sum_{a!=0} psi_a(y-x) / (sum_i sin^2(pi a_i/n))^2
//
// chi is the centered field with covariance H, synthesized spectrally:
//   chihat(a) = n^{-d/2} Z_a / (4 sum_i sin^2(pi a_i/n)),  chihat(0) = 0,
// with hermitian-paired unit complex gaussians Z_a (self-conjugate
// frequencies, 2a = 0 mod n, drawn real). eta adds an independent flat mode
// Y ~ N(0, (2d)^{-2} n^d L^2): eta = Y + chi, the law of the w-field.
//
// The raw dynamics odometer relates by e/(2d) = chi - min chi in law (the
// centering of the initial mass removes the Y mode; the 2d is the
// mass-per-directed-edge normalization).
#pragma once

#include <cstdint>

#include "dsod/green.hpp"
#include "dsod/rng.hpp"
#include "dsod/torus.hpp"

namespace dsod {

// Direct evaluation of H(x,y); O(size) per call.
double covariance_H(const TorusLattice& lat, std::size_t x, std::size_t y);

// row[y] = H(0,y) for table lookups; H(x,y) = row[(y-x) mod n].
GridFunction covariance_H_row(const TorusLattice& lat);

enum class FieldKind { chi, eta, w };

struct FieldSample {
  FieldKind kind = FieldKind::chi;
  GridFunction values;
  std::uint64_t seed = 0;
};

// Spectral synthesis; consumes gaussians from `gauss` in frequency storage
// order (two per conjugate pair at the pair's lower flat index, one per
// self-conjugate frequency). Same seed, same field.
GridFunction sample_chi(const TorusLattice& lat, GaussianSource& gauss);
FieldSample sample_chi(const TorusLattice& lat, std::uint64_t seed);

// Y is drawn first, then chi.
GridFunction sample_eta(const TorusLattice& lat, const GreenTable& table,
                        GaussianSource& gauss);
FieldSample sample_eta(const TorusLattice& lat, const GreenTable& table,
                       std::uint64_t seed);

}  // namespace dsod
