#include "dsod/torus.hpp"

#include <fftw3.h>

#include <cmath>
#include <map>
#include <mutex>
#include <tuple>

namespace dsod {

namespace {

constexpr double kPi = 3.14159265358979323846;

// FFTW plan cache. Planning is not thread-safe and not free; execution via
// fftw_execute_dft on fresh buffers is both. Plans are created unaligned and
// out-of-place so they can run on any caller buffer pair.
class FftProvider {
 public:
  static FftProvider& instance() {
    static FftProvider p;
    return p;
  }

  void transform(const TorusLattice& lat, const std::complex<double>* in,
                 std::complex<double>* out, int sign) {
    fftw_plan plan = nullptr;
    {
      std::lock_guard<std::mutex> lock(mu_);
      const Key key{lat.d, lat.n, sign};
      auto it = plans_.find(key);
      if (it == plans_.end()) {
        std::vector<std::complex<double>> a(lat.size), b(lat.size);
        std::vector<int> dims(static_cast<std::size_t>(lat.d), lat.n);
        plan = fftw_plan_dft(lat.d, dims.data(),
                             reinterpret_cast<fftw_complex*>(a.data()),
                             reinterpret_cast<fftw_complex*>(b.data()), sign,
                             FFTW_ESTIMATE | FFTW_UNALIGNED | FFTW_PRESERVE_INPUT);
        if (plan == nullptr) throw SolveFailure("fft planning failed");
        plans_.emplace(key, plan);
      } else {
        plan = it->second;
      }
    }
    fftw_execute_dft(plan,
                     reinterpret_cast<fftw_complex*>(
                         const_cast<std::complex<double>*>(in)),
                     reinterpret_cast<fftw_complex*>(out));
  }

 private:
  using Key = std::tuple<int, int, int>;
  std::mutex mu_;
  std::map<Key, fftw_plan> plans_;
};

}  // namespace

TorusLattice TorusLattice::make(int d, int n) {
  if (d < 1 || n < 2) throw UsageError("lattice requires d >= 1 and n >= 2");
  std::size_t size = 1;
  for (int i = 0; i < d; ++i) {
    if (size > (std::size_t{1} << 31) / static_cast<std::size_t>(n))
      throw UsageError("lattice size n^d too large");
    size *= static_cast<std::size_t>(n);
  }
  TorusLattice lat;
  lat.d = d;
  lat.n = n;
  lat.size = size;
  return lat;
}

double laplacian_eigenvalue(const TorusLattice& lat, const int* a) {
  double s = 0.0;
  for (int i = 0; i < lat.d; ++i) {
    const double t = std::sin(kPi * static_cast<double>(a[i]) / lat.n);
    s += t * t;
  }
  return -4.0 * s;
}

double laplacian_eigenvalue(const TorusLattice& lat, std::size_t flat) {
  return -4.0 * sine_energy(lat, flat);
}

double sine_energy(const TorusLattice& lat, std::size_t flat) {
  double s = 0.0;
  for (int i = lat.d - 1; i >= 0; --i) {
    const int a = static_cast<int>(flat % static_cast<std::size_t>(lat.n));
    flat /= static_cast<std::size_t>(lat.n);
    const double t = std::sin(kPi * static_cast<double>(a) / lat.n);
    s += t * t;
  }
  return s;
}

ComplexGridFunction dft(const ComplexGridFunction& f) {
  ComplexGridFunction out(f.lat);
  FftProvider::instance().transform(f.lat, f.v.data(), out.v.data(), FFTW_FORWARD);
  const double scale = 1.0 / static_cast<double>(f.lat.size);
  for (auto& z : out.v) z *= scale;
  return out;
}

ComplexGridFunction dft(const GridFunction& f) {
  ComplexGridFunction c(f.lat);
  for (std::size_t i = 0; i < f.v.size(); ++i) c.v[i] = f.v[i];
  return dft(c);
}

ComplexGridFunction idft(const ComplexGridFunction& fhat) {
  ComplexGridFunction out(fhat.lat);
  FftProvider::instance().transform(fhat.lat, fhat.v.data(), out.v.data(),
                                    FFTW_BACKWARD);
  return out;
}

GridFunction real_part(const ComplexGridFunction& f, double tol, const char* what) {
  GridFunction out(f.lat);
  double worst = 0.0;
  for (std::size_t i = 0; i < f.v.size(); ++i) {
    worst = std::max(worst, std::abs(f.v[i].imag()));
    out.v[i] = f.v[i].real();
  }
  if (worst > tol)
    throw SolveFailure(std::string(what) + ": imaginary residue " +
                       std::to_string(worst) + " exceeds tolerance");
  return out;
}

GridFunction discrete_laplacian(const GridFunction& f) {
  const TorusLattice& lat = f.lat;
  GridFunction out(lat);
  for (std::size_t x = 0; x < lat.size; ++x) {
    double acc = -2.0 * lat.d * f.v[x];
    for (int axis = 0; axis < lat.d; ++axis) {
      acc += f.v[lat.neighbor(x, axis, +1)];
      acc += f.v[lat.neighbor(x, axis, -1)];
    }
    out.v[x] = acc;
  }
  return out;
}

EigenBoundScan scan_eigenvalue_bounds(const TorusLattice& lat) {
  constexpr double pi = 3.14159265358979323846;
  EigenBoundScan scan;
  scan.min_left_margin = HUGE_VAL;
  scan.min_lower_margin = HUGE_VAL;
  scan.max_c_required = -HUGE_VAL;
  const double n2 = static_cast<double>(lat.n) * lat.n;
  for (std::size_t a = 1; a < lat.size; ++a) {
    const double se = sine_energy(lat, a);
    const double w2 = FrequencyIndex::from_site(lat, a).centered_norm_sq(lat.n);
    scan.min_left_margin =
        std::min(scan.min_left_margin, pi * pi * w2 - n2 * se);
    scan.min_lower_margin = std::min(scan.min_lower_margin, n2 * se - 4.0 * w2);
    scan.max_c_required =
        std::max(scan.max_c_required, 1.0 / se - n2 / (pi * pi * w2));
  }
  return scan;
}

}  // namespace dsod
