#include "gsqg/spectral.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <string>

namespace gsqg {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// FFTW planning is not reentrant, so plans are created once per grid size
// under a lock. Execution uses the new-array interface on caller-owned
// buffers, which is safe to run concurrently. FFTW_UNALIGNED keeps the plans
// valid for std::vector storage of any alignment.
struct PlanPair {
  fftw_plan forward;
  fftw_plan backward;
};

const PlanPair& plans_for(int n) {
  static std::mutex mu;
  static std::map<int, PlanPair> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(n);
  if (it == cache.end()) {
    const std::size_t m = static_cast<std::size_t>(n) * n;
    fftw_complex* a = fftw_alloc_complex(m);
    fftw_complex* b = fftw_alloc_complex(m);
    PlanPair plans;
    plans.forward =
        fftw_plan_dft_2d(n, n, a, b, FFTW_FORWARD, FFTW_ESTIMATE | FFTW_UNALIGNED);
    plans.backward =
        fftw_plan_dft_2d(n, n, a, b, FFTW_BACKWARD, FFTW_ESTIMATE | FFTW_UNALIGNED);
    fftw_free(a);
    fftw_free(b);
    it = cache.emplace(n, plans).first;
  }
  return it->second;
}

fftw_complex* as_fftw(Complex* p) { return reinterpret_cast<fftw_complex*>(p); }

void require_same_grid(const Grid& a, const Grid& b, const char* what) {
  if (a != b) {
    throw GridMismatchError(std::string(what) + ": fields live on different grids (" +
                            std::to_string(a.n()) + " vs " + std::to_string(b.n()) + ")");
  }
}

// x^e for integer e >= 0 by repeated multiplication, with 0^0 = 1.
double ipow(double x, int e) {
  double r = 1.0;
  for (int i = 0; i < e; ++i) r *= x;
  return r;
}

}  // namespace

Grid::Grid(int n) : n_(n) {
  if (n < 8 || n % 2 != 0) {
    throw DomainError("grid size must be even and at least 8, got " + std::to_string(n));
  }
}

double Grid::length() const { return kTwoPi; }
double Grid::dx() const { return kTwoPi / n_; }

PhysicalField::PhysicalField(Grid g, std::vector<double> v) : grid(g), values(std::move(v)) {
  if (values.size() != grid.size()) {
    throw DimensionError("sample array has " + std::to_string(values.size()) +
                         " entries, grid expects " + std::to_string(grid.size()));
  }
}

SpectralField::SpectralField(Grid g, std::vector<Complex> coeffs)
    : grid_(g), coeffs_(std::move(coeffs)) {
  if (coeffs_.size() != grid_.size()) {
    throw DimensionError("coefficient array has " + std::to_string(coeffs_.size()) +
                         " entries, grid expects " + std::to_string(grid_.size()));
  }
}

double SpectralField::max_abs_coeff() const {
  double m = 0.0;
  for (const Complex& c : coeffs_) m = std::max(m, std::abs(c));
  return m;
}

double SpectralField::relative_zero_mode() const {
  const double m = max_abs_coeff();
  if (m == 0.0) return 0.0;
  return std::abs(coeffs_[0]) / m;
}

bool SpectralField::all_finite() const {
  for (const Complex& c : coeffs_) {
    if (!std::isfinite(c.real()) || !std::isfinite(c.imag())) return false;
  }
  return true;
}

SpectralField& SpectralField::operator+=(const SpectralField& rhs) {
  require_same_grid(grid_, rhs.grid_, "operator+=");
  for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] += rhs.coeffs_[i];
  return *this;
}

SpectralField& SpectralField::operator-=(const SpectralField& rhs) {
  require_same_grid(grid_, rhs.grid_, "operator-=");
  for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] -= rhs.coeffs_[i];
  return *this;
}

SpectralField& SpectralField::operator*=(double s) {
  for (Complex& c : coeffs_) c *= s;
  return *this;
}

SpectralField operator+(SpectralField lhs, const SpectralField& rhs) { return lhs += rhs; }
SpectralField operator-(SpectralField lhs, const SpectralField& rhs) { return lhs -= rhs; }
SpectralField operator*(double s, SpectralField f) { return f *= s; }

SpectralField forward_transform(std::span<const double> samples, const Grid& grid) {
  if (samples.size() != grid.size()) {
    throw DimensionError("sample span has " + std::to_string(samples.size()) +
                         " entries, grid expects " + std::to_string(grid.size()));
  }
  for (double v : samples) {
    if (!std::isfinite(v)) throw DomainError("forward transform requires finite samples");
  }
  const int n = grid.n();
  std::vector<Complex> in(grid.size());
  for (std::size_t i = 0; i < samples.size(); ++i) in[i] = Complex{samples[i], 0.0};
  std::vector<Complex> out(grid.size());
  fftw_execute_dft(plans_for(n).forward, as_fftw(in.data()), as_fftw(out.data()));
  const double scale = 1.0 / static_cast<double>(grid.size());
  for (Complex& c : out) c *= scale;
  return SpectralField(grid, std::move(out));
}

SpectralField forward_transform(const PhysicalField& samples) {
  return forward_transform(std::span<const double>(samples.values), samples.grid);
}

PhysicalField inverse_transform(const SpectralField& f) {
  if (!f.all_finite()) throw DomainError("inverse transform requires finite coefficients");
  const Grid& grid = f.grid();
  std::vector<Complex> in(f.coeffs().begin(), f.coeffs().end());
  std::vector<Complex> out(grid.size());
  fftw_execute_dft(plans_for(grid.n()).backward, as_fftw(in.data()), as_fftw(out.data()));

  double max_abs = 0.0;
  double max_im = 0.0;
  for (const Complex& c : out) {
    max_abs = std::max(max_abs, std::abs(c));
    max_im = std::max(max_im, std::abs(c.imag()));
  }
  if (max_im > 1e-10 * max_abs) {
    throw SymmetryError("inverse transform of a non-real field: imaginary residue " +
                        std::to_string(max_im) + " against magnitude " +
                        std::to_string(max_abs));
  }

  PhysicalField result(grid);
  for (std::size_t i = 0; i < out.size(); ++i) result.values[i] = out[i].real();
  return result;
}

SpectralField fractional_laplacian(const SpectralField& f, double exponent) {
  if (!(exponent >= -2.0 && exponent <= 2.0)) {
    throw DomainError("fractional Laplacian exponent must lie in [-2, 2], got " +
                      std::to_string(exponent));
  }
  if (exponent < 0.0 && f.relative_zero_mode() > 1e-12) {
    throw MeanZeroError("negative-order fractional Laplacian requires a mean-zero field");
  }
  const Grid& grid = f.grid();
  const int n = grid.n();
  SpectralField result(grid);
  for (int i1 = 0; i1 < n; ++i1) {
    const int k1 = grid.wavenumber(i1);
    for (int i2 = 0; i2 < n; ++i2) {
      const int k2 = grid.wavenumber(i2);
      const double kk = static_cast<double>(k1) * k1 + static_cast<double>(k2) * k2;
      double mult;
      if (kk == 0.0) {
        mult = exponent == 0.0 ? 1.0 : 0.0;
      } else {
        mult = std::pow(kk, exponent / 2.0);
      }
      result.at(k1, k2) = mult * f.at(k1, k2);
    }
  }
  return result;
}

std::pair<SpectralField, SpectralField> gradient(const SpectralField& f) {
  const Grid& grid = f.grid();
  const int n = grid.n();
  SpectralField dx(grid);
  SpectralField dy(grid);
  for (int i1 = 0; i1 < n; ++i1) {
    const int k1 = grid.wavenumber(i1);
    for (int i2 = 0; i2 < n; ++i2) {
      const int k2 = grid.wavenumber(i2);
      const Complex c = f.at(k1, k2);
      dx.at(k1, k2) = Complex{0.0, static_cast<double>(k1)} * c;
      dy.at(k1, k2) = Complex{0.0, static_cast<double>(k2)} * c;
    }
  }
  return {std::move(dx), std::move(dy)};
}

VelocityField velocity(const SpectralField& theta, double beta) {
  if (!(beta >= 1.0 && beta <= 2.0)) {
    throw DomainError("velocity-law exponent beta must lie in [1, 2], got " +
                      std::to_string(beta));
  }
  if (theta.relative_zero_mode() > 1e-12) {
    throw MeanZeroError("velocity law requires a mean-zero scalar");
  }
  const Grid& grid = theta.grid();
  const int n = grid.n();
  SpectralField ux(grid);
  SpectralField uy(grid);
  for (int i1 = 0; i1 < n; ++i1) {
    const int k1 = grid.wavenumber(i1);
    for (int i2 = 0; i2 < n; ++i2) {
      const int k2 = grid.wavenumber(i2);
      const double kk = static_cast<double>(k1) * k1 + static_cast<double>(k2) * k2;
      if (kk == 0.0) continue;
      const Complex stream = std::pow(kk, -beta / 2.0) * theta.at(k1, k2);
      ux.at(k1, k2) = Complex{0.0, -static_cast<double>(k2)} * stream;
      uy.at(k1, k2) = Complex{0.0, static_cast<double>(k1)} * stream;
    }
  }
  return {std::move(ux), std::move(uy)};
}

SpectralField dealias(const SpectralField& f) {
  const Grid& grid = f.grid();
  const int n = grid.n();
  SpectralField result = f;
  for (int i1 = 0; i1 < n; ++i1) {
    const int k1 = grid.wavenumber(i1);
    for (int i2 = 0; i2 < n; ++i2) {
      const int k2 = grid.wavenumber(i2);
      const int kmax = std::max(std::abs(k1), std::abs(k2));
      if (3 * kmax > n) result.at(k1, k2) = Complex{0.0, 0.0};
    }
  }
  return result;
}

SpectralField product(const SpectralField& f, const SpectralField& g) {
  require_same_grid(f.grid(), g.grid(), "product");
  const PhysicalField pf = inverse_transform(f);
  const PhysicalField pg = inverse_transform(g);
  PhysicalField prod(f.grid());
  for (std::size_t i = 0; i < prod.values.size(); ++i) {
    prod.values[i] = pf.values[i] * pg.values[i];
  }
  return dealias(forward_transform(prod));
}

int band_limit(const SpectralField& f) {
  const double peak = f.max_abs_coeff();
  if (peak == 0.0) return 0;
  const double threshold = 1e-13 * peak;
  const Grid& grid = f.grid();
  const int n = grid.n();
  int band = 0;
  for (int i1 = 0; i1 < n; ++i1) {
    const int k1 = grid.wavenumber(i1);
    for (int i2 = 0; i2 < n; ++i2) {
      const int k2 = grid.wavenumber(i2);
      if (std::abs(f.at(k1, k2)) > threshold) {
        band = std::max(band, std::max(std::abs(k1), std::abs(k2)));
      }
    }
  }
  return band;
}

double sobolev_norm(const SpectralField& f, double s) {
  if (!(s >= -4.0 && s <= 12.0)) {
    throw DomainError("Sobolev order must lie in [-4, 12], got " + std::to_string(s));
  }
  const Grid& grid = f.grid();
  const int n = grid.n();
  double total = 0.0;
  for (int i1 = 0; i1 < n; ++i1) {
    const int k1 = grid.wavenumber(i1);
    for (int i2 = 0; i2 < n; ++i2) {
      const int k2 = grid.wavenumber(i2);
      const double kk = static_cast<double>(k1) * k1 + static_cast<double>(k2) * k2;
      const double weight = std::pow(1.0 + kk, s);
      total += weight * std::norm(f.at(k1, k2));
    }
  }
  return std::sqrt(total) * kTwoPi;
}

double derivative_sum_norm(const SpectralField& f, int k) {
  if (k < 0 || k > 12) {
    throw DomainError("derivative-sum order must lie in [0, 12], got " + std::to_string(k));
  }
  const Grid& grid = f.grid();
  const int n = grid.n();
  double total = 0.0;
  for (int i1 = 0; i1 < n; ++i1) {
    const int k1 = grid.wavenumber(i1);
    for (int i2 = 0; i2 < n; ++i2) {
      const int k2 = grid.wavenumber(i2);
      double weight = 0.0;
      for (int l1 = 0; l1 <= k; ++l1) {
        for (int l2 = 0; l2 + l1 <= k; ++l2) {
          weight += ipow(static_cast<double>(k1) * k1, l1) *
                    ipow(static_cast<double>(k2) * k2, l2);
        }
      }
      total += weight * std::norm(f.at(k1, k2));
    }
  }
  return std::sqrt(total) * kTwoPi;
}

}  // namespace gsqg
