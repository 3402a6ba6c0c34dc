// Spectral core: grids on the 2pi-periodic torus, complex Fourier
// coefficients of real scalar fields, FFT-backed transforms, Fourier
// multipliers (fractional Laplacian, derivatives, velocity law), two-thirds
// dealiasing, and Sobolev norms.
//
// Conventions used throughout:
//   * domain [0,2pi)^2, n uniform points per direction, integer wavenumbers
//     k = (k1,k2) with ki in [-n/2, n/2);
//   * a field f(x) = sum_k coeff(k) e^{i k.x}, so coeff(0) is the mean;
//   * the fractional Laplacian acts as coeff(k) -> |k|^a coeff(k);
//   * norms carry the (2pi)^2 domain measure so analytic test values match.
#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include "gsqg/errors.hpp"

namespace gsqg {

using Complex = std::complex<double>;

// Resolution and wavenumber bookkeeping for the periodic square.
class Grid {
 public:
  // n points per dimension; n >= 8 and even.
  explicit Grid(int n);

  int n() const { return n_; }
  double length() const;              // domain side, 2*pi
  double dx() const;                  // 2*pi / n
  std::size_t size() const { return static_cast<std::size_t>(n_) * n_; }

  // Storage index (row-major, k1 slow) <-> signed wavenumber.
  int wavenumber(int idx) const { return idx < n_ / 2 ? idx : idx - n_; }
  int index_of(int k) const { return k >= 0 ? k : k + n_; }
  std::size_t flat(int k1, int k2) const {
    return static_cast<std::size_t>(index_of(k1)) * n_ + index_of(k2);
  }

  bool operator==(const Grid& other) const { return n_ == other.n_; }
  bool operator!=(const Grid& other) const { return n_ != other.n_; }

 private:
  int n_;
};

// Real scalar samples on the uniform grid; values[ix*n + iy] is the sample
// at (x,y) = (2pi ix/n, 2pi iy/n).
struct PhysicalField {
  PhysicalField(Grid g, std::vector<double> v);
  explicit PhysicalField(Grid g) : grid(g), values(g.size(), 0.0) {}

  double& at(int ix, int iy) { return values[static_cast<std::size_t>(ix) * grid.n() + iy]; }
  double at(int ix, int iy) const { return values[static_cast<std::size_t>(ix) * grid.n() + iy]; }

  Grid grid;
  std::vector<double> values;
};

// Complex Fourier coefficients of a real scalar field. Real fields satisfy
// coeff(-k) = conj(coeff(k)); the inverse transform enforces this within
// tolerance rather than the constructor, so intermediate algebra stays cheap.
class SpectralField {
 public:
  explicit SpectralField(Grid g) : grid_(g), coeffs_(g.size(), Complex{0.0, 0.0}) {}
  SpectralField(Grid g, std::vector<Complex> coeffs);

  const Grid& grid() const { return grid_; }

  Complex& at(int k1, int k2) { return coeffs_[grid_.flat(k1, k2)]; }
  Complex at(int k1, int k2) const { return coeffs_[grid_.flat(k1, k2)]; }

  std::span<Complex> coeffs() { return coeffs_; }
  std::span<const Complex> coeffs() const { return coeffs_; }

  // Largest |coeff| over all modes.
  double max_abs_coeff() const;
  // |coeff(0,0)| relative to max_abs_coeff(); 0 for the zero field.
  double relative_zero_mode() const;
  bool all_finite() const;

  SpectralField& operator+=(const SpectralField& rhs);
  SpectralField& operator-=(const SpectralField& rhs);
  SpectralField& operator*=(double s);

 private:
  Grid grid_;
  std::vector<Complex> coeffs_;
};

SpectralField operator+(SpectralField lhs, const SpectralField& rhs);
SpectralField operator-(SpectralField lhs, const SpectralField& rhs);
SpectralField operator*(double s, SpectralField f);

// Divergence-free velocity produced by the velocity law.
struct VelocityField {
  SpectralField x;
  SpectralField y;
};

// -- Transforms --------------------------------------------------------------

// Samples -> coefficients; coeff(0,0) equals the mean of the samples.
// Throws DimensionError on grid/shape mismatch, DomainError on non-finite
// samples. Safe to call concurrently on distinct fields.
SpectralField forward_transform(const PhysicalField& samples);
SpectralField forward_transform(std::span<const double> samples, const Grid& grid);

// Coefficients -> real samples. The imaginary residue of the complex inverse
// must be <= 1e-10 relative to the field magnitude (Hermitian symmetry);
// otherwise throws SymmetryError.
PhysicalField inverse_transform(const SpectralField& f);

// -- Fourier multipliers ------------------------------------------------------

// coeff(k) -> |k|^exponent coeff(k) for k != 0. The zero mode maps to zero
// for any nonzero exponent and is preserved at exponent 0. For negative
// exponents the input must be mean-zero (relative zero mode <= 1e-12),
// else MeanZeroError. exponent must lie in [-2, 2], else DomainError.
SpectralField fractional_laplacian(const SpectralField& f, double exponent);

// (d/dx f, d/dy f): coefficient i*kj*coeff(k) per component.
std::pair<SpectralField, SpectralField> gradient(const SpectralField& f);

// u = curl Lambda^{-beta} theta with curl(phi) = (-phi_y, phi_x).
// beta in [1,2]; theta must be mean-zero. The result is divergence-free
// mode by mode.
VelocityField velocity(const SpectralField& theta, double beta);

// Two-thirds rule: zero every coefficient with max(|k1|,|k2|) > n/3.
SpectralField dealias(const SpectralField& f);

// Pointwise product computed in physical space, then dealiased. Inputs with
// support inside max|ki| <= n/3 yield an alias-free product. Throws
// GridMismatchError on differing grids.
SpectralField product(const SpectralField& f, const SpectralField& g);

// Largest max(|k1|,|k2|) over modes carrying more than 1e-13 of the peak
// coefficient magnitude; 0 for the zero field.
int band_limit(const SpectralField& f);

// -- Norms -------------------------------------------------------------------

// H^s norm via the multiplier form:
//   sqrt( sum_k (1+|k|^2)^s |coeff(k)|^2 (2pi)^2 ).
// s = 0 reproduces the L2 norm. s must lie in [-4, 12].
double sobolev_norm(const SpectralField& f, double s);

// H^k norm via the derivative-sum form:
//   norm^2 = sum over multi-indices l, |l| <= k, of ||D^l f||_{L2}^2.
// Equivalent but not equal to the multiplier form; kept for cross-checks.
// k must satisfy k <= 12.
double derivative_sum_norm(const SpectralField& f, int k);

}  // namespace gsqg
