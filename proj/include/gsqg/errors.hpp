// Exception types thrown across the library. Every failure mode named in an
// operation contract maps to one of these.
#pragma once

#include <stdexcept>
#include <string>

namespace gsqg {

struct Error : std::runtime_error {
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Shape of a sample array does not match its grid.
struct DimensionError : Error {
  using Error::Error;
};

// A field expected to be real in physical space is not (Hermitian symmetry
// of the coefficients is violated beyond tolerance).
struct SymmetryError : Error {
  using Error::Error;
};

// An operation requiring a mean-zero field received one with a nonzero mode.
struct MeanZeroError : Error {
  using Error::Error;
};

// A scalar argument is outside its admissible range (exponents, times).
struct DomainError : Error {
  using Error::Error;
};

// Invalid run configuration: substep underflow, off-lattice snapshot times,
// non-divisible horizons, malformed config documents.
struct ConfigError : Error {
  using Error::Error;
};

// Input field carries energy above the band limit required for alias-free
// quadratic products.
struct BandLimitError : Error {
  using Error::Error;
};

// Two fields that must share a grid do not.
struct GridMismatchError : Error {
  using Error::Error;
};

// Log-log order fit attempted on data at or below the floating-point floor.
struct DegenerateFitError : Error {
  using Error::Error;
};

}  // namespace gsqg
