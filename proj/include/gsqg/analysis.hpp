// Quantitative checks: the fractional Leibniz commutator G^alpha, error
// norms against reference solutions, and empirical convergence-order fits.
#pragma once

#include <map>
#include <string>
#include <vector>

#include "gsqg/splitting.hpp"

namespace gsqg {

// Error norms of one time step size, keyed by Sobolev order s.
struct ErrorSample {
  double dt;
  std::map<double, double> errors;
};

struct FitResult {
  double slope;
  double r_squared;
};

// Per-norm fit; degenerate fits (errors at the rounding floor or without
// dynamic range across the dt sweep) carry no slope.
struct NormFit {
  bool degenerate = false;
  FitResult fit{0.0, 0.0};
};

struct ConvergenceReport {
  SchemeKind scheme;
  ModelParams params;
  double T = 0.0;
  int grid_n = 0;
  std::vector<ErrorSample> samples;  // sorted by dt descending
  std::map<double, NormFit> fitted_order;
  std::vector<std::string> warnings;
};

// G^alpha(f,g) = Lambda^alpha(fg) - f Lambda^alpha g - g Lambda^alpha f,
// every product formed in physical space and dealiased. Bilinear and
// symmetric; under the multiplier convention G^2(f,g) = -2 grad f . grad g.
// Requires alpha in (0,2] and both fields band-limited to max|ki| <= n/4
// (BandLimitError otherwise) so the quadratic products are alias-free.
SpectralField commutator_G(const SpectralField& f, const SpectralField& g, double alpha);

// sobolev_norm(approx - ref, s); GridMismatchError on differing grids.
double error_norm(const SpectralField& approx, const SpectralField& ref, double s);

// Least-squares slope of log(error) vs log(dt) and the r^2 of the fit.
// Requires >= 3 samples with distinct dt carrying order s, all errors above
// the floating-point floor (DegenerateFitError otherwise).
FitResult fit_order(const std::vector<ErrorSample>& samples, double s);

// Runs every scheme against one shared reference solution computed at
// dt_ref = min(dt_list)/16 and fits the observed order per norm. dt_list
// needs >= 3 entries, each dividing T. Distinct dt values are evaluated
// concurrently when threads > 1 (0 picks a default).
std::vector<ConvergenceReport> run_studies(const std::vector<SchemeKind>& schemes,
                                           const SpectralField& theta0, double T,
                                           const std::vector<double>& dt_list,
                                           const ModelParams& p, const SubstepPolicy& policy,
                                           const std::vector<double>& norm_orders,
                                           int threads = 0);

// Single-scheme convenience wrapper around run_studies.
ConvergenceReport convergence_study(SchemeKind scheme, const SpectralField& theta0, double T,
                                    const std::vector<double>& dt_list, const ModelParams& p,
                                    const SubstepPolicy& policy,
                                    const std::vector<double>& norm_orders, int threads = 0);

}  // namespace gsqg
