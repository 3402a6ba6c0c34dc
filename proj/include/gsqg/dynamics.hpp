// The two halves of the active scalar equation
//
//   theta_t + u . grad theta + Lambda^alpha theta = 0,   u = curl Lambda^{-beta} theta,
//
// split as C = A + B with A(theta) = -Lambda^alpha theta (fractional
// diffusion) and B(theta) = -u . grad theta (transport). Phi_A is the exact
// diffusion semigroup (diagonal multiplier e^{-t|k|^alpha}); Phi_B integrates
// the transport flow with CFL-substepped classical RK4. An unsplit
// integrating-factor RK4 provides the high-accuracy reference solution that
// convergence studies measure against.
#pragma once

#include "gsqg/spectral.hpp"

namespace gsqg {

struct ModelParams {
  double alpha;  // diffusion exponent, in (0, 2]
  double beta;   // velocity-law exponent, in [1, 2]

  void validate() const;  // DomainError outside the ranges above
};

// Internal stepping policy for the transport flow. The effective substep is
// min(max_substep, cfl_fraction * dx / max|u|, time remaining).
struct SubstepPolicy {
  double max_substep;
  double cfl_fraction = 0.5;

  // Default policy for advancing transport across one splitting step dt.
  static SubstepPolicy for_step(double dt) { return {dt / 8.0, 0.5}; }

  void validate() const;  // max_substep > 0, cfl_fraction in (0, 1]
};

// A(theta) = -Lambda^alpha theta.
SpectralField apply_A(const SpectralField& theta, const ModelParams& p);

// B(theta) = -curl Lambda^{-beta} theta . grad theta, with the quadratic
// product formed in physical space and dealiased. theta must be mean-zero;
// the output mean vanishes to rounding (divergence-free advection).
SpectralField apply_B(const SpectralField& theta, const ModelParams& p);

// Exact diffusion flow: coeff(k) -> e^{-t |k|^alpha} coeff(k). t >= 0.
SpectralField phi_A(double t, const SpectralField& theta, const ModelParams& p);

// Transport flow: advances theta' = B(theta) over duration t with classical
// RK4 substeps chosen by the policy. Conserves the L2 norm to integrator
// accuracy and the (zero) mean to rounding. Throws ConfigError if the policy
// yields a substep below 1e-12 * t. Prints a diagnostic to stderr if the H^3
// norm grows by more than 10x across the call.
SpectralField phi_B(double t, const SpectralField& theta, const ModelParams& p,
                    const SubstepPolicy& policy);

// One step of the unsplit integrating-factor RK4: the diffusion multiplier is
// applied exactly, RK4 handles the transformed transport term.
SpectralField reference_step(const SpectralField& theta, double h, const ModelParams& p);

// Unsplit reference solution at time t using steps of dt_ref. dt_ref must
// divide t within rounding (ConfigError otherwise).
SpectralField reference_solve(double t, const SpectralField& theta0, const ModelParams& p,
                              double dt_ref);

}  // namespace gsqg
