// Godunov and Strang operator-splitting compositions and the time-marching
// driver. Godunov advances transport then diffusion once per step; Strang
// wraps a full diffusion step between two transport half-steps.
#pragma once

#include <string>
#include <vector>

#include "gsqg/dynamics.hpp"
#include "gsqg/spectral.hpp"

namespace gsqg {

enum class SchemeKind { Godunov, Strang };

std::string scheme_name(SchemeKind scheme);

// States recorded along one splitting run: times strictly increasing,
// times[0] = 0 with the initial datum, one state per time.
struct Trajectory {
  std::vector<double> times;
  std::vector<SpectralField> states;
  ModelParams params;
  SchemeKind scheme;
  double dt;

  const SpectralField& final_state() const { return states.back(); }
  double final_time() const { return times.back(); }
};

// theta -> Phi_A(dt, Phi_B(dt, theta)): transport first, then diffusion.
SpectralField godunov_step(const SpectralField& theta, double dt, const ModelParams& p,
                           const SubstepPolicy& policy);

// theta -> Phi_B(dt/2, Phi_A(dt, Phi_B(dt/2, theta))).
SpectralField strang_step(const SpectralField& theta, double dt, const ModelParams& p,
                          const SubstepPolicy& policy);

// Marches floor(T/dt) steps of the chosen scheme. Records the initial state,
// every requested snapshot time, and the final step. Snapshot times must lie
// on the step lattice within 1e-9 (ConfigError otherwise).
Trajectory evolve(SchemeKind scheme, const SpectralField& theta0, double T, double dt,
                  const ModelParams& p, const SubstepPolicy& policy,
                  const std::vector<double>& snapshot_times = {});

}  // namespace gsqg
