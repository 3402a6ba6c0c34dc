#include "gsqg/splitting.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <string>

namespace gsqg {

std::string scheme_name(SchemeKind scheme) {
  switch (scheme) {
    case SchemeKind::Godunov: return "godunov";
    case SchemeKind::Strang: return "strang";
  }
  throw DomainError("unknown scheme");
}

SpectralField godunov_step(const SpectralField& theta, double dt, const ModelParams& p,
                           const SubstepPolicy& policy) {
  if (!(dt > 0.0) || !std::isfinite(dt)) {
    throw DomainError("splitting step size must be positive and finite");
  }
  return phi_A(dt, phi_B(dt, theta, p, policy), p);
}

SpectralField strang_step(const SpectralField& theta, double dt, const ModelParams& p,
                          const SubstepPolicy& policy) {
  if (!(dt > 0.0) || !std::isfinite(dt)) {
    throw DomainError("splitting step size must be positive and finite");
  }
  return phi_B(dt / 2.0, phi_A(dt, phi_B(dt / 2.0, theta, p, policy), p), p, policy);
}

Trajectory evolve(SchemeKind scheme, const SpectralField& theta0, double T, double dt,
                  const ModelParams& p, const SubstepPolicy& policy,
                  const std::vector<double>& snapshot_times) {
  p.validate();
  policy.validate();
  if (!(T >= 0.0) || !std::isfinite(T)) {
    throw DomainError("horizon must be nonnegative and finite");
  }
  if (!(dt > 0.0) || !std::isfinite(dt)) {
    throw DomainError("step size must be positive and finite");
  }
  if (dt > T * (1.0 + 1e-9)) {
    throw DomainError("step size dt=" + std::to_string(dt) + " exceeds the horizon T=" +
                      std::to_string(T));
  }

  const long long steps = static_cast<long long>(std::floor(T / dt + 1e-9));
  const double lattice_tol = 1e-9 * std::max(1.0, T);

  std::set<long long> record_at;
  record_at.insert(steps);
  for (double s : snapshot_times) {
    const long long j = std::llround(s / dt);
    if (j < 0 || j > steps || std::abs(s - static_cast<double>(j) * dt) > lattice_tol) {
      throw ConfigError("snapshot time " + std::to_string(s) +
                        " is not on the step lattice of dt=" + std::to_string(dt));
    }
    record_at.insert(j);
  }

  Trajectory traj;
  traj.params = p;
  traj.scheme = scheme;
  traj.dt = dt;
  traj.times.push_back(0.0);
  traj.states.push_back(theta0);

  SpectralField state = theta0;
  for (long long j = 1; j <= steps; ++j) {
    state = scheme == SchemeKind::Godunov ? godunov_step(state, dt, p, policy)
                                          : strang_step(state, dt, p, policy);
    if (record_at.count(j) != 0) {
      traj.times.push_back(static_cast<double>(j) * dt);
      traj.states.push_back(state);
    }
  }
  return traj;
}

}  // namespace gsqg
