#include "gsqg/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <string>
#include <utility>

namespace gsqg {

namespace {

// Largest pointwise speed of the advecting velocity, used for CFL substeps.
double max_speed(const SpectralField& theta, double beta) {
  const VelocityField u = velocity(theta, beta);
  const PhysicalField ux = inverse_transform(u.x);
  const PhysicalField uy = inverse_transform(u.y);
  double m = 0.0;
  for (std::size_t i = 0; i < ux.values.size(); ++i) {
    m = std::max(m, std::hypot(ux.values[i], uy.values[i]));
  }
  return m;
}

// One classical RK4 step of theta' = B(theta).
SpectralField rk4_transport_step(const SpectralField& theta, double h, const ModelParams& p) {
  const SpectralField k1 = apply_B(theta, p);
  const SpectralField k2 = apply_B(theta + (h / 2.0) * k1, p);
  const SpectralField k3 = apply_B(theta + (h / 2.0) * k2, p);
  const SpectralField k4 = apply_B(theta + h * k3, p);
  SpectralField increment = k1 + k4;
  increment += 2.0 * (k2 + k3);
  return theta + (h / 6.0) * increment;
}

}  // namespace

void ModelParams::validate() const {
  if (!(alpha > 0.0 && alpha <= 2.0)) {
    throw DomainError("alpha must lie in (0, 2], got " + std::to_string(alpha));
  }
  if (!(beta >= 1.0 && beta <= 2.0)) {
    throw DomainError("beta must lie in [1, 2], got " + std::to_string(beta));
  }
}

void SubstepPolicy::validate() const {
  if (!(max_substep > 0.0) || !std::isfinite(max_substep)) {
    throw DomainError("max_substep must be positive and finite");
  }
  if (!(cfl_fraction > 0.0 && cfl_fraction <= 1.0)) {
    throw DomainError("cfl_fraction must lie in (0, 1], got " + std::to_string(cfl_fraction));
  }
}

SpectralField apply_A(const SpectralField& theta, const ModelParams& p) {
  p.validate();
  return -1.0 * fractional_laplacian(theta, p.alpha);
}

SpectralField apply_B(const SpectralField& theta, const ModelParams& p) {
  p.validate();
  const VelocityField u = velocity(theta, p.beta);
  const auto [gx, gy] = gradient(theta);
  SpectralField advection = product(u.x, gx);
  advection += product(u.y, gy);
  return -1.0 * advection;
}

SpectralField phi_A(double t, const SpectralField& theta, const ModelParams& p) {
  p.validate();
  if (!(t >= 0.0) || !std::isfinite(t)) {
    throw DomainError("diffusion flow time must be nonnegative and finite");
  }
  const Grid& grid = theta.grid();
  const int n = grid.n();
  SpectralField result(grid);
  for (int i1 = 0; i1 < n; ++i1) {
    const int k1 = grid.wavenumber(i1);
    for (int i2 = 0; i2 < n; ++i2) {
      const int k2 = grid.wavenumber(i2);
      const double kk = static_cast<double>(k1) * k1 + static_cast<double>(k2) * k2;
      const double decay = kk == 0.0 ? 1.0 : std::exp(-t * std::pow(kk, p.alpha / 2.0));
      result.at(k1, k2) = decay * theta.at(k1, k2);
    }
  }
  return result;
}

SpectralField phi_B(double t, const SpectralField& theta, const ModelParams& p,
                    const SubstepPolicy& policy) {
  p.validate();
  policy.validate();
  if (!(t >= 0.0) || !std::isfinite(t)) {
    throw DomainError("transport flow time must be nonnegative and finite");
  }
  if (t == 0.0) return theta;

  const double h3_before = sobolev_norm(theta, 3.0);
  const double dx = theta.grid().dx();
  SpectralField state = theta;
  double remaining = t;
  while (remaining > 0.0) {
    double h = std::min(policy.max_substep, remaining);
    const double speed = max_speed(state, p.beta);
    if (speed > 0.0) h = std::min(h, policy.cfl_fraction * dx / speed);
    if (h >= remaining * (1.0 - 1e-10)) h = remaining;
    if (h < 1e-12 * t) {
      throw ConfigError("transport substep " + std::to_string(h) +
                        " fell below 1e-12 of the flow time " + std::to_string(t));
    }
    state = rk4_transport_step(state, h, p);
    remaining -= h;
  }

  const double h3_after = sobolev_norm(state, 3.0);
  if (h3_after > 10.0 * std::max(h3_before, 1e-300)) {
    std::cerr << "phi_B: H^3 norm grew from " << h3_before << " to " << h3_after
              << " over t=" << t << "; the transport flow may be under-resolved\n";
  }
  return state;
}

SpectralField reference_step(const SpectralField& theta, double h, const ModelParams& p) {
  p.validate();
  if (!(h > 0.0) || !std::isfinite(h)) {
    throw DomainError("reference step size must be positive and finite");
  }
  // Integrating-factor RK4: the diffusion multiplier is folded into the
  // stages so only decaying exponentials appear.
  const auto half = [&](const SpectralField& f) { return phi_A(h / 2.0, f, p); };
  const auto full = [&](const SpectralField& f) { return phi_A(h, f, p); };

  const SpectralField a = apply_B(theta, p);
  const SpectralField e1_theta = half(theta);
  const SpectralField b = apply_B(half(theta + (h / 2.0) * a), p);
  const SpectralField c = apply_B(e1_theta + (h / 2.0) * b, p);
  const SpectralField e2_theta = full(theta);
  const SpectralField d = apply_B(e2_theta + h * half(c), p);

  SpectralField update = full(a) + 2.0 * half(b + c);
  update += d;
  return e2_theta + (h / 6.0) * update;
}

SpectralField reference_solve(double t, const SpectralField& theta0, const ModelParams& p,
                              double dt_ref) {
  p.validate();
  if (!(t >= 0.0) || !std::isfinite(t)) {
    throw DomainError("reference horizon must be nonnegative and finite");
  }
  if (t == 0.0) return theta0;
  if (!(dt_ref > 0.0) || !std::isfinite(dt_ref)) {
    throw DomainError("reference step size must be positive and finite");
  }
  const double steps_exact = t / dt_ref;
  const long long steps = std::llround(steps_exact);
  if (steps < 1 || std::abs(steps * dt_ref - t) > 1e-9 * std::max(1.0, t)) {
    throw ConfigError("reference step " + std::to_string(dt_ref) +
                      " does not divide the horizon " + std::to_string(t));
  }
  const double h = t / static_cast<double>(steps);
  SpectralField state = theta0;
  for (long long i = 0; i < steps; ++i) state = reference_step(state, h, p);
  return state;
}

}  // namespace gsqg
