#include <cmath>
#include <vector>

#include <doctest.h>

#include "gsqg/dynamics.hpp"
#include "test_util.hpp"

using namespace gsqg;
using test::classic_shear_field;
using test::cosine_mode;
using test::field_from;
using test::identical_coeffs;
using test::max_coeff_diff;
using test::random_field;

TEST_SUITE("dynamics") {

TEST_CASE("parameter ranges are enforced") {
  CHECK_NOTHROW((ModelParams{2.0, 1.0}).validate());
  CHECK_NOTHROW((ModelParams{0.1, 2.0}).validate());
  CHECK_THROWS_AS((ModelParams{0.0, 1.0}).validate(), DomainError);
  CHECK_THROWS_AS((ModelParams{2.1, 1.0}).validate(), DomainError);
  CHECK_THROWS_AS((ModelParams{1.0, 0.9}).validate(), DomainError);
  CHECK_THROWS_AS((ModelParams{1.0, 2.1}).validate(), DomainError);

  CHECK_NOTHROW((SubstepPolicy{0.01, 1.0}).validate());
  CHECK_THROWS_AS((SubstepPolicy{0.0, 0.5}).validate(), DomainError);
  CHECK_THROWS_AS((SubstepPolicy{0.01, 0.0}).validate(), DomainError);
  CHECK_THROWS_AS((SubstepPolicy{0.01, 1.5}).validate(), DomainError);

  const SubstepPolicy def = SubstepPolicy::for_step(0.8);
  CHECK(def.max_substep == doctest::Approx(0.1).epsilon(1e-15));
  CHECK(def.cfl_fraction == 0.5);
}

TEST_CASE("diffusion right-hand side is the negated multiplier") {
  const Grid grid(16);
  const SpectralField cosx = cosine_mode(grid, 1, 0);
  for (double alpha : {0.5, 1.0, 2.0}) {
    CHECK(max_coeff_diff(apply_A(cosx, ModelParams{alpha, 1.0}), -1.0 * cosx) <= 1e-15);
  }

  SpectralField constant(grid);
  constant.at(0, 0) = Complex{4.0, 0.0};
  CHECK(apply_A(constant, ModelParams{1.0, 1.0}).max_abs_coeff() == 0.0);

  const SpectralField cos2x = cosine_mode(grid, 2, 0);
  CHECK(max_coeff_diff(apply_A(cos2x, ModelParams{2.0, 1.0}), -4.0 * cos2x) <= 1e-15);
}

TEST_CASE("transport right-hand side on worked single-mode data") {
  const Grid grid(32);
  const ModelParams p{1.0, 1.0};

  // u and grad theta are orthogonal mode by mode, so B vanishes exactly
  CHECK(apply_B(cosine_mode(grid, 1, 0), p).max_abs_coeff() == 0.0);

  const SpectralField two_mode = cosine_mode(grid, 1, 0) + cosine_mode(grid, 0, 1);
  CHECK(apply_B(two_mode, p).max_abs_coeff() <= 1e-14);

  const SpectralField skew = cosine_mode(grid, 1, 0) + cosine_mode(grid, 0, 2);
  const SpectralField expected =
      field_from(grid, [](double x, double y) { return -std::sin(x) * std::sin(2 * y); });
  CHECK(max_coeff_diff(apply_B(skew, p), expected) <= 1e-13);
}

TEST_CASE("transport right-hand side stays mean-free") {
  const Grid grid(32);
  for (std::uint64_t seed = 1; seed <= 3; ++seed) {
    const SpectralField f = random_field(grid, seed, 10);
    const SpectralField b = apply_B(f, ModelParams{1.0, 1.5});
    CHECK(std::abs(b.at(0, 0)) <= 1e-12 * b.max_abs_coeff());
  }

  SpectralField with_mean = random_field(grid, 4, 8);
  with_mean.at(0, 0) = Complex{1.0, 0.0};
  CHECK_THROWS_AS(apply_B(with_mean, ModelParams{1.0, 1.0}), MeanZeroError);
}

TEST_CASE("diffusion flow matches the exponential multiplier") {
  const Grid grid(16);
  const SpectralField cosx = cosine_mode(grid, 1, 0);
  for (double alpha : {0.5, 1.0, 1.5, 2.0}) {
    for (double t : {0.3, 1.0}) {
      const SpectralField out = phi_A(t, cosx, ModelParams{alpha, 1.0});
      CHECK(max_coeff_diff(out, std::exp(-t) * cosx) <= 1e-15);
    }
  }

  const SpectralField cos2x = cosine_mode(grid, 2, 0);
  const SpectralField half = phi_A(0.5, cos2x, ModelParams{2.0, 1.0});
  CHECK(max_coeff_diff(half, std::exp(-2.0) * cos2x) <= 1e-15);

  const SpectralField any = random_field(grid, 6, 5);
  CHECK(identical_coeffs(phi_A(0.0, any, ModelParams{1.0, 1.0}), any));
  CHECK_THROWS_AS(phi_A(-0.1, any, ModelParams{1.0, 1.0}), DomainError);
}

TEST_CASE("diffusion flow is a semigroup and dissipates every norm") {
  const Grid grid(32);
  const SpectralField f = random_field(grid, 8, 10);
  const ModelParams p{1.5, 1.0};

  const SpectralField split = phi_A(0.4, phi_A(0.3, f, p), p);
  const SpectralField joint = phi_A(0.7, f, p);
  CHECK(max_coeff_diff(split, joint) <= 1e-13 * joint.max_abs_coeff());

  for (double s : {0.0, 2.0}) {
    double previous = sobolev_norm(f, s);
    for (int i = 1; i <= 10; ++i) {
      const double current = sobolev_norm(phi_A(0.1 * i, f, p), s);
      CHECK(current <= previous);
      previous = current;
    }
  }
}

TEST_CASE("transport flow fixes steady states exactly") {
  const Grid grid(16);
  const SpectralField cosx = cosine_mode(grid, 1, 0);
  const ModelParams p{1.0, 1.0};
  for (double t : {0.25, 1.0}) {
    const SpectralField out = phi_B(t, cosx, p, SubstepPolicy::for_step(t));
    CHECK(identical_coeffs(out, cosx));
  }
  CHECK(identical_coeffs(phi_B(0.0, cosx, p, SubstepPolicy::for_step(1.0)), cosx));
}

TEST_CASE("transport flow conserves the L2 norm and the mean") {
  const Grid grid(128);
  const SpectralField theta0 = classic_shear_field(grid);
  const SpectralField out =
      phi_B(1.0, theta0, ModelParams{1.0, 1.0}, SubstepPolicy::for_step(1.0));

  const double before = sobolev_norm(theta0, 0.0);
  const double after = sobolev_norm(out, 0.0);
  CHECK(std::abs(after - before) <= 1e-8 * before);
  CHECK(out.relative_zero_mode() <= 1e-12);
}

TEST_CASE("transport flow rejects substeps at the rounding floor") {
  const Grid grid(16);
  const SpectralField f = random_field(grid, 14, 4);
  CHECK_THROWS_AS(phi_B(1.0, f, ModelParams{1.0, 1.0}, SubstepPolicy{1e-13, 0.5}), ConfigError);
}

TEST_CASE("reference integrator reproduces the diffusion-only solution") {
  const Grid grid(16);
  const SpectralField cosx = cosine_mode(grid, 1, 0);
  const ModelParams p{1.0, 1.0};

  const SpectralField out = reference_solve(0.5, cosx, p, 0.05);
  CHECK(max_coeff_diff(out, std::exp(-0.5) * cosx) <= 1e-10);

  CHECK(identical_coeffs(reference_solve(0.0, cosx, p, 0.05), cosx));
  CHECK_THROWS_AS(reference_solve(0.5, cosx, p, 0.15), ConfigError);
  CHECK_THROWS_AS(reference_solve(0.5, cosx, p, -0.1), DomainError);
  CHECK_THROWS_AS(reference_step(cosx, 0.0, p), DomainError);
}

TEST_CASE("reference integrator converges at fourth order") {
  const Grid grid(64);
  const SpectralField theta0 = classic_shear_field(grid);
  const ModelParams p{1.0, 1.0};
  const double T = 0.5;
  const double h = 1.0 / 80.0;

  const SpectralField r1 = reference_solve(T, theta0, p, h);
  const SpectralField r2 = reference_solve(T, theta0, p, h / 2.0);
  const SpectralField r3 = reference_solve(T, theta0, p, h / 4.0);
  const double d1 = sobolev_norm(r1 - r2, 0.0);
  const double d2 = sobolev_norm(r2 - r3, 0.0);
  CHECK(d1 / d2 >= 12.0);
  CHECK(d1 / d2 <= 20.0);
}

TEST_CASE("full flow dissipates the L2 norm step by step") {
  const Grid grid(64);
  const ModelParams p{1.0, 1.0};
  SpectralField state = classic_shear_field(grid);
  double previous = sobolev_norm(state, 0.0);
  for (int step = 0; step < 30; ++step) {
    state = reference_step(state, 1.0 / 160.0, p);
    const double current = sobolev_norm(state, 0.0);
    CHECK(current <= previous + 1e-10);
    previous = current;
  }
  CHECK(state.relative_zero_mode() <= 1e-12);
}

}  // TEST_SUITE
