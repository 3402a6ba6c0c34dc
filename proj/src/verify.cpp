#include "gsqg/verify.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <limits>
#include <ostream>
#include <random>
#include <sstream>

#include "gsqg/analysis.hpp"
#include "gsqg/harness.hpp"

namespace gsqg::verify {

namespace {

namespace fs = std::filesystem;

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

CheckResult make_check(std::string name, std::string measured, std::string threshold,
                       bool pass) {
  CheckResult r;
  r.name = std::move(name);
  r.measured = std::move(measured);
  r.threshold = std::move(threshold);
  r.pass = pass;
  return r;
}

fs::path make_temp_dir() {
  std::random_device rd;
  for (int attempt = 0; attempt < 16; ++attempt) {
    std::ostringstream name;
    name << "gsqg-verify-" << std::hex << rd() << rd();
    const fs::path dir = fs::temp_directory_path() / name.str();
    std::error_code ec;
    if (fs::create_directories(dir, ec) && !ec) return dir;
  }
  throw Error("could not create a scratch directory for the verify suite");
}

std::string read_bytes(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

harness::ExperimentConfig acceptance_config(double alpha, double beta, const fs::path& out) {
  harness::ExperimentConfig config;
  config.grid_n = 128;
  config.alpha = alpha;
  config.beta = beta;
  config.schemes = {SchemeKind::Godunov, SchemeKind::Strang};
  config.T = 0.5;
  config.dt_list = {1.0 / 10, 1.0 / 20, 1.0 / 40, 1.0 / 80};
  config.ic.kind = harness::InitialCondition::Kind::ClassicShear;
  config.norm_orders = {0.0, 1.0, 3.0};
  config.output_dir = out;
  return config;
}

const ConvergenceReport& report_for(const std::vector<ConvergenceReport>& reports,
                                    SchemeKind scheme) {
  for (const ConvergenceReport& r : reports) {
    if (r.scheme == scheme) return r;
  }
  throw Error("study is missing a report for scheme " + scheme_name(scheme));
}

double smallest_dt_error(const ConvergenceReport& report, double s) {
  const ErrorSample& sample = report.samples.back();
  return sample.errors.at(s);
}

void append_order_checks(std::vector<CheckResult>& results, const std::string& tag,
                         const std::vector<ConvergenceReport>& reports) {
  const ConvergenceReport& godunov = report_for(reports, SchemeKind::Godunov);
  const ConvergenceReport& strang = report_for(reports, SchemeKind::Strang);

  const NormFit& gfit = godunov.fitted_order.at(0.0);
  const bool gpass = !gfit.degenerate && gfit.fit.slope >= 0.85 && gfit.fit.slope <= 1.15 &&
                     gfit.fit.r_squared >= 0.99;
  results.push_back(make_check(
      "godunov_order_" + tag,
      gfit.degenerate ? "degenerate"
                      : "slope=" + fmt(gfit.fit.slope) + " r2=" + fmt(gfit.fit.r_squared),
      "slope in [0.85,1.15], r2 >= 0.99", gpass));

  const NormFit& sfit = strang.fitted_order.at(0.0);
  const bool spass = !sfit.degenerate && sfit.fit.slope >= 1.8 && sfit.fit.slope <= 2.2 &&
                     sfit.fit.r_squared >= 0.99;
  results.push_back(make_check(
      "strang_order_" + tag,
      sfit.degenerate ? "degenerate"
                      : "slope=" + fmt(sfit.fit.slope) + " r2=" + fmt(sfit.fit.r_squared),
      "slope in [1.8,2.2], r2 >= 0.99", spass));

  const double gerr = smallest_dt_error(godunov, 0.0);
  const double serr = smallest_dt_error(strang, 0.0);
  const double gap = serr > 0.0 ? gerr / serr : std::numeric_limits<double>::infinity();
  results.push_back(make_check("strang_gap_" + tag, "ratio=" + fmt(gap), "ratio >= 5",
                               gap >= 5.0));
}

CheckResult check_phi_a_exact() {
  const Grid grid(16);
  SpectralField f(grid);
  f.at(1, 0) = Complex{0.3, 0.0};
  f.at(-1, 0) = Complex{0.3, 0.0};
  f.at(2, 1) = Complex{0.2, 0.1};
  f.at(-2, -1) = Complex{0.2, -0.1};

  double worst = 0.0;
  for (double alpha : {0.5, 1.0, 1.5, 2.0}) {
    for (double t : {0.1, 1.0}) {
      const SpectralField out = phi_A(t, f, ModelParams{alpha, 1.0});
      for (const auto& [k1, k2] : {std::pair{1, 0}, std::pair{2, 1}}) {
        const double mag = std::sqrt(static_cast<double>(k1) * k1 + static_cast<double>(k2) * k2);
        const Complex expected = std::exp(-t * std::pow(mag, alpha)) * f.at(k1, k2);
        worst = std::max(worst, std::abs(out.at(k1, k2) - expected) / std::abs(expected));
      }
    }
  }
  return make_check("phiA_exact", fmt(worst), "<= 1e-12", worst <= 1e-12);
}

std::pair<CheckResult, CheckResult> check_transport_conservation() {
  const Grid grid(128);
  harness::InitialCondition ic;
  ic.kind = harness::InitialCondition::Kind::ClassicShear;
  const SpectralField theta0 = harness::build_ic(ic, grid);
  const ModelParams p{1.0, 1.0};
  const SpectralField after = phi_B(1.0, theta0, p, SubstepPolicy::for_step(1.0));

  const double l2_before = sobolev_norm(theta0, 0.0);
  const double l2_after = sobolev_norm(after, 0.0);
  const double drift = std::abs(l2_after - l2_before) / l2_before;
  const double mean = after.relative_zero_mode();
  return {make_check("transport_L2_drift", fmt(drift), "<= 1e-08", drift <= 1e-8),
          make_check("transport_mean_drift", fmt(mean), "<= 1e-12", mean <= 1e-12)};
}

CheckResult check_commutator(const VerifyOptions& options) {
  const Grid grid(64);
  double worst = 0.0;
  for (int pair = 0; pair < 20; ++pair) {
    harness::InitialCondition spec_f;
    spec_f.kind = harness::InitialCondition::Kind::RandomBand;
    spec_f.seed = 100 + 2 * static_cast<std::uint64_t>(pair);
    spec_f.band = 12;
    spec_f.decay_exponent = 1.5;
    harness::InitialCondition spec_g = spec_f;
    spec_g.seed = 101 + 2 * static_cast<std::uint64_t>(pair);

    const SpectralField f = harness::build_ic(spec_f, grid);
    const SpectralField g = harness::build_ic(spec_g, grid);

    SpectralField g2(grid);
    if (options.fractional_laplacian) {
      const auto& lam = options.fractional_laplacian;
      g2 = lam(product(f, g), 2.0) - product(f, lam(g, 2.0)) - product(g, lam(f, 2.0));
    } else {
      g2 = commutator_G(f, g, 2.0);
    }

    const auto [fx, fy] = gradient(f);
    const auto [gx, gy] = gradient(g);
    SpectralField grad_dot = product(fx, gx);
    grad_dot += product(fy, gy);

    const SpectralField residual = g2 + 2.0 * grad_dot;
    const double ratio =
        sobolev_norm(residual, 0.0) / (sobolev_norm(f, 1.0) * sobolev_norm(g, 1.0));
    worst = std::max(worst, ratio);
  }
  return make_check("commutator_alpha2_identity", fmt(worst), "<= 1e-10", worst <= 1e-10);
}

CheckResult check_b_steady_closed_form() {
  const Grid grid(64);
  harness::InitialCondition ic;
  ic.kind = harness::InitialCondition::Kind::SteadyMode;
  const SpectralField theta0 = harness::build_ic(ic, grid);
  SpectralField target = theta0;
  target *= std::exp(-1.0);

  double worst = 0.0;
  for (SchemeKind scheme : {SchemeKind::Godunov, SchemeKind::Strang}) {
    for (double alpha : {1.0, 1.5, 2.0}) {
      const ModelParams p{alpha, 1.0};
      const Trajectory traj =
          evolve(scheme, theta0, 1.0, 0.1, p, SubstepPolicy::for_step(0.1));
      worst = std::max(worst, error_norm(traj.final_state(), target, 0.0));
    }
  }
  return make_check("bsteady_closed_form", fmt(worst), "<= 1e-10", worst <= 1e-10);
}

CheckResult check_dissipation_monotone() {
  const Grid grid(128);
  harness::InitialCondition ic;
  ic.kind = harness::InitialCondition::Kind::ClassicShear;
  const ModelParams p{1.0, 1.0};
  SpectralField state = harness::build_ic(ic, grid);

  const double h = 1.0 / 160.0;
  double previous = sobolev_norm(state, 0.0);
  double worst_increase = -std::numeric_limits<double>::infinity();
  for (int step = 0; step < 80; ++step) {
    state = reference_step(state, h, p);
    const double current = sobolev_norm(state, 0.0);
    worst_increase = std::max(worst_increase, current - previous);
    previous = current;
  }
  return make_check("dissipation_monotone", fmt(worst_increase), "<= 1e-10",
                    worst_increase <= 1e-10);
}

CheckResult check_reference_fourth_order() {
  const Grid grid(128);
  harness::InitialCondition ic;
  ic.kind = harness::InitialCondition::Kind::ClassicShear;
  const SpectralField theta0 = harness::build_ic(ic, grid);
  const ModelParams p{1.0, 1.0};
  const double T = 0.5;
  const double h = 1.0 / 80.0;

  const SpectralField r1 = reference_solve(T, theta0, p, h);
  const SpectralField r2 = reference_solve(T, theta0, p, h / 2.0);
  const SpectralField r3 = reference_solve(T, theta0, p, h / 4.0);
  const double d1 = error_norm(r1, r2, 0.0);
  const double d2 = error_norm(r2, r3, 0.0);
  const double ratio = d1 / d2;
  return make_check("reference_fourth_order", "ratio=" + fmt(ratio), "in [12,20]",
                    ratio >= 12.0 && ratio <= 20.0);
}

CheckResult check_smoke_n8(int threads) {
  try {
    const Grid grid(8);
    harness::InitialCondition ic;
    ic.kind = harness::InitialCondition::Kind::ClassicShear;
    const SpectralField theta0 = harness::build_ic(ic, grid);
    const std::vector<double> dts = {0.05, 0.025, 0.0125};
    run_studies({SchemeKind::Godunov, SchemeKind::Strang}, theta0, 0.1, dts,
                ModelParams{1.0, 1.0}, SubstepPolicy{0.0125 / 8.0, 0.5}, {0.0, 1.0, 3.0},
                threads);
    return make_check("smoke_n8", "completed", "completes", true);
  } catch (const std::exception& e) {
    return make_check("smoke_n8", std::string("threw: ") + e.what(), "completes", false);
  }
}

}  // namespace

std::vector<CheckResult> verify_suite(const VerifyOptions& options) {
  const int threads = options.threads > 0 ? options.threads : harness::worker_count();
  std::vector<CheckResult> results;

  const auto wanted = [&options](std::initializer_list<const char*> names) {
    if (options.only.empty()) return true;
    for (const char* name : names) {
      if (std::find(options.only.begin(), options.only.end(), name) != options.only.end()) {
        return true;
      }
    }
    return false;
  };

  const fs::path scratch = make_temp_dir();
  try {
    // First- and second-order convergence plus the Godunov/Strang error gap,
    // for (alpha, beta) = (1, 1) via the file-writing path and (2, 2) in
    // memory. The (1, 1) experiment runs twice to test output determinism.
    std::string errors_csv_a;
    if (wanted({"godunov_order_a1b1", "strang_order_a1b1", "strang_gap_a1b1",
                "determinism_errors_csv"})) {
      const harness::ExperimentConfig config_a = acceptance_config(1.0, 1.0, scratch / "run_a");
      const harness::ExperimentResult run_a = harness::run_experiment(config_a);
      errors_csv_a = read_bytes(run_a.errors_csv);
      append_order_checks(results, "a1b1", run_a.reports);
    }

    if (wanted({"godunov_order_a2b2", "strang_order_a2b2", "strang_gap_a2b2"})) {
      const Grid grid(128);
      harness::InitialCondition ic;
      ic.kind = harness::InitialCondition::Kind::ClassicShear;
      const SpectralField theta0 = harness::build_ic(ic, grid);
      const std::vector<ConvergenceReport> reports22 = run_studies(
          {SchemeKind::Godunov, SchemeKind::Strang}, theta0, 0.5,
          {1.0 / 10, 1.0 / 20, 1.0 / 40, 1.0 / 80}, ModelParams{2.0, 2.0},
          SubstepPolicy{(1.0 / 80) / 8.0, 0.5}, {0.0, 1.0, 3.0}, threads);
      append_order_checks(results, "a2b2", reports22);
    }

    if (wanted({"phiA_exact"})) results.push_back(check_phi_a_exact());

    if (wanted({"transport_L2_drift", "transport_mean_drift"})) {
      const auto [l2_check, mean_check] = check_transport_conservation();
      results.push_back(l2_check);
      results.push_back(mean_check);
    }

    if (wanted({"commutator_alpha2_identity"})) results.push_back(check_commutator(options));
    if (wanted({"bsteady_closed_form"})) results.push_back(check_b_steady_closed_form());
    if (wanted({"dissipation_monotone"})) results.push_back(check_dissipation_monotone());
    if (wanted({"reference_fourth_order"})) results.push_back(check_reference_fourth_order());

    if (wanted({"determinism_errors_csv"})) {
      const harness::ExperimentConfig config_b = acceptance_config(1.0, 1.0, scratch / "run_b");
      const harness::ExperimentResult run_b = harness::run_experiment(config_b);
      const std::string bytes_b = read_bytes(run_b.errors_csv);
      const bool identical = errors_csv_a == bytes_b;
      results.push_back(make_check("determinism_errors_csv",
                                   identical ? "identical" : "differs", "byte-identical",
                                   identical));
    }

    if (wanted({"smoke_n8"})) results.push_back(check_smoke_n8(threads));
  } catch (...) {
    std::error_code ec;
    fs::remove_all(scratch, ec);
    throw;
  }
  std::error_code ec;
  fs::remove_all(scratch, ec);

  if (!options.only.empty()) {
    std::vector<CheckResult> filtered;
    for (CheckResult& r : results) {
      if (std::find(options.only.begin(), options.only.end(), r.name) != options.only.end()) {
        filtered.push_back(std::move(r));
      }
    }
    return filtered;
  }
  return results;
}

bool print_results(const std::vector<CheckResult>& results, std::ostream& out) {
  std::size_t name_width = 0;
  std::size_t measured_width = 0;
  std::size_t threshold_width = 0;
  for (const CheckResult& r : results) {
    name_width = std::max(name_width, r.name.size());
    measured_width = std::max(measured_width, r.measured.size());
    threshold_width = std::max(threshold_width, r.threshold.size());
  }
  bool all = true;
  int passed = 0;
  for (const CheckResult& r : results) {
    out << std::left << std::setw(static_cast<int>(name_width) + 2) << r.name
        << std::setw(static_cast<int>(measured_width) + 2) << r.measured
        << std::setw(static_cast<int>(threshold_width) + 2) << r.threshold
        << (r.pass ? "PASS" : "FAIL") << '\n';
    all = all && r.pass;
    if (r.pass) ++passed;
  }
  out << passed << '/' << results.size() << " checks passed\n";
  return all;
}

}  // namespace gsqg::verify
