#include "gsqg/analysis.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <functional>
#include <limits>
#include <mutex>
#include <set>
#include <string>
#include <thread>
#include <utility>

namespace gsqg {

SpectralField commutator_G(const SpectralField& f, const SpectralField& g, double alpha) {
  if (!(alpha > 0.0 && alpha <= 2.0)) {
    throw DomainError("commutator exponent must lie in (0, 2], got " + std::to_string(alpha));
  }
  if (f.grid() != g.grid()) {
    throw GridMismatchError("commutator arguments live on different grids");
  }
  const int n = f.grid().n();
  const int bf = band_limit(f);
  const int bg = band_limit(g);
  if (4 * bf > n || 4 * bg > n) {
    throw BandLimitError("aliasing risk: commutator arguments must be band-limited to n/4 = " +
                         std::to_string(n / 4) + ", got bands " + std::to_string(bf) + " and " +
                         std::to_string(bg));
  }
  // Grouped so that swapping f and g commutes operand order only inside
  // individual products and sums, keeping the result bit-identical.
  const SpectralField leibniz = fractional_laplacian(product(f, g), alpha);
  const SpectralField cross = product(f, fractional_laplacian(g, alpha)) +
                              product(g, fractional_laplacian(f, alpha));
  return leibniz - cross;
}

double error_norm(const SpectralField& approx, const SpectralField& ref, double s) {
  if (approx.grid() != ref.grid()) {
    throw GridMismatchError("error norm requires both fields on the same grid");
  }
  return sobolev_norm(approx - ref, s);
}

FitResult fit_order(const std::vector<ErrorSample>& samples, double s) {
  std::vector<double> log_dt;
  std::vector<double> log_err;
  std::set<double> seen_dt;
  for (const ErrorSample& sample : samples) {
    const auto it = sample.errors.find(s);
    if (it == sample.errors.end()) {
      throw DomainError("sample at dt=" + std::to_string(sample.dt) +
                        " carries no error at norm order " + std::to_string(s));
    }
    if (!(it->second > 0.0) || it->second < 1e-300) {
      throw DegenerateFitError("error " + std::to_string(it->second) + " at dt=" +
                               std::to_string(sample.dt) + " sits at the floating-point floor; " +
                               "no meaningful order can be fitted");
    }
    seen_dt.insert(sample.dt);
    log_dt.push_back(std::log(sample.dt));
    log_err.push_back(std::log(it->second));
  }
  if (samples.size() < 3 || seen_dt.size() != samples.size()) {
    throw DomainError("order fit requires at least 3 samples with distinct dt");
  }

  const double m = static_cast<double>(log_dt.size());
  double x_mean = 0.0;
  double y_mean = 0.0;
  for (std::size_t i = 0; i < log_dt.size(); ++i) {
    x_mean += log_dt[i];
    y_mean += log_err[i];
  }
  x_mean /= m;
  y_mean /= m;

  double sxx = 0.0;
  double syy = 0.0;
  double sxy = 0.0;
  for (std::size_t i = 0; i < log_dt.size(); ++i) {
    const double dx = log_dt[i] - x_mean;
    const double dy = log_err[i] - y_mean;
    sxx += dx * dx;
    syy += dy * dy;
    sxy += dx * dy;
  }

  FitResult result;
  result.slope = sxy / sxx;
  result.r_squared = syy == 0.0 ? 1.0 : (sxy * sxy) / (sxx * syy);
  return result;
}

namespace {

// Errors small enough, or flat enough across the dt sweep, that a log-log
// slope would only fit noise.
bool fit_is_degenerate(const std::vector<ErrorSample>& samples, double s) {
  double lo = std::numeric_limits<double>::infinity();
  double hi = 0.0;
  for (const ErrorSample& sample : samples) {
    const double e = sample.errors.at(s);
    if (e <= 1e-14) return true;
    lo = std::min(lo, e);
    hi = std::max(hi, e);
  }
  return hi < 4.0 * lo;
}

struct StudyTask {
  SchemeKind scheme;
  double dt;
};

}  // namespace

std::vector<ConvergenceReport> run_studies(const std::vector<SchemeKind>& schemes,
                                           const SpectralField& theta0, double T,
                                           const std::vector<double>& dt_list,
                                           const ModelParams& p, const SubstepPolicy& policy,
                                           const std::vector<double>& norm_orders,
                                           int threads) {
  p.validate();
  policy.validate();
  if (schemes.empty()) throw ConfigError("no schemes requested");
  if (norm_orders.empty()) throw ConfigError("no norm orders requested");
  for (double s : norm_orders) {
    if (!(s >= -4.0 && s <= 12.0)) {
      throw ConfigError("norm order must lie in [-4, 12], got " + std::to_string(s));
    }
  }
  if (dt_list.size() < 3) {
    throw ConfigError("a convergence study needs at least 3 dt values, got " +
                      std::to_string(dt_list.size()));
  }
  if (!(T > 0.0) || !std::isfinite(T)) {
    throw ConfigError("study horizon must be positive and finite");
  }
  std::vector<double> dts = dt_list;
  std::sort(dts.begin(), dts.end(), std::greater<>());
  if (std::adjacent_find(dts.begin(), dts.end()) != dts.end()) {
    throw ConfigError("dt_list entries must be distinct");
  }
  for (double dt : dts) {
    if (!(dt > 0.0) || !std::isfinite(dt)) {
      throw ConfigError("dt values must be positive and finite");
    }
    const long long steps = std::llround(T / dt);
    if (steps < 1 || std::abs(static_cast<double>(steps) * dt - T) > 1e-9 * std::max(1.0, T)) {
      throw ConfigError("dt=" + std::to_string(dt) + " does not divide T=" + std::to_string(T) +
                        "; the study requires T to be a whole number of steps");
    }
  }

  const double dt_ref = dts.back() / 16.0;
  const SpectralField reference = reference_solve(T, theta0, p, dt_ref);

  std::vector<StudyTask> tasks;
  for (SchemeKind scheme : schemes) {
    for (double dt : dts) tasks.push_back({scheme, dt});
  }

  std::vector<ErrorSample> task_results(tasks.size());
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr first_error;
  std::mutex error_mu;

  const auto worker = [&]() {
    while (!failed.load()) {
      const std::size_t i = next.fetch_add(1);
      if (i >= tasks.size()) return;
      try {
        const Trajectory traj =
            evolve(tasks[i].scheme, theta0, T, tasks[i].dt, p, policy);
        ErrorSample sample;
        sample.dt = tasks[i].dt;
        for (double s : norm_orders) {
          sample.errors[s] = error_norm(traj.final_state(), reference, s);
        }
        task_results[i] = std::move(sample);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mu);
        if (!first_error) first_error = std::current_exception();
        failed.store(true);
        return;
      }
    }
  };

  int worker_total = threads > 0 ? threads : static_cast<int>(std::thread::hardware_concurrency());
  worker_total = std::max(1, std::min<int>(worker_total, static_cast<int>(tasks.size())));
  if (worker_total == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(worker_total);
    for (int i = 0; i < worker_total; ++i) pool.emplace_back(worker);
    for (std::thread& t : pool) t.join();
  }
  if (first_error) std::rethrow_exception(first_error);

  std::vector<ConvergenceReport> reports;
  std::size_t cursor = 0;
  for (SchemeKind scheme : schemes) {
    ConvergenceReport report;
    report.scheme = scheme;
    report.params = p;
    report.T = T;
    report.grid_n = theta0.grid().n();
    for (std::size_t j = 0; j < dts.size(); ++j) {
      report.samples.push_back(std::move(task_results[cursor + j]));
    }
    cursor += dts.size();

    for (double s : norm_orders) {
      for (std::size_t j = 1; j < report.samples.size(); ++j) {
        if (report.samples[j].errors.at(s) > report.samples[j - 1].errors.at(s)) {
          report.warnings.push_back(scheme_name(scheme) + ": error at norm order " +
                                    std::to_string(s) + " is not monotone in dt (dt=" +
                                    std::to_string(report.samples[j].dt) + ")");
        }
      }
      NormFit fit;
      if (fit_is_degenerate(report.samples, s)) {
        fit.degenerate = true;
        report.warnings.push_back(scheme_name(scheme) + ": degenerate fit at norm order " +
                                  std::to_string(s) +
                                  " (errors at the accuracy floor or without dynamic range)");
      } else {
        fit.fit = fit_order(report.samples, s);
      }
      report.fitted_order[s] = fit;
    }
    reports.push_back(std::move(report));
  }
  return reports;
}

ConvergenceReport convergence_study(SchemeKind scheme, const SpectralField& theta0, double T,
                                    const std::vector<double>& dt_list, const ModelParams& p,
                                    const SubstepPolicy& policy,
                                    const std::vector<double>& norm_orders, int threads) {
  return run_studies({scheme}, theta0, T, dt_list, p, policy, norm_orders, threads).front();
}

}  // namespace gsqg
