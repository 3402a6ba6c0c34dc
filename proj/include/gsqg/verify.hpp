// Self-check suite covering convergence orders, conservation and dissipation
// properties, the order-two commutator identity, reference-solver accuracy,
// and output determinism. Each check reports a measured value against its
// threshold so regressions are visible from the printed line alone.
#pragma once

#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "gsqg/spectral.hpp"

namespace gsqg::verify {

struct CheckResult {
  std::string name;
  std::string measured;
  std::string threshold;
  bool pass = false;
};

struct VerifyOptions {
  int threads = 0;  // 0: use harness::worker_count()
  // Override for the fractional Laplacian used by the commutator check.
  // Exists so tests can demonstrate the check fails under a broken operator.
  std::function<SpectralField(const SpectralField&, double)> fractional_laplacian;
  // When nonempty, only checks whose name appears here are run.
  std::vector<std::string> only;
};

std::vector<CheckResult> verify_suite(const VerifyOptions& options = {});

// Prints one aligned line per check: name, measured, threshold, PASS/FAIL.
// Returns true when every check passed.
bool print_results(const std::vector<CheckResult>& results, std::ostream& out);

}  // namespace gsqg::verify
