// Experiment harness: JSON configuration, initial-condition presets,
// orchestration across schemes and step sizes, and machine-readable output
// (report.json, errors.csv, meta.json, optional physical-space snapshots).
#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "gsqg/analysis.hpp"

namespace gsqg::harness {

struct InitialCondition {
  enum class Kind { SteadyMode, TwoMode, ClassicShear, RandomBand };

  Kind kind = Kind::ClassicShear;
  // RandomBand parameters: modes with 1 <= |k| <= band get seeded complex
  // Gaussian amplitudes scaled by |k|^{-decay_exponent}.
  std::uint64_t seed = 0;
  double decay_exponent = 2.0;
  int band = 8;

  std::string name() const;
};

struct ExperimentConfig {
  int grid_n = 128;
  double alpha = 0.0;
  double beta = 0.0;
  std::vector<SchemeKind> schemes;  // one entry, or both
  double T = 0.0;
  std::vector<double> dt_list;
  InitialCondition ic;
  std::vector<double> norm_orders = {0.0, 1.0, 3.0};
  double cfl_fraction = 0.5;
  std::optional<double> max_substep;  // absent: per-run dt/8
  std::filesystem::path output_dir = "out";
  bool write_snapshots = false;
};

// Parses and fully validates a JSON config document. Unknown or duplicate
// keys and any range violation raise ConfigError naming the offending key.
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig parse_config_file(const std::filesystem::path& path);

// Builds the preset's mean-zero, band-limited initial field. Identical seeds
// produce bit-identical RandomBand fields. band > n/4 raises BandLimitError.
SpectralField build_ic(const InitialCondition& ic, const Grid& grid);

// Worker cap: GSQG_THREADS when set (must parse as a positive integer,
// ConfigError otherwise), hardware concurrency when not.
int worker_count();

struct ExperimentResult {
  std::vector<ConvergenceReport> reports;
  std::filesystem::path report_json;
  std::filesystem::path errors_csv;
  std::filesystem::path meta_json;
};

// Runs the configured convergence studies and writes report.json, errors.csv
// (header scheme,dt,norm_order,error; 17 significant digits), meta.json, and
// optional snapshots/ under config.output_dir. Identical configs yield
// byte-identical report.json and errors.csv.
ExperimentResult run_experiment(const ExperimentConfig& config);

}  // namespace gsqg::harness
