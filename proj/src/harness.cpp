#include "gsqg/harness.hpp"

#include <fftw3.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <numbers>
#include <random>
#include <set>
#include <sstream>
#include <thread>

#include <json.hpp>

namespace gsqg::harness {

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

std::string fmt17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string fmt_short(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

json parse_strict_json(const std::string& text) {
  std::vector<std::set<std::string>> scopes;
  const json::parser_callback_t cb = [&scopes](int, json::parse_event_t event, json& value) {
    if (event == json::parse_event_t::object_start) {
      scopes.emplace_back();
    } else if (event == json::parse_event_t::object_end) {
      scopes.pop_back();
    } else if (event == json::parse_event_t::key) {
      const std::string key = value.get<std::string>();
      if (!scopes.back().insert(key).second) {
        throw ConfigError("duplicate key \"" + key + "\" in config");
      }
    }
    return true;
  };
  try {
    return json::parse(text, cb);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
}

void require_known_keys(const json& obj, const std::set<std::string>& known,
                        const std::string& where) {
  for (const auto& item : obj.items()) {
    if (known.count(item.key()) == 0) {
      throw ConfigError("unknown key \"" + item.key() + "\" in " + where);
    }
  }
}

double get_number(const json& obj, const std::string& key) {
  const json& v = obj.at(key);
  if (!v.is_number()) throw ConfigError("key \"" + key + "\" must be a number");
  return v.get<double>();
}

InitialCondition parse_ic(const json& v, int grid_n) {
  InitialCondition ic;
  if (v.is_string()) {
    const std::string name = v.get<std::string>();
    if (name == "steady_mode") {
      ic.kind = InitialCondition::Kind::SteadyMode;
    } else if (name == "two_mode") {
      ic.kind = InitialCondition::Kind::TwoMode;
    } else if (name == "classic_shear") {
      ic.kind = InitialCondition::Kind::ClassicShear;
    } else if (name == "random_band") {
      ic.kind = InitialCondition::Kind::RandomBand;
    } else {
      throw ConfigError("unknown initial-condition preset \"" + name + "\"");
    }
  } else if (v.is_object()) {
    ic.kind = InitialCondition::Kind::RandomBand;
    require_known_keys(v, {"seed", "decay_exponent", "band"}, "key \"ic\"");
    if (v.contains("seed")) {
      const json& s = v.at("seed");
      if (!s.is_number_integer() || (!s.is_number_unsigned() && s.get<long long>() < 0)) {
        throw ConfigError("key \"seed\" must be a nonnegative integer");
      }
      ic.seed = s.get<std::uint64_t>();
    }
    if (v.contains("decay_exponent")) ic.decay_exponent = get_number(v, "decay_exponent");
    if (v.contains("band")) {
      if (!v.at("band").is_number_integer()) {
        throw ConfigError("key \"band\" must be an integer");
      }
      ic.band = v.at("band").get<int>();
    }
  } else {
    throw ConfigError("key \"ic\" must be a preset name or a random-band object");
  }

  if (ic.kind == InitialCondition::Kind::RandomBand) {
    if (ic.band < 1) throw ConfigError("ic band must be at least 1");
    if (4 * ic.band > grid_n) {
      throw ConfigError("ic band " + std::to_string(ic.band) + " exceeds grid_n/4 = " +
                        std::to_string(grid_n / 4) +
                        "; quadratic products would not be alias-free");
    }
    if (!std::isfinite(ic.decay_exponent) || ic.decay_exponent < 0.0) {
      throw ConfigError("ic decay_exponent must be finite and nonnegative");
    }
  }
  return ic;
}

// Complex standard normal via Box-Muller on raw 53-bit draws, so the stream
// is identical across standard libraries.
Complex complex_gaussian(std::mt19937_64& rng) {
  const double u1 = (static_cast<double>(rng() >> 11) + 1.0) * 0x1.0p-53;
  const double u2 = static_cast<double>(rng() >> 11) * 0x1.0p-53;
  const double r = std::sqrt(-std::log(u1));
  const double phase = 2.0 * std::numbers::pi * u2;
  return {r * std::cos(phase), r * std::sin(phase)};
}

std::string csv_matrix(const PhysicalField& field) {
  const int n = field.grid.n();
  std::string out;
  out.reserve(static_cast<std::size_t>(n) * n * 20);
  for (int ix = 0; ix < n; ++ix) {
    for (int iy = 0; iy < n; ++iy) {
      if (iy > 0) out += ',';
      out += fmt17(field.at(ix, iy));
    }
    out += '\n';
  }
  return out;
}

void write_file(const std::filesystem::path& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  out << contents;
  if (!out) throw Error("failed writing " + path.string());
}

ordered_json report_to_json(const ConvergenceReport& report) {
  ordered_json study;
  study["scheme"] = scheme_name(report.scheme);
  study["alpha"] = report.params.alpha;
  study["beta"] = report.params.beta;
  study["T"] = report.T;
  study["grid_n"] = report.grid_n;
  study["samples"] = ordered_json::array();
  for (const ErrorSample& sample : report.samples) {
    ordered_json row;
    row["dt"] = sample.dt;
    ordered_json errs;
    for (const auto& [s, e] : sample.errors) errs[fmt17(s)] = e;
    row["errors"] = std::move(errs);
    study["samples"].push_back(std::move(row));
  }
  ordered_json fits;
  for (const auto& [s, fit] : report.fitted_order) {
    ordered_json f;
    f["degenerate"] = fit.degenerate;
    if (!fit.degenerate) {
      f["slope"] = fit.fit.slope;
      f["r_squared"] = fit.fit.r_squared;
    }
    fits[fmt17(s)] = std::move(f);
  }
  study["fitted_order"] = std::move(fits);
  study["warnings"] = report.warnings;
  return study;
}

}  // namespace

std::string InitialCondition::name() const {
  switch (kind) {
    case Kind::SteadyMode: return "steady_mode";
    case Kind::TwoMode: return "two_mode";
    case Kind::ClassicShear: return "classic_shear";
    case Kind::RandomBand: return "random_band";
  }
  throw DomainError("unknown initial-condition kind");
}

ExperimentConfig parse_config(const std::string& text) {
  const json doc = parse_strict_json(text);
  if (!doc.is_object()) throw ConfigError("config must be a JSON object");
  require_known_keys(doc,
                     {"grid_n", "alpha", "beta", "scheme", "T", "dt_list", "ic", "norm_orders",
                      "substep", "output_dir", "write_snapshots"},
                     "config");
  for (const char* key : {"alpha", "beta", "T", "dt_list", "ic"}) {
    if (!doc.contains(key)) {
      throw ConfigError(std::string("missing required key \"") + key + "\"");
    }
  }

  ExperimentConfig config;

  if (doc.contains("grid_n")) {
    if (!doc.at("grid_n").is_number_integer()) {
      throw ConfigError("key \"grid_n\" must be an integer");
    }
    config.grid_n = doc.at("grid_n").get<int>();
  }
  if (config.grid_n < 8 || config.grid_n % 2 != 0) {
    throw ConfigError("grid_n must be even and at least 8, got " + std::to_string(config.grid_n));
  }

  config.alpha = get_number(doc, "alpha");
  if (!(config.alpha > 0.0 && config.alpha <= 2.0)) {
    throw ConfigError("alpha ∈ (0,2] violated by " + fmt_short(config.alpha));
  }
  config.beta = get_number(doc, "beta");
  if (!(config.beta >= 1.0 && config.beta <= 2.0)) {
    throw ConfigError("beta ∈ [1,2] violated by " + fmt_short(config.beta));
  }

  std::string scheme = "both";
  if (doc.contains("scheme")) {
    if (!doc.at("scheme").is_string()) throw ConfigError("key \"scheme\" must be a string");
    scheme = doc.at("scheme").get<std::string>();
  }
  if (scheme == "godunov") {
    config.schemes = {SchemeKind::Godunov};
  } else if (scheme == "strang") {
    config.schemes = {SchemeKind::Strang};
  } else if (scheme == "both") {
    config.schemes = {SchemeKind::Godunov, SchemeKind::Strang};
  } else {
    throw ConfigError("scheme must be \"godunov\", \"strang\", or \"both\", got \"" + scheme +
                      "\"");
  }

  config.T = get_number(doc, "T");
  if (!(config.T > 0.0) || !std::isfinite(config.T)) {
    throw ConfigError("T must be positive and finite");
  }

  if (!doc.at("dt_list").is_array() || doc.at("dt_list").size() < 3) {
    throw ConfigError("dt_list must be an array with at least 3 entries");
  }
  for (const json& v : doc.at("dt_list")) {
    if (!v.is_number()) throw ConfigError("dt_list entries must be numbers");
    const double dt = v.get<double>();
    if (!(dt > 0.0) || !std::isfinite(dt)) {
      throw ConfigError("dt values must be positive and finite");
    }
    const long long steps = std::llround(config.T / dt);
    if (steps < 1 ||
        std::abs(static_cast<double>(steps) * dt - config.T) > 1e-9 * std::max(1.0, config.T)) {
      throw ConfigError("dt=" + fmt_short(dt) + " does not divide T=" + fmt_short(config.T) +
                        "; every dt must place T on the step lattice (T = m*dt)");
    }
    config.dt_list.push_back(dt);
  }
  {
    std::vector<double> sorted = config.dt_list;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
      throw ConfigError("dt_list entries must be distinct");
    }
  }

  config.ic = parse_ic(doc.at("ic"), config.grid_n);

  if (doc.contains("norm_orders")) {
    if (!doc.at("norm_orders").is_array() || doc.at("norm_orders").empty()) {
      throw ConfigError("norm_orders must be a nonempty array");
    }
    config.norm_orders.clear();
    for (const json& v : doc.at("norm_orders")) {
      if (!v.is_number()) throw ConfigError("norm_orders entries must be numbers");
      const double s = v.get<double>();
      if (!(s >= -4.0 && s <= 12.0)) {
        throw ConfigError("norm order ∈ [-4,12] violated by " + fmt_short(s));
      }
      config.norm_orders.push_back(s);
    }
  }

  if (doc.contains("substep")) {
    const json& sub = doc.at("substep");
    if (!sub.is_object()) throw ConfigError("key \"substep\" must be an object");
    require_known_keys(sub, {"max_substep", "cfl_fraction"}, "key \"substep\"");
    if (sub.contains("cfl_fraction")) {
      config.cfl_fraction = get_number(sub, "cfl_fraction");
      if (!(config.cfl_fraction > 0.0 && config.cfl_fraction <= 1.0)) {
        throw ConfigError("cfl_fraction ∈ (0,1] violated by " + fmt_short(config.cfl_fraction));
      }
    }
    if (sub.contains("max_substep")) {
      const double ms = get_number(sub, "max_substep");
      if (!(ms > 0.0) || !std::isfinite(ms)) {
        throw ConfigError("max_substep must be positive and finite");
      }
      config.max_substep = ms;
    }
  }

  if (doc.contains("output_dir")) {
    if (!doc.at("output_dir").is_string() || doc.at("output_dir").get<std::string>().empty()) {
      throw ConfigError("key \"output_dir\" must be a nonempty string");
    }
    config.output_dir = doc.at("output_dir").get<std::string>();
  }
  if (doc.contains("write_snapshots")) {
    if (!doc.at("write_snapshots").is_boolean()) {
      throw ConfigError("key \"write_snapshots\" must be a boolean");
    }
    config.write_snapshots = doc.at("write_snapshots").get<bool>();
  }
  return config;
}

ExperimentConfig parse_config_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read config file " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_config(buffer.str());
}

SpectralField build_ic(const InitialCondition& ic, const Grid& grid) {
  SpectralField f(grid);
  switch (ic.kind) {
    case InitialCondition::Kind::SteadyMode:
      f.at(1, 0) = f.at(-1, 0) = Complex{0.5, 0.0};
      return f;
    case InitialCondition::Kind::TwoMode:
      f.at(1, 0) = f.at(-1, 0) = Complex{0.5, 0.0};
      f.at(0, 2) = f.at(0, -2) = Complex{0.5, 0.0};
      return f;
    case InitialCondition::Kind::ClassicShear:
      f.at(1, 1) = f.at(-1, -1) = Complex{-0.25, 0.0};
      f.at(1, -1) = f.at(-1, 1) = Complex{0.25, 0.0};
      f.at(0, 1) = f.at(0, -1) = Complex{0.5, 0.0};
      return f;
    case InitialCondition::Kind::RandomBand: {
      if (ic.band < 1) throw ConfigError("random band must be at least 1");
      if (4 * ic.band > grid.n()) {
        throw BandLimitError("random band " + std::to_string(ic.band) + " exceeds n/4 = " +
                             std::to_string(grid.n() / 4));
      }
      if (!std::isfinite(ic.decay_exponent) || ic.decay_exponent < 0.0) {
        throw ConfigError("decay_exponent must be finite and nonnegative");
      }
      std::mt19937_64 rng(ic.seed);
      SpectralField raw(grid);
      const long long band2 = static_cast<long long>(ic.band) * ic.band;
      for (int k1 = -ic.band; k1 <= ic.band; ++k1) {
        for (int k2 = -ic.band; k2 <= ic.band; ++k2) {
          const long long kk = static_cast<long long>(k1) * k1 + static_cast<long long>(k2) * k2;
          if (kk == 0 || kk > band2) continue;
          const double amplitude =
              std::pow(static_cast<double>(kk), -ic.decay_exponent / 2.0);
          raw.at(k1, k2) = amplitude * complex_gaussian(rng);
        }
      }
      for (int k1 = -ic.band; k1 <= ic.band; ++k1) {
        for (int k2 = -ic.band; k2 <= ic.band; ++k2) {
          const long long kk = static_cast<long long>(k1) * k1 + static_cast<long long>(k2) * k2;
          if (kk == 0 || kk > band2) continue;
          f.at(k1, k2) = 0.5 * (raw.at(k1, k2) + std::conj(raw.at(-k1, -k2)));
        }
      }
      return f;
    }
  }
  throw DomainError("unknown initial-condition kind");
}

int worker_count() {
  const char* env = std::getenv("GSQG_THREADS");
  if (env != nullptr) {
    char* end = nullptr;
    errno = 0;
    const long v = std::strtol(env, &end, 10);
    if (errno != 0 || end == env || *end != '\0' || v < 1 || v > 4096) {
      throw ConfigError(std::string("GSQG_THREADS must be a positive integer, got \"") + env +
                        "\"");
    }
    return static_cast<int>(v);
  }
  const unsigned hc = std::thread::hardware_concurrency();
  return hc == 0 ? 1 : static_cast<int>(hc);
}

// Largest step size each preset is expected to handle before the splitting
// error analysis stops being trustworthy. Exceeding it warns, never errors;
// sharp analytic thresholds are not available.
double recommended_max_dt(const InitialCondition& ic) {
  switch (ic.kind) {
    case InitialCondition::Kind::SteadyMode: return 0.5;
    case InitialCondition::Kind::TwoMode: return 0.25;
    case InitialCondition::Kind::ClassicShear: return 0.25;
    case InitialCondition::Kind::RandomBand: return 0.1;
  }
  return 0.1;
}

ExperimentResult run_experiment(const ExperimentConfig& config) {
  const Grid grid(config.grid_n);
  const SpectralField theta0 = build_ic(config.ic, grid);
  const ModelParams params{config.alpha, config.beta};
  const double min_dt = *std::min_element(config.dt_list.begin(), config.dt_list.end());
  const double max_dt = *std::max_element(config.dt_list.begin(), config.dt_list.end());
  const SubstepPolicy policy{config.max_substep.value_or(min_dt / 8.0), config.cfl_fraction};
  const int workers = worker_count();

  std::vector<std::string> guard_warnings;
  if (const double cap = recommended_max_dt(config.ic); max_dt > cap) {
    guard_warnings.push_back("dt=" + fmt_short(max_dt) + " exceeds the recommended maximum " +
                             fmt_short(cap) + " for preset " + config.ic.name() +
                             "; convergence constants may degrade");
    std::fprintf(stderr, "warning: %s\n", guard_warnings.back().c_str());
  }

  const auto start = std::chrono::steady_clock::now();
  std::vector<ConvergenceReport> reports = run_studies(
      config.schemes, theta0, config.T, config.dt_list, params, policy, config.norm_orders,
      workers);
  const double wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  std::filesystem::create_directories(config.output_dir);

  ordered_json report_doc;
  report_doc["studies"] = ordered_json::array();
  for (const ConvergenceReport& report : reports) {
    report_doc["studies"].push_back(report_to_json(report));
  }
  const std::filesystem::path report_path = config.output_dir / "report.json";
  write_file(report_path, report_doc.dump(2) + "\n");

  std::string csv = "scheme,dt,norm_order,error\n";
  for (const ConvergenceReport& report : reports) {
    for (const ErrorSample& sample : report.samples) {
      for (double s : config.norm_orders) {
        csv += scheme_name(report.scheme);
        csv += ',';
        csv += fmt17(sample.dt);
        csv += ',';
        csv += fmt17(s);
        csv += ',';
        csv += fmt17(sample.errors.at(s));
        csv += '\n';
      }
    }
  }
  const std::filesystem::path csv_path = config.output_dir / "errors.csv";
  write_file(csv_path, csv);

  ordered_json meta;
  ordered_json echo;
  echo["grid_n"] = config.grid_n;
  echo["alpha"] = config.alpha;
  echo["beta"] = config.beta;
  ordered_json scheme_names = ordered_json::array();
  for (SchemeKind s : config.schemes) scheme_names.push_back(scheme_name(s));
  echo["schemes"] = std::move(scheme_names);
  echo["T"] = config.T;
  echo["dt_list"] = config.dt_list;
  ordered_json ic_echo;
  ic_echo["preset"] = config.ic.name();
  if (config.ic.kind == InitialCondition::Kind::RandomBand) {
    ic_echo["seed"] = config.ic.seed;
    ic_echo["decay_exponent"] = config.ic.decay_exponent;
    ic_echo["band"] = config.ic.band;
  }
  echo["ic"] = std::move(ic_echo);
  echo["norm_orders"] = config.norm_orders;
  ordered_json substep;
  substep["max_substep"] = policy.max_substep;
  substep["max_substep_explicit"] = config.max_substep.has_value();
  substep["cfl_fraction"] = policy.cfl_fraction;
  echo["substep"] = std::move(substep);
  echo["output_dir"] = config.output_dir.string();
  echo["write_snapshots"] = config.write_snapshots;
  meta["config"] = std::move(echo);
  ordered_json versions;
  versions["library"] = "1.0.0";
  versions["fftw"] = std::string(fftw_version);
  meta["versions"] = std::move(versions);
  meta["workers"] = workers;
  meta["wall_clock_seconds"] = wall_seconds;
  ordered_json warnings = ordered_json::array();
  for (const std::string& w : guard_warnings) warnings.push_back(w);
  for (const ConvergenceReport& report : reports) {
    for (const std::string& w : report.warnings) warnings.push_back(w);
  }
  meta["warnings"] = std::move(warnings);
  const std::filesystem::path meta_path = config.output_dir / "meta.json";
  write_file(meta_path, meta.dump(2) + "\n");

  if (config.write_snapshots) {
    const std::filesystem::path snap_dir = config.output_dir / "snapshots";
    std::filesystem::create_directories(snap_dir);
    write_file(snap_dir / "initial.csv", csv_matrix(inverse_transform(theta0)));
    for (SchemeKind scheme : config.schemes) {
      for (double dt : config.dt_list) {
        const Trajectory traj = evolve(scheme, theta0, config.T, dt, params, policy);
        const std::string name =
            scheme_name(scheme) + "_dt" + fmt_short(dt) + ".csv";
        write_file(snap_dir / name, csv_matrix(inverse_transform(traj.final_state())));
      }
    }
  }

  ExperimentResult result;
  result.reports = std::move(reports);
  result.report_json = report_path;
  result.errors_csv = csv_path;
  result.meta_json = meta_path;
  return result;
}

}  // namespace gsqg::harness
