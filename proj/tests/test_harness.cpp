#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>

#include <doctest.h>
#include <json.hpp>

#include "gsqg/harness.hpp"
#include "gsqg/verify.hpp"
#include "test_util.hpp"

using namespace gsqg;
using namespace gsqg::harness;
using test::classic_shear_field;
using test::cosine_mode;
using test::identical_coeffs;
using test::kPi;
using test::max_coeff_diff;

namespace {

namespace fs = std::filesystem;

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(bool(in));
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

fs::path fresh_dir(const std::string& tag) {
  static std::random_device rd;
  const fs::path dir =
      fs::temp_directory_path() / ("gsqg-test-" + tag + "-" + std::to_string(rd()));
  fs::remove_all(dir);
  return dir;
}

// Message of the ConfigError raised by parsing, or empty if nothing threw.
std::string parse_failure(const std::string& text) {
  try {
    parse_config(text);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return {};
}

bool mentions(const std::string& message, const std::string& needle) {
  return message.find(needle) != std::string::npos;
}

}  // namespace

TEST_SUITE("harness") {

TEST_CASE("minimal config document fills documented defaults") {
  const ExperimentConfig config = parse_config(
      R"({"alpha":1,"beta":1,"T":0.5,"dt_list":[0.1,0.05,0.025],"ic":"classic_shear"})");
  CHECK(config.grid_n == 128);
  CHECK(config.alpha == 1.0);
  CHECK(config.beta == 1.0);
  CHECK(config.T == 0.5);
  REQUIRE(config.schemes.size() == 2);
  CHECK(config.schemes[0] == SchemeKind::Godunov);
  CHECK(config.schemes[1] == SchemeKind::Strang);
  REQUIRE(config.dt_list.size() == 3);
  CHECK(config.ic.kind == InitialCondition::Kind::ClassicShear);
  CHECK(config.ic.name() == "classic_shear");
  REQUIRE(config.norm_orders.size() == 3);
  CHECK(config.norm_orders[0] == 0.0);
  CHECK(config.norm_orders[1] == 1.0);
  CHECK(config.norm_orders[2] == 3.0);
  CHECK(config.cfl_fraction == 0.5);
  CHECK(!config.max_substep.has_value());
  CHECK(config.output_dir == fs::path("out"));
  CHECK(!config.write_snapshots);
}

TEST_CASE("config parser reports range violations by their precondition") {
  CHECK(mentions(
      parse_failure(
          R"({"alpha":2.5,"beta":1,"T":0.5,"dt_list":[0.1,0.05,0.025],"ic":"classic_shear"})"),
      "alpha ∈ (0,2]"));
  CHECK(mentions(
      parse_failure(
          R"({"alpha":1,"beta":0.5,"T":0.5,"dt_list":[0.1,0.05,0.025],"ic":"classic_shear"})"),
      "beta ∈ [1,2]"));
  CHECK(mentions(
      parse_failure(
          R"({"alpha":1,"beta":1,"T":0.5,"dt_list":[0.1,0.05,0.025],"ic":"classic_shear",)"
          R"("norm_orders":[13]})"),
      "norm order"));
}

TEST_CASE("config parser rejects structural problems") {
  CHECK(mentions(parse_failure("not json"), "not valid JSON"));
  CHECK(mentions(parse_failure(
                     R"({"alpha":1,"alpha":1,"beta":1,"T":0.5,)"
                     R"("dt_list":[0.1,0.05,0.025],"ic":"classic_shear"})"),
                 "duplicate key"));
  CHECK(mentions(parse_failure(
                     R"({"alpha":1,"beta":1,"T":0.5,"dt_list":[0.1,0.05,0.025],)"
                     R"("ic":"classic_shear","mystery":1})"),
                 "unknown key"));
  CHECK(mentions(parse_failure(R"({"beta":1,"T":0.5,"dt_list":[0.1,0.05,0.025],)"
                               R"("ic":"classic_shear"})"),
                 "missing required key"));
  CHECK(mentions(parse_failure(R"({"alpha":1,"beta":1,"T":0.5,"dt_list":[0.1,0.05],)"
                               R"("ic":"classic_shear"})"),
                 "at least 3"));
  CHECK(mentions(parse_failure(R"({"alpha":1,"beta":1,"T":0.5,"dt_list":[0.1,0.05,0.03],)"
                               R"("ic":"classic_shear"})"),
                 "does not divide T"));
  CHECK(mentions(parse_failure(R"({"alpha":1,"beta":1,"T":0.5,"dt_list":[0.1,0.1,0.05],)"
                               R"("ic":"classic_shear"})"),
                 "distinct"));
  CHECK(mentions(parse_failure(R"({"alpha":1,"beta":1,"T":0.5,"dt_list":[0.1,0.05,0.025],)"
                               R"("ic":"vortex"})"),
                 "unknown initial-condition preset"));
  CHECK(mentions(parse_failure(R"({"alpha":1,"beta":1,"T":0.5,"dt_list":[0.1,0.05,0.025],)"
                               R"("ic":"classic_shear","scheme":"midpoint"})"),
                 "scheme"));
  CHECK(mentions(parse_failure(R"({"grid_n":9,"alpha":1,"beta":1,"T":0.5,)"
                               R"("dt_list":[0.1,0.05,0.025],"ic":"classic_shear"})"),
                 "grid_n"));
}

TEST_CASE("config parser handles the seeded random-band object") {
  const ExperimentConfig config = parse_config(
      R"({"alpha":1,"beta":1,"T":0.5,"dt_list":[0.1,0.05,0.025],)"
      R"("ic":{"seed":42,"decay_exponent":1.5,"band":6}})");
  CHECK(config.ic.kind == InitialCondition::Kind::RandomBand);
  CHECK(config.ic.name() == "random_band");
  CHECK(config.ic.seed == 42);
  CHECK(config.ic.decay_exponent == 1.5);
  CHECK(config.ic.band == 6);

  CHECK(mentions(parse_failure(R"({"alpha":1,"beta":1,"T":0.5,"dt_list":[0.1,0.05,0.025],)"
                               R"("ic":{"seed":-1}})"),
                 "seed"));
  CHECK(mentions(parse_failure(R"({"grid_n":16,"alpha":1,"beta":1,"T":0.5,)"
                               R"("dt_list":[0.1,0.05,0.025],"ic":{"band":5}})"),
                 "grid_n/4"));
  CHECK(mentions(parse_failure(R"({"alpha":1,"beta":1,"T":0.5,"dt_list":[0.1,0.05,0.025],)"
                               R"("ic":{"band":6,"richness":2}})"),
                 "unknown key"));
}

TEST_CASE("config parser validates the substep block") {
  const ExperimentConfig config = parse_config(
      R"({"alpha":1,"beta":1,"T":0.5,"dt_list":[0.1,0.05,0.025],"ic":"classic_shear",)"
      R"("substep":{"max_substep":0.005,"cfl_fraction":0.25}})");
  REQUIRE(config.max_substep.has_value());
  CHECK(*config.max_substep == 0.005);
  CHECK(config.cfl_fraction == 0.25);

  CHECK(mentions(parse_failure(
                     R"({"alpha":1,"beta":1,"T":0.5,"dt_list":[0.1,0.05,0.025],)"
                     R"("ic":"classic_shear","substep":{"cfl_fraction":1.5}})"),
                 "cfl_fraction"));
  CHECK(mentions(parse_failure(
                     R"({"alpha":1,"beta":1,"T":0.5,"dt_list":[0.1,0.05,0.025],)"
                     R"("ic":"classic_shear","substep":{"max_substep":-0.1}})"),
                 "max_substep"));
}

TEST_CASE("initial-condition presets match their closed forms") {
  const Grid grid(32);

  InitialCondition steady;
  steady.kind = InitialCondition::Kind::SteadyMode;
  CHECK(identical_coeffs(build_ic(steady, grid), cosine_mode(grid, 1, 0)));

  InitialCondition two;
  two.kind = InitialCondition::Kind::TwoMode;
  CHECK(identical_coeffs(build_ic(two, grid),
                         cosine_mode(grid, 1, 0) + cosine_mode(grid, 0, 2)));

  InitialCondition shear;
  shear.kind = InitialCondition::Kind::ClassicShear;
  const SpectralField f = build_ic(shear, grid);
  CHECK(identical_coeffs(f, classic_shear_field(grid)));
  CHECK(sobolev_norm(f, 0.0) == doctest::Approx(kPi * std::sqrt(3.0)).epsilon(1e-13));
}

TEST_CASE("random band preset is seeded, mean-zero, real, and band-limited") {
  const Grid grid(32);
  InitialCondition ic;
  ic.kind = InitialCondition::Kind::RandomBand;
  ic.seed = 42;
  ic.band = 7;
  ic.decay_exponent = 2.0;

  const SpectralField a = build_ic(ic, grid);
  const SpectralField b = build_ic(ic, grid);
  CHECK(identical_coeffs(a, b));

  CHECK(std::abs(a.at(0, 0)) == 0.0);
  CHECK(band_limit(a) <= 7);
  CHECK_NOTHROW(inverse_transform(a));

  InitialCondition other = ic;
  other.seed = 43;
  CHECK(max_coeff_diff(build_ic(other, grid), a) > 1e-3);

  InitialCondition wide = ic;
  wide.band = 9;
  CHECK_THROWS_AS(build_ic(wide, grid), BandLimitError);
}

TEST_CASE("worker count honors the environment variable") {
  const char* saved = std::getenv("GSQG_THREADS");
  const std::string saved_value = saved ? saved : "";

  ::setenv("GSQG_THREADS", "3", 1);
  CHECK(worker_count() == 3);
  ::setenv("GSQG_THREADS", "0", 1);
  CHECK_THROWS_AS(worker_count(), ConfigError);
  ::setenv("GSQG_THREADS", "abc", 1);
  CHECK_THROWS_AS(worker_count(), ConfigError);
  ::setenv("GSQG_THREADS", "-2", 1);
  CHECK_THROWS_AS(worker_count(), ConfigError);
  ::unsetenv("GSQG_THREADS");
  CHECK(worker_count() >= 1);

  if (saved) ::setenv("GSQG_THREADS", saved_value.c_str(), 1);
}

TEST_CASE("experiment writes the documented artifacts deterministically") {
  const fs::path out_a = fresh_dir("runa");
  const fs::path out_b = fresh_dir("runb");

  const std::string base =
      R"({"grid_n":16,"alpha":1,"beta":1,"scheme":"both","T":0.2,)"
      R"("dt_list":[0.05,0.025,0.0125],"ic":{"seed":3,"band":4,"decay_exponent":2.0},)"
      R"("norm_orders":[0,1],"write_snapshots":true,"output_dir":")";

  const ExperimentConfig config_a = parse_config(base + out_a.generic_string() + "\"}");
  const ExperimentConfig config_b = parse_config(base + out_b.generic_string() + "\"}");

  const ExperimentResult run_a = run_experiment(config_a);
  REQUIRE(fs::exists(run_a.report_json));
  REQUIRE(fs::exists(run_a.errors_csv));
  REQUIRE(fs::exists(run_a.meta_json));
  REQUIRE(run_a.reports.size() == 2);

  const std::string csv = slurp(run_a.errors_csv);
  CHECK(csv.rfind("scheme,dt,norm_order,error\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 1 + 2 * 3 * 2);

  const nlohmann::json report = nlohmann::json::parse(slurp(run_a.report_json));
  REQUIRE(report.contains("studies"));
  REQUIRE(report.at("studies").size() == 2);
  CHECK(report.at("studies")[0].at("scheme") == "godunov");
  CHECK(report.at("studies")[1].at("scheme") == "strang");
  CHECK(report.at("studies")[0].at("grid_n") == 16);

  const nlohmann::json meta = nlohmann::json::parse(slurp(run_a.meta_json));
  CHECK(meta.at("config").at("grid_n") == 16);
  CHECK(meta.at("config").at("ic").at("preset") == "random_band");
  CHECK(meta.at("workers").get<int>() >= 1);
  CHECK(meta.at("warnings").empty());

  const fs::path snaps = out_a / "snapshots";
  REQUIRE(fs::exists(snaps / "initial.csv"));
  for (const char* name : {"godunov_dt0.05.csv", "godunov_dt0.025.csv", "godunov_dt0.0125.csv",
                           "strang_dt0.05.csv", "strang_dt0.025.csv", "strang_dt0.0125.csv"}) {
    CHECK(fs::exists(snaps / name));
  }
  const std::string initial = slurp(snaps / "initial.csv");
  CHECK(std::count(initial.begin(), initial.end(), '\n') == 16);

  const ExperimentResult run_b = run_experiment(config_b);
  CHECK(slurp(run_b.errors_csv) == csv);
  CHECK(slurp(run_b.report_json) == slurp(run_a.report_json));

  fs::remove_all(out_a);
  fs::remove_all(out_b);
}

TEST_CASE("experiment output does not depend on the worker cap") {
  const char* saved = std::getenv("GSQG_THREADS");
  const std::string saved_value = saved ? saved : "";

  const fs::path out_a = fresh_dir("w1");
  const fs::path out_b = fresh_dir("w4");
  const std::string base =
      R"({"grid_n":16,"alpha":1,"beta":1.5,"T":0.2,"dt_list":[0.05,0.025,0.0125],)"
      R"("ic":{"seed":11,"band":4},"norm_orders":[0],"output_dir":")";

  ::setenv("GSQG_THREADS", "1", 1);
  const ExperimentResult run_a = run_experiment(parse_config(base + out_a.generic_string() + "\"}"));
  ::setenv("GSQG_THREADS", "4", 1);
  const ExperimentResult run_b = run_experiment(parse_config(base + out_b.generic_string() + "\"}"));

  CHECK(slurp(run_a.errors_csv) == slurp(run_b.errors_csv));
  CHECK(slurp(run_a.report_json) == slurp(run_b.report_json));

  if (saved) {
    ::setenv("GSQG_THREADS", saved_value.c_str(), 1);
  } else {
    ::unsetenv("GSQG_THREADS");
  }
  fs::remove_all(out_a);
  fs::remove_all(out_b);
}

TEST_CASE("oversized dt draws a warning but still runs") {
  const fs::path out = fresh_dir("guard");
  const ExperimentConfig config = parse_config(
      R"({"grid_n":16,"alpha":1,"beta":1,"scheme":"godunov","T":1.2,)"
      R"("dt_list":[0.6,0.3,0.2],"ic":"steady_mode","norm_orders":[0],"output_dir":")" +
      out.generic_string() + "\"}");

  const ExperimentResult run = run_experiment(config);
  const nlohmann::json meta = nlohmann::json::parse(slurp(run.meta_json));
  REQUIRE(!meta.at("warnings").empty());
  CHECK(mentions(meta.at("warnings")[0].get<std::string>(), "recommended maximum"));

  // transport-steady data: splitting error sits at the rounding floor
  const nlohmann::json report = nlohmann::json::parse(slurp(run.report_json));
  CHECK(report.at("studies")[0].at("fitted_order").at("0").at("degenerate").get<bool>());

  fs::remove_all(out);
}

TEST_CASE("self-check suite flags a corrupted dissipation operator") {
  verify::VerifyOptions options;
  options.only = {"commutator_alpha2_identity"};

  const std::vector<verify::CheckResult> honest = verify::verify_suite(options);
  REQUIRE(honest.size() == 1);
  CHECK(honest[0].name == "commutator_alpha2_identity");
  CHECK(honest[0].pass);

  options.fractional_laplacian = [](const SpectralField& f, double exponent) {
    return -1.0 * fractional_laplacian(f, exponent);
  };
  const std::vector<verify::CheckResult> tampered = verify::verify_suite(options);
  REQUIRE(tampered.size() == 1);
  CHECK(!tampered[0].pass);
}

}  // TEST_SUITE
