#include "doctest.h"

#include "focalforge/experiment.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>

using namespace ff;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

fs::path fresh_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

}  // namespace

TEST_CASE("config parsing and validation") {
  SUBCASE("minimal valid config") {
    const auto cfg = parse_experiment_config(
        R"({"scenario": "sphere-point-s2", "operation": "taut"})");
    CHECK(cfg.scenario == "sphere-point-s2");
    CHECK(cfg.operation == "taut");
    CHECK(cfg.seed == 1);
    CHECK(cfg.tol_scale == 1.0);
  }
  SUBCASE("negative tolerance is rejected with the field path") {
    try {
      parse_experiment_config(
          R"({"scenario": "s", "operation": "taut", "tolerances": {"tol_scale": -1.0}})");
      CHECK(false);
    } catch (const ConfigError& err) {
      CHECK(err.field_path() == "$.tolerances.tol_scale");
    }
  }
  SUBCASE("unknown operation is rejected") {
    CHECK_THROWS_AS(parse_experiment_config(R"({"scenario": "s", "operation": "dance"})"),
                    ConfigError);
  }
  SUBCASE("malformed JSON is rejected") {
    CHECK_THROWS_AS(parse_experiment_config("{not json"), ConfigError);
  }
  SUBCASE("missing required fields") {
    try {
      parse_experiment_config(R"({"operation": "taut"})");
      CHECK(false);
    } catch (const ConfigError& err) {
      CHECK(err.field_path() == "$.scenario");
    }
  }
  SUBCASE("full config") {
    const auto cfg = parse_experiment_config(R"({
      "scenario": "hopf-fiber", "operation": "split", "seed": 42,
      "tolerances": {"tol_scale": 0.5, "probe_tol": 0.2},
      "caps": {"energy": 25.0, "grid_density": 16, "grid_scale": 2},
      "targets": {"count": 5, "k": 2, "horizon": 6.0, "samples": 8, "per_level": 4,
                  "mode": "fiber", "vectors": [[1.0, 0.5]], "points": [[0.1, 0.2, 0.3, 0.4]]},
      "output": {"dir": "custom"}
    })");
    CHECK(cfg.seed == 42);
    CHECK(cfg.tol_scale == 0.5);
    CHECK(cfg.energy_cap == doctest::Approx(25.0));
    CHECK(cfg.grid_scale == 2);
    CHECK(cfg.count == 5);
    CHECK(cfg.vectors.size() == 1);
    CHECK(cfg.points.size() == 1);
    CHECK(cfg.out_dir == "custom");
  }
}

TEST_CASE("scenario registry") {
  CHECK_THROWS_AS(find_scenario("no-such"), DomainError);
  CHECK(find_scenario("sphere-point-s2").betti_id == "omega-s2");
  CHECK(scenario_registry().size() >= 8);
  const std::string listing = list_scenarios_json();
  CHECK(listing.find("hopf-fiber") != std::string::npos);
}

TEST_CASE("csv format contracts") {
  SUBCASE("focal profile header") {
    FocalProfile profile;
    FocalProfileEntry e;
    e.angle = 0.5;
    e.times = {1.0};
    e.multiplicities = {2};
    e.regular_segment = true;
    profile.entries.push_back(e);
    const std::string csv = focal_profile_csv(profile, 2);
    CHECK(csv.rfind("direction_index,angle,lambda_1,mult_1,lambda_2,mult_2", 0) == 0);
    CHECK(csv.find("\n0,0.5,1,2,,") != std::string::npos);
  }
  SUBCASE("splitting row format") {
    SplitRow row;
    row.seed = 3;
    row.length = 1.5;
    row.report = {2, 1, 1, true};
    const std::string csv = splitting_csv({row});
    CHECK(csv.rfind("seed,length,ind_total,ind_vertical,ind_horizontal,holds", 0) == 0);
    CHECK(csv.find("\n3,1.5,2,1,1,1\n") != std::string::npos);
  }
}

TEST_CASE("morse report JSON round-trips") {
  const auto scn = find_scenario("circle-in-plane");
  const auto patch = scn.make_patch();
  MorseReport report;
  report.target = scn.default_target;
  report.energy_cap = scn.default_cap;
  report.criticals = shoot_critical_points(patch, scn.default_target, scn.default_cap, 16);
  report.polynomial = morse_polynomial(report.criticals);
  report.reference = reference_betti(scn.betti_id, 1);
  report.verdict = perfectness_verdict(report.criticals, report.reference, report.energy_cap);
  const Json once = to_json(report);
  const MorseReport parsed = morse_report_from_json(once);
  const Json twice = to_json(parsed);
  CHECK(once == twice);  // parse -> serialize -> parse fixpoint
  CHECK(parsed.verdict.perfect);
}

TEST_CASE("experiments are deterministic for a fixed seed") {
  const auto dir_a = fresh_dir("ff-det-a");
  const auto dir_b = fresh_dir("ff-det-b");
  auto cfg = parse_experiment_config(R"({
    "scenario": "circle-in-plane", "operation": "split", "seed": 11,
    "targets": {"count": 4}
  })");
  cfg.out_dir = dir_a.string();
  const RunResult first = run_experiment(cfg);
  cfg.out_dir = dir_b.string();
  const RunResult second = run_experiment(cfg);
  CHECK(first.exit_code == 0);
  CHECK(second.exit_code == 0);
  // Byte-identical report files; the manifest carries the wall time and is
  // excluded by contract.
  for (const std::string& path : first.files_written) {
    const fs::path name = fs::path(path).filename();
    if (name == "manifest.json") continue;
    CAPTURE(name.string());
    CHECK(slurp(path) == slurp(dir_b / name));
  }
}

TEST_CASE("different seeds give different split draws") {
  const auto dir_a = fresh_dir("ff-seed-a");
  const auto dir_b = fresh_dir("ff-seed-b");
  auto cfg = parse_experiment_config(R"({
    "scenario": "circle-in-plane", "operation": "split", "targets": {"count": 3}
  })");
  cfg.out_dir = dir_a.string();
  cfg.seed = 1;
  run_experiment(cfg);
  cfg.out_dir = dir_b.string();
  cfg.seed = 2;
  run_experiment(cfg);
  CHECK(slurp(dir_a / "splitting.csv") != slurp(dir_b / "splitting.csv"));
}

TEST_CASE("taut experiment produces the perfect verdict on the sphere scenario") {
  const auto dir = fresh_dir("ff-taut");
  auto cfg = parse_experiment_config(
      R"({"scenario": "sphere-in-r3", "operation": "taut", "seed": 5})");
  cfg.out_dir = dir.string();
  const RunResult result = run_experiment(cfg);
  CHECK(result.exit_code == 0);
  const Json report = Json::parse(slurp(dir / "taut_result.json"));
  CHECK(report["findings"] == false);
  CHECK(report["result"]["reports"][0]["verdict"]["perfect"] == true);
  CHECK(report["seed"] == 5);
  // Manifest echoes the config and the seed.
  const Json manifest = Json::parse(slurp(dir / "manifest.json"));
  CHECK(manifest["seed"] == 5);
  CHECK(manifest["config"]["scenario"] == "sphere-in-r3");
  CHECK(manifest.contains("wall_time_ms"));
}

TEST_CASE("focal experiment emits the documented CSV") {
  const auto dir = fresh_dir("ff-focal");
  auto cfg = parse_experiment_config(R"({
    "scenario": "circle-in-plane", "operation": "focal",
    "targets": {"count": 4, "k": 1, "horizon": 2.0}
  })");
  cfg.out_dir = dir.string();
  const RunResult result = run_experiment(cfg);
  CHECK(result.exit_code == 0);
  const std::string csv = slurp(dir / "focal_profile.csv");
  CHECK(csv.rfind("direction_index,angle,lambda_1,mult_1,regular,failed", 0) == 0);
  // Inward circle normals hit the center at lambda_1 = 1.
  CHECK(csv.find(",1,1,") != std::string::npos);
}

TEST_CASE("unwritable output path fails to run") {
  auto cfg = parse_experiment_config(
      R"({"scenario": "hyperplane-r3", "operation": "taut"})");
  cfg.out_dir = "/proc/focalforge-cannot-write-here";
  CHECK_THROWS(run_experiment(cfg));
}

TEST_CASE("morse-bott probe through the experiment runner") {
  const auto dir = fresh_dir("ff-mb");
  auto cfg = parse_experiment_config(R"({
    "scenario": "sphere-point-s2", "operation": "probe", "seed": 6,
    "targets": {"mode": "morse-bott", "samples": 4},
    "caps": {"energy": 22.0}
  })");
  cfg.out_dir = dir.string();
  const RunResult result = run_experiment(cfg);
  CHECK(result.exit_code == 0);
  const Json report = Json::parse(slurp(dir / "probe_result.json"));
  CHECK(report["result"]["probe"]["nullity_matches"] == true);
  CHECK(report["result"]["probe"]["index_constant"] == true);
}

TEST_CASE("hopf-fiber taut run is perfect against its reference ranks") {
  const auto dir = fresh_dir("ff-hopf-taut");
  auto cfg = parse_experiment_config(
      R"({"scenario": "hopf-fiber", "operation": "taut", "seed": 8})");
  cfg.out_dir = dir.string();
  const RunResult result = run_experiment(cfg);
  CHECK(result.exit_code == 0);
  const Json report = Json::parse(slurp(dir / "taut_result.json"));
  CHECK(report["result"]["reports"][0]["verdict"]["perfect"] == true);
  // The reference ranks come from the horizontal-lift enumeration.
  CHECK(report["result"]["reports"][0]["reference"]["scenario"] == "hopf-fiber");
}

TEST_CASE("sphere-point taut run: perfect verdict with four critical points") {
  const auto dir = fresh_dir("ff-s2-taut");
  auto cfg = parse_experiment_config(
      R"({"scenario": "sphere-point-s2", "operation": "taut", "seed": 3})");
  cfg.out_dir = dir.string();
  const RunResult result = run_experiment(cfg);
  CHECK(result.exit_code == 0);
  const Json report = Json::parse(slurp(dir / "taut_result.json"));
  CHECK(report["result"]["reports"][0]["verdict"]["perfect"] == true);
  CHECK(report["result"]["reports"][0]["criticals"].size() == 4);
}

TEST_CASE("hopf split run: 50 rows, all holding") {
  const auto dir = fresh_dir("ff-hopf-split");
  auto cfg = parse_experiment_config(
      R"({"scenario": "hopf-fiber", "operation": "split", "seed": 12, "targets": {"count": 50}})");
  cfg.out_dir = dir.string();
  const RunResult result = run_experiment(cfg);
  CHECK(result.exit_code == 0);
  const Json report = Json::parse(slurp(dir / "split_result.json"));
  REQUIRE(report["result"]["rows"].size() == 50);
  for (const auto& row : report["result"]["rows"]) CHECK(row["holds"] == true);
  // 50 CSV rows plus the header.
  const std::string csv = slurp(dir / "splitting.csv");
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 51);
}
