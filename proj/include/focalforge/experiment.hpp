#pragma once

#include "focalforge/report.hpp"
#include "focalforge/scenario.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace ff {

/// Declarative experiment description; parsed from a JSON document and
/// validated against the shipped schema (schema/experiment.schema.json).
struct ExperimentConfig {
  std::string scenario;
  std::string operation;  // focal | index | split | taut | cycles | probe
  std::uint64_t seed = 1;
  double tol_scale = 1.0;
  int grid_scale = 1;

  std::optional<double> energy_cap;
  int grid_density = 24;
  int count = 10;                 // direction samples / split seeds / targets
  int focal_count = 3;            // lambda_i per profile row
  std::optional<double> horizon;
  int probe_samples = 16;
  double probe_tol = 0.1;
  int per_level = 8;              // fiber samples per recursion level
  std::string probe_mode = "fiber";  // fiber | morse-bott
  std::vector<Vec> vectors;       // explicit normal-coefficient vectors
  std::vector<Vec> points;        // explicit targets
  std::string out_dir = "out";

  Json echo;  // the validated document, echoed into the manifest
};

/// Parse and validate; throws ConfigError carrying the field path.
ExperimentConfig parse_experiment_config(const std::string& json_text);

struct RunResult {
  int exit_code = 0;  // 0 ran clean, 1 ran with findings, 3 failed to run
  Json report;
  std::vector<std::string> files_written;
};

/// Run the experiment and persist the manifest plus per-operation reports
/// under config.out_dir. Deterministic for fixed (config, seed); the
/// manifest additionally carries the wall time and is the only
/// non-reproducible output file.
RunResult run_experiment(const ExperimentConfig& config);

std::string list_scenarios_json();
const char* version_string();

}  // namespace ff
