#include "focalforge/experiment.hpp"

#include "focalforge/transversal.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace ff {

const char* version_string() { return "0.1.0"; }

namespace {

[[noreturn]] void fail(const std::string& what, const std::string& path) {
  throw ConfigError(what, path);
}

double positive_number(const Json& j, const std::string& path) {
  if (!j.is_number()) fail("expected a number", path);
  const double value = j.get<double>();
  if (!(value > 0.0)) fail("must be positive", path);
  return value;
}

int positive_int(const Json& j, const std::string& path, int minimum = 1) {
  if (!j.is_number_integer()) fail("expected an integer", path);
  const int value = j.get<int>();
  if (value < minimum) fail("below the allowed minimum", path);
  return value;
}

std::vector<Vec> vec_list(const Json& j, const std::string& path) {
  if (!j.is_array()) fail("expected an array of coordinate arrays", path);
  std::vector<Vec> out;
  for (size_t i = 0; i < j.size(); ++i) {
    const Json& row = j[i];
    if (!row.is_array() || row.empty())
      fail("expected a non-empty coordinate array", path + "[" + std::to_string(i) + "]");
    out.push_back(vec_from_json(row));
  }
  return out;
}

}  // namespace

ExperimentConfig parse_experiment_config(const std::string& json_text) {
  Json doc;
  try {
    doc = Json::parse(json_text);
  } catch (const nlohmann::json::parse_error& err) {
    throw ConfigError(std::string("invalid JSON: ") + err.what(), "$");
  }
  if (!doc.is_object()) fail("top-level value must be an object", "$");

  ExperimentConfig cfg;
  cfg.echo = doc;

  if (!doc.contains("scenario") || !doc["scenario"].is_string())
    fail("required string field", "$.scenario");
  cfg.scenario = doc["scenario"].get<std::string>();

  if (!doc.contains("operation") || !doc["operation"].is_string())
    fail("required string field", "$.operation");
  cfg.operation = doc["operation"].get<std::string>();
  const std::vector<std::string> ops = {"focal", "index", "split", "taut", "cycles", "probe"};
  if (std::find(ops.begin(), ops.end(), cfg.operation) == ops.end())
    fail("operation must be one of focal|index|split|taut|cycles|probe", "$.operation");

  if (doc.contains("seed")) {
    if (!doc["seed"].is_number_integer() || doc["seed"].get<long long>() < 0)
      fail("seed must be a non-negative integer", "$.seed");
    cfg.seed = doc["seed"].get<std::uint64_t>();
  }

  if (doc.contains("tolerances")) {
    const Json& tol = doc["tolerances"];
    if (!tol.is_object()) fail("expected an object", "$.tolerances");
    if (tol.contains("tol_scale"))
      cfg.tol_scale = positive_number(tol["tol_scale"], "$.tolerances.tol_scale");
    if (tol.contains("probe_tol"))
      cfg.probe_tol = positive_number(tol["probe_tol"], "$.tolerances.probe_tol");
  }

  if (doc.contains("caps")) {
    const Json& caps = doc["caps"];
    if (!caps.is_object()) fail("expected an object", "$.caps");
    if (caps.contains("energy")) cfg.energy_cap = positive_number(caps["energy"], "$.caps.energy");
    if (caps.contains("grid_density"))
      cfg.grid_density = positive_int(caps["grid_density"], "$.caps.grid_density", 4);
    if (caps.contains("grid_scale"))
      cfg.grid_scale = positive_int(caps["grid_scale"], "$.caps.grid_scale", 1);
  }

  if (doc.contains("targets")) {
    const Json& t = doc["targets"];
    if (!t.is_object()) fail("expected an object", "$.targets");
    if (t.contains("count")) cfg.count = positive_int(t["count"], "$.targets.count");
    if (t.contains("k")) cfg.focal_count = positive_int(t["k"], "$.targets.k");
    if (t.contains("horizon")) cfg.horizon = positive_number(t["horizon"], "$.targets.horizon");
    if (t.contains("samples")) cfg.probe_samples = positive_int(t["samples"], "$.targets.samples");
    if (t.contains("per_level")) cfg.per_level = positive_int(t["per_level"], "$.targets.per_level");
    if (t.contains("mode")) {
      if (!t["mode"].is_string()) fail("expected a string", "$.targets.mode");
      cfg.probe_mode = t["mode"].get<std::string>();
      if (cfg.probe_mode != "fiber" && cfg.probe_mode != "morse-bott")
        fail("mode must be fiber|morse-bott", "$.targets.mode");
    }
    if (t.contains("vectors")) cfg.vectors = vec_list(t["vectors"], "$.targets.vectors");
    if (t.contains("points")) cfg.points = vec_list(t["points"], "$.targets.points");
  }

  if (doc.contains("output")) {
    const Json& out = doc["output"];
    if (!out.is_object()) fail("expected an object", "$.output");
    if (out.contains("dir")) {
      if (!out["dir"].is_string()) fail("expected a string", "$.output.dir");
      cfg.out_dir = out["dir"].get<std::string>();
    }
  }
  return cfg;
}

namespace {

struct OpOutput {
  Json report;
  std::vector<std::pair<std::string, std::string>> files;  // name -> content
  bool findings = false;
};

Vec random_box_parameter(const SubmanifoldPatch& patch, Rng& rng) {
  Vec u(patch.leaf_dimension);
  for (int a = 0; a < patch.leaf_dimension; ++a)
    u[a] = rng.uniform(patch.param_lo[a], patch.param_hi[a]);
  return u;
}

OpOutput run_focal(const Scenario& scn, const ExperimentConfig& cfg, const NumericParams& params,
                   Rng& rng) {
  OpOutput out;
  const SubmanifoldPatch patch = scn.make_patch();
  const int k_rank = patch.normal_rank();
  const double horizon = cfg.horizon.value_or(scn.default_horizon);

  std::vector<std::pair<Vec, Vec>> samples;
  std::vector<double> angles;
  if (k_rank == 1) {
    // Sweep the first parameter coordinate with the inward direction.
    const double sign = patch.name == "hyperplane" ? 1.0 : -1.0;
    for (int i = 0; i < cfg.count; ++i) {
      Vec u = scn.default_u;
      const double lo = patch.param_lo[0], hi = patch.param_hi[0];
      u[0] = lo + (hi - lo) * (i + 0.5) / cfg.count;
      samples.push_back({u, Vec::Constant(1, sign)});
      angles.push_back(u[0]);
    }
  } else if (k_rank == 2) {
    for (int i = 0; i < cfg.count; ++i) {
      const double a = 2.0 * M_PI * i / cfg.count;
      samples.push_back({scn.default_u, Vec{{std::cos(a), std::sin(a)}}});
      angles.push_back(a);
    }
  } else {
    for (int i = 0; i < cfg.count; ++i) {
      samples.push_back({scn.default_u, rng.unit_vector(k_rank)});
      angles.push_back(static_cast<double>(i));
    }
  }

  FocalProfile profile = focal_time_profile(patch, samples, cfg.focal_count, horizon, params);
  for (size_t i = 0; i < profile.entries.size(); ++i) profile.entries[i].angle = angles[i];

  int failures = 0;
  Json rows = Json::array();
  for (const FocalProfileEntry& e : profile.entries) {
    if (e.failed) ++failures;
    rows.push_back(Json{{"angle", e.angle},
                        {"times", e.times},
                        {"multiplicities", e.multiplicities},
                        {"regular_segment", e.regular_segment},
                        {"failed", e.failed},
                        {"error", e.error}});
  }
  out.report = Json{{"horizon", horizon},
                    {"empirical_k", profile.empirical_k},
                    {"entries", rows},
                    {"failures", failures}};
  out.files.emplace_back("focal_profile.csv", focal_profile_csv(profile, cfg.focal_count));
  out.findings = failures > 0;
  return out;
}

OpOutput run_index(const Scenario& scn, const ExperimentConfig& cfg, const NumericParams& params,
                   Rng& rng) {
  OpOutput out;
  const SubmanifoldPatch patch = scn.make_patch();
  std::vector<Vec> vectors = cfg.vectors;
  if (vectors.empty()) {
    const double len_max = std::sqrt(cfg.energy_cap.value_or(scn.default_cap));
    for (int i = 0; i < cfg.count; ++i)
      vectors.push_back(rng.uniform(0.3, 0.95 * len_max) * rng.unit_vector(patch.normal_rank()));
  }
  std::vector<IndexRow> rows;
  Json entries = Json::array();
  for (size_t i = 0; i < vectors.size(); ++i) {
    const JacobiBasisTrace basis = jacobi_basis(patch, scn.default_u, vectors[i], 1.0, params);
    const auto records = detect_focal(basis, 0.0, 1.0, params);
    IndexRow row{static_cast<int>(i), vectors[i].norm(), morse_index(records, 1.0, params),
                 nullity_at_endpoint(records, 1.0, params)};
    rows.push_back(row);
    Json recj = Json::array();
    for (const FocalRecord& rec : records) recj.push_back(to_json(rec));
    entries.push_back(Json{{"coefficients", vec_to_json(vectors[i])},
                           {"length", row.length},
                           {"morse_index", row.morse_index},
                           {"nullity", row.nullity},
                           {"records", recj},
                           {"symplectic_drift", basis.symplectic_drift()}});
    if (i == 0) out.files.emplace_back("sv_curve.csv", sv_curve_csv(basis));
  }
  out.report = Json{{"entries", entries}};
  out.files.emplace_back("index_table.csv", index_table_csv(rows));
  return out;
}

OpOutput run_split(const Scenario& scn, const ExperimentConfig& cfg, const NumericParams& params,
                   Rng& rng) {
  OpOutput out;
  if (!scn.make_foliation)
    fail("scenario has no foliation; split does not apply", "$.scenario");
  const SubmanifoldPatch patch = scn.make_patch();
  const FoliationSpec foliation = scn.make_foliation();
  const double len_max = 0.9 * std::sqrt(cfg.energy_cap.value_or(scn.default_cap));

  std::vector<SplitRow> rows;
  int failures = 0;
  for (int i = 0; i < cfg.count; ++i) {
    bool done = false;
    for (int attempt = 0; attempt < 8 && !done; ++attempt) {
      const Vec u = random_box_parameter(patch, rng);
      const double len = rng.uniform(0.3, len_max);
      const Vec coeffs = len * rng.unit_vector(patch.normal_rank());
      try {
        const SplitReport report = verify_index_splitting(patch, u, coeffs, foliation, params);
        rows.push_back({static_cast<std::uint64_t>(i), len, report});
        if (!report.holds) ++failures;
        done = true;
      } catch (const DomainError&) {
        // focal endpoint or tangential data; resample
      } catch (const RankGapError&) {
      }
    }
    if (!done) ++failures;
  }
  Json entries = Json::array();
  for (const SplitRow& row : rows)
    entries.push_back(Json{{"seed", row.seed},
                           {"length", row.length},
                           {"ind_total", row.report.ind_total},
                           {"ind_vertical", row.report.ind_vertical},
                           {"ind_horizontal", row.report.ind_horizontal},
                           {"holds", row.report.holds}});
  out.report = Json{{"rows", entries}, {"failures", failures}, {"requested", cfg.count}};
  out.files.emplace_back("splitting.csv", splitting_csv(rows));
  out.findings = failures > 0;
  return out;
}

OpOutput run_taut(const Scenario& scn, const ExperimentConfig& cfg, const NumericParams& params,
                  Rng&) {
  OpOutput out;
  if (!scn.supports_shooting)
    fail("scenario does not support shooting", "$.scenario");
  if (scn.betti_id.empty())
    fail("scenario has no bundled reference table; taut does not apply", "$.scenario");
  const SubmanifoldPatch patch = scn.make_patch();
  const double cap = cfg.energy_cap.value_or(scn.default_cap);
  std::vector<Vec> targets = cfg.points;
  if (targets.empty()) targets.push_back(scn.default_target);

  Json reports = Json::array();
  bool all_perfect = true;
  for (const Vec& target : targets) {
    MorseReport report;
    report.target = target;
    report.energy_cap = cap;
    report.criticals =
        shoot_critical_points(patch, target, cap, cfg.grid_density, params, &report.diagnostics);
    report.polynomial = morse_polynomial(report.criticals);
    report.generic = true;
    for (const CriticalPoint& cp : report.criticals) {
      if (cp.nullity > 0) report.generic = false;
      for (const FocalRecord& rec : cp.records)
        if (std::abs(rec.time - 1.0) < 1e-4) report.generic = false;
    }
    Json entry;
    if (!report.generic) {
      all_perfect = false;
      entry = Json{{"target", vec_to_json(target)},
                   {"refused", "non-generic target"},
                   {"criticals", static_cast<int>(report.criticals.size())}};
    } else {
      int reliable = 0;
      {
        int max_index = -1;
        int limit = std::numeric_limits<int>::max();
        for (const CriticalPoint& cp : report.criticals) {
          max_index = std::max(max_index, cp.index);
          if (cp.energy > cap * 0.95) limit = std::min(limit, cp.index - 1);
        }
        reliable = limit == std::numeric_limits<int>::max() ? max_index : limit;
      }
      report.reference = reference_betti(scn.betti_id, std::max(0, reliable));
      report.verdict = perfectness_verdict(report.criticals, report.reference, cap, params);
      all_perfect = all_perfect && report.verdict.perfect;
      entry = to_json(report);
    }
    reports.push_back(entry);
  }
  out.report = Json{{"reports", reports}};
  out.files.emplace_back("taut_report.json", reports.dump(2) + "\n");
  out.findings = !all_perfect;
  return out;
}

OpOutput run_cycles(const Scenario& scn, const ExperimentConfig& cfg, const NumericParams& params,
                    Rng& rng) {
  OpOutput out;
  const SubmanifoldPatch patch = scn.make_patch();
  const Vec coeffs = cfg.vectors.empty() ? scn.default_cycle_c : cfg.vectors.front();
  if (coeffs.size() == 0) fail("scenario has no default cycles vector", "$.targets.vectors");
  const Vec u = scn.default_u;

  const ZvSample sample = sample_Zv(patch, u, coeffs, cfg.per_level, rng, params);
  double max_energy_dev = 0.0, max_junction = 0.0;
  for (const EtaPolygon& poly : sample.polygons) {
    max_energy_dev = std::max(max_energy_dev, energy_identity_check(poly, patch));
    max_junction = std::max(max_junction, polygon_breakpoint_residual(poly, patch, params));
  }

  std::optional<FoliationSpec> foliation;
  if (scn.make_foliation) foliation = scn.make_foliation();
  const DeltaDimension delta =
      delta_dimension(patch, u, coeffs, foliation ? &*foliation : nullptr, params);
  const int tangent_dim = tangent_decomposition_dim(patch, u, coeffs, params);
  const BundleDescriptor descriptor = build_bundle_descriptor(patch, u, coeffs, params);
  const int cohdim = cohdim_bookkeeping(descriptor);

  const bool dims_agree = delta.index == tangent_dim && delta.index == cohdim &&
                          (!delta.foliation_crosscheck || *delta.foliation_crosscheck ==
                                                              delta.index);
  out.report = Json{{"vector", vec_to_json(coeffs)},
                    {"delta_dimension", delta.index},
                    {"foliation_crosscheck",
                     delta.foliation_crosscheck ? Json(*delta.foliation_crosscheck) : Json()},
                    {"tangent_decomposition_dim", tangent_dim},
                    {"cohdim_bookkeeping", cohdim},
                    {"dims_agree", dims_agree},
                    {"max_energy_deviation", max_energy_dev},
                    {"max_junction_residual", max_junction},
                    {"sample", to_json(sample)},
                    {"descriptor", to_json(descriptor)}};
  out.files.emplace_back("cycles_report.json", out.report.dump(2) + "\n");
  out.findings = !dims_agree || max_energy_dev > 1e-8 || max_junction > 1e-7 ||
                 !sample.diagnostics.empty();
  return out;
}

OpOutput run_probe(const Scenario& scn, const ExperimentConfig& cfg, const NumericParams& params,
                   Rng& rng) {
  OpOutput out;
  const SubmanifoldPatch patch = scn.make_patch();
  if (cfg.probe_mode == "fiber") {
    const Vec coeffs = cfg.vectors.empty() ? scn.default_focal_c : cfg.vectors.front();
    if (coeffs.size() == 0) fail("scenario has no default focal vector", "$.targets.vectors");
    const FiberProbeReport report = fiber_integrability_probe(
        patch, scn.default_u, coeffs, cfg.probe_samples, cfg.probe_tol, rng, params);
    out.report = Json{{"mode", "fiber"}, {"vector", vec_to_json(coeffs)}, {"probe", to_json(report)}};
    out.findings = !report.integrable;
  } else {
    Vec target = cfg.points.empty() ? scn.default_bott_target : cfg.points.front();
    if (target.size() == 0) fail("scenario has no default critical-manifold target",
                                 "$.targets.points");
    const MorseBottReport report = morse_bott_probe(
        patch, target, cfg.energy_cap.value_or(scn.default_cap), cfg.probe_samples, rng, params);
    out.report =
        Json{{"mode", "morse-bott"}, {"target", vec_to_json(target)}, {"probe", to_json(report)}};
    out.findings = !(report.degenerate_to_morse ||
                     (report.nullity_matches && report.index_constant));
  }
  out.files.emplace_back("probe_report.json", out.report.dump(2) + "\n");
  return out;
}

void write_file(const std::string& dir, const std::string& name, const std::string& content,
                std::vector<std::string>& written) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  const fs::path path = fs::path(dir) / name;
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << content;
  written.push_back(path.string());
}

}  // namespace

RunResult run_experiment(const ExperimentConfig& cfg) {
  const auto t0 = std::chrono::steady_clock::now();
  const Scenario& scn = find_scenario(cfg.scenario);
  NumericParams params;
  params = params.scaled(cfg.tol_scale);
  params.nodes_per_unit *= cfg.grid_scale;
  Rng rng(cfg.seed);

  OpOutput op;
  if (cfg.operation == "focal") {
    op = run_focal(scn, cfg, params, rng);
  } else if (cfg.operation == "index") {
    op = run_index(scn, cfg, params, rng);
  } else if (cfg.operation == "split") {
    op = run_split(scn, cfg, params, rng);
  } else if (cfg.operation == "taut") {
    op = run_taut(scn, cfg, params, rng);
  } else if (cfg.operation == "cycles") {
    op = run_cycles(scn, cfg, params, rng);
  } else if (cfg.operation == "probe") {
    op = run_probe(scn, cfg, params, rng);
  } else {
    fail("unknown operation", "$.operation");
  }

  RunResult result;
  result.report = Json{{"scenario", cfg.scenario},
                       {"operation", cfg.operation},
                       {"seed", cfg.seed},
                       {"tol_scale", cfg.tol_scale},
                       {"grid_scale", cfg.grid_scale},
                       {"findings", op.findings},
                       {"result", op.report}};

  write_file(cfg.out_dir, cfg.operation + "_result.json", result.report.dump(2) + "\n",
             result.files_written);
  for (const auto& [name, content] : op.files)
    if (name != cfg.operation + "_result.json")
      write_file(cfg.out_dir, name, content, result.files_written);

  const auto t1 = std::chrono::steady_clock::now();
  // The manifest carries the wall time and is the one output file that is
  // not byte-reproducible across runs.
  Json manifest = Json{
      {"config", cfg.echo},
      {"version", version_string()},
      {"seed", cfg.seed},
      {"wall_time_ms",
       std::chrono::duration_cast<std::chrono::milliseconds>(t1 - t0).count()}};
  write_file(cfg.out_dir, "manifest.json", manifest.dump(2) + "\n", result.files_written);

  result.exit_code = op.findings ? 1 : 0;
  return result;
}

std::string list_scenarios_json() {
  Json arr = Json::array();
  for (const Scenario& s : scenario_registry()) {
    arr.push_back(Json{{"id", s.id},
                       {"description", s.description},
                       {"reference_table", s.betti_id},
                       {"has_foliation", static_cast<bool>(s.make_foliation)},
                       {"supports_shooting", s.supports_shooting},
                       {"default_cap", s.default_cap},
                       {"default_horizon", s.default_horizon}});
  }
  return arr.dump(2) + "\n";
}

}  // namespace ff
