// Command-line driver for the focalforge shared library. Parses arguments,
// assembles or loads the experiment configuration, and drives everything
// through the C API.

#include "focalforge/capi.h"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

namespace {

using Json = nlohmann::ordered_json;

struct GlobalOptions {
  std::string config_path;
  std::string out_dir;
  std::string scenario;
  std::uint64_t seed = 0;
  bool seed_set = false;
  double tol_scale = 0.0;
  bool tol_set = false;
};

int run_operation(const std::string& operation, const GlobalOptions& opts) {
  std::string config_text;
  if (!opts.config_path.empty()) {
    std::ifstream in(opts.config_path, std::ios::binary);
    if (!in) {
      std::cerr << "error: cannot read config file '" << opts.config_path << "'\n";
      return FF_RUNTIME_ERROR;
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    Json doc;
    try {
      doc = Json::parse(buf.str());
    } catch (const std::exception& err) {
      std::cerr << "error: invalid config JSON: " << err.what() << "\n";
      return FF_INVALID_CONFIG;
    }
    doc["operation"] = operation;  // the subcommand selects the operation
    if (!opts.scenario.empty()) doc["scenario"] = opts.scenario;
    config_text = doc.dump();
  } else {
    if (opts.scenario.empty()) {
      std::cerr << "error: provide --config or --scenario\n";
      return FF_INVALID_CONFIG;
    }
    config_text = Json{{"scenario", opts.scenario}, {"operation", operation}}.dump();
  }

  ff_experiment* handle = nullptr;
  ff_status status = ff_experiment_create(config_text.c_str(), &handle);
  if (status != FF_OK) {
    std::cerr << "error: " << (handle ? ff_experiment_error(handle) : "invalid config") << "\n";
    ff_experiment_destroy(handle);
    return status;
  }
  if (opts.seed_set) ff_experiment_set_seed(handle, opts.seed);
  if (!opts.out_dir.empty()) ff_experiment_set_out_dir(handle, opts.out_dir.c_str());
  if (opts.tol_set) ff_experiment_set_tol_scale(handle, opts.tol_scale);

  status = ff_experiment_run(handle);
  if (status == FF_OK || status == FF_FINDINGS) {
    std::cout << ff_experiment_report(handle);
    std::cerr << "files written:\n" << ff_experiment_files(handle);
    if (status == FF_FINDINGS) std::cerr << "run completed with findings\n";
  } else {
    std::cerr << "error: " << ff_experiment_error(handle) << "\n";
  }
  ff_experiment_destroy(handle);
  return status;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{std::string("focalforge ") + ff_version() +
               " - focal data, Morse indices, and tautness checks on desk-scale geometries"};
  app.require_subcommand(1);

  GlobalOptions opts;
  app.add_option("--config", opts.config_path, "experiment configuration JSON file");
  app.add_option("--seed", opts.seed, "random seed override")->each([&](const std::string&) {
    opts.seed_set = true;
  });
  app.add_option("--out-dir", opts.out_dir, "output directory override");
  app.add_option("--tol-scale", opts.tol_scale, "tolerance scale override")
      ->each([&](const std::string&) { opts.tol_set = true; });
  app.add_option("--scenario", opts.scenario, "scenario id (see list-scenarios)");

  const std::vector<std::string> operations = {"focal", "index", "split",
                                               "taut",  "cycles", "probe"};
  for (const std::string& op : operations)
    app.add_subcommand(op, "run the '" + op + "' operation")->fallthrough();
  app.add_subcommand("list-scenarios", "print the scenario registry")->fallthrough();

  CLI11_PARSE(app, argc, argv);

  const std::string sub = app.get_subcommands().front()->get_name();
  if (sub == "list-scenarios") {
    std::cout << ff_list_scenarios();
    return 0;
  }
  return run_operation(sub, opts);
}
