#include "focalforge/capi.h"

#include "focalforge/experiment.hpp"

#include <fstream>
#include <sstream>
#include <string>

struct ff_experiment {
  ff::ExperimentConfig config;
  bool config_valid = false;
  std::string error;
  std::string report;
  std::string files;
};

namespace {

ff_status capture_config(const std::string& text, ff_experiment** out) {
  auto handle = new ff_experiment();
  try {
    handle->config = ff::parse_experiment_config(text);
    handle->config_valid = true;
    if (out) *out = handle;
    return FF_OK;
  } catch (const ff::ConfigError& err) {
    handle->error = std::string(err.what()) + " at " + err.field_path();
  } catch (const std::exception& err) {
    handle->error = err.what();
  }
  if (out) {
    *out = handle;
  } else {
    delete handle;
  }
  return FF_INVALID_CONFIG;
}

}  // namespace

extern "C" {

const char* ff_version(void) { return ff::version_string(); }

const char* ff_list_scenarios(void) {
  static const std::string listing = ff::list_scenarios_json();
  return listing.c_str();
}

ff_status ff_experiment_create(const char* config_json, ff_experiment** out) {
  if (!config_json) {
    if (out) *out = nullptr;
    return FF_INVALID_CONFIG;
  }
  return capture_config(config_json, out);
}

ff_status ff_experiment_create_from_file(const char* path, ff_experiment** out) {
  if (!path) {
    if (out) *out = nullptr;
    return FF_INVALID_CONFIG;
  }
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    if (out) {
      *out = new ff_experiment();
      (*out)->error = std::string("cannot read config file: ") + path;
    }
    return FF_RUNTIME_ERROR;
  }
  std::ostringstream text;
  text << in.rdbuf();
  return capture_config(text.str(), out);
}

void ff_experiment_destroy(ff_experiment* handle) { delete handle; }

ff_status ff_experiment_set_seed(ff_experiment* handle, uint64_t seed) {
  if (!handle || !handle->config_valid) return FF_INVALID_CONFIG;
  handle->config.seed = seed;
  return FF_OK;
}

ff_status ff_experiment_set_out_dir(ff_experiment* handle, const char* dir) {
  if (!handle || !handle->config_valid || !dir) return FF_INVALID_CONFIG;
  handle->config.out_dir = dir;
  return FF_OK;
}

ff_status ff_experiment_set_tol_scale(ff_experiment* handle, double scale) {
  if (!handle || !handle->config_valid || !(scale > 0.0)) return FF_INVALID_CONFIG;
  handle->config.tol_scale = scale;
  return FF_OK;
}

ff_status ff_experiment_run(ff_experiment* handle) {
  if (!handle) return FF_INVALID_CONFIG;
  if (!handle->config_valid) return FF_INVALID_CONFIG;
  try {
    const ff::RunResult result = ff::run_experiment(handle->config);
    handle->report = result.report.dump(2) + "\n";
    std::ostringstream files;
    for (const std::string& f : result.files_written) files << f << "\n";
    handle->files = files.str();
    handle->error.clear();
    return result.exit_code == 0 ? FF_OK : FF_FINDINGS;
  } catch (const ff::ConfigError& err) {
    handle->error = std::string(err.what()) + " at " + err.field_path();
    return FF_INVALID_CONFIG;
  } catch (const std::exception& err) {
    handle->error = err.what();
    return FF_RUNTIME_ERROR;
  }
}

const char* ff_experiment_error(const ff_experiment* handle) {
  return handle ? handle->error.c_str() : "null handle";
}

const char* ff_experiment_report(const ff_experiment* handle) {
  return handle ? handle->report.c_str() : "";
}

const char* ff_experiment_files(const ff_experiment* handle) {
  return handle ? handle->files.c_str() : "";
}

}  // extern "C"
