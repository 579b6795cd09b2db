#include "doctest.h"

#include "focalforge/capi.h"

#include <cstring>
#include <filesystem>
#include <fstream>
#include <string>

namespace fs = std::filesystem;

TEST_CASE("version and scenario listing") {
  CHECK(std::strlen(ff_version()) > 0);
  const std::string listing = ff_list_scenarios();
  CHECK(listing.find("sphere-point-s2") != std::string::npos);
  CHECK(listing.find("hopf-fiber") != std::string::npos);
}

TEST_CASE("create, override, run, inspect") {
  const fs::path dir = fs::temp_directory_path() / "ff-capi-run";
  fs::remove_all(dir);

  ff_experiment* handle = nullptr;
  const char* config =
      R"({"scenario": "hyperplane-r3", "operation": "taut", "seed": 9})";
  REQUIRE(ff_experiment_create(config, &handle) == FF_OK);
  CHECK(std::string(ff_experiment_error(handle)).empty());

  CHECK(ff_experiment_set_seed(handle, 12) == FF_OK);
  CHECK(ff_experiment_set_out_dir(handle, dir.string().c_str()) == FF_OK);
  CHECK(ff_experiment_set_tol_scale(handle, 1.0) == FF_OK);
  CHECK(ff_experiment_set_tol_scale(handle, -2.0) == FF_INVALID_CONFIG);

  REQUIRE(ff_experiment_run(handle) == FF_OK);
  const std::string report = ff_experiment_report(handle);
  CHECK(report.find("\"perfect\": true") != std::string::npos);
  CHECK(report.find("\"seed\": 12") != std::string::npos);
  const std::string files = ff_experiment_files(handle);
  CHECK(files.find("manifest.json") != std::string::npos);
  CHECK(fs::exists(dir / "taut_result.json"));
  ff_experiment_destroy(handle);
}

TEST_CASE("invalid configuration surfaces the field path") {
  ff_experiment* handle = nullptr;
  const char* config =
      R"({"scenario": "s", "operation": "taut", "tolerances": {"tol_scale": -1}})";
  CHECK(ff_experiment_create(config, &handle) == FF_INVALID_CONFIG);
  REQUIRE(handle != nullptr);
  const std::string error = ff_experiment_error(handle);
  CHECK(error.find("$.tolerances.tol_scale") != std::string::npos);
  CHECK(ff_experiment_run(handle) == FF_INVALID_CONFIG);
  ff_experiment_destroy(handle);
}

TEST_CASE("unknown scenario fails at run time with a message") {
  ff_experiment* handle = nullptr;
  REQUIRE(ff_experiment_create(R"({"scenario": "nope", "operation": "taut"})", &handle) ==
          FF_OK);
  CHECK(ff_experiment_run(handle) == FF_RUNTIME_ERROR);
  CHECK(std::string(ff_experiment_error(handle)).find("nope") != std::string::npos);
  ff_experiment_destroy(handle);
}

TEST_CASE("create from file") {
  const fs::path path = fs::temp_directory_path() / "ff-capi-config.json";
  {
    std::ofstream out(path);
    out << R"({"scenario": "circle-in-plane", "operation": "index",
               "targets": {"count": 2}, "output": {"dir": ")"
        << (fs::temp_directory_path() / "ff-capi-file").string() << R"("}})";
  }
  ff_experiment* handle = nullptr;
  REQUIRE(ff_experiment_create_from_file(path.string().c_str(), &handle) == FF_OK);
  CHECK(ff_experiment_run(handle) == FF_OK);
  ff_experiment_destroy(handle);

  CHECK(ff_experiment_create_from_file("/no/such/file.json", &handle) == FF_RUNTIME_ERROR);
  ff_experiment_destroy(handle);
}

TEST_CASE("null-safety") {
  CHECK(ff_experiment_create(nullptr, nullptr) == FF_INVALID_CONFIG);
  CHECK(ff_experiment_run(nullptr) == FF_INVALID_CONFIG);
  CHECK(std::string(ff_experiment_report(nullptr)).empty());
  ff_experiment_destroy(nullptr);
}
