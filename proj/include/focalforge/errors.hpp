#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace ff {

/// A precondition on the inputs was violated (off-constraint point,
/// non-unit normal, endpoint on a singular leaf, ...).
class DomainError : public std::runtime_error {
 public:
  explicit DomainError(const std::string& what) : std::runtime_error(what) {}
};

/// The adaptive integrator could not continue; carries the last good time.
class IntegrationError : public std::runtime_error {
 public:
  IntegrationError(const std::string& what, double last_good_time)
      : std::runtime_error(what), last_good_time_(last_good_time) {}
  double last_good_time() const { return last_good_time_; }

 private:
  double last_good_time_;
};

/// A rank decision could not be made under the declared singular-value gap.
/// Carries the offending spectrum for diagnostics.
class RankGapError : public std::runtime_error {
 public:
  RankGapError(const std::string& what, std::vector<double> spectrum)
      : std::runtime_error(what), spectrum_(std::move(spectrum)) {}
  const std::vector<double>& spectrum() const { return spectrum_; }

 private:
  std::vector<double> spectrum_;
};

/// A requested construction is not available (e.g. a foliation without
/// enough Killing generators to span its leaves).
class ConstructionError : public std::runtime_error {
 public:
  explicit ConstructionError(const std::string& what) : std::runtime_error(what) {}
};

/// Bad experiment configuration; carries a field path for diagnostics.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& what, std::string field_path)
      : std::runtime_error(what), field_path_(std::move(field_path)) {}
  const std::string& field_path() const { return field_path_; }

 private:
  std::string field_path_;
};

}  // namespace ff
