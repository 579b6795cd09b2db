#pragma once

#include "focalforge/foliation.hpp"
#include "focalforge/patch.hpp"

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace ff {

/// A named desk-scale configuration binding a patch, optionally a
/// foliation, bundled reference data, and default targets/caps.
struct Scenario {
  std::string id;
  std::string description;
  std::string betti_id;  // empty when no reference table applies
  std::function<SubmanifoldPatch()> make_patch;
  std::function<FoliationSpec()> make_foliation;  // null when none
  Vec default_target;       // ambient coordinates; empty when not applicable
  double default_cap = 0.0; // energy cap for shooting operations
  double default_horizon = 0.0;
  bool supports_shooting = true;
  Vec default_u;            // patch parameter for vector-based operations
  Vec default_cycle_c;      // linking-cycle seed vector (nonzero interior index)
  Vec default_focal_c;      // endpoint-focal vector for the fiber probe
  Vec default_bott_target;  // positive-dimensional critical set target
};

const std::vector<Scenario>& scenario_registry();

/// Lookup by id; throws DomainError for unknown ids.
const Scenario& find_scenario(const std::string& id);

}  // namespace ff
