#pragma once

#include "focalforge/jacobi.hpp"
#include "focalforge/linking.hpp"
#include "focalforge/taut.hpp"
#include "focalforge/transversal.hpp"

#include <json.hpp>

#include <cstdint>
#include <string>
#include <vector>

namespace ff {

using Json = nlohmann::ordered_json;

/// Deterministic, round-trippable double formatting for CSV cells.
std::string format_double(double x);

Json vec_to_json(const Vec& v);
Vec vec_from_json(const Json& j);

// CSV emitters; column names are part of the stable output contract.
// focal scan: direction_index,angle,lambda_1,mult_1,...,lambda_k,mult_k,regular,failed
std::string focal_profile_csv(const FocalProfile& profile, int k);

struct SplitRow {
  std::uint64_t seed = 0;
  double length = 0.0;
  SplitReport report;
};
// seed,length,ind_total,ind_vertical,ind_horizontal,holds
std::string splitting_csv(const std::vector<SplitRow>& rows);

// t,sigma_min singular-value curve of a Jacobi basis along its grid.
std::string sv_curve_csv(const JacobiBasisTrace& basis, int stride = 8);

struct IndexRow {
  int vector_index = 0;
  double length = 0.0;
  int morse_index = 0;
  int nullity = 0;
};
// vector_index,length,morse_index,nullity
std::string index_table_csv(const std::vector<IndexRow>& rows);

Json to_json(const FocalRecord& record);
Json to_json(const CriticalPoint& cp);
Json to_json(const BettiTable& table);
Json to_json(const PerfectnessVerdict& verdict);
Json to_json(const MorseReport& report);
MorseReport morse_report_from_json(const Json& j);
Json to_json(const FiberProbeReport& report);
Json to_json(const MorseBottReport& report);
Json to_json(const EtaPolygon& polygon);
Json to_json(const ZvSample& sample);
Json to_json(const BundleNode& node);
Json to_json(const BundleDescriptor& descriptor);

}  // namespace ff
