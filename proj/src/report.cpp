#include "focalforge/report.hpp"

#include "rank_scan.hpp"

#include <cstdio>
#include <sstream>

namespace ff {

std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

Json vec_to_json(const Vec& v) {
  Json arr = Json::array();
  for (int i = 0; i < v.size(); ++i) arr.push_back(v[i]);
  return arr;
}

Vec vec_from_json(const Json& j) {
  Vec v(j.size());
  for (size_t i = 0; i < j.size(); ++i) v[static_cast<int>(i)] = j[i].get<double>();
  return v;
}

std::string focal_profile_csv(const FocalProfile& profile, int k) {
  std::ostringstream out;
  out << "direction_index,angle";
  for (int i = 1; i <= k; ++i) out << ",lambda_" << i << ",mult_" << i;
  out << ",regular,failed\n";
  for (size_t idx = 0; idx < profile.entries.size(); ++idx) {
    const FocalProfileEntry& e = profile.entries[idx];
    out << idx << "," << format_double(e.angle);
    for (int i = 0; i < k; ++i) {
      if (i < static_cast<int>(e.times.size()))
        out << "," << format_double(e.times[i]) << "," << e.multiplicities[i];
      else
        out << ",,";
    }
    out << "," << (e.regular_segment ? 1 : 0) << "," << (e.failed ? 1 : 0) << "\n";
  }
  return out.str();
}

std::string splitting_csv(const std::vector<SplitRow>& rows) {
  std::ostringstream out;
  out << "seed,length,ind_total,ind_vertical,ind_horizontal,holds\n";
  for (const SplitRow& row : rows) {
    out << row.seed << "," << format_double(row.length) << "," << row.report.ind_total << ","
        << row.report.ind_vertical << "," << row.report.ind_horizontal << ","
        << (row.report.holds ? 1 : 0) << "\n";
  }
  return out.str();
}

std::string sv_curve_csv(const JacobiBasisTrace& basis, int stride) {
  std::ostringstream out;
  out << "t,sigma_min\n";
  for (int node = 0; node < basis.geodesic.nodes(); node += stride) {
    const Vec sv = detail::matrix_singular_values(basis.value[node]);
    out << format_double(basis.geodesic.times[node]) << ","
        << format_double(sv[sv.size() - 1]) << "\n";
  }
  return out.str();
}

std::string index_table_csv(const std::vector<IndexRow>& rows) {
  std::ostringstream out;
  out << "vector_index,length,morse_index,nullity\n";
  for (const IndexRow& row : rows)
    out << row.vector_index << "," << format_double(row.length) << "," << row.morse_index << ","
        << row.nullity << "\n";
  return out.str();
}

Json to_json(const FocalRecord& record) {
  return Json{{"time", record.time},
              {"multiplicity", record.multiplicity},
              {"smallest_retained_sv", record.smallest_retained_sv},
              {"largest_discarded_sv", record.largest_discarded_sv},
              {"regular", record.regular}};
}

Json to_json(const CriticalPoint& cp) {
  Json records = Json::array();
  for (const FocalRecord& rec : cp.records) records.push_back(to_json(rec));
  return Json{{"parameter", vec_to_json(cp.parameter)}, {"coefficients", vec_to_json(cp.coeffs)},
              {"residual", cp.residual},                {"energy", cp.energy},
              {"length", std::sqrt(cp.energy)},         {"index", cp.index},
              {"nullity", cp.nullity},                  {"records", records}};
}

Json to_json(const BettiTable& table) {
  return Json{{"scenario", table.scenario},
              {"field", table.field},
              {"ranks", table.ranks},
              {"provenance", table.provenance}};
}

Json to_json(const PerfectnessVerdict& verdict) {
  return Json{{"perfect", verdict.perfect},
              {"reliable_degree", verdict.reliable_degree},
              {"mismatch_degrees", verdict.mismatch_degrees},
              {"hints", verdict.hints}};
}

Json to_json(const MorseReport& report) {
  Json criticals = Json::array();
  for (const CriticalPoint& cp : report.criticals) criticals.push_back(to_json(cp));
  return Json{{"target", vec_to_json(report.target)},
              {"energy_cap", report.energy_cap},
              {"criticals", criticals},
              {"polynomial", report.polynomial},
              {"reference", to_json(report.reference)},
              {"verdict", to_json(report.verdict)},
              {"generic", report.generic},
              {"diagnostics",
               Json{{"seeds", report.diagnostics.seeds},
                    {"filtered", report.diagnostics.filtered},
                    {"converged", report.diagnostics.converged},
                    {"diverged", report.diagnostics.diverged},
                    {"duplicates", report.diagnostics.duplicates}}}};
}

MorseReport morse_report_from_json(const Json& j) {
  MorseReport report;
  report.target = vec_from_json(j.at("target"));
  report.energy_cap = j.at("energy_cap").get<double>();
  for (const Json& cj : j.at("criticals")) {
    CriticalPoint cp;
    cp.parameter = vec_from_json(cj.at("parameter"));
    cp.coeffs = vec_from_json(cj.at("coefficients"));
    cp.residual = cj.at("residual").get<double>();
    cp.energy = cj.at("energy").get<double>();
    cp.index = cj.at("index").get<int>();
    cp.nullity = cj.at("nullity").get<int>();
    for (const Json& rj : cj.at("records")) {
      FocalRecord rec;
      rec.time = rj.at("time").get<double>();
      rec.multiplicity = rj.at("multiplicity").get<int>();
      rec.smallest_retained_sv = rj.at("smallest_retained_sv").get<double>();
      rec.largest_discarded_sv = rj.at("largest_discarded_sv").get<double>();
      rec.regular = rj.at("regular").get<bool>();
      cp.records.push_back(rec);
    }
    report.criticals.push_back(std::move(cp));
  }
  report.polynomial = j.at("polynomial").get<std::vector<int>>();
  report.reference.scenario = j.at("reference").at("scenario").get<std::string>();
  report.reference.field = j.at("reference").at("field").get<std::string>();
  report.reference.ranks = j.at("reference").at("ranks").get<std::vector<int>>();
  report.reference.provenance = j.at("reference").at("provenance").get<std::string>();
  report.verdict.perfect = j.at("verdict").at("perfect").get<bool>();
  report.verdict.reliable_degree = j.at("verdict").at("reliable_degree").get<int>();
  report.verdict.mismatch_degrees = j.at("verdict").at("mismatch_degrees").get<std::vector<int>>();
  report.verdict.hints = j.at("verdict").at("hints").get<std::vector<std::string>>();
  report.generic = j.at("generic").get<bool>();
  report.diagnostics.seeds = j.at("diagnostics").at("seeds").get<long>();
  report.diagnostics.filtered = j.at("diagnostics").at("filtered").get<long>();
  report.diagnostics.converged = j.at("diagnostics").at("converged").get<long>();
  report.diagnostics.diverged = j.at("diagnostics").at("diverged").get<long>();
  report.diagnostics.duplicates = j.at("diagnostics").at("duplicates").get<long>();
  return report;
}

Json to_json(const FiberProbeReport& report) {
  return Json{{"fiber_dim", report.fiber_dim},
              {"nullity", report.nullity},
              {"tangency_residual", report.tangency_residual},
              {"integrable", report.integrable},
              {"inconclusive", report.inconclusive},
              {"note", report.note},
              {"pca_eigenvalues", report.pca_eigenvalues},
              {"solutions_found", report.solutions_found}};
}

Json to_json(const MorseBottReport& report) {
  Json sampled = Json::array();
  for (const CriticalPoint& cp : report.sampled) sampled.push_back(to_json(cp));
  return Json{{"sampled", sampled},
              {"fiber_dims", report.fiber_dims},
              {"nullity_matches", report.nullity_matches},
              {"index_constant", report.index_constant},
              {"degenerate_to_morse", report.degenerate_to_morse}};
}

Json to_json(const EtaPolygon& polygon) {
  Json u = Json::array(), c = Json::array();
  for (const Vec& v : polygon.u) u.push_back(vec_to_json(v));
  for (const Vec& v : polygon.c) c.push_back(vec_to_json(v));
  return Json{{"breakpoints", polygon.t},
              {"parameters", u},
              {"coefficients", c},
              {"junction_residuals", polygon.junction_residuals},
              {"norm_v", polygon.norm_v}};
}

Json to_json(const ZvSample& sample) {
  Json polys = Json::array();
  for (const EtaPolygon& poly : sample.polygons) polys.push_back(to_json(poly));
  return Json{{"polygons", polys},
              {"depth", sample.depth},
              {"per_level", sample.per_level},
              {"depth_cap", sample.depth_cap},
              {"diagnostics", sample.diagnostics}};
}

Json to_json(const BundleNode& node) {
  Json children = Json::array();
  for (const BundleNode& child : node.children) children.push_back(to_json(child));
  return Json{{"focal_time", node.focal_time}, {"base_dim", node.base_dim},
              {"children", children}};
}

Json to_json(const BundleDescriptor& descriptor) {
  if (!descriptor.root) return Json{{"root", nullptr}};
  return Json{{"root", to_json(*descriptor.root)}};
}

}  // namespace ff
