#include "subpop/serialize.hpp"

#include <cmath>
#include <limits>

#include "subpop/data_io.hpp"
#include "subpop/error.hpp"

namespace subpop {

using nlohmann::json;

json json_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

double number_from_json(const json& j) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
  }
  throw ParseError("expected a number, got " + j.dump());
}

json to_json(const IndexSet& s) { return s.to_vector(); }

json to_json(const Descriptor& d) {
  return std::visit(
      [](const auto& v) -> json {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, ExplicitDescriptor>) {
          return {{"type", "explicit"}};
        } else if constexpr (std::is_same_v<T, GroupDescriptor>) {
          return {{"type", "group"}, {"label", v.label}};
        } else if constexpr (std::is_same_v<T, IntervalDescriptor>) {
          return {{"type", "interval"}, {"lo", v.lo}, {"hi", v.hi}};
        } else {
          json pt = json::array();
          for (double x : v.center_point) pt.push_back(json_number(x));
          return {{"type", "ball"},
                  {"center", v.center},
                  {"center_point", pt},
                  {"radius", json_number(v.radius)},
                  {"radius_sq", json_number(v.radius_sq)},
                  {"cardinality", v.cardinality}};
        }
      },
      d);
}

Descriptor descriptor_from_json(const json& j) {
  const std::string type = j.value("type", "explicit");
  if (type == "explicit") return ExplicitDescriptor{};
  if (type == "group") return GroupDescriptor{j.at("label").get<std::string>()};
  if (type == "interval") {
    return IntervalDescriptor{j.at("lo").get<std::size_t>(), j.at("hi").get<std::size_t>()};
  }
  if (type == "ball") {
    BallDescriptor b;
    b.center = j.at("center").get<std::size_t>();
    for (const auto& x : j.at("center_point")) b.center_point.push_back(number_from_json(x));
    b.radius = number_from_json(j.at("radius"));
    b.radius_sq = j.contains("radius_sq") ? number_from_json(j.at("radius_sq"))
                                          : b.radius * b.radius;
    b.cardinality = j.value("cardinality", std::size_t{0});
    return b;
  }
  throw ParseError("unknown region descriptor type '" + type + "'");
}

json to_json(const Region& r) {
  json j{{"id", r.id}, {"descriptor", to_json(r.descriptor)}, {"member_indices", to_json(r.members)}};
  if (!r.calib.empty()) j["calib_indices"] = to_json(r.calib);
  return j;
}

json to_json(const RegionFamily& f) {
  json j{{"kind", to_string(f.kind())},
         {"vc_dim", f.vc_dim()},
         {"disjoint", f.disjoint()},
         {"universe_size", f.universe_size()}};
  if (f.generated()) {
    j["min_size"] = f.interval_min_size();
    j["max_size"] = f.interval_max_size();
    return j;
  }
  j["calibration_bound"] = f.calibration_bound();
  json regions = json::array();
  for (const Region& r : f.stored_regions()) {
    json rj = to_json(r);
    if (f.calibration_bound() && !rj.contains("calib_indices")) rj["calib_indices"] = json::array();
    regions.push_back(std::move(rj));
  }
  j["regions"] = std::move(regions);
  return j;
}

RegionFamily family_from_json(const json& j) {
  try {
    const FamilyKind kind = family_kind_from_string(j.value("kind", "explicit"));
    if (!j.contains("regions")) {
      if (kind != FamilyKind::kIntervals) {
        throw ParseError("family manifest: 'regions' is required for kind '" +
                         std::string(to_string(kind)) + "'");
      }
      const auto n = j.at("universe_size").get<std::size_t>();
      RegionFamily f = interval_family(n, j.value("min_size", std::size_t{1}),
                                       j.value("max_size", n));
      if (j.contains("vc_dim")) f = f.with_vc_dim(j.at("vc_dim").get<std::size_t>());
      return f;
    }
    std::vector<Region> regions;
    std::size_t universe = 0;
    bool any_calib = false;
    for (const auto& rj : j.at("regions")) {
      Region r;
      r.id = rj.value("id", regions.size());
      if (r.id != regions.size()) {
        throw ParseError("family manifest: region ids must be 0, 1, 2, ... in order (got " +
                         std::to_string(r.id) + " at position " + std::to_string(regions.size()) +
                         ")");
      }
      r.members = IndexSet::from_unsorted(rj.at("member_indices").get<std::vector<std::size_t>>());
      if (rj.contains("calib_indices")) {
        any_calib = true;
        r.calib = IndexSet::from_unsorted(rj.at("calib_indices").get<std::vector<std::size_t>>());
      }
      if (rj.contains("descriptor")) r.descriptor = descriptor_from_json(rj.at("descriptor"));
      if (!r.members.empty()) universe = std::max(universe, r.members.max_index() + 1);
      regions.push_back(std::move(r));
    }
    if (j.contains("universe_size")) universe = j.at("universe_size").get<std::size_t>();
    const std::size_t vc = j.value("vc_dim", std::size_t{1});
    const bool disjoint = j.value("disjoint", false);
    const bool bound = j.value("calibration_bound", any_calib);
    return RegionFamily::from_regions(kind, std::move(regions), universe, vc, disjoint, bound);
  } catch (const json::exception& e) {
    throw ParseError(std::string("family manifest: ") + e.what());
  }
}

json to_json(const PValueTable& t) {
  json rows = json::array();
  for (const PValueRow& r : t.rows) {
    rows.push_back({{"index", r.index},
                    {"discrete", r.discrete},
                    {"randomized", r.randomized},
                    {"zscore", json_number(r.z.value)},
                    {"infinite", r.z.infinite}});
  }
  return {{"calibration_size", t.calibration_size}, {"seed", t.seed}, {"rows", rows}};
}

std::string to_csv(const PValueTable& t) {
  std::string out = "index,discrete,randomized,zscore,seed\n";
  const std::string seed = std::to_string(t.seed);
  for (const PValueRow& r : t.rows) {
    out += std::to_string(r.index) + ',' + format_number(r.discrete) + ',' +
           format_number(r.randomized) + ',' + format_number(r.z.value) + ',' + seed + '\n';
  }
  return out;
}

json to_json(const DetectionResult& r) {
  return {{"rejected", r.rejected},   {"k_max", r.k_max},
          {"alpha", r.alpha},         {"corrected", r.corrected},
          {"tested", r.tested},       {"unevaluable", r.unevaluable},
          {"empty_test", r.empty_test}};
}

json to_json(const DetectionReport& r) {
  json regions = json::array();
  for (const RegionTest& t : r.regions) {
    regions.push_back({{"region_id", t.region_id},
                       {"n_calib", t.n_calib},
                       {"n_test", t.n_test},
                       {"status", to_string(t.status)},
                       {"pvalue", t.pvalue},
                       {"rejected", t.rejected}});
  }
  json j = to_json(r.result);
  j["regions"] = regions;
  std::vector<std::string> diagnostics;
  if (!r.result.unevaluable.empty()) {
    diagnostics.push_back(std::to_string(r.result.unevaluable.size()) +
                          " region(s) hold no calibration points and were left out of N");
  }
  if (!r.result.empty_test.empty()) {
    diagnostics.push_back(std::to_string(r.result.empty_test.size()) +
                          " region(s) hold no test points and were left out of N");
  }
  j["diagnostics"] = diagnostics;
  return j;
}

std::string to_csv(const DetectionReport& r) {
  std::string out = "region_id,n_calib,n_test,status,pvalue,rejected\n";
  for (const RegionTest& t : r.regions) {
    out += std::to_string(t.region_id) + ',' + std::to_string(t.n_calib) + ',' +
           std::to_string(t.n_test) + ',' + to_string(t.status) + ',' +
           (t.status == RegionStatus::kTested ? format_number(t.pvalue) : std::string{}) + ',' +
           (t.rejected ? "1" : "0") + '\n';
  }
  return out;
}

json to_json(const ScanResult& r) {
  return {{"region", to_json(r.region)},
          {"cardinality", r.region.members.size()},
          {"objective", json_number(r.objective)},
          {"z_R", json_number(r.z_R)},
          {"penalty", json_number(r.penalty)},
          {"runner_up_gap", json_number(r.runner_up_gap)},
          {"infinite", r.infinite},
          {"candidates", r.candidates},
          {"min_detectable_mean", json_number(r.min_detectable_mean)},
          {"diagnostics", r.diagnostics}};
}

std::string scan_table_csv(const std::vector<ScanRow>& rows) {
  std::string out = "region_id,cardinality,z_R,penalty,objective\n";
  for (const ScanRow& r : rows) {
    out += std::to_string(r.region_id) + ',' + std::to_string(r.cardinality) + ',' +
           format_number(r.z_R) + ',' + format_number(r.penalty) + ',' +
           format_number(r.objective) + '\n';
  }
  return out;
}

json to_json(const RefitEstimate& e) {
  return {{"support", to_json(e.support)},
          {"level", e.level},
          {"n", e.n},
          {"scan", to_json(e.scan)}};
}

const char* to_string(DfModel m) {
  return m == DfModel::kConstantOne ? "constant-one" : "cardinality";
}

json to_json(const SureFit& f) {
  const bool empty = f.selection.region.id == kEmptyRegionId;
  json region = empty ? json{{"id", nullptr}, {"descriptor", {{"type", "empty"}}},
                             {"member_indices", json::array()}}
                      : to_json(f.selection.region);
  json estimate = json::array();
  for (double v : f.estimate) estimate.push_back(v);
  return {{"region", region},
          {"empty", empty},
          {"criterion_value", f.selection.criterion_value},
          {"df_model", to_string(f.selection.df_model)},
          {"df", f.selection.df},
          {"estimate", estimate}};
}

json to_json(const StackWeights& w) {
  return {{"w", std::vector<double>(w.w.data(), w.w.data() + w.w.size())},
          {"objective", w.objective},
          {"kkt_residual", w.kkt_residual},
          {"iterations", w.iterations}};
}

}  // namespace subpop
