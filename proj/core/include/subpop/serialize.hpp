#pragma once

#include <string>

#include <nlohmann/json.hpp>

#include "subpop/conformal.hpp"
#include "subpop/detect.hpp"
#include "subpop/identify.hpp"
#include "subpop/refit.hpp"
#include "subpop/regions.hpp"

namespace subpop {

/// Finite values as numbers; infinities and NaN as the strings "inf",
/// "-inf", "nan" (plain JSON has no spelling for them).
nlohmann::json json_number(double v);
double number_from_json(const nlohmann::json& j);

nlohmann::json to_json(const IndexSet& s);
nlohmann::json to_json(const Descriptor& d);
nlohmann::json to_json(const Region& r);
/// Stored families list their regions; interval families are written as
/// their generator (universe_size, min_size, max_size).
nlohmann::json to_json(const RegionFamily& f);

/// Inverse of to_json(RegionFamily). Explicit member lists are validated
/// against universe_size and the disjointness flag.
RegionFamily family_from_json(const nlohmann::json& j);
Descriptor descriptor_from_json(const nlohmann::json& j);

nlohmann::json to_json(const PValueTable& t);
/// Columns index, discrete, randomized, zscore, seed.
std::string to_csv(const PValueTable& t);

nlohmann::json to_json(const DetectionResult& r);
nlohmann::json to_json(const DetectionReport& r);
/// One row per region: region_id, n_calib, n_test, status, pvalue, rejected.
std::string to_csv(const DetectionReport& r);

nlohmann::json to_json(const ScanResult& r);
std::string scan_table_csv(const std::vector<ScanRow>& rows);

nlohmann::json to_json(const RefitEstimate& e);
nlohmann::json to_json(const SureFit& f);
nlohmann::json to_json(const StackWeights& w);

const char* to_string(DfModel m);

}  // namespace subpop
