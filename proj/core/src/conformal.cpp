#include "subpop/conformal.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "subpop/error.hpp"
#include "subpop/normal.hpp"
#include "subpop/rng.hpp"

namespace subpop {

namespace {

void require_finite_scores(std::span<const Score> scores, const char* what) {
  for (Score s : scores) {
    if (!std::isfinite(s)) throw PreconditionError(std::string(what) + ": non-finite score");
  }
}

}  // namespace

std::vector<double> PValueTable::randomized() const {
  std::vector<double> out;
  out.reserve(rows.size());
  for (const auto& r : rows) out.push_back(r.randomized);
  return out;
}

std::vector<double> PValueTable::zscores() const {
  std::vector<double> out;
  out.reserve(rows.size());
  for (const auto& r : rows) out.push_back(r.z.value);
  return out;
}

double discrete_pvalue(Score test_score, std::span<const Score> calib_scores) {
  if (calib_scores.empty()) throw PreconditionError("discrete_pvalue: empty calibration set");
  require_finite_scores(calib_scores, "discrete_pvalue");
  const auto below = std::count_if(calib_scores.begin(), calib_scores.end(),
                                   [test_score](Score s) { return s <= test_score; });
  return static_cast<double>(below + 1) / static_cast<double>(calib_scores.size() + 1);
}

double randomized_pvalue(double discrete, std::size_t m, double u) {
  const double scale = static_cast<double>(m + 1);
  const double rank = discrete * scale;
  const double nearest = std::round(rank);
  if (!(std::fabs(rank - nearest) <= 1e-9) || nearest < 1.0 || nearest > scale) {
    throw PreconditionError("randomized_pvalue: discrete p-value is off the 1/(m+1) grid");
  }
  if (!(u >= 0.0 && u < 1.0)) throw PreconditionError("randomized_pvalue: u must lie in [0, 1)");
  return discrete - u / scale;
}

ZScore zscore(double p) {
  if (!(p > 0.0 && p <= 1.0)) throw PreconditionError("zscore: p must lie in (0, 1]");
  if (p == 1.0) return {std::numeric_limits<double>::infinity(), true};
  return {normal_quantile(p), false};
}

CalibrationRanker::CalibrationRanker(std::span<const Score> calib_scores)
    : sorted_(calib_scores.begin(), calib_scores.end()) {
  if (sorted_.empty()) throw PreconditionError("CalibrationRanker: empty calibration set");
  require_finite_scores(sorted_, "CalibrationRanker");
  std::sort(sorted_.begin(), sorted_.end());
}

double CalibrationRanker::discrete_pvalue(Score test_score) const {
  const auto below = std::upper_bound(sorted_.begin(), sorted_.end(), test_score) - sorted_.begin();
  return static_cast<double>(below + 1) / static_cast<double>(sorted_.size() + 1);
}

PValueTable compute_pvalue_table(std::span<const Score> calib_scores,
                                 std::span<const Score> test_scores, std::uint64_t seed) {
  const CalibrationRanker ranker(calib_scores);
  require_finite_scores(test_scores, "compute_pvalue_table");
  PValueTable table;
  table.calibration_size = ranker.size();
  table.seed = seed;
  table.rows.reserve(test_scores.size());
  for (std::size_t j = 0; j < test_scores.size(); ++j) {
    PValueRow row;
    row.index = j;
    row.discrete = ranker.discrete_pvalue(test_scores[j]);
    row.randomized = randomized_pvalue(row.discrete, ranker.size(), test_jitter(seed, j));
    row.z = zscore(row.randomized);
    table.rows.push_back(row);
  }
  return table;
}

RegionPValues region_pvalues(std::span<const Score> calib_scores_in_region,
                             std::span<const Score> test_scores_in_region,
                             std::span<const double> jitter) {
  if (jitter.size() != test_scores_in_region.size()) {
    throw PreconditionError("region_pvalues: need one jitter per test score");
  }
  RegionPValues out;
  if (calib_scores_in_region.empty()) {
    out.evaluable = false;
    return out;
  }
  if (test_scores_in_region.empty()) return out;
  const CalibrationRanker ranker(calib_scores_in_region);
  out.discrete.reserve(test_scores_in_region.size());
  out.randomized.reserve(test_scores_in_region.size());
  for (std::size_t j = 0; j < test_scores_in_region.size(); ++j) {
    const double d = ranker.discrete_pvalue(test_scores_in_region[j]);
    out.discrete.push_back(d);
    out.randomized.push_back(randomized_pvalue(d, ranker.size(), jitter[j]));
  }
  return out;
}

double aggregate_region_pvalue(std::span<const double> pvalues) {
  if (pvalues.empty()) throw PreconditionError("aggregate_region_pvalue: empty list");
  double total = 0.0;
  for (double p : pvalues) total += 1.0 - p;
  return std::min(1.0, 2.0 * total / static_cast<double>(pvalues.size()));
}

}  // namespace subpop
