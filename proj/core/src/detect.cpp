#include "subpop/detect.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "subpop/conformal.hpp"
#include "subpop/error.hpp"
#include "subpop/rng.hpp"

namespace subpop {

DetectionResult bhy_detect(std::span<const RegionPValue> region_pvals, double alpha,
                           bool disjoint) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw PreconditionError("bhy_detect: alpha must lie in (0, 1)");
  DetectionResult out;
  out.alpha = alpha;
  out.corrected = !disjoint;
  out.tested = region_pvals.size();
  if (region_pvals.empty()) return out;

  std::vector<RegionPValue> sorted(region_pvals.begin(), region_pvals.end());
  for (const auto& rp : sorted) {
    if (std::isnan(rp.pvalue)) throw NumericError("bhy_detect: NaN p-value");
  }
  std::stable_sort(sorted.begin(), sorted.end(), [](const RegionPValue& a, const RegionPValue& b) {
    return a.pvalue < b.pvalue || (a.pvalue == b.pvalue && a.region_id < b.region_id);
  });

  const std::size_t n = sorted.size();
  double denom = static_cast<double>(n);
  if (!disjoint) {
    double harmonic = 0.0;
    for (std::size_t i = 1; i <= n; ++i) harmonic += 1.0 / static_cast<double>(i);
    denom *= harmonic;
  }
  for (std::size_t l = n; l >= 1; --l) {
    if (sorted[l - 1].pvalue <= static_cast<double>(l) * alpha / denom) {
      out.k_max = l;
      break;
    }
  }
  for (std::size_t l = 0; l < out.k_max; ++l) out.rejected.push_back(sorted[l].region_id);
  return out;
}

double estimate_fdr(std::span<const std::size_t> rejected,
                    std::span<const std::size_t> truth_non_null) {
  const std::set<std::size_t> truth(truth_non_null.begin(), truth_non_null.end());
  const std::set<std::size_t> rej(rejected.begin(), rejected.end());
  std::size_t false_discoveries = 0;
  for (std::size_t id : rej) false_discoveries += truth.count(id) ? 0 : 1;
  return static_cast<double>(false_discoveries) /
         static_cast<double>(std::max<std::size_t>(rej.size(), 1));
}

DetectionReport detect_regions(std::span<const Score> calib_scores,
                               std::span<const Score> test_scores, const RegionFamily& family,
                               double alpha, bool disjoint, std::uint64_t seed) {
  if (!family.calibration_bound()) {
    throw PreconditionError("detect_regions: family has no calibration assignments");
  }
  DetectionReport report;
  std::vector<RegionPValue> tested;
  for (const Region& r : family.stored_regions()) {
    RegionTest t;
    t.region_id = r.id;
    t.n_calib = r.calib.size();
    t.n_test = r.members.size();

    std::vector<Score> calib_in;
    calib_in.reserve(r.calib.size());
    r.calib.for_each([&](std::size_t i) { calib_in.push_back(calib_scores[i]); });
    std::vector<Score> test_in;
    std::vector<double> jitter;
    test_in.reserve(r.members.size());
    jitter.reserve(r.members.size());
    r.members.for_each([&](std::size_t j) {
      test_in.push_back(test_scores[j]);
      jitter.push_back(test_jitter(seed, j));
    });

    const RegionPValues pv = region_pvalues(calib_in, test_in, jitter);
    if (!pv.evaluable) {
      t.status = RegionStatus::kUnevaluable;
      report.result.unevaluable.push_back(r.id);
    } else if (pv.randomized.empty()) {
      t.status = RegionStatus::kEmptyTest;
      report.result.empty_test.push_back(r.id);
    } else {
      t.pvalue = aggregate_region_pvalue(pv.randomized);
      tested.push_back({r.id, t.pvalue});
    }
    report.regions.push_back(t);
  }

  const auto unevaluable = std::move(report.result.unevaluable);
  const auto empty_test = std::move(report.result.empty_test);
  if (tested.empty()) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw PreconditionError("alpha must lie in (0, 1)");
    report.result = DetectionResult{};
    report.result.alpha = alpha;
    report.result.corrected = !disjoint;
  } else {
    report.result = bhy_detect(tested, alpha, disjoint);
  }
  report.result.unevaluable = unevaluable;
  report.result.empty_test = empty_test;
  for (std::size_t id : report.result.rejected) report.regions[id].rejected = true;
  return report;
}

const char* to_string(RegionStatus status) {
  switch (status) {
    case RegionStatus::kTested: return "tested";
    case RegionStatus::kUnevaluable: return "unevaluable";
    case RegionStatus::kEmptyTest: return "empty_test";
  }
  return "tested";
}

}  // namespace subpop
