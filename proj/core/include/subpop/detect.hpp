#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "subpop/data_io.hpp"
#include "subpop/regions.hpp"

namespace subpop {

struct RegionPValue {
  std::size_t region_id = 0;
  double pvalue = 1.0;
};

struct DetectionResult {
  /// Rejected region ids, ascending by p-value (ties by id).
  std::vector<std::size_t> rejected;
  std::size_t k_max = 0;
  double alpha = 0.0;
  /// True when the dependence correction sum_{i<=N} 1/i was applied.
  bool corrected = false;
  /// Number of hypotheses N entering the step-up.
  std::size_t tested = 0;
  /// Regions left out of N: no calibration points / no test points.
  std::vector<std::size_t> unevaluable;
  std::vector<std::size_t> empty_test;
};

/// Step-up rejection over region p-values. Disjoint regions use thresholds
/// l*alpha/N; overlapping regions divide by the harmonic sum H_N as well.
DetectionResult bhy_detect(std::span<const RegionPValue> region_pvals, double alpha,
                           bool disjoint);

/// |rejected \ truth| / max(|rejected|, 1).
double estimate_fdr(std::span<const std::size_t> rejected,
                    std::span<const std::size_t> truth_non_null);

enum class RegionStatus { kTested, kUnevaluable, kEmptyTest };

struct RegionTest {
  std::size_t region_id = 0;
  std::size_t n_calib = 0;
  std::size_t n_test = 0;
  RegionStatus status = RegionStatus::kTested;
  double pvalue = 1.0;
  bool rejected = false;
};

struct DetectionReport {
  DetectionResult result;
  std::vector<RegionTest> regions;
};

/// Full detection pipeline over a calibration-bound family: region p-values,
/// aggregation, then bhy_detect over the evaluable regions. Test point j is
/// randomized with test_jitter(seed, j) in every region containing it.
DetectionReport detect_regions(std::span<const Score> calib_scores,
                               std::span<const Score> test_scores, const RegionFamily& family,
                               double alpha, bool disjoint, std::uint64_t seed);

const char* to_string(RegionStatus status);

}  // namespace subpop
