#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "subpop/data_io.hpp"

namespace subpop {

/// Phi^{-1}(p). `infinite` is set when p == 1, in which case `value` is
/// +inf; callers decide how to treat it.
struct ZScore {
  double value = 0.0;
  bool infinite = false;
};

struct PValueRow {
  std::size_t index = 0;
  double discrete = 1.0;
  double randomized = 1.0;
  ZScore z;
};

/// Per-test-point conformal p-values against the full calibration set.
/// Invariant per row: discrete - 1/(m+1) < randomized <= discrete.
struct PValueTable {
  std::vector<PValueRow> rows;
  std::size_t calibration_size = 0;
  std::uint64_t seed = 0;

  std::vector<double> randomized() const;
  std::vector<double> zscores() const;
};

/// (#{i : calib_i <= test} + 1) / (m + 1). Ties count toward the rank.
double discrete_pvalue(Score test_score, std::span<const Score> calib_scores);

/// discrete - u / (m + 1) for u in [0, 1). `discrete` must sit on the grid
/// {1/(m+1), ..., 1} to within 1e-9.
double randomized_pvalue(double discrete, std::size_t m, double u);

ZScore zscore(double p);

/// Calibration scores sorted once so each test point costs O(log m).
class CalibrationRanker {
 public:
  explicit CalibrationRanker(std::span<const Score> calib_scores);
  std::size_t size() const { return sorted_.size(); }
  double discrete_pvalue(Score test_score) const;

 private:
  std::vector<Score> sorted_;
};

/// Global p-values for every test score. Test point j is randomized with
/// test_jitter(seed, j).
PValueTable compute_pvalue_table(std::span<const Score> calib_scores,
                                 std::span<const Score> test_scores, std::uint64_t seed);

/// Region-restricted p-values. `evaluable` is false when the region holds no
/// calibration points; that is distinct from every p-value being 1.
struct RegionPValues {
  bool evaluable = true;
  std::vector<double> discrete;
  std::vector<double> randomized;
};

/// Ranks each in-region test score among the in-region calibration scores and
/// randomizes with `jitter[j]` (one uniform per test score, usually
/// test_jitter(seed, global test index)).
RegionPValues region_pvalues(std::span<const Score> calib_scores_in_region,
                             std::span<const Score> test_scores_in_region,
                             std::span<const double> jitter);

/// min(1, 2 * mean(1 - p_j)). Valid for the region null; large p_j (poor
/// model fit) drive it toward 0.
double aggregate_region_pvalue(std::span<const double> pvalues);

}  // namespace subpop
