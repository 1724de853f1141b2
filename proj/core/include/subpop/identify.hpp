#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "subpop/regions.hpp"

namespace subpop {

struct ScanConfig {
  double size_penalty_C = 1.0;
  double sigma = 1.0;
  /// VC-dimension used in the penalty; 0 means "take the family's".
  std::size_t vc_dim_d = 0;
  /// Regions with more members than this are skipped.
  std::optional<std::size_t> max_card;
  bool penalized = true;
  /// Worker threads for the region sweep; the result does not depend on it.
  std::size_t threads = 1;
};

struct ScanResult {
  Region region;
  double objective = 0.0;
  double z_R = 0.0;
  double penalty = 0.0;
  /// objective(best) - objective(second best); 0 with a single candidate.
  double runner_up_gap = 0.0;
  /// The winner holds an infinite Z-score (p = 1 upstream).
  bool infinite = false;
  std::size_t candidates = 0;
  /// sigma * sqrt(d log(n / |R|) / |R|): the signal scale below which a
  /// region of the winner's size is not reliably recoverable.
  double min_detectable_mean = 0.0;
  std::vector<std::string> diagnostics;
};

/// sum_{i in R} z_i / sqrt(|R|). Infinite members make the result infinite.
double region_zscore(std::span<const double> z, const IndexSet& members);

/// C * sigma * sqrt(d * log(e * n / max(card, d))), with the log clamped at
/// zero when d > e n.
double scan_penalty(std::size_t n, std::size_t d, std::size_t card, double C, double sigma);

/// Penalized multi-scale scan: argmax over regions of z_R - penalty(|R|),
/// ties to the smaller cardinality, then the smaller id. Throws
/// PreconditionError when the max_card filter leaves no region.
ScanResult scan(std::span<const double> z, const RegionFamily& family, const ScanConfig& cfg);

struct ScanRow {
  std::size_t region_id = 0;
  std::size_t cardinality = 0;
  double z_R = 0.0;
  double penalty = 0.0;
  double objective = 0.0;
};

/// Objective of every region that passes the max_card filter, in id order.
std::vector<ScanRow> scan_table(std::span<const double> z, const RegionFamily& family,
                                const ScanConfig& cfg);

/// |R_hat symmetric-difference R_star| / |R_star|.
double recovery_error(const IndexSet& r_hat, const IndexSet& r_star);

/// 1.4826 * median |z_i|. A convenience estimate of the noise level for
/// null-dominated Z-scores; the scan's guarantees assume sigma is known.
double mad_sigma(std::span<const double> z);

}  // namespace subpop
