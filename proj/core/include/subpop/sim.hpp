#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "subpop/regions.hpp"

namespace subpop {

/// One draw from the structured normal-means model
/// z_i = mu 1{i in R*} + sigma xi_i.
struct GaussianInstance {
  std::size_t n = 0;
  std::size_t k = 0;
  double mu = 0.0;
  double sigma = 0.0;
  Region r_star;
  std::vector<double> z;
  std::uint64_t seed = 0;

  /// mu on r_star, zero elsewhere.
  std::vector<double> mean_vector() const;
};

/// R* is uniform over the family's size-k regions (stream kRegionDraw); the
/// noise for point i is draw i of stream kNoise. sigma = 0 gives the exact
/// mean vector.
GaussianInstance gen_instance(std::size_t n, std::size_t k, double mu, double sigma,
                              const RegionFamily& family, std::uint64_t seed);

/// max{t in 1..k : t <= (c sigma^2 / mu^2) min(d, t) log((n - k + t) / t)},
/// 0 when no t qualifies. Requires 1 <= d <= k <= n/2 and c > 0.
std::size_t threshold_T(std::size_t n, std::size_t k, std::size_t d, double mu, double sigma,
                        double c);

/// Closed-form lower bound on threshold_T in one SNR regime.
struct RegimeBound {
  int regime = 0;  ///< 1 low, 2 moderate, 3 high SNR
  double bound = 0.0;
};

/// Bounds of every regime whose SNR condition holds for (mu/sigma)^2.
std::vector<RegimeBound> regime_bounds(std::size_t n, std::size_t k, std::size_t d, double mu,
                                       double sigma, double c);

/// sqrt(1 - |A n B| / sqrt(|A||B|)); both sets nonempty.
double correlation_distance(const IndexSet& a, const IndexSet& b);
double correlation_distance(const Region& a, const Region& b);

enum class SweepFamily { kIntervals, kSingletonsFull, kPartition };

struct SweepConfig {
  std::vector<std::size_t> n;
  std::vector<std::size_t> k;
  std::vector<std::size_t> d;
  std::vector<double> mu_over_sigma;
  /// When set, mu = mu_over_sigma * sigma / sqrt(n).
  bool mu_per_sqrt_n = false;
  std::size_t trials = 0;
  double sigma = 1.0;
  double size_penalty_C = 1.0;
  double alpha = 0.1;
  std::optional<std::size_t> max_card;
  /// Any of: scan, refit, sure-const, sure-card, zero, detect.
  std::vector<std::string> estimators{"scan", "refit", "zero"};

  SweepFamily family = SweepFamily::kIntervals;
  std::size_t interval_min = 1;
  std::size_t interval_max = 0;  ///< 0 means n
  std::size_t block = 0;         ///< partition block length

  std::size_t threads = 1;

  /// Throws PreconditionError naming the offending field.
  void validate() const;
};

SweepConfig sweep_config_from_json(const nlohmann::json& j);
/// Reads a .toml or .json file; TOML tables map onto the JSON layout.
SweepConfig load_sweep_config(const std::string& path);
nlohmann::json to_json(const SweepConfig& cfg);

/// Builds the family a sweep cell uses for universe size n.
RegionFamily sweep_family(const SweepConfig& cfg, std::size_t n);

struct SweepRow {
  std::size_t n = 0;
  std::size_t k = 0;
  std::size_t d = 0;
  double mu_over_sigma = 0.0;
  std::size_t trial = 0;
  std::uint64_t seed = 0;
  /// Unrequested or failed metrics stay empty.
  std::optional<double> recovery_error;
  std::optional<double> refit_l2_error;
  std::optional<double> sure_const_l2_error;
  std::optional<double> sure_card_l2_error;
  std::optional<double> zero_l2_error;
  std::optional<double> fdr;
  std::string error;
  /// Wall time; kept out of the CSV so reruns are byte-identical.
  double runtime_ms = 0.0;
};

struct Summary {
  std::size_t count = 0;
  double median = 0.0;
  double q1 = 0.0;
  double q3 = 0.0;
  double iqr() const { return q3 - q1; }
};

struct CellAggregate {
  std::size_t n = 0;
  std::size_t k = 0;
  std::size_t d = 0;
  double mu_over_sigma = 0.0;
  double mu = 0.0;
  std::size_t failures = 0;
  std::optional<Summary> recovery_error;
  std::optional<Summary> refit_l2_error;
  std::optional<Summary> sure_const_l2_error;
  std::optional<Summary> sure_card_l2_error;
  std::optional<Summary> zero_l2_error;
  std::optional<Summary> fdr;
  /// threshold_T at c = 0.5, 1, 2; absent outside 1 <= d <= k <= n/2.
  std::optional<std::size_t> T_c05;
  std::optional<std::size_t> T_c1;
  std::optional<std::size_t> T_c2;
};

struct SweepReport {
  SweepConfig config;
  std::uint64_t seed = 0;
  std::vector<SweepRow> rows;
  std::vector<CellAggregate> cells;
};

/// Seed of (cell, trial); independent of thread count and visiting order.
std::uint64_t trial_seed(std::uint64_t seed, std::size_t cell, std::size_t trial);

/// Runs every (cell, trial) pair. Estimator failures are recorded in the row
/// and the sweep continues.
SweepReport run_sweep(const SweepConfig& cfg, std::uint64_t seed);

/// Linear-interpolation quantile summary (median, quartiles).
Summary summarize(std::vector<double> values);

std::string sweep_csv(const SweepReport& report);
nlohmann::json sweep_summary_json(const SweepReport& report);

}  // namespace subpop
