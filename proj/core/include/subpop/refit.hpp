#pragma once

#include <cstddef>
#include <limits>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "subpop/identify.hpp"
#include "subpop/regions.hpp"

namespace subpop {

/// Piecewise-constant estimate: `level` on `support`, zero elsewhere.
struct RefitEstimate {
  Region support;
  double level = 0.0;
  std::size_t n = 0;
  ScanResult scan;

  std::vector<double> vector_form() const;
};

/// Scan on y (as Z-scores), then average y over the winning region.
RefitEstimate refit_two_step(std::span<const double> y, const RegionFamily& family,
                             const ScanConfig& cfg);

enum class DfModel {
  kConstantOne,  ///< on-support mean, df = 1
  kCardinality,  ///< identity on support, df = |R| (Mallows C_p)
};

inline constexpr std::size_t kEmptyRegionId = std::numeric_limits<std::size_t>::max();

struct SureSelection {
  /// Selected region; id kEmptyRegionId and no members for the empty set.
  Region region;
  double criterion_value = 0.0;
  DfModel df_model = DfModel::kConstantOne;
  std::size_t df = 0;
};

struct SureFit {
  SureSelection selection;
  std::vector<double> estimate;
};

/// Minimizes ||y - fit_R||^2 + 2 sigma^2 df(R) over the family plus the
/// empty set (df 0). Ties go to the smaller df, then the smaller id.
SureFit sure_mle(std::span<const double> y, const RegionFamily& family, double sigma,
                 DfModel df_model);

struct StackWeights {
  Eigen::VectorXd w;
  double objective = 0.0;
  double kkt_residual = 0.0;
  std::size_t iterations = 0;
};

/// Weights on the probability simplex minimizing ||y - U w||^2, by
/// accelerated projected gradient (restart on non-monotone steps) followed by
/// an equality-constrained polish on the detected support. Exactly repeated
/// columns put their mass on the lowest index.
StackWeights stack_weights(const Eigen::MatrixXd& U, std::span<const double> y);

/// Euclidean projection onto {w >= 0, sum w = 1}.
Eigen::VectorXd project_to_simplex(const Eigen::VectorXd& v);

/// ||w - P(w - grad f(w))||_inf for f(w) = ||y - U w||^2.
double simplex_kkt_residual(const Eigen::MatrixXd& U, const Eigen::VectorXd& y,
                            const Eigen::VectorXd& w);

/// Row means of an n x s prediction matrix.
std::vector<double> average_predictions(const Eigen::MatrixXd& preds);

struct RelativeDeviation {
  double value = 0.0;
  std::size_t used = 0;
  std::size_t dropped = 0;
};

/// median_l |y_next - pred| / |y_next - y_prev|, dropping pairs whose
/// denominator is zero. Throws NumericError when every pair is dropped.
RelativeDeviation median_relative_abs_dev(std::span<const double> pred,
                                          std::span<const double> y_next,
                                          std::span<const double> y_prev);

/// Pure-local dispatch: the fitted region whose nearest member (by
/// Euclidean distance over `points`) is closest to `x`; ties to the smaller
/// id. Empty regions are skipped; throws when none remain.
std::size_t nearest_region(std::span<const double> x, std::span<const Region> fitted,
                           std::span<const std::vector<double>> points);

}  // namespace subpop
