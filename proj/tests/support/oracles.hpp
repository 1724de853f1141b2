#pragma once

// Independent reference implementations used as test oracles. They follow
// the textbook definitions directly (no running sums, no sorting tricks) so
// agreement with the library is meaningful.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <random>
#include <vector>

namespace oracle {

using Sets = std::vector<std::vector<std::size_t>>;

/// Two-sided Kolmogorov-Smirnov p-value for H0: samples ~ U(0, 1), from the
/// asymptotic Kolmogorov series with Stephens' small-sample correction.
inline double ks_uniform_pvalue(std::vector<double> u) {
  std::sort(u.begin(), u.end());
  const double n = static_cast<double>(u.size());
  double dmax = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double lo = u[i] - static_cast<double>(i) / n;
    const double hi = static_cast<double>(i + 1) / n - u[i];
    dmax = std::max({dmax, lo, hi});
  }
  const double sq = std::sqrt(n);
  const double lambda = (sq + 0.12 + 0.11 / sq) * dmax;
  if (lambda < 1e-3) return 1.0;
  double sum = 0.0;
  for (int j = 1; j <= 200; ++j) {
    const double term = std::exp(-2.0 * j * j * lambda * lambda);
    sum += (j % 2 ? 1.0 : -1.0) * term;
    if (term < 1e-300) break;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

inline double penalty(std::size_t n, std::size_t d, std::size_t card, double C, double sigma) {
  const double big = static_cast<double>(card > d ? card : d);
  const double lg = std::log(std::exp(1.0) * n / big);
  return C * sigma * std::sqrt(static_cast<double>(d) * (lg > 0.0 ? lg : 0.0));
}

struct ScanPick {
  std::size_t id = 0;
  double objective = -std::numeric_limits<double>::infinity();
};

/// Exhaustive argmax of z_R - penalty with ties to smaller size, then id.
inline ScanPick scan(const std::vector<double>& z, const Sets& regions, std::size_t d, double C,
                     double sigma, bool penalized) {
  ScanPick best;
  std::size_t best_card = 0;
  bool have = false;
  for (std::size_t id = 0; id < regions.size(); ++id) {
    const auto& r = regions[id];
    if (r.empty()) continue;
    double s = 0.0;
    for (std::size_t i : r) s += z[i];
    const double obj = s / std::sqrt(static_cast<double>(r.size())) -
                       (penalized ? penalty(z.size(), d, r.size(), C, sigma) : 0.0);
    const bool better = !have || obj > best.objective ||
                        (obj == best.objective && r.size() < best_card);
    if (better) {
      best = {id, obj};
      best_card = r.size();
      have = true;
    }
  }
  return best;
}

/// Step-up rule evaluated literally: the largest l with at least l p-values
/// at or below l * alpha / denom. Returns l.
inline std::size_t stepup_count(const std::vector<double>& p, double alpha, bool disjoint) {
  const std::size_t n = p.size();
  double denom = static_cast<double>(n);
  if (!disjoint) {
    double h = 0.0;
    for (std::size_t i = 1; i <= n; ++i) h += 1.0 / static_cast<double>(i);
    denom *= h;
  }
  std::size_t best = 0;
  for (std::size_t l = 1; l <= n; ++l) {
    const double thr = static_cast<double>(l) * alpha / denom;
    std::size_t below = 0;
    for (double v : p) below += v <= thr ? 1 : 0;
    if (below >= l) best = l;
  }
  return best;
}

/// Discrete conformal p-value by counting.
inline double conformal_p(double test, const std::vector<double>& calib) {
  std::size_t le = 0;
  for (double c : calib) le += c <= test ? 1 : 0;
  return static_cast<double>(le + 1) / static_cast<double>(calib.size() + 1);
}

/// Random subset of [0, n) with each point kept with probability `keep`.
inline std::vector<std::size_t> random_subset(std::size_t n, double keep, std::mt19937_64& rng) {
  std::bernoulli_distribution b(keep);
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < n; ++i) {
    if (b(rng)) out.push_back(i);
  }
  return out;
}

}  // namespace oracle
