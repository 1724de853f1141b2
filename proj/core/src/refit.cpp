#include "subpop/refit.hpp"

#include <algorithm>
#include <cmath>

#include "subpop/error.hpp"

namespace subpop {

std::vector<double> RefitEstimate::vector_form() const {
  std::vector<double> out(n, 0.0);
  support.members.for_each([&](std::size_t i) { out[i] = level; });
  return out;
}

RefitEstimate refit_two_step(std::span<const double> y, const RegionFamily& family,
                             const ScanConfig& cfg) {
  RefitEstimate est;
  est.scan = scan(y, family, cfg);
  est.support = est.scan.region;
  est.n = y.size();
  double s = 0.0;
  est.support.members.for_each([&](std::size_t i) { s += y[i]; });
  est.level = s / static_cast<double>(est.support.members.size());
  return est;
}

SureFit sure_mle(std::span<const double> y, const RegionFamily& family, double sigma,
                 DfModel df_model) {
  if (!(sigma > 0.0) || !std::isfinite(sigma)) throw PreconditionError("sure_mle: sigma must be > 0");
  if (y.size() != family.universe_size()) {
    throw PreconditionError("sure_mle: data length differs from the family's universe");
  }
  double total = 0.0;
  for (double v : y) {
    if (!std::isfinite(v)) throw NumericError("sure_mle: non-finite observation");
    total += v * v;
  }
  const double two_var = 2.0 * sigma * sigma;

  struct Best {
    std::size_t id = kEmptyRegionId;
    std::size_t df = 0;
    double criterion = 0.0;
  } best{kEmptyRegionId, 0, total};

  const auto offer = [&](std::size_t id, std::size_t df, double criterion) {
    if (criterion < best.criterion ||
        (criterion == best.criterion && (df < best.df || (df == best.df && id < best.id)))) {
      best = {id, df, criterion};
    }
  };

  if (df_model == DfModel::kConstantOne) {
    for_each_region_sum(family, y, [&](std::size_t id, std::size_t card, double s) {
      if (card == 0) {
        offer(id, 0, total);
        return;
      }
      offer(id, 1, total - s * s / static_cast<double>(card) + two_var);
    });
  } else {
    std::vector<double> sq(y.size());
    for (std::size_t i = 0; i < y.size(); ++i) sq[i] = y[i] * y[i];
    for_each_region_sum(family, sq, [&](std::size_t id, std::size_t card, double s2) {
      offer(id, card, total - s2 + two_var * static_cast<double>(card));
    });
  }

  SureFit fit;
  fit.selection.df_model = df_model;
  fit.selection.df = best.df;
  fit.estimate.assign(y.size(), 0.0);
  if (best.id == kEmptyRegionId) {
    fit.selection.region.id = kEmptyRegionId;
    fit.selection.region.members = IndexSet::range(0, 0);
  } else {
    fit.selection.region = family.region(best.id);
  }
  const IndexSet& members = fit.selection.region.members;
  if (!members.empty()) {
    if (df_model == DfModel::kConstantOne) {
      double s = 0.0;
      members.for_each([&](std::size_t i) { s += y[i]; });
      const double mean = s / static_cast<double>(members.size());
      members.for_each([&](std::size_t i) { fit.estimate[i] = mean; });
    } else {
      members.for_each([&](std::size_t i) { fit.estimate[i] = y[i]; });
    }
  }
  double rss = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    const double r = y[i] - fit.estimate[i];
    rss += r * r;
  }
  fit.selection.criterion_value = rss + two_var * static_cast<double>(best.df);
  return fit;
}

Eigen::VectorXd project_to_simplex(const Eigen::VectorXd& v) {
  const Eigen::Index s = v.size();
  if (s == 0) throw PreconditionError("project_to_simplex: empty vector");
  std::vector<double> u(v.data(), v.data() + s);
  std::sort(u.begin(), u.end(), std::greater<>());
  double cumulative = 0.0;
  double theta = 0.0;
  for (Eigen::Index k = 0; k < s; ++k) {
    cumulative += u[static_cast<std::size_t>(k)];
    const double t = (cumulative - 1.0) / static_cast<double>(k + 1);
    if (u[static_cast<std::size_t>(k)] - t > 0.0) theta = t;
  }
  return (v.array() - theta).max(0.0).matrix();
}

namespace {

struct Quadratic {
  Eigen::MatrixXd gram;  // U^T U
  Eigen::VectorXd cross;  // U^T y
  double yy = 0.0;

  double value(const Eigen::VectorXd& w) const {
    return std::max(0.0, w.dot(gram * w) - 2.0 * cross.dot(w) + yy);
  }
  Eigen::VectorXd gradient(const Eigen::VectorXd& w) const { return 2.0 * (gram * w - cross); }
};

double kkt_residual(const Quadratic& q, const Eigen::VectorXd& w) {
  return (w - project_to_simplex(w - q.gradient(w))).cwiseAbs().maxCoeff();
}

/// Solves the equality-constrained problem on the support of `w`; returns
/// false when the system is singular or the solution leaves the simplex.
bool polish(const Quadratic& q, Eigen::VectorXd& w) {
  std::vector<Eigen::Index> support;
  for (Eigen::Index i = 0; i < w.size(); ++i) {
    if (w[i] > 1e-12) support.push_back(i);
  }
  const auto k = static_cast<Eigen::Index>(support.size());
  Eigen::MatrixXd kkt = Eigen::MatrixXd::Zero(k + 1, k + 1);
  Eigen::VectorXd rhs(k + 1);
  for (Eigen::Index a = 0; a < k; ++a) {
    for (Eigen::Index b = 0; b < k; ++b) kkt(a, b) = 2.0 * q.gram(support[a], support[b]);
    kkt(a, k) = 1.0;
    kkt(k, a) = 1.0;
    rhs[a] = 2.0 * q.cross[support[a]];
  }
  rhs[k] = 1.0;
  const Eigen::FullPivLU<Eigen::MatrixXd> lu(kkt);
  if (!lu.isInvertible()) return false;
  const Eigen::VectorXd sol = lu.solve(rhs);
  Eigen::VectorXd candidate = Eigen::VectorXd::Zero(w.size());
  for (Eigen::Index a = 0; a < k; ++a) {
    if (sol[a] < -1e-12) return false;
    candidate[support[a]] = std::max(0.0, sol[a]);
  }
  candidate /= candidate.sum();
  if (q.value(candidate) > q.value(w) + 1e-12 * (1.0 + q.value(w))) return false;
  w = candidate;
  return true;
}

}  // namespace

double simplex_kkt_residual(const Eigen::MatrixXd& U, const Eigen::VectorXd& y,
                            const Eigen::VectorXd& w) {
  Quadratic q{U.transpose() * U, U.transpose() * y, y.squaredNorm()};
  return kkt_residual(q, w);
}

StackWeights stack_weights(const Eigen::MatrixXd& U, std::span<const double> y) {
  const Eigen::Index n = U.rows();
  const Eigen::Index s = U.cols();
  if (n < 1 || s < 1) throw PreconditionError("stack_weights: need n_val >= 1 and s >= 1");
  if (static_cast<Eigen::Index>(y.size()) != n) {
    throw PreconditionError("stack_weights: y length differs from the number of rows");
  }
  if (!U.allFinite()) throw NumericError("stack_weights: non-finite prediction");
  const Eigen::Map<const Eigen::VectorXd> target(y.data(), n);
  if (!target.allFinite()) throw NumericError("stack_weights: non-finite target");

  // Exactly repeated columns collapse onto their first occurrence.
  std::vector<Eigen::Index> unique;
  std::vector<Eigen::Index> owner(static_cast<std::size_t>(s));
  for (Eigen::Index j = 0; j < s; ++j) {
    owner[static_cast<std::size_t>(j)] = static_cast<Eigen::Index>(unique.size());
    bool repeated = false;
    for (std::size_t u = 0; u < unique.size(); ++u) {
      if (U.col(unique[u]) == U.col(j)) {
        owner[static_cast<std::size_t>(j)] = static_cast<Eigen::Index>(u);
        repeated = true;
        break;
      }
    }
    if (!repeated) unique.push_back(j);
  }
  Eigen::MatrixXd reduced(n, static_cast<Eigen::Index>(unique.size()));
  for (std::size_t u = 0; u < unique.size(); ++u) {
    reduced.col(static_cast<Eigen::Index>(u)) = U.col(unique[u]);
  }

  const Quadratic q{reduced.transpose() * reduced, reduced.transpose() * target,
                    target.squaredNorm()};
  const Eigen::Index r = reduced.cols();
  Eigen::VectorXd w = Eigen::VectorXd::Zero(r);
  w[0] = 1.0;
  std::size_t iterations = 0;

  const double lipschitz =
      r > 1 ? 2.0 * Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(q.gram, Eigen::EigenvaluesOnly)
                        .eigenvalues()
                        .maxCoeff()
            : 0.0;
  constexpr std::size_t kMaxIterations = 10000;
  constexpr double kDecreaseTol = 1e-10;
  constexpr double kKktTol = 1e-8;

  if (r > 1 && lipschitz > 0.0) {
    const double step = 1.0 / lipschitz;
    while (iterations < kMaxIterations) {
      Eigen::VectorXd x = w;
      Eigen::VectorXd momentum = w;
      double t = 1.0;
      double f = q.value(w);
      while (iterations < kMaxIterations) {
        ++iterations;
        const Eigen::VectorXd next = project_to_simplex(momentum - step * q.gradient(momentum));
        const double f_next = q.value(next);
        if (f_next > f) {
          // Non-monotone: restart momentum from the last accepted point.
          momentum = x;
          t = 1.0;
          continue;
        }
        const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
        momentum = next + ((t - 1.0) / t_next) * (next - x);
        x = next;
        t = t_next;
        const double decrease = f - f_next;
        f = f_next;
        if (decrease <= kDecreaseTol * (1.0 + f)) break;
      }
      w = x;
      polish(q, w);
      if (kkt_residual(q, w) <= kKktTol) break;
    }
  }

  StackWeights out;
  out.w = Eigen::VectorXd::Zero(s);
  for (Eigen::Index u = 0; u < r; ++u) out.w[unique[static_cast<std::size_t>(u)]] = w[u];
  out.iterations = iterations;
  out.objective = (target - U * out.w).squaredNorm();
  out.kkt_residual = simplex_kkt_residual(U, target, out.w);
  return out;
}

std::vector<double> average_predictions(const Eigen::MatrixXd& preds) {
  if (preds.cols() < 1) throw PreconditionError("average_predictions: need at least one model");
  const Eigen::VectorXd mean = preds.rowwise().mean();
  return {mean.data(), mean.data() + mean.size()};
}

RelativeDeviation median_relative_abs_dev(std::span<const double> pred,
                                          std::span<const double> y_next,
                                          std::span<const double> y_prev) {
  if (pred.size() != y_next.size() || pred.size() != y_prev.size()) {
    throw PreconditionError("median_relative_abs_dev: inputs differ in length");
  }
  std::vector<double> ratios;
  RelativeDeviation out;
  for (std::size_t l = 0; l < pred.size(); ++l) {
    const double denom = std::fabs(y_next[l] - y_prev[l]);
    if (denom == 0.0) {
      ++out.dropped;
      continue;
    }
    ratios.push_back(std::fabs(y_next[l] - pred[l]) / denom);
  }
  if (ratios.empty()) {
    throw NumericError("median_relative_abs_dev: every pair has y_next == y_prev");
  }
  std::sort(ratios.begin(), ratios.end());
  const std::size_t m = ratios.size() / 2;
  out.value = ratios.size() % 2 ? ratios[m] : 0.5 * (ratios[m - 1] + ratios[m]);
  out.used = ratios.size();
  return out;
}

std::size_t nearest_region(std::span<const double> x, std::span<const Region> fitted,
                           std::span<const std::vector<double>> points) {
  std::size_t best_id = kEmptyRegionId;
  double best = std::numeric_limits<double>::infinity();
  for (const Region& r : fitted) {
    double closest = std::numeric_limits<double>::infinity();
    r.members.for_each([&](std::size_t j) {
      const auto& p = points[j];
      if (p.size() != x.size()) throw PreconditionError("nearest_region: dimension mismatch");
      double d = 0.0;
      for (std::size_t k = 0; k < x.size(); ++k) d += (p[k] - x[k]) * (p[k] - x[k]);
      closest = std::min(closest, d);
    });
    if (r.members.empty()) continue;
    if (closest < best || (closest == best && r.id < best_id)) {
      best = closest;
      best_id = r.id;
    }
  }
  if (best_id == kEmptyRegionId) throw PreconditionError("nearest_region: no nonempty region");
  return best_id;
}

}  // namespace subpop
