#include "subpop/identify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "parallel.hpp"
#include "subpop/error.hpp"

namespace subpop {

namespace {

struct Candidate {
  std::size_t id = 0;
  std::size_t card = 0;
  double sum = 0.0;
  double z_R = 0.0;
  double objective = -std::numeric_limits<double>::infinity();
  bool valid = false;
};

/// Strict "a is preferred over b": larger objective, then smaller
/// cardinality, then smaller id.
bool preferred(const Candidate& a, const Candidate& b) {
  if (!b.valid) return a.valid;
  if (!a.valid) return false;
  if (a.objective != b.objective) return a.objective > b.objective;
  if (a.card != b.card) return a.card < b.card;
  return a.id < b.id;
}

struct TopTwo {
  Candidate best;
  Candidate second;
  std::size_t count = 0;

  void offer(const Candidate& c) {
    ++count;
    if (preferred(c, best)) {
      second = best;
      best = c;
    } else if (preferred(c, second)) {
      second = c;
    }
  }
};

struct ScanTables {
  std::size_t n = 0;
  std::size_t d = 1;
  std::size_t cap = 0;
  std::vector<double> root;
  std::vector<double> penalty;
};

ScanTables prepare(std::span<const double> z, const RegionFamily& family, const ScanConfig& cfg) {
  if (!(cfg.sigma > 0.0) || !std::isfinite(cfg.sigma)) {
    throw PreconditionError("scan: sigma must be positive and finite");
  }
  if (cfg.penalized && !(cfg.size_penalty_C >= 0.0)) {
    throw PreconditionError("scan: size penalty C must be >= 0");
  }
  if (z.size() != family.universe_size()) {
    throw PreconditionError("scan: " + std::to_string(z.size()) + " scores for a family over " +
                            std::to_string(family.universe_size()) + " points");
  }
  for (double v : z) {
    if (std::isnan(v) || v == -std::numeric_limits<double>::infinity()) {
      throw NumericError("scan: Z-scores must not be NaN or -inf");
    }
  }
  ScanTables t;
  t.n = z.size();
  t.d = cfg.vc_dim_d ? cfg.vc_dim_d : family.vc_dim();
  t.cap = cfg.max_card.value_or(t.n);
  t.root.resize(t.n + 1);
  t.penalty.resize(t.n + 1);
  for (std::size_t c = 1; c <= t.n; ++c) {
    t.root[c] = std::sqrt(static_cast<double>(c));
    t.penalty[c] =
        cfg.penalized ? scan_penalty(t.n, t.d, c, cfg.size_penalty_C, cfg.sigma) : 0.0;
  }
  return t;
}

Candidate evaluate(const ScanTables& t, std::size_t id, std::size_t card, double sum) {
  Candidate c;
  c.id = id;
  c.card = card;
  c.sum = sum;
  c.z_R = sum / t.root[card];
  c.objective = c.z_R - t.penalty[card];
  c.valid = true;
  return c;
}

}  // namespace

double region_zscore(std::span<const double> z, const IndexSet& members) {
  if (members.empty()) throw PreconditionError("region_zscore: empty region");
  double s = 0.0;
  members.for_each([&](std::size_t i) { s += z[i]; });
  return s / std::sqrt(static_cast<double>(members.size()));
}

double scan_penalty(std::size_t n, std::size_t d, std::size_t card, double C, double sigma) {
  if (card < 1 || card > n) throw PreconditionError("scan_penalty: need 1 <= card <= n");
  if (d < 1) throw PreconditionError("scan_penalty: need d >= 1");
  const double scale = static_cast<double>(std::max(card, d));
  // d > e n makes the log negative; every region then shares the same
  // penalty, so clamping at zero leaves the argmax alone.
  const double log_term = std::log(std::numbers::e * static_cast<double>(n) / scale);
  return C * sigma * std::sqrt(static_cast<double>(d) * std::max(0.0, log_term));
}

ScanResult scan(std::span<const double> z, const RegionFamily& family, const ScanConfig& cfg) {
  const ScanTables t = prepare(z, family, cfg);
  const std::size_t parts = std::max<std::size_t>(cfg.threads, 1);
  std::vector<TopTwo> partial(parts);
  detail::run_parts(parts, [&](std::size_t part, std::size_t nparts) {
    TopTwo& top = partial[part];
    for_each_region_sum(family, z, part, nparts, [&](std::size_t id, std::size_t card, double s) {
      if (card == 0 || card > t.cap) return;
      top.offer(evaluate(t, id, card, s));
    });
  });

  TopTwo merged;
  for (const TopTwo& p : partial) {
    merged.count += p.count;
    for (const Candidate* c : {&p.best, &p.second}) {
      if (!c->valid) continue;
      if (preferred(*c, merged.best)) {
        merged.second = merged.best;
        merged.best = *c;
      } else if (preferred(*c, merged.second)) {
        merged.second = *c;
      }
    }
  }
  if (!merged.best.valid) {
    throw PreconditionError("scan: no region with at most " + std::to_string(t.cap) +
                            " members (max_card cap) in a family of " +
                            std::to_string(family.size()));
  }

  ScanResult out;
  out.region = family.region(merged.best.id);
  out.z_R = merged.best.z_R;
  out.penalty = t.penalty[merged.best.card];
  out.objective = merged.best.objective;
  out.candidates = merged.count;
  out.infinite = std::isinf(merged.best.objective);
  if (merged.second.valid) {
    const double gap = merged.best.objective - merged.second.objective;
    out.runner_up_gap = std::isnan(gap) ? 0.0 : gap;
  }
  const double card = static_cast<double>(merged.best.card);
  out.min_detectable_mean =
      cfg.sigma * std::sqrt(static_cast<double>(t.d) *
                            std::log(static_cast<double>(t.n) / card) / card);
  if (out.infinite) {
    out.diagnostics.push_back(
        "winning region contains a test point ranked above every calibration score "
        "(p-value 1, infinite Z-score); increase the calibration set size");
  }
  return out;
}

std::vector<ScanRow> scan_table(std::span<const double> z, const RegionFamily& family,
                                const ScanConfig& cfg) {
  const ScanTables t = prepare(z, family, cfg);
  std::vector<ScanRow> rows;
  for_each_region_sum(family, z, [&](std::size_t id, std::size_t card, double s) {
    if (card == 0 || card > t.cap) return;
    const Candidate c = evaluate(t, id, card, s);
    rows.push_back({id, card, c.z_R, t.penalty[card], c.objective});
  });
  std::sort(rows.begin(), rows.end(),
            [](const ScanRow& a, const ScanRow& b) { return a.region_id < b.region_id; });
  return rows;
}

double recovery_error(const IndexSet& r_hat, const IndexSet& r_star) {
  if (r_star.empty()) throw PreconditionError("recovery_error: R_star must be nonempty");
  return static_cast<double>(r_hat.hamming_distance(r_star)) /
         static_cast<double>(r_star.size());
}

double mad_sigma(std::span<const double> z) {
  if (z.empty()) throw PreconditionError("mad_sigma: no scores");
  std::vector<double> a;
  a.reserve(z.size());
  for (double v : z) a.push_back(std::fabs(v));
  std::sort(a.begin(), a.end());
  const std::size_t m = a.size() / 2;
  const double med = a.size() % 2 ? a[m] : 0.5 * (a[m - 1] + a[m]);
  return 1.4826 * med;
}

}  // namespace subpop
