#include "subpop/sim.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include <toml.hpp>

#include "parallel.hpp"
#include "subpop/data_io.hpp"
#include "subpop/detect.hpp"
#include "subpop/error.hpp"
#include "subpop/identify.hpp"
#include "subpop/normal.hpp"
#include "subpop/refit.hpp"
#include "subpop/rng.hpp"

namespace subpop {

std::vector<double> GaussianInstance::mean_vector() const {
  std::vector<double> m(n, 0.0);
  r_star.members.for_each([&](std::size_t i) { m[i] = mu; });
  return m;
}

GaussianInstance gen_instance(std::size_t n, std::size_t k, double mu, double sigma,
                              const RegionFamily& family, std::uint64_t seed) {
  if (n != family.universe_size()) {
    throw PreconditionError("gen_instance: n differs from the family's universe size");
  }
  if (!(sigma >= 0.0) || !std::isfinite(sigma) || !std::isfinite(mu)) {
    throw PreconditionError("gen_instance: need finite mu and sigma >= 0");
  }
  const std::size_t count = family.count_of_cardinality(k);
  if (count == 0) {
    throw PreconditionError("gen_instance: the family has no region with " + std::to_string(k) +
                            " members");
  }
  GaussianInstance inst;
  inst.n = n;
  inst.k = k;
  inst.mu = mu;
  inst.sigma = sigma;
  inst.seed = seed;
  CounterStream draw(seed, streams::kRegionDraw);
  inst.r_star = family.region(family.nth_of_cardinality(k, draw.next_below(count)));

  const CounterStream noise(seed, streams::kNoise);
  inst.z.resize(n);
  for (std::size_t i = 0; i < n; ++i) inst.z[i] = sigma == 0.0 ? 0.0 : sigma * noise.normal(i);
  inst.r_star.members.for_each([&](std::size_t i) { inst.z[i] += mu; });
  return inst;
}

namespace {

void check_threshold_args(std::size_t n, std::size_t k, std::size_t d, double mu, double sigma,
                          double c) {
  if (d < 1 || d > k || 2 * k > n) {
    throw PreconditionError("threshold_T: need 1 <= d <= k <= n/2");
  }
  if (!(c > 0.0) || !std::isfinite(c)) throw PreconditionError("threshold_T: need c > 0");
  if (!(sigma >= 0.0) || !std::isfinite(sigma) || !std::isfinite(mu)) {
    throw PreconditionError("threshold_T: need finite mu and sigma >= 0");
  }
}

}  // namespace

std::size_t threshold_T(std::size_t n, std::size_t k, std::size_t d, double mu, double sigma,
                        double c) {
  check_threshold_args(n, k, d, mu, sigma, c);
  if (mu == 0.0) return sigma > 0.0 ? k : 0;
  const double scale = c * sigma * sigma / (mu * mu);
  std::size_t best = 0;
  for (std::size_t t = 1; t <= k; ++t) {
    const double rhs = scale * static_cast<double>(std::min(d, t)) *
                       std::log(static_cast<double>(n - k + t) / static_cast<double>(t));
    if (static_cast<double>(t) <= rhs) best = t;
  }
  return best;
}

std::vector<RegimeBound> regime_bounds(std::size_t n, std::size_t k, std::size_t d, double mu,
                                       double sigma, double c) {
  check_threshold_args(n, k, d, mu, sigma, c);
  if (!(sigma > 0.0)) throw PreconditionError("regime_bounds: need sigma > 0");
  const double nd = static_cast<double>(n);
  const double kd = static_cast<double>(k);
  const double dd = static_cast<double>(d);
  const double snr = mu * mu / (sigma * sigma);
  std::vector<RegimeBound> out;

  const double low_edge = c * dd * std::log(nd / kd) / kd;
  const double mid_edge = c * std::log((nd - kd + dd) / dd);
  const double high_edge = c * std::log(nd - kd + 1.0);

  if (snr <= low_edge) out.push_back({1, kd});
  if (snr > low_edge && snr <= mid_edge) {
    const double dsnr = dd / snr;
    const double v = std::floor(0.5 * c * dsnr * std::log((nd - kd) / (c * dsnr)));
    out.push_back({2, std::max(dd, v)});
  }
  if (snr >= mid_edge && snr <= high_edge) {
    out.push_back({3, std::floor((nd - kd) * std::exp(-snr / c))});
  }
  return out;
}

double correlation_distance(const IndexSet& a, const IndexSet& b) {
  if (a.empty() || b.empty()) {
    throw PreconditionError("correlation_distance: regions must be nonempty");
  }
  const double overlap = static_cast<double>(a.intersection_size(b));
  const double norm = std::sqrt(static_cast<double>(a.size()) * static_cast<double>(b.size()));
  return std::sqrt(std::max(0.0, 1.0 - overlap / norm));
}

double correlation_distance(const Region& a, const Region& b) {
  return correlation_distance(a.members, b.members);
}

// ---------------------------------------------------------------------------
// configuration

namespace {

const char* const kEstimators[] = {"scan", "refit", "sure-const", "sure-card", "zero", "detect"};

bool wants(const SweepConfig& cfg, std::string_view name) {
  return std::find(cfg.estimators.begin(), cfg.estimators.end(), name) != cfg.estimators.end();
}

template <class T>
std::vector<T> scalar_or_list(const nlohmann::json& j, const char* key) {
  try {
    if (j.is_array()) return j.get<std::vector<T>>();
    return {j.get<T>()};
  } catch (const nlohmann::json::exception&) {
    throw PreconditionError(std::string("sweep config: '") + key +
                            "' must be a number or a list of numbers");
  }
}

template <class T>
T field(const nlohmann::json& j, const char* key) {
  try {
    return j.get<T>();
  } catch (const nlohmann::json::exception&) {
    throw PreconditionError(std::string("sweep config: '") + key + "' has the wrong type");
  }
}

nlohmann::json toml_to_json(const toml::node& node) {
  if (const auto* t = node.as_table()) {
    nlohmann::json o = nlohmann::json::object();
    for (const auto& [key, value] : *t) o[std::string(key.str())] = toml_to_json(value);
    return o;
  }
  if (const auto* a = node.as_array()) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& value : *a) arr.push_back(toml_to_json(value));
    return arr;
  }
  if (const auto* v = node.as_integer()) return v->get();
  if (const auto* v = node.as_floating_point()) return v->get();
  if (const auto* v = node.as_boolean()) return v->get();
  if (const auto* v = node.as_string()) return v->get();
  throw ParseError("sweep config: unsupported TOML value (dates and times are not accepted)");
}

}  // namespace

void SweepConfig::validate() const {
  const auto require = [](bool ok, const std::string& msg) {
    if (!ok) throw PreconditionError("sweep config: " + msg);
  };
  require(!n.empty() && !k.empty() && !d.empty() && !mu_over_sigma.empty(),
          "n, k, d and mu_over_sigma need at least one value each");
  for (std::size_t v : k) require(v >= 1, "k must be >= 1");
  for (std::size_t v : d) require(v >= 1, "d must be >= 1");
  for (std::size_t nn : n) {
    require(nn >= 1, "n must be >= 1");
    for (std::size_t kk : k) {
      require(kk <= nn, "k = " + std::to_string(kk) + " exceeds n = " + std::to_string(nn));
    }
  }
  for (double m : mu_over_sigma) require(std::isfinite(m), "mu_over_sigma must be finite");
  require(sigma >= 0.0 && std::isfinite(sigma), "sigma must be finite and >= 0");
  require(size_penalty_C >= 0.0 && std::isfinite(size_penalty_C), "C must be >= 0");
  require(alpha > 0.0 && alpha < 1.0, "alpha must lie in (0, 1)");
  require(!estimators.empty(), "estimators must not be empty");
  for (const auto& e : estimators) {
    require(std::find(std::begin(kEstimators), std::end(kEstimators), e) != std::end(kEstimators),
            "unknown estimator '" + e +
                "' (valid: scan, refit, sure-const, sure-card, zero, detect)");
  }
  if (family == SweepFamily::kIntervals) {
    require(interval_min >= 1, "family.min_size must be >= 1");
    require(interval_max == 0 || interval_max >= interval_min,
            "family.max_size must be >= family.min_size");
    for (std::size_t nn : n) {
      require(interval_min <= nn, "family.min_size exceeds n = " + std::to_string(nn));
    }
  }
  if (family == SweepFamily::kPartition) require(block >= 1, "family.block must be >= 1");
  require(threads >= 1, "threads must be >= 1");
}

SweepConfig sweep_config_from_json(const nlohmann::json& root) {
  if (!root.is_object()) throw PreconditionError("sweep config: expected an object");
  SweepConfig cfg;
  for (const auto& [key, value] : root.items()) {
    if (key == "grid") {
      if (!value.is_object()) throw PreconditionError("sweep config: 'grid' must be a table");
      for (const auto& [gk, gv] : value.items()) {
        if (gk == "n") cfg.n = scalar_or_list<std::size_t>(gv, "n");
        else if (gk == "k") cfg.k = scalar_or_list<std::size_t>(gv, "k");
        else if (gk == "d") cfg.d = scalar_or_list<std::size_t>(gv, "d");
        else if (gk == "mu_over_sigma") cfg.mu_over_sigma = scalar_or_list<double>(gv, "mu_over_sigma");
        else throw PreconditionError("sweep config: unknown grid key '" + gk + "'");
      }
    } else if (key == "n") {
      cfg.n = scalar_or_list<std::size_t>(value, "n");
    } else if (key == "k") {
      cfg.k = scalar_or_list<std::size_t>(value, "k");
    } else if (key == "d") {
      cfg.d = scalar_or_list<std::size_t>(value, "d");
    } else if (key == "mu_over_sigma") {
      cfg.mu_over_sigma = scalar_or_list<double>(value, "mu_over_sigma");
    } else if (key == "mu_scaling") {
      const auto s = field<std::string>(value, "mu_scaling");
      if (s == "absolute") cfg.mu_per_sqrt_n = false;
      else if (s == "per_sqrt_n") cfg.mu_per_sqrt_n = true;
      else throw PreconditionError("sweep config: mu_scaling must be 'absolute' or 'per_sqrt_n'");
    } else if (key == "trials") {
      cfg.trials = field<std::size_t>(value, "trials");
    } else if (key == "sigma") {
      cfg.sigma = field<double>(value, "sigma");
    } else if (key == "C" || key == "penalty_C") {
      cfg.size_penalty_C = field<double>(value, "C");
    } else if (key == "alpha") {
      cfg.alpha = field<double>(value, "alpha");
    } else if (key == "max_card") {
      cfg.max_card = field<std::size_t>(value, "max_card");
    } else if (key == "estimators") {
      cfg.estimators = field<std::vector<std::string>>(value, "estimators");
    } else if (key == "threads") {
      cfg.threads = field<std::size_t>(value, "threads");
    } else if (key == "seed") {
      // read by the caller
    } else if (key == "family") {
      if (!value.is_object()) throw PreconditionError("sweep config: 'family' must be a table");
      const auto kind = field<std::string>(value.value("kind", nlohmann::json("intervals")), "kind");
      if (kind == "intervals") cfg.family = SweepFamily::kIntervals;
      else if (kind == "singletons_full") cfg.family = SweepFamily::kSingletonsFull;
      else if (kind == "partition") cfg.family = SweepFamily::kPartition;
      else {
        throw PreconditionError("sweep config: family.kind must be intervals, singletons_full "
                                "or partition");
      }
      for (const auto& [fk, fv] : value.items()) {
        if (fk == "kind") continue;
        if (fk == "min_size") cfg.interval_min = field<std::size_t>(fv, "family.min_size");
        else if (fk == "max_size") cfg.interval_max = field<std::size_t>(fv, "family.max_size");
        else if (fk == "block") cfg.block = field<std::size_t>(fv, "family.block");
        else throw PreconditionError("sweep config: unknown family key '" + fk + "'");
      }
    } else {
      throw PreconditionError("sweep config: unknown key '" + key + "'");
    }
  }
  cfg.validate();
  return cfg;
}

SweepConfig load_sweep_config(const std::string& path) {
  if (!std::filesystem::exists(path)) throw ParseError("cannot open '" + path + "'");
  const std::string ext = std::filesystem::path(path).extension().string();
  if (ext == ".toml") {
    try {
      const toml::table table = toml::parse_file(path);
      return sweep_config_from_json(toml_to_json(table));
    } catch (const toml::parse_error& e) {
      std::ostringstream msg;
      msg << "'" << path << "': " << e.description() << " at line " << e.source().begin.line;
      throw ParseError(msg.str());
    }
  }
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open '" + path + "'");
  try {
    return sweep_config_from_json(nlohmann::json::parse(in));
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError("'" + path + "': " + e.what());
  }
}

nlohmann::json to_json(const SweepConfig& cfg) {
  nlohmann::json j;
  j["grid"] = {{"n", cfg.n}, {"k", cfg.k}, {"d", cfg.d}, {"mu_over_sigma", cfg.mu_over_sigma}};
  j["mu_scaling"] = cfg.mu_per_sqrt_n ? "per_sqrt_n" : "absolute";
  j["trials"] = cfg.trials;
  j["sigma"] = cfg.sigma;
  j["C"] = cfg.size_penalty_C;
  j["alpha"] = cfg.alpha;
  j["max_card"] = cfg.max_card ? nlohmann::json(*cfg.max_card) : nlohmann::json();
  j["estimators"] = cfg.estimators;
  nlohmann::json fam;
  switch (cfg.family) {
    case SweepFamily::kIntervals:
      fam = {{"kind", "intervals"}, {"min_size", cfg.interval_min}, {"max_size", cfg.interval_max}};
      break;
    case SweepFamily::kSingletonsFull:
      fam = {{"kind", "singletons_full"}};
      break;
    case SweepFamily::kPartition:
      fam = {{"kind", "partition"}, {"block", cfg.block}};
      break;
  }
  j["family"] = fam;
  return j;
}

RegionFamily sweep_family(const SweepConfig& cfg, std::size_t n) {
  switch (cfg.family) {
    case SweepFamily::kIntervals: {
      const std::size_t hi = cfg.interval_max == 0 ? n : std::min(cfg.interval_max, n);
      return interval_family(n, cfg.interval_min, hi);
    }
    case SweepFamily::kSingletonsFull:
      return singletons_and_full_family(n);
    case SweepFamily::kPartition: {
      std::vector<Region> regions;
      for (std::size_t lo = 0; lo < n; lo += cfg.block) {
        Region r;
        r.id = regions.size();
        r.members = IndexSet::range(lo, std::min(n, lo + cfg.block));
        r.descriptor = GroupDescriptor{"block" + std::to_string(r.id)};
        regions.push_back(std::move(r));
      }
      return RegionFamily::from_regions(FamilyKind::kPartition, std::move(regions), n, 1, true);
    }
  }
  throw PreconditionError("sweep_family: unknown family");
}

// ---------------------------------------------------------------------------
// sweep

std::uint64_t trial_seed(std::uint64_t seed, std::size_t cell, std::size_t trial) {
  return derive_seed(derive_seed(seed, cell), trial);
}

Summary summarize(std::vector<double> values) {
  if (values.empty()) throw PreconditionError("summarize: no values");
  std::sort(values.begin(), values.end());
  const auto quantile = [&](double p) {
    const double h = p * static_cast<double>(values.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(h));
    if (lo + 1 >= values.size()) return values.back();
    return values[lo] + (h - static_cast<double>(lo)) * (values[lo + 1] - values[lo]);
  };
  return {values.size(), quantile(0.5), quantile(0.25), quantile(0.75)};
}

namespace {

struct Cell {
  std::size_t n, k, d;
  double mu_over_sigma;
  double mu;
};

double squared_error(std::span<const double> estimate, std::span<const double> truth) {
  double s = 0.0;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    const double r = estimate[i] - truth[i];
    s += r * r;
  }
  return s;
}

void run_trial(const SweepConfig& cfg, const Cell& cell, const RegionFamily& family,
               SweepRow& row) {
  const auto started = std::chrono::steady_clock::now();
  const auto attempt = [&](const char* name, auto&& fn) {
    try {
      fn();
    } catch (const std::exception& e) {
      if (!row.error.empty()) row.error += "; ";
      row.error += std::string(name) + ": " + e.what();
    }
  };

  std::optional<GaussianInstance> inst;
  attempt("instance", [&] {
    inst = gen_instance(cell.n, cell.k, cell.mu, cfg.sigma, family, row.seed);
  });
  if (inst) {
    const std::vector<double> truth = inst->mean_vector();
    ScanConfig sc;
    sc.size_penalty_C = cfg.size_penalty_C;
    sc.sigma = cfg.sigma > 0.0 ? cfg.sigma : 1.0;
    sc.vc_dim_d = cell.d;
    sc.max_card = cfg.max_card;

    std::optional<ScanResult> scanned;
    if (wants(cfg, "refit")) {
      attempt("refit", [&] {
        const RefitEstimate est = refit_two_step(inst->z, family, sc);
        row.refit_l2_error = squared_error(est.vector_form(), truth);
        scanned = est.scan;
      });
    }
    if (wants(cfg, "scan")) {
      attempt("scan", [&] {
        if (!scanned) scanned = scan(inst->z, family, sc);
        row.recovery_error = recovery_error(scanned->region.members, inst->r_star.members);
      });
    }
    if (wants(cfg, "sure-const")) {
      attempt("sure-const", [&] {
        const SureFit fit = sure_mle(inst->z, family, cfg.sigma, DfModel::kConstantOne);
        row.sure_const_l2_error = squared_error(fit.estimate, truth);
      });
    }
    if (wants(cfg, "sure-card")) {
      attempt("sure-card", [&] {
        const SureFit fit = sure_mle(inst->z, family, cfg.sigma, DfModel::kCardinality);
        row.sure_card_l2_error = squared_error(fit.estimate, truth);
      });
    }
    if (wants(cfg, "zero")) {
      row.zero_l2_error = static_cast<double>(cell.k) * cell.mu * cell.mu;
    }
    if (wants(cfg, "detect")) {
      attempt("detect", [&] {
        if (!(cfg.sigma > 0.0)) throw PreconditionError("detection needs sigma > 0");
        // One-sided p-values of the Z-scores; 1 - p_j feeds the aggregation.
        std::vector<double> upper(inst->z.size());
        for (std::size_t i = 0; i < upper.size(); ++i) {
          upper[i] = normal_cdf(-inst->z[i] / cfg.sigma);
        }
        std::vector<RegionPValue> pvals;
        pvals.reserve(family.size());
        for_each_region_sum(family, upper, [&](std::size_t id, std::size_t card, double s) {
          if (card == 0) return;
          pvals.push_back({id, std::min(1.0, 2.0 * s / static_cast<double>(card))});
        });
        const DetectionResult res = bhy_detect(pvals, cfg.alpha, family.disjoint());
        std::vector<std::size_t> true_hits;
        for (std::size_t id : res.rejected) {
          if (family.members(id).intersection_size(inst->r_star.members) > 0) {
            true_hits.push_back(id);
          }
        }
        std::sort(true_hits.begin(), true_hits.end());
        row.fdr = estimate_fdr(res.rejected, true_hits);
      });
    }
  }
  row.runtime_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() -
                                                             started)
                       .count();
}

std::optional<std::size_t> safe_threshold(const Cell& c, double sigma, double constant) {
  if (c.d < 1 || c.d > c.k || 2 * c.k > c.n) return std::nullopt;
  return threshold_T(c.n, c.k, c.d, c.mu, sigma, constant);
}

std::optional<Summary> summarize_metric(const std::vector<SweepRow>& rows, std::size_t begin,
                                        std::size_t end,
                                        std::optional<double> SweepRow::*metric) {
  std::vector<double> values;
  for (std::size_t i = begin; i < end; ++i) {
    if (rows[i].*metric) values.push_back(*(rows[i].*metric));
  }
  if (values.empty()) return std::nullopt;
  return summarize(std::move(values));
}

}  // namespace

SweepReport run_sweep(const SweepConfig& cfg, std::uint64_t seed) {
  cfg.validate();
  SweepReport report;
  report.config = cfg;
  report.seed = seed;

  std::vector<Cell> cells;
  for (std::size_t n : cfg.n) {
    for (std::size_t k : cfg.k) {
      for (std::size_t d : cfg.d) {
        for (double m : cfg.mu_over_sigma) {
          double mu = cfg.sigma > 0.0 ? m * cfg.sigma : m;
          if (cfg.mu_per_sqrt_n) mu /= std::sqrt(static_cast<double>(n));
          cells.push_back({n, k, d, m, mu});
        }
      }
    }
  }

  std::map<std::size_t, RegionFamily> families;
  for (std::size_t n : cfg.n) {
    if (!families.count(n)) families.emplace(n, sweep_family(cfg, n));
  }

  const std::size_t total = cells.size() * cfg.trials;
  report.rows.resize(total);
  for (std::size_t idx = 0; idx < total; ++idx) {
    const Cell& c = cells[idx / cfg.trials];
    SweepRow& row = report.rows[idx];
    row.n = c.n;
    row.k = c.k;
    row.d = c.d;
    row.mu_over_sigma = c.mu_over_sigma;
    row.trial = idx % cfg.trials;
    row.seed = trial_seed(seed, idx / cfg.trials, row.trial);
  }
  detail::run_parts(std::min(cfg.threads, std::max<std::size_t>(total, 1)),
                    [&](std::size_t part, std::size_t parts) {
                      for (std::size_t idx = part; idx < total; idx += parts) {
                        const Cell& c = cells[idx / cfg.trials];
                        run_trial(cfg, c, families.at(c.n), report.rows[idx]);
                      }
                    });

  if (cfg.trials == 0) return report;
  for (std::size_t ci = 0; ci < cells.size(); ++ci) {
    const Cell& c = cells[ci];
    const std::size_t begin = ci * cfg.trials;
    const std::size_t end = begin + cfg.trials;
    CellAggregate agg;
    agg.n = c.n;
    agg.k = c.k;
    agg.d = c.d;
    agg.mu_over_sigma = c.mu_over_sigma;
    agg.mu = c.mu;
    for (std::size_t i = begin; i < end; ++i) agg.failures += !report.rows[i].error.empty();
    agg.recovery_error = summarize_metric(report.rows, begin, end, &SweepRow::recovery_error);
    agg.refit_l2_error = summarize_metric(report.rows, begin, end, &SweepRow::refit_l2_error);
    agg.sure_const_l2_error =
        summarize_metric(report.rows, begin, end, &SweepRow::sure_const_l2_error);
    agg.sure_card_l2_error =
        summarize_metric(report.rows, begin, end, &SweepRow::sure_card_l2_error);
    agg.zero_l2_error = summarize_metric(report.rows, begin, end, &SweepRow::zero_l2_error);
    agg.fdr = summarize_metric(report.rows, begin, end, &SweepRow::fdr);
    agg.T_c05 = safe_threshold(c, cfg.sigma, 0.5);
    agg.T_c1 = safe_threshold(c, cfg.sigma, 1.0);
    agg.T_c2 = safe_threshold(c, cfg.sigma, 2.0);
    report.cells.push_back(std::move(agg));
  }
  return report;
}

namespace {

std::string csv_cell(const std::optional<double>& v) { return v ? format_number(*v) : ""; }

std::string csv_text(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + '"';
}

nlohmann::json summary_json(const std::optional<Summary>& s) {
  if (!s) return nullptr;
  return {{"count", s->count}, {"median", s->median}, {"q1", s->q1}, {"q3", s->q3},
          {"iqr", s->iqr()}};
}

nlohmann::json optional_size(const std::optional<std::size_t>& v) {
  return v ? nlohmann::json(*v) : nlohmann::json();
}

}  // namespace

std::string sweep_csv(const SweepReport& report) {
  std::string out =
      "n,k,d,mu_over_sigma,trial,seed,recovery_error,refit_l2_error,sure_const_l2_error,"
      "sure_card_l2_error,zero_l2_error,fdr,error\n";
  for (const SweepRow& r : report.rows) {
    out += std::to_string(r.n) + ',' + std::to_string(r.k) + ',' + std::to_string(r.d) + ',' +
           format_number(r.mu_over_sigma) + ',' + std::to_string(r.trial) + ',' +
           std::to_string(r.seed) + ',' + csv_cell(r.recovery_error) + ',' +
           csv_cell(r.refit_l2_error) + ',' + csv_cell(r.sure_const_l2_error) + ',' +
           csv_cell(r.sure_card_l2_error) + ',' + csv_cell(r.zero_l2_error) + ',' +
           csv_cell(r.fdr) + ',' + csv_text(r.error) + '\n';
  }
  return out;
}

nlohmann::json sweep_summary_json(const SweepReport& report) {
  nlohmann::json cells = nlohmann::json::array();
  for (const CellAggregate& c : report.cells) {
    cells.push_back({
        {"n", c.n},
        {"k", c.k},
        {"d", c.d},
        {"mu_over_sigma", c.mu_over_sigma},
        {"mu", c.mu},
        {"failures", c.failures},
        {"recovery_error", summary_json(c.recovery_error)},
        {"refit_l2_error", summary_json(c.refit_l2_error)},
        {"sure_const_l2_error", summary_json(c.sure_const_l2_error)},
        {"sure_card_l2_error", summary_json(c.sure_card_l2_error)},
        {"zero_l2_error", summary_json(c.zero_l2_error)},
        {"fdr", summary_json(c.fdr)},
        {"threshold_T", {{"c=0.5", optional_size(c.T_c05)},
                         {"c=1", optional_size(c.T_c1)},
                         {"c=2", optional_size(c.T_c2)}}},
    });
  }
  return {{"seed", report.seed},
          {"config", to_json(report.config)},
          {"rows", report.rows.size()},
          {"cells", cells}};
}

}  // namespace subpop
