#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>

#include <gtest/gtest.h>

#include "subpop/error.hpp"
#include "subpop/identify.hpp"
#include "subpop/sim.hpp"
#include "support/oracles.hpp"

namespace {

using namespace subpop;

TEST(GenInstance, NoiselessIsTheMeanVector) {
  const RegionFamily f = interval_family(50, 5, 5);
  const GaussianInstance g = gen_instance(50, 5, 2.5, 0.0, f, 3);
  EXPECT_EQ(g.z, g.mean_vector());
  EXPECT_EQ(g.r_star.members.size(), 5u);
  double total = 0.0;
  for (double v : g.z) total += v;
  EXPECT_EQ(total, 12.5);
}

TEST(GenInstance, DeterministicAndSeedSensitive) {
  const RegionFamily f = interval_family(80, 1, 80);
  const GaussianInstance a = gen_instance(80, 10, 1.0, 1.0, f, 42);
  const GaussianInstance b = gen_instance(80, 10, 1.0, 1.0, f, 42);
  EXPECT_EQ(a.z, b.z);
  EXPECT_EQ(a.r_star.id, b.r_star.id);
  EXPECT_NE(a.z, gen_instance(80, 10, 1.0, 1.0, f, 43).z);
  const GaussianInstance null = gen_instance(80, 10, 0.0, 1.0, f, 42);
  for (double v : null.mean_vector()) EXPECT_EQ(v, 0.0);
}

TEST(GenInstance, NoRegionOfSizeKIsAnError) {
  EXPECT_THROW(gen_instance(10, 3, 1.0, 1.0, interval_family(10, 4, 10), 1), PreconditionError);
}

TEST(GenInstance, SampleMeansSitNearTheirTargets) {
  const std::size_t n = 400, k = 40;
  const double mu = 1.5, sigma = 2.0;
  const RegionFamily f = interval_family(n, 1, n);
  int ok = 0;
  for (std::uint64_t seed = 0; seed < 500; ++seed) {
    const GaussianInstance g = gen_instance(n, k, mu, sigma, f, seed);
    double on = 0.0, off = 0.0;
    for (std::size_t i = 0; i < n; ++i) (g.r_star.members.contains(i) ? on : off) += g.z[i];
    on /= k;
    off /= static_cast<double>(n - k);
    if (std::abs(off) <= 4 * sigma / std::sqrt(double(n - k)) &&
        std::abs(on - mu) <= 4 * sigma / std::sqrt(double(k)))
      ++ok;
  }
  EXPECT_GE(ok, 495);
}

std::size_t brute_T(std::size_t n, std::size_t k, std::size_t d, double mu, double sigma,
                    double c) {
  std::size_t best = 0;
  for (std::size_t t = 1; t <= k; ++t) {
    const double m = static_cast<double>(std::min(d, t));
    if (t * mu * mu <= c * sigma * sigma * m * std::log(double(n - k + t) / double(t))) best = t;
  }
  return best;
}

TEST(ThresholdT, Examples) {
  EXPECT_EQ(threshold_T(100, 10, 2, 1e-6, 1.0, 1.0), 10u);
  EXPECT_EQ(threshold_T(100, 10, 2, 0.0, 1.0, 1.0), 10u);
  EXPECT_EQ(threshold_T(100, 50, 1, 50.0, 1.0, 1.0), 0u);
  EXPECT_EQ(threshold_T(100, 10, 2, 1.0, 1.0, 1.0), 5u);
  EXPECT_EQ(brute_T(100, 10, 2, 1.0, 1.0, 1.0), 5u);
  // The same tuple sits in the moderate regime, whose closed form gives 3.
  const auto bounds = regime_bounds(100, 10, 2, 1.0, 1.0, 1.0);
  ASSERT_EQ(bounds.size(), 1u);
  EXPECT_EQ(bounds[0].regime, 2);
  EXPECT_EQ(bounds[0].bound, 3.0);
  EXPECT_THROW(threshold_T(100, 60, 2, 1.0, 1.0, 1.0), PreconditionError);
  EXPECT_THROW(threshold_T(100, 10, 11, 1.0, 1.0, 1.0), PreconditionError);
  EXPECT_THROW(threshold_T(100, 10, 2, 1.0, 1.0, 0.0), PreconditionError);
}

TEST(ThresholdT, MatchesDirectScanAndIsMonotone) {
  std::mt19937_64 rng(5);
  std::uniform_int_distribution<std::size_t> nn(4, 3000);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int t = 0; t < 500; ++t) {
    const std::size_t n = nn(rng);
    const std::size_t k = 1 + static_cast<std::size_t>(u(rng) * (n / 2 - 1));
    const std::size_t d = 1 + static_cast<std::size_t>(u(rng) * (k - 1));
    const double mu = std::exp(4 * u(rng) - 3), c = 0.5 + u(rng);
    const std::size_t T = threshold_T(n, k, d, mu, 1.0, c);
    EXPECT_EQ(T, brute_T(n, k, d, mu, 1.0, c));
    EXPECT_LE(threshold_T(n, k, d, mu * 1.5, 1.0, c), T);
  }
}

TEST(CorrelationDistance, Examples) {
  const IndexSet a = IndexSet::range(0, 4);
  EXPECT_EQ(correlation_distance(a, a), 0.0);
  EXPECT_EQ(correlation_distance(a, IndexSet::range(4, 9)), 1.0);
  EXPECT_NEAR(correlation_distance(IndexSet::from_sorted({0, 1}), IndexSet::from_sorted({1, 2})),
              0.7071067811865476, 1e-15);
  EXPECT_THROW(correlation_distance(a, IndexSet()), PreconditionError);
}

// With x = 1 / (1 - d^2) and d^2 <= 1/2, Ham / min(|A|, |B|) <= d^2 (x^2 + x).
// The factor x^2 + x stays below 3 only while d^2 <= 0.2324, so the constant 3
// lower bound is checked on that range and the sharp form everywhere.
TEST(CorrelationDistance, HammingSandwich) {
  std::mt19937_64 rng(77);
  std::uniform_int_distribution<std::size_t> nn(1, 60);
  std::uniform_real_distribution<double> keep(0.05, 0.95);
  int checked = 0;
  while (checked < 10000) {
    const std::size_t n = nn(rng);
    auto a = oracle::random_subset(n, keep(rng), rng);
    if (a.empty()) continue;
    // Derive b from a by small edits so most pairs land in d^2 <= 1/2.
    auto b = a;
    std::uniform_int_distribution<std::size_t> pick(0, n - 1);
    const int edits = static_cast<int>(pick(rng) % 4);
    for (int e = 0; e < edits; ++e) {
      const std::size_t i = pick(rng);
      auto it = std::find(b.begin(), b.end(), i);
      if (it == b.end()) b.push_back(i); else b.erase(it);
    }
    if (b.empty()) continue;
    const IndexSet A = IndexSet::from_unsorted(a), B = IndexSet::from_unsorted(b);
    const double d2 = std::pow(correlation_distance(A, B), 2);
    const double ham = static_cast<double>(A.hamming_distance(B));
    const double lo = static_cast<double>(std::min(A.size(), B.size()));
    const double hi = static_cast<double>(std::max(A.size(), B.size()));
    ASSERT_LE(d2, ham / hi + 1e-12);
    if (d2 > 0.5) continue;
    const double x = 1.0 / (1.0 - d2);
    ASSERT_LE(ham / lo, d2 * (x * x + x) + 1e-12);
    if (d2 <= 0.2324) ASSERT_LE(ham / (3.0 * lo), d2 + 1e-12);
    ++checked;
  }
}

TEST(CorrelationDistance, ConstantThreeFailsNearOneHalf) {
  // {0} inside {0, 1}: d^2 = 1 - 1/sqrt(2) ~ 0.293 while Ham / (3 min) = 1/3.
  const IndexSet a = IndexSet::from_sorted({0, 1}), b = IndexSet::from_sorted({0});
  const double d2 = std::pow(correlation_distance(a, b), 2);
  EXPECT_LE(d2, 0.5);
  EXPECT_GT(1.0 / 3.0, d2);
}

SweepConfig small_config() {
  SweepConfig cfg;
  cfg.n = {60};
  cfg.k = {6};
  cfg.d = {2};
  cfg.mu_over_sigma = {0.5, 3.0};
  cfg.trials = 4;
  cfg.estimators = {"scan", "refit", "sure-const", "sure-card", "zero", "detect"};
  return cfg;
}

TEST(RunSweep, ZeroTrialsGivesAnEmptyReport) {
  SweepConfig cfg = small_config();
  cfg.trials = 0;
  const SweepReport r = run_sweep(cfg, 1);
  EXPECT_TRUE(r.rows.empty());
}

TEST(RunSweep, NoiselessHugeSignalIsRecoveredExactly) {
  SweepConfig cfg = small_config();
  cfg.sigma = 0.0;
  cfg.mu_over_sigma = {1e6};
  cfg.trials = 1;
  cfg.estimators = {"scan", "refit", "zero"};
  const SweepReport r = run_sweep(cfg, 9);
  ASSERT_EQ(r.rows.size(), 1u);
  EXPECT_EQ(r.rows[0].recovery_error, 0.0);
  EXPECT_EQ(r.rows[0].refit_l2_error, 0.0);
  EXPECT_TRUE(r.rows[0].error.empty());
}

TEST(RunSweep, RerunIsByteIdenticalAndThreadIndependent) {
  SweepConfig cfg = small_config();
  const std::string a = sweep_csv(run_sweep(cfg, 11));
  EXPECT_EQ(a, sweep_csv(run_sweep(cfg, 11)));
  cfg.threads = 3;
  const SweepReport threaded = run_sweep(cfg, 11);
  EXPECT_EQ(a, sweep_csv(threaded));
  EXPECT_NE(a, sweep_csv(run_sweep(small_config(), 12)));
  EXPECT_EQ(threaded.rows.size(), 8u);
  EXPECT_EQ(threaded.cells.size(), 2u);
}

TEST(RunSweep, RowsMatchADirectRecomputation) {
  const SweepConfig cfg = small_config();
  const SweepReport r = run_sweep(cfg, 5);
  const RegionFamily f = sweep_family(cfg, 60);
  for (const SweepRow& row : r.rows) {
    EXPECT_EQ(row.seed, trial_seed(5, row.mu_over_sigma == 0.5 ? 0 : 1, row.trial));
    const GaussianInstance g = gen_instance(60, 6, row.mu_over_sigma, 1.0, f, row.seed);
    ScanConfig sc;
    sc.vc_dim_d = 2;
    const ScanResult s = scan(g.z, f, sc);
    EXPECT_EQ(*row.recovery_error, recovery_error(s.region.members, g.r_star.members));
    double zero = 0.0;
    for (double m : g.mean_vector()) zero += m * m;
    EXPECT_DOUBLE_EQ(*row.zero_l2_error, zero);
  }
}

TEST(Summarize, LinearQuantiles) {
  const Summary s = summarize({4, 1, 3, 2});
  EXPECT_EQ(s.median, 2.5);
  EXPECT_EQ(s.q1, 1.75);
  EXPECT_EQ(s.q3, 3.25);
  EXPECT_EQ(s.count, 4u);
}

TEST(SweepConfig, TomlAndJsonAgree) {
  const auto dir = std::filesystem::temp_directory_path() / "subpop_sweep_cfg";
  std::filesystem::create_directories(dir);
  std::ofstream(dir / "c.toml") << "trials = 2\nC = 0.5\nestimators = [\"scan\"]\n[grid]\nn = [50]\n"
                                   "k = [5]\nd = [1]\nmu_over_sigma = [1.0]\n";
  std::ofstream(dir / "c.json") << R"({"trials": 2, "C": 0.5, "estimators": ["scan"], "grid": {"n": [50],
      "k": [5], "d": [1], "mu_over_sigma": [1.0]}})";
  const SweepConfig a = load_sweep_config((dir / "c.toml").string());
  const SweepConfig b = load_sweep_config((dir / "c.json").string());
  EXPECT_EQ(to_json(a), to_json(b));
  EXPECT_EQ(a.size_penalty_C, 0.5);
  std::ofstream(dir / "bad.json") << R"({"trials": 2, "grid": {"n": [50]}, "bogus": 1})";
  EXPECT_ANY_THROW(load_sweep_config((dir / "bad.json").string()));
  std::filesystem::remove_all(dir);
}

}  // namespace
