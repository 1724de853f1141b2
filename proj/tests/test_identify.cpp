#include <cmath>
#include <limits>
#include <random>

#include <gtest/gtest.h>

#include "subpop/error.hpp"
#include "subpop/identify.hpp"
#include "subpop/regions.hpp"
#include "support/oracles.hpp"

namespace {

using namespace subpop;

oracle::Sets lists(const RegionFamily& f) {
  oracle::Sets out;
  for (std::size_t id = 0; id < f.size(); ++id) out.push_back(f.members(id).to_vector());
  return out;
}

RegionFamily explicit_family(const oracle::Sets& sets, std::size_t n, std::size_t d) {
  std::vector<Region> regions;
  for (std::size_t i = 0; i < sets.size(); ++i) {
    Region r;
    r.id = i;
    r.members = IndexSet::from_unsorted(sets[i]);
    regions.push_back(std::move(r));
  }
  return RegionFamily::from_regions(FamilyKind::kExplicit, std::move(regions), n, d, false);
}

TEST(RegionZScore, Examples) {
  const std::vector<double> z{1, 0, 0, 3};
  EXPECT_DOUBLE_EQ(region_zscore(z, IndexSet::from_sorted({0, 3})), 4.0 / std::sqrt(2.0));
  EXPECT_NEAR(region_zscore(z, IndexSet::from_sorted({0, 3})), 2.828427, 1e-6);
  EXPECT_EQ(region_zscore(std::vector<double>(4, 0.0), IndexSet::range(0, 4)), 0.0);
  EXPECT_EQ(region_zscore(z, IndexSet::from_sorted({3})), 3.0);
  const std::vector<double> inf{std::numeric_limits<double>::infinity(), 0.0};
  EXPECT_TRUE(std::isinf(region_zscore(inf, IndexSet::range(0, 2))));
}

TEST(ScanPenalty, Examples) {
  EXPECT_NEAR(scan_penalty(100, 2, 10, 1.0, 1.0), 2.570045, 1e-5);
  EXPECT_NEAR(scan_penalty(100, 2, 10, 1.0, 1.0), std::sqrt(2.0 * std::log(10.0 * std::exp(1.0))),
              1e-15);
  EXPECT_DOUBLE_EQ(scan_penalty(50, 1, 50, 1.0, 3.0), 3.0);
  EXPECT_EQ(scan_penalty(50, 3, 7, 0.0, 3.0), 0.0);
  EXPECT_EQ(scan_penalty(1, 3, 1, 1.0, 1.0), 0.0);  // d > e n
  EXPECT_THROW(scan_penalty(5, 1, 0, 1.0, 1.0), PreconditionError);
  EXPECT_THROW(scan_penalty(5, 1, 6, 1.0, 1.0), PreconditionError);
}

TEST(ScanPenalty, NonincreasingInCardAndFlatBelowD) {
  for (std::size_t d : {1u, 3u, 8u}) {
    for (std::size_t c = 1; c < 200; ++c) {
      const double a = scan_penalty(200, d, c, 1.3, 0.7);
      const double b = scan_penalty(200, d, c + 1, 1.3, 0.7);
      if (c + 1 <= d) EXPECT_EQ(a, b);
      EXPECT_GE(a, b);
    }
  }
}

TEST(Scan, Examples) {
  const std::vector<double> z{0.3, -1.0, 2.0};
  const RegionFamily single = explicit_family({{0, 2}}, 3, 1);
  const ScanResult one = scan(z, single, {});
  EXPECT_EQ(one.region.id, 0u);
  EXPECT_EQ(one.runner_up_gap, 0.0);
  EXPECT_DOUBLE_EQ(one.objective, one.z_R - one.penalty);

  // Strong planted signal is recovered exactly.
  std::vector<double> planted(30, 0.0);
  for (std::size_t i = 11; i < 19; ++i) planted[i] = 100.0;
  const RegionFamily f = interval_family(30, 1, 30);
  const ScanResult hit = scan(planted, f, {});
  EXPECT_EQ(hit.region.members, IndexSet::range(11, 19));

  // Constant positive z: the larger window has the larger z_R and smaller penalty.
  const std::vector<double> flat(6, 5.0);
  const ScanResult big = scan(flat, interval_family(6, 2, 3), {});
  EXPECT_EQ(big.region.members.size(), 3u);
  EXPECT_EQ(big.region.id,
            oracle::scan(flat, lists(interval_family(6, 2, 3)), 2, 1.0, 1.0, true).id);
}

TEST(Scan, MaxCardFilterAndEmptyError) {
  std::vector<double> z(10, 1.0);
  ScanConfig cfg;
  cfg.max_card = 4;
  const ScanResult r = scan(z, interval_family(10, 1, 10), cfg);
  EXPECT_LE(r.region.members.size(), 4u);
  cfg.max_card = 1;
  try {
    scan(z, interval_family(10, 2, 10), cfg);
    FAIL();
  } catch (const PreconditionError& e) {
    EXPECT_NE(std::string(e.what()).find("1 members"), std::string::npos);
  }
}

TEST(Scan, RejectsBadInput) {
  std::vector<double> z(5, 0.0);
  ScanConfig cfg;
  cfg.sigma = 0.0;
  EXPECT_THROW(scan(z, interval_family(5, 1, 5), cfg), PreconditionError);
  z[2] = std::nan("");
  EXPECT_THROW(scan(z, interval_family(5, 1, 5), {}), NumericError);
  z[2] = -std::numeric_limits<double>::infinity();
  EXPECT_THROW(scan(z, interval_family(5, 1, 5), {}), NumericError);
  EXPECT_THROW(scan(std::vector<double>(4, 0.0), interval_family(5, 1, 5), {}), PreconditionError);
}

TEST(Scan, InfiniteScoreWinsAndIsFlagged) {
  std::vector<double> z(8, 0.0);
  z[5] = std::numeric_limits<double>::infinity();
  const ScanResult r = scan(z, interval_family(8, 1, 8), {});
  EXPECT_TRUE(r.infinite);
  EXPECT_TRUE(r.region.members.contains(5));
  EXPECT_FALSE(r.diagnostics.empty());
}

TEST(Scan, AllZeroPicksTheLargestRegion) {
  const std::vector<double> z(12, 0.0);
  const ScanResult r = scan(z, interval_family(12, 1, 12), {});
  EXPECT_EQ(r.region.members.size(), 12u);
}

TEST(Scan, ExhaustiveEquivalenceOnRandomFamilies) {
  std::mt19937_64 rng(31);
  std::normal_distribution<double> g;
  std::uniform_int_distribution<int> size(2, 30);
  std::uniform_int_distribution<int> count(1, 300);
  for (int t = 0; t < 300; ++t) {
    const auto n = static_cast<std::size_t>(size(rng));
    std::vector<double> z(n);
    for (auto& v : z) v = std::round(g(rng) * 2.0) / 2.0;  // ties on purpose
    oracle::Sets sets;
    const int m = count(rng);
    for (int i = 0; i < m; ++i) {
      auto s = oracle::random_subset(n, 0.3, rng);
      if (s.empty()) s.push_back(static_cast<std::size_t>(i) % n);
      sets.push_back(s);
    }
    const std::size_t d = 1 + static_cast<std::size_t>(t % 4);
    ScanConfig cfg;
    cfg.vc_dim_d = d;
    cfg.size_penalty_C = 0.5 * (t % 5);
    cfg.penalized = t % 7 != 0;
    cfg.threads = 1 + static_cast<std::size_t>(t % 3);
    const RegionFamily f = explicit_family(sets, n, 1);
    const ScanResult r = scan(z, f, cfg);
    const auto o = oracle::scan(z, sets, d, cfg.size_penalty_C, 1.0, cfg.penalized);
    ASSERT_EQ(r.region.id, o.id);
    ASSERT_EQ(r.objective, o.objective);
    EXPECT_GE(r.runner_up_gap, 0.0);
  }
}

TEST(Scan, ThreadCountDoesNotChangeTheResult) {
  std::mt19937_64 rng(2);
  std::normal_distribution<double> g;
  std::vector<double> z(300);
  for (auto& v : z) v = g(rng);
  const RegionFamily f = interval_family(300, 1, 300);
  ScanConfig cfg;
  const ScanResult base = scan(z, f, cfg);
  for (std::size_t th : {2u, 3u, 8u}) {
    cfg.threads = th;
    const ScanResult r = scan(z, f, cfg);
    EXPECT_EQ(r.region.id, base.region.id);
    EXPECT_EQ(r.objective, base.objective);
    EXPECT_EQ(r.runner_up_gap, base.runner_up_gap);
  }
}

TEST(Scan, ShiftEquivariantWithinOneCardinality) {
  std::mt19937_64 rng(13);
  std::normal_distribution<double> g;
  std::uniform_real_distribution<double> shift(0.1, 5.0);
  for (int t = 0; t < 200; ++t) {
    const std::size_t n = 25;
    std::vector<double> z(n);
    for (auto& v : z) v = g(rng);
    const std::size_t len = 1 + static_cast<std::size_t>(t % 10);
    const RegionFamily f = interval_family(n, len, len);
    const ScanResult a = scan(z, f, {});
    const double c = shift(rng);
    for (auto& v : z) v += c;
    const ScanResult b = scan(z, f, {});
    EXPECT_EQ(a.region.id, b.region.id);
  }
}

TEST(ScanTable, RowsMatchTheWinner) {
  std::vector<double> z{0.5, 2.0, -1.0, 1.5, 0.0};
  const RegionFamily f = interval_family(5, 1, 5);
  const auto rows = scan_table(z, f, {});
  ASSERT_EQ(rows.size(), f.size());
  const ScanResult r = scan(z, f, {});
  EXPECT_EQ(rows[r.region.id].objective, r.objective);
  for (const auto& row : rows) EXPECT_LE(row.objective, r.objective);
}

TEST(RecoveryError, Examples) {
  const IndexSet a = IndexSet::range(0, 4);
  EXPECT_EQ(recovery_error(a, a), 0.0);
  EXPECT_EQ(recovery_error(IndexSet::range(4, 8), a), 2.0);
  EXPECT_EQ(recovery_error(IndexSet::range(0, 2), a), 0.5);
  EXPECT_THROW(recovery_error(a, IndexSet()), PreconditionError);
}

TEST(MadSigma, RecoversUnitScale) {
  std::mt19937_64 rng(1);
  std::normal_distribution<double> g(0.0, 2.0);
  std::vector<double> z(20001);
  for (auto& v : z) v = g(rng);
  EXPECT_NEAR(mad_sigma(z), 2.0, 0.06);
}

}  // namespace
