#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "subpop/conformal.hpp"
#include "subpop/data_io.hpp"
#include "subpop/error.hpp"
#include "subpop/rng.hpp"
#include "support/oracles.hpp"

namespace {

using namespace subpop;

TEST(DiscretePValue, Examples) {
  const std::vector<double> calib{1, 2, 3};
  EXPECT_DOUBLE_EQ(discrete_pvalue(2.5, calib), 0.75);
  EXPECT_DOUBLE_EQ(discrete_pvalue(0.0, calib), 0.25);
  EXPECT_DOUBLE_EQ(discrete_pvalue(9.0, calib), 1.0);
  EXPECT_DOUBLE_EQ(discrete_pvalue(2.0, calib), 0.75);  // ties count as <=
  EXPECT_THROW(discrete_pvalue(1.0, std::vector<double>{}), PreconditionError);
}

TEST(RandomizedPValue, Examples) {
  EXPECT_EQ(randomized_pvalue(1.0, 3, 0.0), 1.0);
  EXPECT_DOUBLE_EQ(randomized_pvalue(0.25, 3, 0.5), 0.125);
  const double almost_one = std::nextafter(1.0, 0.0);
  EXPECT_GT(randomized_pvalue(0.25, 3, almost_one), 0.0);
  EXPECT_THROW(randomized_pvalue(0.3, 3, 0.5), PreconditionError);
  EXPECT_THROW(randomized_pvalue(0.25, 3, 1.0), PreconditionError);
}

TEST(ZScore, Examples) {
  EXPECT_EQ(zscore(0.5).value, 0.0);
  EXPECT_NEAR(zscore(0.975).value, 1.959964, 1e-6);
  EXPECT_NEAR(zscore(0.841345).value, 1.0, 1e-5);
  const ZScore top = zscore(1.0);
  EXPECT_TRUE(top.infinite);
  EXPECT_TRUE(std::isinf(top.value));
  EXPECT_FALSE(zscore(0.3).infinite);
  EXPECT_THROW(zscore(0.0), PreconditionError);
}

TEST(RegionPValues, Examples) {
  const std::vector<double> calib{1, 2};
  const std::vector<double> test{1.5};
  const std::vector<double> jitter{0.0};
  const RegionPValues r = region_pvalues(calib, test, jitter);
  ASSERT_TRUE(r.evaluable);
  EXPECT_DOUBLE_EQ(r.discrete[0], 2.0 / 3.0);
  EXPECT_DOUBLE_EQ(r.randomized[0], 2.0 / 3.0);

  const RegionPValues empty_test = region_pvalues(calib, {}, {});
  EXPECT_TRUE(empty_test.evaluable);
  EXPECT_TRUE(empty_test.randomized.empty());

  const RegionPValues none = region_pvalues({}, test, jitter);
  EXPECT_FALSE(none.evaluable);
}

TEST(AggregateRegionPValue, Examples) {
  EXPECT_DOUBLE_EQ(aggregate_region_pvalue(std::vector<double>{0.5, 0.5, 0.5, 0.5}), 1.0);
  EXPECT_NEAR(aggregate_region_pvalue(std::vector<double>{0.9, 0.9}), 0.2, 1e-15);
  EXPECT_DOUBLE_EQ(aggregate_region_pvalue(std::vector<double>{0.1, 0.1}), 1.0);
  EXPECT_THROW(aggregate_region_pvalue(std::vector<double>{}), PreconditionError);
}

TEST(PValueTable, RowInvariantsAgainstCountingOracle) {
  std::mt19937_64 rng(8);
  std::normal_distribution<double> g;
  std::uniform_int_distribution<int> size(1, 60);
  for (int t = 0; t < 300; ++t) {
    std::vector<double> calib(static_cast<std::size_t>(size(rng)));
    std::vector<double> test(static_cast<std::size_t>(size(rng)));
    // Coarse rounding forces ties between calibration and test scores.
    for (auto& v : calib) v = std::round(g(rng) * 4.0) / 4.0;
    for (auto& v : test) v = std::round(g(rng) * 4.0) / 4.0;
    const PValueTable table = compute_pvalue_table(calib, test, static_cast<std::uint64_t>(t));
    const double step = 1.0 / static_cast<double>(calib.size() + 1);
    for (const PValueRow& r : table.rows) {
      EXPECT_EQ(r.discrete, oracle::conformal_p(test[r.index], calib));
      EXPECT_LE(r.randomized, r.discrete);
      EXPECT_GT(r.randomized, r.discrete - step - 1e-15);
      EXPECT_GT(r.randomized, 0.0);
      EXPECT_EQ(r.randomized, randomized_pvalue(r.discrete, calib.size(),
                                                test_jitter(table.seed, r.index)));
    }
  }
}

TEST(DiscretePValue, NondecreasingInTheTestScore) {
  std::mt19937_64 rng(4);
  std::normal_distribution<double> g;
  for (int t = 0; t < 100; ++t) {
    std::vector<double> calib(30);
    for (auto& v : calib) v = g(rng);
    double a = g(rng);
    double b = g(rng);
    if (a > b) std::swap(a, b);
    EXPECT_LE(discrete_pvalue(a, calib), discrete_pvalue(b, calib));
  }
}

// Each test point is ranked against its own calibration draw, so the 200
// p-values are independent and a one-sample KS test applies. With one shared
// calibration set they are only marginally uniform and the KS statistic picks
// up the calibration set's own fluctuation.
TEST(PValueTable, RandomizedValuesAreMarginallyUniform) {
  int passes = 0;
  const int trials = 100;
  for (int t = 0; t < trials; ++t) {
    const CounterStream s(static_cast<std::uint64_t>(1000 + t), 9);
    std::vector<double> p;
    std::uint64_t counter = 0;
    for (std::size_t j = 0; j < 200; ++j) {
      std::vector<double> calib(200);
      for (auto& v : calib) v = s.normal(counter++);
      const double test = s.normal(counter++);
      const PValueTable table = compute_pvalue_table(calib, std::vector<double>{test},
                                                     static_cast<std::uint64_t>(t * 1000 + j));
      p.push_back(table.rows[0].randomized);
    }
    passes += oracle::ks_uniform_pvalue(p) >= 0.01 ? 1 : 0;
  }
  EXPECT_GE(passes, 93);
}

TEST(ZScore, ComposedWithUniformRandomizationIsStandardNormal) {
  const std::size_t m = 200;
  const CounterStream grid(77, 1);
  const CounterStream jitter(77, 2);
  const int n = 100000;
  double sum = 0.0;
  double sq = 0.0;
  for (int i = 0; i < n; ++i) {
    const auto rank = static_cast<double>(grid.bits(static_cast<std::uint64_t>(i)) % (m + 1) + 1);
    const double p = randomized_pvalue(rank / static_cast<double>(m + 1), m,
                                       jitter.uniform(static_cast<std::uint64_t>(i)));
    const double z = zscore(p).value;
    sum += z;
    sq += z * z;
  }
  const double mean = sum / n;
  const double var = sq / n - mean * mean;
  EXPECT_LT(std::fabs(mean), 4.0 / std::sqrt(static_cast<double>(n)));
  EXPECT_GE(var, 0.9);
  EXPECT_LE(var, 1.1);
}

TEST(WeakSupervision, SingletonSetsReproduceStrongPValuesExactly) {
  std::mt19937_64 rng(12);
  std::normal_distribution<double> g;
  const Predictor predict = linear_predictor({0.5, 2.0});
  for (int t = 0; t < 40; ++t) {
    Dataset strong_calib, weak_calib, strong_test, weak_test;
    for (Dataset* d : {&strong_calib, &weak_calib, &strong_test, &weak_test}) {
      d->feature_names = {"x"};
    }
    for (int i = 0; i < 50; ++i) {
      const double x = g(rng);
      const double y = 0.5 + 2.0 * x + g(rng);
      Dataset& sd = i < 25 ? strong_calib : strong_test;
      Dataset& wd = i < 25 ? weak_calib : weak_test;
      sd.points.push_back({{x}, Label{y}, std::nullopt});
      wd.points.push_back({{x}, Label{WeakLabel{{y}}}, std::nullopt});
    }
    const auto a = compute_pvalue_table(score_values(score_dataset(strong_calib, &predict)),
                                        score_values(score_dataset(strong_test, &predict)), 5);
    const auto b = compute_pvalue_table(score_values(score_dataset(weak_calib, &predict)),
                                        score_values(score_dataset(weak_test, &predict)), 5);
    ASSERT_EQ(a.rows.size(), b.rows.size());
    for (std::size_t j = 0; j < a.rows.size(); ++j) {
      EXPECT_EQ(a.rows[j].discrete, b.rows[j].discrete);
      EXPECT_EQ(a.rows[j].randomized, b.rows[j].randomized);
      EXPECT_EQ(a.rows[j].z.value, b.rows[j].z.value);
    }
  }
}

}  // namespace
