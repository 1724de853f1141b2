#include <cmath>
#include <filesystem>
#include <random>

#include <gtest/gtest.h>

#include "subpop/data_io.hpp"
#include "subpop/error.hpp"

namespace {

using namespace subpop;

double strong(const LabeledPoint& p) { return std::get<double>(*p.label); }

TEST(LoadCsv, StrongRowWithNamedCell) {
  const Dataset d = parse_csv_dataset("a,b,y\n1.0,2.0,y=3.5\n");
  ASSERT_EQ(d.size(), 1u);
  EXPECT_EQ(d.points[0].x, (std::vector<double>{1.0, 2.0}));
  EXPECT_EQ(strong(d.points[0]), 3.5);
  EXPECT_EQ(d.feature_names, (std::vector<std::string>{"a", "b"}));
}

TEST(LoadCsv, WeakRow) {
  const Dataset d = parse_csv_dataset("a,y_set\n0.5,y_set=1|2|3\n");
  const auto& w = std::get<WeakLabel>(*d.points[0].label);
  EXPECT_EQ(w.candidates, (std::vector<double>{1, 2, 3}));
}

TEST(LoadCsv, MixedStrongAndWeakRows) {
  const Dataset d = parse_csv_dataset("a,y,y_set\n1,2,\n3,,4|5\n");
  EXPECT_TRUE(std::holds_alternative<double>(*d.points[0].label));
  EXPECT_TRUE(std::holds_alternative<WeakLabel>(*d.points[1].label));
}

TEST(LoadCsv, EmptyAndHeaderOnlyFilesFail) {
  EXPECT_THROW(parse_csv_dataset(""), ParseError);
  EXPECT_THROW(parse_csv_dataset("a,y\n"), ParseError);
}

TEST(LoadCsv, ErrorsNameTheRow) {
  try {
    parse_csv_dataset("a,y\n1,2\n3,oops\n");
    FAIL() << "expected a parse error";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.row(), 2u);
    EXPECT_NE(std::string(e.what()).find("row 2"), std::string::npos);
  }
  EXPECT_THROW(parse_csv_dataset("a,y\n1\n"), ParseError);
  EXPECT_THROW(parse_csv_dataset("a,y,y_set\n1,2,3\n"), ParseError);
  EXPECT_THROW(parse_csv_dataset("a\n1\n"), ParseError);  // no label, no score
}

TEST(LoadJson, ArrayOfObjects) {
  const Dataset d = parse_json_dataset(
      R"([{"x":[1,2],"y":3},{"x":[4,5],"y_set":[1,2]},{"x":[0,0],"y_set":"7|8"}])");
  ASSERT_EQ(d.size(), 3u);
  EXPECT_EQ(strong(d.points[0]), 3.0);
  EXPECT_EQ(std::get<WeakLabel>(*d.points[2].label).candidates, (std::vector<double>{7, 8}));
  EXPECT_THROW(parse_json_dataset("[]"), ParseError);
  EXPECT_THROW(parse_json_dataset(R"([{"x":[1],"y":1},{"x":[1,2],"y":1}])"), ParseError);
}

TEST(ResidualScore, Examples) {
  const Predictor two = [](std::span<const double>) { return 2.0; };
  const Predictor three = [](std::span<const double>) { return 3.0; };
  const std::vector<double> x{0.0};
  EXPECT_EQ(residual_score(x, 3.0, three), 0.0);
  EXPECT_EQ(residual_score(x, 5.0, two), 3.0);
  EXPECT_EQ(residual_score(x, -1.0, two), 3.0);
  const Predictor bad = [](std::span<const double>) { return std::nan(""); };
  EXPECT_THROW(residual_score(x, 1.0, bad), NumericError);
}

TEST(MinScore, Examples) {
  const ScoreFunction f = [](std::span<const double>, double y) { return std::fabs(y - 2.0); };
  const std::vector<double> x{0.0};
  EXPECT_EQ(min_score(x, std::vector<double>{1, 2, 3}, f), 0.0);
  EXPECT_EQ(min_score(x, std::vector<double>{5}, f), 3.0);
  EXPECT_EQ(min_score(x, std::vector<double>{4, 5}, f), 2.0);
  EXPECT_THROW(min_score(x, std::vector<double>{}, f), PreconditionError);
}

TEST(MinScore, SingletonEqualsStrongAndSupersetsNeverIncrease) {
  std::mt19937_64 rng(17);
  std::normal_distribution<double> g;
  const Predictor predict = linear_predictor({0.3, -1.2, 0.7});
  const ScoreFunction f = [&](std::span<const double> x, double y) {
    return residual_score(x, y, predict);
  };
  for (int t = 0; t < 500; ++t) {
    const std::vector<double> x{g(rng), g(rng)};
    std::vector<double> w{g(rng)};
    EXPECT_EQ(min_score(x, w, f), f(x, w[0]));
    double prev = min_score(x, w, f);
    for (int grow = 0; grow < 4; ++grow) {
      w.push_back(g(rng));
      const double now = min_score(x, w, f);
      EXPECT_LE(now, prev);
      prev = now;
    }
  }
}

TEST(ScoreDataset, ScoreColumnBypassesThePredictor) {
  const Dataset d = parse_csv_dataset("a,y,score\n1,5,0.25\n2,7,\n");
  const Predictor predict = linear_predictor({1.0, 1.0});
  const auto s = score_dataset(d, &predict);
  EXPECT_EQ(s[0].score, 0.25);
  EXPECT_EQ(s[1].score, 4.0);
  EXPECT_THROW(score_dataset(d, nullptr), PreconditionError);
}

Dataset random_dataset(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> rows(1, 12);
  std::uniform_int_distribution<int> dims(1, 4);
  std::uniform_int_distribution<int> kind(0, 3);
  std::normal_distribution<double> g(0.0, 1e3);
  Dataset d;
  const int p = dims(rng);
  for (int j = 0; j < p; ++j) d.feature_names.push_back("f" + std::to_string(j));
  const int n = rows(rng);
  for (int i = 0; i < n; ++i) {
    LabeledPoint pt;
    for (int j = 0; j < p; ++j) pt.x.push_back(g(rng) / 7.0);
    switch (kind(rng)) {
      case 0: pt.label = g(rng); break;
      case 1: pt.label = WeakLabel{{g(rng), g(rng) * 1e-9, 1.0 / 3.0}}; break;
      case 2: pt.label = g(rng); pt.score = std::fabs(g(rng)); break;
      default: pt.score = 1e-300 * std::fabs(g(rng)); break;
    }
    d.points.push_back(std::move(pt));
  }
  return d;
}

TEST(RoundTrip, CsvAndJsonAreIdentity) {
  std::mt19937_64 rng(3);
  const auto dir = std::filesystem::temp_directory_path() / "subpop_roundtrip";
  std::filesystem::create_directories(dir);
  for (int t = 0; t < 200; ++t) {
    const Dataset d = random_dataset(rng);
    EXPECT_EQ(parse_csv_dataset(to_csv(d)), d);
    EXPECT_EQ(parse_json_dataset(to_json_text(d)), d);
    if (t % 20 == 0) {
      save_dataset(d, dir / "d.csv", FileFormat::kCsv);
      save_dataset(d, dir / "d.json", FileFormat::kJson);
      EXPECT_EQ(load_dataset(dir / "d.csv"), d);
      EXPECT_EQ(load_dataset(dir / "d.json"), d);
    }
  }
  std::filesystem::remove_all(dir);
}

TEST(LoadDataset, MissingFileNamesThePath) {
  try {
    load_dataset("/nonexistent/calib.csv");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_NE(std::string(e.what()).find("/nonexistent/calib.csv"), std::string::npos);
  }
}

}  // namespace
