#pragma once

#include <cstddef>
#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace subpop {

using Score = double;

/// Partial supervision: the true response is one of `candidates`.
struct WeakLabel {
  std::vector<double> candidates;
  bool operator==(const WeakLabel&) const = default;
};

/// Strong (a single real response) or weak (a finite candidate set).
using Label = std::variant<double, WeakLabel>;

/// One row of a calibration or test file. At least one of `label` and
/// `score` is set; a present score bypasses scoring.
struct LabeledPoint {
  std::vector<double> x;
  std::optional<Label> label;
  std::optional<Score> score;
  bool operator==(const LabeledPoint&) const = default;
};

enum class Role { kCalibration, kTest };

struct Dataset {
  std::vector<std::string> feature_names;
  std::vector<LabeledPoint> points;
  Role role = Role::kCalibration;

  std::size_t size() const { return points.size(); }
  std::size_t dim() const { return feature_names.size(); }
  /// Feature vectors in row order.
  std::vector<std::vector<double>> features() const;
  bool operator==(const Dataset&) const = default;
};

struct ScoreSample {
  std::size_t index = 0;
  Score score = 0.0;
  Role origin = Role::kCalibration;
};

enum class FileFormat { kCsv, kJson };

/// Picks the format from the extension (.json -> JSON, anything else CSV).
FileFormat format_from_path(const std::filesystem::path& path);

/// Reads a dataset. CSV files carry a header; the reserved columns are `y`
/// (strong label), `y_set` (weak label, candidates separated by '|') and
/// `score` (pre-computed nonconformity score). Every other column is a
/// numeric feature. Cells may optionally repeat the column name as
/// `name=value`. JSON files hold an array of objects with the same keys
/// (`y_set` may be an array), or an `x` array in place of named features.
/// Throws ParseError naming the offending row.
Dataset load_dataset(const std::filesystem::path& path, FileFormat format,
                     Role role = Role::kCalibration);
Dataset load_dataset(const std::filesystem::path& path,
                     Role role = Role::kCalibration);

Dataset parse_csv_dataset(const std::string& text, Role role = Role::kCalibration);
Dataset parse_json_dataset(const std::string& text, Role role = Role::kCalibration);

std::string to_csv(const Dataset& data);
std::string to_json_text(const Dataset& data);
void save_dataset(const Dataset& data, const std::filesystem::path& path,
                  FileFormat format);

using Predictor = std::function<double(std::span<const double>)>;
using ScoreFunction = std::function<Score(std::span<const double>, double)>;

/// |y - predict(x)|. Throws NumericError on a non-finite prediction.
Score residual_score(std::span<const double> x, double y, const Predictor& predict);

/// Most optimistic score over the candidate set. Throws PreconditionError on
/// an empty set.
Score min_score(std::span<const double> x, std::span<const double> candidates,
                const ScoreFunction& score_fn);

/// Scores every point: an ingested `score` wins; otherwise strong labels use
/// the residual and weak labels the min-score under `predict`. Throws
/// PreconditionError when a point needs a predictor and none is given.
std::vector<ScoreSample> score_dataset(const Dataset& data,
                                       const Predictor* predict = nullptr);

std::vector<Score> score_values(std::span<const ScoreSample> samples);

/// Shortest decimal text that reads back to the same double.
std::string format_number(double v);

/// Affine predictor b0 + sum_i b_i x_i.
Predictor linear_predictor(std::vector<double> coefficients);

}  // namespace subpop
