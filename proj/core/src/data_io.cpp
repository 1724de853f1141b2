#include "subpop/data_io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "subpop/error.hpp"

namespace subpop {

namespace {

constexpr std::string_view kLabelColumn = "y";
constexpr std::string_view kWeakColumn = "y_set";
constexpr std::string_view kScoreColumn = "score";
constexpr char kWeakDelimiter = '|';

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split(std::string_view s, char delim) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const auto pos = s.find(delim, start);
    if (pos == std::string_view::npos) {
      out.push_back(s.substr(start));
      return out;
    }
    out.push_back(s.substr(start, pos - start));
    start = pos + 1;
  }
}

std::optional<double> parse_number(std::string_view s) {
  s = trim(s);
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty()) return std::nullopt;
  return v;
}

double require_finite(std::string_view cell, std::string_view column, std::size_t row) {
  const auto v = parse_number(cell);
  if (!v || !std::isfinite(*v)) {
    throw ParseError("row " + std::to_string(row) + ": column '" + std::string(column) +
                         "' is not a finite number: '" + std::string(trim(cell)) + "'",
                     row);
  }
  return *v;
}

WeakLabel parse_weak(std::string_view cell, std::size_t row) {
  WeakLabel w;
  for (auto part : split(trim(cell), kWeakDelimiter)) {
    w.candidates.push_back(require_finite(part, kWeakColumn, row));
  }
  return w;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void check_point(const LabeledPoint& p, std::size_t row) {
  if (!p.label && !p.score) {
    throw ParseError("row " + std::to_string(row) + ": needs one of y, y_set or score", row);
  }
}

}  // namespace

std::string format_number(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

std::vector<std::vector<double>> Dataset::features() const {
  std::vector<std::vector<double>> out;
  out.reserve(points.size());
  for (const auto& p : points) out.push_back(p.x);
  return out;
}

FileFormat format_from_path(const std::filesystem::path& path) {
  auto ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return ext == ".json" ? FileFormat::kJson : FileFormat::kCsv;
}

Dataset parse_csv_dataset(const std::string& text, Role role) {
  std::vector<std::string_view> lines;
  for (auto line : split(text, '\n')) {
    if (!trim(line).empty()) lines.push_back(line);
  }
  if (lines.empty()) throw ParseError("empty file: no header");

  enum class Kind { kFeature, kLabel, kWeak, kScore };
  std::vector<std::string> names;
  std::vector<Kind> kinds;
  Dataset data;
  data.role = role;
  for (auto cell : split(lines.front(), ',')) {
    const std::string name(trim(cell));
    if (name.empty()) throw ParseError("header has an empty column name");
    if (std::find(names.begin(), names.end(), name) != names.end()) {
      throw ParseError("header repeats column '" + name + "'");
    }
    names.push_back(name);
    if (name == kLabelColumn) {
      kinds.push_back(Kind::kLabel);
    } else if (name == kWeakColumn) {
      kinds.push_back(Kind::kWeak);
    } else if (name == kScoreColumn) {
      kinds.push_back(Kind::kScore);
    } else {
      kinds.push_back(Kind::kFeature);
      data.feature_names.push_back(name);
    }
  }

  for (std::size_t r = 1; r < lines.size(); ++r) {
    const auto cells = split(lines[r], ',');
    if (cells.size() != names.size()) {
      throw ParseError("row " + std::to_string(r) + ": expected " +
                           std::to_string(names.size()) + " cells, found " +
                           std::to_string(cells.size()),
                       r);
    }
    LabeledPoint p;
    for (std::size_t c = 0; c < cells.size(); ++c) {
      auto cell = trim(cells[c]);
      if (cell.size() > names[c].size() && cell.starts_with(names[c]) &&
          cell[names[c].size()] == '=') {
        cell.remove_prefix(names[c].size() + 1);
      }
      switch (kinds[c]) {
        case Kind::kFeature:
          p.x.push_back(require_finite(cell, names[c], r));
          break;
        case Kind::kLabel:
          if (!cell.empty()) {
            if (p.label) throw ParseError("row " + std::to_string(r) + ": both y and y_set set", r);
            p.label = require_finite(cell, names[c], r);
          }
          break;
        case Kind::kWeak:
          if (!cell.empty()) {
            if (p.label) throw ParseError("row " + std::to_string(r) + ": both y and y_set set", r);
            p.label = parse_weak(cell, r);
          }
          break;
        case Kind::kScore:
          if (!cell.empty()) p.score = require_finite(cell, names[c], r);
          break;
      }
    }
    check_point(p, r);
    data.points.push_back(std::move(p));
  }
  if (data.points.empty()) throw ParseError("file has a header but no data rows");
  return data;
}

Dataset parse_json_dataset(const std::string& text, Role role) {
  using nlohmann::ordered_json;
  ordered_json doc;
  try {
    doc = ordered_json::parse(text);
  } catch (const ordered_json::parse_error& e) {
    throw ParseError(std::string("invalid JSON: ") + e.what());
  }
  if (!doc.is_array()) throw ParseError("JSON dataset must be an array of objects");
  if (doc.empty()) throw ParseError("JSON dataset has no rows");

  Dataset data;
  data.role = role;
  const auto number = [](const ordered_json& v, std::string_view key, std::size_t row) {
    if (!v.is_number() || !std::isfinite(v.get<double>())) {
      throw ParseError("row " + std::to_string(row) + ": '" + std::string(key) +
                           "' is not a finite number",
                       row);
    }
    return v.get<double>();
  };

  for (std::size_t r = 0; r < doc.size(); ++r) {
    const std::size_t row = r + 1;
    const auto& obj = doc[r];
    if (!obj.is_object()) throw ParseError("row " + std::to_string(row) + ": not an object", row);
    LabeledPoint p;
    std::vector<std::string> names;
    for (const auto& [key, value] : obj.items()) {
      if (value.is_null()) continue;
      if (key == kLabelColumn) {
        if (p.label) throw ParseError("row " + std::to_string(row) + ": both y and y_set set", row);
        p.label = number(value, key, row);
      } else if (key == kWeakColumn) {
        if (p.label) throw ParseError("row " + std::to_string(row) + ": both y and y_set set", row);
        if (value.is_string()) {
          p.label = parse_weak(value.get<std::string>(), row);
        } else if (value.is_array()) {
          WeakLabel w;
          for (const auto& c : value) w.candidates.push_back(number(c, key, row));
          if (w.candidates.empty()) {
            throw ParseError("row " + std::to_string(row) + ": empty y_set", row);
          }
          p.label = std::move(w);
        } else {
          throw ParseError("row " + std::to_string(row) + ": y_set must be array or string", row);
        }
      } else if (key == kScoreColumn) {
        p.score = number(value, key, row);
      } else if (key == "x" && value.is_array()) {
        for (std::size_t i = 0; i < value.size(); ++i) {
          names.push_back("x" + std::to_string(i));
          p.x.push_back(number(value[i], key, row));
        }
      } else {
        names.push_back(key);
        p.x.push_back(number(value, key, row));
      }
    }
    check_point(p, row);
    if (r == 0) {
      data.feature_names = names;
    } else if (names != data.feature_names) {
      throw ParseError("row " + std::to_string(row) + ": feature keys differ from row 1", row);
    }
    data.points.push_back(std::move(p));
  }
  return data;
}

Dataset load_dataset(const std::filesystem::path& path, FileFormat format, Role role) {
  const std::string text = read_file(path);
  try {
    return format == FileFormat::kJson ? parse_json_dataset(text, role)
                                       : parse_csv_dataset(text, role);
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what(), e.row());
  }
}

Dataset load_dataset(const std::filesystem::path& path, Role role) {
  return load_dataset(path, format_from_path(path), role);
}

std::string to_csv(const Dataset& data) {
  const bool any_strong = std::any_of(data.points.begin(), data.points.end(), [](const auto& p) {
    return p.label && std::holds_alternative<double>(*p.label);
  });
  const bool any_weak = std::any_of(data.points.begin(), data.points.end(), [](const auto& p) {
    return p.label && std::holds_alternative<WeakLabel>(*p.label);
  });
  const bool any_score = std::any_of(data.points.begin(), data.points.end(),
                                     [](const auto& p) { return p.score.has_value(); });

  std::vector<std::string> header = data.feature_names;
  if (any_strong) header.emplace_back(kLabelColumn);
  if (any_weak) header.emplace_back(kWeakColumn);
  if (any_score) header.emplace_back(kScoreColumn);

  std::string out;
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (i) out += ',';
    out += header[i];
  }
  out += '\n';
  for (const auto& p : data.points) {
    std::vector<std::string> cells;
    for (double v : p.x) cells.push_back(format_number(v));
    if (any_strong) {
      cells.push_back(p.label && std::holds_alternative<double>(*p.label)
                          ? format_number(std::get<double>(*p.label))
                          : std::string{});
    }
    if (any_weak) {
      std::string cell;
      if (p.label && std::holds_alternative<WeakLabel>(*p.label)) {
        const auto& c = std::get<WeakLabel>(*p.label).candidates;
        for (std::size_t i = 0; i < c.size(); ++i) {
          if (i) cell += kWeakDelimiter;
          cell += format_number(c[i]);
        }
      }
      cells.push_back(std::move(cell));
    }
    if (any_score) cells.push_back(p.score ? format_number(*p.score) : std::string{});
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out += ',';
      out += cells[i];
    }
    out += '\n';
  }
  return out;
}

std::string to_json_text(const Dataset& data) {
  nlohmann::ordered_json doc = nlohmann::ordered_json::array();
  for (const auto& p : data.points) {
    nlohmann::ordered_json obj = nlohmann::ordered_json::object();
    for (std::size_t i = 0; i < p.x.size(); ++i) obj[data.feature_names[i]] = p.x[i];
    if (p.label) {
      if (const auto* y = std::get_if<double>(&*p.label)) {
        obj[std::string(kLabelColumn)] = *y;
      } else {
        obj[std::string(kWeakColumn)] = std::get<WeakLabel>(*p.label).candidates;
      }
    }
    if (p.score) obj[std::string(kScoreColumn)] = *p.score;
    doc.push_back(std::move(obj));
  }
  return doc.dump(2) + "\n";
}

void save_dataset(const Dataset& data, const std::filesystem::path& path, FileFormat format) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ParseError("cannot write '" + path.string() + "'");
  out << (format == FileFormat::kJson ? to_json_text(data) : to_csv(data));
}

Score residual_score(std::span<const double> x, double y, const Predictor& predict) {
  const double yhat = predict(x);
  if (!std::isfinite(yhat)) throw NumericError("residual_score: non-finite prediction");
  return std::fabs(y - yhat);
}

Score min_score(std::span<const double> x, std::span<const double> candidates,
                const ScoreFunction& score_fn) {
  if (candidates.empty()) throw PreconditionError("min_score: empty label set");
  Score best = score_fn(x, candidates.front());
  for (std::size_t i = 1; i < candidates.size(); ++i) {
    best = std::min(best, score_fn(x, candidates[i]));
  }
  return best;
}

std::vector<ScoreSample> score_dataset(const Dataset& data, const Predictor* predict) {
  std::vector<ScoreSample> out;
  out.reserve(data.points.size());
  const ScoreFunction residual = [predict](std::span<const double> x, double y) {
    return residual_score(x, y, *predict);
  };
  for (std::size_t i = 0; i < data.points.size(); ++i) {
    const auto& p = data.points[i];
    ScoreSample s{i, 0.0, data.role};
    if (p.score) {
      s.score = *p.score;
    } else {
      if (!predict || !p.label) {
        throw PreconditionError("point " + std::to_string(i) +
                                " has no score column and no predictor was supplied");
      }
      if (const auto* y = std::get_if<double>(&*p.label)) {
        s.score = residual_score(p.x, *y, *predict);
      } else {
        s.score = min_score(p.x, std::get<WeakLabel>(*p.label).candidates, residual);
      }
    }
    out.push_back(s);
  }
  return out;
}

std::vector<Score> score_values(std::span<const ScoreSample> samples) {
  std::vector<Score> out;
  out.reserve(samples.size());
  for (const auto& s : samples) out.push_back(s.score);
  return out;
}

Predictor linear_predictor(std::vector<double> coefficients) {
  if (coefficients.empty()) throw PreconditionError("linear_predictor: need an intercept");
  return [b = std::move(coefficients)](std::span<const double> x) {
    if (x.size() + 1 != b.size()) {
      throw PreconditionError("linear_predictor: expected " + std::to_string(b.size() - 1) +
                              " features, got " + std::to_string(x.size()));
    }
    double v = b[0];
    for (std::size_t i = 0; i < x.size(); ++i) v += b[i + 1] * x[i];
    return v;
  };
}

}  // namespace subpop
