#include "cli.hpp"

#include <algorithm>
#include <charconv>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "digest.hpp"
#include "subpop/conformal.hpp"
#include "subpop/data_io.hpp"
#include "subpop/detect.hpp"
#include "subpop/error.hpp"
#include "subpop/identify.hpp"
#include "subpop/refit.hpp"
#include "subpop/regions.hpp"
#include "subpop/serialize.hpp"
#include "subpop/sim.hpp"

namespace subpop::cli {
namespace {

namespace fs = std::filesystem;
using ojson = nlohmann::ordered_json;

constexpr const char* kSeedEnv = "SUBPOP_SEED";

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Everything one subcommand produces; written under --out.
struct Run {
  std::string subcommand;
  ojson config = ojson::object();
  ojson inputs = ojson::array();
  std::uint64_t seed = 0;
  std::string result;
  std::string table;
};

struct Common {
  std::string out;
  std::optional<std::uint64_t> seed;
  std::size_t threads = 0;
};

std::uint64_t resolve_seed(const std::optional<std::uint64_t>& flag) {
  if (flag) return *flag;
  if (const char* env = std::getenv(kSeedEnv); env && *env) {
    std::uint64_t v = 0;
    const char* end = env + std::char_traits<char>::length(env);
    const auto [ptr, ec] = std::from_chars(env, end, v);
    if (ec != std::errc{} || ptr != end) {
      throw UsageError(std::string(kSeedEnv) + " is not an unsigned integer: '" + env + "'");
    }
    return v;
  }
  return 0;
}

std::size_t resolve_threads(std::size_t flag) {
  if (flag > 0) return flag;
  return std::max<std::size_t>(1, std::thread::hardware_concurrency());
}

void record_input(Run& run, const std::string& flag, const std::string& path) {
  run.inputs.push_back({{"flag", flag}, {"path", path}, {"sha256", sha256_file(path)}});
}

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

nlohmann::json read_json(const std::string& path) {
  try {
    return nlohmann::json::parse(read_text(path));
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError("'" + path + "': " + e.what());
  }
}

Dataset load_input(Run& run, const std::string& flag, const std::string& path, Role role) {
  if (path.empty()) throw UsageError("--" + flag + " is required");
  record_input(run, flag, path);
  return load_dataset(path, role);
}

std::optional<Predictor> parse_predictor(const std::string& coef) {
  if (coef.empty()) return std::nullopt;
  std::vector<double> b;
  std::stringstream ss(coef);
  std::string item;
  while (std::getline(ss, item, ',')) {
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(item.data(), item.data() + item.size(), v);
    if (ec != std::errc{} || ptr != item.data() + item.size()) {
      throw UsageError("--linear-coef: '" + item + "' is not a number");
    }
    b.push_back(v);
  }
  return linear_predictor(std::move(b));
}

std::vector<Score> scores_of(const Dataset& data, const std::optional<Predictor>& predict) {
  return score_values(score_dataset(data, predict ? &*predict : nullptr));
}

std::size_t feature_column(const nlohmann::json& desc, const Dataset& data) {
  const auto& f = desc.at("feature");
  if (f.is_number_unsigned()) {
    const auto j = f.get<std::size_t>();
    if (j >= data.dim()) throw PreconditionError("family: feature index out of range");
    return j;
  }
  const auto name = f.get<std::string>();
  const auto it = std::find(data.feature_names.begin(), data.feature_names.end(), name);
  if (it == data.feature_names.end()) {
    throw PreconditionError("family: no feature column named '" + name + "'");
  }
  return static_cast<std::size_t>(it - data.feature_names.begin());
}

std::vector<std::string> feature_labels(const Dataset& data, std::size_t column) {
  std::vector<std::string> labels;
  labels.reserve(data.size());
  for (const auto& p : data.points) labels.push_back(format_number(p.x[column]));
  return labels;
}

/// Family over the points of `data`, from an explicit manifest or a
/// generator description. When `calib` is given the family is bound to it.
RegionFamily load_family(Run& run, const std::string& path, const Dataset& data,
                         const Dataset* calib) {
  if (path.empty()) throw UsageError("--family is required");
  record_input(run, "family", path);
  const nlohmann::json desc = read_json(path);
  RegionFamily family;
  try {
    const std::string kind = desc.value("kind", "explicit");
    if (desc.contains("regions")) {
      family = family_from_json(desc);
    } else if (kind == "intervals") {
      const std::size_t n = desc.value("universe_size", data.size());
      family = interval_family(n, desc.value("min_size", std::size_t{1}),
                               desc.value("max_size", n));
      if (desc.contains("vc_dim")) family = family.with_vc_dim(desc.at("vc_dim").get<std::size_t>());
    } else if (kind == "balls") {
      family = ball_family(data.features(), desc.at("max_card").get<std::size_t>());
      if (calib) family = bind_calibration(family, calib->features());
    } else if (kind == "partition") {
      const std::size_t column = feature_column(desc, data);
      const auto labels = feature_labels(data, column);
      family = partition_family(labels);
      if (calib) {
        if (column >= calib->dim()) throw PreconditionError("family: calibration lacks the feature");
        family = bind_partition_calibration(family, feature_labels(*calib, column));
      }
    } else {
      throw ParseError("family manifest '" + path + "': kind '" + kind +
                       "' needs an explicit 'regions' list");
    }
  } catch (const nlohmann::json::exception& e) {
    throw ParseError("family manifest '" + path + "': " + e.what());
  }
  if (family.universe_size() != data.size()) {
    throw PreconditionError("family manifest '" + path + "' covers " +
                            std::to_string(family.universe_size()) + " points but the data has " +
                            std::to_string(data.size()));
  }
  if (calib && !family.calibration_bound()) {
    if (family.kind() == FamilyKind::kBalls && !family.generated()) {
      family = bind_calibration(family, calib->features());
    } else {
      throw PreconditionError("family manifest '" + path +
                              "' has no calibration assignments (add calib_indices, or use a "
                              "balls/partition generator)");
    }
  }
  return family;
}

std::string dump(const ojson& j) { return j.dump(2) + "\n"; }
std::string dump(const nlohmann::json& j) { return j.dump(2) + "\n"; }

std::string estimate_csv(std::span<const double> v, const char* column) {
  std::string out = std::string("index,") + column + "\n";
  for (std::size_t i = 0; i < v.size(); ++i) out += std::to_string(i) + ',' + format_number(v[i]) + '\n';
  return out;
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw ParseError("cannot write '" + path.string() + "'");
  f << text;
  if (!f) throw ParseError("cannot write '" + path.string() + "'");
}

void write_run(const Run& run, const std::string& out_dir, std::ostream& out) {
  if (out_dir.empty()) throw UsageError("--out is required");
  const fs::path dir(out_dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw ParseError("cannot create '" + dir.string() + "': " + ec.message());
  write_file(dir / "result.json", run.result);
  write_file(dir / "table.csv", run.table);
  ojson manifest;
  manifest["subcommand"] = run.subcommand;
  manifest["version"] = SUBPOP_VERSION;
  manifest["seed"] = run.seed;
  manifest["config"] = run.config;
  manifest["inputs"] = run.inputs;
  manifest["outputs"] = {{"result.json", sha256_hex(run.result)},
                         {"table.csv", sha256_hex(run.table)}};
  write_file(dir / "manifest.json", dump(manifest));
  out << run.subcommand << ": wrote " << (dir / "result.json").string() << ", "
      << (dir / "table.csv").string() << ", " << (dir / "manifest.json").string() << "\n";
}

// ---------------------------------------------------------------------------
// subcommands

struct DataOpts {
  std::string calib;
  std::string test;
  std::string linear_coef;
};

void add_data_opts(CLI::App* sub, DataOpts& d) {
  sub->add_option("--calib", d.calib, "Calibration dataset (CSV or JSON)");
  sub->add_option("--test", d.test, "Test dataset (CSV or JSON)");
  sub->add_option("--linear-coef", d.linear_coef,
                  "Predictor b0,b1,...,bp used when a file has no score column");
}

void add_common(CLI::App* sub, Common& c, bool threads) {
  sub->add_option("--out", c.out, "Output directory (required)");
  sub->add_option("--seed", c.seed,
                  std::string("RNG seed (default: $") + kSeedEnv + ", else 0)");
  if (threads) sub->add_option("--threads", c.threads, "Worker threads (default: all cores)");
}

struct PValueOpts {
  DataOpts data;
  Common common;
};

Run run_pvalues(const PValueOpts& o) {
  Run run;
  run.subcommand = "pvalues";
  run.seed = resolve_seed(o.common.seed);
  const auto predict = parse_predictor(o.data.linear_coef);
  const Dataset calib = load_input(run, "calib", o.data.calib, Role::kCalibration);
  const Dataset test = load_input(run, "test", o.data.test, Role::kTest);
  const PValueTable table =
      compute_pvalue_table(scores_of(calib, predict), scores_of(test, predict), run.seed);
  run.config = {{"calib", o.data.calib}, {"test", o.data.test}, {"linear-coef", o.data.linear_coef}};
  run.result = dump(to_json(table));
  run.table = to_csv(table);
  return run;
}

struct DetectOpts {
  DataOpts data;
  Common common;
  std::string family;
  double alpha = 0.1;
  std::string disjoint = "auto";
};

Run run_detect(const DetectOpts& o) {
  Run run;
  run.subcommand = "detect";
  run.seed = resolve_seed(o.common.seed);
  if (!(o.alpha > 0.0 && o.alpha < 1.0)) throw UsageError("--alpha must lie in (0, 1)");
  const auto predict = parse_predictor(o.data.linear_coef);
  const Dataset calib = load_input(run, "calib", o.data.calib, Role::kCalibration);
  const Dataset test = load_input(run, "test", o.data.test, Role::kTest);
  const RegionFamily family = load_family(run, o.family, test, &calib);
  bool disjoint = family.disjoint();
  if (o.disjoint == "true") disjoint = true;
  else if (o.disjoint == "false") disjoint = false;
  const DetectionReport report = detect_regions(scores_of(calib, predict), scores_of(test, predict),
                                                family, o.alpha, disjoint, run.seed);
  run.config = {{"calib", o.data.calib},     {"test", o.data.test},
                {"linear-coef", o.data.linear_coef}, {"family", o.family},
                {"alpha", o.alpha},          {"disjoint", o.disjoint}};
  nlohmann::json result = to_json(report);
  result["disjoint_mode"] = disjoint;
  run.result = dump(result);
  run.table = to_csv(report);
  return run;
}

struct ScanOpts {
  std::string family;
  double sigma = 1.0;
  bool sigma_mad = false;
  double penalty_C = 1.0;
  std::size_t max_card = 0;
  bool unpenalized = false;
};

void add_scan_opts(CLI::App* sub, ScanOpts& s) {
  sub->add_option("--family", s.family, "Region family manifest (JSON)");
  sub->add_option("--sigma", s.sigma, "Noise level of the scores (default 1)");
  sub->add_flag("--sigma-mad", s.sigma_mad, "Estimate sigma as 1.4826 * median |value|");
  sub->add_option("--penalty-C", s.penalty_C, "Size penalty constant C (default 1)");
  sub->add_option("--max-card", s.max_card, "Skip regions with more members (0: no cap)");
  sub->add_flag("--unpenalized", s.unpenalized, "Drop the size penalty");
}

ScanConfig scan_config(const ScanOpts& s, std::span<const double> values, std::size_t threads) {
  ScanConfig cfg;
  cfg.size_penalty_C = s.penalty_C;
  cfg.sigma = s.sigma;
  if (s.sigma_mad) {
    std::vector<double> finite;
    for (double v : values) {
      if (std::isfinite(v)) finite.push_back(v);
    }
    cfg.sigma = mad_sigma(finite);
  }
  if (s.max_card > 0) cfg.max_card = s.max_card;
  cfg.penalized = !s.unpenalized;
  cfg.threads = threads;
  return cfg;
}

void put_scan_config(ojson& config, const ScanOpts& s, std::size_t threads) {
  config["family"] = s.family;
  config["sigma"] = s.sigma;
  config["sigma-mad"] = s.sigma_mad;
  config["penalty-C"] = s.penalty_C;
  config["max-card"] = s.max_card;
  config["unpenalized"] = s.unpenalized;
  config["threads"] = threads;
}

struct IdentifyOpts {
  DataOpts data;
  Common common;
  ScanOpts scan;
};

Run run_identify(const IdentifyOpts& o) {
  Run run;
  run.subcommand = "identify";
  run.seed = resolve_seed(o.common.seed);
  const std::size_t threads = resolve_threads(o.common.threads);
  const auto predict = parse_predictor(o.data.linear_coef);
  const Dataset calib = load_input(run, "calib", o.data.calib, Role::kCalibration);
  const Dataset test = load_input(run, "test", o.data.test, Role::kTest);
  const RegionFamily family = load_family(run, o.scan.family, test, nullptr);
  const PValueTable table =
      compute_pvalue_table(scores_of(calib, predict), scores_of(test, predict), run.seed);
  const std::vector<double> z = table.zscores();
  const ScanConfig cfg = scan_config(o.scan, z, threads);
  const ScanResult result = scan(z, family, cfg);

  run.config = {{"calib", o.data.calib}, {"test", o.data.test}, {"linear-coef", o.data.linear_coef}};
  put_scan_config(run.config, o.scan, threads);
  nlohmann::json j = to_json(result);
  j["sigma_used"] = cfg.sigma;
  run.result = dump(j);
  run.table = scan_table_csv(scan_table(z, family, cfg));
  return run;
}

struct RefitOpts {
  Common common;
  ScanOpts scan;
  std::string strategy = "two-step";
  std::string data;
  std::string linear_coef;
  std::string predictions;
};

Run run_refit(const RefitOpts& o) {
  Run run;
  run.subcommand = "refit";
  run.seed = resolve_seed(o.common.seed);
  const std::size_t threads = resolve_threads(o.common.threads);
  run.config = {{"strategy", o.strategy}};

  if (o.strategy == "average" || o.strategy == "stack") {
    const Dataset preds = load_input(run, "predictions", o.predictions, Role::kTest);
    run.config["predictions"] = o.predictions;
    const auto cols = preds.features();
    if (preds.dim() == 0) throw PreconditionError("'" + o.predictions + "' has no model columns");
    Eigen::MatrixXd U(static_cast<Eigen::Index>(preds.size()),
                      static_cast<Eigen::Index>(preds.dim()));
    for (std::size_t i = 0; i < cols.size(); ++i) {
      for (std::size_t j = 0; j < preds.dim(); ++j) {
        U(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = cols[i][j];
      }
    }
    nlohmann::json j;
    j["strategy"] = o.strategy;
    j["models"] = preds.feature_names;
    std::vector<double> combined;
    if (o.strategy == "average") {
      combined = average_predictions(U);
    } else {
      std::vector<double> y;
      for (std::size_t i = 0; i < preds.size(); ++i) {
        const auto& label = preds.points[i].label;
        if (!label || !std::holds_alternative<double>(*label)) {
          throw PreconditionError("'" + o.predictions + "' row " + std::to_string(i + 1) +
                                  ": stacking needs a numeric y column");
        }
        y.push_back(std::get<double>(*label));
      }
      const StackWeights w = stack_weights(U, y);
      const nlohmann::json fitted = to_json(w);
      for (const auto& [key, value] : fitted.items()) j[key] = value;
      const Eigen::VectorXd fit = U * w.w;
      combined.assign(fit.data(), fit.data() + fit.size());
    }
    run.result = dump(j);
    run.table = estimate_csv(combined, "prediction");
    return run;
  }

  DfModel model = DfModel::kConstantOne;
  if (o.strategy == "sure-card") model = DfModel::kCardinality;
  else if (o.strategy != "two-step" && o.strategy != "sure-const") {
    throw UsageError("--strategy must be two-step, sure-const, sure-card, average or stack");
  }
  const auto predict = parse_predictor(o.linear_coef);
  const Dataset data = load_input(run, "data", o.data, Role::kTest);
  const RegionFamily family = load_family(run, o.scan.family, data, nullptr);
  std::vector<double> y;
  for (std::size_t i = 0; i < data.size(); ++i) {
    const auto& p = data.points[i];
    if (!p.label || !std::holds_alternative<double>(*p.label)) {
      throw PreconditionError("'" + o.data + "' row " + std::to_string(i + 1) +
                              ": refitting needs a numeric y column");
    }
    const double v = std::get<double>(*p.label);
    y.push_back(predict ? v - (*predict)(p.x) : v);
  }
  run.config["data"] = o.data;
  run.config["linear-coef"] = o.linear_coef;
  put_scan_config(run.config, o.scan, threads);
  const ScanConfig cfg = scan_config(o.scan, y, threads);
  if (o.strategy == "two-step") {
    const RefitEstimate est = refit_two_step(y, family, cfg);
    nlohmann::json j = to_json(est);
    j["sigma_used"] = cfg.sigma;
    run.result = dump(j);
    run.table = estimate_csv(est.vector_form(), "estimate");
  } else {
    const SureFit fit = sure_mle(y, family, cfg.sigma, model);
    nlohmann::json j = to_json(fit);
    j["sigma_used"] = cfg.sigma;
    run.result = dump(j);
    run.table = estimate_csv(fit.estimate, "estimate");
  }
  return run;
}

struct SimulateOpts {
  Common common;
  std::string config;
};

Run run_simulate(const SimulateOpts& o) {
  Run run;
  run.subcommand = "simulate";
  if (o.config.empty()) throw UsageError("--config is required");
  record_input(run, "config", o.config);
  SweepConfig cfg = load_sweep_config(o.config);
  std::optional<std::uint64_t> seed = o.common.seed;
  if (!seed) {
    nlohmann::json raw;
    if (fs::path(o.config).extension() == ".json") raw = read_json(o.config);
    if (raw.is_object() && raw.contains("seed")) seed = raw.at("seed").get<std::uint64_t>();
  }
  run.seed = resolve_seed(seed);
  if (o.common.threads > 0) cfg.threads = o.common.threads;
  const SweepReport report = run_sweep(cfg, run.seed);
  run.config = {{"config", o.config}, {"threads", cfg.threads}};
  run.result = dump(sweep_summary_json(report));
  run.table = sweep_csv(report);
  return run;
}

// ---------------------------------------------------------------------------
// replay

std::vector<std::string> replay_args(const nlohmann::json& manifest, const std::string& out) {
  std::vector<std::string> args{manifest.at("subcommand").get<std::string>()};
  for (const auto& [key, value] : manifest.at("config").items()) {
    if (value.is_boolean()) {
      if (value.get<bool>()) args.push_back("--" + key);
    } else if (value.is_string()) {
      if (value.get<std::string>().empty()) continue;
      args.push_back("--" + key);
      args.push_back(value.get<std::string>());
    } else if (!value.is_null()) {
      args.push_back("--" + key);
      args.push_back(value.dump());
    }
  }
  args.push_back("--seed");
  args.push_back(std::to_string(manifest.at("seed").get<std::uint64_t>()));
  args.push_back("--out");
  args.push_back(out);
  return args;
}

int run_replay(const std::string& manifest_path, const std::string& out_dir, std::ostream& out,
               std::ostream& err) {
  const nlohmann::json manifest = read_json(manifest_path);
  try {
    for (const auto& input : manifest.at("inputs")) {
      const auto path = input.at("path").get<std::string>();
      const auto expected = input.at("sha256").get<std::string>();
      if (sha256_file(path) != expected) {
        err << "replay: input '" << path << "' changed since the run (sha256 differs)\n";
        return 1;
      }
    }
    const std::vector<std::string> args = replay_args(manifest, out_dir);
    std::ostringstream sink;
    const int code = dispatch(args, sink, err);
    if (code != 0) return code;
    bool same = true;
    for (const auto& [name, digest] : manifest.at("outputs").items()) {
      const std::string now = sha256_file(fs::path(out_dir) / name);
      if (now != digest.get<std::string>()) {
        err << "replay: " << name << " differs from the recorded output\n";
        same = false;
      }
    }
    if (!same) return 1;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError("manifest '" + manifest_path + "': " + e.what());
  }
  out << "replay: outputs match " << manifest_path << "\n";
  return 0;
}

}  // namespace

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Subpopulation monitoring for deployed predictive models", "subpop"};
  app.set_version_flag("--version", SUBPOP_VERSION);
  app.require_subcommand(1, 1);

  PValueOpts pv;
  auto* pvalues = app.add_subcommand("pvalues", "Conformal p-values for every test point");
  add_data_opts(pvalues, pv.data);
  add_common(pvalues, pv.common, false);

  DetectOpts det;
  auto* detect = app.add_subcommand("detect", "FDR-controlled detection of degraded regions");
  add_data_opts(detect, det.data);
  detect->add_option("--family", det.family, "Region family manifest (JSON)");
  detect->add_option("--alpha", det.alpha, "Target false discovery rate (default 0.1)");
  detect->add_option("--disjoint", det.disjoint, "Step-up thresholds: auto|true|false")
      ->check(CLI::IsMember({"auto", "true", "false"}));
  add_common(detect, det.common, false);

  IdentifyOpts idn;
  auto* identify = app.add_subcommand("identify", "Penalized multi-scale scan for the worst region");
  add_data_opts(identify, idn.data);
  add_scan_opts(identify, idn.scan);
  add_common(identify, idn.common, true);

  RefitOpts ref;
  auto* refit = app.add_subcommand("refit", "Refit a piecewise-constant correction or combine models");
  refit->add_option("--strategy", ref.strategy, "two-step|sure-const|sure-card|average|stack")
      ->check(CLI::IsMember({"two-step", "sure-const", "sure-card", "average", "stack"}));
  refit->add_option("--data", ref.data, "Dataset whose y column holds the observations");
  refit->add_option("--linear-coef", ref.linear_coef, "Predictor b0,b1,...; y becomes y - f(x)");
  refit->add_option("--predictions", ref.predictions,
                    "Model predictions, one column per model, y column for stacking");
  add_scan_opts(refit, ref.scan);
  add_common(refit, ref.common, true);

  SimulateOpts sim;
  auto* simulate = app.add_subcommand("simulate", "Gaussian-sequence simulation sweep");
  simulate->add_option("--config", sim.config, "Sweep configuration (.toml or .json)");
  add_common(simulate, sim.common, true);

  std::string manifest_path;
  std::string replay_out;
  auto* replay = app.add_subcommand("replay", "Re-run a manifest and compare outputs");
  replay->add_option("--manifest", manifest_path, "manifest.json of an earlier run")->required();
  replay->add_option("--out", replay_out, "Directory for the replayed outputs")->required();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n";
    const auto parsed = app.get_subcommands();
    err << (parsed.empty() ? app.help() : parsed.front()->help());
    return 2;
  }

  try {
    const Common* active = *pvalues    ? &pv.common
                           : *detect   ? &det.common
                           : *identify ? &idn.common
                           : *refit    ? &ref.common
                           : *simulate ? &sim.common
                                       : nullptr;
    if (active && active->out.empty()) throw UsageError("--out is required");
    Run run;
    std::string out_dir;
    if (*pvalues) {
      run = run_pvalues(pv);
      out_dir = pv.common.out;
    } else if (*detect) {
      run = run_detect(det);
      out_dir = det.common.out;
    } else if (*identify) {
      run = run_identify(idn);
      out_dir = idn.common.out;
    } else if (*refit) {
      run = run_refit(ref);
      out_dir = ref.common.out;
    } else if (*simulate) {
      run = run_simulate(sim);
      out_dir = sim.common.out;
    } else {
      return run_replay(manifest_path, replay_out, out, err);
    }
    write_run(run, out_dir, out);
    return 0;
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace subpop::cli
