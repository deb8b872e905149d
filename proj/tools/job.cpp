#include "job.hpp"

#include <chrono>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "rvflx/data.hpp"
#include "rvflx/report.hpp"
#include "rvflx/serialization.hpp"
#include "rvflx/stats.hpp"
#include "rvflx/transforms.hpp"

namespace rvflx::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr const char* kBundleSchema = "rvflx.bundle/1";
constexpr const char* kTimingSchema = "rvflx.timing/1";
constexpr const char* kAblationSchema = "rvflx.ablation/1";
constexpr const char* kSensitivitySchema = "rvflx.sensitivity/1";
constexpr const char* kPredictionSchema = "rvflx.predictions/1";

// Thrown for anything the user can fix by changing the command line.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

std::string hex16(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

fs::path prepare_out_dir(const JobConfig& config) {
  if (config.out.empty()) throw ConfigError("--out is required");
  const fs::path dir(config.out);
  if (fs::exists(dir)) {
    if (!fs::is_directory(dir)) throw ConfigError(dir.string() + " exists and is not a directory");
    if (!fs::is_empty(dir) && !config.force)
      throw ConfigError(dir.string() + " is not empty; pass --force to overwrite");
  }
  fs::create_directories(dir);
  return dir;
}

void write_config(const fs::path& dir, const JobConfig& config) {
  json j = to_json(config);
  j["config_hash"] = config_hash(config);
  write_json_file(dir / "config.json", j);
}

const std::string& single_input(const JobConfig& config, const char* what) {
  if (config.inputs.size() != 1) throw ConfigError(std::string(config.command) + " takes exactly one " + what);
  return config.inputs.front();
}

ModelKind single_model(const JobConfig& config) {
  if (config.models.size() != 1) throw ConfigError(config.command + " takes exactly one --models entry");
  return config.models.front();
}

Dataset load_one(const std::string& path) {
  if (fs::is_directory(path)) throw ConfigError(path + " is a directory; pass a CSV file");
  return load_csv(path);
}

// Datasets named on the command line: CSV files, or directories resolved
// through discover_datasets.
std::vector<DatasetEntry> resolve_datasets(const JobConfig& config) {
  std::vector<DatasetEntry> entries;
  for (const auto& input : config.inputs) {
    const fs::path p(input);
    if (fs::is_directory(p)) {
      for (auto& e : discover_datasets(p)) entries.push_back(std::move(e));
    } else if (fs::exists(p)) {
      entries.push_back({p, p.stem().string(), {}});
    } else {
      throw ConfigError("no such dataset: " + input);
    }
  }
  if (entries.empty()) throw ConfigError("no datasets found");
  return entries;
}

FoldPlan plan_for(const Dataset& ds, const JobConfig& config) {
  return stratified_kfold(ds, config.folds, mix_seed(config.seed, fnv1a(ds.name)));
}

HyperParams tuned_or_given(const Dataset& ds, ModelKind kind, const JobConfig& config, const FoldPlan& plan,
                           const Logger& log) {
  if (!config.tune) return config.hp;
  RunOptions opts;
  opts.base_seed = config.seed;
  opts.jobs = config.jobs;
  opts.log = log;
  const RunResult r = run_grid(ds, kind, config.grid, plan, opts);
  log("tuned " + ds.name + "/" + to_string(kind) + ": " + rvflx::to_json(r.best).dump() + " mean " +
      format_fixed(r.mean_accuracy, 4));
  return r.best;
}

std::string join(const std::vector<double>& values) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) out += (i ? ";" : "") + format_exact(values[i]);
  return out;
}

int cmd_convert(const JobConfig& config, const Logger& log) {
  const std::string& input = single_input(config, "input CSV");
  const Dataset ds = load_one(input);
  const fs::path dir = prepare_out_dir(config);
  FittedTransform t;
  if (config.method == TransformMethod::natural) {
    t = fit_natural(ds.features);
  } else {
    Rng rng(config.seed);
    t = fit_autoencoder(ds.features, config.hp.c, config.hp.varpi, rng);
  }
  const ComplexMatrix zx = apply_transform(t, ds.features);

  std::ostringstream csv;
  for (Eigen::Index j = 0; j < zx.cols(); ++j) csv << "re_" << j + 1 << ',';
  for (Eigen::Index j = 0; j < zx.cols(); ++j) csv << "im_" << j + 1 << ',';
  csv << "label\n";
  for (Eigen::Index i = 0; i < zx.rows(); ++i) {
    for (Eigen::Index j = 0; j < zx.cols(); ++j) csv << format_exact(zx(i, j).real()) << ',';
    for (Eigen::Index j = 0; j < zx.cols(); ++j) csv << format_exact(zx(i, j).imag()) << ',';
    csv << ds.class_names[static_cast<std::size_t>(ds.labels[static_cast<std::size_t>(i)])] << '\n';
  }
  write_text(dir / (ds.name + "_complex.csv"), csv.str());
  json sidecar = rvflx::to_json(t);
  sidecar["seed"] = config.seed;
  sidecar["config_hash"] = config_hash(config);
  write_json_file(dir / (ds.name + "_transform.json"), sidecar);
  write_config(dir, config);
  log("converted " + ds.name + " (" + to_string(t.method) + ") into " + dir.string());
  return kOk;
}

int cmd_train(const JobConfig& config, const Logger& log) {
  const Dataset ds = load_one(single_input(config, "input CSV"));
  const ModelKind kind = single_model(config);
  const fs::path dir = prepare_out_dir(config);
  const Standardizer scaler = Standardizer::fit(ds.features);
  const RealMatrix z = scaler.apply(ds.features);
  const FittedModel model = train(kind, config.hp, z, ds.targets_onehot, ds.class_names);
  const Prediction pred = predict(model, z);
  std::size_t correct = 0;
  for (std::size_t i = 0; i < pred.labels.size(); ++i) correct += pred.labels[i] == ds.labels[i];
  json bundle{{"schema", kBundleSchema},
              {"seed", config.seed},
              {"config_hash", config_hash(config)},
              {"standardizer",
               {{"mean", rvflx::to_json(RealMatrix(scaler.mean))}, {"stddev", rvflx::to_json(RealMatrix(scaler.stddev))}}},
              {"model", rvflx::to_json(model)}};
  write_json_file(dir / "model.json", bundle);
  write_config(dir, config);
  log("trained " + to_string(kind) + " on " + ds.name + ": training accuracy " +
      format_fixed(100.0 * static_cast<double>(correct) / static_cast<double>(pred.labels.size()), 4));
  return kOk;
}

int cmd_predict(const JobConfig& config, const Logger& log) {
  if (config.inputs.size() != 2) throw ConfigError("predict takes a model bundle and an input CSV");
  const json bundle = read_json_file(config.inputs[0]);
  if (bundle.value("schema", "") != kBundleSchema) throw ConfigError(config.inputs[0] + " is not a model bundle");
  Standardizer scaler;
  scaler.mean = real_matrix_from_json(bundle.at("standardizer").at("mean"));
  scaler.stddev = real_matrix_from_json(bundle.at("standardizer").at("stddev"));
  const FittedModel model = model_from_json(bundle.at("model"));
  CsvOptions opts;
  opts.min_classes = 1;
  const Dataset ds = load_csv(config.inputs[1], opts);
  const fs::path dir = prepare_out_dir(config);
  const Prediction pred = predict(model, scaler.apply(ds.features));

  std::ostringstream csv;
  csv << "row,actual,predicted\n";
  std::size_t correct = 0;
  for (std::size_t i = 0; i < pred.labels.size(); ++i) {
    const std::string& actual = ds.class_names[static_cast<std::size_t>(ds.labels[i])];
    const std::string& predicted = model.class_names[static_cast<std::size_t>(pred.labels[i])];
    correct += actual == predicted;
    csv << i << ',' << actual << ',' << predicted << '\n';
  }
  write_text(dir / "predictions.csv", csv.str());
  const double acc = 100.0 * static_cast<double>(correct) / static_cast<double>(pred.labels.size());
  write_json_file(dir / "predictions.json", {{"schema", kPredictionSchema},
                                              {"config_hash", config_hash(config)},
                                              {"rows", pred.labels.size()},
                                              {"accuracy", acc}});
  write_config(dir, config);
  log("predicted " + std::to_string(pred.labels.size()) + " rows; accuracy against file labels " + format_fixed(acc, 4));
  return kOk;
}

int cmd_benchmark(const JobConfig& config, const Logger& log) {
  const auto entries = resolve_datasets(config);
  const fs::path dir = prepare_out_dir(config);
  write_config(dir, config);

  RunOptions opts;
  opts.base_seed = config.seed;
  opts.jobs = config.jobs;
  opts.log = log;
  std::vector<RunResult> results;
  json failures = json::array();
  json timing = json::array();
  const auto started = std::chrono::steady_clock::now();
  for (const auto& entry : entries) {
    Dataset ds;
    FoldPlan plan;
    try {
      ds = load_csv(entry.path, entry.options);
      ds.name = entry.name;
      plan = plan_for(ds, config);
    } catch (const std::exception& e) {
      log("dataset " + entry.name + " skipped: " + e.what());
      failures.push_back({{"dataset", entry.name}, {"model", nullptr}, {"error", e.what()}});
      continue;
    }
    for (ModelKind kind : config.models) {
      try {
        RunResult r = run_grid(ds, kind, config.grid, plan, opts);
        log(ds.name + "/" + to_string(kind) + ": " + format_fixed(r.mean_accuracy, 4) + " +- " +
            format_fixed(r.std_accuracy, 4) + " in " + format_fixed(r.wall_seconds, 1) + " s");
        timing.push_back({{"dataset", ds.name}, {"model", to_string(kind)}, {"wall_seconds", r.wall_seconds}});
        results.push_back(std::move(r));
      } catch (const std::exception& e) {
        log(ds.name + "/" + to_string(kind) + " failed: " + e.what());
        failures.push_back({{"dataset", ds.name}, {"model", to_string(kind)}, {"error", e.what()}});
      }
    }
  }

  ResultsMetadata meta;
  meta.seed = config.seed;
  meta.config_hash = config_hash(config);
  meta.folds = config.folds;
  write_text(dir / "results.csv", results_csv(results, meta));
  json payload = results_json(results, meta);
  payload["failures"] = failures;
  write_json_file(dir / "results.json", payload);
  write_json_file(dir / "timing.json",
                  {{"schema", kTimingSchema},
                   {"runs", timing},
                   {"total_seconds",
                    std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count()}});
  return failures.empty() ? kOk : kPartialFailure;
}

int cmd_sensitivity(const JobConfig& config, const Logger& log) {
  Dataset ds = load_one(single_input(config, "input CSV"));
  const ModelKind kind = single_model(config);
  if (!is_complex(kind)) throw ConfigError("sensitivity needs rvflx_n or rvflx_auto");
  const fs::path dir = prepare_out_dir(config);
  const FoldPlan plan = plan_for(ds, config);
  const HyperParams hp = tuned_or_given(ds, kind, config, plan, log);
  RunOptions opts;
  opts.jobs = config.jobs;
  const auto rows = run_sensitivity_alpha(ds, kind, hp, config.alphas, plan, opts);

  std::ostringstream csv;
  csv << "schema,dataset,model,alpha,mean_accuracy,std_accuracy,fold_accuracies,config_hash\n";
  json out = json::array();
  for (const auto& row : rows) {
    csv << kSensitivitySchema << ',' << ds.name << ',' << to_string(kind) << ',' << format_exact(row.alpha) << ','
        << format_fixed(row.score.mean) << ',' << format_fixed(row.score.stddev) << ','
        << join(row.score.fold_accuracies) << ',' << config_hash(config) << '\n';
    out.push_back({{"alpha", row.alpha},
                   {"mean_accuracy", row.score.mean},
                   {"std_accuracy", row.score.stddev},
                   {"fold_accuracies", row.score.fold_accuracies}});
  }
  write_text(dir / "sensitivity.csv", csv.str());
  write_json_file(dir / "sensitivity.json", {{"schema", kSensitivitySchema},
                                             {"seed", config.seed},
                                             {"config_hash", config_hash(config)},
                                             {"dataset", ds.name},
                                             {"model", to_string(kind)},
                                             {"hyperparams", rvflx::to_json(hp)},
                                             {"rows", out}});
  write_config(dir, config);
  return kOk;
}

int cmd_ablate(const JobConfig& config, const Logger& log) {
  Dataset ds = load_one(single_input(config, "input CSV"));
  const ModelKind kind = single_model(config);
  if (!is_complex(kind)) throw ConfigError("ablate needs rvflx_n or rvflx_auto");
  const fs::path dir = prepare_out_dir(config);
  const FoldPlan plan = plan_for(ds, config);
  const HyperParams hp = tuned_or_given(ds, kind, config, plan, log);
  RunOptions opts;
  opts.jobs = config.jobs;
  const auto rows = run_ablation(ds, kind, hp, plan, opts);

  std::ostringstream csv;
  csv << "schema,dataset,model,variant,mean_accuracy,std_accuracy,fold_accuracies,config_hash\n";
  json out = json::array();
  for (const auto& row : rows) {
    csv << kAblationSchema << ',' << ds.name << ',' << to_string(kind) << ',' << row.variant << ','
        << format_fixed(row.score.mean) << ',' << format_fixed(row.score.stddev) << ','
        << join(row.score.fold_accuracies) << ',' << config_hash(config) << '\n';
    out.push_back({{"variant", row.variant},
                   {"hyperparams", rvflx::to_json(row.hp)},
                   {"mean_accuracy", row.score.mean},
                   {"std_accuracy", row.score.stddev},
                   {"fold_accuracies", row.score.fold_accuracies}});
    log(row.variant + ": " + format_fixed(row.score.mean, 4));
  }
  write_text(dir / "ablation.csv", csv.str());
  write_json_file(dir / "ablation.json", {{"schema", kAblationSchema},
                                          {"seed", config.seed},
                                          {"config_hash", config_hash(config)},
                                          {"dataset", ds.name},
                                          {"model", to_string(kind)},
                                          {"rows", out}});
  write_config(dir, config);
  return kOk;
}

int cmd_stats(const JobConfig& config, const Logger& log) {
  const AccuracyTable table = read_results_csv(single_input(config, "results CSV"));
  const StatsReport report = build_stats_report(table, config.alpha_level);
  const std::string text = stats_text(report);
  if (!config.out.empty()) {
    const fs::path dir = prepare_out_dir(config);
    write_text(dir / "stats.txt", text);
    write_json_file(dir / "stats.json", stats_json(report));
    write_config(dir, config);
  }
  std::fputs(text.c_str(), stdout);
  (void)log;
  return kOk;
}

}  // namespace

json to_json(const JobConfig& config) {
  json models = json::array();
  for (ModelKind m : config.models) models.push_back(to_string(m));
  json j{{"schema", kConfigSchema},
         {"command", config.command},
         {"inputs", config.inputs},
         {"models", models},
         {"grid", rvflx::to_json(config.grid)},
         {"seed", config.seed},
         {"folds", config.folds},
         {"alpha_level", config.alpha_level},
         {"hyperparams", rvflx::to_json(config.hp)},
         {"tune", config.tune},
         {"alphas", config.alphas},
         {"method", to_string(config.method)},
         {"out", config.out},
         {"jobs", config.jobs},
         {"force", config.force}};
  j["grid_file"] = config.grid_file ? json(*config.grid_file) : json(nullptr);
  return j;
}

JobConfig job_config_from_json(const json& j) {
  if (j.value("schema", std::string(kConfigSchema)) != kConfigSchema)
    throw ArgumentError("unsupported config schema " + j.value("schema", std::string()));
  JobConfig c;
  c.command = j.value("command", c.command);
  c.inputs = j.value("inputs", c.inputs);
  if (j.contains("models")) {
    c.models.clear();
    for (const auto& m : j.at("models")) c.models.push_back(parse_model_kind(m.get<std::string>()));
  }
  if (j.contains("grid_file") && !j.at("grid_file").is_null()) c.grid_file = j.at("grid_file").get<std::string>();
  if (j.contains("grid")) c.grid = grid_from_json(j.at("grid"));
  c.seed = j.value("seed", c.seed);
  c.folds = j.value("folds", c.folds);
  c.alpha_level = j.value("alpha_level", c.alpha_level);
  if (j.contains("hyperparams")) c.hp = hyperparams_from_json(j.at("hyperparams"));
  c.tune = j.value("tune", c.tune);
  c.alphas = j.value("alphas", c.alphas);
  if (j.contains("method")) c.method = parse_transform_method(j.at("method").get<std::string>());
  c.out = j.value("out", c.out);
  c.jobs = j.value("jobs", c.jobs);
  c.force = j.value("force", c.force);
  return c;
}

std::string config_hash(const JobConfig& config) {
  json j = to_json(config);
  j.erase("out");
  j.erase("jobs");
  j.erase("force");
  return hex16(fnv1a(j.dump()));
}

int run_command(const JobConfig& config, const Logger& log) {
  try {
    config.grid.validate();
    if (config.folds < 2) throw ConfigError("--folds must be at least 2");
    if (config.command == "convert") return cmd_convert(config, log);
    if (config.command == "train") return cmd_train(config, log);
    if (config.command == "predict") return cmd_predict(config, log);
    if (config.command == "benchmark") return cmd_benchmark(config, log);
    if (config.command == "sensitivity") return cmd_sensitivity(config, log);
    if (config.command == "ablate") return cmd_ablate(config, log);
    if (config.command == "stats") return cmd_stats(config, log);
    throw ConfigError("unknown command '" + config.command + "'");
  } catch (const ConfigError& e) {
    log(std::string("error: ") + e.what());
  } catch (const ArgumentError& e) {
    log(std::string("error: ") + e.what());
  } catch (const DataError& e) {
    log(std::string("error: ") + e.what());
  } catch (const nlohmann::json::exception& e) {
    log(std::string("error: malformed JSON: ") + e.what());
  } catch (const std::exception& e) {
    log(std::string("error: ") + e.what());
    return kPartialFailure;
  }
  return kConfigError;
}

}  // namespace rvflx::cli
