#include <cstdio>
#include <iostream>
#include <string>

#if defined(__GLIBC__)
#include <malloc.h>
#endif

#include <CLI11.hpp>

#include "job.hpp"
#include "rvflx/serialization.hpp"

namespace {

using rvflx::cli::JobConfig;

struct Flags {
  std::string config_file;
  std::vector<std::string> inputs;
  std::vector<std::string> models;
  std::string grid_file;
  std::uint64_t seed = 0;
  std::size_t folds = 5;
  double alpha_level = 0.05;
  std::string out;
  std::size_t jobs = 1;
  bool force = false;
  bool quiet = false;
  double c = 1.0;
  int n_hidden = 103;
  std::string activation = "relu";
  double alpha = 0.0;
  int varpi = 1;
  bool no_direct_link = false;
  bool tune = false;
  std::vector<double> alphas;
  std::string method = "natural";
};

}  // namespace

int main(int argc, char** argv) {
#if defined(__GLIBC__)
  // Training allocates and frees many same-sized matrices; keep them in the heap.
  mallopt(M_MMAP_THRESHOLD, 256 << 20);
  mallopt(M_TRIM_THRESHOLD, 512 << 20);
#endif
  CLI::App app{"Complex-valued random vector functional link networks"};
  app.require_subcommand(1);
  Flags f;

  const auto common = [&](CLI::App* sub) {
    sub->add_option("--config", f.config_file, "Start from a saved config.json")->check(CLI::ExistingFile);
    sub->add_option("--seed", f.seed, "Base random seed")->envname("RVFLX_SEED");
    sub->add_option("--out", f.out, "Output directory")->envname("RVFLX_OUT");
    sub->add_flag("--force", f.force, "Overwrite a non-empty output directory")->envname("RVFLX_FORCE");
    sub->add_option("--jobs", f.jobs, "Worker threads (results do not depend on it)")
        ->envname("RVFLX_JOBS")
        ->check(CLI::PositiveNumber);
    sub->add_flag("-q,--quiet", f.quiet, "Only report errors");
  };
  const auto hyper = [&](CLI::App* sub) {
    sub->add_option("--c", f.c, "Regularization parameter C");
    sub->add_option("--hidden", f.n_hidden, "Hidden nodes");
    sub->add_option("--activation", f.activation, "sigmoid, sine, tribas, radbas, tansig or relu");
    sub->add_option("--alpha", f.alpha, "Fraction of hidden weights and biases zeroed");
    sub->add_option("--varpi", f.varpi, "Autoencoder mixing switch (0 or 1)");
    sub->add_flag("--no-direct-link", f.no_direct_link, "Drop the input-to-output link");
  };
  const auto models = [&](CLI::App* sub) {
    sub->add_option("--models", f.models, "rvfl, elm, rvflx_n, rvflx_auto")->envname("RVFLX_MODELS")->delimiter(',');
  };
  const auto grid = [&](CLI::App* sub) {
    sub->add_option("--grid", f.grid_file, "Grid JSON; missing keys keep the defaults")
        ->envname("RVFLX_GRID")
        ->check(CLI::ExistingFile);
    sub->add_option("--folds", f.folds, "Cross-validation folds");
  };

  CLI::App* convert = app.add_subcommand("convert", "Real CSV to a two-block complex CSV plus transform sidecar");
  convert->add_option("input", f.inputs, "Input CSV")->required()->expected(1);
  convert->add_option("--method", f.method, "natural or auto");
  convert->add_option("--c", f.c, "Autoencoder regularization C");
  convert->add_option("--varpi", f.varpi, "Autoencoder mixing switch (0 or 1)");
  common(convert);

  CLI::App* train = app.add_subcommand("train", "Fit one model on a whole CSV and save it");
  train->add_option("input", f.inputs, "Training CSV")->required()->expected(1);
  models(train);
  hyper(train);
  common(train);

  CLI::App* predict = app.add_subcommand("predict", "Apply a saved model to a CSV");
  predict->add_option("files", f.inputs, "Model bundle, then input CSV")->required()->expected(2);
  common(predict);

  CLI::App* bench = app.add_subcommand("benchmark", "Grid search with cross-validation over datasets and models");
  bench->add_option("datasets", f.inputs, "Dataset CSVs or directories")->required();
  models(bench);
  grid(bench);
  common(bench);

  CLI::App* sens = app.add_subcommand("sensitivity", "Accuracy as a function of alpha");
  sens->add_option("input", f.inputs, "Dataset CSV")->required()->expected(1);
  sens->add_option("--alphas", f.alphas, "Alpha values")->delimiter(',');
  sens->add_flag("--tune", f.tune, "Pick the other hyperparameters by grid search first");
  models(sens);
  hyper(sens);
  grid(sens);
  common(sens);

  CLI::App* ablate = app.add_subcommand("ablate", "Full model against its alpha=0 and no-direct-link variants");
  ablate->add_option("input", f.inputs, "Dataset CSV")->required()->expected(1);
  ablate->add_flag("--tune", f.tune, "Pick the hyperparameters by grid search first");
  models(ablate);
  hyper(ablate);
  grid(ablate);
  common(ablate);

  CLI::App* stats = app.add_subcommand("stats", "Ranks, Friedman and Nemenyi tests over a results CSV");
  stats->add_option("results", f.inputs, "Results CSV (dataset, model, mean_accuracy)")->required()->expected(1);
  stats->add_option("--alpha-level", f.alpha_level, "Significance level (0.05 or 0.10)")->envname("RVFLX_ALPHA_LEVEL");
  common(stats);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return rvflx::cli::kConfigError;
  }

  CLI::App* sub = app.get_subcommands().front();
  const auto given = [&](const char* name) {
    try {
      return sub->get_option(name)->count() > 0;
    } catch (const CLI::OptionNotFound&) {
      return false;
    }
  };
  const auto log = [&](std::string_view line) {
    if (!f.quiet || line.rfind("error", 0) == 0) std::cerr << line << '\n';
  };

  JobConfig config;
  try {
    if (!f.config_file.empty()) config = rvflx::cli::job_config_from_json(rvflx::read_json_file(f.config_file));
    config.command = sub->get_name();
    if (!f.inputs.empty()) config.inputs = f.inputs;
    if (given("--models")) {
      config.models.clear();
      for (const auto& m : f.models) config.models.push_back(rvflx::parse_model_kind(m));
    } else if (f.config_file.empty() && (config.command == "train" || config.command == "sensitivity" ||
                                         config.command == "ablate")) {
      config.models = {rvflx::ModelKind::rvflx_n};
    }
    if (given("--grid")) {
      config.grid_file = f.grid_file;
      config.grid = rvflx::grid_from_json(rvflx::read_json_file(f.grid_file));
    }
    if (given("--folds")) config.folds = f.folds;
    if (given("--seed")) config.seed = f.seed;
    if (given("--alpha-level")) config.alpha_level = f.alpha_level;
    if (given("--out")) config.out = f.out;
    if (given("--jobs")) config.jobs = f.jobs;
    config.force = config.force || f.force;
    if (given("--c")) config.hp.c = f.c;
    if (given("--hidden")) config.hp.n_hidden = f.n_hidden;
    if (given("--activation")) config.hp.activation = rvflx::parse_activation(f.activation);
    if (given("--alpha")) config.hp.alpha = f.alpha;
    if (given("--varpi")) config.hp.varpi = f.varpi;
    if (given("--no-direct-link")) config.hp.direct_link = false;
    if (given("--tune")) config.tune = f.tune;
    if (given("--alphas")) config.alphas = f.alphas;
    if (given("--method")) config.method = rvflx::parse_transform_method(f.method);
    config.hp.seed = config.seed;
    config.hp.validate();
  } catch (const std::exception& e) {
    log(std::string("error: ") + e.what());
    return rvflx::cli::kConfigError;
  }
  return rvflx::cli::run_command(config, log);
}
