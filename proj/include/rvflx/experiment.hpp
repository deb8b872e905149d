#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "rvflx/data.hpp"
#include "rvflx/models.hpp"

namespace rvflx {

/// Hyperparameter ranges searched by run_grid. alpha is searched for the
/// complex kinds only and varpi for rvflx_auto only; the real baselines use
/// alpha = 0.
struct Grid {
  std::vector<double> c_values;
  std::vector<int> n_hidden_values;
  std::vector<Activation> activations;
  std::vector<double> alpha_values;
  std::vector<int> varpi_values;

  /// C in 10^-5..10^5, N_h in 3..203 step 20, all six activations,
  /// alpha in {0, 0.1, ..., 0.5}, varpi in {0, 1}.
  static Grid defaults();

  /// Grid points for `kind` in enumeration order (n_hidden, activation, alpha,
  /// varpi, c; c varies fastest). Seeds are left at 0.
  std::vector<HyperParams> points(ModelKind kind) const;

  void validate() const;
};

/// One cross-validation split, normalized with training statistics.
struct PreparedFold {
  std::vector<Eigen::Index> train_rows;
  std::vector<Eigen::Index> test_rows;
  RealMatrix train_features;
  RealMatrix train_targets;
  RealMatrix test_features;
  std::vector<int> test_labels;
};

/// Splits and z-scores every fold of `plan`. Throws if a test row leaks into
/// its own training split.
std::vector<PreparedFold> prepare_folds(const Dataset& ds, const FoldPlan& plan);

struct CvScore {
  std::vector<double> fold_accuracies;  // percent
  double mean = 0.0;
  double stddev = 0.0;  // sample standard deviation over folds
};

/// Trains on each training split and scores its test split. Fold f trains with
/// seed mix_seed(hp.seed, f).
CvScore cross_validate(const Dataset& ds, const std::vector<PreparedFold>& folds, ModelKind kind,
                       const HyperParams& hp, const TrainOptions& options = {});

using LogFn = std::function<void(std::string_view)>;

struct RunOptions {
  std::uint64_t base_seed = 0;
  std::size_t jobs = 1;
  TrainOptions train;
  LogFn log;
};

struct RunResult {
  std::string dataset;
  ModelKind kind = ModelKind::rvfl;
  HyperParams best;
  std::size_t best_index = 0;
  std::vector<double> fold_accuracies;
  double mean_accuracy = 0.0;
  double std_accuracy = 0.0;
  std::size_t points_evaluated = 0;
  std::size_t points_failed = 0;
  double wall_seconds = 0.0;
};

class ExperimentError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// hash(base seed, dataset, kind, block index), independent of evaluation order.
/// A block is the run of grid points that differ only in C; they share one
/// random hidden layer.
std::uint64_t point_seed(std::uint64_t base_seed, const std::string& dataset, ModelKind kind, std::size_t index);

/// Grid search scored by mean CV test accuracy. Ties go to the smaller N_h,
/// then the later entry of c_values, then the first point enumerated. Points
/// that fail to train are logged and skipped.
RunResult run_grid(const Dataset& ds, ModelKind kind, const Grid& grid, const FoldPlan& plan,
                   const RunOptions& options = {});

struct SensitivityRow {
  double alpha = 0.0;
  CvScore score;
};

/// One CV evaluation per alpha with every other setting (and the seed) fixed.
std::vector<SensitivityRow> run_sensitivity_alpha(const Dataset& ds, ModelKind kind, const HyperParams& fixed,
                                                  const std::vector<double>& alphas, const FoldPlan& plan,
                                                  const RunOptions& options = {});

struct AblationRow {
  std::string variant;  // full, alpha0, woDL, woDL_alpha0
  HyperParams hp;
  CvScore score;
};

/// The full configuration and its alpha = 0, no-direct-link, and combined
/// ablations, all on the same folds and seed.
std::vector<AblationRow> run_ablation(const Dataset& ds, ModelKind kind, const HyperParams& hp,
                                      const FoldPlan& plan, const RunOptions& options = {});

}  // namespace rvflx
