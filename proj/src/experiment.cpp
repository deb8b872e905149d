#include "rvflx/experiment.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <mutex>
#include <numeric>
#include <optional>
#include <thread>

namespace rvflx {

namespace {

struct PointOutcome {
  std::optional<CvScore> score;
  std::string error;
};

// Evaluates task(i) for i in [0, n) on `jobs` threads. Each result lands in its
// own slot, so the output does not depend on scheduling.
template <typename Result, typename Task>
std::vector<Result> parallel_map(std::size_t n, std::size_t jobs, Task task) {
  std::vector<Result> results(n);
  std::atomic<std::size_t> next{0};
  const auto worker = [&] {
    for (std::size_t i = next++; i < n; i = next++) results[i] = task(i);
  };
  const std::size_t threads = std::max<std::size_t>(1, std::min(jobs, n));
  if (threads == 1) {
    worker();
    return results;
  }
  std::vector<std::thread> pool;
  for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
  return results;
}

void log_line(const RunOptions& options, const std::string& line) {
  if (options.log) options.log(line);
}

}  // namespace

Grid Grid::defaults() {
  Grid g;
  for (int e = -5; e <= 5; ++e) g.c_values.push_back(std::pow(10.0, e));
  for (int n = 3; n <= 203; n += 20) g.n_hidden_values.push_back(n);
  g.activations.assign(kAllActivations.begin(), kAllActivations.end());
  g.alpha_values = {0.0, 0.1, 0.2, 0.3, 0.4, 0.5};
  g.varpi_values = {0, 1};
  return g;
}

void Grid::validate() const {
  if (c_values.empty() || n_hidden_values.empty() || activations.empty())
    throw ArgumentError("grid needs at least one C, one hidden size and one activation");
  for (double c : c_values)
    if (!(c > 0.0)) throw ArgumentError("grid C values must be positive");
  for (int n : n_hidden_values)
    if (n < 1) throw ArgumentError("grid hidden sizes must be at least 1");
  for (double a : alpha_values)
    if (!(a >= 0.0 && a < 1.0)) throw ArgumentError("grid alpha values must lie in [0, 1)");
  for (int v : varpi_values)
    if (v != 0 && v != 1) throw ArgumentError("grid varpi values must be 0 or 1");
}

std::vector<HyperParams> Grid::points(ModelKind kind) const {
  validate();
  const std::vector<double> alphas = is_complex(kind) && !alpha_values.empty() ? alpha_values : std::vector<double>{0.0};
  const std::vector<int> varpis =
      kind == ModelKind::rvflx_auto && !varpi_values.empty() ? varpi_values : std::vector<int>{1};
  std::vector<HyperParams> out;
  for (int n : n_hidden_values)
    for (Activation act : activations)
      for (double alpha : alphas)
        for (int varpi : varpis)
          for (double c : c_values) {
            HyperParams hp;
            hp.c = c;
            hp.n_hidden = n;
            hp.activation = act;
            hp.alpha = alpha;
            hp.varpi = varpi;
            hp.direct_link = kind != ModelKind::elm;
            out.push_back(hp);
          }
  return out;
}

std::vector<PreparedFold> prepare_folds(const Dataset& ds, const FoldPlan& plan) {
  if (plan.assignments.size() != static_cast<std::size_t>(ds.n_samples()))
    throw ArgumentError("fold plan does not match dataset size");
  std::vector<PreparedFold> folds;
  for (std::size_t f = 0; f < plan.n_folds; ++f) {
    PreparedFold fold;
    fold.train_rows = plan.train_rows(f);
    fold.test_rows = plan.test_rows(f);
    std::vector<bool> in_train(static_cast<std::size_t>(ds.n_samples()), false);
    for (auto row : fold.train_rows) in_train[static_cast<std::size_t>(row)] = true;
    for (auto row : fold.test_rows)
      if (in_train[static_cast<std::size_t>(row)])
        throw ExperimentError("row " + std::to_string(row) + " is in both splits of fold " + std::to_string(f));
    if (fold.train_rows.empty() || fold.test_rows.empty())
      throw ExperimentError("fold " + std::to_string(f) + " has an empty split");
    const Dataset train = ds.subset(fold.train_rows);
    const Dataset test = ds.subset(fold.test_rows);
    NormalizedFold normalized = normalize_fold(train.features, test.features);
    fold.train_features = std::move(normalized.train);
    fold.test_features = std::move(normalized.test);
    fold.train_targets = train.targets_onehot;
    fold.test_labels = test.labels;
    folds.push_back(std::move(fold));
  }
  return folds;
}

namespace {

CvScore summarize(std::vector<double> fold_accuracies) {
  CvScore score;
  score.fold_accuracies = std::move(fold_accuracies);
  const double n = static_cast<double>(score.fold_accuracies.size());
  score.mean = std::accumulate(score.fold_accuracies.begin(), score.fold_accuracies.end(), 0.0) / n;
  double ss = 0.0;
  for (double a : score.fold_accuracies) ss += (a - score.mean) * (a - score.mean);
  score.stddev = n > 1 ? std::sqrt(ss / (n - 1.0)) : 0.0;
  return score;
}

double accuracy(const FittedModel& model, const PreparedFold& fold) {
  const Prediction pred = predict(model, fold.test_features);
  std::size_t correct = 0;
  for (std::size_t i = 0; i < pred.labels.size(); ++i) correct += pred.labels[i] == fold.test_labels[i];
  return 100.0 * static_cast<double>(correct) / static_cast<double>(pred.labels.size());
}

// Scores of hp at every C in c_values; entry j equals cross_validate with
// hp.c = c_values[j].
std::vector<CvScore> cross_validate_path(const Dataset& ds, const std::vector<PreparedFold>& folds, ModelKind kind,
                                         const HyperParams& hp, const std::vector<double>& c_values,
                                         const TrainOptions& options) {
  if (folds.empty()) throw ArgumentError("no folds to evaluate");
  std::vector<std::vector<double>> per_c(c_values.size());
  for (std::size_t f = 0; f < folds.size(); ++f) {
    const PreparedFold& fold = folds[f];
    HyperParams fold_hp = hp;
    fold_hp.seed = mix_seed(hp.seed, f);
    const auto models =
        train_path(kind, fold_hp, c_values, fold.train_features, fold.train_targets, ds.class_names, options);
    for (std::size_t j = 0; j < models.size(); ++j) per_c[j].push_back(accuracy(models[j], fold));
  }
  std::vector<CvScore> scores;
  for (auto& acc : per_c) scores.push_back(summarize(std::move(acc)));
  return scores;
}

}  // namespace

CvScore cross_validate(const Dataset& ds, const std::vector<PreparedFold>& folds, ModelKind kind,
                       const HyperParams& hp, const TrainOptions& options) {
  return cross_validate_path(ds, folds, kind, hp, {hp.c}, options).front();
}

std::uint64_t point_seed(std::uint64_t base_seed, const std::string& dataset, ModelKind kind, std::size_t index) {
  std::uint64_t h = fnv1a(dataset);
  h = fnv1a(to_string(kind), h);
  return mix_seed(mix_seed(base_seed, h), index);
}

RunResult run_grid(const Dataset& ds, ModelKind kind, const Grid& grid, const FoldPlan& plan,
                   const RunOptions& options) {
  const auto started = std::chrono::steady_clock::now();
  std::vector<HyperParams> points = grid.points(kind);
  if (points.empty()) throw ArgumentError("grid is empty");
  // C varies fastest, so each run of c_values.size() points is one block that
  // shares its random hidden layer.
  const std::size_t block_size = grid.c_values.size();
  const std::size_t n_blocks = points.size() / block_size;
  for (std::size_t i = 0; i < points.size(); ++i)
    points[i].seed = point_seed(options.base_seed, ds.name, kind, i / block_size);

  const std::vector<PreparedFold> folds = prepare_folds(ds, plan);
  std::mutex log_mutex;
  const auto report = [&](std::size_t i, const std::exception& e) {
    std::lock_guard lock(log_mutex);
    log_line(options, ds.name + "/" + to_string(kind) + ": grid point " + std::to_string(i) + " failed: " + e.what());
  };
  const auto blocks = parallel_map<std::vector<PointOutcome>>(n_blocks, options.jobs, [&](std::size_t b) {
    std::vector<PointOutcome> out(block_size);
    const std::size_t first = b * block_size;
    try {
      const auto scores = cross_validate_path(ds, folds, kind, points[first], grid.c_values, options.train);
      for (std::size_t j = 0; j < block_size; ++j) out[j].score = scores[j];
    } catch (const std::exception&) {
      // Isolate the failing C values.
      for (std::size_t j = 0; j < block_size; ++j) {
        try {
          out[j].score = cross_validate(ds, folds, kind, points[first + j], options.train);
        } catch (const std::exception& e) {
          out[j].error = e.what();
          report(first + j, e);
        }
      }
    }
    return out;
  });
  std::vector<PointOutcome> outcomes;
  outcomes.reserve(points.size());
  for (const auto& block : blocks) outcomes.insert(outcomes.end(), block.begin(), block.end());

  const auto c_rank = [&](double c) {
    return std::find(grid.c_values.begin(), grid.c_values.end(), c) - grid.c_values.begin();
  };
  std::optional<std::size_t> best;
  RunResult result;
  result.dataset = ds.name;
  result.kind = kind;
  result.points_evaluated = points.size();
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (!outcomes[i].score) {
      ++result.points_failed;
      continue;
    }
    if (!best) {
      best = i;
      continue;
    }
    const double mean = outcomes[i].score->mean;
    const double best_mean = outcomes[*best].score->mean;
    const HyperParams& p = points[i];
    const HyperParams& q = points[*best];
    const bool better = mean > best_mean ||
                        (mean == best_mean && (p.n_hidden < q.n_hidden ||
                                               (p.n_hidden == q.n_hidden && c_rank(p.c) > c_rank(q.c))));
    if (better) best = i;
  }
  if (!best)
    throw ExperimentError("every grid point failed for " + ds.name + "/" + to_string(kind) +
                          (outcomes.empty() ? std::string() : ": " + outcomes.front().error));

  result.best = points[*best];
  result.best_index = *best;
  result.fold_accuracies = outcomes[*best].score->fold_accuracies;
  result.mean_accuracy = outcomes[*best].score->mean;
  result.std_accuracy = outcomes[*best].score->stddev;
  result.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  return result;
}

std::vector<SensitivityRow> run_sensitivity_alpha(const Dataset& ds, ModelKind kind, const HyperParams& fixed,
                                                  const std::vector<double>& alphas, const FoldPlan& plan,
                                                  const RunOptions& options) {
  if (!is_complex(kind)) throw ArgumentError("alpha sensitivity applies to the complex models only");
  const std::vector<PreparedFold> folds = prepare_folds(ds, plan);
  return parallel_map<SensitivityRow>(alphas.size(), options.jobs, [&](std::size_t i) {
    HyperParams hp = fixed;
    hp.alpha = alphas[i];
    return SensitivityRow{alphas[i], cross_validate(ds, folds, kind, hp, options.train)};
  });
}

std::vector<AblationRow> run_ablation(const Dataset& ds, ModelKind kind, const HyperParams& hp,
                                      const FoldPlan& plan, const RunOptions& options) {
  if (!is_complex(kind)) throw ArgumentError("ablation applies to the complex models only");
  std::vector<AblationRow> rows(4);
  rows[0] = {"full", hp, {}};
  rows[1] = {"alpha0", hp, {}};
  rows[1].hp.alpha = 0.0;
  rows[2] = {"woDL", hp, {}};
  rows[2].hp.direct_link = false;
  rows[3] = {"woDL_alpha0", hp, {}};
  rows[3].hp.direct_link = false;
  rows[3].hp.alpha = 0.0;
  rows[0].hp.direct_link = true;
  rows[1].hp.direct_link = true;
  const std::vector<PreparedFold> folds = prepare_folds(ds, plan);
  const auto scores = parallel_map<CvScore>(rows.size(), options.jobs, [&](std::size_t i) {
    return cross_validate(ds, folds, kind, rows[i].hp, options.train);
  });
  for (std::size_t i = 0; i < rows.size(); ++i) rows[i].score = scores[i];
  return rows;
}

}  // namespace rvflx
