#include <doctest.h>

#include <set>

#include "rvflx/data.hpp"
#include "rvflx/experiment.hpp"

using namespace rvflx;

namespace {

// Two classes split on the sign of the first feature plus an irrelevant one.
Dataset sign_split(std::uint64_t seed, int n = 40) {
  Rng rng(seed);
  Dataset ds;
  ds.name = "sign";
  ds.class_names = {"neg", "pos"};
  ds.features.resize(n, 2);
  for (int i = 0; i < n; ++i) {
    const int label = i % 2;
    ds.features(i, 0) = (label == 1 ? 1.0 : -1.0) * rng.uniform(1.0, 2.0);
    ds.features(i, 1) = rng.uniform(-1.0, 1.0);
    ds.labels.push_back(label);
  }
  ds.targets_onehot = one_hot(ds.labels, 2);
  return ds;
}

Grid single_point() {
  Grid g;
  g.c_values = {10.0};
  g.n_hidden_values = {15};
  g.activations = {Activation::sigmoid};
  g.alpha_values = {0.1};
  g.varpi_values = {1};
  return g;
}

}  // namespace

TEST_CASE("Grid::defaults: ranges and cardinalities") {
  const Grid g = Grid::defaults();
  CHECK(g.c_values.size() == 11);
  CHECK(g.c_values.front() == 1e-5);
  CHECK(g.c_values.back() == 1e5);
  CHECK(g.n_hidden_values.size() == 11);
  CHECK(g.n_hidden_values.front() == 3);
  CHECK(g.n_hidden_values.back() == 203);
  CHECK(g.activations.size() == 6);
  CHECK(g.alpha_values.size() == 6);
  CHECK(g.points(ModelKind::rvfl).size() == 11 * 11 * 6);
  CHECK(g.points(ModelKind::elm).size() == 11 * 11 * 6);
  CHECK(g.points(ModelKind::rvflx_n).size() == 11 * 11 * 6 * 6);
  CHECK(g.points(ModelKind::rvflx_auto).size() == 11 * 11 * 6 * 6 * 2);
  for (const HyperParams& hp : g.points(ModelKind::rvfl)) CHECK(hp.alpha == 0.0);
  const auto pts = g.points(ModelKind::rvflx_auto);
  CHECK(pts[0].c == 1e-5);
  CHECK(pts[1].c == 1e-4);
  CHECK(pts[11].varpi != pts[0].varpi);
}

TEST_CASE("Grid::validate rejects bad ranges") {
  Grid g = single_point();
  g.c_values = {};
  CHECK_THROWS_AS(g.validate(), ArgumentError);
  g = single_point();
  g.alpha_values = {1.0};
  CHECK_THROWS_AS(g.validate(), ArgumentError);
  g = single_point();
  g.n_hidden_values = {0};
  CHECK_THROWS_AS(g.validate(), ArgumentError);
}

TEST_CASE("point_seed depends on every component") {
  const auto s = point_seed(1, "d", ModelKind::rvfl, 0);
  CHECK(s == point_seed(1, "d", ModelKind::rvfl, 0));
  CHECK(s != point_seed(2, "d", ModelKind::rvfl, 0));
  CHECK(s != point_seed(1, "e", ModelKind::rvfl, 0));
  CHECK(s != point_seed(1, "d", ModelKind::elm, 0));
  CHECK(s != point_seed(1, "d", ModelKind::rvfl, 1));
}

TEST_CASE("prepare_folds: disjoint splits normalized by training data") {
  const Dataset ds = sign_split(2);
  const FoldPlan plan = stratified_kfold(ds, 5, 4);
  const auto folds = prepare_folds(ds, plan);
  REQUIRE(folds.size() == 5);
  std::set<Eigen::Index> tested;
  for (const PreparedFold& f : folds) {
    for (Eigen::Index r : f.test_rows) {
      CHECK(std::find(f.train_rows.begin(), f.train_rows.end(), r) == f.train_rows.end());
      tested.insert(r);
    }
    CHECK(std::abs(f.train_features.col(0).mean()) < 1e-12);
    CHECK(f.train_rows.size() + f.test_rows.size() == 40);
  }
  CHECK(tested.size() == 40);
}

TEST_CASE("run_grid: singleton grid equals direct cross-validation") {
  const Dataset ds = sign_split(3);
  const FoldPlan plan = stratified_kfold(ds, 5, 7);
  RunOptions opts;
  opts.base_seed = 99;
  const RunResult res = run_grid(ds, ModelKind::rvflx_n, single_point(), plan, opts);
  HyperParams hp = single_point().points(ModelKind::rvflx_n)[0];
  hp.seed = point_seed(99, ds.name, ModelKind::rvflx_n, 0);
  const CvScore direct = cross_validate(ds, prepare_folds(ds, plan), ModelKind::rvflx_n, hp);
  CHECK(res.best == hp);
  CHECK(res.fold_accuracies == direct.fold_accuracies);
  CHECK(res.mean_accuracy == direct.mean);
  CHECK(res.std_accuracy == direct.stddev);
  CHECK(res.points_evaluated == 1);
  CHECK(res.mean_accuracy == 100.0);
}

TEST_CASE("run_grid: duplicate points and parallel width keep the selection") {
  const Dataset ds = sign_split(5, 30);
  const FoldPlan plan = stratified_kfold(ds, 5, 1);
  Grid g;
  g.c_values = {1e-3, 1.0, 1.0};
  g.n_hidden_values = {3, 13};
  g.activations = {Activation::relu, Activation::sine};
  g.alpha_values = {0.0};
  g.varpi_values = {1};
  RunOptions serial;
  RunOptions wide;
  wide.jobs = 4;
  for (ModelKind kind : kAllModelKinds) {
    const RunResult a = run_grid(ds, kind, g, plan, serial);
    const RunResult b = run_grid(ds, kind, g, plan, wide);
    CHECK(a.best == b.best);
    CHECK(a.best_index == b.best_index);
    CHECK(a.fold_accuracies == b.fold_accuracies);
    CHECK(a.points_evaluated == g.points(kind).size());
  }
}

TEST_CASE("run_grid: points sharing a hidden layer score like standalone runs") {
  const Dataset ds = sign_split(6, 30);
  const FoldPlan plan = stratified_kfold(ds, 3, 2);
  Grid g = single_point();
  g.c_values = {1e-4, 1e-2, 1.0};
  g.n_hidden_values = {5, 9};
  RunOptions opts;
  opts.base_seed = 4;
  opts.log = [](std::string_view) {};
  for (ModelKind kind : {ModelKind::elm, ModelKind::rvflx_auto}) {
    const RunResult res = run_grid(ds, kind, g, plan, opts);
    HyperParams hp = g.points(kind)[res.best_index];
    hp.seed = point_seed(4, ds.name, kind, res.best_index / g.c_values.size());
    CHECK(res.best == hp);
    CHECK(cross_validate(ds, prepare_folds(ds, plan), kind, hp).fold_accuracies == res.fold_accuracies);
  }
}

TEST_CASE("cross_validate: sample standard deviation over folds") {
  const Dataset ds = sign_split(9);
  const auto folds = prepare_folds(ds, stratified_kfold(ds, 4, 2));
  HyperParams hp;
  hp.n_hidden = 3;
  hp.c = 1e-5;
  hp.activation = Activation::radbas;
  const CvScore s = cross_validate(ds, folds, ModelKind::elm, hp);
  REQUIRE(s.fold_accuracies.size() == 4);
  double mean = 0.0;
  for (double a : s.fold_accuracies) mean += a / 4.0;
  double ss = 0.0;
  for (double a : s.fold_accuracies) ss += (a - mean) * (a - mean);
  CHECK(s.mean == doctest::Approx(mean).epsilon(1e-12));
  CHECK(s.stddev == doctest::Approx(std::sqrt(ss / 3.0)).epsilon(1e-12));
}

TEST_CASE("run_sensitivity_alpha and run_ablation") {
  const Dataset ds = sign_split(11);
  const FoldPlan plan = stratified_kfold(ds, 5, 3);
  HyperParams hp;
  hp.n_hidden = 9;
  hp.alpha = 0.3;
  hp.seed = 12;
  const auto curve = run_sensitivity_alpha(ds, ModelKind::rvflx_n, hp, {0.0, 0.5}, plan);
  REQUIRE(curve.size() == 2);
  CHECK(curve[0].alpha == 0.0);

  const auto rows = run_ablation(ds, ModelKind::rvflx_n, hp, plan);
  REQUIRE(rows.size() == 4);
  CHECK(rows[0].variant == "full");
  CHECK(rows[1].variant == "alpha0");
  CHECK(rows[2].variant == "woDL");
  CHECK(rows[3].variant == "woDL_alpha0");
  CHECK(rows[1].score.fold_accuracies == curve[0].score.fold_accuracies);
  CHECK_FALSE(rows[2].hp.direct_link);
  CHECK(rows[3].hp.alpha == 0.0);
  CHECK_THROWS_AS(run_ablation(ds, ModelKind::rvfl, hp, plan), ArgumentError);
}

TEST_CASE("run_grid: every point failing is an experiment error") {
  Dataset ds = sign_split(1, 10);
  ds.features(0, 0) = std::numeric_limits<double>::infinity();
  const FoldPlan plan = stratified_kfold(ds, 5, 1);
  std::vector<std::string> logged;
  RunOptions opts;
  opts.log = [&](std::string_view line) { logged.emplace_back(line); };
  CHECK_THROWS_AS(run_grid(ds, ModelKind::rvfl, single_point(), plan, opts), ExperimentError);
  CHECK_FALSE(logged.empty());
}
