// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fail.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#if defined(__GLIBC__)
#include <malloc.h>
#endif

#include "job.hpp"
#include "oracles.hpp"
#include "rvflx/data.hpp"
#include "rvflx/experiment.hpp"
#include "rvflx/models.hpp"
#include "rvflx/report.hpp"
#include "rvflx/serialization.hpp"
#include "rvflx/stats.hpp"
#include "rvflx/transforms.hpp"

using namespace rvflx;
namespace fs = std::filesystem;

namespace {

const fs::path kDataDir = RVFLX_DATA_DIR;
const fs::path kFixtureDir = RVFLX_FIXTURE_DIR;
const fs::path kWorkDir = RVFLX_WORK_DIR;

const std::vector<std::string> kFixtureModels = {"RVFL",      "RVFLwoDL",       "IFRVFL",    "GEELM-LDA",
                                               "GEELM-LFDA", "Total-var-RVFL", "MCVELM",    "NF-RVFL-R",
                                               "NF-RVFL-K",  "NF-RVFL-C",      "RVFL-X-N",  "RVFL-X-Auto"};

RealVector reference_ranks() {
  RealVector r(12);
  r << 8.2381, 8.9048, 6.2381, 9.3571, 10.5714, 5.5, 5.5, 5.6905, 5.5714, 5.2619, 4.5, 2.6667;
  return r;
}

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail += (detail.empty() ? "" : "; ") + what;
    }
  }
  void note(const std::string& what) { detail += (detail.empty() ? "" : "; ") + what; }
};

std::string fmt(double v, int digits = 4) { return format_fixed(v, digits); }

void log_line(std::string_view line) { std::fprintf(stderr, "  | %.*s\n", static_cast<int>(line.size()), line.data()); }

int run(int id, const std::string& name, double budget_seconds, const std::function<Outcome()>& body) {
  const auto start = std::chrono::steady_clock::now();
  Outcome out;
  try {
    out = body();
  } catch (const std::exception& e) {
    out.pass = false;
    out.detail = std::string("exception: ") + e.what();
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  out.require(secs < budget_seconds, "runtime " + fmt(secs, 2) + " s over budget " + fmt(budget_seconds, 0) + " s");
  std::printf("%s criterion %d (%s): %s [%.2f s]\n", out.pass ? "PASS" : "FAIL", id, name.c_str(),
              out.detail.c_str(), secs);
  std::fflush(stdout);
  return out.pass ? 0 : 1;
}

Outcome statistical_fixtures() {
  Outcome o;
  const FriedmanReport rep = friedman(reference_ranks(), 12, 21);
  o.require(std::abs(rep.chi2 - 92.653) <= 0.01, "chi2 " + fmt(rep.chi2));
  o.require(std::abs(rep.ff - 13.3943) <= 0.005, "F_F " + fmt(rep.ff));
  o.note("chi2=" + fmt(rep.chi2) + " F_F=" + fmt(rep.ff));
  const struct {
    std::size_t s, r;
    double cd;
  } cases[] = {{12, 21, 3.6363}, {12, 14, 4.4535}, {9, 23, 2.5051}, {9, 22, 2.5614}};
  for (const auto& c : cases) {
    const double cd = nemenyi_cd(c.s, c.r, 0.05);
    o.require(std::abs(cd - c.cd) <= 0.001,
              "CD(" + std::to_string(c.s) + "," + std::to_string(c.r) + ")=" + fmt(cd) + " expected " + fmt(c.cd));
    o.note("CD(" + std::to_string(c.s) + "," + std::to_string(c.r) + ")=" + fmt(cd));
  }
  return o;
}

Outcome rank_pipeline() {
  Outcome o;
  const AccuracyTable table = read_results_csv(kFixtureDir / "reference_accuracies.csv");
  o.require(table.models == kFixtureModels, "unexpected model order in fixture");
  o.require(table.datasets.size() == 21, "expected 21 datasets, got " + std::to_string(table.datasets.size()));
  const RealVector ranks = average_ranks(table);
  const RealVector expected = reference_ranks();
  const double worst = (ranks - expected).cwiseAbs().maxCoeff();
  o.require(worst <= 0.01, "rank deviation " + fmt(worst));
  o.note("max rank deviation " + fmt(worst));

  const FriedmanReport rep = friedman(ranks, 12, 21);
  const std::vector<std::string> superior = {"RVFL", "RVFLwoDL", "GEELM-LDA", "GEELM-LFDA"};
  for (std::size_t m : {std::size_t{10}, std::size_t{11}}) {
    const auto beaten = beaten_by(rep.pairwise, table.models, m);
    std::string list;
    for (const auto& b : beaten) list += (list.empty() ? "" : ",") + b;
    o.require(beaten == superior, table.models[m] + " beats {" + list + "}");
    o.note(table.models[m] + " beats {" + list + "}");
  }
  return o;
}

Outcome solver_certificates() {
  Outcome o;
  Rng rng(20240601);
  double worst_gap = 0.0;
  int certificates = 0, failures = 0, below = 0;
  for (int inst = 0; inst < 200; ++inst) {
    const bool wide = inst % 2 == 0;  // k < p half the time
    const auto p = static_cast<Eigen::Index>(2 + rng.below(40));
    const auto k = wide ? static_cast<Eigen::Index>(1 + rng.below(static_cast<std::uint64_t>(p - 1)))
                        : p + static_cast<Eigen::Index>(rng.below(60));
    below += k < p;
    const auto d = static_cast<Eigen::Index>(1 + rng.below(4));
    const double c = std::pow(10.0, rng.uniform(-5.0, 5.0));
    const RealMatrix w = uniform_matrix(rng, k, d, 0, 1);

    const RealMatrix g = uniform_matrix(rng, k, p, -1, 1);
    const RealMatrix rp = regularized_solve<double>(g, w, c, SolveForm::primal);
    const RealMatrix rd = regularized_solve<double>(g, w, c, SolveForm::dual);
    const ComplexMatrix gx = oracle::random_complex(rng, k, p);
    const ComplexMatrix cp = hermitian_solve_regularized(gx, w, c, SolveForm::primal);
    const ComplexMatrix cd = hermitian_solve_regularized(gx, w, c, SolveForm::dual);
    worst_gap = std::max({worst_gap, oracle::max_relative_diff(rp, rd), oracle::max_relative_diff(cp, cd)});

    for (const auto& cert : {normal_equation_residual<double>(g, w, c, rp), normal_equation_residual<double>(g, w, c, rd),
                             normal_equation_residual<Complex>(gx, w, c, cp),
                             normal_equation_residual<Complex>(gx, w, c, cd)}) {
      ++certificates;
      failures += !cert.holds();
    }
  }
  // Decoder solves through the autoencoder, on both branches.
  for (int inst = 0; inst < 20; ++inst) {
    const auto r = static_cast<Eigen::Index>(2 + rng.below(8));
    const auto k = inst % 2 == 0 ? static_cast<Eigen::Index>(1 + rng.below(static_cast<std::uint64_t>(r - 1)))
                                 : r + static_cast<Eigen::Index>(rng.below(20));
    const RealMatrix z = uniform_matrix(rng, k, r, -2, 2);
    const double c = std::pow(10.0, rng.uniform(-3.0, 3.0));
    Rng fit_rng(rng.next_u64());
    const FittedTransform t = fit_autoencoder(z, c, 1, fit_rng);
    const RealMatrix latent = oracle::min_max(z * t.encoder_weights);
    ++certificates;
    failures += !normal_equation_residual<double>(latent, z, c, t.decoder_weights).holds();
  }
  o.require(worst_gap <= 1e-8, "primal/dual gap " + std::to_string(worst_gap));
  o.require(failures == 0, std::to_string(failures) + " certificates failed");
  o.require(below == 100, "instances with k < p: " + std::to_string(below));
  char buf[160];
  std::snprintf(buf, sizeof buf, "200 instances (%d with k<p), max primal/dual gap %.2e, %d/%d certificates hold", below,
                worst_gap, certificates - failures, certificates);
  o.note(buf);
  return o;
}

Outcome reduction_invariant() {
  Outcome o;
  Rng rng(77);
  int exact = 0;
  for (int inst = 0; inst < 20; ++inst) {
    const auto k = static_cast<Eigen::Index>(5 + rng.below(40));
    const auto r = static_cast<Eigen::Index>(1 + rng.below(8));
    const RealMatrix z = uniform_matrix(rng, k, r, -3, 3);
    RealMatrix targets = RealMatrix::Zero(k, 2);
    for (Eigen::Index i = 0; i < k; ++i) targets(i, i % 2) = 1.0;
    HyperParams hp;
    hp.activation = Activation::relu;
    hp.n_hidden = static_cast<int>(1 + rng.below(60));
    hp.alpha = 0.1 * static_cast<double>(rng.below(6));
    hp.c = std::pow(10.0, rng.uniform(-2, 2));
    hp.seed = rng.next_u64();
    TrainOptions hook;
    hook.zero_imaginary_hidden = true;
    const FittedModel cx = train(ModelKind::rvflx_n, hp, z, targets, {}, hook);
    const FittedModel re = train(ModelKind::rvfl, hp, z, targets);
    const ComplexMatrix hx = complex_hidden_features(cx, z);
    const RealMatrix h = real_hidden_features(re, z);
    const bool same = hx.real() == h && hx.imag().isZero(0.0);
    exact += same;
  }
  o.require(exact == 20, std::to_string(20 - exact) + " instances differ");
  o.note(std::to_string(exact) + "/20 instances bitwise equal");
  return o;
}

Outcome autoencoder_oracle() {
  Outcome o;
  Rng rng(5);
  for (auto [k, r] : {std::pair<Eigen::Index, Eigen::Index>{6, 3}, {8, 5}}) {
    const RealMatrix z = uniform_matrix(rng, k, r, -1, 1);
    Rng fit_rng(rng.next_u64());
    const FittedTransform t = fit_autoencoder(z, 1.0, 1, fit_rng);
    const RealMatrix latent = oracle::min_max(z * t.encoder_weights);
    const RealMatrix gd = oracle::ridge_gradient_descent(latent, z, 1.0);
    const double gap = (gd - t.decoder_weights).cwiseAbs().maxCoeff();
    o.require(gap <= 1e-4, std::to_string(k) + "x" + std::to_string(r) + " gap " + std::to_string(gap));
    char buf[64];
    std::snprintf(buf, sizeof buf, "%ldx%ld gap %.2e", static_cast<long>(k), static_cast<long>(r), gap);
    o.note(buf);
  }
  return o;
}

cli::JobConfig benchmark_config(const fs::path& out) {
  cli::JobConfig config;
  config.command = "benchmark";
  config.inputs = {kDataDir.string()};
  config.out = out.string();
  config.force = true;
  config.jobs = std::max(1u, std::thread::hardware_concurrency());
  return config;
}

const nlohmann::json* find_result(const nlohmann::json& results, const std::string& dataset, const std::string& model) {
  for (const auto& r : results.at("results"))
    if (r.at("dataset") == dataset && r.at("model") == model) return &r;
  return nullptr;
}

Outcome desk_scale_accuracy() {
  Outcome o;
  const fs::path out = kWorkDir / "benchmark_default_grid";
  const int code = cli::run_command(benchmark_config(out), log_line);
  o.require(code == 0, "benchmark exit code " + std::to_string(code));
  const nlohmann::json results = read_json_file(out / "results.json");
  for (const char* model : {"rvfl", "elm", "rvflx_n", "rvflx_auto"}) {
    const auto* r = find_result(results, "acute_inflammation", model);
    const double acc = r ? r->at("mean_accuracy").get<double>() : -1.0;
    o.require(acc == 100.0, std::string("acute_inflammation/") + model + " " + fmt(acc));
  }
  o.note("acute_inflammation 100 for all four models");
  const struct {
    const char* model;
    double target;
  } targets[] = {{"rvflx_n", 92.9615}, {"rvflx_auto", 93.1433}};
  for (const auto& t : targets) {
    const auto* r = find_result(results, "monks_3", t.model);
    const double acc = r ? r->at("mean_accuracy").get<double>() : -1.0;
    o.require(std::abs(acc - t.target) <= 5.0,
              std::string("monks_3/") + t.model + " " + fmt(acc) + " outside " + fmt(t.target) + " +- 5");
    o.note(std::string("monks_3/") + t.model + " " + fmt(acc) + " (target " + fmt(t.target) + ")");
  }
  for (const char* ds : {"iris", "thyroid_small"})
    for (const char* model : {"rvfl", "elm", "rvflx_n", "rvflx_auto"})
      if (const auto* r = find_result(results, ds, model))
        log_line(std::string(ds) + "/" + model + " " + fmt(r->at("mean_accuracy").get<double>()));
  return o;
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

Outcome ablation_direction() {
  Outcome o;
  Dataset ds = load_csv(kDataDir / "monks_3.csv");
  ds.name = "monks_3";
  const std::uint64_t seed = 0;
  const FoldPlan plan = stratified_kfold(ds, 5, mix_seed(seed, fnv1a(ds.name)));
  RunOptions opts;
  opts.base_seed = seed;
  opts.jobs = std::max(1u, std::thread::hardware_concurrency());
  const RunResult tuned = run_grid(ds, ModelKind::rvflx_n, Grid::defaults(), plan, opts);
  log_line("tuned rvflx_n on monks_3: " + to_json(tuned.best).dump() + " mean " + fmt(tuned.mean_accuracy));

  std::vector<double> full, alpha0, wodl;
  for (std::uint64_t s = 0; s < 5; ++s) {
    HyperParams hp = tuned.best;
    if (s > 0) hp.seed = mix_seed(tuned.best.seed, s);
    const auto rows = run_ablation(ds, ModelKind::rvflx_n, hp, plan, opts);
    full.push_back(rows[0].score.mean);
    alpha0.push_back(rows[1].score.mean);
    wodl.push_back(rows[2].score.mean);
    if (rows[0].score.mean < rows[1].score.mean || rows[0].score.mean < rows[2].score.mean)
      log_line("seed " + std::to_string(hp.seed) + ": full " + fmt(rows[0].score.mean) + " below an ablation (alpha0 " +
               fmt(rows[1].score.mean) + ", woDL " + fmt(rows[2].score.mean) + ")");
  }
  const double mf = median(full), ma = median(alpha0), mw = median(wodl);
  o.require(mf >= ma, "median full " + fmt(mf) + " < alpha0 " + fmt(ma));
  o.require(mf >= mw, "median full " + fmt(mf) + " < woDL " + fmt(mw));
  o.note("median over 5 seeds: full " + fmt(mf) + ", alpha0 " + fmt(ma) + ", woDL " + fmt(mw));
  return o;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

Outcome determinism() {
  Outcome o;
  Grid grid;
  grid.c_values = {1e-2, 1.0, 1e2};
  grid.n_hidden_values = {23, 63};
  grid.activations = {Activation::sigmoid, Activation::relu};
  grid.alpha_values = {0.0, 0.3};
  grid.varpi_values = {0, 1};
  const auto once = [&](const char* name) {
    cli::JobConfig config = benchmark_config(kWorkDir / name);
    config.grid = grid;
    config.seed = 42;
    const auto start = std::chrono::steady_clock::now();
    const int code = cli::run_command(config, log_line);
    o.require(code == 0, std::string(name) + " exit code " + std::to_string(code));
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  };
  const double t1 = once("determinism_a");
  const double t2 = once("determinism_b");
  for (const char* file : {"results.csv", "results.json"}) {
    const std::string a = slurp(kWorkDir / "determinism_a" / file);
    const std::string b = slurp(kWorkDir / "determinism_b" / file);
    o.require(!a.empty() && a == b, std::string(file) + " differs between runs");
  }
  o.require(t1 + t2 < 2.0 * std::max(t1, t2) + 1.0, "second run out of line with the first");
  o.note("results.csv and results.json byte-identical (" + std::to_string(slurp(kWorkDir / "determinism_a" / "results.json").size()) +
         " bytes); runs took " + fmt(t1, 1) + " s and " + fmt(t2, 1) + " s");
  return o;
}

}  // namespace

int main(int argc, char** argv) {
#if defined(__GLIBC__)
  mallopt(M_MMAP_THRESHOLD, 256 << 20);
  mallopt(M_TRIM_THRESHOLD, 512 << 20);
#endif
  // Optional filter: criterion numbers to run, e.g. "1 2 3".
  std::vector<int> only;
  for (int i = 1; i < argc; ++i) only.push_back(std::atoi(argv[i]));
  const auto wanted = [&](int id) { return only.empty() || std::find(only.begin(), only.end(), id) != only.end(); };
  fs::create_directories(kWorkDir);

  int failed = 0;
  if (wanted(1)) failed += run(1, "statistical fixtures", 1.0, statistical_fixtures);
  if (wanted(2)) failed += run(2, "rank pipeline", 1.0, rank_pipeline);
  if (wanted(3)) failed += run(3, "solver certificates", 30.0, solver_certificates);
  if (wanted(4)) failed += run(4, "reduction invariant", 5.0, reduction_invariant);
  if (wanted(5)) failed += run(5, "autoencoder oracle", 10.0, autoencoder_oracle);
  if (wanted(6)) failed += run(6, "desk-scale accuracy", 20.0 * 60.0, desk_scale_accuracy);
  if (wanted(7)) failed += run(7, "ablation direction", 10.0 * 60.0, ablation_direction);
  if (wanted(8)) failed += run(8, "determinism", 20.0 * 60.0, determinism);
  std::printf("%d criteria failed\n", failed);
  return failed == 0 ? 0 : 1;
}
