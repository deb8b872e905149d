#include "rvflx/stats.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numeric>

namespace rvflx {

namespace {

// Critical values of the two-tailed Nemenyi test, indexed by number of models
// 2..20 (studentized range statistic for infinite dof divided by sqrt(2)).
constexpr std::array<double, 19> kQ05 = {1.960, 2.343, 2.569, 2.728, 2.850, 2.949, 3.031, 3.102, 3.164, 3.219,
                                         3.268, 3.313, 3.354, 3.391, 3.426, 3.458, 3.489, 3.517, 3.544};
constexpr std::array<double, 19> kQ10 = {1.645, 2.052, 2.291, 2.459, 2.589, 2.693, 2.780, 2.855, 2.920, 2.978,
                                         3.030, 3.077, 3.120, 3.159, 3.196, 3.230, 3.261, 3.291, 3.319};

double beta_continued_fraction(double a, double b, double x) {
  constexpr int kMaxIter = 400;
  constexpr double kEps = 1e-15;
  constexpr double kTiny = 1e-300;
  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::abs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIter; ++m) {
    const double m2 = 2.0 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < kEps) return h;
  }
  throw NumericError("incomplete beta continued fraction did not converge");
}

}  // namespace

RealMatrix rank_matrix(const AccuracyTable& table) {
  const auto n_datasets = static_cast<Eigen::Index>(table.datasets.size());
  const auto n_models = static_cast<Eigen::Index>(table.models.size());
  if (table.accuracy.rows() != n_datasets || table.accuracy.cols() != n_models)
    throw DataError("accuracy table shape does not match its model and dataset lists");
  if (!all_finite(table.accuracy)) throw DataError("accuracy table has missing or non-finite cells");

  RealMatrix ranks(n_datasets, n_models);
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n_models));
  for (Eigen::Index r = 0; r < n_datasets; ++r) {
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
      return table.accuracy(r, a) > table.accuracy(r, b);
    });
    // Tied runs share the mean of the positions they occupy.
    std::size_t start = 0;
    while (start < order.size()) {
      std::size_t end = start + 1;
      while (end < order.size() && table.accuracy(r, order[end]) == table.accuracy(r, order[start])) ++end;
      const double mid = 0.5 * static_cast<double>(start + 1 + end);
      for (std::size_t i = start; i < end; ++i) ranks(r, order[i]) = mid;
      start = end;
    }
  }
  return ranks;
}

RealVector average_ranks(const AccuracyTable& table) {
  if (table.datasets.empty()) throw DataError("accuracy table has no datasets");
  return rank_matrix(table).colwise().mean().transpose();
}

double incomplete_beta(double a, double b, double x) {
  if (!(a > 0.0) || !(b > 0.0)) throw ArgumentError("incomplete beta needs positive shape parameters");
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  const double log_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) + a * std::log(x) +
                           b * std::log1p(-x);
  const double front = std::exp(log_front);
  if (x < (a + 1.0) / (a + b + 2.0)) return front * beta_continued_fraction(a, b, x) / a;
  return 1.0 - front * beta_continued_fraction(b, a, 1.0 - x) / b;
}

double f_cdf(double f, double d1, double d2) {
  if (f <= 0.0) return 0.0;
  return incomplete_beta(0.5 * d1, 0.5 * d2, d1 * f / (d1 * f + d2));
}

double f_critical(double alpha, double d1, double d2) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw ArgumentError("significance level must lie in (0, 1)");
  if (!(d1 > 0.0) || !(d2 > 0.0)) throw ArgumentError("F distribution needs positive degrees of freedom");
  const double target = 1.0 - alpha;
  double lo = 0.0;
  double hi = 1.0;
  while (f_cdf(hi, d1, d2) < target) {
    hi *= 2.0;
    if (hi > 1e12) throw NumericError("F quantile search diverged");
  }
  for (int i = 0; i < 200 && hi - lo > 1e-13 * hi; ++i) {
    const double mid = 0.5 * (lo + hi);
    (f_cdf(mid, d1, d2) < target ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

double nemenyi_q(std::size_t n_models, double alpha_level) {
  const std::array<double, 19>* table = nullptr;
  if (std::abs(alpha_level - 0.05) < 1e-12) table = &kQ05;
  if (std::abs(alpha_level - 0.10) < 1e-12) table = &kQ10;
  if (table == nullptr) throw ArgumentError("Nemenyi critical values are tabulated for alpha 0.05 and 0.10 only");
  if (n_models < 2 || n_models > 20)
    throw ArgumentError("Nemenyi critical values are tabulated for 2 to 20 models, got " + std::to_string(n_models));
  return (*table)[n_models - 2];
}

double nemenyi_cd(std::size_t n_models, std::size_t n_datasets, double alpha_level) {
  if (n_datasets < 1) throw ArgumentError("critical difference needs at least one dataset");
  const double s = static_cast<double>(n_models);
  return nemenyi_q(n_models, alpha_level) * std::sqrt(s * (s + 1.0) / (6.0 * static_cast<double>(n_datasets)));
}

BoolMatrix pairwise_verdicts(const RealVector& avg_ranks, double cd) {
  if (!(cd > 0.0)) throw ArgumentError("critical difference must be positive");
  const auto n = avg_ranks.size();
  BoolMatrix verdicts = BoolMatrix::Constant(n, n, false);
  for (Eigen::Index a = 0; a < n; ++a)
    for (Eigen::Index b = 0; b < n; ++b)
      verdicts(a, b) = a != b && avg_ranks(b) - avg_ranks(a) >= cd;
  return verdicts;
}

std::vector<std::string> beaten_by(const BoolMatrix& verdicts, const std::vector<std::string>& models,
                                   std::size_t model) {
  std::vector<std::string> out;
  for (Eigen::Index b = 0; b < verdicts.cols(); ++b)
    if (verdicts(static_cast<Eigen::Index>(model), b)) out.push_back(models[static_cast<std::size_t>(b)]);
  return out;
}

FriedmanReport friedman(const RealVector& avg_ranks, std::size_t n_models, std::size_t n_datasets,
                        double alpha_level) {
  if (n_models < 2 || n_datasets < 2) throw ArgumentError("Friedman test needs at least two models and two datasets");
  if (static_cast<std::size_t>(avg_ranks.size()) != n_models)
    throw ArgumentError("rank vector length does not match model count");

  const double s = static_cast<double>(n_models);
  const double r = static_cast<double>(n_datasets);
  FriedmanReport rep;
  rep.avg_ranks = avg_ranks;
  rep.n_models = n_models;
  rep.n_datasets = n_datasets;
  rep.alpha_level = alpha_level;
  rep.chi2 = 12.0 * r / (s * (s + 1.0)) * (avg_ranks.squaredNorm() - s * (s + 1.0) * (s + 1.0) / 4.0);
  // Rounding can push the statistic of an all-tied table a hair below zero.
  if (rep.chi2 < 0.0 && rep.chi2 > -1e-9) rep.chi2 = 0.0;
  rep.dof1 = s - 1.0;
  rep.dof2 = (r - 1.0) * (s - 1.0);
  rep.critical_f = f_critical(alpha_level, rep.dof1, rep.dof2);
  const double denom = r * (s - 1.0) - rep.chi2;
  if (denom <= 0.0) {
    rep.degenerate = true;
    rep.ff = std::numeric_limits<double>::infinity();
    rep.reject = true;
  } else {
    rep.ff = rep.chi2 * (r - 1.0) / denom;
    rep.reject = rep.ff > rep.critical_f;
  }
  if (n_models <= 20 && (std::abs(alpha_level - 0.05) < 1e-12 || std::abs(alpha_level - 0.10) < 1e-12)) {
    rep.nemenyi_cd = nemenyi_cd(n_models, n_datasets, alpha_level);
    rep.pairwise = pairwise_verdicts(avg_ranks, rep.nemenyi_cd);
  }
  return rep;
}

}  // namespace rvflx
