#pragma once

#include <optional>
#include <string>
#include <vector>

#include "rvflx/matrix.hpp"

namespace rvflx {

/// Accuracies (percent) of every model on every dataset. Rows are datasets,
/// columns are models.
struct AccuracyTable {
  std::vector<std::string> models;
  std::vector<std::string> datasets;
  RealMatrix accuracy;
  std::optional<RealMatrix> stddev;  // same shape, when the source provides it
};

using BoolMatrix = Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic>;

/// Per-dataset ranks (1 = best accuracy, mid-ranks on ties); rows are datasets.
RealMatrix rank_matrix(const AccuracyTable& table);

/// Average rank of each model over all datasets.
RealVector average_ranks(const AccuracyTable& table);

struct FriedmanReport {
  RealVector avg_ranks;
  std::size_t n_models = 0;
  std::size_t n_datasets = 0;
  double chi2 = 0.0;
  double ff = 0.0;
  double dof1 = 0.0;
  double dof2 = 0.0;
  double alpha_level = 0.05;
  double critical_f = 0.0;
  bool reject = false;
  /// R(S-1) - chi2 <= 0: F_F is unbounded, reported as +inf with reject = true.
  bool degenerate = false;
  double nemenyi_cd = 0.0;
  BoolMatrix pairwise;  // pairwise(a, b): model a significantly better than b
};

/// Friedman chi-square over average ranks and the Iman-Davenport F statistic,
/// compared against the F quantile with (S-1, (R-1)(S-1)) degrees of freedom.
/// Also fills the Nemenyi critical difference and verdicts when alpha_level is
/// tabulated for S models.
FriedmanReport friedman(const RealVector& avg_ranks, std::size_t n_models, std::size_t n_datasets,
                        double alpha_level = 0.05);

/// Regularized incomplete beta I_x(a, b) by Lentz's continued fraction.
double incomplete_beta(double a, double b, double x);

/// P(F <= f) for an F(d1, d2) variable.
double f_cdf(double f, double d1, double d2);

/// Upper-tail critical value: the (1 - alpha) quantile of F(d1, d2).
double f_critical(double alpha, double d1, double d2);

/// Two-tailed Nemenyi critical value q_alpha (studentized range / sqrt 2),
/// tabulated for 2..20 models at alpha 0.05 and 0.10.
double nemenyi_q(std::size_t n_models, double alpha_level);

/// q_alpha * sqrt(S (S + 1) / (6 R)).
double nemenyi_cd(std::size_t n_models, std::size_t n_datasets, double alpha_level);

/// verdict(a, b) is true iff rank(b) - rank(a) >= cd.
BoolMatrix pairwise_verdicts(const RealVector& avg_ranks, double cd);

/// Names of the models `model` is significantly better than.
std::vector<std::string> beaten_by(const BoolMatrix& verdicts, const std::vector<std::string>& models,
                                   std::size_t model);

}  // namespace rvflx
