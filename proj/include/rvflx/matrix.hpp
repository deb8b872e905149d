#pragma once

#include <complex>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace rvflx {

using Complex = std::complex<double>;

template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using RowVector = Eigen::Matrix<Scalar, 1, Eigen::Dynamic>;

using RealMatrix = Matrix<double>;
using ComplexMatrix = Matrix<Complex>;
using RealVector = Eigen::VectorXd;
using RealRowVector = RowVector<double>;
using ComplexRowVector = RowVector<Complex>;

/// Raised for malformed arguments: bad shapes, bounds, non-positive regularization.
class ArgumentError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Raised when inputs contain NaN/Inf or a factorization breaks down.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised for unusable datasets: too few rows or classes, malformed cells.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Deterministic generator. The engine is mt19937_64, whose output sequence is
/// fixed by the standard; every conversion to doubles and bounded integers is
/// done here rather than through <random> distributions, which are
/// implementation-defined.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : seed_(seed), engine_(seed) {}

  std::uint64_t seed() const { return seed_; }
  static constexpr const char* algorithm() { return "mt19937_64"; }

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform on [0, 1) with 53 random bits.
  double unit() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * unit(); }

  /// Uniform integer in [0, n); rejection sampling so there is no modulo bias.
  std::uint64_t below(std::uint64_t n);

  /// Independent child stream, a pure function of (seed, stream).
  Rng split(std::uint64_t stream) const;

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
};

/// splitmix64 finalizer, used to derive child seeds.
std::uint64_t mix64(std::uint64_t x);

/// Combine a seed with another 64-bit value into a new well-mixed seed.
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t value) {
  return mix64(seed ^ mix64(value + 0x9e3779b97f4a7c15ULL));
}

/// 64-bit FNV-1a over a string.
std::uint64_t fnv1a(const std::string& text, std::uint64_t basis = 0xcbf29ce484222325ULL);

/// rows x cols matrix of i.i.d. uniform [lo, hi) draws, filled in row-major order.
RealMatrix uniform_matrix(Rng& rng, Eigen::Index rows, Eigen::Index cols, double lo, double hi);

/// Standard complex matrix product; throws ArgumentError on shape mismatch.
ComplexMatrix complex_matmul(const ComplexMatrix& a, const ComplexMatrix& b);

template <typename Derived>
bool all_finite(const Eigen::MatrixBase<Derived>& m) {
  return m.allFinite();
}

/// Which closed form of the regularized least-squares problem to use.
/// auto picks dual iff samples < features.
enum class SolveForm { primal, dual, automatic };

/// How the complex solve transposes the design matrix. `hermitian` minimizes
/// the stated objective; `literal` uses the plain transpose.
enum class TransposeKind { hermitian, literal };

inline SolveForm resolve_form(SolveForm form, Eigen::Index samples, Eigen::Index features) {
  if (form != SolveForm::automatic) return form;
  return samples < features ? SolveForm::dual : SolveForm::primal;
}

std::string to_string(SolveForm form);

namespace detail {

template <typename Scalar>
Matrix<Scalar> transposed(const Matrix<Scalar>& g, TransposeKind kind) {
  if (kind == TransposeKind::literal) return g.transpose();
  return g.adjoint();
}

}  // namespace detail

/// Ridge solution of  min  c/2 ||G eta - W||^2 + 1/2 ||eta||^2.
///
/// primal: (G^H G + I/c)^{-1} G^H W
/// dual:   G^H (G G^H + I/c)^{-1} W
///
/// The Gram matrix and right-hand side are formed once; solve(c) adds I/c and
/// factors with a pivoted LDL^T (Hermitian case) or partial-pivot LU (literal
/// transpose of a complex G, where the Gram matrix is only complex-symmetric).
/// No explicit inverse is formed.
template <typename Scalar>
class RidgeSystem {
 public:
  RidgeSystem(const Matrix<Scalar>& g, const RealMatrix& w, SolveForm form,
              TransposeKind transpose = TransposeKind::hermitian)
      : hermitian_(transpose == TransposeKind::hermitian || !Eigen::NumTraits<Scalar>::IsComplex),
        form_(resolve_form(form, g.rows(), g.cols())) {
    if (g.rows() != w.rows())
      throw ArgumentError("design matrix and targets have different row counts (" +
                          std::to_string(g.rows()) + " vs " + std::to_string(w.rows()) + ")");
    if (!all_finite(g) || !all_finite(w)) throw NumericError("non-finite input to regularized solve");
    gt_ = detail::transposed(g, transpose);
    const Matrix<Scalar> targets = w.template cast<Scalar>();
    if (form_ == SolveForm::primal) {
      gram_ = gram_of(gt_);
      rhs_ = gt_ * targets;
      gt_.resize(0, 0);
    } else {
      gram_ = gram_of(g);
      rhs_ = targets;
    }
  }

  SolveForm form() const { return form_; }

  Matrix<Scalar> solve(double c) const {
    if (!(c > 0.0)) throw ArgumentError("regularization parameter must be positive");
    if (!std::isfinite(c)) throw NumericError("non-finite regularization parameter");
    Matrix<Scalar> gram = gram_;
    gram.diagonal().array() += Scalar(1.0 / c);
    Matrix<Scalar> eta;
    if (form_ == SolveForm::primal) {
      eta = factor_solve(gram, rhs_);
    } else {
      eta = gt_ * factor_solve(gram, rhs_);
    }
    if (!all_finite(eta)) throw NumericError("regularized solve produced non-finite weights");
    return eta;
  }

 private:
  Matrix<Scalar> gram_of(const Matrix<Scalar>& factor) const {
    const Eigen::Index n = factor.rows();
    Matrix<Scalar> gram = Matrix<Scalar>::Zero(n, n);
    if (hermitian_) {
      // Only the lower triangle is formed; LDLT reads nothing else.
      gram.template selfadjointView<Eigen::Lower>().rankUpdate(factor);
    } else {
      gram.noalias() = factor * factor.transpose();
    }
    return gram;
  }

  Matrix<Scalar> factor_solve(const Matrix<Scalar>& gram, const Matrix<Scalar>& rhs) const {
    if (hermitian_) return gram.ldlt().solve(rhs);
    return gram.partialPivLu().solve(rhs);
  }

  bool hermitian_;
  SolveForm form_;
  Matrix<Scalar> gt_;  // kept for the dual back-substitution only
  Matrix<Scalar> gram_;
  Matrix<Scalar> rhs_;
};

template <typename Scalar>
Matrix<Scalar> regularized_solve(const Matrix<Scalar>& g, const RealMatrix& w, double c,
                                 SolveForm form,
                                 TransposeKind transpose = TransposeKind::hermitian) {
  if (!(c > 0.0)) throw ArgumentError("regularization parameter must be positive");
  return RidgeSystem<Scalar>(g, w, form, transpose).solve(c);
}

/// Optimality certificate for regularized_solve: max-norm of
/// (G^H G + I/c) eta - G^H W, and the scale max(1, max-norm of G^H W).
struct ResidualCertificate {
  double residual = 0.0;
  double scale = 1.0;
  bool holds(double tolerance = 1e-8) const { return residual <= tolerance * scale; }
};

template <typename Scalar>
ResidualCertificate normal_equation_residual(const Matrix<Scalar>& g, const RealMatrix& w, double c,
                                             const Matrix<Scalar>& eta,
                                             TransposeKind transpose = TransposeKind::hermitian) {
  const Matrix<Scalar> gt = detail::transposed(g, transpose);
  const Matrix<Scalar> rhs = gt * w.template cast<Scalar>();
  const Matrix<Scalar> lhs = gt * (g * eta) + eta / Scalar(c);
  ResidualCertificate cert;
  cert.residual = rhs.size() == 0 ? 0.0 : (lhs - rhs).cwiseAbs().maxCoeff();
  cert.scale = std::max(1.0, rhs.size() == 0 ? 0.0 : rhs.cwiseAbs().maxCoeff());
  return cert;
}

/// Complex output-weight solve against real targets.
ComplexMatrix hermitian_solve_regularized(const ComplexMatrix& g, const RealMatrix& w, double c,
                                          SolveForm form = SolveForm::automatic,
                                          TransposeKind transpose = TransposeKind::hermitian);

}  // namespace rvflx
