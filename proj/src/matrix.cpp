#include "rvflx/matrix.hpp"

namespace rvflx {

std::uint64_t Rng::below(std::uint64_t n) {
  if (n == 0) throw ArgumentError("Rng::below requires n > 0");
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % n;
  std::uint64_t x = engine_();
  while (x >= limit) x = engine_();
  return x % n;
}

Rng Rng::split(std::uint64_t stream) const { return Rng(mix_seed(seed_, stream)); }

std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t fnv1a(const std::string& text, std::uint64_t basis) {
  std::uint64_t h = basis;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

RealMatrix uniform_matrix(Rng& rng, Eigen::Index rows, Eigen::Index cols, double lo, double hi) {
  if (rows < 1 || cols < 1) throw ArgumentError("uniform_matrix: dimensions must be positive");
  if (!(lo < hi) || !std::isfinite(lo) || !std::isfinite(hi))
    throw ArgumentError("uniform_matrix: require finite lo < hi");
  RealMatrix m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j) {
      double v = rng.uniform(lo, hi);
      // lo + (hi-lo)*u can round up to hi for u close to 1.
      if (v >= hi) v = std::nextafter(hi, lo);
      m(i, j) = v;
    }
  return m;
}

ComplexMatrix complex_matmul(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (a.cols() != b.rows())
    throw ArgumentError("complex_matmul: inner dimensions differ (" + std::to_string(a.cols()) +
                        " vs " + std::to_string(b.rows()) + ")");
  return a * b;
}

std::string to_string(SolveForm form) {
  switch (form) {
    case SolveForm::primal: return "primal";
    case SolveForm::dual: return "dual";
    case SolveForm::automatic: return "auto";
  }
  return "auto";
}

ComplexMatrix hermitian_solve_regularized(const ComplexMatrix& g, const RealMatrix& w, double c,
                                          SolveForm form, TransposeKind transpose) {
  return regularized_solve<Complex>(g, w, c, form, transpose);
}

}  // namespace rvflx
