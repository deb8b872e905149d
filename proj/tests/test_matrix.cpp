#include <doctest.h>

#include "oracles.hpp"
#include "rvflx/matrix.hpp"

using namespace rvflx;

TEST_CASE("uniform_matrix stays inside [lo, hi)") {
  Rng rng(7);
  const RealMatrix m = uniform_matrix(rng, 2, 2, -1.0, 1.0);
  CHECK(m.rows() == 2);
  CHECK(m.cols() == 2);
  CHECK((m.array() >= -1.0).all());
  CHECK((m.array() < 1.0).all());
}

TEST_CASE("uniform_matrix is deterministic per seed") {
  Rng a(7), b(7), c(8);
  const RealMatrix ma = uniform_matrix(a, 3, 5, -1.0, 1.0);
  const RealMatrix mb = uniform_matrix(b, 3, 5, -1.0, 1.0);
  const RealMatrix mc = uniform_matrix(c, 3, 5, -1.0, 1.0);
  CHECK(std::memcmp(ma.data(), mb.data(), sizeof(double) * 15) == 0);
  CHECK(ma != mc);
}

TEST_CASE("uniform_matrix sample mean is near the midpoint") {
  Rng rng(7);
  const RealMatrix m = uniform_matrix(rng, 1000, 10, -1.0, 1.0);
  // Same generator run by hand, independent of the matrix fill.
  Rng raw(7);
  double total = 0.0;
  for (int i = 0; i < 10000; ++i) total += -1.0 + 2.0 * static_cast<double>(raw.next_u64() >> 11) * 0x1.0p-53;
  const double independent_mean = total / 10000.0;
  CHECK(independent_mean > -0.05);
  CHECK(independent_mean < 0.05);
  CHECK(m.mean() == doctest::Approx(independent_mean).epsilon(1e-9));
}

TEST_CASE("uniform_matrix argument errors") {
  Rng rng(1);
  CHECK_THROWS_AS(uniform_matrix(rng, 0, 3, -1, 1), ArgumentError);
  CHECK_THROWS_AS(uniform_matrix(rng, 3, 0, -1, 1), ArgumentError);
  CHECK_THROWS_AS(uniform_matrix(rng, 2, 2, 1, 1), ArgumentError);
  CHECK_THROWS_AS(uniform_matrix(rng, 2, 2, 1, -1), ArgumentError);
}

TEST_CASE("Rng::below covers its range and split streams differ") {
  Rng rng(3);
  std::vector<int> seen(5, 0);
  for (int i = 0; i < 1000; ++i) ++seen[rng.below(5)];
  for (int count : seen) CHECK(count > 150);
  Rng parent(3);
  CHECK(parent.split(1).next_u64() == Rng(3).split(1).next_u64());
  CHECK(parent.split(1).next_u64() != parent.split(2).next_u64());
}

TEST_CASE("complex_matmul: i * i = -1") {
  ComplexMatrix a(1, 1);
  a(0, 0) = {0.0, 1.0};
  const ComplexMatrix p = complex_matmul(a, a);
  CHECK(p(0, 0).real() == -1.0);
  CHECK(p(0, 0).imag() == 0.0);
}

TEST_CASE("complex_matmul: identity and scalar-loop oracle") {
  Rng rng(11);
  const ComplexMatrix a = oracle::random_complex(rng, 3, 4);
  const ComplexMatrix b = oracle::random_complex(rng, 4, 2);
  CHECK(complex_matmul(a, ComplexMatrix::Identity(4, 4)) == a);
  CHECK(oracle::max_relative_diff(complex_matmul(a, b), oracle::naive_matmul(a, b)) < 1e-14);
  CHECK_THROWS_AS(complex_matmul(a, a), ArgumentError);
}

TEST_CASE("complex_matmul is associative and distributive") {
  Rng rng(5);
  for (int trial = 0; trial < 25; ++trial) {
    const auto n = 1 + static_cast<Eigen::Index>(rng.below(5));
    const auto m = 1 + static_cast<Eigen::Index>(rng.below(5));
    const auto p = 1 + static_cast<Eigen::Index>(rng.below(5));
    const auto q = 1 + static_cast<Eigen::Index>(rng.below(5));
    const ComplexMatrix a = oracle::random_complex(rng, n, m);
    const ComplexMatrix b = oracle::random_complex(rng, m, p);
    const ComplexMatrix b2 = oracle::random_complex(rng, m, p);
    const ComplexMatrix c = oracle::random_complex(rng, p, q);
    CHECK(oracle::max_relative_diff(complex_matmul(complex_matmul(a, b), c),
                                    complex_matmul(a, complex_matmul(b, c))) < 1e-10);
    CHECK(oracle::max_relative_diff(complex_matmul(a, b + b2), complex_matmul(a, b) + complex_matmul(a, b2)) <
          1e-10);
  }
}

TEST_CASE("hermitian_solve_regularized: ridge limit on the identity") {
  const ComplexMatrix g = ComplexMatrix::Identity(2, 2);
  const RealMatrix w = RealMatrix::Identity(2, 2);
  const ComplexMatrix eta = hermitian_solve_regularized(g, w, 1e12);
  CHECK((eta - ComplexMatrix::Identity(2, 2)).cwiseAbs().maxCoeff() < 1e-6);
}

TEST_CASE("hermitian_solve_regularized: primal and dual agree") {
  Rng rng(21);
  const ComplexMatrix g = oracle::random_complex(rng, 5, 8);
  const RealMatrix w = uniform_matrix(rng, 5, 3, -1, 1);
  for (double c : {1e-3, 1.0, 1e3}) {
    const ComplexMatrix primal = hermitian_solve_regularized(g, w, c, SolveForm::primal);
    const ComplexMatrix dual = hermitian_solve_regularized(g, w, c, SolveForm::dual);
    CHECK(oracle::max_relative_diff(primal, dual) <= 1e-8);
    CHECK(normal_equation_residual<Complex>(g, w, c, primal).holds());
    CHECK(normal_equation_residual<Complex>(g, w, c, dual).holds());
  }
}

TEST_CASE("hermitian_solve_regularized: real G gives a real solution") {
  Rng rng(4);
  const RealMatrix g = uniform_matrix(rng, 9, 4, -1, 1);
  const RealMatrix w = uniform_matrix(rng, 9, 2, 0, 1);
  const ComplexMatrix eta = hermitian_solve_regularized(g.cast<Complex>(), w, 10.0);
  CHECK(eta.imag().cwiseAbs().maxCoeff() <= 1e-12);
  // Real-system oracle: the same normal equations solved in real arithmetic.
  const RealMatrix gram = g.transpose() * g + RealMatrix::Identity(4, 4) / 10.0;
  const RealMatrix real_eta = gram.fullPivLu().solve(g.transpose() * w);
  CHECK(oracle::max_relative_diff(eta.real(), real_eta) < 1e-10);
}

TEST_CASE("hermitian_solve_regularized: automatic form follows the shape rule") {
  CHECK(resolve_form(SolveForm::automatic, 5, 8) == SolveForm::dual);
  CHECK(resolve_form(SolveForm::automatic, 8, 8) == SolveForm::primal);
  CHECK(resolve_form(SolveForm::automatic, 9, 8) == SolveForm::primal);
  CHECK(resolve_form(SolveForm::primal, 2, 8) == SolveForm::primal);
}

TEST_CASE("hermitian_solve_regularized: errors") {
  const ComplexMatrix g = ComplexMatrix::Identity(2, 2);
  const RealMatrix w = RealMatrix::Identity(2, 2);
  CHECK_THROWS_AS(hermitian_solve_regularized(g, w, 0.0), ArgumentError);
  CHECK_THROWS_AS(hermitian_solve_regularized(g, w, -1.0), ArgumentError);
  CHECK_THROWS_AS(hermitian_solve_regularized(g, RealMatrix::Identity(3, 3), 1.0), ArgumentError);
  ComplexMatrix bad = g;
  bad(0, 1) = {std::nan(""), 0.0};
  CHECK_THROWS_AS(hermitian_solve_regularized(bad, w, 1.0), NumericError);
  RealMatrix bad_w = w;
  bad_w(1, 1) = std::numeric_limits<double>::infinity();
  CHECK_THROWS_AS(hermitian_solve_regularized(g, bad_w, 1.0), NumericError);
}

TEST_CASE("literal transpose solves the plain-transpose normal equations") {
  Rng rng(31);
  const ComplexMatrix g = oracle::random_complex(rng, 7, 4);
  const RealMatrix w = uniform_matrix(rng, 7, 2, 0, 1);
  const ComplexMatrix literal = hermitian_solve_regularized(g, w, 5.0, SolveForm::primal, TransposeKind::literal);
  const ComplexMatrix literal_dual = hermitian_solve_regularized(g, w, 5.0, SolveForm::dual, TransposeKind::literal);
  const ComplexMatrix hermitian = hermitian_solve_regularized(g, w, 5.0, SolveForm::primal);
  CHECK(normal_equation_residual<Complex>(g, w, 5.0, literal, TransposeKind::literal).holds());
  CHECK(oracle::max_relative_diff(literal, literal_dual) < 1e-8);
  CHECK(oracle::max_relative_diff(literal, hermitian) > 1e-3);
}
