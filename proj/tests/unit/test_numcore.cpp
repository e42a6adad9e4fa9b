#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "ddiv/error.hpp"
#include "ddiv/linalg.hpp"
#include "ddiv/poly.hpp"
#include "ddiv/quadrature.hpp"

using namespace ddiv;

TEST(Poly2, EvaluatesAndDifferentiates) {
  const Poly2 p = Poly2::from_terms({{0, 0, 1.0}, {2, 1, 3.0}, {0, 3, -2.0}});
  EXPECT_DOUBLE_EQ(p(2.0, -1.0), 1.0 + 3.0 * 4.0 * -1.0 + 2.0);
  const Poly2 px = p.dx();
  EXPECT_EQ(px.bound_x(), 2);
  EXPECT_DOUBLE_EQ(px.coeff(1, 1), 6.0);
  EXPECT_DOUBLE_EQ(p.dy().coeff(0, 2), -6.0);
  EXPECT_EQ(p.total_degree(), 3);
  EXPECT_EQ(p.degree_x(), 2);
  EXPECT_EQ(p.degree_y(), 3);
}

TEST(Poly2, IntegratesOverReferenceSquare) {
  // Integral of x^2 y^2 over (-1,1)^2 is 4/9.
  EXPECT_NEAR(Poly2::monomial(2, 2).integrate_reference(), 4.0 / 9.0, 1e-15);
  EXPECT_EQ(Poly2::monomial(1, 2).integrate_reference(), 0.0);
  EXPECT_DOUBLE_EQ(Poly2::constant(1.0).integrate_reference(), 4.0);
}

TEST(Poly2, ProductAndBounds) {
  const Poly2 a = Poly2::from_terms({{1, 0, 1.0}, {0, 0, 1.0}});
  const Poly2 b = Poly2::from_terms({{1, 0, 1.0}, {0, 0, -1.0}});
  const Poly2 c = multiply(a, b, 3, 3);
  EXPECT_DOUBLE_EQ(c.coeff(2, 0), 1.0);
  EXPECT_DOUBLE_EQ(c.coeff(0, 0), -1.0);
  EXPECT_DOUBLE_EQ(c.coeff(1, 0), 0.0);
  EXPECT_THROW(multiply(Poly2::monomial(3, 0), Poly2::monomial(1, 0), 3, 3), DegreeBoundError);
  Poly2 d(1);
  EXPECT_THROW(d.set(2, 0, 1.0), DegreeBoundError);
  EXPECT_NO_THROW(d.set(2, 0, 0.0));
  EXPECT_THROW(Poly2(Poly2::kMaxBound + 1), DegreeBoundError);
}

TEST(Poly2, RestrictsToLines) {
  const Poly2 p = Poly2::from_terms({{1, 1, 1.0}, {0, 0, 2.0}});
  // Along x = s, y = 1 - s: 2 + s - s^2.
  const Poly1 r = p.restrict_to_line(0.0, 1.0, 1.0, -1.0);
  EXPECT_DOUBLE_EQ(r.coeff(0), 2.0);
  EXPECT_DOUBLE_EQ(r.coeff(1), 1.0);
  EXPECT_DOUBLE_EQ(r.coeff(2), -1.0);
  EXPECT_EQ(r.degree(), 2);
}

TEST(Poly1, Moments) {
  const Poly1 p({1.0, 2.0, 3.0});
  EXPECT_NEAR(p.moment(0), 2.0 + 2.0, 1e-15);
  EXPECT_NEAR(p.moment(1), 4.0 / 3.0, 1e-15);
  EXPECT_EQ(Poly1().degree(), -1);
}

TEST(Poly2, Laplacian) {
  const Poly2 p = Poly2::from_terms({{2, 0, 1.0}, {1, 2, 1.0}});
  const Poly2 l = laplacian(p);
  EXPECT_DOUBLE_EQ(l(0.3, 0.7), 2.0 + 2.0 * 0.3);
}

class GaussExactness : public ::testing::TestWithParam<int> {};

TEST_P(GaussExactness, IntegratesDegree2nMinus1) {
  const int n = GetParam();
  const QuadRule& r = gauss_rule(n, 1);
  ASSERT_EQ(static_cast<int>(r.size()), n);
  for (int k = 0; k <= 2 * n - 1; ++k) {
    double s = 0.0;
    for (std::size_t i = 0; i < r.size(); ++i) s += r.weights[i] * std::pow(r.points[i][0], k);
    const double exact = k % 2 ? 0.0 : 2.0 / (k + 1);
    EXPECT_NEAR(s, exact, 1e-14) << "n=" << n << " k=" << k;
  }
}

INSTANTIATE_TEST_SUITE_P(Orders, GaussExactness, ::testing::Values(1, 2, 3, 4, 6, 8, 10, 16));

TEST(Quadrature, TensorRuleAndErrors) {
  const QuadRule& r = cached_gauss_rule(4, 2);
  EXPECT_EQ(r.size(), 16u);
  double s = 0.0;
  for (std::size_t i = 0; i < r.size(); ++i) s += r.weights[i] * std::pow(r.points[i][0], 6) * std::pow(r.points[i][1], 4);
  EXPECT_NEAR(s, (2.0 / 7.0) * (2.0 / 5.0), 1e-15);
  EXPECT_THROW(gauss_rule(0, 1), ParameterError);
  EXPECT_THROW(gauss_rule(17, 1), ParameterError);
  EXPECT_THROW(gauss_rule(3, 3), ParameterError);
  EXPECT_EQ(&cached_gauss_rule(5, 1), &cached_gauss_rule(5, 1));
}

TEST(DenseSolve, SolvesAndReportsSingularColumn) {
  DenseMatrix a(3, 3);
  a << 0, 1, 2, 1, 0, 3, 4, -3, 8;
  const Vector x = solve_dense(a, Vector::Ones(3));
  EXPECT_LT((a * x - Vector::Ones(3)).norm(), 1e-13);

  DenseMatrix s(3, 3);
  s << 1, 2, 3, 2, 4, 6, 0, 0, 1;
  try {
    solve_dense(s, Vector::Ones(3));
    FAIL() << "expected SingularMatrixError";
  } catch (const SingularMatrixError& e) {
    EXPECT_EQ(e.index(), 1);
  }
}

namespace {

SparseMatrix random_saddle(int n, int m, unsigned seed) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> d(-1.0, 1.0);
  SparseSystemCore s(n + m);
  for (int i = 0; i < n; ++i) {
    s.add_diagonal(i, 4.0 + d(rng));
    if (i + 1 < n) s.add_symmetric(i, i + 1, 0.5 * d(rng));
  }
  for (int r = 0; r < m; ++r) {
    s.add_symmetric(n + r, r, 1.0);
    s.add_symmetric(n + r, (r + 3) % n, d(rng));
  }
  return s.matrix();
}

}  // namespace

TEST(SaddleSolve, SparseMatchesDense) {
  const SparseMatrix a = random_saddle(40, 10, 7);
  EXPECT_EQ(max_asymmetry(a), 0.0);
  const Vector b = Vector::LinSpaced(50, -1.0, 2.0);
  SolveOptions sp, de;
  sp.strategy = SolverStrategy::Sparse;
  de.strategy = SolverStrategy::Dense;
  SolveInfo info;
  const Vector x1 = solve_saddle(a, b, sp, &info);
  EXPECT_EQ(info.used, SolverStrategy::Sparse);
  const Vector x2 = solve_saddle(a, b, de);
  EXPECT_LT((x1 - x2).norm(), 1e-12 * x2.norm());
  EXPECT_LT(relative_residual(a, x1, b), 1e-13);
}

TEST(SaddleSolve, DetectsStructuralSingularity) {
  SparseSystemCore s(4);
  s.add_diagonal(0, 1.0);
  s.add_diagonal(1, 1.0);
  s.add_symmetric(0, 2, 1.0);
  s.add_symmetric(1, 2, 1.0);
  // Unknown 3 has an empty row and column.
  s.add_diagonal(3, 0.0);
  for (SolverStrategy st : {SolverStrategy::Sparse, SolverStrategy::Dense}) {
    SolveOptions o;
    o.strategy = st;
    EXPECT_THROW(solve_saddle(s.matrix(), Vector::Ones(4), o), SingularMatrixError);
  }
}

TEST(SparseSystemCore, UpperRoundTrip) {
  const SparseMatrix a = random_saddle(10, 3, 2);
  const SparseSystemCore c = SparseSystemCore::from_upper(SparseMatrix(a.triangularView<Eigen::Upper>()));
  EXPECT_EQ((c.matrix() - a).norm(), 0.0);
  SparseSystemCore bad(2);
  EXPECT_THROW(bad.add_symmetric(0, 2, 1.0), ParameterError);
}
