#include <gtest/gtest.h>

#include "mvem/polynomials.hpp"
#include "mvem/quadrature.hpp"
#include "support.hpp"

using namespace mvem;

TEST(Monomials, DimensionCounts) {
  EXPECT_EQ(dim_poly(3, -1), 0);
  EXPECT_EQ(dim_poly(1, 4), 5);
  EXPECT_EQ(dim_poly(2, 2), 6);
  EXPECT_EQ(dim_poly(3, 2), 10);
  EXPECT_EQ(dim_poly(3, 4), 35);
  // n_grad and n_oplus split [P_k]^d
  for (int d = 2; d <= 3; ++d)
    for (int k = 0; k <= 4; ++k) EXPECT_EQ(dim_grad(d, k) + dim_oplus(d, k), d * dim_poly(d, k));
  EXPECT_EQ(dim_oplus(3, 0), 0);
  EXPECT_EQ(dim_oplus(3, 1), 3);
  EXPECT_EQ(dim_oplus(2, 1), 1);
}

TEST(Monomials, GradedLexOrderAndPrefixProperty) {
  const auto& e = exponents(3, 2);
  ASSERT_EQ(e.size(), 10u);
  EXPECT_EQ(e[0], (Exponent{0, 0, 0}));
  EXPECT_EQ(e[1], (Exponent{1, 0, 0}));
  EXPECT_EQ(e[2], (Exponent{0, 1, 0}));
  EXPECT_EQ(e[3], (Exponent{0, 0, 1}));
  EXPECT_EQ(e[4], (Exponent{2, 0, 0}));
  EXPECT_EQ(e[9], (Exponent{0, 0, 2}));
  for (int d = 1; d <= 3; ++d)
    for (int k = 1; k <= 4; ++k) {
      const auto& lo = exponents(d, k - 1);
      const auto& hi = exponents(d, k);
      for (std::size_t i = 0; i < lo.size(); ++i) EXPECT_EQ(lo[i], hi[i]);
      for (std::size_t i = 0; i < hi.size(); ++i) EXPECT_EQ(monomial_index(d, hi[i]), static_cast<int>(i));
    }
}

TEST(Monomials, ScaledEvaluationAndGradientAgreeWithFiniteDifferences) {
  MonomialBasis b(3, 3, Vec3(0.2, -0.1, 0.4), 0.7);
  Vec3 x(0.5, 0.3, -0.2);
  Vector v = b.eval(x);
  const auto& e = exponents(3, 3);
  for (int i = 0; i < b.size(); ++i) {
    double ref = 1.0;
    for (int a = 0; a < 3; ++a) ref *= std::pow((x(a) - b.center()(a)) / 0.7, e[i][a]);
    EXPECT_NEAR(v(i), ref, 1e-14);
  }
  Matrix g = b.gradient(x);
  const double h = 1e-6;
  for (int a = 0; a < 3; ++a) {
    Vec3 dx = Vec3::Zero();
    dx(a) = h;
    Vector fd = (b.eval(x + dx) - b.eval(x - dx)) / (2 * h);
    EXPECT_LT((g.row(a).transpose() - fd).norm(), 1e-8);
  }
}

TEST(Monomials, DerivativeMatrixMatchesGradient) {
  for (int d = 1; d <= 3; ++d)
    for (int k = 1; k <= 4; ++k) {
      const double h = 1.3;
      MonomialBasis hi(d, k, Vec3::Zero(), h), lo(d, k - 1, Vec3::Zero(), h);
      Vec3 x(0.3, -0.7, 0.45);
      Matrix g = hi.gradient(x);
      for (int a = 0; a < d; ++a) {
        Matrix dm = derivative_matrix(d, k, h, a);
        EXPECT_LT((dm.transpose() * lo.eval(x) - g.row(a).transpose()).norm(), 1e-12);
      }
    }
}

TEST(Monomials, GradientBasisColumnsAreMonomialGradients) {
  const int d = 3, k = 2;
  const double h = 0.8;
  Matrix gb = gradient_basis(d, k, h);
  ASSERT_EQ(gb.cols(), dim_grad(d, k));
  MonomialBasis mk(d, k, Vec3::Zero(), h), mk1(d, k + 1, Vec3::Zero(), h);
  Vec3 x(0.1, 0.2, -0.3);
  Matrix g = mk1.gradient(x);
  Vector vk = mk.eval(x);
  for (int b = 0; b < gb.cols(); ++b)
    for (int a = 0; a < d; ++a)
      EXPECT_NEAR(gb.col(b).segment(a * mk.size(), mk.size()).dot(vk), g(a, b + 1), 1e-13);
}

TEST(Monomials, OplusBasisIsOrthogonalToGradients) {
  std::mt19937 rng(3);
  for (int d = 2; d <= 3; ++d)
    for (int k = 1; k <= 3; ++k) {
      QuadratureRule rule;
      double measure = 0.0;
      Vec3 c;
      double h;
      if (d == 2) {
        auto loop = fixtures::random_star_polygon(rng, 7);
        rule = polygon_rule(loop, 2 * k + 2);
        measure = polygon_area(loop);
        c = polygon_centroid(loop);
        h = diameter(loop);
      } else {
        auto f = fixtures::random_polyhedron(rng);
        rule = polyhedron_rule(f, 2 * k + 2);
        measure = polyhedron_volume(f);
        c = polyhedron_centroid(f);
        std::vector<Vec3> all;
        for (auto& l : f) all.insert(all.end(), l.begin(), l.end());
        h = diameter(all);
      }
      MonomialBasis mb(d, k, c, h);
      Matrix mass = monomial_mass(mb, rule);
      Matrix op = oplus_basis(mb, rule);
      ASSERT_EQ(op.cols(), dim_oplus(d, k));
      Matrix vm = Matrix::Zero(d * mb.size(), d * mb.size());
      for (int a = 0; a < d; ++a) vm.block(a * mb.size(), a * mb.size(), mb.size(), mb.size()) = mass;
      Matrix gb = gradient_basis(d, k, h);
      Matrix gram = op.transpose() * vm * op;
      const double target = measure / (h * h);
      EXPECT_LT((gram - target * Matrix::Identity(op.cols(), op.cols())).norm(), 1e-9 * target);
      EXPECT_LT((gb.transpose() * vm * op).norm(), 1e-9 * target * std::max(1.0, h * gb.norm()));
    }
}

TEST(Monomials, DivergenceCoefficientsOfLinearField) {
  // u = (x, y, z) / h * h -> div = 3
  const double h = 2.0;
  const int n = dim_poly(3, 1);
  Vector c = Vector::Zero(3 * n);
  c(0 * n + 1) = h;
  c(1 * n + 2) = h;
  c(2 * n + 3) = h;
  Vector dv = divergence_coefficients(3, 1, h, c);
  ASSERT_EQ(dv.size(), 1);
  EXPECT_NEAR(dv(0), 3.0, 1e-14);
}
