#include <gtest/gtest.h>

#include "mvem/vem_local.hpp"
#include "support.hpp"

using namespace mvem;

namespace {

std::vector<ElementSpace> spaces(int d) {
  std::vector<ElementSpace> s;
  for (int k = 0; k <= 3; ++k) s.push_back(ElementSpace::rt(d, k));
  if (d == 3)
    for (int k = 1; k <= 3; ++k) s.push_back(ElementSpace::bdm(3, k));
  return s;
}

LocalMatrices local(const ElementSpace& sp, const ElementGeometry& g, const Matrix& nu,
                    const LocalOptions& opt = {}) {
  return compute_local_matrices(sp, g, std::vector<Matrix>(g.rule.size(), nu), opt);
}

}  // namespace

TEST(ElementSpace, ParseAndValidate) {
  EXPECT_EQ(ElementSpace::parse(3, "RT2").k_div, 2);
  EXPECT_EQ(ElementSpace::parse(3, "BDM2").k_div, 1);
  EXPECT_EQ(ElementSpace::parse(3, "bdm1").name(), "BDM1");
  EXPECT_THROW(ElementSpace::parse(2, "BDM1"), ConfigError);
  EXPECT_THROW(ElementSpace::parse(3, "RT5"), ConfigError);
  EXPECT_THROW(ElementSpace::parse(3, "BDM0"), ConfigError);
  EXPECT_THROW(ElementSpace::parse(3, "XY1"), ConfigError);
}

TEST(DofLayout, CountsPerFamily) {
  // hexahedron, RT1: 6 faces x 3 + (n_1^3 - 1 = 3) + n_oplus(3,1) = 3
  DofLayout l = dof_layout(ElementSpace::rt(3, 1), 6);
  EXPECT_EQ(l.per_facet, 3);
  EXPECT_EQ(l.num_grad, 3);
  EXPECT_EQ(l.num_oplus, 3);
  EXPECT_EQ(l.total(), 24);
  // BDM1: no type-ii DOFs
  DofLayout b = dof_layout(ElementSpace::bdm(3, 1), 6);
  EXPECT_EQ(b.num_grad, 0);
  EXPECT_EQ(b.num_oplus, 3);
  // RT0 on a polygon with 5 edges: only edge DOFs
  EXPECT_EQ(dof_layout(ElementSpace::rt(2, 0), 5).total(), 5);
  // 1D RT2: two endpoints + 2 interior moments
  EXPECT_EQ(dof_layout(ElementSpace::rt(1, 2), 2).total(), 4);
}

TEST(LocalMatrices, IdentitiesOnRandomPolygons) {
  std::mt19937 rng(11);
  for (int trial = 0; trial < 10; ++trial) {
    auto loop = fixtures::random_star_polygon(rng, 3 + trial % 6);
    Matrix nu = fixtures::random_spd(rng, 2);
    for (const auto& sp : spaces(2)) {
      auto g = fixtures::polygon_element(loop, 2 * sp.k + 4);
      auto e = fixtures::check_identities(sp, g, nu);
      EXPECT_LT(e.bd, 1e-10) << sp.name();
      EXPECT_LT(e.pid, 1e-10) << sp.name();
      EXPECT_LT(e.ksd, 1e-10) << sp.name();
      EXPECT_LT(e.vd, 1e-10) << sp.name();
    }
  }
}

TEST(LocalMatrices, IdentitiesOnRandomPolyhedra) {
  std::mt19937 rng(12);
  for (int trial = 0; trial < 6; ++trial) {
    auto faces = fixtures::random_polyhedron(rng);
    Matrix nu = fixtures::random_spd(rng, 3);
    for (const auto& sp : spaces(3)) {
      auto g = fixtures::polyhedron_element(faces, 2 * sp.k + 4, &rng);
      auto e = fixtures::check_identities(sp, g, nu);
      EXPECT_LT(e.bd, 1e-10) << sp.name();
      EXPECT_LT(e.pid, 1e-10) << sp.name();
      EXPECT_LT(e.ksd, 1e-10) << sp.name();
      EXPECT_LT(e.vd, 1e-10) << sp.name();
    }
  }
}

TEST(LocalMatrices, StiffnessIsSymmetricPositiveSemidefinite) {
  std::mt19937 rng(13);
  auto faces = fixtures::random_polyhedron(rng);
  for (const auto& sp : spaces(3)) {
    auto g = fixtures::polyhedron_element(faces, 2 * sp.k + 4);
    auto lm = local(sp, g, fixtures::random_spd(rng, 3));
    EXPECT_LT((lm.K - lm.K.transpose()).norm(), 1e-12 * lm.K.norm());
    Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (lm.K + lm.K.transpose()));
    EXPECT_GT(es.eigenvalues().minCoeff(), 0.0) << sp.name();
  }
}

TEST(LocalMatrices, OplusRotationLeavesStiffnessUnchanged) {
  std::mt19937 rng(14);
  auto faces = fixtures::random_polyhedron(rng);
  for (int k = 1; k <= 3; ++k) {
    ElementSpace sp = ElementSpace::rt(3, k);
    auto g = fixtures::polyhedron_element(faces, 2 * k + 4);
    Matrix nu = fixtures::random_spd(rng, 3);
    auto a = local(sp, g, nu);
    const int n = a.layout.num_oplus;
    Eigen::HouseholderQR<Matrix> qr(Matrix::Random(n, n));
    Matrix q = qr.householderQ();
    LocalOptions opt;
    opt.oplus_rotation = &q;
    auto b = local(sp, g, nu, opt);
    // DOFs of type iii are rotated too, so compare after mapping them back
    Matrix t = Matrix::Identity(a.K.rows(), a.K.cols());
    t.bottomRightCorner(n, n) = q;
    Matrix kb = t * b.K * t.transpose();
    EXPECT_LT((a.K_a - (t * b.K_a * t.transpose())).norm(), 1e-10 * a.K_a.norm()) << k;
    EXPECT_LT((a.K - kb).norm(), 1e-10 * a.K.norm()) << k;
  }
}

TEST(LocalMatrices, TranslationInvariance) {
  // scaled monomials are centred at the centroid, so a shifted copy has identical matrices
  std::mt19937 rng(15);
  auto loop = fixtures::random_star_polygon(rng, 6);
  std::vector<Vec3> moved;
  for (const auto& v : loop) moved.push_back(v + Vec3(40.0, -20.0, 0.0));
  for (int k = 0; k <= 3; ++k) {
    ElementSpace sp = ElementSpace::rt(2, k);
    auto a = local(sp, fixtures::polygon_element(loop, 2 * k + 4), Matrix::Identity(2, 2));
    auto b = local(sp, fixtures::polygon_element(moved, 2 * k + 4), Matrix::Identity(2, 2));
    EXPECT_LT((a.K - b.K).norm(), 1e-9 * a.K.norm()) << k;
    EXPECT_LT((a.W - b.W).norm(), 1e-9 * a.W.norm()) << k;
  }
}

TEST(LocalMatrices, ScalingLawOfStiffness) {
  // u_b(x) = u_a(x / s): face DOFs are unchanged, gradient and oplus moments shrink by 1/s and
  // the energy grows like s^2, so K_a = T^T K_b T / s^2 with T = diag(1, 1/s, 1/s)
  std::mt19937 rng(16);
  auto loop = fixtures::random_star_polygon(rng, 5);
  const double s = 7.0;
  std::vector<Vec3> big;
  for (const auto& v : loop) big.push_back(s * v);
  for (int k = 0; k <= 3; ++k) {
    ElementSpace sp = ElementSpace::rt(2, k);
    auto a = local(sp, fixtures::polygon_element(loop, 2 * k + 4), Matrix::Identity(2, 2));
    auto b = local(sp, fixtures::polygon_element(big, 2 * k + 4), Matrix::Identity(2, 2));
    Vector t = Vector::Ones(a.K.rows());
    t.segment(a.layout.offset_grad(), a.layout.num_grad + a.layout.num_oplus).setConstant(1.0 / s);
    Matrix kb = t.asDiagonal() * b.K * t.asDiagonal() / (s * s);
    EXPECT_LT((a.K - kb).norm(), 1e-9 * a.K.norm()) << k;
  }
}

TEST(LocalMatrices, OneDimensionalElementReproducesPolynomials) {
  for (int k = 0; k <= 4; ++k) {
    ElementGeometry g;
    g.dim = 1;
    g.s0 = 0.3;
    g.s1 = 1.1;
    g.measure = 0.8;
    g.centroid = Vec3(0.7, 0, 0);
    g.diameter = 0.8;
    g.rule = segment_rule(Vec3(0.3, 0, 0), Vec3(1.1, 0, 0), 2 * k + 4);
    for (double s : {0.3, 1.1}) {
      FacetGeometry f;
      f.origin = Vec3(s, 0, 0);
      f.normal = Vec3::UnitX();
      f.sign = s > 0.5 ? 1 : -1;
      f.rule.points = {f.origin};
      f.rule.weights = {1.0};
      g.facets.push_back(f);
    }
    ElementSpace sp = ElementSpace::rt(1, k);
    auto lm = local(sp, g, Matrix::Constant(1, 1, 2.0));
    EXPECT_EQ(lm.layout.total(), k + 2);
    EXPECT_LT((lm.K - lm.K.transpose()).norm(), 1e-12 * lm.K.norm());
    Eigen::SelfAdjointEigenSolver<Matrix> es(lm.K);
    EXPECT_GT(es.eigenvalues().minCoeff(), 0.0);
    // W has full row rank: divergence onto P_k is surjective
    Eigen::FullPivLU<Matrix> lu(lm.W);
    EXPECT_EQ(lu.rank(), k + 1);
  }
}

TEST(LocalMatrices, DegenerateElementThrows) {
  std::vector<Vec3> sliver = {{0, 0, 0}, {1, 0, 0}, {2, 1e-14, 0}};
  auto g = fixtures::polygon_element(sliver, 4);
  EXPECT_THROW(local(ElementSpace::rt(2, 1), g, Matrix::Identity(2, 2)), Error);
}
