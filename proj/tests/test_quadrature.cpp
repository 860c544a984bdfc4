#include <gtest/gtest.h>

#include "mvem/geometry.hpp"
#include "mvem/polymesh.hpp"
#include "mvem/quadrature.hpp"
#include "support.hpp"

using namespace mvem;
using mvem::fixtures::factorial;

namespace {

double integrate(const QuadratureRule& r, int a, int b, int c) {
  double s = 0.0;
  for (std::size_t q = 0; q < r.size(); ++q)
    s += r.weights[q] * std::pow(r.points[q](0), a) * std::pow(r.points[q](1), b) * std::pow(r.points[q](2), c);
  return s;
}

// integral of x^a y^b z^c over [0,1]^3 (or lower-dimensional face with exponent 0)
double box_moment(int a, int b, int c) { return 1.0 / ((a + 1.0) * (b + 1.0) * (c + 1.0)); }

}  // namespace

TEST(GaussJacobi, WeightsSumToWeightIntegral) {
  for (double alpha : {0.0, 1.0, 2.0})
    for (int n = 1; n <= 10; ++n) {
      std::vector<double> x, w;
      gauss_jacobi(n, alpha, x, w);
      double s = 0.0;
      for (double v : w) s += v;
      EXPECT_NEAR(s, std::pow(2.0, alpha + 1) / (alpha + 1), 1e-13) << "n=" << n << " alpha=" << alpha;
    }
}

TEST(SegmentRule, ExactUpToOrder) {
  for (int order = 0; order <= 14; ++order) {
    auto r = segment_rule(Vec3(0, 0, 0), Vec3(1, 0, 0), order);
    for (int p = 0; p <= order; ++p) EXPECT_NEAR(integrate(r, p, 0, 0), 1.0 / (p + 1), 1e-14);
  }
}

TEST(TriangleRule, ReferenceMomentsExact) {
  for (int order = 0; order <= 12; ++order) {
    auto r = triangle_rule(Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(0, 1, 0), order);
    for (int a = 0; a <= order; ++a)
      for (int b = 0; a + b <= order; ++b) {
        double exact = factorial(a) * factorial(b) / factorial(a + b + 2);
        EXPECT_NEAR(integrate(r, a, b, 0), exact, 1e-14) << a << "," << b;
      }
  }
}

TEST(TetrahedronRule, ReferenceMomentsExact) {
  for (int order = 0; order <= 10; ++order) {
    auto r = tetrahedron_rule(Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(0, 1, 0), Vec3(0, 0, 1), order);
    for (int a = 0; a <= order; ++a)
      for (int b = 0; a + b <= order; ++b)
        for (int c = 0; a + b + c <= order; ++c) {
          double exact = factorial(a) * factorial(b) * factorial(c) / factorial(a + b + c + 3);
          EXPECT_NEAR(integrate(r, a, b, c), exact, 1e-14);
        }
  }
}

TEST(TetrahedronRule, SignedWeightsFollowOrientation) {
  auto r = tetrahedron_rule(Vec3(0, 0, 0), Vec3(0, 1, 0), Vec3(1, 0, 0), Vec3(0, 0, 1), 2, true);
  EXPECT_NEAR(r.measure(), -1.0 / 6.0, 1e-15);
}

TEST(PolygonRule, NonConvexLShapeMoments) {
  std::vector<Vec3> l = {{0, 0, 0}, {2, 0, 0}, {2, 1, 0}, {1, 1, 0}, {1, 2, 0}, {0, 2, 0}};
  for (int order = 0; order <= 10; ++order) {
    auto r = polygon_rule(l, order);
    for (int a = 0; a <= order; ++a)
      for (int b = 0; a + b <= order; ++b) {
        // [0,2]x[0,1] + [0,1]x[1,2]
        double exact = std::pow(2.0, a + 1) / (a + 1) / (b + 1) +
                       1.0 / (a + 1) * (std::pow(2.0, b + 1) - 1.0) / (b + 1);
        EXPECT_NEAR(integrate(r, a, b, 0), exact, 1e-12 * std::max(1.0, exact));
      }
  }
}

TEST(PolygonRule, TiltedSquareArea) {
  Mat3 rot = Eigen::AngleAxisd(0.7, Vec3(1, 2, 3).normalized()).toRotationMatrix();
  std::vector<Vec3> sq = {rot * Vec3(0, 0, 0), rot * Vec3(2, 0, 0), rot * Vec3(2, 2, 0), rot * Vec3(0, 2, 0)};
  EXPECT_NEAR(polygon_rule(sq, 3).measure(), 4.0, 1e-13);
}

TEST(PolyhedronRule, UnitCubeMomentsExact) {
  PolyMesh m = box_mesh(Vec3(0, 0, 0), Vec3(1, 1, 1), {1, 1, 1});
  auto faces = m.cell_loops(0);
  for (int order = 0; order <= 10; order += 2) {
    auto r = polyhedron_rule(faces, order);
    for (int a = 0; a <= order; ++a)
      for (int b = 0; a + b <= order; ++b)
        for (int c = 0; a + b + c <= order; ++c) EXPECT_NEAR(integrate(r, a, b, c), box_moment(a, b, c), 1e-13);
  }
}

TEST(PolyhedronRule, NonConvexPrismMomentsMatchFactorization) {
  // prism over an L-shape: moments factor into polygon moment times height moment
  std::vector<Vec3> l = {{0, 0, 0}, {2, 0, 0}, {2, 1, 0}, {1, 1, 0}, {1, 2, 0}, {0, 2, 0}};
  auto faces = fixtures::prism(l, 1.5, Vec3::Zero());
  auto r = polyhedron_rule(faces, 6);
  auto r2 = polygon_rule(l, 6);
  for (int a = 0; a <= 3; ++a)
    for (int b = 0; a + b <= 4; ++b)
      for (int c = 0; a + b + c <= 6; ++c) {
        double exact = integrate(r2, a, b, 0) * std::pow(1.5, c + 1) / (c + 1);
        EXPECT_NEAR(integrate(r, a, b, c), exact, 1e-11 * std::max(1.0, std::abs(exact)));
      }
}
