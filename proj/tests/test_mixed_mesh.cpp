#include <gtest/gtest.h>

#include "mvem/builtins.hpp"
#include "mvem/mixed_mesh.hpp"
#include "support.hpp"

using namespace mvem;

namespace {

MixedMesh problem1_mesh(int cells = 2) {
  BuiltinOptions o;
  o.cells = cells;
  return build_scenario_mesh(problem1_quartic(o));
}

int count_dim(const MixedMesh& m, int d) {
  int n = 0;
  for (const auto& dm : m.domains) n += dm.dim == d;
  return n;
}

}  // namespace

TEST(MixedMesh, Problem1DomainInventory) {
  MixedMesh m = problem1_mesh();
  EXPECT_EQ(count_dim(m, 3), 1);
  EXPECT_EQ(count_dim(m, 2), 3);
  EXPECT_EQ(count_dim(m, 1), 3);
  EXPECT_EQ(count_dim(m, 0), 1);
  EXPECT_EQ(m.domain_name(0), "3D");
  EXPECT_EQ(m.domain_name(m.fracture_domain[0]), "F1");
  EXPECT_EQ(m.domain_name(m.trace_domain[2]), "T3");
  EXPECT_EQ(m.domain_name(m.point_domain[0]), "I1");
  EXPECT_EQ(m.domains[0].num_elements(), 8);
  // each fracture is cut into 4 squares by the other two
  for (int f : m.fracture_domain) EXPECT_EQ(m.domains[f].num_elements(), 4);
  // each trace is split by the intersection point
  for (int t : m.trace_domain) EXPECT_EQ(m.domains[t].num_elements(), 2);
  EXPECT_TRUE(validate_conformity(m).empty());
}

TEST(MixedMesh, InterfaceFacetsHaveTwoLabelledSides) {
  MixedMesh m = problem1_mesh();
  for (const auto& rec : m.graph.interfaces) {
    EXPECT_GT(rec.num_entities, 0);
    EXPECT_EQ(rec.num_plus, rec.num_minus) << m.domain_name(rec.higher_domain) << "-" << m.domain_name(rec.lower_domain);
  }
  for (const auto& dm : m.domains)
    for (const auto& f : dm.facets)
      if (f.kind == FacetKind::Interface) {
        ASSERT_GE(f.lower_domain, 0);
        for (const auto& o : f.owners) EXPECT_NE(o.side, 0);
      }
}

TEST(MixedMesh, DomainGraphLinksEveryDimensionPair) {
  MixedMesh m = problem1_mesh();
  const auto& g = m.graph;
  EXPECT_EQ(g.down[0].size(), 3u);  // matrix -> 3 fractures
  for (int f : m.fracture_domain) {
    EXPECT_EQ(g.up[f].size(), 1u);
    EXPECT_EQ(g.down[f].size(), 2u);
  }
  for (int t : m.trace_domain) {
    EXPECT_EQ(g.up[t].size(), 2u);
    EXPECT_EQ(g.down[t].size(), 1u);
  }
  EXPECT_EQ(g.up[m.point_domain[0]].size(), 3u);
}

TEST(MixedMesh, FacetNormalsAreUnitAndOrthogonalToFractureNormal) {
  MixedMesh m = problem1_mesh(4);
  for (int f : m.fracture_domain) {
    const auto& dm = m.domains[f];
    for (const auto& fa : dm.facets) {
      EXPECT_NEAR(fa.normal.norm(), 1.0, 1e-14);
      EXPECT_NEAR(fa.normal.dot(dm.frame.normal), 0.0, 1e-14);
    }
  }
}

TEST(MixedMesh, OuterBoundaryFlagsOnlyTouchTheBox) {
  MixedMesh m = problem1_mesh();
  for (const auto& dm : m.domains)
    for (const auto& fa : dm.facets) {
      if (!fa.on_outer_boundary) continue;
      Vec3 c = Vec3::Zero();
      for (Index v : fa.vertices) c += m.vertex(v);
      c /= static_cast<double>(fa.vertices.size());
      EXPECT_NEAR(c.cwiseAbs().maxCoeff(), 1.0, 1e-14);
    }
}

TEST(MixedMesh, RestrictDimensionsDropsHigherDomains) {
  MixedMesh m = problem1_mesh();
  MixedMesh r2 = restrict_dimensions(m, 2);
  EXPECT_EQ(count_dim(r2, 3), 0);
  EXPECT_EQ(count_dim(r2, 2), 3);
  EXPECT_EQ(r2.domain_name(0), "F1");
  EXPECT_TRUE(validate_conformity(r2).empty());
  MixedMesh r1 = restrict_dimensions(m, 1);
  EXPECT_EQ(count_dim(r1, 2), 0);
  EXPECT_EQ(count_dim(r1, 1), 3);
}

TEST(MixedMesh, TJunctionTraceHasOneSidedInterface) {
  Scenario sc = problem2_finite_eta();
  MixedMesh m = build_scenario_mesh(sc);
  EXPECT_TRUE(validate_conformity(m).empty());
  EXPECT_EQ(count_dim(m, 2), 4);
  EXPECT_EQ(count_dim(m, 1), 5);
  EXPECT_EQ(count_dim(m, 0), 2);
}

TEST(MixedMesh, ObliqueFractureMeshIsConforming) {
  PolyMesh bg = box_mesh(Vec3(0, 0, 0), Vec3(1, 1, 1), {4, 4, 4});
  std::vector<FracturePolygon> fr = {fixtures::quad(Vec3(0.5, 0.5, 0.45), Vec3(0.2, -0.3, 1.0), 0.4, 0.35),
                                     fixtures::quad(Vec3(0.5, 0.48, 0.5), Vec3(1.0, 0.3, 0.2), 0.4, 0.4)};
  CutResult c = cut_background_mesh(bg, fr);
  MixedMesh m = build_mixed_mesh(c, fr);
  EXPECT_TRUE(validate_conformity(m).empty());
  double area = 0.0;
  const auto& dm = m.domains[m.fracture_domain[0]];
  for (Index e = 0; e < dm.num_elements(); ++e) {
    std::vector<Vec3> loop;
    for (Index v : dm.element_vertices[e]) loop.push_back(m.vertex(v));
    area += polygon_area(loop);
  }
  EXPECT_NEAR(area, fr[0].area(), 1e-12);
}
