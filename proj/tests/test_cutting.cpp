#include <gtest/gtest.h>

#include "mvem/cutting.hpp"
#include "support.hpp"

using namespace mvem;

namespace {

double fracture_face_area(const CutResult& c, int fracture) {
  double a = 0.0;
  for (std::size_t f = 0; f < c.mesh.faces.size(); ++f)
    if (c.face_fracture[f] == fracture) a += polygon_area(c.mesh.face_points(static_cast<Index>(f)));
  return a;
}

FracturePolygon axis_square(int axis, double at, double lo, double hi) {
  std::vector<Vec3> v(4);
  const double uv[4][2] = {{lo, lo}, {hi, lo}, {hi, hi}, {lo, hi}};
  for (int i = 0; i < 4; ++i) {
    Vec3 p;
    p(axis) = at;
    p((axis + 1) % 3) = uv[i][0];
    p((axis + 2) % 3) = uv[i][1];
    v[i] = p;
  }
  return FracturePolygon{v};
}

}  // namespace

TEST(Cutting, NoFracturesLeavesMeshUntouched) {
  PolyMesh bg = box_mesh(Vec3(0, 0, 0), Vec3(1, 1, 1), {2, 2, 2});
  CutResult c = cut_background_mesh(bg, {});
  EXPECT_EQ(c.mesh.cells.size(), 8u);
  EXPECT_TRUE(c.traces.empty());
  EXPECT_TRUE(c.points.empty());
}

TEST(Cutting, ObliqueFractureConservesVolumeAndArea) {
  PolyMesh bg = box_mesh(Vec3(0, 0, 0), Vec3(1, 1, 1), {3, 3, 3});
  auto f = fixtures::quad(Vec3(0.5, 0.5, 0.5), Vec3(0.3, 0.2, 1.0), 0.3, 0.25);
  CutResult c = cut_background_mesh(bg, {f});
  EXPECT_NEAR(c.mesh.total_volume(), 1.0, 1e-12);
  EXPECT_NEAR(fracture_face_area(c, 0), f.area(), 1e-12);
  EXPECT_GT(c.mesh.cells.size(), 27u);
  EXPECT_TRUE(validate_polymesh(c.mesh, 1e-9).empty());
}

TEST(Cutting, FractureOnExistingGridPlaneSplitsNoCells) {
  PolyMesh bg = box_mesh(Vec3(-1, -1, -1), Vec3(1, 1, 1), {2, 2, 2});
  CutResult c = cut_background_mesh(bg, {axis_square(0, 0.0, -1, 1)});
  EXPECT_EQ(c.mesh.cells.size(), 8u);
  EXPECT_NEAR(fracture_face_area(c, 0), 4.0, 1e-13);
}

TEST(Cutting, PartialFractureOnGridPlaneSplitsFaces) {
  PolyMesh bg = box_mesh(Vec3(-1, -1, -1), Vec3(1, 1, 1), {2, 2, 2});
  CutResult c = cut_background_mesh(bg, {axis_square(2, 0.0, -0.5, 0.5)});
  EXPECT_NEAR(fracture_face_area(c, 0), 1.0, 1e-13);
  EXPECT_NEAR(c.mesh.total_volume(), 8.0, 1e-12);
  EXPECT_TRUE(validate_polymesh(c.mesh, 1e-9).empty());
}

TEST(Cutting, ExtraPlanesProduceConvexPieces) {
  PolyMesh bg = box_mesh(Vec3(0, 0, 0), Vec3(1, 1, 1), {1, 1, 1});
  CutOptions opt;
  opt.extra_planes = {Plane::through(Vec3(0.5, 0.5, 0.5), Vec3(1, 1, 0).normalized()),
                      Plane::through(Vec3(0.3, 0.3, 0.3), Vec3(0, 0.2, 1).normalized())};
  CutResult c = cut_background_mesh(bg, {}, opt);
  EXPECT_EQ(c.mesh.cells.size(), 4u);
  EXPECT_NEAR(c.mesh.total_volume(), 1.0, 1e-13);
}

TEST(Traces, CoordinatePlanesGiveThreeTracesAndOnePoint) {
  std::vector<FracturePolygon> fr = {axis_square(0, 0, -1, 1), axis_square(1, 0, -1, 1), axis_square(2, 0, -1, 1)};
  auto tr = compute_traces(fr, 1e-10);
  ASSERT_EQ(tr.size(), 3u);
  for (const auto& t : tr) {
    EXPECT_LT(t.fracture_a, t.fracture_b);
    EXPECT_NEAR(t.length(), 2.0, 1e-14);
  }
  auto pts = compute_trace_points(tr, 1e-10);
  ASSERT_EQ(pts.size(), 1u);
  EXPECT_LT(pts[0].x.norm(), 1e-14);
  EXPECT_EQ(pts[0].traces.size(), 3u);
}

TEST(Traces, TJunctionTraceEndsOnFractureBoundary) {
  std::vector<FracturePolygon> fr = {axis_square(0, 0, -1, 1), axis_square(1, 0, 0, 1)};
  // second fracture: y = 0, x in [0,1] z in [0,1]; it touches x = 0 along its edge
  auto tr = compute_traces(fr, 1e-10);
  ASSERT_EQ(tr.size(), 1u);
  EXPECT_NEAR(tr[0].length(), 1.0, 1e-14);
}

TEST(Traces, DisjointFracturesHaveNoTrace) {
  std::vector<FracturePolygon> fr = {axis_square(0, 0, -1, 1), axis_square(0, 0.5, -1, 1)};
  EXPECT_TRUE(compute_traces(fr, 1e-10).empty());
}

TEST(Cutting, CrossingFracturesTraceLengthCovered) {
  PolyMesh bg = box_mesh(Vec3(0, 0, 0), Vec3(1, 1, 1), {3, 3, 3});
  std::vector<FracturePolygon> fr = {fixtures::quad(Vec3(0.5, 0.5, 0.45), Vec3(0.2, -0.3, 1.0), 0.4, 0.35),
                                     fixtures::quad(Vec3(0.5, 0.48, 0.5), Vec3(1.0, 0.3, 0.2), 0.4, 0.4)};
  CutResult c = cut_background_mesh(bg, fr);
  ASSERT_EQ(c.traces.size(), 1u);
  EXPECT_NEAR(c.mesh.total_volume(), 1.0, 1e-12);
  for (int i = 0; i < 2; ++i) EXPECT_NEAR(fracture_face_area(c, i), fr[i].area(), 1e-12);
}

TEST(Cutting, RandomNetworksStayConforming) {
  // covers trace ends that meet fracture edges at grazing angles and sliver faces
  std::mt19937 rng(7);
  std::uniform_int_distribution<int> count(1, 5);
  std::uniform_real_distribution<double> c(0.3, 0.7), u(-1.0, 1.0), half(0.05, 0.2);
  for (int net = 0; net < 200; ++net) {
    std::vector<FracturePolygon> fr(count(rng));
    for (auto& f : fr) {
      Vec3 n(u(rng), u(rng), u(rng));
      if (net % 4 == 0) n = Vec3::Unit(net / 4 % 3);
      if (n.norm() < 0.1) n = Vec3::UnitZ();
      f = fixtures::quad(Vec3(c(rng), c(rng), c(rng)), n, half(rng), half(rng));
    }
    PolyMesh bg = box_mesh(Vec3(0, 0, 0), Vec3(1, 1, 1), {4, 4, 4});
    CutResult cut = cut_background_mesh(bg, fr);
    MixedMesh m = build_mixed_mesh(cut, fr);
    EXPECT_TRUE(validate_conformity(m).empty()) << "network " << net;
    EXPECT_NEAR(cut.mesh.total_volume(), 1.0, 1e-12);
    for (std::size_t i = 0; i < fr.size(); ++i) EXPECT_NEAR(fracture_face_area(cut, static_cast<int>(i)), fr[i].area(), 1e-12);
  }
}
