#include <benchmark/benchmark.h>

#include <random>

#include "mvem/geometry.hpp"
#include "mvem/polymesh.hpp"
#include "mvem/vem_local.hpp"

using namespace mvem;

namespace {

// unit cube as a generic 6-face polyhedron
ElementGeometry sample_polyhedron(int order) {
  PolyMesh m = box_mesh(Vec3(0, 0, 0), Vec3(1, 1, 1), {1, 1, 1});
  FaceLoops faces = m.cell_loops(0);
  ElementGeometry g;
  g.dim = 3;
  std::vector<Vec3> all;
  for (const auto& f : faces) all.insert(all.end(), f.begin(), f.end());
  g.measure = polyhedron_volume(faces);
  g.centroid = polyhedron_centroid(faces);
  g.diameter = diameter(all);
  g.rule = polyhedron_rule(faces, order);
  for (const auto& loop : faces) {
    FacetGeometry f;
    Frame fr = polygon_frame(loop);
    f.origin = fr.origin;
    f.e1 = fr.e1;
    f.e2 = fr.e2;
    f.normal = fr.normal;
    f.measure = polygon_area(loop);
    f.h = diameter(loop);
    f.rule = polygon_rule(loop, order);
    g.facets.push_back(f);
  }
  return g;
}

void BM_LocalMatrices(benchmark::State& state, ElementSpace sp) {
  ElementGeometry g = sample_polyhedron(2 * sp.k + 2);
  std::vector<Matrix> nu(g.rule.size(), Matrix::Identity(3, 3));
  for (auto _ : state) benchmark::DoNotOptimize(compute_local_matrices(sp, g, nu));
}

void BM_PolyhedronRule(benchmark::State& state) {
  PolyMesh m = box_mesh(Vec3(0, 0, 0), Vec3(1, 1, 1), {1, 1, 1});
  FaceLoops faces = m.cell_loops(0);
  const int order = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(polyhedron_rule(faces, order));
}

}  // namespace

BENCHMARK_CAPTURE(BM_LocalMatrices, RT0, ElementSpace::rt(3, 0));
BENCHMARK_CAPTURE(BM_LocalMatrices, RT1, ElementSpace::rt(3, 1));
BENCHMARK_CAPTURE(BM_LocalMatrices, RT2, ElementSpace::rt(3, 2));
BENCHMARK_CAPTURE(BM_LocalMatrices, RT4, ElementSpace::rt(3, 4));
BENCHMARK_CAPTURE(BM_LocalMatrices, BDM2, ElementSpace::bdm(3, 2));
BENCHMARK(BM_PolyhedronRule)->Arg(2)->Arg(6)->Arg(10);
