#ifndef MVEM_CUTTING_HPP_
#define MVEM_CUTTING_HPP_

#include <string>
#include <vector>

#include "mvem/geometry.hpp"
#include "mvem/polymesh.hpp"

namespace mvem {

// Planar convex fracture polygon.
struct FracturePolygon {
  std::vector<Vec3> vertices;

  Plane plane() const;  // normal made lexicographically positive
  double area() const { return polygon_area(vertices); }
};

struct TraceGeometry {
  int fracture_a = -1, fracture_b = -1;  // a < b
  Vec3 start, end;                        // start -> end along the lexicographically positive tangent
  Vec3 tangent() const { return (end - start).normalized(); }
  double length() const { return (end - start).norm(); }
};

struct PointGeometry {
  Vec3 x;
  std::vector<int> traces;
};

// Traces of every fracture pair and the points where traces meet.
std::vector<TraceGeometry> compute_traces(const std::vector<FracturePolygon>& fractures, double eps);
std::vector<PointGeometry> compute_trace_points(const std::vector<TraceGeometry>& traces, double eps);

struct CutResult {
  PolyMesh mesh;
  std::vector<int> face_fracture;  // per face: fracture index or -1
  std::vector<TraceGeometry> traces;
  std::vector<PointGeometry> points;
  std::vector<std::string> notes;  // snapping reports
  double eps = 0.0;
};

struct CutOptions {
  double eps_rel = 1e-9;         // relative to the background extent
  std::vector<Plane> extra_planes;  // full non-physical cuts applied before fractures
};

// Splits every cell crossed by a fracture (cut prolonged to the cell boundary), splits faces
// lying on a fracture plane along the fracture boundary, and marks faces inside fractures.
// Background cells must be convex.
CutResult cut_background_mesh(const PolyMesh& background, const std::vector<FracturePolygon>& fractures,
                              const CutOptions& options = {});

}  // namespace mvem

#endif
