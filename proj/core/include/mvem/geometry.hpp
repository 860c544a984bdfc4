#ifndef MVEM_GEOMETRY_HPP_
#define MVEM_GEOMETRY_HPP_

#include <array>
#include <vector>

#include "mvem/quadrature.hpp"
#include "mvem/types.hpp"

namespace mvem {

// normal . x = offset
struct Plane {
  Vec3 normal = Vec3::UnitZ();
  double offset = 0.0;

  static Plane through(const Vec3& point, const Vec3& normal);
  double signed_distance(const Vec3& x) const { return normal.dot(x) - offset; }
  Vec3 project(const Vec3& x) const { return x - signed_distance(x) * normal; }
};

// orthonormal in-plane axes e1, e2 with e1 x e2 = normal
struct Frame {
  Vec3 origin = Vec3::Zero();
  Vec3 e1 = Vec3::UnitX();
  Vec3 e2 = Vec3::UnitY();
  Vec3 normal = Vec3::UnitZ();

  static Frame from_normal(const Vec3& origin, const Vec3& normal);
  static Frame from_normal_and_axis(const Vec3& origin, const Vec3& normal, const Vec3& axis);
  Eigen::Vector2d to_local(const Vec3& x) const {
    Vec3 r = x - origin;
    return {r.dot(e1), r.dot(e2)};
  }
  Vec3 to_global(const Eigen::Vector2d& y) const { return origin + y(0) * e1 + y(1) * e2; }
};

// a normal pointing in the lexicographically positive direction
Vec3 lexicographic_positive(const Vec3& n);
bool lexicographically_greater(const Vec3& a, const Vec3& b, double tol = 1e-12);

double diameter(const std::vector<Vec3>& pts);

// ---- polygons (vertex loop in 3D, possibly non-convex, may contain collinear vertices)

// Newell vector: 2 * area * unit normal
Vec3 newell_vector(const std::vector<Vec3>& loop);
double polygon_area(const std::vector<Vec3>& loop);
Vec3 polygon_normal(const std::vector<Vec3>& loop);
Vec3 polygon_centroid(const std::vector<Vec3>& loop);
// max distance of any vertex from the best-fit plane
double planarity_defect(const std::vector<Vec3>& loop);
Frame polygon_frame(const std::vector<Vec3>& loop);

using Triangle = std::array<Vec3, 3>;
// fan from the centroid if the loop is star-shaped w.r.t. it, else ear clipping
std::vector<Triangle> triangulate_polygon(const std::vector<Vec3>& loop);
QuadratureRule polygon_rule(const std::vector<Vec3>& loop, int order);

// ---- polyhedra: faces given as vertex loops oriented with outward normals

using FaceLoops = std::vector<std::vector<Vec3>>;

double polyhedron_volume(const FaceLoops& faces);
Vec3 polyhedron_centroid(const FaceLoops& faces);
QuadratureRule polyhedron_rule(const FaceLoops& faces, int order);

}  // namespace mvem

#endif
