#ifndef MVEM_POLYMESH_HPP_
#define MVEM_POLYMESH_HPP_

#include <array>
#include <iosfwd>
#include <string>
#include <vector>

#include "mvem/geometry.hpp"
#include "mvem/types.hpp"

namespace mvem {

// sign = +1 when the face loop normal points out of the cell
struct SignedFace {
  Index face;
  int sign;
};

struct PolyMesh {
  std::vector<Vec3> vertices;
  std::vector<std::vector<Index>> faces;
  std::vector<std::vector<SignedFace>> cells;

  std::vector<Vec3> face_points(Index f) const;
  // outward oriented loops of a cell
  FaceLoops cell_loops(Index c) const;
  std::vector<std::vector<Index>> face_owners() const;
  double total_volume() const;
  // bounding-box diagonal
  double extent() const;
};

PolyMesh box_mesh(const Vec3& lo, const Vec3& hi, const std::array<int, 3>& n);
// Grid with explicit coordinate lines per axis.
PolyMesh grid_mesh(const std::array<std::vector<double>, 3>& lines);

PolyMesh read_mesh(std::istream& in);
PolyMesh read_mesh_file(const std::string& path);
void write_mesh(std::ostream& out, const PolyMesh& mesh);

struct Violation {
  std::string kind;
  Index entity = -1;
  std::string detail;
};

// closure, planarity, positive volume, face ownership
std::vector<Violation> validate_polymesh(const PolyMesh& mesh, double eps);

}  // namespace mvem

#endif
