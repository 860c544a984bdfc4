#ifndef MVEM_MIXED_MESH_HPP_
#define MVEM_MIXED_MESH_HPP_

#include <memory>
#include <string>
#include <vector>

#include "mvem/cutting.hpp"
#include "mvem/geometry.hpp"
#include "mvem/polymesh.hpp"

namespace mvem {

enum class FacetKind { Interior, Interface, Boundary };

struct FacetOwner {
  Index element = -1;
  int sign = 1;  // outward normal of the element = sign * facet normal
  int side = 0;  // interface side label (+1 / -1); 0 for non-interface facets
};

// A (d-1)-dimensional mesh entity of a d-dimensional domain.
struct Facet {
  std::vector<Index> vertices;  // polygon loop (d=3), segment ends (d=2), single vertex (d=1)
  Vec3 normal = Vec3::Zero();   // orientation normal, global coordinates
  FacetKind kind = FacetKind::Interior;
  std::vector<FacetOwner> owners;
  int lower_domain = -1;  // interface facets
  Index lower_element = -1;
  bool on_outer_boundary = false;
};

struct DomainMesh {
  int dim = 3;
  int index = 0;  // position among domains of the same dimension
  // local coordinates: d=3 identity, d=2 frame, d=1 s = tangent.(x - origin)
  Frame frame;
  Vec3 tangent = Vec3::UnitX();

  std::vector<std::vector<Index>> element_facets;
  std::vector<std::vector<int>> element_signs;
  std::vector<std::vector<Index>> element_vertices;  // loop for d=2, ends for d=1, point for d=0
  std::vector<Facet> facets;

  Index num_elements() const { return static_cast<Index>(element_facets.size()); }
  Vec3 to_local(const Vec3& x) const;
  Vec3 to_global(const Vec3& y) const;
  Vec3 vector_to_local(const Vec3& v) const;
  Vec3 vector_to_global(const Vec3& v) const;
};

struct InterfaceRecord {
  int higher_domain = -1;
  int lower_domain = -1;
  Index num_entities = 0;
  int num_plus = 0, num_minus = 0;  // owner counts per side label
};

struct DomainGraph {
  std::vector<std::vector<int>> up, down;  // per domain
  std::vector<InterfaceRecord> interfaces;
};

struct MixedMesh {
  std::shared_ptr<const std::vector<Vec3>> vertices;
  std::vector<DomainMesh> domains;
  int matrix_domain = -1;
  std::vector<int> fracture_domain, trace_domain, point_domain;

  std::vector<FracturePolygon> fractures;
  std::vector<TraceGeometry> traces;
  std::vector<PointGeometry> points;
  PolyMesh volume_mesh;  // the cut 3D mesh
  std::vector<int> face_fracture;
  double eps = 0.0;
  DomainGraph graph;

  const Vec3& vertex(Index v) const { return (*vertices)[v]; }
  std::string domain_name(int domain) const;
};

MixedMesh build_mixed_mesh(const CutResult& cut, const std::vector<FracturePolygon>& fractures);

// Drops every domain of dimension > max_dim (e.g. max_dim = 2 gives a fracture-network-only mesh).
MixedMesh restrict_dimensions(const MixedMesh& mesh, int max_dim);

DomainGraph build_domain_graph(const MixedMesh& mesh);

// closure/planarity, fracture area and trace length coverage, two-sided interfaces
std::vector<Violation> validate_conformity(const MixedMesh& mesh);

}  // namespace mvem

#endif
