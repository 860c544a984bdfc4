#ifndef MVEM_ASSEMBLY_HPP_
#define MVEM_ASSEMBLY_HPP_

#include <array>
#include <functional>
#include <iosfwd>
#include <vector>

#include <Eigen/Sparse>

#include "mvem/mixed_mesh.hpp"
#include "mvem/vem_local.hpp"

namespace mvem {

using SparseMatrix = Eigen::SparseMatrix<double, Eigen::ColMajor, int>;
using ScalarField = std::function<double(const Vec3&)>;
using TensorField = std::function<Mat3(const Vec3&)>;

struct DomainData {
  TensorField transmissivity;  // global 3x3 tensor; empty = identity
  double inverse_eta = 0.0;    // normal transmissivity of this domain towards its higher neighbours
  ScalarField source;          // empty = 0
};

struct BoundaryCondition {
  bool dirichlet = false;
  ScalarField value;

  static BoundaryCondition neumann() { return {}; }
  static BoundaryCondition pressure(ScalarField g) { return {true, std::move(g)}; }
};

// Called for every boundary facet of every domain; `centroid` is global.
using BoundaryRule =
    std::function<BoundaryCondition(const MixedMesh&, int domain, const Facet&, const Vec3& centroid)>;

struct ProblemData {
  std::vector<DomainData> domains;  // indexed like MixedMesh::domains
  BoundaryRule boundary;
  std::array<ElementSpace, 4> spaces{ElementSpace::rt(1, 0), ElementSpace::rt(1, 0), ElementSpace::rt(2, 0),
                                     ElementSpace::rt(3, 0)};  // by dimension
  // false: traces carry no flow; trace pressures become multipliers enforcing flux continuity
  bool trace_flow = true;
};

struct DomainDofs {
  Index flux_begin = 0, flux_count = 0;
  Index pressure_begin = 0, pressure_count = 0;
};

struct GlobalDofMap {
  std::vector<DomainDofs> domains;
  std::vector<ElementSpace> space;    // per domain (d = 0: unused)
  std::vector<DofLayout> layout;      // per domain per-facet and interior counts (num_facets = 0)
  // per domain, per facet: first DOF of each owner slot; one slot when shared, one per owner when doubled
  std::vector<std::vector<std::vector<Index>>> facet_dofs;
  std::vector<std::vector<Index>> interior_dofs;  // per domain per element
  std::vector<std::vector<Index>> pressure_dofs;  // per domain per element
  Index total = 0;
  Index duplicated = 0;  // flux DOFs added by doubling
  std::array<Index, 4> flux_by_dim{}, pressure_by_dim{};

  // global flux DOFs of element e in its local layout order
  std::vector<Index> element_flux_dofs(const MixedMesh& mesh, int domain, Index e) const;
  // DOF slot of owner element e on a facet
  Index facet_slot(const MixedMesh& mesh, int domain, Index facet, Index e) const;
};

GlobalDofMap build_dof_map(const MixedMesh& mesh, const ProblemData& problem);

struct AssemblyOptions {
  bool same_dim_coupling = true;  // C^{dD/dD}; off only for testing
  int threads = 0;
};

struct GlobalSystem {
  GlobalDofMap dofs;
  SparseMatrix matrix;
  Vector rhs;
  std::vector<char> neumann;  // eliminated flux DOFs
  int floating_components = 0;  // coupled groups of domains without any Dirichlet facet
  // kept for post-processing, per domain per element
  std::vector<std::vector<ElementGeometry>> geometry;
  std::vector<std::vector<LocalMatrices>> local;
  // per domain per element: integral of the source against the pressure basis
  std::vector<std::vector<Vector>> load;
};

GlobalSystem assemble_system(const MixedMesh& mesh, const ProblemData& problem, const AssemblyOptions& options = {});

// inverse transmissivity in the domain's local coordinates
Matrix local_nu(const DomainMesh& dm, const Mat3& a);

// Quadrature order used for element and facet rules of a space.
inline int element_rule_order(const ElementSpace& s) { return 2 * s.k + 4; }

// (row, col, value) lines, 0-based
void write_coo(std::ostream& out, const SparseMatrix& m);

}  // namespace mvem

#endif
