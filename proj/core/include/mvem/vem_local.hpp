#ifndef MVEM_VEM_LOCAL_HPP_
#define MVEM_VEM_LOCAL_HPP_

#include <iosfwd>
#include <string>
#include <vector>

#include "mvem/mixed_mesh.hpp"
#include "mvem/polynomials.hpp"
#include "mvem/quadrature.hpp"

namespace mvem {

enum class Family { RT, BDM };

struct ElementSpace {
  int d = 3;
  int k = 0;
  int k_div = 0;
  Family family = Family::RT;

  static ElementSpace rt(int d, int k) { return {d, k, k, Family::RT}; }
  static ElementSpace bdm(int d, int k) { return {d, k, k - 1, Family::BDM}; }
  // parses "RT2", "BDM1"
  static ElementSpace parse(int d, const std::string& name);
  std::string name() const;
  void validate() const;
};

struct DofLayout {
  int num_facets = 0;
  int per_facet = 0;  // n_k^{d-1}
  int num_grad = 0;   // type ii, n_{k_div}^d - 1
  int num_oplus = 0;  // type iii

  int offset_grad() const { return num_facets * per_facet; }
  int offset_oplus() const { return offset_grad() + num_grad; }
  int total() const { return offset_oplus() + num_oplus; }
};

DofLayout dof_layout(const ElementSpace& space, int num_facets);

// Facet data in the element's local coordinates. Facet monomials live in the facet frame
// (origin = facet centroid, axes e1/e2, scale h) and are shared by both owners of the facet.
struct FacetGeometry {
  int sign = 1;                // outward element normal = sign * normal
  Vec3 normal = Vec3::UnitX();  // facet orientation normal
  double measure = 1.0;
  Vec3 origin = Vec3::Zero();
  Vec3 e1 = Vec3::UnitX(), e2 = Vec3::UnitY();
  double h = 1.0;
  QuadratureRule rule;

  // coordinates fed to the (d-1)-dimensional facet monomials
  Vec3 facet_coords(const Vec3& x) const {
    Vec3 r = x - origin;
    return {r.dot(e1) / h, r.dot(e2) / h, 0.0};
  }
  // facet monomials of order k evaluated at every quadrature point (rows = points)
  Matrix basis_at_points(int d_facet, int k) const;
};

struct ElementGeometry {
  int dim = 3;
  double measure = 0.0;
  Vec3 centroid = Vec3::Zero();
  double diameter = 0.0;
  QuadratureRule rule;  // local coordinates
  std::vector<FacetGeometry> facets;
  // d = 1 only: endpoint coordinates s0 < s1
  double s0 = 0.0, s1 = 0.0;
};

// Geometry of element e of a domain, in the domain's local coordinates, with rules exact to `order`.
ElementGeometry element_geometry(const MixedMesh& mesh, int domain, Index e, int order);
// Facet geometry of facet id of a domain in that domain's local coordinates (orientation sign 1).
FacetGeometry facet_geometry(const MixedMesh& mesh, int domain, Index facet, int order);

struct LocalMatrices {
  DofLayout layout;
  MonomialBasis velocity_basis;  // M_k for d >= 2, M_{k+1} for d = 1
  MonomialBasis pressure_basis;  // M_{k_div}
  Matrix vector_basis;           // canonical coefficients of [grad | oplus] (d >= 2)
  Matrix G, G_nu, H, H_sharp;
  Matrix W1, W2, W, V;
  Matrix B, D;
  Matrix Pi_hat, Pi;
  Matrix K_a, K_s, K;
  double nu_bar = 0.0;
  // DOFs -> canonical velocity coefficients (d*n_k for d >= 2, coefficients on M_{k+1} for d = 1)
  Matrix velocity_map;
};

struct LocalOptions {
  // optional orthogonal matrix rotating the oplus basis
  const Matrix* oplus_rotation = nullptr;
};

// nu: inverse transmissivity in local coordinates (d x d) at each volume quadrature point.
LocalMatrices compute_local_matrices(const ElementSpace& space, const ElementGeometry& geom,
                                     const std::vector<Matrix>& nu, const LocalOptions& options = {});

// Evaluates the projected velocity (local components) at a local point.
Vec3 eval_velocity(const LocalMatrices& lm, int d, const Vector& velocity_coeffs, const Vec3& x);

void dump_local_matrices(std::ostream& out, const LocalMatrices& lm);

}  // namespace mvem

#endif
