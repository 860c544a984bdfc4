#ifndef MVEM_BUILTINS_HPP_
#define MVEM_BUILTINS_HPP_

#include <random>
#include <string>
#include <vector>

#include "mvem/pipeline.hpp"

namespace mvem {

// Sum of c * x^e over global coordinates.
struct Polynomial3 {
  std::vector<std::pair<double, Exponent>> terms;

  double operator()(const Vec3& x) const;
  Vec3 gradient(const Vec3& x) const;
  Mat3 hessian(const Vec3& x) const;
  int degree() const;
  // all monomials up to `degree` with coefficients uniform in [-1, 1]
  static Polynomial3 random(int degree, std::mt19937& rng);
};

using GradientField = std::function<Vec3(const Vec3&)>;
using HessianField = std::function<Mat3(const Vec3&)>;

// Exact velocity -a grad P (tangential on lower domains) and its tangential divergence.
ExactField darcy_field(const DomainMesh& dm, const Mat3& a, ScalarField p, GradientField grad, HessianField hess);

// Lower-dimensional boundary rule helpers
BoundaryRule dirichlet_everywhere(ScalarField g);  // every boundary facet of every domain

std::vector<std::string> list_builtins();

struct BuiltinOptions {
  std::string element;  // e.g. "RT4", "BDM2"; empty = builtin default
  int cells = 0;        // cells per axis; 0 = builtin default
  bool continuity = false;  // problem2: all normal transmissivities infinite
};

// Quartic benchmark on [-1,1]^3 with the three coordinate-plane fractures.
Scenario problem1_quartic(const BuiltinOptions& opt = {});
// Finite-eta network on [-2,2]x[-1,1]^2: fractures F1 (x=-1) and F4 (x=1) span the cross-section, F2
// (y=0) and F3 (z=0) run between them. F1 has eta = 1, every other lower-dimensional entity eta = 10.
Scenario problem2_finite_eta(const BuiltinOptions& opt = {});
// sin-product Poisson problem on the unit cube, n cells per axis
Scenario convergence_problem(const ElementSpace& space, int n);

struct PatchCase {
  std::string label;
  Scenario scenario;
};
// single-dimension polynomial patch problems (3D, standalone fracture, standalone trace)
std::vector<PatchCase> patch_cases(const std::vector<ElementSpace>& spaces_3d, const std::vector<int>& rt_orders_lower);

Scenario builtin_scenario(const std::string& name, const BuiltinOptions& opt = {});

}  // namespace mvem

#endif
