#ifndef MVEM_QUADRATURE_HPP_
#define MVEM_QUADRATURE_HPP_

#include <vector>

#include "mvem/types.hpp"

namespace mvem {

struct QuadratureRule {
  std::vector<Vec3> points;
  std::vector<double> weights;

  std::size_t size() const { return weights.size(); }
  double measure() const;
  void append(const QuadratureRule& other);
};

// Gauss-Jacobi nodes/weights on [-1,1] for weight (1-x)^alpha, n points.
void gauss_jacobi(int n, double alpha, std::vector<double>& x, std::vector<double>& w);

// exact for polynomials of total degree <= order
QuadratureRule segment_rule(const Vec3& a, const Vec3& b, int order);
QuadratureRule triangle_rule(const Vec3& a, const Vec3& b, const Vec3& c, int order);
// signed: weights carry the sign of the tetrahedron orientation
QuadratureRule tetrahedron_rule(const Vec3& a, const Vec3& b, const Vec3& c, const Vec3& d,
                                int order, bool signed_volume = false);

}  // namespace mvem

#endif
