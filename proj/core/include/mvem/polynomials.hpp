#ifndef MVEM_POLYNOMIALS_HPP_
#define MVEM_POLYNOMIALS_HPP_

#include <array>
#include <vector>

#include "mvem/quadrature.hpp"
#include "mvem/types.hpp"

namespace mvem {

using Exponent = std::array<int, 3>;

// C(k+d, d); 0 for k = -1
int dim_poly(int d, int k);

// graded lexicographic: by total degree, then x-power descending, then y-power descending
const std::vector<Exponent>& exponents(int d, int k);
int monomial_index(int d, const Exponent& e);

// (x - center)^alpha / h^|alpha| using the first d coordinates of x
class MonomialBasis {
 public:
  MonomialBasis() = default;
  MonomialBasis(int d, int k, const Vec3& center, double h);

  int dim() const { return d_; }
  int order() const { return k_; }
  int size() const { return n_; }
  const Vec3& center() const { return center_; }
  double scale() const { return h_; }

  Vector eval(const Vec3& x) const;
  void eval(const Vec3& x, double* out) const;
  // row a = d/dx_a of every monomial
  Matrix gradient(const Vec3& x) const;

 private:
  int d_ = 0, k_ = -1, n_ = 0;
  Vec3 center_ = Vec3::Zero();
  double h_ = 1.0;
  const std::vector<Exponent>* ex_ = nullptr;
};

// Coefficients of d/dx_axis of each monomial of order k expressed on monomials of order k-1.
// Result is n_{k-1} x n_k.
Matrix derivative_matrix(int d, int k, double h, int axis);

// Vector polynomials of degree k are stored on the canonical basis e_a * m_j, index a*n_k + j.
// Gradient basis g_b = grad m_{b+1}, b = 1 .. n_{k+1}-1, as a (d n_k) x (n_{k+1}-1) matrix.
Matrix gradient_basis(int d, int k, double h);

// Scalar mass matrix of the order-k monomials under a rule.
Matrix monomial_mass(const MonomialBasis& basis, const QuadratureRule& rule);

// L2-orthogonal complement of grad P_{k+1} in [P_k]^d given the scalar mass matrix of P_k.
// Columns are normalized so that the Gram matrix of the complement is (measure / h^2) * I.
Matrix oplus_basis(int d, int k, double h, const Matrix& scalar_mass, double measure);
Matrix oplus_basis(const MonomialBasis& basis_k, const QuadratureRule& rule);

// n_{k,grad} and n_{k,oplus}
inline int dim_grad(int d, int k) { return dim_poly(d, k + 1) - 1; }
inline int dim_oplus(int d, int k) { return d * dim_poly(d, k) - dim_grad(d, k); }

// Divergence of canonical vector coefficients, returned on monomials of order k-1 (size n_{k-1}).
Vector divergence_coefficients(int d, int k, double h, const Vector& coeffs);

}  // namespace mvem

#endif
