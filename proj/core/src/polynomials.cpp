#include "mvem/polynomials.hpp"

#include <cmath>
#include <map>
#include <mutex>

#include <Eigen/Cholesky>
#include <Eigen/QR>

namespace mvem {

int dim_poly(int d, int k) {
  if (k < 0) return 0;
  long long r = 1;
  for (int i = 1; i <= d; ++i) r = r * (k + i) / i;
  return static_cast<int>(r);
}

const std::vector<Exponent>& exponents(int d, int k) {
  static std::mutex mu;
  static std::map<std::pair<int, int>, std::vector<Exponent>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto key = std::make_pair(d, k);
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;
  std::vector<Exponent> out;
  for (int p = 0; p <= k; ++p) {
    if (d == 1) {
      out.push_back({p, 0, 0});
    } else if (d == 2) {
      for (int a = p; a >= 0; --a) out.push_back({a, p - a, 0});
    } else {
      for (int a = p; a >= 0; --a)
        for (int b = p - a; b >= 0; --b) out.push_back({a, b, p - a - b});
    }
  }
  return cache.emplace(key, std::move(out)).first->second;
}

int monomial_index(int d, const Exponent& e) {
  int p = e[0] + e[1] + e[2];
  int idx = dim_poly(d, p - 1);
  if (d == 1) return idx;
  if (d == 2) return idx + (p - e[0]);
  // within degree p: blocks for a = p, p-1, ..., sizes 1, 2, ..., then b descending
  int r = p - e[0];
  return idx + r * (r + 1) / 2 + (r - e[1]);
}

MonomialBasis::MonomialBasis(int d, int k, const Vec3& center, double h)
    : d_(d), k_(k), n_(dim_poly(d, k)), center_(center), h_(h), ex_(&exponents(d, k)) {
  if (!(h > 0.0)) throw GeometryError("monomial scaling must be positive");
}

void MonomialBasis::eval(const Vec3& x, double* out) const {
  double pw[3][16];
  for (int a = 0; a < d_; ++a) {
    double t = (x(a) - center_(a)) / h_;
    pw[a][0] = 1.0;
    for (int p = 1; p <= k_; ++p) pw[a][p] = pw[a][p - 1] * t;
  }
  const auto& ex = *ex_;
  for (int i = 0; i < n_; ++i) {
    double v = 1.0;
    for (int a = 0; a < d_; ++a) v *= pw[a][ex[i][a]];
    out[i] = v;
  }
}

Vector MonomialBasis::eval(const Vec3& x) const {
  Vector v(n_);
  eval(x, v.data());
  return v;
}

Matrix MonomialBasis::gradient(const Vec3& x) const {
  Matrix g = Matrix::Zero(d_, n_);
  if (k_ < 1) return g;
  MonomialBasis lower(d_, k_ - 1, center_, h_);
  Vector v = lower.eval(x);
  for (int a = 0; a < d_; ++a) g.row(a) = (derivative_matrix(d_, k_, h_, a).transpose() * v).transpose();
  return g;
}

Matrix derivative_matrix(int d, int k, double h, int axis) {
  const int nl = dim_poly(d, k - 1);
  const auto& ex = exponents(d, k);
  Matrix m = Matrix::Zero(nl, dim_poly(d, k));
  for (int i = 0; i < static_cast<int>(ex.size()); ++i) {
    if (ex[i][axis] == 0) continue;
    Exponent e = ex[i];
    e[axis] -= 1;
    m(monomial_index(d, e), i) = ex[i][axis] / h;
  }
  return m;
}

Matrix gradient_basis(int d, int k, double h) {
  const int nk = dim_poly(d, k);
  const auto& ex = exponents(d, k + 1);
  const int ng = dim_grad(d, k);
  Matrix c = Matrix::Zero(d * nk, ng);
  for (int b = 0; b < ng; ++b) {
    const Exponent& e = ex[b + 1];
    for (int a = 0; a < d; ++a) {
      if (e[a] == 0) continue;
      Exponent f = e;
      f[a] -= 1;
      c(a * nk + monomial_index(d, f), b) = e[a] / h;
    }
  }
  return c;
}

Matrix monomial_mass(const MonomialBasis& basis, const QuadratureRule& rule) {
  const int n = basis.size();
  Matrix m = Matrix::Zero(n, n);
  Vector v(n);
  for (std::size_t q = 0; q < rule.size(); ++q) {
    basis.eval(rule.points[q], v.data());
    m.selfadjointView<Eigen::Lower>().rankUpdate(v, rule.weights[q]);
  }
  Matrix full = m.selfadjointView<Eigen::Lower>();
  return full;
}

Matrix oplus_basis(int d, int k, double h, const Matrix& scalar_mass, double measure) {
  const int nk = dim_poly(d, k);
  const int n = d * nk;
  const int ng = dim_grad(d, k);
  const int no = n - ng;
  if (no == 0) return Matrix(n, 0);
  Eigen::LLT<Matrix> llt(scalar_mass);
  if (llt.info() != Eigen::Success) throw ConditioningError("monomial mass matrix not positive definite");
  // work in coordinates where the L2 product is Euclidean: y = L^T c
  Matrix lt = Matrix::Zero(n, n);
  Matrix l = llt.matrixL();
  for (int a = 0; a < d; ++a) lt.block(a * nk, a * nk, nk, nk) = l.transpose();
  Matrix yg = lt * gradient_basis(d, k, h);
  Eigen::ColPivHouseholderQR<Matrix> qr(yg);
  qr.setThreshold(1e-12);
  if (qr.rank() != ng) throw ConditioningError("gradient basis lost rank in complement construction");
  Matrix q = qr.householderQ() * Matrix::Identity(n, n);
  Matrix y = q.rightCols(no);
  // c = L^{-T} y
  Matrix c(n, no);
  for (int a = 0; a < d; ++a)
    c.middleRows(a * nk, nk) = l.transpose().triangularView<Eigen::Upper>().solve(y.middleRows(a * nk, nk));
  // same size as the gradient basis (which carries 1/h), so G stays balanced at any scale
  return c * (std::sqrt(measure) / h);
}

Matrix oplus_basis(const MonomialBasis& basis_k, const QuadratureRule& rule) {
  return oplus_basis(basis_k.dim(), basis_k.order(), basis_k.scale(), monomial_mass(basis_k, rule),
                     rule.measure());
}

Vector divergence_coefficients(int d, int k, double h, const Vector& coeffs) {
  const int nk = dim_poly(d, k);
  Vector div = Vector::Zero(dim_poly(d, k - 1));
  if (k < 1) return div;
  for (int a = 0; a < d; ++a) div += derivative_matrix(d, k, h, a) * coeffs.segment(a * nk, nk);
  return div;
}

}  // namespace mvem
