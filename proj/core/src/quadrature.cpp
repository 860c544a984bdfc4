#include "mvem/quadrature.hpp"

#include <array>
#include <cmath>
#include <mutex>

#include <Eigen/Eigenvalues>

namespace mvem {

double QuadratureRule::measure() const {
  double s = 0.0;
  for (double w : weights) s += w;
  return s;
}

void QuadratureRule::append(const QuadratureRule& other) {
  points.insert(points.end(), other.points.begin(), other.points.end());
  weights.insert(weights.end(), other.weights.begin(), other.weights.end());
}

void gauss_jacobi(int n, double alpha, std::vector<double>& x, std::vector<double>& w) {
  // Golub-Welsch on the monic Jacobi recurrence, beta = 0
  const double a = alpha, b = 0.0;
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(n, n);
  for (int k = 0; k < n; ++k) {
    double s = 2.0 * k + a + b;
    J(k, k) = (k == 0) ? (b - a) / (a + b + 2.0) : (b * b - a * a) / (s * (s + 2.0));
    if (k + 1 < n) {
      double m = k + 1.0;
      double t = 2.0 * m + a + b;
      double bk = 4.0 * m * (m + a) * (m + b) * (m + a + b) / (t * t * (t + 1.0) * (t - 1.0));
      J(k, k + 1) = J(k + 1, k) = std::sqrt(bk);
    }
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J);
  double mu0 = std::pow(2.0, a + b + 1.0) * std::tgamma(a + 1.0) * std::tgamma(b + 1.0) /
               std::tgamma(a + b + 2.0);
  x.resize(n);
  w.resize(n);
  for (int k = 0; k < n; ++k) {
    x[k] = es.eigenvalues()(k);
    double v = es.eigenvectors()(0, k);
    w[k] = mu0 * v * v;
  }
}

namespace {

constexpr int kMaxPoints = 40;

struct Rule1D {
  std::vector<double> x, w;
};

const Rule1D& cached(int n, int alpha) {
  static std::array<std::array<Rule1D, kMaxPoints + 1>, 3> table;
  static std::array<std::array<std::once_flag, kMaxPoints + 1>, 3> flags;
  if (n < 1 || n > kMaxPoints) throw Error("quadrature: unsupported number of points");
  std::call_once(flags[alpha][n], [&] {
    gauss_jacobi(n, alpha, table[alpha][n].x, table[alpha][n].w);
  });
  return table[alpha][n];
}

int points_for(int degree) { return std::max(1, (degree + 2) / 2); }

}  // namespace

QuadratureRule segment_rule(const Vec3& a, const Vec3& b, int order) {
  const Rule1D& g = cached(points_for(order), 0);
  QuadratureRule q;
  double len = (b - a).norm();
  for (std::size_t i = 0; i < g.x.size(); ++i) {
    double t = 0.5 * (1.0 + g.x[i]);
    q.points.push_back(a + t * (b - a));
    q.weights.push_back(0.5 * len * g.w[i]);
  }
  return q;
}

QuadratureRule triangle_rule(const Vec3& a, const Vec3& b, const Vec3& c, int order) {
  int n = points_for(order);
  const Rule1D& ga = cached(n, 0);
  const Rule1D& gb = cached(n, 1);
  double jac = ((b - a).cross(c - a)).norm();
  QuadratureRule q;
  q.points.reserve(n * n);
  q.weights.reserve(n * n);
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      double xi = 0.25 * (1.0 + ga.x[i]) * (1.0 - gb.x[j]);
      double eta = 0.5 * (1.0 + gb.x[j]);
      q.points.push_back(a + xi * (b - a) + eta * (c - a));
      q.weights.push_back(ga.w[i] * gb.w[j] / 8.0 * jac);
    }
  }
  return q;
}

QuadratureRule tetrahedron_rule(const Vec3& a, const Vec3& b, const Vec3& c, const Vec3& d,
                                int order, bool signed_volume) {
  int n = points_for(order);
  const Rule1D& ga = cached(n, 0);
  const Rule1D& gb = cached(n, 1);
  const Rule1D& gc = cached(n, 2);
  double det = (b - a).dot((c - a).cross(d - a));
  double jac = signed_volume ? det : std::abs(det);
  QuadratureRule q;
  q.points.reserve(n * n * n);
  q.weights.reserve(n * n * n);
  for (int k = 0; k < n; ++k) {
    for (int j = 0; j < n; ++j) {
      for (int i = 0; i < n; ++i) {
        double xi = (1.0 + ga.x[i]) * (1.0 - gb.x[j]) * (1.0 - gc.x[k]) / 8.0;
        double eta = (1.0 + gb.x[j]) * (1.0 - gc.x[k]) / 4.0;
        double zeta = 0.5 * (1.0 + gc.x[k]);
        q.points.push_back(a + xi * (b - a) + eta * (c - a) + zeta * (d - a));
        q.weights.push_back(ga.w[i] * gb.w[j] * gc.w[k] / 64.0 * jac);
      }
    }
  }
  return q;
}

}  // namespace mvem
