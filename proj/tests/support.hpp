#ifndef MVEM_TESTS_SUPPORT_HPP_
#define MVEM_TESTS_SUPPORT_HPP_

#include <cmath>
#include <random>
#include <vector>

#include "mvem/cutting.hpp"
#include "mvem/geometry.hpp"
#include "mvem/mixed_mesh.hpp"
#include "mvem/polynomials.hpp"
#include "mvem/quadrature.hpp"
#include "mvem/vem_local.hpp"

namespace mvem::fixtures {

inline double factorial(int n) { return std::tgamma(n + 1.0); }

// Star-shaped (generally non-convex) polygon in the z = 0 plane, counter-clockwise. Radii and
// angular jitter are bounded so the polygon stays shape-regular.
inline std::vector<Vec3> random_star_polygon(std::mt19937& rng, int n) {
  std::uniform_real_distribution<double> r(0.55, 1.0), jitter(-0.2, 0.2);
  const double pi = std::acos(-1.0);
  std::vector<Vec3> loop;
  for (int i = 0; i < n; ++i) {
    double t = 2 * pi * (i + 0.5 + jitter(rng)) / n;
    double rad = r(rng);
    loop.emplace_back(rad * std::cos(t), rad * std::sin(t), 0.0);
  }
  return loop;
}

inline Mat3 random_rotation(std::mt19937& rng) {
  std::normal_distribution<double> g;
  Eigen::Quaterniond q(g(rng), g(rng), g(rng), g(rng));
  return q.normalized().toRotationMatrix();
}

// Outward face loops of a prism over `base` (ccw seen from +z), top shifted by `shear`.
inline FaceLoops prism(const std::vector<Vec3>& base, double height, const Vec3& shear) {
  const std::size_t n = base.size();
  FaceLoops faces;
  std::vector<Vec3> bottom(base.rbegin(), base.rend()), top;
  for (const auto& v : base) top.push_back(v + Vec3(0, 0, height) + shear);
  faces.push_back(bottom);
  faces.push_back(top);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t j = (i + 1) % n;
    faces.push_back({base[i], base[j], top[j], top[i]});
  }
  return faces;
}

inline FaceLoops transform(const FaceLoops& faces, const Mat3& r, double scale, const Vec3& shift) {
  FaceLoops out = faces;
  for (auto& f : out)
    for (auto& v : f) v = scale * (r * v) + shift;
  return out;
}

// Random non-convex prism, rotated, scaled and translated.
inline FaceLoops random_polyhedron(std::mt19937& rng) {
  std::uniform_int_distribution<int> nv(3, 8);
  std::uniform_real_distribution<double> u(-1.0, 1.0), s(0.05, 20.0), hgt(0.6, 1.5);
  auto base = random_star_polygon(rng, nv(rng));
  FaceLoops f = prism(base, hgt(rng), Vec3(0.3 * u(rng), 0.3 * u(rng), 0.0));
  return transform(f, random_rotation(rng), s(rng), Vec3(5 * u(rng), 5 * u(rng), 5 * u(rng)));
}

// 2D element geometry of a polygon given in local (z = 0) coordinates, facets ccw.
inline ElementGeometry polygon_element(const std::vector<Vec3>& loop, int order) {
  ElementGeometry g;
  g.dim = 2;
  g.measure = polygon_area(loop);
  g.centroid = polygon_centroid(loop);
  g.diameter = diameter(loop);
  g.rule = polygon_rule(loop, order);
  for (std::size_t i = 0; i < loop.size(); ++i) {
    const Vec3& a = loop[i];
    const Vec3& b = loop[(i + 1) % loop.size()];
    FacetGeometry f;
    f.measure = (b - a).norm();
    f.e1 = (b - a) / f.measure;
    f.normal = Vec3(f.e1(1), -f.e1(0), 0.0);
    f.e2 = f.normal;
    f.origin = 0.5 * (a + b);
    f.h = f.measure;
    f.sign = 1;
    f.rule = segment_rule(a, b, order);
    g.facets.push_back(f);
  }
  return g;
}

// 3D element geometry of a polyhedron given by outward loops; facet normals are flipped at
// random so that both orientation signs are exercised.
inline ElementGeometry polyhedron_element(const FaceLoops& faces, int order, std::mt19937* rng = nullptr) {
  ElementGeometry g;
  g.dim = 3;
  std::vector<Vec3> all;
  for (const auto& f : faces) all.insert(all.end(), f.begin(), f.end());
  g.measure = polyhedron_volume(faces);
  g.centroid = polyhedron_centroid(faces);
  g.diameter = diameter(all);
  g.rule = polyhedron_rule(faces, order);
  for (const auto& loop : faces) {
    FacetGeometry f;
    Frame fr = polygon_frame(loop);
    f.origin = fr.origin;
    f.e1 = fr.e1;
    f.e2 = fr.e2;
    f.normal = fr.normal;
    f.sign = 1;
    if (rng && (*rng)() % 2) {
      f.normal = -f.normal;
      f.sign = -1;
    }
    f.measure = polygon_area(loop);
    f.h = diameter(loop);
    f.rule = polygon_rule(loop, order);
    g.facets.push_back(f);
  }
  return g;
}

struct IdentityErrors {
  double bd = 0.0, pid = 0.0, ksd = 0.0, vd = 0.0;
};

// B D = G, Pi_hat D = I, K_s D = 0 and V D = divergence of the polynomial basis, where the
// divergence is formed from monomial gradients and L2-projected onto the pressure monomials.
inline IdentityErrors check_identities(const ElementSpace& sp, const ElementGeometry& g, const Matrix& nu_tensor) {
  std::vector<Matrix> nu(g.rule.size(), nu_tensor);
  LocalMatrices lm = compute_local_matrices(sp, g, nu);
  const int d = g.dim;
  const Index np = lm.G.rows();
  IdentityErrors e;
  e.bd = (lm.B * lm.D - lm.G).norm() / lm.G.norm();
  e.pid = (lm.Pi_hat * lm.D - Matrix::Identity(np, np)).norm() / std::sqrt(static_cast<double>(np));
  e.ksd = (lm.K_s * lm.D).norm() / lm.K_s.norm();

  MonomialBasis vb(d, sp.k, g.centroid, g.diameter);
  MonomialBasis pb(d, sp.k_div, g.centroid, g.diameter);
  Matrix mass = Matrix::Zero(pb.size(), pb.size());
  Matrix rhs = Matrix::Zero(pb.size(), np);
  for (std::size_t q = 0; q < g.rule.size(); ++q) {
    Vector m = pb.eval(g.rule.points[q]);
    Matrix grad = vb.gradient(g.rule.points[q]);  // d x n_k
    Vector div = Vector::Zero(np);
    for (Index c = 0; c < np; ++c)
      for (int a = 0; a < d; ++a) div(c) += grad.row(a).dot(lm.vector_basis.col(c).segment(a * vb.size(), vb.size()));
    mass += g.rule.weights[q] * m * m.transpose();
    rhs += g.rule.weights[q] * m * div.transpose();
  }
  Matrix div_coeffs = mass.ldlt().solve(rhs);
  // lowest order: the divergence vanishes, so measure against the operator sizes
  e.vd = (lm.V * lm.D - div_coeffs).norm() / std::max(div_coeffs.norm(), lm.V.norm() * lm.D.norm());
  return e;
}

inline Matrix random_spd(std::mt19937& rng, int d) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Matrix a(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) a(i, j) = u(rng);
  return a * a.transpose() + 0.5 * Matrix::Identity(d, d);
}

inline FracturePolygon quad(const Vec3& c, const Vec3& normal, double su, double sv) {
  Frame f = Frame::from_normal(c, normal);
  return FracturePolygon{{c - su * f.e1 - sv * f.e2, c + su * f.e1 - sv * f.e2, c + su * f.e1 + sv * f.e2,
                          c - su * f.e1 + sv * f.e2}};
}

}  // namespace mvem::fixtures

#endif
