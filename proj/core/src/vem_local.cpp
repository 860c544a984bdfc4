#include "mvem/vem_local.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <ostream>

#include <Eigen/Cholesky>
#include <Eigen/LU>

namespace mvem {

ElementSpace ElementSpace::parse(int d, const std::string& name) {
  ElementSpace s;
  std::string fam;
  std::size_t i = 0;
  while (i < name.size() && std::isalpha(static_cast<unsigned char>(name[i]))) fam += static_cast<char>(std::toupper(name[i++]));
  if (i == name.size()) throw ConfigError("element name '" + name + "' lacks an order");
  int k = 0;
  try {
    k = std::stoi(name.substr(i));
  } catch (const std::exception&) {
    throw ConfigError("bad element order in '" + name + "'");
  }
  if (fam == "RT")
    s = rt(d, k);
  else if (fam == "BDM")
    s = bdm(d, k);
  else
    throw ConfigError("unknown element family '" + fam + "'");
  s.validate();
  return s;
}

std::string ElementSpace::name() const { return (family == Family::RT ? "RT" : "BDM") + std::to_string(k); }

void ElementSpace::validate() const {
  if (d < 1 || d > 3) throw ConfigError("element dimension must be 1, 2 or 3");
  if (k < 0 || k > 4) throw ConfigError("element order must be in 0..4");
  if (family == Family::BDM) {
    if (k < 1) throw ConfigError("BDM needs k >= 1");
    if (d != 3) throw ConfigError("BDM elements are only available for the 3D block");
    if (k_div != k - 1) throw ConfigError("BDM requires k_div = k - 1");
  } else if (k_div != k) {
    throw ConfigError("RT requires k_div = k");
  }
}

DofLayout dof_layout(const ElementSpace& s, int num_facets) {
  DofLayout l;
  l.num_facets = num_facets;
  l.per_facet = s.d == 1 ? 1 : dim_poly(s.d - 1, s.k);
  l.num_grad = dim_poly(s.d, s.k_div) - 1;
  l.num_oplus = s.d == 1 ? 0 : dim_oplus(s.d, s.k);
  return l;
}

Matrix FacetGeometry::basis_at_points(int d_facet, int k) const {
  const int n = d_facet == 0 ? 1 : dim_poly(d_facet, k);
  Matrix out(rule.size(), n);
  if (d_facet == 0) {
    out.setOnes();
    return out;
  }
  MonomialBasis mb(d_facet, k, Vec3::Zero(), 1.0);
  Vector v(n);
  for (std::size_t q = 0; q < rule.size(); ++q) {
    mb.eval(facet_coords(rule.points[q]), v.data());
    out.row(q) = v.transpose();
  }
  return out;
}

FacetGeometry facet_geometry(const MixedMesh& mesh, int domain, Index id, int order) {
  const DomainMesh& dm = mesh.domains[domain];
  const Facet& fa = dm.facets[id];
  FacetGeometry g;
  g.normal = dm.vector_to_local(fa.normal).normalized();
  if (dm.dim == 3) {
    std::vector<Vec3> pts;
    for (Index v : fa.vertices) pts.push_back(mesh.vertex(v));
    Frame fr = polygon_frame(pts);
    g.origin = fr.origin;
    g.e1 = fr.e1;
    g.e2 = fr.e2;
    g.measure = polygon_area(pts);
    g.h = diameter(pts);
    g.rule = polygon_rule(pts, order);
  } else if (dm.dim == 2) {
    Vec3 a = dm.to_local(mesh.vertex(fa.vertices[0]));
    Vec3 b = dm.to_local(mesh.vertex(fa.vertices[1]));
    g.origin = 0.5 * (a + b);
    g.measure = (b - a).norm();
    if (!(g.measure > 0.0)) throw GeometryError("zero-length fracture edge");
    g.e1 = (b - a) / g.measure;
    g.e2 = g.normal;
    g.h = g.measure;
    g.rule = segment_rule(a, b, order);
  } else {
    Vec3 p = dm.to_local(mesh.vertex(fa.vertices[0]));
    g.origin = p;
    g.measure = 1.0;
    g.h = 1.0;
    g.rule.points = {p};
    g.rule.weights = {1.0};
  }
  return g;
}

ElementGeometry element_geometry(const MixedMesh& mesh, int domain, Index e, int order) {
  const DomainMesh& dm = mesh.domains[domain];
  ElementGeometry g;
  g.dim = dm.dim;
  if (dm.dim == 3) {
    FaceLoops loops;
    std::vector<Vec3> all;
    for (std::size_t i = 0; i < dm.element_facets[e].size(); ++i) {
      std::vector<Vec3> p;
      for (Index v : dm.facets[dm.element_facets[e][i]].vertices) p.push_back(mesh.vertex(v));
      all.insert(all.end(), p.begin(), p.end());
      if (dm.element_signs[e][i] < 0) std::reverse(p.begin(), p.end());
      loops.push_back(std::move(p));
    }
    g.measure = polyhedron_volume(loops);
    if (!(g.measure > 0.0)) throw GeometryError("element with non-positive volume");
    g.centroid = polyhedron_centroid(loops);
    g.diameter = diameter(all);
    g.rule = polyhedron_rule(loops, order);
  } else if (dm.dim == 2) {
    std::vector<Vec3> loop;
    for (Index v : dm.element_vertices[e]) loop.push_back(dm.to_local(mesh.vertex(v)));
    g.measure = polygon_area(loop);
    if (!(g.measure > 0.0)) throw GeometryError("fracture cell with zero area");
    g.centroid = polygon_centroid(loop);
    g.diameter = diameter(loop);
    g.rule = polygon_rule(loop, order);
  } else if (dm.dim == 1) {
    double a = dm.to_local(mesh.vertex(dm.element_vertices[e][0]))(0);
    double b = dm.to_local(mesh.vertex(dm.element_vertices[e][1]))(0);
    g.s0 = std::min(a, b);
    g.s1 = std::max(a, b);
    g.measure = g.s1 - g.s0;
    if (!(g.measure > 0.0)) throw GeometryError("trace cell with zero length");
    g.centroid = Vec3(0.5 * (a + b), 0, 0);
    g.diameter = g.measure;
    g.rule = segment_rule(Vec3(g.s0, 0, 0), Vec3(g.s1, 0, 0), order);
  } else {
    g.measure = 1.0;
    g.centroid = dm.to_local(mesh.vertex(dm.element_vertices[e][0]));
    g.diameter = 1.0;
    return g;
  }
  for (std::size_t i = 0; i < dm.element_facets[e].size(); ++i) {
    FacetGeometry f = facet_geometry(mesh, domain, dm.element_facets[e][i], order);
    f.sign = dm.element_signs[e][i];
    g.facets.push_back(std::move(f));
  }
  return g;
}

namespace {

// SPD factorization with a relative pivot threshold
Eigen::LDLT<Matrix> spd_factor(const Matrix& m, const char* what) {
  Eigen::LDLT<Matrix> f(m);
  Vector dg = f.vectorD();
  if (f.info() != Eigen::Success || dg.size() == 0 || dg.minCoeff() <= 1e-13 * dg.cwiseAbs().maxCoeff())
    throw ConditioningError(std::string(what) + " is not positive definite");
  return f;
}

// rows = points, columns = monomials
Matrix values_at(const MonomialBasis& b, const QuadratureRule& rule) {
  Matrix out(rule.size(), b.size());
  Vector v(b.size());
  for (std::size_t q = 0; q < rule.size(); ++q) {
    b.eval(rule.points[q], v.data());
    out.row(q) = v.transpose();
  }
  return out;
}

Vector weights_of(const QuadratureRule& rule) {
  return Eigen::Map<const Vector>(rule.weights.data(), static_cast<Index>(rule.weights.size()));
}

LocalMatrices local_1d(const ElementSpace& s, const ElementGeometry& g, const std::vector<Matrix>& nu) {
  LocalMatrices lm;
  const int k = s.k;
  const int n = k + 2;
  const double len = g.measure;
  const Vec3 c = g.centroid;
  lm.layout = dof_layout(s, 2);
  if (g.facets.size() != 2) throw TopologyError("trace cell must have two end points");
  lm.velocity_basis = MonomialBasis(1, k + 1, c, len);
  lm.pressure_basis = MonomialBasis(1, k, c, len);
  Matrix vals = values_at(lm.velocity_basis, g.rule);
  Matrix pv = vals.leftCols(k + 1);
  Vector w = weights_of(g.rule);
  Matrix deriv = derivative_matrix(1, k + 1, len, 0);  // (k+1) x n

  Matrix dm = Matrix::Zero(n, n);
  for (int f = 0; f < 2; ++f) {
    const auto& fg = g.facets[f];
    Vector m = lm.velocity_basis.eval(fg.rule.points[0]);
    dm.row(f) = fg.normal(0) * m.transpose();
  }
  // type ii: (1/|E|) int v dm_a/ds, a = 1..k
  Matrix dmk = derivative_matrix(1, k, len, 0);  // k x (k+1)
  Matrix mass_lo = vals.leftCols(k).transpose() * w.asDiagonal() * vals;  // k x n
  for (int a = 1; a <= k; ++a) {
    // d m_a / ds = sum_i dmk(i, a) m_i
    dm.row(1 + a) = (dmk.col(a).transpose() * mass_lo) / len;
  }
  Eigen::PartialPivLU<Matrix> lu(dm);
  if (std::abs(lu.determinant()) < 1e-300) throw ConditioningError("singular 1D DOF matrix");
  Matrix phi = lu.inverse();

  Matrix mnu = Matrix::Zero(n, n);
  for (std::size_t q = 0; q < g.rule.size(); ++q) mnu += w(q) * nu[q](0, 0) * vals.row(q).transpose() * vals.row(q);
  lm.K_a = phi.transpose() * mnu * phi;
  lm.K_s = Matrix::Zero(n, n);
  lm.K = lm.K_a;
  // int m_a m_j'
  Matrix mp = pv.transpose() * w.asDiagonal() * vals.leftCols(k + 1) * deriv;  // (k+1) x n
  lm.W = mp * phi;
  lm.W1 = Matrix::Zero(k + 1, n);
  lm.W2 = lm.W;
  lm.H = pv.transpose() * w.asDiagonal() * pv;
  lm.V = spd_factor(lm.H, "pressure mass matrix").solve(lm.W);
  lm.D = dm;
  lm.Pi_hat = phi;
  lm.Pi = Matrix::Identity(n, n);
  lm.velocity_map = phi;
  double nb = 0.0;
  for (std::size_t q = 0; q < g.rule.size(); ++q) nb += w(q) * nu[q](0, 0);
  lm.nu_bar = nb / len;
  return lm;
}

}  // namespace

LocalMatrices compute_local_matrices(const ElementSpace& s, const ElementGeometry& g, const std::vector<Matrix>& nu,
                                     const LocalOptions& opt) {
  if (s.d != g.dim) throw ConfigError("element space dimension does not match the element");
  if (nu.size() != g.rule.size()) throw ConfigError("nu must be given at every quadrature point");
  if (g.dim == 1) return local_1d(s, g, nu);

  LocalMatrices lm;
  const int d = g.dim, k = s.k, kd = s.k_div;
  const int nk = dim_poly(d, k), nv = d * nk, ng = dim_grad(d, k), nkd = dim_poly(d, kd);
  const int nf = static_cast<int>(g.facets.size());
  const double vol = g.measure, h = g.diameter;
  const DofLayout L = dof_layout(s, nf);
  const int ndof = L.total(), pf = L.per_facet;
  lm.layout = L;
  lm.velocity_basis = MonomialBasis(d, k, g.centroid, h);
  lm.pressure_basis = MonomialBasis(d, kd, g.centroid, h);
  MonomialBasis m1(d, k + 1, g.centroid, h);

  Matrix vals = values_at(m1, g.rule);  // Q x n_{k+1}
  Vector w = weights_of(g.rule);
  Matrix mass1 = vals.transpose() * w.asDiagonal() * vals;
  Matrix mkk = mass1.topLeftCorner(nk, nk);

  Matrix oplus = oplus_basis(d, k, h, mkk, vol);
  if (opt.oplus_rotation) oplus = oplus * (*opt.oplus_rotation);
  Matrix P(nv, nv);
  P << gradient_basis(d, k, h), oplus;
  lm.vector_basis = P;

  Matrix mblk = Matrix::Zero(nv, nv);
  for (int a = 0; a < d; ++a) mblk.block(a * nk, a * nk, nk, nk) = mkk;
  lm.G = P.transpose() * mblk * P;
  lm.G = 0.5 * (lm.G + lm.G.transpose());

  lm.G_nu = Matrix::Zero(nv, nv);
  double nb = 0.0;
  Matrix phi(d, nv);
  for (std::size_t q = 0; q < g.rule.size(); ++q) {
    auto vk = vals.row(q).head(nk);
    for (int a = 0; a < d; ++a) phi.row(a) = vk * P.middleRows(a * nk, nk);
    lm.G_nu += w(q) * phi.transpose() * nu[q] * phi;
    nb += w(q) * nu[q].trace() / d;
  }
  lm.G_nu = 0.5 * (lm.G_nu + lm.G_nu.transpose());
  lm.nu_bar = nb / vol;

  lm.H = mass1.topLeftCorner(nkd, nkd);
  lm.H_sharp = mass1.block(1, 0, ng, nkd);

  lm.D = Matrix::Zero(ndof, nv);
  lm.W1 = Matrix::Zero(nkd, ndof);
  lm.W2 = Matrix::Zero(nkd, ndof);
  Matrix B2 = Matrix::Zero(ng, ndof);
  for (int f = 0; f < nf; ++f) {
    const FacetGeometry& fg = g.facets[f];
    Matrix fm = fg.basis_at_points(d - 1, k);  // Qf x pf
    Vector fw = weights_of(fg.rule);
    Matrix hf = fm.transpose() * fw.asDiagonal() * fm;
    Matrix hf_inv = spd_factor(hf, "facet mass matrix").solve(Matrix::Identity(pf, pf));
    Matrix fv = values_at(m1, fg.rule);        // Qf x n_{k+1}
    Matrix nmat = fv.transpose() * fw.asDiagonal() * fm;  // n_{k+1} x pf
    Matrix blk = fg.sign * fg.measure * nmat * hf_inv;
    lm.W2.block(0, f * pf, nkd, pf) = blk.topRows(nkd);
    B2.block(0, f * pf, ng, pf) = blk.middleRows(1, ng);
    // face DOFs of the vector basis: (1/|f|) int (p . n_f) m_f
    Matrix pn = Matrix::Zero(fg.rule.size(), nv);
    for (int a = 0; a < d; ++a) pn += fg.normal(a) * fv.leftCols(nk) * P.middleRows(a * nk, nk);
    lm.D.block(f * pf, 0, pf, nv) = fm.transpose() * fw.asDiagonal() * pn / fg.measure;
  }
  lm.D.middleRows(L.offset_grad(), L.num_grad) = lm.G.topRows(L.num_grad) / vol;
  lm.D.middleRows(L.offset_oplus(), L.num_oplus) = lm.G.bottomRows(L.num_oplus) / vol;

  for (int a = 1; a < nkd; ++a) lm.W1(a, L.offset_grad() + a - 1) = -vol;
  lm.W = lm.W1 + lm.W2;
  lm.V = spd_factor(lm.H, "pressure mass matrix").solve(lm.W);

  lm.B = Matrix::Zero(nv, ndof);
  lm.B.topRows(ng) = -lm.H_sharp * lm.V + B2;
  for (int j = 0; j < L.num_oplus; ++j) lm.B(ng + j, L.offset_oplus() + j) = vol;

  lm.Pi_hat = spd_factor(lm.G, "G").solve(lm.B);
  lm.Pi = lm.D * lm.Pi_hat;
  lm.K_a = lm.Pi_hat.transpose() * lm.G_nu * lm.Pi_hat;
  Matrix r = Matrix::Identity(ndof, ndof) - lm.Pi;
  lm.K_s = lm.nu_bar * vol * r.transpose() * r;
  lm.K = lm.K_a + lm.K_s;
  lm.K = 0.5 * (lm.K + lm.K.transpose());
  lm.velocity_map = P * lm.Pi_hat;
  return lm;
}

Vec3 eval_velocity(const LocalMatrices& lm, int d, const Vector& c, const Vec3& x) {
  Vector m = lm.velocity_basis.eval(x);
  Vec3 u = Vec3::Zero();
  if (d == 1) {
    u(0) = m.dot(c);
    return u;
  }
  const int nk = lm.velocity_basis.size();
  for (int a = 0; a < d; ++a) u(a) = m.dot(c.segment(a * nk, nk));
  return u;
}

void dump_local_matrices(std::ostream& out, const LocalMatrices& lm) {
  const Eigen::IOFormat fmt(Eigen::FullPrecision, 0, " ", "\n");
  auto put = [&](const char* name, const Matrix& m) {
    out << name << " " << m.rows() << " " << m.cols() << "\n";
    if (m.size()) out << m.format(fmt) << "\n";
  };
  put("G", lm.G);
  put("G_nu", lm.G_nu);
  put("H", lm.H);
  put("H_sharp", lm.H_sharp);
  put("W1", lm.W1);
  put("W2", lm.W2);
  put("V", lm.V);
  put("B", lm.B);
  put("D", lm.D);
  put("Pi_hat", lm.Pi_hat);
  put("K_a", lm.K_a);
  put("K_s", lm.K_s);
}

}  // namespace mvem
