#include "mvem/assembly.hpp"

#include <algorithm>
#include <numeric>
#include <ostream>

#include <Eigen/Cholesky>

#include "mvem/parallel.hpp"

namespace mvem {

Index GlobalDofMap::facet_slot(const MixedMesh& mesh, int domain, Index facet, Index e) const {
  const auto& slots = facet_dofs[domain][facet];
  if (slots.size() == 1) return 0;
  const auto& owners = mesh.domains[domain].facets[facet].owners;
  for (std::size_t i = 0; i < owners.size(); ++i)
    if (owners[i].element == e) return static_cast<Index>(i);
  throw TopologyError("element does not own facet");
}

std::vector<Index> GlobalDofMap::element_flux_dofs(const MixedMesh& mesh, int domain, Index e) const {
  const auto& dm = mesh.domains[domain];
  const DofLayout& l = layout[domain];
  std::vector<Index> ids;
  for (Index f : dm.element_facets[e]) {
    Index base = facet_dofs[domain][f][facet_slot(mesh, domain, f, e)];
    for (int j = 0; j < l.per_facet; ++j) ids.push_back(base + j);
  }
  for (int j = 0; j < l.num_grad + l.num_oplus; ++j) ids.push_back(interior_dofs[domain][e] + j);
  return ids;
}

GlobalDofMap build_dof_map(const MixedMesh& mesh, const ProblemData& pb) {
  GlobalDofMap m;
  const std::size_t nd = mesh.domains.size();
  m.domains.resize(nd);
  m.space.resize(nd);
  m.layout.resize(nd);
  m.facet_dofs.resize(nd);
  m.interior_dofs.resize(nd);
  m.pressure_dofs.resize(nd);
  Index next = 0;
  for (std::size_t di = 0; di < nd; ++di) {
    const DomainMesh& dm = mesh.domains[di];
    const int d = dm.dim;
    DomainDofs& dd = m.domains[di];
    const bool flux = d >= 2 || (d == 1 && pb.trace_flow);
    const bool pressure = d >= 1 || pb.trace_flow;
    if (d >= 1) {
      m.space[di] = pb.spaces[d];
      if (m.space[di].d != d) throw ConfigError("element space dimension mismatch for " + mesh.domain_name(di));
      m.space[di].validate();
      m.layout[di] = dof_layout(m.space[di], 0);
    }
    dd.flux_begin = next;
    if (flux) {
      const DofLayout& l = m.layout[di];
      m.facet_dofs[di].resize(dm.facets.size());
      for (std::size_t f = 0; f < dm.facets.size(); ++f) {
        const Facet& fa = dm.facets[f];
        std::size_t slots = fa.kind == FacetKind::Interface ? fa.owners.size() : 1;
        if (fa.owners.empty()) throw TopologyError("facet without owner in " + mesh.domain_name(di));
        if (fa.kind != FacetKind::Interface && fa.owners.size() > 2)
          throw TopologyError("facet with more than two owners in " + mesh.domain_name(di));
        for (std::size_t s = 0; s < slots; ++s) {
          m.facet_dofs[di][f].push_back(next);
          next += l.per_facet;
        }
        m.duplicated += static_cast<Index>(slots - 1) * l.per_facet;
      }
      for (Index e = 0; e < dm.num_elements(); ++e) {
        m.interior_dofs[di].push_back(next);
        next += l.num_grad + l.num_oplus;
      }
    }
    dd.flux_count = next - dd.flux_begin;
    dd.pressure_begin = next;
    if (pressure) {
      const int np = d == 0 ? 1 : dim_poly(d, m.space[di].k_div);
      for (Index e = 0; e < dm.num_elements(); ++e) {
        m.pressure_dofs[di].push_back(next);
        next += np;
      }
    }
    dd.pressure_count = next - dd.pressure_begin;
    m.flux_by_dim[d] += dd.flux_count;
    m.pressure_by_dim[d] += dd.pressure_count;
  }
  m.total = next;
  return m;
}

Matrix local_nu(const DomainMesh& dm, const Mat3& a) {
  switch (dm.dim) {
    case 3: return a.inverse();
    case 2: {
      Eigen::Matrix<double, 3, 2> r;
      r.col(0) = dm.frame.e1;
      r.col(1) = dm.frame.e2;
      return (r.transpose() * a * r).inverse();
    }
    case 1: {
      Matrix m(1, 1);
      m(0, 0) = 1.0 / dm.tangent.dot(a * dm.tangent);
      return m;
    }
    default: return Matrix();
  }
}

namespace {

struct UnionFind {
  std::vector<int> p;
  explicit UnionFind(int n) : p(n) { std::iota(p.begin(), p.end(), 0); }
  int find(int x) { return p[x] == x ? x : p[x] = find(p[x]); }
  void unite(int a, int b) { p[find(a)] = find(b); }
};

Matrix facet_mass_inverse(const Matrix& fm, const QuadratureRule& rule, Matrix* mass = nullptr) {
  Vector w = Eigen::Map<const Vector>(rule.weights.data(), static_cast<Index>(rule.weights.size()));
  Matrix hf = fm.transpose() * w.asDiagonal() * fm;
  if (mass) *mass = hf;
  Eigen::LDLT<Matrix> f(hf);
  if (f.info() != Eigen::Success || f.vectorD().minCoeff() <= 1e-13 * f.vectorD().cwiseAbs().maxCoeff())
    throw ConditioningError("facet mass matrix is not positive definite");
  return f.solve(Matrix::Identity(hf.rows(), hf.cols()));
}

}  // namespace

GlobalSystem assemble_system(const MixedMesh& mesh, const ProblemData& pb, const AssemblyOptions& opt) {
  const int nd = static_cast<int>(mesh.domains.size());
  if (static_cast<int>(pb.domains.size()) != nd) throw ConfigError("problem data must cover every domain");
  if (!pb.trace_flow)
    for (int t : mesh.trace_domain)
      if (pb.domains[t].inverse_eta != 0.0)
        throw ConfigError("trace flow disabled but " + mesh.domain_name(t) + " has finite normal transmissivity");

  GlobalSystem sys;
  sys.dofs = build_dof_map(mesh, pb);
  const GlobalDofMap& dofs = sys.dofs;
  sys.geometry.resize(nd);
  sys.local.resize(nd);
  sys.load.resize(nd);

  std::vector<std::pair<int, Index>> items;
  for (int di = 0; di < nd; ++di) {
    const Index ne = mesh.domains[di].num_elements();
    sys.geometry[di].resize(ne);
    sys.local[di].resize(ne);
    sys.load[di].resize(ne);
    for (Index e = 0; e < ne; ++e) items.emplace_back(di, e);
  }
  parallel_for(
      items.size(),
      [&](std::size_t i) {
        auto [di, e] = items[i];
        const DomainMesh& dm = mesh.domains[di];
        const DomainData& data = pb.domains[di];
        if (dm.dim == 0) {
          ElementGeometry g = element_geometry(mesh, di, e, 0);
          Vector l(1);
          l(0) = data.source ? data.source(mesh.vertex(dm.element_vertices[e][0])) : 0.0;
          sys.geometry[di][e] = std::move(g);
          sys.load[di][e] = l;
          return;
        }
        const ElementSpace& sp = dofs.space[di];
        ElementGeometry g = element_geometry(mesh, di, e, element_rule_order(sp));
        std::vector<Matrix> nu;
        nu.reserve(g.rule.size());
        Vector load = Vector::Zero(dim_poly(dm.dim, sp.k_div));
        MonomialBasis pbasis(dm.dim, sp.k_div, g.centroid, g.diameter);
        for (std::size_t q = 0; q < g.rule.size(); ++q) {
          Vec3 x = dm.to_global(g.rule.points[q]);
          nu.push_back(local_nu(dm, data.transmissivity ? data.transmissivity(x) : Mat3::Identity()));
          if (data.source) load += g.rule.weights[q] * data.source(x) * pbasis.eval(g.rule.points[q]);
        }
        if (dofs.domains[di].flux_count > 0) sys.local[di][e] = compute_local_matrices(sp, g, nu);
        sys.load[di][e] = load;
        sys.geometry[di][e] = std::move(g);
      },
      opt.threads);

  std::vector<Eigen::Triplet<double, int>> trip;
  sys.rhs = Vector::Zero(dofs.total);
  sys.neumann.assign(dofs.total, 0);
  UnionFind uf(nd);
  std::vector<char> has_dirichlet(nd, 0);
  auto add = [&](Index r, Index c, double v) {
    if (v != 0.0) trip.emplace_back(static_cast<int>(r), static_cast<int>(c), v);
  };

  for (int di = 0; di < nd; ++di) {
    const DomainMesh& dm = mesh.domains[di];
    const DomainDofs& dd = dofs.domains[di];
    const bool flux = dd.flux_count > 0;
    if (dd.pressure_count > 0 && (flux || dm.dim == 0)) {
      for (Index e = 0; e < dm.num_elements(); ++e) {
        const Vector& l = sys.load[di][e];
        for (Index a = 0; a < l.size(); ++a) sys.rhs[dofs.pressure_dofs[di][e] + a] += l(a);
      }
    }
    if (!flux) continue;
    const ElementSpace& sp = dofs.space[di];
    const int d = dm.dim;
    for (Index e = 0; e < dm.num_elements(); ++e) {
      const LocalMatrices& lm = sys.local[di][e];
      const ElementGeometry& g = sys.geometry[di][e];
      std::vector<Index> ids = dofs.element_flux_dofs(mesh, di, e);
      const Index p0 = dofs.pressure_dofs[di][e];
      const Index n = static_cast<Index>(ids.size());
      for (Index i = 0; i < n; ++i)
        for (Index j = 0; j < n; ++j) add(ids[i], ids[j], lm.K(i, j));
      for (Index a = 0; a < lm.W.rows(); ++a)
        for (Index j = 0; j < n; ++j) {
          add(ids[j], p0 + a, -lm.W(a, j));
          add(p0 + a, ids[j], lm.W(a, j));
        }

      const int pf = lm.layout.per_facet;
      for (std::size_t i = 0; i < dm.element_facets[e].size(); ++i) {
        const Index fid = dm.element_facets[e][i];
        const Facet& fa = dm.facets[fid];
        const FacetGeometry& fg = g.facets[i];
        const Index base = dofs.facet_dofs[di][fid][dofs.facet_slot(mesh, di, fid, e)];
        const int sigma = dm.element_signs[e][i];
        if (fa.kind == FacetKind::Interior) continue;
        Matrix fm = fg.basis_at_points(d - 1, sp.k);
        Vector w = Eigen::Map<const Vector>(fg.rule.weights.data(), static_cast<Index>(fg.rule.size()));
        Matrix hinv = facet_mass_inverse(fm, fg.rule);
        if (fa.kind == FacetKind::Boundary) {
          if (!pb.boundary) throw ConfigError("no boundary rule for " + mesh.domain_name(di));
          BoundaryCondition bc = pb.boundary(mesh, di, fa, dm.to_global(fg.origin));
          if (bc.dirichlet) {
            has_dirichlet[di] = 1;
            Vector gq(fg.rule.size());
            for (std::size_t q = 0; q < fg.rule.size(); ++q) gq(q) = bc.value(dm.to_global(fg.rule.points[q]));
            Vector r = -sigma * fg.measure * hinv * (fm.transpose() * w.asDiagonal() * gq);
            for (int j = 0; j < pf; ++j) sys.rhs[base + j] += r(j);
          } else {
            for (int j = 0; j < pf; ++j) sys.neumann[base + j] = 1;
          }
          continue;
        }
        // interface facet
        const int lo = fa.lower_domain;
        if (lo < 0 || dofs.domains[lo].pressure_count == 0) continue;
        uf.unite(di, lo);
        const DomainMesh& ldm = mesh.domains[lo];
        const ElementGeometry& lg = sys.geometry[lo][fa.lower_element];
        Matrix mu;
        if (ldm.dim == 0) {
          mu = Matrix::Ones(fg.rule.size(), 1);
        } else {
          MonomialBasis lb(ldm.dim, dofs.space[lo].k_div, lg.centroid, lg.diameter);
          mu.resize(fg.rule.size(), lb.size());
          for (std::size_t q = 0; q < fg.rule.size(); ++q)
            mu.row(q) = lb.eval(ldm.to_local(dm.to_global(fg.rule.points[q]))).transpose();
        }
        Matrix c = sigma * fg.measure * hinv * (fm.transpose() * w.asDiagonal() * mu);
        const Index lp = dofs.pressure_dofs[lo][fa.lower_element];
        for (int j = 0; j < pf; ++j)
          for (Index s = 0; s < c.cols(); ++s) {
            add(base + j, lp + s, c(j, s));
            add(lp + s, base + j, -c(j, s));
          }
        const double ieta = pb.domains[lo].inverse_eta;
        if (opt.same_dim_coupling && ieta != 0.0) {
          Matrix cc = ieta * fg.measure * fg.measure * hinv;
          for (int j = 0; j < pf; ++j)
            for (int jj = 0; jj < pf; ++jj) add(base + j, base + jj, cc(j, jj));
        }
      }
    }
  }

  std::vector<Eigen::Triplet<double, int>> kept;
  kept.reserve(trip.size() + 16);
  for (const auto& t : trip)
    if (!sys.neumann[t.row()] && !sys.neumann[t.col()]) kept.push_back(t);
  for (Index i = 0; i < dofs.total; ++i)
    if (sys.neumann[i]) {
      kept.emplace_back(static_cast<int>(i), static_cast<int>(i), 1.0);
      sys.rhs[i] = 0.0;
    }
  sys.matrix.resize(dofs.total, dofs.total);
  sys.matrix.setFromTriplets(kept.begin(), kept.end());
  sys.matrix.makeCompressed();

  std::vector<char> root_dirichlet(nd, 0), root_active(nd, 0);
  for (int di = 0; di < nd; ++di) {
    if (dofs.domains[di].pressure_count == 0) continue;
    root_active[uf.find(di)] = 1;
    if (has_dirichlet[di]) root_dirichlet[uf.find(di)] = 1;
  }
  for (int di = 0; di < nd; ++di)
    if (root_active[di] && !root_dirichlet[di]) ++sys.floating_components;
  return sys;
}

void write_coo(std::ostream& out, const SparseMatrix& m) {
  out.precision(17);
  out << "% " << m.rows() << " " << m.cols() << " " << m.nonZeros() << "\n";
  for (int c = 0; c < m.outerSize(); ++c)
    for (SparseMatrix::InnerIterator it(m, c); it; ++it) out << it.row() << " " << it.col() << " " << it.value() << "\n";
}

}  // namespace mvem
