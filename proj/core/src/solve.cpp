#include "mvem/solve.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <ostream>
#include <set>

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/SparseLU>

namespace mvem {

namespace {

double rel_residual(const SparseMatrix& a, const Vector& x, const Vector& b) {
  double nb = b.norm();
  double r = (b - a * x).norm();
  return nb > 0.0 ? r / nb : r;
}

MonomialBasis pressure_basis(const GlobalSystem& sys, const MixedMesh& mesh, int di, Index e) {
  const auto& g = sys.geometry[di][e];
  const int d = mesh.domains[di].dim;
  return MonomialBasis(d, sys.dofs.space[di].k_div, g.centroid, g.diameter);
}

}  // namespace

DiscreteSolution solve(const GlobalSystem& sys, const SolveOptions& opt) {
  if (sys.floating_components > 0)
    throw SingularSystemError("pressure is not fixed: " + std::to_string(sys.floating_components) +
                                  " coupled group(s) of domains without Dirichlet data",
                              sys.floating_components);
  DiscreteSolution s;
  const Index n = sys.matrix.rows();
  s.x = Vector::Zero(n);
  if (n == 0) return s;
  const Vector& b = sys.rhs;
  if (n <= opt.direct_limit) {
    Eigen::SparseLU<SparseMatrix, Eigen::COLAMDOrdering<int>> lu;
    lu.analyzePattern(sys.matrix);
    lu.factorize(sys.matrix);
    if (lu.info() != Eigen::Success) throw SingularSystemError("sparse LU failed: " + lu.lastErrorMessage(), 1);
    s.x = lu.solve(b);
    s.method = "sparse-lu";
    s.residual = rel_residual(sys.matrix, s.x, b);
    for (int it = 0; it < 3 && s.residual > opt.tolerance; ++it) {
      s.x += lu.solve(Vector(b - sys.matrix * s.x));
      s.residual = rel_residual(sys.matrix, s.x, b);
    }
  } else {
    Eigen::BiCGSTAB<SparseMatrix, Eigen::IncompleteLUT<double>> it;
    it.setTolerance(opt.tolerance);
    it.setMaxIterations(opt.max_iterations);
    it.compute(sys.matrix);
    if (it.info() != Eigen::Success) throw SolverError("incomplete LU breakdown");
    s.x = it.solve(b);
    s.method = "bicgstab-ilut";
    s.residual = rel_residual(sys.matrix, s.x, b);
    if (it.info() != Eigen::Success) throw SolverError("BiCGSTAB did not converge");
  }
  if (!std::isfinite(s.residual) || s.residual > 1e-6)
    throw SingularSystemError("solution residual " + std::to_string(s.residual) + " indicates a singular system", 1);
  if (s.residual > opt.tolerance)
    throw SolverError("relative residual " + std::to_string(s.residual) + " above tolerance");
  return s;
}

void project_solution(const MixedMesh& mesh, const GlobalSystem& sys, DiscreteSolution& s) {
  const int nd = static_cast<int>(mesh.domains.size());
  s.velocity.assign(nd, {});
  s.pressure.assign(nd, {});
  s.divergence.assign(nd, {});
  for (int di = 0; di < nd; ++di) {
    const auto& dm = mesh.domains[di];
    const auto& dd = sys.dofs.domains[di];
    const Index ne = dm.num_elements();
    s.velocity[di].resize(ne);
    s.pressure[di].resize(ne);
    s.divergence[di].resize(ne);
    for (Index e = 0; e < ne; ++e) {
      if (dd.pressure_count > 0) {
        const int np = dm.dim == 0 ? 1 : dim_poly(dm.dim, sys.dofs.space[di].k_div);
        s.pressure[di][e] = s.x.segment(sys.dofs.pressure_dofs[di][e], np);
      }
      if (dd.flux_count == 0) continue;
      auto ids = sys.dofs.element_flux_dofs(mesh, di, e);
      Vector u(ids.size());
      for (std::size_t i = 0; i < ids.size(); ++i) u(i) = s.x(ids[i]);
      const auto& lm = sys.local[di][e];
      s.velocity[di][e] = lm.velocity_map * u;
      s.divergence[di][e] = lm.V * u;
    }
  }
}

Vec3 velocity_at(const MixedMesh& mesh, const GlobalSystem& sys, const DiscreteSolution& s, int di, Index e,
                 const Vec3& x) {
  const auto& dm = mesh.domains[di];
  if (dm.dim == 0 || s.velocity[di][e].size() == 0) return Vec3::Zero();
  Vec3 u = eval_velocity(sys.local[di][e], dm.dim, s.velocity[di][e], dm.to_local(x));
  return dm.vector_to_global(u);
}

double pressure_at(const MixedMesh& mesh, const GlobalSystem& sys, const DiscreteSolution& s, int di, Index e,
                   const Vec3& x) {
  const auto& dm = mesh.domains[di];
  const Vector& c = s.pressure[di][e];
  if (c.size() == 0) return 0.0;
  if (dm.dim == 0) return c(0);
  return pressure_basis(sys, mesh, di, e).eval(dm.to_local(x)).dot(c);
}

std::vector<DomainErrors> error_norms(const MixedMesh& mesh, const GlobalSystem& sys, const DiscreteSolution& s,
                                      const std::vector<ExactField>& exact) {
  std::vector<DomainErrors> out;
  const int nd = static_cast<int>(mesh.domains.size());
  if (static_cast<int>(exact.size()) != nd) throw ConfigError("exact solution must cover every domain");
  for (int di = 0; di < nd; ++di) {
    const auto& dm = mesh.domains[di];
    const auto& ex = exact[di];
    DomainErrors r;
    r.domain = di;
    r.dim = dm.dim;
    r.index = dm.index;
    if (sys.dofs.domains[di].pressure_count == 0) continue;
    for (Index e = 0; e < dm.num_elements(); ++e) {
      if (dm.dim == 0) {
        Vec3 x = mesh.vertex(dm.element_vertices[e][0]);
        double p = ex.pressure ? ex.pressure(x) : 0.0;
        r.e_p += std::pow(p - s.pressure[di][e](0), 2);
        r.n_p += p * p;
        continue;
      }
      const auto& g = sys.geometry[di][e];
      MonomialBasis pb = pressure_basis(sys, mesh, di, e);
      const bool flux = s.velocity[di][e].size() > 0;
      for (std::size_t q = 0; q < g.rule.size(); ++q) {
        const Vec3& y = g.rule.points[q];
        const Vec3 x = dm.to_global(y);
        const double w = g.rule.weights[q];
        Vector m = pb.eval(y);
        double p = ex.pressure ? ex.pressure(x) : 0.0;
        r.e_p += w * std::pow(p - m.dot(s.pressure[di][e]), 2);
        r.n_p += w * p * p;
        if (!flux) continue;
        Vec3 ue = ex.velocity ? dm.vector_to_local(ex.velocity(x)) : Vec3::Zero();
        Vec3 uh = eval_velocity(sys.local[di][e], dm.dim, s.velocity[di][e], y);
        r.e_u += w * (ue - uh).head(dm.dim).squaredNorm();
        r.n_u += w * ue.head(dm.dim).squaredNorm();
        double de = ex.divergence ? ex.divergence(x) : 0.0;
        r.e_div += w * std::pow(de - m.dot(s.divergence[di][e]), 2);
        r.n_div += w * de * de;
      }
    }
    for (double* v : {&r.e_p, &r.e_u, &r.e_div, &r.n_p, &r.n_u, &r.n_div}) *v = std::sqrt(*v);
    out.push_back(r);
  }
  return out;
}

void write_error_table(std::ostream& out, const MixedMesh& mesh, const std::vector<DomainErrors>& errors) {
  out.precision(6);
  out << std::scientific;
  out << "domain,d,l,e_p,e_u,e_div\n";
  for (const auto& r : errors)
    out << mesh.domain_name(r.domain) << "," << r.dim << "," << r.index + 1 << "," << r.e_p << "," << r.e_u << ","
        << r.e_div << "\n";
  out << std::defaultfloat;
}

double FluxReport::between(const std::string& a, const std::string& b) const {
  for (const auto& e : edges) {
    if (e.source == a && e.target == b) return e.value;
    if (e.source == b && e.target == a) return -e.value;
  }
  return 0.0;
}

FluxReport flux_report(const MixedMesh& mesh, const GlobalSystem& sys, const DiscreteSolution& s) {
  const int nd = static_cast<int>(mesh.domains.size());
  FluxReport rep;
  rep.boundary_in.assign(nd, 0.0);
  rep.boundary_out.assign(nd, 0.0);
  rep.source.assign(nd, 0.0);
  rep.node_mismatch.assign(nd, 0.0);
  std::map<std::pair<int, int>, double> exchange;
  std::vector<std::vector<double>> out_e(nd), in_e(nd), src_e(nd);
  for (int di = 0; di < nd; ++di) {
    const Index ne = mesh.domains[di].num_elements();
    out_e[di].assign(ne, 0.0);
    in_e[di].assign(ne, 0.0);
    src_e[di].assign(ne, 0.0);
  }
  double scale = 0.0, pressure_scale = 0.0;
  for (int di = 0; di < nd; ++di) {
    const auto& dm = mesh.domains[di];
    const auto& dd = sys.dofs.domains[di];
    const bool balanced = dd.flux_count > 0 || dm.dim == 0;
    if (dd.pressure_count > 0 && balanced)
      for (Index e = 0; e < dm.num_elements(); ++e) {
        src_e[di][e] = sys.load[di][e](0);
        rep.source[di] += src_e[di][e];
        scale = std::max(scale, std::abs(src_e[di][e]));
      }
    if (dd.flux_count == 0) continue;
    for (Index e = 0; e < dm.num_elements(); ++e) {
      const auto& g = sys.geometry[di][e];
      // flux a pressure of this size would drive across the element; keeps the relative measure
      // meaningful when the discrete flow vanishes
      if (dd.pressure_count > 0)
        pressure_scale = std::max(pressure_scale, std::abs(s.x(sys.dofs.pressure_dofs[di][e])) * g.measure / g.diameter);
      for (std::size_t i = 0; i < dm.element_facets[e].size(); ++i) {
        const Index fid = dm.element_facets[e][i];
        const Facet& fa = dm.facets[fid];
        const Index base = sys.dofs.facet_dofs[di][fid][sys.dofs.facet_slot(mesh, di, fid, e)];
        const double flux = dm.element_signs[e][i] * g.facets[i].measure * s.x(base);
        out_e[di][e] += flux;
        scale = std::max(scale, std::abs(flux));
        if (fa.kind == FacetKind::Boundary) {
          (flux < 0 ? rep.boundary_in[di] : rep.boundary_out[di]) += std::abs(flux);
        } else if (fa.kind == FacetKind::Interface && fa.lower_domain >= 0 &&
                   sys.dofs.domains[fa.lower_domain].pressure_count > 0) {
          exchange[{di, fa.lower_domain}] += flux;
          in_e[fa.lower_domain][fa.lower_element] += flux;
        }
      }
    }
  }
  scale = std::max(scale, pressure_scale);
  if (scale == 0.0) scale = 1.0;
  for (int di = 0; di < nd; ++di)
    for (std::size_t e = 0; e < out_e[di].size(); ++e) {
      const auto& dd = sys.dofs.domains[di];
      if (dd.pressure_count == 0) continue;
      double m = std::abs(out_e[di][e] - src_e[di][e] - in_e[di][e]) / scale;
      rep.max_element_mismatch = std::max(rep.max_element_mismatch, m);
    }
  for (int di = 0; di < nd; ++di) {
    if (sys.dofs.domains[di].pressure_count == 0) continue;
    double out = rep.boundary_out[di] - rep.boundary_in[di];
    double in = rep.source[di];
    double mag = std::max({std::abs(rep.boundary_out[di]), std::abs(rep.boundary_in[di]), std::abs(in)});
    for (const auto& [key, v] : exchange) {
      if (key.first == di) out += v;
      if (key.second == di) in += v;
      if (key.first == di || key.second == di) mag = std::max(mag, std::abs(v));
    }
    mag = std::max(mag, pressure_scale);
    rep.node_mismatch[di] = mag > 0.0 ? std::abs(out - in) / mag : 0.0;
    rep.max_node_mismatch = std::max(rep.max_node_mismatch, rep.node_mismatch[di]);
  }
  const double tiny = 1e-14 * scale;
  for (int di = 0; di < nd; ++di) {
    if (sys.dofs.domains[di].pressure_count == 0) continue;
    const std::string name = mesh.domain_name(di);
    if (rep.boundary_in[di] > tiny) rep.edges.push_back({"BC", name, rep.boundary_in[di]});
    if (rep.boundary_out[di] > tiny) rep.edges.push_back({name, "BC", rep.boundary_out[di]});
    if (rep.source[di] < -tiny) rep.edges.push_back({name, "source", -rep.source[di]});
    if (rep.source[di] > tiny) rep.edges.push_back({"source", name, rep.source[di]});
    rep.total_inflow += rep.boundary_in[di];
  }
  for (const auto& [key, v] : exchange) {
    const std::string a = mesh.domain_name(key.first), b = mesh.domain_name(key.second);
    if (v >= 0)
      rep.edges.push_back({a, b, v});
    else
      rep.edges.push_back({b, a, -v});
  }
  return rep;
}

void write_flux_report(std::ostream& out, const FluxReport& rep) {
  out.precision(12);
  out << "# source target value\n";
  for (const auto& e : rep.edges) out << e.source << " " << e.target << " " << e.value << "\n";
  out << "# max node mismatch " << rep.max_node_mismatch << "\n";
  out << "# max element mismatch " << rep.max_element_mismatch << "\n";
}

double interface_pressure_jump(const MixedMesh& mesh, const GlobalSystem& sys, const DiscreteSolution& s, int lower) {
  double num = 0.0, den = 0.0;
  for (int di = 0; di < static_cast<int>(mesh.domains.size()); ++di) {
    const auto& dm = mesh.domains[di];
    if (s.pressure[di].empty() || sys.dofs.domains[di].pressure_count == 0) continue;
    for (Index e = 0; e < dm.num_elements(); ++e) {
      const auto& g = sys.geometry[di][e];
      for (std::size_t i = 0; i < dm.element_facets[e].size(); ++i) {
        const Facet& fa = dm.facets[dm.element_facets[e][i]];
        if (fa.kind != FacetKind::Interface || fa.lower_domain != lower) continue;
        const auto& fg = g.facets[i];
        for (std::size_t q = 0; q < fg.rule.size(); ++q) {
          Vec3 x = dm.to_global(fg.rule.points[q]);
          double jump = pressure_at(mesh, sys, s, di, e, x) - pressure_at(mesh, sys, s, lower, fa.lower_element, x);
          num += fg.rule.weights[q] * std::abs(jump);
          den += fg.rule.weights[q];
        }
      }
    }
  }
  return den > 0.0 ? num / den : 0.0;
}

void write_vtu(std::ostream& out, const MixedMesh& mesh, const GlobalSystem& sys, const DiscreteSolution& s) {
  const auto& V = *mesh.vertices;
  std::vector<std::vector<Index>> conn;
  std::vector<int> types, dims, doms;
  std::vector<std::vector<Index>> faces;  // face stream per cell, empty for non-polyhedra
  std::vector<double> pres;
  std::vector<Vec3> vel;
  for (int di = 0; di < static_cast<int>(mesh.domains.size()); ++di) {
    const auto& dm = mesh.domains[di];
    if (sys.dofs.domains[di].pressure_count == 0) continue;
    for (Index e = 0; e < dm.num_elements(); ++e) {
      std::vector<Index> c, fs;
      if (dm.dim == 3) {
        std::set<Index> vs;
        fs.push_back(static_cast<Index>(dm.element_facets[e].size()));
        for (std::size_t i = 0; i < dm.element_facets[e].size(); ++i) {
          auto loop = dm.facets[dm.element_facets[e][i]].vertices;
          if (dm.element_signs[e][i] < 0) std::reverse(loop.begin(), loop.end());
          fs.push_back(static_cast<Index>(loop.size()));
          for (Index v : loop) {
            fs.push_back(v);
            vs.insert(v);
          }
        }
        c.assign(vs.begin(), vs.end());
        types.push_back(42);
      } else {
        c = dm.element_vertices[e];
        types.push_back(dm.dim == 2 ? 7 : dm.dim == 1 ? 3 : 1);
      }
      Vec3 x = dm.to_global(sys.geometry[di][e].centroid);
      if (dm.dim == 0) x = V[c[0]];
      conn.push_back(c);
      faces.push_back(fs);
      dims.push_back(dm.dim);
      doms.push_back(di);
      pres.push_back(pressure_at(mesh, sys, s, di, e, x));
      vel.push_back(velocity_at(mesh, sys, s, di, e, x));
    }
  }
  out.precision(12);
  out << "<?xml version=\"1.0\"?>\n<VTKFile type=\"UnstructuredGrid\" version=\"1.0\" byte_order=\"LittleEndian\">\n"
      << "<UnstructuredGrid>\n<Piece NumberOfPoints=\"" << V.size() << "\" NumberOfCells=\"" << conn.size() << "\">\n";
  out << "<Points>\n<DataArray type=\"Float64\" NumberOfComponents=\"3\" format=\"ascii\">\n";
  for (const auto& p : V) out << p(0) << " " << p(1) << " " << p(2) << "\n";
  out << "</DataArray>\n</Points>\n<Cells>\n<DataArray type=\"Int64\" Name=\"connectivity\" format=\"ascii\">\n";
  for (const auto& c : conn) {
    for (Index v : c) out << v << " ";
    out << "\n";
  }
  out << "</DataArray>\n<DataArray type=\"Int64\" Name=\"offsets\" format=\"ascii\">\n";
  Index off = 0;
  for (const auto& c : conn) out << (off += static_cast<Index>(c.size())) << " ";
  out << "\n</DataArray>\n<DataArray type=\"UInt8\" Name=\"types\" format=\"ascii\">\n";
  for (int t : types) out << t << " ";
  out << "\n</DataArray>\n<DataArray type=\"Int64\" Name=\"faces\" format=\"ascii\">\n";
  for (const auto& f : faces)
    for (Index v : f) out << v << " ";
  out << "\n</DataArray>\n<DataArray type=\"Int64\" Name=\"faceoffsets\" format=\"ascii\">\n";
  off = 0;
  for (const auto& f : faces) {
    if (f.empty()) {
      out << -1 << " ";
    } else {
      off += static_cast<Index>(f.size());
      out << off << " ";
    }
  }
  out << "\n</DataArray>\n</Cells>\n<CellData Scalars=\"pressure\" Vectors=\"velocity\">\n";
  out << "<DataArray type=\"Float64\" Name=\"pressure\" format=\"ascii\">\n";
  for (double p : pres) out << p << " ";
  out << "\n</DataArray>\n<DataArray type=\"Float64\" Name=\"velocity\" NumberOfComponents=\"3\" format=\"ascii\">\n";
  for (const auto& u : vel) out << u(0) << " " << u(1) << " " << u(2) << "\n";
  out << "</DataArray>\n<DataArray type=\"Int32\" Name=\"dim\" format=\"ascii\">\n";
  for (int d : dims) out << d << " ";
  out << "\n</DataArray>\n<DataArray type=\"Int32\" Name=\"domain\" format=\"ascii\">\n";
  for (int d : doms) out << d << " ";
  out << "\n</DataArray>\n</CellData>\n</Piece>\n</UnstructuredGrid>\n</VTKFile>\n";
}

}  // namespace mvem
