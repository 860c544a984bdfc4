#include "mvem/mixed_mesh.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <unordered_map>
#include <unordered_set>

namespace mvem {

Vec3 DomainMesh::to_local(const Vec3& x) const {
  switch (dim) {
    case 3: return x;
    case 2: {
      auto y = frame.to_local(x);
      return {y(0), y(1), 0.0};
    }
    case 1: return {tangent.dot(x - frame.origin), 0.0, 0.0};
    default: return Vec3::Zero();
  }
}

Vec3 DomainMesh::to_global(const Vec3& y) const {
  switch (dim) {
    case 3: return y;
    case 2: return frame.to_global(Eigen::Vector2d(y(0), y(1)));
    case 1: return frame.origin + y(0) * tangent;
    default: return frame.origin;
  }
}

Vec3 DomainMesh::vector_to_local(const Vec3& v) const {
  switch (dim) {
    case 3: return v;
    case 2: return {v.dot(frame.e1), v.dot(frame.e2), 0.0};
    case 1: return {v.dot(tangent), 0.0, 0.0};
    default: return Vec3::Zero();
  }
}

Vec3 DomainMesh::vector_to_global(const Vec3& v) const {
  switch (dim) {
    case 3: return v;
    case 2: return v(0) * frame.e1 + v(1) * frame.e2;
    case 1: return v(0) * tangent;
    default: return Vec3::Zero();
  }
}

std::string MixedMesh::domain_name(int domain) const {
  const auto& d = domains[domain];
  switch (d.dim) {
    case 3: return "3D";
    case 2: return "F" + std::to_string(d.index + 1);
    case 1: return "T" + std::to_string(d.index + 1);
    default: return "I" + std::to_string(d.index + 1);
  }
}

namespace {

std::uint64_t edge_key(Index a, Index b) {
  if (a > b) std::swap(a, b);
  return (static_cast<std::uint64_t>(a) << 32) | static_cast<std::uint64_t>(b);
}

double point_segment_distance(const Vec3& p, const Vec3& a, const Vec3& b) {
  Vec3 d = b - a;
  double t = std::clamp((p - a).dot(d) / d.squaredNorm(), 0.0, 1.0);
  return (a + t * d - p).norm();
}

void assign_sides(Facet& f) {
  for (auto& o : f.owners) {
    Vec3 c = o.sign * f.normal;
    o.side = lexicographically_greater(c, Vec3(-c)) ? +1 : -1;
  }
}

}  // namespace

MixedMesh build_mixed_mesh(const CutResult& cut, const std::vector<FracturePolygon>& fractures) {
  MixedMesh mm;
  mm.vertices = std::make_shared<const std::vector<Vec3>>(cut.mesh.vertices);
  mm.fractures = fractures;
  mm.traces = cut.traces;
  mm.points = cut.points;
  mm.volume_mesh = cut.mesh;
  mm.face_fracture = cut.face_fracture;
  mm.eps = cut.eps;
  const auto& V = *mm.vertices;
  const double tol = 10.0 * cut.eps;
  const int nF = static_cast<int>(fractures.size());
  const int nT = static_cast<int>(cut.traces.size());
  const int nP = static_cast<int>(cut.points.size());

  mm.matrix_domain = 0;
  for (int i = 0; i < nF; ++i) mm.fracture_domain.push_back(1 + i);
  for (int i = 0; i < nT; ++i) mm.trace_domain.push_back(1 + nF + i);
  for (int i = 0; i < nP; ++i) mm.point_domain.push_back(1 + nF + nT + i);
  mm.domains.resize(1 + nF + nT + nP);

  const PolyMesh& pm = cut.mesh;
  auto owners = pm.face_owners();
  std::unordered_set<std::uint64_t> boundary_edges;
  std::unordered_set<Index> boundary_vertices;
  for (Index f = 0; f < static_cast<Index>(pm.faces.size()); ++f) {
    if (owners[f].size() != 1) continue;
    const auto& loop = pm.faces[f];
    for (std::size_t i = 0; i < loop.size(); ++i) {
      boundary_edges.insert(edge_key(loop[i], loop[(i + 1) % loop.size()]));
      boundary_vertices.insert(loop[i]);
    }
  }

  // fracture cell numbering
  std::vector<Index> fcell(pm.faces.size(), -1);
  std::vector<std::vector<Index>> fcells(nF);
  for (Index f = 0; f < static_cast<Index>(pm.faces.size()); ++f) {
    int l = cut.face_fracture[f];
    if (l < 0) continue;
    if (l >= nF) throw ConformityError("face marked with unknown fracture");
    fcell[f] = static_cast<Index>(fcells[l].size());
    fcells[l].push_back(f);
  }

  // matrix
  {
    DomainMesh& d3 = mm.domains[0];
    d3.dim = 3;
    d3.index = 0;
    d3.facets.resize(pm.faces.size());
    for (Index f = 0; f < static_cast<Index>(pm.faces.size()); ++f) {
      Facet& fa = d3.facets[f];
      fa.vertices = pm.faces[f];
      fa.normal = polygon_normal(pm.face_points(f));
    }
    for (Index c = 0; c < static_cast<Index>(pm.cells.size()); ++c) {
      std::vector<Index> fs;
      std::vector<int> sg;
      for (const auto& sf : pm.cells[c]) {
        fs.push_back(sf.face);
        sg.push_back(sf.sign);
        d3.facets[sf.face].owners.push_back({c, sf.sign, 0});
      }
      d3.element_facets.push_back(fs);
      d3.element_signs.push_back(sg);
    }
    for (Index f = 0; f < static_cast<Index>(pm.faces.size()); ++f) {
      Facet& fa = d3.facets[f];
      int l = cut.face_fracture[f];
      if (l >= 0) {
        if (fa.owners.size() != 2)
          throw ConformityError("fracture face " + std::to_string(f) + " does not have two owner cells");
        fa.kind = FacetKind::Interface;
        fa.lower_domain = mm.fracture_domain[l];
        fa.lower_element = fcell[f];
        assign_sides(fa);
      } else if (fa.owners.size() == 2) {
        fa.kind = FacetKind::Interior;
      } else {
        fa.kind = FacetKind::Boundary;
        fa.on_outer_boundary = true;
      }
    }
  }

  // fractures
  std::vector<std::unordered_map<std::uint64_t, Index>> fedge(nF);
  for (int l = 0; l < nF; ++l) {
    DomainMesh& d2 = mm.domains[mm.fracture_domain[l]];
    d2.dim = 2;
    d2.index = l;
    Plane pl = fractures[l].plane();
    const Vec3 N = pl.normal;
    d2.frame = Frame::from_normal(polygon_centroid(fractures[l].vertices), N);
    auto& emap = fedge[l];
    for (Index f : fcells[l]) {
      std::vector<Index> loop = pm.faces[f];
      if (polygon_normal(pm.face_points(f)).dot(N) < 0) std::reverse(loop.begin(), loop.end());
      std::vector<Index> fs;
      std::vector<int> sg;
      const Index e = d2.num_elements();
      for (std::size_t i = 0; i < loop.size(); ++i) {
        Index p = loop[i], q = loop[(i + 1) % loop.size()];
        auto key = edge_key(p, q);
        auto it = emap.find(key);
        Index id;
        if (it == emap.end()) {
          id = static_cast<Index>(d2.facets.size());
          Facet fa;
          Index a = std::min(p, q), b = std::max(p, q);
          fa.vertices = {a, b};
          fa.normal = (V[b] - V[a]).normalized().cross(N);
          fa.on_outer_boundary = boundary_edges.count(key) > 0;
          d2.facets.push_back(fa);
          emap.emplace(key, id);
        } else {
          id = it->second;
        }
        int s = (p < q) ? 1 : -1;
        d2.facets[id].owners.push_back({e, s, 0});
        fs.push_back(id);
        sg.push_back(s);
      }
      d2.element_facets.push_back(fs);
      d2.element_signs.push_back(sg);
      d2.element_vertices.push_back(loop);
    }
    for (auto& fa : d2.facets) {
      if (fa.owners.size() > 2) throw ConformityError("fracture edge with more than two cells");
      fa.kind = fa.owners.size() == 2 ? FacetKind::Interior : FacetKind::Boundary;
      for (int t = 0; t < nT; ++t) {
        const auto& tr = cut.traces[t];
        if (tr.fracture_a != l && tr.fracture_b != l) continue;
        if (point_segment_distance(V[fa.vertices[0]], tr.start, tr.end) <= tol &&
            point_segment_distance(V[fa.vertices[1]], tr.start, tr.end) <= tol) {
          fa.kind = FacetKind::Interface;
          fa.lower_domain = mm.trace_domain[t];
          fa.on_outer_boundary = false;
          assign_sides(fa);
          break;
        }
      }
    }
  }

  // traces
  for (int t = 0; t < nT; ++t) {
    const auto& tr = cut.traces[t];
    DomainMesh& d1 = mm.domains[mm.trace_domain[t]];
    d1.dim = 1;
    d1.index = t;
    d1.tangent = tr.tangent();
    d1.frame.origin = tr.start;
    std::map<Index, double> verts;
    for (int l : {tr.fracture_a, tr.fracture_b}) {
      for (const auto& fa : mm.domains[mm.fracture_domain[l]].facets) {
        if (fa.kind != FacetKind::Interface || fa.lower_domain != mm.trace_domain[t]) continue;
        for (Index v : fa.vertices) verts[v] = d1.tangent.dot(V[v] - tr.start);
      }
    }
    std::vector<std::pair<double, Index>> sorted;
    for (const auto& [v, s] : verts) sorted.emplace_back(s, v);
    std::sort(sorted.begin(), sorted.end());
    if (sorted.size() < 2) throw ConformityError("trace " + std::to_string(t + 1) + " has no mesh edges");
    std::unordered_map<std::uint64_t, Index> tel;
    for (std::size_t i = 0; i + 1 < sorted.size(); ++i) {
      Index a = sorted[i].second, b = sorted[i + 1].second;
      tel.emplace(edge_key(a, b), static_cast<Index>(i));
      d1.element_vertices.push_back({a, b});
    }
    for (int l : {tr.fracture_a, tr.fracture_b}) {
      for (auto& fa : mm.domains[mm.fracture_domain[l]].facets) {
        if (fa.kind != FacetKind::Interface || fa.lower_domain != mm.trace_domain[t]) continue;
        auto it = tel.find(edge_key(fa.vertices[0], fa.vertices[1]));
        if (it == tel.end())
          throw ConformityError("fracture edge on trace " + std::to_string(t + 1) + " does not match a trace cell");
        fa.lower_element = it->second;
      }
    }
    const Index ne = static_cast<Index>(sorted.size()) - 1;
    d1.element_facets.resize(ne);
    d1.element_signs.resize(ne);
    for (std::size_t i = 0; i < sorted.size(); ++i) {
      Facet fa;
      Index v = sorted[i].second;
      fa.vertices = {v};
      fa.normal = d1.tangent;
      const Index id = static_cast<Index>(i);
      if (i > 0) {
        fa.owners.push_back({id - 1, +1, 0});
        d1.element_facets[id - 1].push_back(id);
        d1.element_signs[id - 1].push_back(+1);
      }
      if (i + 1 < sorted.size()) {
        fa.owners.push_back({id, -1, 0});
        d1.element_facets[id].insert(d1.element_facets[id].begin(), id);
        d1.element_signs[id].insert(d1.element_signs[id].begin(), -1);
      }
      fa.kind = fa.owners.size() == 2 ? FacetKind::Interior : FacetKind::Boundary;
      fa.on_outer_boundary = fa.kind == FacetKind::Boundary && boundary_vertices.count(v) > 0;
      for (int p = 0; p < nP; ++p) {
        const auto& pt = cut.points[p];
        if (std::find(pt.traces.begin(), pt.traces.end(), t) == pt.traces.end()) continue;
        if ((V[v] - pt.x).norm() <= tol) {
          fa.kind = FacetKind::Interface;
          fa.lower_domain = mm.point_domain[p];
          fa.lower_element = 0;
          fa.on_outer_boundary = false;
          assign_sides(fa);
        }
      }
      d1.facets.push_back(fa);
    }
  }

  // points
  for (int p = 0; p < nP; ++p) {
    DomainMesh& d0 = mm.domains[mm.point_domain[p]];
    d0.dim = 0;
    d0.index = p;
    d0.frame.origin = cut.points[p].x;
    d0.element_facets.push_back({});
    d0.element_signs.push_back({});
    Index vid = -1;
    for (int t : cut.points[p].traces)
      for (const auto& fa : mm.domains[mm.trace_domain[t]].facets)
        if (fa.kind == FacetKind::Interface && fa.lower_domain == mm.point_domain[p]) vid = fa.vertices[0];
    if (vid < 0) throw ConformityError("trace intersection " + std::to_string(p + 1) + " is not a trace vertex");
    d0.element_vertices.push_back({vid});
  }

  mm.graph = build_domain_graph(mm);
  return mm;
}

MixedMesh restrict_dimensions(const MixedMesh& mesh, int max_dim) {
  MixedMesh r = mesh;
  std::vector<int> remap(mesh.domains.size(), -1);
  r.domains.clear();
  for (std::size_t i = 0; i < mesh.domains.size(); ++i) {
    if (mesh.domains[i].dim > max_dim) continue;
    remap[i] = static_cast<int>(r.domains.size());
    r.domains.push_back(mesh.domains[i]);
  }
  for (auto& d : r.domains)
    for (auto& f : d.facets)
      if (f.lower_domain >= 0) f.lower_domain = remap[f.lower_domain];
  auto fix = [&](std::vector<int>& v) {
    std::vector<int> out;
    for (int i : v)
      if (remap[i] >= 0) out.push_back(remap[i]);
    v = out;
  };
  r.matrix_domain = mesh.matrix_domain >= 0 ? remap[mesh.matrix_domain] : -1;
  fix(r.fracture_domain);
  fix(r.trace_domain);
  fix(r.point_domain);
  r.graph = build_domain_graph(r);
  return r;
}

DomainGraph build_domain_graph(const MixedMesh& mesh) {
  DomainGraph g;
  const int n = static_cast<int>(mesh.domains.size());
  g.up.resize(n);
  g.down.resize(n);
  std::map<std::pair<int, int>, InterfaceRecord> recs;
  for (int d = 0; d < n; ++d) {
    for (const auto& f : mesh.domains[d].facets) {
      if (f.kind != FacetKind::Interface) continue;
      auto& r = recs[{d, f.lower_domain}];
      r.higher_domain = d;
      r.lower_domain = f.lower_domain;
      r.num_entities += 1;
      for (const auto& o : f.owners) (o.side > 0 ? r.num_plus : r.num_minus) += 1;
    }
  }
  for (const auto& [key, r] : recs) {
    g.down[key.first].push_back(key.second);
    g.up[key.second].push_back(key.first);
    g.interfaces.push_back(r);
  }
  for (auto& v : g.up) std::sort(v.begin(), v.end());
  for (auto& v : g.down) std::sort(v.begin(), v.end());
  return g;
}

std::vector<Violation> validate_conformity(const MixedMesh& mm) {
  std::vector<Violation> out;
  const double eps = mm.eps;
  if (mm.matrix_domain >= 0) {
    auto v = validate_polymesh(mm.volume_mesh, 2.0 * eps);
    out.insert(out.end(), v.begin(), v.end());
    const auto& d3 = mm.domains[mm.matrix_domain];
    for (Index f = 0; f < static_cast<Index>(d3.facets.size()); ++f) {
      const auto& fa = d3.facets[f];
      if (fa.kind != FacetKind::Interface) continue;
      if (fa.owners.size() != 2 || fa.owners[0].sign * fa.owners[1].sign != -1)
        out.push_back({"interface-sides", f, "fracture face without two opposite owners"});
    }
    // every fracture cell must be a face of the matrix mesh
    for (int fd : mm.fracture_domain) {
      Index expected = mm.domains[fd].num_elements();
      Index seen = 0;
      for (const auto& fa : d3.facets)
        if (fa.kind == FacetKind::Interface && fa.lower_domain == fd) ++seen;
      if (seen != expected) out.push_back({"fracture-coverage", fd, "fracture cells without matrix faces"});
    }
  }
  const auto& V = *mm.vertices;
  for (int fd : mm.fracture_domain) {
    const auto& d2 = mm.domains[fd];
    double a = 0.0;
    for (const auto& loop : d2.element_vertices) {
      std::vector<Vec3> p;
      for (Index v : loop) p.push_back(V[v]);
      a += polygon_area(p);
    }
    double ref = mm.fractures[d2.index].area();
    if (std::abs(a - ref) > 1e-10 * ref)
      out.push_back({"fracture-area", d2.index, "cell area " + std::to_string(a) + " vs " + std::to_string(ref)});
  }
  for (int td : mm.trace_domain) {
    const auto& d1 = mm.domains[td];
    const auto& tr = mm.traces[d1.index];
    double len = 0.0;
    for (const auto& e : d1.element_vertices) len += (V[e[1]] - V[e[0]]).norm();
    if (std::abs(len - tr.length()) > 1e-10 * tr.length() + 20 * eps)
      out.push_back({"trace-length", d1.index, "cell length " + std::to_string(len)});
    for (int l : {tr.fracture_a, tr.fracture_b}) {
      auto it = std::find_if(mm.fracture_domain.begin(), mm.fracture_domain.end(),
                             [&](int fd) { return mm.domains[fd].index == l; });
      if (it == mm.fracture_domain.end()) continue;
      std::vector<int> hit(d1.num_elements(), 0);
      for (const auto& fa : mm.domains[*it].facets)
        if (fa.kind == FacetKind::Interface && fa.lower_domain == td) hit[fa.lower_element] = 1;
      for (Index e = 0; e < d1.num_elements(); ++e)
        if (!hit[e]) out.push_back({"trace-coverage", d1.index, "trace cell missing in fracture " + std::to_string(l + 1)});
    }
  }
  for (int pd : mm.point_domain) {
    const auto& pt = mm.points[mm.domains[pd].index];
    for (int t : pt.traces) {
      auto it = std::find_if(mm.trace_domain.begin(), mm.trace_domain.end(),
                             [&](int td) { return mm.domains[td].index == t; });
      if (it == mm.trace_domain.end()) continue;
      bool found = false;
      for (const auto& fa : mm.domains[*it].facets)
        if (fa.kind == FacetKind::Interface && fa.lower_domain == pd) found = true;
      if (!found) out.push_back({"point-coverage", mm.domains[pd].index, "intersection not on trace mesh"});
    }
  }
  return out;
}

}  // namespace mvem
