#include "mvem/cutting.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <sstream>
#include <unordered_map>

namespace mvem {

Plane FracturePolygon::plane() const {
  if (vertices.size() < 3) throw GeometryError("fracture polygon with fewer than 3 vertices");
  Vec3 n = lexicographic_positive(polygon_normal(vertices));
  return Plane::through(polygon_centroid(vertices), n);
}

namespace {

using Pt2 = Eigen::Vector2d;
using Poly2 = std::vector<Pt2>;

double cross2(const Pt2& a, const Pt2& b) { return a(0) * b(1) - a(1) * b(0); }

double area2(const Poly2& p) {
  double a = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) a += cross2(p[i], p[(i + 1) % p.size()]);
  return 0.5 * a;
}

Poly2 convex_hull(Poly2 p, double tol) {
  if (p.size() < 3) return {};
  std::sort(p.begin(), p.end(), [](const Pt2& a, const Pt2& b) {
    return a(0) < b(0) || (a(0) == b(0) && a(1) < b(1));
  });
  Poly2 h(2 * p.size());
  std::size_t k = 0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    while (k >= 2 && cross2(h[k - 1] - h[k - 2], p[i] - h[k - 2]) <= tol) --k;
    h[k++] = p[i];
  }
  for (std::size_t i = p.size() - 1, t = k + 1; i > 0; --i) {
    while (k >= t && cross2(h[k - 1] - h[k - 2], p[i - 1] - h[k - 2]) <= tol) --k;
    h[k++] = p[i - 1];
  }
  h.resize(k > 0 ? k - 1 : 0);
  return h;
}

// clip subject by the left half-planes of a CCW convex clip polygon
Poly2 clip_convex(const Poly2& subject, const Poly2& clip) {
  Poly2 out = subject;
  for (std::size_t e = 0; e < clip.size() && !out.empty(); ++e) {
    Pt2 a = clip[e], b = clip[(e + 1) % clip.size()];
    Poly2 in = out;
    out.clear();
    for (std::size_t i = 0; i < in.size(); ++i) {
      Pt2 p = in[i], q = in[(i + 1) % in.size()];
      double sp = cross2(b - a, p - a), sq = cross2(b - a, q - a);
      if (sp >= 0) out.push_back(p);
      if ((sp >= 0) != (sq >= 0)) out.push_back(p + sp / (sp - sq) * (q - p));
    }
  }
  return out;
}

std::uint64_t edge_key(Index a, Index b) {
  if (a > b) std::swap(a, b);
  return (static_cast<std::uint64_t>(a) << 32) | static_cast<std::uint64_t>(b);
}

struct FractureData {
  Plane plane;
  Frame frame;
  std::vector<Vec3> loop;  // CCW around plane.normal
  Poly2 loop2;
};

class Cutter {
 public:
  Cutter(const PolyMesh& m, double eps) : eps_(eps) {
    V_ = m.vertices;
    for (const auto& f : m.faces) add_face(f, -1);
    for (const auto& c : m.cells) {
      Index id = static_cast<Index>(C_.size());
      C_.push_back(c);
      c_alive_.push_back(true);
      for (const auto& sf : c) owners_[sf.face].push_back(id);
    }
  }

  void cut_plane(const Plane& p) {
    const Index nc = static_cast<Index>(C_.size());
    for (Index c = 0; c < nc; ++c)
      if (c_alive_[c] && crosses(c, p)) split_cell(c, p);
  }

  void insert_fracture(int id, const FractureData& fr) {
    const Index nc = static_cast<Index>(C_.size());
    std::vector<Index> candidates;
    for (Index c = 0; c < nc; ++c)
      if (c_alive_[c] && crosses(c, fr.plane) && section_overlap(c, fr) > area_tol()) candidates.push_back(c);
    for (Index c : candidates) {
      check_convex(c);
      split_cell(c, fr.plane);
    }
    // faces on the fracture plane: trim along the fracture boundary and mark
    const Index nf = static_cast<Index>(F_.size());
    for (Index f = 0; f < nf; ++f) {
      if (!f_alive_[f] || !on_plane(f, fr.plane)) continue;
      Index piece = f;
      bool outside = false;
      if (face_overlap(piece, fr) <= area_tol()) continue;
      const std::size_t m = fr.loop.size();
      for (std::size_t e = 0; e < m && !outside; ++e) {
        const Vec3& a = fr.loop[e];
        const Vec3& b = fr.loop[(e + 1) % m];
        Plane ep = Plane::through(a, (b - a).cross(fr.plane.normal));
        auto parts = split_face(piece, ep);
        if (parts.first >= 0) {
          piece = parts.second;
        } else if (max_distance(piece, ep) > 0.0) {
          outside = true;
        }
      }
      if (outside) continue;
      if (f_frac_[piece] >= 0 && f_frac_[piece] != id)
        throw GeometryError("coplanar overlapping fractures " + std::to_string(f_frac_[piece]) + " and " +
                            std::to_string(id));
      f_frac_[piece] = id;
    }
  }

  // make p a vertex if it lies strictly inside some edge; same merge radius as trace points, so a
  // trace end that the fracture cuts already produced is not duplicated
  void insert_point(const Vec3& p) {
    for (const auto& v : V_)
      if ((v - p).norm() <= 10 * eps_) return;
    Index ha = -1, hb = -1;
    double best = eps_;
    for (const auto& [key, faces] : edge_faces_) {
      if (faces.empty()) continue;
      Index a = static_cast<Index>(key >> 32), b = static_cast<Index>(key & 0xffffffffu);
      Vec3 d = V_[b] - V_[a];
      double t = (p - V_[a]).dot(d) / d.squaredNorm();
      if (t <= 0.0 || t >= 1.0) continue;
      double dist = (V_[a] + t * d - p).norm();
      if (dist <= best) {
        best = dist;
        ha = a;
        hb = b;
      }
    }
    if (ha < 0) return;
    Index w = static_cast<Index>(V_.size());
    V_.push_back(p);
    insert_on_edge(ha, hb, w);
  }

  CutResult finish() {
    CutResult r;
    r.eps = eps_;
    r.mesh.vertices = V_;
    std::vector<Index> fmap(F_.size(), -1);
    for (Index f = 0; f < static_cast<Index>(F_.size()); ++f) {
      if (!f_alive_[f]) continue;
      fmap[f] = static_cast<Index>(r.mesh.faces.size());
      r.mesh.faces.push_back(F_[f]);
      r.face_fracture.push_back(f_frac_[f]);
    }
    for (Index c = 0; c < static_cast<Index>(C_.size()); ++c) {
      if (!c_alive_[c]) continue;
      std::vector<SignedFace> cell;
      for (const auto& sf : C_[c]) cell.push_back({fmap[sf.face], sf.sign});
      r.mesh.cells.push_back(cell);
    }
    if (snapped_ > 0) r.notes.push_back("snapped " + std::to_string(snapped_) + " vertices onto cutting planes");
    return r;
  }

 private:
  double area_tol() const { return eps_ * eps_ * 1e3; }

  Index add_face(const std::vector<Index>& loop, int frac) {
    Index id = static_cast<Index>(F_.size());
    F_.push_back(loop);
    f_alive_.push_back(true);
    f_frac_.push_back(frac);
    owners_.emplace_back();
    for (std::size_t i = 0; i < loop.size(); ++i)
      edge_faces_[edge_key(loop[i], loop[(i + 1) % loop.size()])].push_back(id);
    return id;
  }

  void remove_face(Index f) {
    const auto& loop = F_[f];
    for (std::size_t i = 0; i < loop.size(); ++i) {
      auto& v = edge_faces_[edge_key(loop[i], loop[(i + 1) % loop.size()])];
      v.erase(std::remove(v.begin(), v.end(), f), v.end());
    }
    f_alive_[f] = false;
  }

  void insert_on_edge(Index a, Index b, Index w) {
    auto faces = edge_faces_[edge_key(a, b)];
    for (Index f : faces) {
      auto& loop = F_[f];
      const std::size_t n = loop.size();
      for (std::size_t i = 0; i < n; ++i) {
        Index p = loop[i], q = loop[(i + 1) % n];
        if ((p == a && q == b) || (p == b && q == a)) {
          loop.insert(loop.begin() + static_cast<std::ptrdiff_t>(i + 1), w);
          break;
        }
      }
      edge_faces_[edge_key(a, w)].push_back(f);
      edge_faces_[edge_key(w, b)].push_back(f);
    }
    edge_faces_.erase(edge_key(a, b));
  }

  // signed distance with snapping of near-plane vertices
  double side(Index v, const Plane& p) {
    double d = p.signed_distance(V_[v]);
    if (std::abs(d) < eps_) {
      if (d != 0.0) {
        V_[v] = p.project(V_[v]);
        ++snapped_;
      }
      return 0.0;
    }
    return d;
  }

  double max_distance(Index f, const Plane& p) const {
    double m = -1e300;
    for (Index v : F_[f]) m = std::max(m, p.signed_distance(V_[v]));
    return m > eps_ ? m : 0.0;
  }

  bool on_plane(Index f, const Plane& p) const {
    for (Index v : F_[f])
      if (std::abs(p.signed_distance(V_[v])) >= eps_) return false;
    return true;
  }

  std::vector<Index> cell_vertices(Index c) const {
    std::set<Index> s;
    for (const auto& sf : C_[c]) s.insert(F_[sf.face].begin(), F_[sf.face].end());
    return {s.begin(), s.end()};
  }

  bool crosses(Index c, const Plane& p) const {
    bool pos = false, neg = false;
    for (Index v : cell_vertices(c)) {
      double d = p.signed_distance(V_[v]);
      pos = pos || d >= eps_;
      neg = neg || d <= -eps_;
    }
    return pos && neg;
  }

  void check_convex(Index c) const {
    auto verts = cell_vertices(c);
    std::vector<Vec3> all;
    for (Index v : verts) all.push_back(V_[v]);
    const double cell_diam = diameter(all);
    for (const auto& sf : C_[c]) {
      std::vector<Vec3> pts;
      for (Index v : F_[sf.face]) pts.push_back(V_[v]);
      // a face of width w has a normal good to about eps / w once its vertices are snapped
      const double width = 2.0 * polygon_area(pts) / std::max(diameter(pts), eps_);
      const double tol = 10 * eps_ * (1.0 + cell_diam / std::max(width, eps_));
      Vec3 n = polygon_normal(pts) * sf.sign;
      Plane p = Plane::through(polygon_centroid(pts), n);
      for (Index v : verts) {
        const double d = p.signed_distance(V_[v]);
        if (d > tol) {
          std::ostringstream msg;
          msg << "cutting requires convex cells; cell " << c << " is not convex (vertex " << v << " lies " << d
              << " outside face " << sf.face << ")";
          throw GeometryError(msg.str());
        }
      }
    }
  }

  double section_overlap(Index c, const FractureData& fr) const {
    Poly2 pts;
    for (const auto& sf : C_[c]) {
      const auto& loop = F_[sf.face];
      for (std::size_t i = 0; i < loop.size(); ++i) {
        const Vec3& a = V_[loop[i]];
        const Vec3& b = V_[loop[(i + 1) % loop.size()]];
        double sa = fr.plane.signed_distance(a), sb = fr.plane.signed_distance(b);
        if (std::abs(sa) < eps_) pts.push_back(fr.frame.to_local(a));
        if ((sa >= eps_ && sb <= -eps_) || (sa <= -eps_ && sb >= eps_))
          pts.push_back(fr.frame.to_local(a + sa / (sa - sb) * (b - a)));
      }
    }
    Poly2 hull = convex_hull(pts, 0.0);
    if (hull.size() < 3) return 0.0;
    return area2(clip_convex(hull, fr.loop2));
  }

  double face_overlap(Index f, const FractureData& fr) const {
    Poly2 pts;
    for (Index v : F_[f]) pts.push_back(fr.frame.to_local(V_[v]));
    if (area2(pts) < 0) std::reverse(pts.begin(), pts.end());
    Poly2 hull = convex_hull(pts, 0.0);
    if (hull.size() < 3) return 0.0;
    return area2(clip_convex(hull, fr.loop2));
  }

  // returns (positive part, negative part) or (-1,-1) when the face is not crossed
  std::pair<Index, Index> split_face(Index f, const Plane& p) {
    std::unordered_map<Index, double> s;
    bool pos = false, neg = false;
    for (Index v : F_[f]) {
      double d = side(v, p);
      s[v] = d;
      pos = pos || d > 0;
      neg = neg || d < 0;
    }
    if (!pos || !neg) return {-1, -1};
    std::vector<std::pair<Index, Index>> crossing;
    const auto loop0 = F_[f];
    for (std::size_t i = 0; i < loop0.size(); ++i) {
      Index a = loop0[i], b = loop0[(i + 1) % loop0.size()];
      if (s[a] * s[b] < 0) crossing.emplace_back(a, b);
    }
    for (const auto& [a, b] : crossing) {
      Index w = static_cast<Index>(V_.size());
      double t = s[a] / (s[a] - s[b]);
      V_.push_back(V_[a] + t * (V_[b] - V_[a]));
      s[w] = 0.0;
      insert_on_edge(a, b, w);
    }
    // filtering the cyclic loop keeps each part in cyclic order
    std::vector<Index> lp, ln;
    for (Index v : F_[f]) {
      if (s[v] >= 0) lp.push_back(v);
      if (s[v] <= 0) ln.push_back(v);
    }
    int frac = f_frac_[f];
    Index fp = add_face(lp, frac);
    Index fn = add_face(ln, frac);
    for (Index c : owners_[f]) {
      auto& cell = C_[c];
      for (std::size_t i = 0; i < cell.size(); ++i) {
        if (cell[i].face != f) continue;
        int sg = cell[i].sign;
        cell[i] = {fp, sg};
        cell.insert(cell.begin() + static_cast<std::ptrdiff_t>(i + 1), SignedFace{fn, sg});
        break;
      }
      owners_[fp].push_back(c);
      owners_[fn].push_back(c);
    }
    remove_face(f);
    return {fp, fn};
  }

  void split_cell(Index c, const Plane& p) {
    for (Index v : cell_vertices(c)) side(v, p);
    auto faces = C_[c];
    for (const auto& sf : faces) split_face(sf.face, p);
    std::vector<SignedFace> cp, cn;
    std::set<Index> zero;
    for (const auto& sf : C_[c]) {
      double mx = 0.0, mn = 0.0;
      for (Index v : F_[sf.face]) {
        double d = p.signed_distance(V_[v]);
        if (std::abs(d) < eps_) {
          zero.insert(v);
          continue;
        }
        mx = std::max(mx, d);
        mn = std::min(mn, d);
      }
      if (mx > 0 && mn < 0) throw GeometryError("face still crosses the cutting plane");
      if (mx > 0)
        cp.push_back(sf);
      else if (mn < 0)
        cn.push_back(sf);
      else
        throw GeometryError("face lies on the cutting plane of a crossed cell");
    }
    if (cp.empty() || cn.empty() || zero.size() < 3) return;
    Vec3 center = Vec3::Zero();
    for (Index v : zero) center += V_[v];
    center /= static_cast<double>(zero.size());
    Frame fr = Frame::from_normal(center, p.normal);
    std::vector<std::pair<double, Index>> ang;
    for (Index v : zero) {
      Pt2 q = fr.to_local(V_[v]);
      ang.emplace_back(std::atan2(q(1), q(0)), v);
    }
    std::sort(ang.begin(), ang.end());
    std::vector<Index> loop;
    for (const auto& a : ang) loop.push_back(a.second);
    Index fcut = add_face(loop, -1);
    cn.push_back({fcut, +1});
    cp.push_back({fcut, -1});
    Index ip = static_cast<Index>(C_.size());
    C_.push_back(cp);
    c_alive_.push_back(true);
    Index in = static_cast<Index>(C_.size());
    C_.push_back(cn);
    c_alive_.push_back(true);
    c_alive_[c] = false;
    for (const auto& sf : cp) {
      auto& o = owners_[sf.face];
      std::replace(o.begin(), o.end(), c, ip);
    }
    for (const auto& sf : cn) {
      auto& o = owners_[sf.face];
      std::replace(o.begin(), o.end(), c, in);
    }
    owners_[fcut] = {ip, in};
  }

  double eps_;
  std::vector<Vec3> V_;
  std::vector<std::vector<Index>> F_;
  std::vector<bool> f_alive_;
  std::vector<int> f_frac_;
  std::vector<std::vector<Index>> owners_;
  std::vector<std::vector<SignedFace>> C_;
  std::vector<bool> c_alive_;
  std::unordered_map<std::uint64_t, std::vector<Index>> edge_faces_;
  long snapped_ = 0;
};

FractureData prepare(const FracturePolygon& poly) {
  FractureData fr;
  fr.plane = poly.plane();
  fr.loop = poly.vertices;
  Vec3 nn = newell_vector(fr.loop);
  if (nn.dot(fr.plane.normal) < 0) std::reverse(fr.loop.begin(), fr.loop.end());
  fr.frame = Frame::from_normal(polygon_centroid(fr.loop), fr.plane.normal);
  for (const auto& v : fr.loop) fr.loop2.push_back(fr.frame.to_local(v));
  for (std::size_t i = 0; i < fr.loop2.size(); ++i) {
    const Pt2& a = fr.loop2[(i + fr.loop2.size() - 1) % fr.loop2.size()];
    const Pt2& b = fr.loop2[i];
    const Pt2& c = fr.loop2[(i + 1) % fr.loop2.size()];
    if (cross2(b - a, c - b) < -1e-12 * (b - a).norm() * (c - b).norm())
      throw GeometryError("fracture polygons must be convex");
  }
  return fr;
}

// parameter interval of the line x0 + t d inside a convex polygon lying in the line's plane
bool clip_line(const FractureData& fr, const Vec3& x0, const Vec3& d, double eps, double& t0, double& t1) {
  const std::size_t m = fr.loop.size();
  for (std::size_t i = 0; i < m; ++i) {
    const Vec3& a = fr.loop[i];
    const Vec3& b = fr.loop[(i + 1) % m];
    Vec3 inward = fr.plane.normal.cross(b - a).normalized();
    double c0 = inward.dot(x0 - a), c1 = inward.dot(d);
    // c0 + t c1 >= -eps
    if (std::abs(c1) < 1e-14) {
      if (c0 < -eps) return false;
      continue;
    }
    double t = (-eps - c0) / c1;
    if (c1 > 0)
      t0 = std::max(t0, t);
    else
      t1 = std::min(t1, t);
  }
  return t1 > t0;
}

}  // namespace

std::vector<TraceGeometry> compute_traces(const std::vector<FracturePolygon>& fractures, double eps) {
  std::vector<FractureData> fd;
  for (const auto& f : fractures) fd.push_back(prepare(f));
  std::vector<TraceGeometry> out;
  for (int i = 0; i < static_cast<int>(fd.size()); ++i) {
    for (int j = i + 1; j < static_cast<int>(fd.size()); ++j) {
      Vec3 d = fd[i].plane.normal.cross(fd[j].plane.normal);
      if (d.norm() < 1e-10) continue;
      d = lexicographic_positive(d.normalized());
      // point on both planes closest to the origin
      Eigen::Matrix<double, 3, 3> A;
      A.row(0) = fd[i].plane.normal.transpose();
      A.row(1) = fd[j].plane.normal.transpose();
      A.row(2) = d.transpose();
      Vec3 x0 = A.colPivHouseholderQr().solve(Vec3(fd[i].plane.offset, fd[j].plane.offset, 0.0));
      // slack decides whether the fractures meet, the exact clip places the end points
      double t0 = -1e300, t1 = 1e300;
      if (!clip_line(fd[i], x0, d, eps, t0, t1)) continue;
      if (!clip_line(fd[j], x0, d, eps, t0, t1)) continue;
      if (t1 - t0 <= 10 * eps) continue;
      double e0 = -1e300, e1 = 1e300;
      clip_line(fd[i], x0, d, 0.0, e0, e1);
      clip_line(fd[j], x0, d, 0.0, e0, e1);
      if (e1 - e0 <= 10 * eps) continue;
      TraceGeometry t;
      t.fracture_a = i;
      t.fracture_b = j;
      t.start = x0 + e0 * d;
      t.end = x0 + e1 * d;
      out.push_back(t);
    }
  }
  return out;
}

std::vector<PointGeometry> compute_trace_points(const std::vector<TraceGeometry>& traces, double eps) {
  std::vector<PointGeometry> pts;
  auto on_trace = [&](const TraceGeometry& t, const Vec3& x) {
    Vec3 d = t.end - t.start;
    double s = (x - t.start).dot(d) / d.squaredNorm();
    if (s < -eps / d.norm() || s > 1.0 + eps / d.norm()) return false;
    return (t.start + std::clamp(s, 0.0, 1.0) * d - x).norm() <= 10 * eps;
  };
  for (std::size_t a = 0; a < traces.size(); ++a) {
    for (std::size_t b = a + 1; b < traces.size(); ++b) {
      const auto& ta = traces[a];
      const auto& tb = traces[b];
      Vec3 da = ta.tangent(), db = tb.tangent();
      Vec3 n = da.cross(db);
      if (n.norm() < 1e-10) continue;
      // closest points of the two lines
      Vec3 r = tb.start - ta.start;
      double nn = n.squaredNorm();
      double sa = r.cross(db).dot(n) / nn;
      double sb = r.cross(da).dot(n) / nn;
      Vec3 pa = ta.start + sa * da, pb = tb.start + sb * db;
      if ((pa - pb).norm() > 10 * eps) continue;
      Vec3 x = 0.5 * (pa + pb);
      if (!on_trace(ta, x) || !on_trace(tb, x)) continue;
      bool dup = false;
      for (auto& p : pts)
        if ((p.x - x).norm() <= 10 * eps) dup = true;
      if (!dup) pts.push_back({x, {}});
    }
  }
  for (auto& p : pts)
    for (int t = 0; t < static_cast<int>(traces.size()); ++t)
      if (on_trace(traces[t], p.x)) p.traces.push_back(t);
  return pts;
}

CutResult cut_background_mesh(const PolyMesh& background, const std::vector<FracturePolygon>& fractures,
                              const CutOptions& options) {
  const double eps = options.eps_rel * background.extent();
  Cutter cutter(background, eps);
  for (const auto& p : options.extra_planes) cutter.cut_plane(p);
  for (int i = 0; i < static_cast<int>(fractures.size()); ++i) cutter.insert_fracture(i, prepare(fractures[i]));
  auto traces = compute_traces(fractures, eps);
  auto points = compute_trace_points(traces, eps);
  for (const auto& t : traces) {
    cutter.insert_point(t.start);
    cutter.insert_point(t.end);
  }
  for (const auto& p : points) cutter.insert_point(p.x);
  CutResult r = cutter.finish();
  r.traces = std::move(traces);
  r.points = std::move(points);
  return r;
}

}  // namespace mvem
