#include "mvem/geometry.hpp"

#include <cmath>
#include <limits>

namespace mvem {

Plane Plane::through(const Vec3& point, const Vec3& normal) {
  Plane p;
  p.normal = normal.normalized();
  p.offset = p.normal.dot(point);
  return p;
}

Frame Frame::from_normal(const Vec3& origin, const Vec3& normal) {
  Vec3 n = normal.normalized();
  // axis least aligned with the normal
  int i = 0;
  n.cwiseAbs().minCoeff(&i);
  return from_normal_and_axis(origin, n, Vec3::Unit(i));
}

Frame Frame::from_normal_and_axis(const Vec3& origin, const Vec3& normal, const Vec3& axis) {
  Frame f;
  f.origin = origin;
  f.normal = normal.normalized();
  Vec3 e1 = axis - axis.dot(f.normal) * f.normal;
  if (e1.norm() < 1e-12) throw GeometryError("frame axis parallel to normal");
  f.e1 = e1.normalized();
  f.e2 = f.normal.cross(f.e1);
  return f;
}

Vec3 lexicographic_positive(const Vec3& n) {
  for (int i = 0; i < 3; ++i) {
    if (std::abs(n(i)) > 1e-12 * n.norm()) return n(i) > 0 ? n : Vec3(-n);
  }
  return n;
}

bool lexicographically_greater(const Vec3& a, const Vec3& b, double tol) {
  for (int i = 0; i < 3; ++i) {
    if (a(i) > b(i) + tol) return true;
    if (a(i) < b(i) - tol) return false;
  }
  return false;
}

double diameter(const std::vector<Vec3>& pts) {
  double d = 0.0;
  for (std::size_t i = 0; i < pts.size(); ++i)
    for (std::size_t j = i + 1; j < pts.size(); ++j) d = std::max(d, (pts[i] - pts[j]).norm());
  return d;
}

Vec3 newell_vector(const std::vector<Vec3>& loop) {
  Vec3 n = Vec3::Zero();
  const std::size_t m = loop.size();
  for (std::size_t i = 0; i < m; ++i) n += loop[i].cross(loop[(i + 1) % m]);
  return n;
}

double polygon_area(const std::vector<Vec3>& loop) { return 0.5 * newell_vector(loop).norm(); }

Vec3 polygon_normal(const std::vector<Vec3>& loop) {
  Vec3 n = newell_vector(loop);
  double len = n.norm();
  if (len == 0.0) throw GeometryError("degenerate polygon");
  return n / len;
}

Vec3 polygon_centroid(const std::vector<Vec3>& loop) {
  Vec3 n = polygon_normal(loop);
  Vec3 p0 = Vec3::Zero();
  for (const auto& p : loop) p0 += p;
  p0 /= static_cast<double>(loop.size());
  Vec3 c = Vec3::Zero();
  double a = 0.0;
  const std::size_t m = loop.size();
  for (std::size_t i = 0; i < m; ++i) {
    const Vec3& p = loop[i];
    const Vec3& q = loop[(i + 1) % m];
    double t = 0.5 * (p - p0).cross(q - p0).dot(n);
    a += t;
    c += t * (p0 + p + q) / 3.0;
  }
  if (a <= 0.0) throw GeometryError("degenerate polygon");
  return c / a;
}

double planarity_defect(const std::vector<Vec3>& loop) {
  Vec3 n = polygon_normal(loop);
  Vec3 c = Vec3::Zero();
  for (const auto& p : loop) c += p;
  c /= static_cast<double>(loop.size());
  double d = 0.0;
  for (const auto& p : loop) d = std::max(d, std::abs(n.dot(p - c)));
  return d;
}

Frame polygon_frame(const std::vector<Vec3>& loop) {
  Vec3 n = polygon_normal(loop);
  Vec3 c = polygon_centroid(loop);
  Vec3 axis = Vec3::Zero();
  for (std::size_t i = 0; i < loop.size() && axis.norm() == 0.0; ++i) {
    Vec3 e = loop[(i + 1) % loop.size()] - loop[i];
    e -= e.dot(n) * n;
    if (e.norm() > 0.0) axis = e;
  }
  return Frame::from_normal_and_axis(c, n, axis);
}

namespace {

double cross2(const Eigen::Vector2d& a, const Eigen::Vector2d& b) { return a(0) * b(1) - a(1) * b(0); }

bool in_triangle(const Eigen::Vector2d& p, const Eigen::Vector2d& a, const Eigen::Vector2d& b,
                 const Eigen::Vector2d& c, double tol) {
  return cross2(b - a, p - a) > -tol && cross2(c - b, p - b) > -tol && cross2(a - c, p - c) > -tol;
}

std::vector<Triangle> ear_clip(const std::vector<Vec3>& loop, const Frame& f, double area) {
  std::vector<Eigen::Vector2d> q;
  for (const auto& p : loop) q.push_back(f.to_local(p));
  std::vector<int> idx(loop.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = static_cast<int>(i);
  const double tol = 1e-14 * area;
  std::vector<Triangle> tris;
  while (idx.size() > 3) {
    const int m = static_cast<int>(idx.size());
    int ear = -1;
    bool drop_collinear = false;
    for (int i = 0; i < m && ear < 0; ++i) {
      int ia = idx[(i + m - 1) % m], ib = idx[i], ic = idx[(i + 1) % m];
      double cr = cross2(q[ib] - q[ia], q[ic] - q[ib]);
      if (cr <= tol) continue;
      bool ok = true;
      for (int j = 0; j < m && ok; ++j) {
        int v = idx[j];
        if (v == ia || v == ib || v == ic) continue;
        // strict interior test; vertices on the ear boundary block it too
        if (in_triangle(q[v], q[ia], q[ib], q[ic], tol) &&
            (q[v] - q[ia]).norm() > 0 && (q[v] - q[ic]).norm() > 0)
          ok = false;
      }
      if (ok) ear = i;
    }
    if (ear < 0) {
      // only reflex/collinear corners left: remove one collinear vertex
      for (int i = 0; i < m && ear < 0; ++i) {
        int ia = idx[(i + m - 1) % m], ib = idx[i], ic = idx[(i + 1) % m];
        if (std::abs(cross2(q[ib] - q[ia], q[ic] - q[ib])) <= tol) {
          ear = i;
          drop_collinear = true;
        }
      }
      if (ear < 0) throw GeometryError("ear clipping failed: polygon not simple");
    }
    int ia = idx[(ear + m - 1) % m], ib = idx[ear], ic = idx[(ear + 1) % m];
    if (!drop_collinear) tris.push_back({loop[ia], loop[ib], loop[ic]});
    idx.erase(idx.begin() + ear);
  }
  Triangle t{loop[idx[0]], loop[idx[1]], loop[idx[2]]};
  if ((t[1] - t[0]).cross(t[2] - t[0]).norm() > 2.0 * tol) tris.push_back(t);
  return tris;
}

}  // namespace

std::vector<Triangle> triangulate_polygon(const std::vector<Vec3>& loop) {
  if (loop.size() < 3) throw GeometryError("polygon with fewer than 3 vertices");
  const double area = polygon_area(loop);
  if (!(area > 0.0)) throw GeometryError("degenerate polygon");
  Vec3 n = polygon_normal(loop);
  Vec3 c = polygon_centroid(loop);
  const std::size_t m = loop.size();
  bool star = true;
  for (std::size_t i = 0; i < m && star; ++i) {
    double t = 0.5 * (loop[i] - c).cross(loop[(i + 1) % m] - c).dot(n);
    if (t <= 1e-12 * area) star = false;
  }
  std::vector<Triangle> tris;
  if (star) {
    for (std::size_t i = 0; i < m; ++i) tris.push_back({c, loop[i], loop[(i + 1) % m]});
    return tris;
  }
  return ear_clip(loop, Frame::from_normal(c, n), area);
}

QuadratureRule polygon_rule(const std::vector<Vec3>& loop, int order) {
  QuadratureRule q;
  for (const auto& t : triangulate_polygon(loop)) q.append(triangle_rule(t[0], t[1], t[2], order));
  return q;
}

double polyhedron_volume(const FaceLoops& faces) {
  double v = 0.0;
  for (const auto& f : faces) {
    Vec3 p = Vec3::Zero();
    for (const auto& x : f) p += x;
    p /= static_cast<double>(f.size());
    v += p.dot(newell_vector(f)) / 6.0;
  }
  return v;
}

Vec3 polyhedron_centroid(const FaceLoops& faces) {
  Vec3 apex = Vec3::Zero();
  std::size_t cnt = 0;
  for (const auto& f : faces)
    for (const auto& x : f) {
      apex += x;
      ++cnt;
    }
  apex /= static_cast<double>(cnt);
  Vec3 c = Vec3::Zero();
  double vol = 0.0;
  for (const auto& f : faces) {
    Vec3 fc = Vec3::Zero();
    for (const auto& x : f) fc += x;
    fc /= static_cast<double>(f.size());
    const std::size_t m = f.size();
    for (std::size_t i = 0; i < m; ++i) {
      const Vec3& a = f[i];
      const Vec3& b = f[(i + 1) % m];
      double v = (fc - apex).dot((a - apex).cross(b - apex)) / 6.0;
      vol += v;
      c += v * (apex + fc + a + b) / 4.0;
    }
  }
  if (!(vol > 0.0)) throw GeometryError("polyhedron with non-positive volume");
  return c / vol;
}

QuadratureRule polyhedron_rule(const FaceLoops& faces, int order) {
  Vec3 apex = polyhedron_centroid(faces);
  QuadratureRule q;
  for (const auto& f : faces)
    for (const auto& t : triangulate_polygon(f))
      q.append(tetrahedron_rule(apex, t[0], t[1], t[2], order, true));
  return q;
}

}  // namespace mvem
