#include "mvem/polymesh.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <unordered_map>

namespace mvem {

std::vector<Vec3> PolyMesh::face_points(Index f) const {
  std::vector<Vec3> p;
  p.reserve(faces[f].size());
  for (Index v : faces[f]) p.push_back(vertices[v]);
  return p;
}

FaceLoops PolyMesh::cell_loops(Index c) const {
  FaceLoops loops;
  for (const auto& sf : cells[c]) {
    auto p = face_points(sf.face);
    if (sf.sign < 0) std::reverse(p.begin(), p.end());
    loops.push_back(std::move(p));
  }
  return loops;
}

std::vector<std::vector<Index>> PolyMesh::face_owners() const {
  std::vector<std::vector<Index>> own(faces.size());
  for (Index c = 0; c < static_cast<Index>(cells.size()); ++c)
    for (const auto& sf : cells[c]) own[sf.face].push_back(c);
  return own;
}

double PolyMesh::total_volume() const {
  double v = 0.0;
  for (Index c = 0; c < static_cast<Index>(cells.size()); ++c) v += polyhedron_volume(cell_loops(c));
  return v;
}

double PolyMesh::extent() const {
  if (vertices.empty()) return 0.0;
  Vec3 lo = vertices[0], hi = vertices[0];
  for (const auto& v : vertices) {
    lo = lo.cwiseMin(v);
    hi = hi.cwiseMax(v);
  }
  return (hi - lo).norm();
}

PolyMesh grid_mesh(const std::array<std::vector<double>, 3>& lines) {
  const int nx = static_cast<int>(lines[0].size()) - 1;
  const int ny = static_cast<int>(lines[1].size()) - 1;
  const int nz = static_cast<int>(lines[2].size()) - 1;
  if (nx < 1 || ny < 1 || nz < 1) throw ConfigError("grid needs at least one cell per axis");
  PolyMesh m;
  auto vid = [&](int i, int j, int k) -> Index { return (static_cast<Index>(k) * (ny + 1) + j) * (nx + 1) + i; };
  for (int k = 0; k <= nz; ++k)
    for (int j = 0; j <= ny; ++j)
      for (int i = 0; i <= nx; ++i) m.vertices.emplace_back(lines[0][i], lines[1][j], lines[2][k]);
  std::map<std::array<int, 4>, Index> fid;
  auto face = [&](int axis, int i, int j, int k) -> Index {
    std::array<int, 4> key{axis, i, j, k};
    auto it = fid.find(key);
    if (it != fid.end()) return it->second;
    std::vector<Index> loop;
    if (axis == 0)
      loop = {vid(i, j, k), vid(i, j + 1, k), vid(i, j + 1, k + 1), vid(i, j, k + 1)};
    else if (axis == 1)
      loop = {vid(i, j, k), vid(i, j, k + 1), vid(i + 1, j, k + 1), vid(i + 1, j, k)};
    else
      loop = {vid(i, j, k), vid(i + 1, j, k), vid(i + 1, j + 1, k), vid(i, j + 1, k)};
    Index id = static_cast<Index>(m.faces.size());
    m.faces.push_back(loop);
    fid.emplace(key, id);
    return id;
  };
  for (int k = 0; k < nz; ++k)
    for (int j = 0; j < ny; ++j)
      for (int i = 0; i < nx; ++i) {
        m.cells.push_back({{face(0, i, j, k), -1}, {face(0, i + 1, j, k), +1},
                           {face(1, i, j, k), -1}, {face(1, i, j + 1, k), +1},
                           {face(2, i, j, k), -1}, {face(2, i, j, k + 1), +1}});
      }
  return m;
}

PolyMesh box_mesh(const Vec3& lo, const Vec3& hi, const std::array<int, 3>& n) {
  std::array<std::vector<double>, 3> lines;
  for (int a = 0; a < 3; ++a) {
    if (n[a] < 1) throw ConfigError("box mesh needs at least one cell per axis");
    for (int i = 0; i <= n[a]; ++i) lines[a].push_back(lo(a) + (hi(a) - lo(a)) * i / n[a]);
  }
  return grid_mesh(lines);
}

namespace {

std::string next_line(std::istream& in, int& lineno) {
  std::string line;
  while (std::getline(in, line)) {
    ++lineno;
    auto h = line.find('#');
    if (h != std::string::npos) line.resize(h);
    if (line.find_first_not_of(" \t\r") != std::string::npos) return line;
  }
  return {};
}

[[noreturn]] void parse_fail(int lineno, const std::string& msg) {
  throw ConfigError("mesh line " + std::to_string(lineno) + ": " + msg);
}

std::size_t read_header(std::istream& in, int& lineno, const std::string& name) {
  std::istringstream ss(next_line(in, lineno));
  std::string key;
  long long n = -1;
  ss >> key >> n;
  if (key != name || n < 0) parse_fail(lineno, "expected '" + name + " <count>'");
  return static_cast<std::size_t>(n);
}

}  // namespace

PolyMesh read_mesh(std::istream& in) {
  PolyMesh m;
  int lineno = 0;
  std::unordered_map<long long, Index> vmap, fmap;
  std::size_t nv = read_header(in, lineno, "vertices");
  for (std::size_t i = 0; i < nv; ++i) {
    std::istringstream ss(next_line(in, lineno));
    long long id;
    double x, y, z;
    if (!(ss >> id >> x >> y >> z)) parse_fail(lineno, "bad vertex record");
    if (!vmap.emplace(id, static_cast<Index>(m.vertices.size())).second) parse_fail(lineno, "duplicate vertex id");
    m.vertices.emplace_back(x, y, z);
  }
  std::size_t nf = read_header(in, lineno, "faces");
  for (std::size_t i = 0; i < nf; ++i) {
    std::istringstream ss(next_line(in, lineno));
    long long id, n;
    if (!(ss >> id >> n) || n < 3) parse_fail(lineno, "bad face record");
    std::vector<Index> loop;
    for (long long j = 0; j < n; ++j) {
      long long v;
      if (!(ss >> v)) parse_fail(lineno, "missing face vertex");
      auto it = vmap.find(v);
      if (it == vmap.end()) parse_fail(lineno, "unknown vertex id " + std::to_string(v));
      loop.push_back(it->second);
    }
    if (!fmap.emplace(id, static_cast<Index>(m.faces.size())).second) parse_fail(lineno, "duplicate face id");
    m.faces.push_back(loop);
  }
  std::size_t nc = read_header(in, lineno, "cells");
  for (std::size_t i = 0; i < nc; ++i) {
    std::istringstream ss(next_line(in, lineno));
    long long id, n;
    if (!(ss >> id >> n) || n < 4) parse_fail(lineno, "bad cell record");
    std::vector<SignedFace> cell;
    for (long long j = 0; j < n; ++j) {
      std::string tok;
      if (!(ss >> tok) || tok.size() < 2 || (tok[0] != '+' && tok[0] != '-'))
        parse_fail(lineno, "cell faces must be written as +id or -id");
      long long f = std::stoll(tok.substr(1));
      auto it = fmap.find(f);
      if (it == fmap.end()) parse_fail(lineno, "unknown face id " + tok.substr(1));
      cell.push_back({it->second, tok[0] == '+' ? 1 : -1});
    }
    m.cells.push_back(cell);
  }
  return m;
}

PolyMesh read_mesh_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open mesh file " + path);
  return read_mesh(in);
}

void write_mesh(std::ostream& out, const PolyMesh& m) {
  out.precision(17);
  out << "vertices " << m.vertices.size() << "\n";
  for (std::size_t i = 0; i < m.vertices.size(); ++i)
    out << i << " " << m.vertices[i](0) << " " << m.vertices[i](1) << " " << m.vertices[i](2) << "\n";
  out << "faces " << m.faces.size() << "\n";
  for (std::size_t i = 0; i < m.faces.size(); ++i) {
    out << i << " " << m.faces[i].size();
    for (Index v : m.faces[i]) out << " " << v;
    out << "\n";
  }
  out << "cells " << m.cells.size() << "\n";
  for (std::size_t i = 0; i < m.cells.size(); ++i) {
    out << i << " " << m.cells[i].size();
    for (const auto& sf : m.cells[i]) out << " " << (sf.sign > 0 ? '+' : '-') << sf.face;
    out << "\n";
  }
}

std::vector<Violation> validate_polymesh(const PolyMesh& m, double eps) {
  std::vector<Violation> out;
  for (Index f = 0; f < static_cast<Index>(m.faces.size()); ++f) {
    if (m.faces[f].size() < 3) {
      out.push_back({"face-degenerate", f, "fewer than 3 vertices"});
      continue;
    }
    auto p = m.face_points(f);
    if (polygon_area(p) <= eps * eps) {
      out.push_back({"face-degenerate", f, "zero area"});
      continue;
    }
    double dev = planarity_defect(p);
    if (dev > eps) out.push_back({"face-planarity", f, "deviation " + std::to_string(dev)});
  }
  auto owners = m.face_owners();
  for (Index f = 0; f < static_cast<Index>(m.faces.size()); ++f) {
    if (owners[f].empty()) out.push_back({"face-orphan", f, "no owning cell"});
    if (owners[f].size() > 2) out.push_back({"face-ownership", f, "more than two owners"});
  }
  for (Index c = 0; c < static_cast<Index>(m.cells.size()); ++c) {
    std::map<std::pair<Index, Index>, int> directed;
    for (const auto& sf : m.cells[c]) {
      const auto& loop = m.faces[sf.face];
      const std::size_t n = loop.size();
      for (std::size_t i = 0; i < n; ++i) {
        Index a = loop[i], b = loop[(i + 1) % n];
        if (sf.sign < 0) std::swap(a, b);
        directed[{a, b}] += 1;
      }
    }
    bool closed = true;
    for (const auto& [e, cnt] : directed) {
      auto it = directed.find({e.second, e.first});
      if (cnt != 1 || it == directed.end() || it->second != 1) closed = false;
    }
    if (!closed) out.push_back({"cell-closure", c, "boundary edges not matched in opposite pairs"});
    try {
      double v = polyhedron_volume(m.cell_loops(c));
      if (!(v > eps * eps * eps)) out.push_back({"cell-volume", c, "non-positive volume"});
    } catch (const GeometryError& e) {
      out.push_back({"cell-volume", c, e.what()});
    }
  }
  // two owners of a shared face must see it with opposite orientation
  for (Index f = 0; f < static_cast<Index>(m.faces.size()); ++f) {
    if (owners[f].size() != 2) continue;
    int s = 0;
    for (Index c : owners[f])
      for (const auto& sf : m.cells[c])
        if (sf.face == f) s += sf.sign;
    if (s != 0) out.push_back({"face-orientation", f, "owners disagree on orientation"});
  }
  return out;
}

}  // namespace mvem
