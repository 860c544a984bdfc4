#include "mvem/config.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>

#include <json.hpp>

#include "mvem/builtins.hpp"

namespace mvem {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& key, const std::string& msg) {
  throw ConfigError("config: '" + key + "': " + msg);
}

Vec3 vec3(const json& j, const std::string& key) {
  if (!j.is_array() || j.size() != 3) fail(key, "expected [x, y, z]");
  return Vec3(j[0].get<double>(), j[1].get<double>(), j[2].get<double>());
}

Mat3 tensor(const json& j, const std::string& key) {
  if (j.is_number()) return j.get<double>() * Mat3::Identity();
  if (j.is_array() && j.size() == 3 && j[0].is_number()) return vec3(j, key).asDiagonal();
  if (!j.is_array() || j.size() != 3) fail(key, "expected a number, a diagonal [3] or a 3x3 array");
  Mat3 m;
  for (int r = 0; r < 3; ++r) m.row(r) = vec3(j[r], key).transpose();
  if ((m - m.transpose()).norm() > 1e-12 * m.norm()) fail(key, "tensor must be symmetric");
  return m;
}

Polynomial3 polynomial(const json& j, const std::string& key) {
  Polynomial3 p;
  if (j.is_number()) {
    p.terms.emplace_back(j.get<double>(), Exponent{0, 0, 0});
    return p;
  }
  if (!j.is_array()) fail(key, "expected a number or a list of [c, i, j, k] terms");
  for (const auto& t : j) {
    if (!t.is_array() || t.size() != 4) fail(key, "terms are [c, i, j, k]");
    Exponent e{t[1].get<int>(), t[2].get<int>(), t[3].get<int>()};
    if (e[0] < 0 || e[1] < 0 || e[2] < 0) fail(key, "negative exponent");
    p.terms.emplace_back(t[0].get<double>(), e);
  }
  return p;
}

struct DomainSpec {
  Mat3 a = Mat3::Identity();
  double inverse_eta = 0.0;
  bool has_source = false;
  Polynomial3 source;
};

void apply_domain(const json& j, const std::string& key, DomainSpec& s) {
  if (!j.is_object()) fail(key, "expected an object");
  for (const auto& [k, v] : j.items()) {
    if (k == "transmissivity") {
      s.a = tensor(v, key + ".transmissivity");
    } else if (k == "eta") {
      if (v.is_string()) {
        if (v.get<std::string>() != "inf") fail(key + ".eta", "only \"inf\" is accepted as a string");
        s.inverse_eta = 0.0;
      } else {
        double eta = v.get<double>();
        if (!(eta > 0)) fail(key + ".eta", "must be positive");
        s.inverse_eta = 1.0 / eta;
      }
    } else if (k == "inverse_eta") {
      s.inverse_eta = v.get<double>();
      if (s.inverse_eta < 0) fail(key + ".inverse_eta", "must be non-negative");
    } else if (k == "source") {
      s.has_source = true;
      s.source = polynomial(v, key + ".source");
    } else if (k != "vertices") {
      fail(key + "." + k, "unknown key");
    }
  }
}

PolyMesh background(const json& j, const std::string& base_dir, int cells_override) {
  const std::string type = j.value("type", "box");
  if (type == "box") {
    Vec3 lo = vec3(j.value("min", json::array({0, 0, 0})), "mesh.min");
    Vec3 hi = vec3(j.value("max", json::array({1, 1, 1})), "mesh.max");
    std::array<int, 3> n{2, 2, 2};
    if (j.contains("cells")) {
      const json& c = j["cells"];
      if (c.is_number()) n = {c.get<int>(), c.get<int>(), c.get<int>()};
      else if (c.is_array() && c.size() == 3) n = {c[0].get<int>(), c[1].get<int>(), c[2].get<int>()};
      else fail("mesh.cells", "expected n or [nx, ny, nz]");
    }
    if (cells_override > 0) {
      const int base = std::min({n[0], n[1], n[2]});
      for (auto& v : n) v = v * cells_override / base;
    }
    for (int v : n)
      if (v < 1) fail("mesh.cells", "must be positive");
    for (int a = 0; a < 3; ++a)
      if (!(hi(a) > lo(a))) fail("mesh.max", "must exceed mesh.min");
    return box_mesh(lo, hi, n);
  }
  if (type == "grid") {
    std::array<std::vector<double>, 3> lines;
    const char* names[] = {"x", "y", "z"};
    for (int a = 0; a < 3; ++a) {
      if (!j.contains(names[a])) fail(std::string("mesh.") + names[a], "missing coordinate lines");
      lines[a] = j[names[a]].get<std::vector<double>>();
      if (lines[a].size() < 2) fail(std::string("mesh.") + names[a], "need at least two lines");
      for (std::size_t i = 1; i < lines[a].size(); ++i)
        if (!(lines[a][i] > lines[a][i - 1])) fail(std::string("mesh.") + names[a], "must be increasing");
      if (cells_override > 0) {
        std::vector<double> fine;
        for (std::size_t i = 0; i + 1 < lines[a].size(); ++i)
          for (int s = 0; s < cells_override; ++s)
            fine.push_back(lines[a][i] + (lines[a][i + 1] - lines[a][i]) * s / cells_override);
        fine.push_back(lines[a].back());
        lines[a] = fine;
      }
    }
    return grid_mesh(lines);
  }
  if (type == "file") {
    if (cells_override > 0) fail("mesh.type", "file meshes cannot be refined");
    std::filesystem::path p = j.at("path").get<std::string>();
    if (p.is_relative()) p = std::filesystem::path(base_dir) / p;
    return read_mesh_file(p.string());
  }
  fail("mesh.type", "expected box, grid or file");
}

std::array<ElementSpace, 4> element_spaces(const json& root) {
  std::array<ElementSpace, 4> s{ElementSpace::rt(1, 0), ElementSpace::rt(1, 0), ElementSpace::rt(2, 0),
                                ElementSpace::rt(3, 0)};
  if (root.contains("element")) {
    s[3] = ElementSpace::parse(3, root["element"].get<std::string>());
    for (int d = 1; d < 3; ++d) s[d] = ElementSpace::rt(d, s[3].k_div);
    s[0] = ElementSpace::rt(1, s[3].k_div);
  }
  if (root.contains("elements")) {
    for (const auto& [k, v] : root["elements"].items()) {
      int d = k == "3" || k == "3D" ? 3 : k == "2" || k == "2D" ? 2 : k == "1" || k == "1D" ? 1 : -1;
      if (d < 0) fail("elements." + k, "expected 3, 2 or 1");
      s[d] = ElementSpace::parse(d, v.get<std::string>());
    }
  }
  return s;
}

struct BoundarySelector {
  int axis = 0;
  double value = 0.0;
  bool exact = false;
  Polynomial3 pressure;
};

Scenario scenario_from_json(const json& root, const std::string& base_dir, int cells_override) {
  Scenario sc;
  sc.name = root.value("name", "config");
  sc.background = background(root.at("mesh"), base_dir, cells_override);
  const double extent = sc.background.extent();

  if (root.contains("geometry_tolerance")) sc.cut.eps_rel = root["geometry_tolerance"].get<double>();
  for (const auto& pl : root.value("cut_planes", json::array()))
    sc.cut.extra_planes.push_back(
        Plane::through(vec3(pl.at("point"), "cut_planes.point"), vec3(pl.at("normal"), "cut_planes.normal").normalized()));

  DomainSpec matrix;
  if (root.contains("matrix")) apply_domain(root["matrix"], "matrix", matrix);
  std::vector<DomainSpec> fractures;
  int fi = 0;
  for (const auto& f : root.value("fractures", json::array())) {
    const std::string key = "fractures[" + std::to_string(fi++) + "]";
    FracturePolygon poly;
    for (const auto& v : f.at("vertices")) poly.vertices.push_back(vec3(v, key + ".vertices"));
    if (poly.vertices.size() < 3) fail(key + ".vertices", "need at least three vertices");
    sc.fractures.push_back(poly);
    DomainSpec s;
    apply_domain(f, key, s);
    fractures.push_back(s);
  }
  DomainSpec traces, points;
  if (root.contains("traces")) apply_domain(root["traces"], "traces", traces);
  if (root.contains("intersections")) apply_domain(root["intersections"], "intersections", points);
  std::map<std::string, json> overrides;
  const json domain_overrides = root.value("domains", json::object());
  for (const auto& [k, v] : domain_overrides.items()) overrides[k] = v;

  sc.max_dim = root.value("max_dim", 3);
  if (sc.max_dim < 1 || sc.max_dim > 3) fail("max_dim", "must be 1, 2 or 3");
  sc.spaces = element_spaces(root);
  sc.trace_flow = root.value("trace_flow", true);

  bool manufactured = root.contains("manufactured");
  Polynomial3 exact_p;
  if (manufactured) exact_p = polynomial(root["manufactured"].at("pressure"), "manufactured.pressure");
  sc.exact_tolerance = root.value("exact_tolerance", manufactured ? 1e-8 : -1.0);

  // domain specs resolved by name after cutting
  auto spec_for = [=](const MixedMesh& m, int di) {
    const DomainMesh& dm = m.domains[di];
    DomainSpec s = dm.dim == 3 ? matrix : dm.dim == 0 ? points : dm.dim == 1 ? traces : DomainSpec{};
    if (dm.dim == 2) {
      if (dm.index >= static_cast<int>(fractures.size())) throw ConfigError("config: fracture index out of range");
      s = fractures[dm.index];
    }
    auto it = overrides.find(m.domain_name(di));
    if (it != overrides.end()) apply_domain(it->second, "domains." + it->first, s);
    return s;
  };
  auto P = [exact_p](const Vec3& x) { return exact_p(x); };
  auto grad = [exact_p](const Vec3& x) { return exact_p.gradient(x); };
  auto hess = [exact_p](const Vec3& x) { return exact_p.hessian(x); };
  sc.domain_data = [=](const MixedMesh& m, int di) {
    DomainSpec s = spec_for(m, di);
    DomainData d;
    Mat3 a = s.a;
    d.transmissivity = [a](const Vec3&) { return a; };
    d.inverse_eta = s.inverse_eta;
    if (s.has_source) {
      Polynomial3 src = s.source;
      d.source = [src](const Vec3& x) { return src(x); };
    } else if (manufactured) {
      ExactField f = darcy_field(m.domains[di], a, P, grad, hess);
      if (f.divergence) d.source = f.divergence;
    }
    return d;
  };
  if (manufactured)
    sc.exact = [=](const MixedMesh& m, int di) { return darcy_field(m.domains[di], spec_for(m, di).a, P, grad, hess); };

  // boundary
  const json bj = root.value("boundary", json::object());
  auto pressure_of = [&](const json& v, const std::string& key, BoundarySelector& sel) {
    if (v.is_string()) {
      if (v.get<std::string>() != "exact") fail(key, "expected a value, polynomial terms or \"exact\"");
      if (!manufactured) fail(key, "\"exact\" needs a manufactured pressure");
      sel.exact = true;
    } else {
      sel.pressure = polynomial(v, key);
    }
  };
  bool default_dirichlet = false;
  BoundarySelector def;
  if (bj.contains("default")) {
    const json& d = bj["default"];
    if (d.is_string() && d.get<std::string>() == "neumann") {
      default_dirichlet = false;
    } else if (d.is_object() && d.contains("pressure")) {
      default_dirichlet = true;
      pressure_of(d["pressure"], "boundary.default.pressure", def);
    } else {
      fail("boundary.default", "expected \"neumann\" or {\"pressure\": ...}");
    }
  }
  std::vector<BoundarySelector> selectors;
  for (const auto& s : bj.value("dirichlet", json::array())) {
    BoundarySelector sel;
    sel.axis = s.at("axis").get<int>();
    if (sel.axis < 0 || sel.axis > 2) fail("boundary.dirichlet.axis", "must be 0, 1 or 2");
    sel.value = s.at("value").get<double>();
    pressure_of(s.at("pressure"), "boundary.dirichlet.pressure", sel);
    selectors.push_back(sel);
  }
  const std::string lower = bj.value("lower_dims", "outer");
  if (lower != "outer" && lower != "all") fail("boundary.lower_dims", "expected outer or all");
  const bool all = lower == "all";
  const double tol = 1e-9 * extent;
  auto field = [P](const BoundarySelector& s) -> ScalarField {
    if (s.exact) return P;
    Polynomial3 q = s.pressure;
    return [q](const Vec3& x) { return q(x); };
  };
  sc.boundary = [=](const MixedMesh&, int, const Facet& f, const Vec3& x) {
    if (f.on_outer_boundary)
      for (const auto& s : selectors)
        if (std::abs(x(s.axis) - s.value) <= tol) return BoundaryCondition::pressure(field(s));
    if ((f.on_outer_boundary || all) && default_dirichlet) return BoundaryCondition::pressure(field(def));
    return BoundaryCondition::neumann();
  };

  if (root.contains("solver")) {
    const json& s = root["solver"];
    sc.solver.tolerance = s.value("tolerance", sc.solver.tolerance);
    sc.solver.direct_limit = s.value("direct_limit", sc.solver.direct_limit);
    sc.solver.max_iterations = s.value("max_iterations", sc.solver.max_iterations);
  }
  return sc;
}

const char* known_keys[] = {"name",       "builtin",  "cells",        "continuity",         "mesh",
                            "cut_planes", "fractures", "max_dim",     "element",            "elements",
                            "matrix",     "traces",   "intersections", "domains",           "boundary",
                            "manufactured", "exact_tolerance", "trace_flow", "solver",      "outputs",
                            "geometry_tolerance", "deterministic", "levels"};

json parse_root(const std::string& text) {
  json root;
  try {
    root = json::parse(text, nullptr, true, true);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: invalid JSON: ") + e.what());
  }
  if (!root.is_object()) throw ConfigError("config: top level must be an object");
  for (const auto& [k, v] : root.items()) {
    bool ok = false;
    for (const char* n : known_keys) ok = ok || k == n;
    if (!ok) fail(k, "unknown key");
  }
  return root;
}

}  // namespace

LoadedConfig parse_config(const std::string& text, const std::string& base_dir) {
  json root = parse_root(text);
  LoadedConfig lc;
  try {
    if (root.contains("builtin")) {
      lc.builtin = root["builtin"].get<std::string>();
      BuiltinOptions bo;
      bo.element = root.value("element", "");
      bo.cells = root.value("cells", 0);
      bo.continuity = root.value("continuity", false);
      if (lc.builtin != "patch_tests") lc.scenario = builtin_scenario(lc.builtin, bo);
    } else {
      lc.scenario = scenario_from_json(root, base_dir, 0);
      const std::string type = root.at("mesh").value("type", "box");
      lc.refinable = type != "file";
      if (lc.refinable && type == "box" && root["mesh"].contains("cells")) {
        const json& c = root["mesh"]["cells"];
        lc.base_cells = c.is_number() ? c.get<int>() : std::min({c[0].get<int>(), c[1].get<int>(), c[2].get<int>()});
      } else if (lc.refinable) {
        lc.base_cells = type == "box" ? 2 : 1;
      }
    }
    lc.run.input_text = text;
    lc.run.deterministic = root.value("deterministic", false);
    if (root.contains("outputs")) {
      const json& o = root["outputs"];
      if (o.contains("dir")) {
        std::filesystem::path p = o["dir"].get<std::string>();
        if (p.is_relative()) p = std::filesystem::path(base_dir) / p;
        lc.run.output_dir = p.string();
      }
      lc.run.write_vtu = o.value("vtu", true);
      lc.run.write_matrix = o.value("matrix", false);
      lc.run.dump_local = o.value("local_matrices", false);
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  return lc;
}

LoadedConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  std::string base = std::filesystem::path(path).parent_path().string();
  return parse_config(ss.str(), base.empty() ? "." : base);
}

Scenario config_at_resolution(const std::string& text, const std::string& base_dir, int cells) {
  json root = parse_root(text);
  try {
    if (root.contains("builtin")) {
      BuiltinOptions bo;
      bo.element = root.value("element", "");
      bo.cells = cells;
      bo.continuity = root.value("continuity", false);
      return builtin_scenario(root["builtin"].get<std::string>(), bo);
    }
    return scenario_from_json(root, base_dir, cells);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
}

}  // namespace mvem
