#include "mvem/builtins.hpp"

#include <cmath>

namespace mvem {

double Polynomial3::operator()(const Vec3& x) const {
  double v = 0.0;
  for (const auto& [c, e] : terms) v += c * std::pow(x(0), e[0]) * std::pow(x(1), e[1]) * std::pow(x(2), e[2]);
  return v;
}

namespace {

double dpow(double x, int e, int order) {
  double f = 1.0;
  for (int i = 0; i < order; ++i) {
    if (e - i <= 0) return 0.0;
    f *= e - i;
  }
  return f * std::pow(x, e - order);
}

}  // namespace

Vec3 Polynomial3::gradient(const Vec3& x) const {
  Vec3 g = Vec3::Zero();
  for (const auto& [c, e] : terms)
    for (int a = 0; a < 3; ++a) {
      double v = c;
      for (int b = 0; b < 3; ++b) v *= dpow(x(b), e[b], b == a ? 1 : 0);
      g(a) += v;
    }
  return g;
}

Mat3 Polynomial3::hessian(const Vec3& x) const {
  Mat3 h = Mat3::Zero();
  for (const auto& [c, e] : terms)
    for (int a = 0; a < 3; ++a)
      for (int b = 0; b < 3; ++b) {
        double v = c;
        for (int i = 0; i < 3; ++i) v *= dpow(x(i), e[i], (i == a) + (i == b));
        h(a, b) += v;
      }
  return h;
}

int Polynomial3::degree() const {
  int d = 0;
  for (const auto& t : terms) d = std::max(d, t.second[0] + t.second[1] + t.second[2]);
  return d;
}

Polynomial3 Polynomial3::random(int degree, std::mt19937& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Polynomial3 p;
  for (const auto& e : exponents(3, degree)) p.terms.emplace_back(u(rng), e);
  return p;
}

ExactField darcy_field(const DomainMesh& dm, const Mat3& a, ScalarField p, GradientField grad, HessianField hess) {
  ExactField f;
  f.pressure = p;
  if (dm.dim == 0) return f;
  Matrix r(3, dm.dim);
  if (dm.dim == 3) {
    r = Matrix::Identity(3, 3);
  } else if (dm.dim == 2) {
    r.col(0) = dm.frame.e1;
    r.col(1) = dm.frame.e2;
  } else {
    r.col(0) = dm.tangent;
  }
  Matrix at = r.transpose() * a * r;
  f.velocity = [r, at, grad](const Vec3& x) -> Vec3 { return -(r * at * r.transpose() * grad(x)); };
  f.divergence = [r, at, hess](const Vec3& x) { return -(at * (r.transpose() * hess(x) * r)).trace(); };
  return f;
}

BoundaryRule dirichlet_everywhere(ScalarField g) {
  return [g](const MixedMesh&, int, const Facet&, const Vec3&) { return BoundaryCondition::pressure(g); };
}

std::vector<std::string> list_builtins() {
  return {"problem1_quartic", "problem2_finite_eta", "convergence_sweep", "patch_tests"};
}

namespace {

std::array<ElementSpace, 4> spaces_for(const std::string& element, const std::string& fallback) {
  ElementSpace s3 = ElementSpace::parse(3, element.empty() ? fallback : element);
  const int kl = s3.k_div;
  return {ElementSpace::rt(1, kl), ElementSpace::rt(1, kl), ElementSpace::rt(2, kl), s3};
}

FracturePolygon rect(std::initializer_list<Vec3> v) { return FracturePolygon{std::vector<Vec3>(v)}; }

FracturePolygon planar_quad(const Vec3& c, const Vec3& normal, double su, double sv) {
  Frame f = Frame::from_normal(c, normal);
  return FracturePolygon{{c - su * f.e1 - sv * f.e2, c + su * f.e1 - sv * f.e2, c + su * f.e1 + sv * f.e2,
                          c - su * f.e1 + sv * f.e2}};
}

int dominant_axis(const Vec3& v) {
  int i = 0;
  v.cwiseAbs().maxCoeff(&i);
  return i;
}

}  // namespace

Scenario problem1_quartic(const BuiltinOptions& opt) {
  Scenario sc;
  sc.name = "problem1_quartic";
  const int n = opt.cells > 0 ? opt.cells : 2;
  if (n % 2) throw ConfigError("problem1 needs an even number of cells per axis so the mesh conforms to x=y=z=0");
  sc.background = box_mesh(Vec3(-1, -1, -1), Vec3(1, 1, 1), {n, n, n});
  sc.fractures = {rect({{0, -1, -1}, {0, 1, -1}, {0, 1, 1}, {0, -1, 1}}),
                  rect({{-1, 0, -1}, {1, 0, -1}, {1, 0, 1}, {-1, 0, 1}}),
                  rect({{-1, -1, 0}, {1, -1, 0}, {1, 1, 0}, {-1, 1, 0}})};
  sc.spaces = spaces_for(opt.element, "RT4");
  const double a3 = 1.0, a2 = 2.0, a1 = 4.0;
  auto P = [](const Vec3& x) {
    return std::pow(1 + std::abs(x(0)), 4) + std::pow(1 + std::abs(x(1)), 4) + std::pow(1 + std::abs(x(2)), 4);
  };
  auto grad = [](const Vec3& x) {
    Vec3 g;
    for (int i = 0; i < 3; ++i) g(i) = 4 * std::pow(1 + std::abs(x(i)), 3) * ((x(i) > 0) - (x(i) < 0));
    return g;
  };
  auto hess = [](const Vec3& x) {
    Mat3 h = Mat3::Zero();
    for (int i = 0; i < 3; ++i) h(i, i) = 12 * std::pow(1 + std::abs(x(i)), 2);
    return h;
  };
  auto lap = [](const Vec3& x, int skip_a, int skip_b) {
    double s = 0.0;
    for (int i = 0; i < 3; ++i)
      if (i != skip_a && i != skip_b) s += 12 * std::pow(1 + std::abs(x(i)), 2);
    return s;
  };
  sc.domain_data = [=](const MixedMesh& m, int di) {
    const DomainMesh& dm = m.domains[di];
    DomainData d;
    switch (dm.dim) {
      case 3:
        d.transmissivity = [=](const Vec3&) { return Mat3(a3 * Mat3::Identity()); };
        d.source = [=](const Vec3& x) { return -a3 * lap(x, -1, -1); };
        break;
      case 2: {
        const int i = dominant_axis(dm.frame.normal);
        d.transmissivity = [=](const Vec3&) { return Mat3(a2 * Mat3::Identity()); };
        // tangential flow plus the exchange from the two matrix sides, each a3 * dP/dn = 4 a3
        d.source = [=](const Vec3& x) { return -a2 * lap(x, i, i) - 8 * a3; };
        break;
      }
      case 1: {
        const int j = dominant_axis(dm.tangent);
        d.transmissivity = [=](const Vec3&) { return Mat3(a1 * Mat3::Identity()); };
        d.source = [=](const Vec3& x) { return -a1 * 12 * std::pow(1 + std::abs(x(j)), 2) - 16 * a2; };
        break;
      }
      default:
        d.source = [=](const Vec3&) { return -24 * a1; };
    }
    return d;
  };
  sc.boundary = [P](const MixedMesh&, int, const Facet& f, const Vec3&) {
    return f.on_outer_boundary ? BoundaryCondition::pressure(P) : BoundaryCondition::neumann();
  };
  sc.exact = [=](const MixedMesh& m, int di) {
    const DomainMesh& dm = m.domains[di];
    const double a = dm.dim == 3 ? a3 : dm.dim == 2 ? a2 : a1;
    return darcy_field(dm, a * Mat3::Identity(), P, grad, hess);
  };
  sc.exact_tolerance = 1e-8;
  return sc;
}

Scenario problem2_finite_eta(const BuiltinOptions& opt) {
  Scenario sc;
  sc.name = opt.continuity ? "problem2_continuity" : "problem2_finite_eta";
  const int c = opt.cells > 0 ? opt.cells : 1;
  std::array<std::vector<double>, 3> lines;
  for (int i = 0; i <= 8 * c; ++i) lines[0].push_back(-2.0 + 0.5 * i / c);
  for (int a = 1; a < 3; ++a)
    for (int i = 0; i <= 4 * c; ++i) lines[a].push_back(-1.0 + 0.5 * i / c);
  sc.background = grid_mesh(lines);
  // F2 and F3 end on F1 and F4, so their common trace runs from one barrier plane to the other
  sc.fractures = {rect({{-1, -1, -1}, {-1, 1, -1}, {-1, 1, 1}, {-1, -1, 1}}),
                  rect({{-1, 0, -1}, {1, 0, -1}, {1, 0, 1}, {-1, 0, 1}}),
                  rect({{-1, -1, 0}, {1, -1, 0}, {1, 1, 0}, {-1, 1, 0}}),
                  rect({{1, -1, -1}, {1, 1, -1}, {1, 1, 1}, {1, -1, 1}})};
  sc.spaces = spaces_for(opt.element, "RT0");
  const bool cont = opt.continuity;
  sc.domain_data = [cont](const MixedMesh& m, int di) {
    const DomainMesh& dm = m.domains[di];
    DomainData d;
    double a = dm.dim == 3 ? 1.0 : dm.dim == 2 ? 1e2 : 1e4;
    d.transmissivity = [a](const Vec3&) { return Mat3(a * Mat3::Identity()); };
    if (!cont && dm.dim < 3) {
      double eta = 10.0;
      if (dm.dim == 2 && dm.index == 0) eta = 1.0;
      d.inverse_eta = 1.0 / eta;
    }
    return d;
  };
  sc.boundary = [](const MixedMesh&, int, const Facet& f, const Vec3& x) {
    if (f.on_outer_boundary && std::abs(std::abs(x(0)) - 2.0) < 1e-9)
      return BoundaryCondition::pressure([s = x(0) > 0 ? 2.0 : -2.0](const Vec3&) { return s; });
    return BoundaryCondition::neumann();
  };
  return sc;
}

Scenario convergence_problem(const ElementSpace& space, int n) {
  Scenario sc;
  sc.name = "convergence_" + space.name() + "_" + std::to_string(n);
  sc.background = box_mesh(Vec3(0, 0, 0), Vec3(1, 1, 1), {n, n, n});
  sc.spaces[3] = space;
  const double pi = std::acos(-1.0);
  auto P = [pi](const Vec3& x) { return std::sin(pi * x(0)) * std::sin(pi * x(1)) * std::sin(pi * x(2)); };
  auto grad = [pi](const Vec3& x) {
    Vec3 s(std::sin(pi * x(0)), std::sin(pi * x(1)), std::sin(pi * x(2)));
    Vec3 c(std::cos(pi * x(0)), std::cos(pi * x(1)), std::cos(pi * x(2)));
    return Vec3(pi * c(0) * s(1) * s(2), pi * s(0) * c(1) * s(2), pi * s(0) * s(1) * c(2));
  };
  auto hess = [pi](const Vec3& x) {
    Vec3 s(std::sin(pi * x(0)), std::sin(pi * x(1)), std::sin(pi * x(2)));
    Vec3 c(std::cos(pi * x(0)), std::cos(pi * x(1)), std::cos(pi * x(2)));
    Mat3 h;
    h << -pi * pi * s(0) * s(1) * s(2), pi * pi * c(0) * c(1) * s(2), pi * pi * c(0) * s(1) * c(2),
        pi * pi * c(0) * c(1) * s(2), -pi * pi * s(0) * s(1) * s(2), pi * pi * s(0) * c(1) * c(2),
        pi * pi * c(0) * s(1) * c(2), pi * pi * s(0) * c(1) * c(2), -pi * pi * s(0) * s(1) * s(2);
    return h;
  };
  sc.domain_data = [P, pi](const MixedMesh&, int) {
    DomainData d;
    d.source = [P, pi](const Vec3& x) { return 3 * pi * pi * P(x); };
    return d;
  };
  sc.boundary = dirichlet_everywhere(P);
  sc.exact = [=](const MixedMesh& m, int di) { return darcy_field(m.domains[di], Mat3::Identity(), P, grad, hess); };
  return sc;
}

namespace {

Scenario polynomial_scenario(const std::string& name, const Polynomial3& p, const Mat3& a) {
  Scenario sc;
  sc.name = name;
  auto P = [p](const Vec3& x) { return p(x); };
  auto grad = [p](const Vec3& x) { return p.gradient(x); };
  auto hess = [p](const Vec3& x) { return p.hessian(x); };
  sc.domain_data = [=](const MixedMesh& m, int di) {
    DomainData d;
    d.transmissivity = [a](const Vec3&) { return a; };
    ExactField f = darcy_field(m.domains[di], a, P, grad, hess);
    if (f.divergence) d.source = f.divergence;
    return d;
  };
  sc.boundary = dirichlet_everywhere(P);
  sc.exact = [=](const MixedMesh& m, int di) { return darcy_field(m.domains[di], a, P, grad, hess); };
  sc.exact_tolerance = 1e-9;
  return sc;
}

}  // namespace

std::vector<PatchCase> patch_cases(const std::vector<ElementSpace>& spaces_3d, const std::vector<int>& lower) {
  std::vector<PatchCase> out;
  std::mt19937 rng(20240607);
  Mat3 aniso;
  aniso << 2.0, 0.3, 0.1, 0.3, 1.5, 0.2, 0.1, 0.2, 1.0;
  for (const auto& s : spaces_3d) {
    Polynomial3 p = Polynomial3::random(s.k_div, rng);
    Scenario sc = polynomial_scenario("patch3d_" + s.name(), p, aniso);
    sc.background = box_mesh(Vec3(0, 0, 0), Vec3(1, 1, 1), {2, 2, 2});
    // non-physical cuts turn the cubes into general convex polyhedra
    sc.cut.extra_planes = {Plane::through(Vec3(0.3, 0.4, 0.5), Vec3(1, 0.7, 0.4).normalized()),
                           Plane::through(Vec3(0.6, 0.5, 0.5), Vec3(-0.2, 1, 0.9).normalized())};
    sc.spaces[3] = s;
    out.push_back({"3D " + s.name(), std::move(sc)});
  }
  for (int k : lower) {
    Polynomial3 p = Polynomial3::random(k, rng);
    Scenario sc = polynomial_scenario("patch2d_RT" + std::to_string(k), p, 1.5 * Mat3::Identity());
    sc.background = box_mesh(Vec3(0, 0, 0), Vec3(1, 1, 1), {3, 3, 3});
    sc.fractures = {planar_quad(Vec3(0.5, 0.5, 0.45), Vec3(0.2, -0.3, 1.0), 0.4, 0.35)};
    sc.max_dim = 2;
    sc.spaces[2] = ElementSpace::rt(2, k);
    out.push_back({"2D RT" + std::to_string(k), std::move(sc)});
  }
  for (int k : lower) {
    Polynomial3 p = Polynomial3::random(k, rng);
    Scenario sc = polynomial_scenario("patch1d_RT" + std::to_string(k), p, 0.7 * Mat3::Identity());
    sc.background = box_mesh(Vec3(0, 0, 0), Vec3(1, 1, 1), {3, 3, 3});
    sc.fractures = {planar_quad(Vec3(0.5, 0.5, 0.45), Vec3(0.2, -0.3, 1.0), 0.4, 0.35),
                    planar_quad(Vec3(0.5, 0.48, 0.5), Vec3(1.0, 0.3, 0.2), 0.4, 0.4)};
    sc.max_dim = 1;
    sc.spaces[1] = ElementSpace::rt(1, k);
    out.push_back({"1D RT" + std::to_string(k), std::move(sc)});
  }
  return out;
}

Scenario builtin_scenario(const std::string& name, const BuiltinOptions& opt) {
  if (name == "problem1_quartic") return problem1_quartic(opt);
  if (name == "problem2_finite_eta") return problem2_finite_eta(opt);
  if (name == "convergence_sweep") {
    ElementSpace s = ElementSpace::parse(3, opt.element.empty() ? "RT0" : opt.element);
    return convergence_problem(s, opt.cells > 0 ? opt.cells : 4);
  }
  if (name == "patch_tests") throw ConfigError("patch_tests is a suite; run it through the CLI");
  throw ConfigError("unknown builtin '" + name + "'");
}

}  // namespace mvem
