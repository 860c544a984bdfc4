#include "mvem/pipeline.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>

#include <json.hpp>

namespace mvem {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t) { return std::chrono::duration<double>(Clock::now() - t).count(); }

std::string fnv1a(const std::string& s) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  std::ostringstream o;
  o << std::hex << std::setw(16) << std::setfill('0') << h;
  return o.str();
}

const char* dim_label(int d) {
  static const char* names[] = {"0D", "1D", "2D", "3D"};
  return names[d];
}

}  // namespace

MixedMesh build_scenario_mesh(const Scenario& sc, std::vector<Violation>* violations) {
  CutResult cut = cut_background_mesh(sc.background, sc.fractures, sc.cut);
  MixedMesh mm = build_mixed_mesh(cut, sc.fractures);
  if (sc.max_dim < 3) mm = restrict_dimensions(mm, sc.max_dim);
  if (violations) *violations = validate_conformity(mm);
  return mm;
}

ProblemData scenario_problem(const Scenario& sc, const MixedMesh& mesh) {
  ProblemData pd;
  for (int di = 0; di < static_cast<int>(mesh.domains.size()); ++di)
    pd.domains.push_back(sc.domain_data ? sc.domain_data(mesh, di) : DomainData{});
  pd.boundary = sc.boundary;
  pd.spaces = sc.spaces;
  pd.trace_flow = sc.trace_flow;
  return pd;
}

RunResult run_scenario(const Scenario& sc, const RunOptions& opt) {
  RunResult r;
  auto t0 = Clock::now();
  r.mesh = build_scenario_mesh(sc, &r.violations);
  r.timings["mesh"] = seconds_since(t0);
  for (const auto& v : r.violations)
    r.failures.push_back("conformity: " + v.kind + " #" + std::to_string(v.entity) + " " + v.detail);
  if (!r.violations.empty()) return r;

  ProblemData pd = scenario_problem(sc, r.mesh);
  AssemblyOptions ao;
  ao.threads = opt.deterministic ? 1 : 0;
  t0 = Clock::now();
  r.system = assemble_system(r.mesh, pd, ao);
  r.timings["assemble"] = seconds_since(t0);

  t0 = Clock::now();
  r.solution = solve(r.system, sc.solver);
  r.timings["solve"] = seconds_since(t0);

  t0 = Clock::now();
  project_solution(r.mesh, r.system, r.solution);
  if (sc.exact) {
    std::vector<ExactField> ex;
    for (int di = 0; di < static_cast<int>(r.mesh.domains.size()); ++di) ex.push_back(sc.exact(r.mesh, di));
    r.errors = error_norms(r.mesh, r.system, r.solution, ex);
    if (sc.exact_tolerance > 0) {
      for (const auto& e : r.errors) {
        const std::string name = r.mesh.domain_name(e.domain);
        auto check = [&](const char* what, double err, double nrm) {
          double rel = e.rel(err, nrm);
          if (!(rel <= sc.exact_tolerance))
            r.failures.push_back("error: " + name + " " + what + " relative " + std::to_string(rel));
        };
        check("pressure", e.e_p, e.n_p);
        if (e.dim > 0 && r.system.dofs.domains[e.domain].flux_count > 0) {
          check("velocity", e.e_u, e.n_u);
          check("divergence", e.e_div, e.n_div);
        }
      }
    }
  }
  r.flux = flux_report(r.mesh, r.system, r.solution);
  if (r.flux.max_element_mismatch > opt.mismatch_tolerance)
    r.failures.push_back("conservation: element mismatch " + std::to_string(r.flux.max_element_mismatch));
  if (r.flux.max_node_mismatch > opt.mismatch_tolerance)
    r.failures.push_back("conservation: domain mismatch " + std::to_string(r.flux.max_node_mismatch));
  r.timings["post"] = seconds_since(t0);

  if (!opt.output_dir.empty()) {
    namespace fs = std::filesystem;
    fs::create_directories(opt.output_dir);
    auto path = [&](const std::string& f) { return (fs::path(opt.output_dir) / f).string(); };
    if (!r.errors.empty()) {
      std::ofstream o(path("errors.csv"));
      write_error_table(o, r.mesh, r.errors);
      r.outputs.push_back(path("errors.csv"));
    }
    {
      std::ofstream o(path("flux.txt"));
      write_flux_report(o, r.flux);
      r.outputs.push_back(path("flux.txt"));
    }
    if (opt.write_vtu) {
      std::ofstream o(path("solution.vtu"));
      write_vtu(o, r.mesh, r.system, r.solution);
      r.outputs.push_back(path("solution.vtu"));
    }
    if (opt.write_matrix) {
      std::ofstream o(path("matrix.coo"));
      write_coo(o, r.system.matrix);
      r.outputs.push_back(path("matrix.coo"));
    }
    if (opt.dump_local) {
      std::ofstream o(path("local_matrices.txt"));
      for (int di = 0; di < static_cast<int>(r.mesh.domains.size()); ++di) {
        if (r.system.dofs.domains[di].flux_count == 0 || r.system.local[di].empty()) continue;
        o << "# " << r.mesh.domain_name(di) << " element 0\n";
        dump_local_matrices(o, r.system.local[di][0]);
      }
      r.outputs.push_back(path("local_matrices.txt"));
    }
    r.outputs.push_back(path("manifest.json"));
    std::ofstream o(path("manifest.json"));
    o << run_manifest(sc, r, opt) << "\n";
  }
  return r;
}

std::string run_manifest(const Scenario& sc, const RunResult& r, const RunOptions& opt) {
  nlohmann::ordered_json j;
  j["name"] = sc.name;
  std::ostringstream mesh_text;
  write_mesh(mesh_text, sc.background);
  j["input_hash"] = fnv1a(opt.input_text);
  j["mesh_hash"] = fnv1a(mesh_text.str());
  const auto& dofs = r.system.dofs;
  nlohmann::ordered_json dj;
  for (int d = 3; d >= 0; --d) {
    Index ne = 0;
    for (const auto& dm : r.mesh.domains)
      if (dm.dim == d) ne += dm.num_elements();
    dj[dim_label(d)] = {{"elements", ne}, {"flux", dofs.flux_by_dim[d]}, {"pressure", dofs.pressure_by_dim[d]}};
  }
  dj["duplicated"] = dofs.duplicated;
  dj["total"] = dofs.total;
  j["dofs"] = dj;
  j["nonzeros"] = r.system.matrix.nonZeros();
  nlohmann::ordered_json sp;
  for (int d = 3; d >= 1; --d) sp[dim_label(d)] = sc.spaces[d].name();
  j["spaces"] = sp;
  j["solver"] = {{"method", r.solution.method}, {"residual", r.solution.residual}};
  j["flux"] = {{"max_element_mismatch", r.flux.max_element_mismatch},
               {"max_node_mismatch", r.flux.max_node_mismatch},
               {"total_inflow", r.flux.total_inflow}};
  j["timings"] = r.timings;
  j["outputs"] = r.outputs;
  j["failures"] = r.failures;
  j["pass"] = r.pass();
  return j.dump(2);
}

double least_squares_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

RateTable convergence_study(const std::function<Scenario(int)>& make, const std::function<double(int)>& h,
                            int levels, const RunOptions& options) {
  if (levels < 3) throw ConfigError("a convergence study needs at least 3 levels");
  RateTable t;
  RunOptions opt = options;
  opt.output_dir.clear();
  std::vector<double> lh, lp, lu, ld;
  t.exact = true;
  for (int l = 0; l < levels; ++l) {
    Scenario sc = make(l);
    RunResult r = run_scenario(sc, opt);
    if (r.errors.empty()) throw ConfigError("convergence study needs an exact solution");
    RateRow row;
    row.level = l;
    row.h = h(l);
    row.dofs = r.system.dofs.total;
    double ep = 0, np = 0, eu = 0, nu = 0, ed = 0, nd = 0;
    for (const auto& e : r.errors) {
      ep += e.e_p * e.e_p;
      np += e.n_p * e.n_p;
      eu += e.e_u * e.e_u;
      nu += e.n_u * e.n_u;
      ed += e.e_div * e.e_div;
      nd += e.n_div * e.n_div;
    }
    auto rel = [](double e, double n) { return n > 0 ? std::sqrt(e / n) : std::sqrt(e); };
    row.e_p = rel(ep, np);
    row.e_u = rel(eu, nu);
    row.e_div = rel(ed, nd);
    if (std::max({row.e_p, row.e_u, row.e_div}) > 1e-9) t.exact = false;
    t.rows.push_back(row);
    lh.push_back(std::log(row.h));
    lp.push_back(std::log(std::max(row.e_p, 1e-300)));
    lu.push_back(std::log(std::max(row.e_u, 1e-300)));
    ld.push_back(std::log(std::max(row.e_div, 1e-300)));
  }
  t.rate_p = least_squares_slope(lh, lp);
  t.rate_u = least_squares_slope(lh, lu);
  t.rate_div = least_squares_slope(lh, ld);
  return t;
}

void write_rate_table(std::ostream& out, const RateTable& t) {
  out << "level,h,dofs,e_p,e_u,e_div\n";
  out << std::scientific << std::setprecision(6);
  for (const auto& r : t.rows)
    out << r.level << "," << r.h << "," << r.dofs << "," << r.e_p << "," << r.e_u << "," << r.e_div << "\n";
  out << std::fixed << std::setprecision(3);
  out << "# rates p " << t.rate_p << " u " << t.rate_u << " div " << t.rate_div;
  if (t.exact) out << " (exact)";
  out << "\n" << std::defaultfloat;
}

}  // namespace mvem
