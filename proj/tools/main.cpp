#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "mvem/builtins.hpp"
#include "mvem/config.hpp"
#include "mvem/pipeline.hpp"

using namespace mvem;

namespace {

struct Flags {
  std::string output_dir;
  bool deterministic = false;
  double tolerance = -1.0;
  std::string element;
  int cells = 0;
  bool continuity = false;
  bool matrix = false;
  bool dump_local = false;
  bool no_vtu = false;
  int levels = 3;
};

void print_summary(const RunResult& r, std::ostream& out) {
  const auto& dofs = r.system.dofs;
  out << "dofs: total " << dofs.total << " (flux 3D/2D/1D " << dofs.flux_by_dim[3] << "/" << dofs.flux_by_dim[2]
      << "/" << dofs.flux_by_dim[1] << ", pressure 3D/2D/1D/0D " << dofs.pressure_by_dim[3] << "/"
      << dofs.pressure_by_dim[2] << "/" << dofs.pressure_by_dim[1] << "/" << dofs.pressure_by_dim[0]
      << ", duplicated " << dofs.duplicated << ")\n";
  out << "solver: " << r.solution.method << ", residual " << std::scientific << std::setprecision(3)
      << r.solution.residual << "\n";
  if (!r.errors.empty()) {
    out << "errors (relative L2):\n";
    for (const auto& e : r.errors)
      out << "  " << std::left << std::setw(4) << r.mesh.domain_name(e.domain) << std::right << " p "
          << e.rel(e.e_p, e.n_p) << "  u " << e.rel(e.e_u, e.n_u) << "  div " << e.rel(e.e_div, e.n_div) << "\n";
  }
  out << "flux: max element mismatch " << r.flux.max_element_mismatch << ", max domain mismatch "
      << r.flux.max_node_mismatch << "\n" << std::defaultfloat;
  write_flux_report(out, r.flux);
  for (const auto& f : r.failures) out << "FAIL " << f << "\n";
}

RunOptions run_options(const Flags& f, RunOptions base) {
  if (!f.output_dir.empty()) base.output_dir = f.output_dir;
  base.deterministic = base.deterministic || f.deterministic;
  base.write_matrix = base.write_matrix || f.matrix;
  base.dump_local = base.dump_local || f.dump_local;
  if (f.no_vtu) base.write_vtu = false;
  return base;
}

bool is_file(const std::string& s) { return std::filesystem::is_regular_file(s); }

int run_patch_suite(const Flags& f) {
  std::vector<ElementSpace> s3 = {ElementSpace::rt(3, 0), ElementSpace::rt(3, 1), ElementSpace::rt(3, 2),
                                  ElementSpace::bdm(3, 1), ElementSpace::bdm(3, 2)};
  const double tol = f.tolerance > 0 ? f.tolerance : 1e-9;
  bool ok = true;
  for (auto& c : patch_cases(s3, {0, 1, 2})) {
    c.scenario.exact_tolerance = tol;
    RunOptions opt = run_options(f, {});
    if (!opt.output_dir.empty()) opt.output_dir = (std::filesystem::path(opt.output_dir) / c.scenario.name).string();
    RunResult r = run_scenario(c.scenario, opt);
    double worst = 0.0;
    for (const auto& e : r.errors)
      worst = std::max({worst, e.rel(e.e_p, e.n_p), e.rel(e.e_u, e.n_u), e.rel(e.e_div, e.n_div)});
    std::cout << (r.pass() ? "PASS " : "FAIL ") << std::left << std::setw(10) << c.label << std::right
              << " max relative error " << std::scientific << std::setprecision(2) << worst << std::defaultfloat
              << "\n";
    for (const auto& m : r.failures) std::cout << "  " << m << "\n";
    ok = ok && r.pass();
  }
  return ok ? 0 : 1;
}

int print_rates(const std::string& label, const RateTable& t) {
  std::cout << label << "\n";
  write_rate_table(std::cout, t);
  return 0;
}

int run_convergence_sweep(const Flags& f) {
  const int levels = std::max(f.levels, 3);
  RunOptions opt = run_options(f, {});
  std::vector<std::string> names = f.element.empty() ? std::vector<std::string>{"RT0", "RT1"}
                                                      : std::vector<std::string>{f.element};
  for (const auto& n : names) {
    ElementSpace s = ElementSpace::parse(3, n);
    RateTable t = convergence_study([&](int l) { return convergence_problem(s, 2 << l); },
                                    [](int l) { return std::sqrt(3.0) / (2 << l); }, levels, opt);
    print_rates(n, t);
  }
  return 0;
}

int cmd_run(const std::string& target, const Flags& f) {
  LoadedConfig lc;
  if (is_file(target)) {
    lc = load_config(target);
  } else {
    lc.builtin = target;
    BuiltinOptions bo{f.element, f.cells, f.continuity};
    if (target != "patch_tests" && target != "convergence_sweep") lc.scenario = builtin_scenario(target, bo);
  }
  if (lc.builtin == "patch_tests") return run_patch_suite(f);
  if (lc.builtin == "convergence_sweep") return run_convergence_sweep(f);
  if (f.tolerance > 0) lc.scenario.exact_tolerance = f.tolerance;
  RunOptions opt = run_options(f, lc.run);
  RunResult r = run_scenario(lc.scenario, opt);
  std::cout << "scenario: " << lc.scenario.name << "\n";
  print_summary(r, std::cout);
  for (const auto& p : r.outputs) std::cout << "wrote " << p << "\n";
  std::cout << (r.pass() ? "PASS" : "FAIL") << "\n";
  return r.pass() ? 0 : 1;
}

int cmd_convergence(const std::string& target, const Flags& f) {
  if (!is_file(target)) {
    if (target == "convergence_sweep") return run_convergence_sweep(f);
    throw ConfigError("convergence expects a config file or convergence_sweep");
  }
  std::ifstream in(target);
  std::stringstream ss;
  ss << in.rdbuf();
  const std::string text = ss.str();
  std::string base = std::filesystem::path(target).parent_path().string();
  if (base.empty()) base = ".";
  LoadedConfig lc = parse_config(text, base);
  int base_cells = lc.base_cells;
  if (!lc.builtin.empty()) {
    base_cells = f.cells > 0 ? f.cells : 2;
  } else if (!lc.refinable) {
    throw ConfigError("convergence needs a box or grid mesh");
  }
  RunOptions opt = run_options(f, lc.run);
  RateTable t = convergence_study(
      [&](int l) {
        Scenario sc = config_at_resolution(text, base, base_cells << l);
        if (f.tolerance > 0) sc.exact_tolerance = f.tolerance;
        else sc.exact_tolerance = -1.0;
        return sc;
      },
      [&](int l) { return 1.0 / (base_cells << l); }, f.levels, opt);
  return print_rates(lc.scenario.name, t);
}

int cmd_validate_mesh(const std::string& path) {
  PolyMesh m = read_mesh_file(path);
  auto v = validate_polymesh(m, 1e-9 * m.extent());
  std::cout << path << ": " << m.vertices.size() << " vertices, " << m.faces.size() << " faces, " << m.cells.size()
            << " cells, volume " << m.total_volume() << "\n";
  for (const auto& x : v) std::cout << "violation " << x.kind << " #" << x.entity << " " << x.detail << "\n";
  std::cout << (v.empty() ? "PASS" : "FAIL") << "\n";
  return v.empty() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Mixed virtual element solver for Darcy flow in fractured media"};
  app.require_subcommand(1);
  Flags f;
  std::string target;

  auto add_common = [&](CLI::App* c) {
    c->add_option("--output-dir,-o", f.output_dir, "Directory for reports, VTU and manifest");
    c->add_flag("--deterministic", f.deterministic, "Single-threaded assembly for bit-identical output");
    c->add_option("--tolerance", f.tolerance, "Relative error tolerance for exact-solution checks");
    c->add_option("--element", f.element, "Element for builtins, e.g. RT4 or BDM2");
    c->add_option("--cells", f.cells, "Cells per axis for builtins");
  };

  auto* run = app.add_subcommand("run", "Run a config file or a builtin benchmark");
  run->add_option("target", target, "Config file or builtin name")->required();
  add_common(run);
  run->add_flag("--continuity", f.continuity, "problem2: infinite normal transmissivity everywhere");
  run->add_flag("--matrix", f.matrix, "Write the global matrix in COO format");
  run->add_flag("--dump-local", f.dump_local, "Write local matrices of the first element per domain");
  run->add_flag("--no-vtu", f.no_vtu, "Skip the VTU field export");

  auto* list = app.add_subcommand("list-builtins", "List builtin benchmarks");

  std::string mesh_path;
  auto* vm = app.add_subcommand("validate-mesh", "Check a polyhedral mesh file");
  vm->add_option("file", mesh_path)->required()->check(CLI::ExistingFile);

  auto* conv = app.add_subcommand("convergence", "Refinement study with observed rates");
  conv->add_option("target", target, "Config file with a manufactured solution")->required();
  conv->add_option("--levels", f.levels, "Refinement levels (at least 3)");
  add_common(conv);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*list) {
      for (const auto& n : list_builtins()) std::cout << n << "\n";
      return 0;
    }
    if (*vm) return cmd_validate_mesh(mesh_path);
    if (*run) return cmd_run(target, f);
    if (*conv) return cmd_convergence(target, f);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const GeometryError& e) {
    std::cerr << "mesh error: " << e.what() << "\n";
    return 3;
  } catch (const TopologyError& e) {
    std::cerr << "mesh error: " << e.what() << "\n";
    return 3;
  } catch (const ConformityError& e) {
    std::cerr << "mesh error: " << e.what() << "\n";
    return 3;
  } catch (const ConditioningError& e) {
    std::cerr << "local matrices: " << e.what() << "\n";
    return 4;
  } catch (const SolverError& e) {
    std::cerr << "solver: " << e.what() << "\n";
    return 5;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 6;
  }
  return 0;
}
