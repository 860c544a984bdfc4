#ifndef MVEM_PIPELINE_HPP_
#define MVEM_PIPELINE_HPP_

#include <array>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "mvem/assembly.hpp"
#include "mvem/cutting.hpp"
#include "mvem/mixed_mesh.hpp"
#include "mvem/solve.hpp"

namespace mvem {

// A fully specified problem. Domain data, boundary rule and exact fields are resolved
// against the mixed mesh because domain numbering is only known after cutting.
struct Scenario {
  std::string name;
  PolyMesh background;
  std::vector<FracturePolygon> fractures;
  CutOptions cut;
  int max_dim = 3;
  std::array<ElementSpace, 4> spaces{ElementSpace::rt(1, 0), ElementSpace::rt(1, 0), ElementSpace::rt(2, 0),
                                     ElementSpace::rt(3, 0)};
  bool trace_flow = true;
  std::function<DomainData(const MixedMesh&, int domain)> domain_data;
  BoundaryRule boundary;
  std::function<ExactField(const MixedMesh&, int domain)> exact;  // optional
  double exact_tolerance = -1.0;  // > 0: every relative error must stay below it
  SolveOptions solver;
};

struct RunOptions {
  std::string output_dir;  // empty: nothing written
  bool deterministic = false;
  bool write_vtu = true;
  bool write_matrix = false;
  bool dump_local = false;  // per-element matrices of the first element of every domain
  double mismatch_tolerance = 1e-9;
  std::string input_text;  // hashed into the manifest
};

struct RunResult {
  MixedMesh mesh;
  GlobalSystem system;
  DiscreteSolution solution;
  std::vector<Violation> violations;
  std::vector<DomainErrors> errors;
  FluxReport flux;
  std::map<std::string, double> timings;
  std::vector<std::string> outputs;
  std::vector<std::string> failures;  // validator messages
  bool pass() const { return failures.empty(); }
};

MixedMesh build_scenario_mesh(const Scenario& sc, std::vector<Violation>* violations = nullptr);
ProblemData scenario_problem(const Scenario& sc, const MixedMesh& mesh);
RunResult run_scenario(const Scenario& sc, const RunOptions& options = {});

// manifest as JSON text
std::string run_manifest(const Scenario& sc, const RunResult& r, const RunOptions& options);

struct RateRow {
  int level = 0;
  double h = 0.0;
  Index dofs = 0;
  double e_p = 0.0, e_u = 0.0, e_div = 0.0;  // relative, aggregated over domains
};

struct RateTable {
  std::vector<RateRow> rows;
  double rate_p = 0.0, rate_u = 0.0, rate_div = 0.0;  // least-squares slopes of log e vs log h
  bool exact = false;                                  // all errors at round-off level
};

// make(level) builds the scenario for a refinement level; h(level) its mesh size.
RateTable convergence_study(const std::function<Scenario(int)>& make, const std::function<double(int)>& h,
                            int levels, const RunOptions& options = {});
void write_rate_table(std::ostream& out, const RateTable& t);

double least_squares_slope(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace mvem

#endif
