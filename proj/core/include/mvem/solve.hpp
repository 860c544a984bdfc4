#ifndef MVEM_SOLVE_HPP_
#define MVEM_SOLVE_HPP_

#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "mvem/assembly.hpp"

namespace mvem {

struct SolveOptions {
  double tolerance = 1e-10;   // relative residual
  Index direct_limit = 500000;  // larger systems go to the iterative solver
  int max_iterations = 5000;
};

struct DiscreteSolution {
  Vector x;
  double residual = 0.0;  // ||Ax - b|| / ||b||
  std::string method;
  // per domain per element
  std::vector<std::vector<Vector>> velocity;    // canonical coefficients of the projected velocity
  std::vector<std::vector<Vector>> pressure;    // pressure coefficients
  std::vector<std::vector<Vector>> divergence;  // divergence coefficients on the pressure basis
};

// Throws SingularSystemError when a coupled group of domains has no Dirichlet data
// or the factorization breaks down.
DiscreteSolution solve(const GlobalSystem& system, const SolveOptions& options = {});

// Fills the per-element tables of `solution` from its DOF vector.
void project_solution(const MixedMesh& mesh, const GlobalSystem& system, DiscreteSolution& solution);

// global-coordinate velocity / pressure of element e at a global point
Vec3 velocity_at(const MixedMesh& mesh, const GlobalSystem& system, const DiscreteSolution& s, int domain, Index e,
                 const Vec3& x);
double pressure_at(const MixedMesh& mesh, const GlobalSystem& system, const DiscreteSolution& s, int domain, Index e,
                   const Vec3& x);

struct ExactField {
  ScalarField pressure;
  std::function<Vec3(const Vec3&)> velocity;  // global vector; tangential part is used on lower domains
  ScalarField divergence;                     // tangential divergence on the domain
};

struct DomainErrors {
  int domain = 0, dim = 0, index = 0;
  double e_p = 0.0, e_u = 0.0, e_div = 0.0;  // absolute L2
  double n_p = 0.0, n_u = 0.0, n_div = 0.0;  // L2 norms of the exact fields
  double rel(double e, double n) const { return n > 0.0 ? e / n : e; }
};

// exact: one entry per domain
std::vector<DomainErrors> error_norms(const MixedMesh& mesh, const GlobalSystem& system,
                                      const DiscreteSolution& solution, const std::vector<ExactField>& exact);

void write_error_table(std::ostream& out, const MixedMesh& mesh, const std::vector<DomainErrors>& errors);

struct FluxEdge {
  std::string source, target;
  double value = 0.0;
};

struct FluxReport {
  std::vector<FluxEdge> edges;
  std::vector<double> boundary_in, boundary_out, source;  // per domain
  std::vector<double> node_mismatch;                       // per domain, relative
  double max_node_mismatch = 0.0;
  double max_element_mismatch = 0.0;  // relative to the largest flux magnitude
  double total_inflow = 0.0;          // sum of boundary inflow over all domains

  // flux from a to b (negative if it runs the other way); 0 when there is no edge
  double between(const std::string& a, const std::string& b) const;
};

FluxReport flux_report(const MixedMesh& mesh, const GlobalSystem& system, const DiscreteSolution& solution);
void write_flux_report(std::ostream& out, const FluxReport& report);

// Mean |p_side - p_lower| over the interface between `lower` and its higher neighbours.
double interface_pressure_jump(const MixedMesh& mesh, const GlobalSystem& system, const DiscreteSolution& solution,
                               int lower);

// XML unstructured grid with cell pressure and projected velocity at centroids.
void write_vtu(std::ostream& out, const MixedMesh& mesh, const GlobalSystem& system, const DiscreteSolution& solution);

}  // namespace mvem

#endif
