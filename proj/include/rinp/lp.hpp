#ifndef RINP_LP_HPP
#define RINP_LP_HPP

#include <cstdint>
#include <iosfwd>
#include <limits>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "rinp/common.hpp"

namespace rinp {

enum class Relation { le, eq, ge };
enum class ObjSense { minimize, maximize };

enum class SolveStatus {
  optimal,
  infeasible,
  unbounded,
  iteration_limit,
  node_limit,
};

const char* to_string(SolveStatus s);

// Row/column LP-MIP container. Variables carry bounds and an integrality
// flag; rows are sparse coefficient lists against a relation and rhs.
struct LinearProgram {
  struct Var {
    double lb = 0.0;
    double ub = std::numeric_limits<double>::infinity();
    bool integer = false;
    std::string name;
  };
  struct Row {
    std::vector<std::pair<int, double>> coef;
    Relation rel = Relation::le;
    double rhs = 0.0;
    std::string name;
  };

  std::vector<Var> vars;
  std::vector<Row> rows;
  std::vector<double> obj;  // dense, aligned with vars
  ObjSense sense = ObjSense::minimize;

  int add_var(const std::string& name, double lb, double ub,
              bool integer = false);
  int add_row(std::vector<std::pair<int, double>> coef, Relation rel,
              double rhs, const std::string& name = "");
  void set_obj(int var, double coeff);
  void add_obj(int var, double coeff);
  // index of a named variable; -1 if absent
  int find_var(const std::string& name) const;
  bool has_integers() const;

 private:
  std::unordered_map<std::string, int> var_index_;
};

struct SolveOptions {
  double feas_tol = 1e-9;       // primal feasibility
  double opt_tol = 1e-9;        // reduced-cost threshold
  double int_tol = 1e-6;        // integrality rounding
  double gap_tol = 1e-6;        // relative MIP gap
  long max_iterations = 2000000;
  long max_nodes = 500000;
  int stall_limit = 300;        // degenerate pivots before Bland's rule
  // known feasible objective (in the problem's own sense) used to prune
  // branch-and-bound from the start; NaN = none
  double initial_incumbent = std::numeric_limits<double>::quiet_NaN();
  // full feasible point handed to branch-and-bound as its first incumbent;
  // verified against bounds, rows and integrality before use, ignored if
  // empty or infeasible
  std::vector<double> initial_solution;
};

struct LpSolution {
  SolveStatus status = SolveStatus::infeasible;
  double objective = 0.0;
  std::vector<double> x;
  std::vector<double> duals;          // per row, zero-filled for MIPs
  std::vector<double> reduced_costs;  // per var, zero-filled for MIPs
  double best_bound = std::numeric_limits<double>::quiet_NaN();  // MIP only
  double mip_gap = std::numeric_limits<double>::quiet_NaN();     // MIP only
  long iterations = 0;
  long nodes = 0;
};

// Dense-inverse revised simplex with bounded variables, two-phase start and
// Bland's-rule stall fallback. Deterministic for a fixed input.
LpSolution solve_lp(const LinearProgram& lp, const SolveOptions& opt = {});

// Same engine with externally supplied variable bounds replacing the ones
// stored in the program. Branch and bound uses this to explore nodes without
// copying the constraint matrix.
LpSolution solve_lp_bounded(const LinearProgram& lp,
                            const std::vector<double>& lb,
                            const std::vector<double>& ub,
                            const SolveOptions& opt = {});

// Branch and bound over solve_lp: most-fractional branching, depth-first
// dive until an incumbent exists, then best-bound node selection.
LpSolution solve_mip(const LinearProgram& lp, const SolveOptions& opt = {});

// CPLEX LP-format text export for cross-checking with external solvers.
void write_lp_format(const LinearProgram& lp, std::ostream& os);

}  // namespace rinp

#endif
