#ifndef RINP_TEST_ORACLES_HPP
#define RINP_TEST_ORACLES_HPP

#include <vector>

#include "rinp/lp.hpp"
#include "rinp/netmodel.hpp"
#include "rinp/online.hpp"
#include "rinp/static_solvers.hpp"

// Brute-force reference implementations for the test suite. Every oracle
// recomputes an answer from first principles over an explicitly enumerated
// search space, so agreement with a solver is evidence and not an artifact
// of shared model-building code.
namespace rinp::oracle {

// All simple paths from s to t as link-id sequences in travel order.
// Deterministic: neighbors are explored in ascending link-id order. Throws
// when more than cap paths exist.
std::vector<std::vector<int>> simple_paths(const Network& net, int s, int t,
                                           std::size_t cap = 200000);

// Exact optimum of the single-walk routing model found by enumerating stop
// sequences and simple-path segments per demand, then scanning demand
// combinations best-first under a superadditivity bound. Handles one
// resource type, at most two demands and at most two interior compute nodes
// (single-placement demands may have any number). Returns +infinity when no
// feasible routing exists.
double exact_walk_optimum(const Network& net,
                          const std::vector<Demand>& demands,
                          const FormulationOptions& opt = {});

struct LpCheck {
  bool feasible = false;
  double objective = 0.0;
};

// Exact optimum of the infinitely splittable one-stop model via a
// path-formulation LP: one column per (demand, compute stop, simple path
// pair), demand satisfaction and node/link capacity rows, tangent epigraph
// objective. Demands without work route over plain source-sink paths.
LpCheck one_stop_lp_optimum(const Network& net,
                            const std::vector<Demand>& demands,
                            const FormulationOptions& opt = {});

// LP optimum by basis enumeration: every choice of n active hyperplanes
// among rows and variable bounds is solved as a square system and the best
// feasible intersection point wins. Requires finite bounds on every
// variable so the feasible set is compact.
LpCheck vertex_enumeration_optimum(const LinearProgram& lp);

// Pure-integer optimum by full enumeration of the bound boxes. Requires
// every variable integral with finite bounds; the enumerated grid must stay
// under the guard size.
LpCheck integer_enumeration_optimum(const LinearProgram& lp);

// Exact admission packing optimum by exhaustive choice per trace entry
// (each candidate path or rejection) against per-link per-slot capacities.
// Candidate sets and capacities come from the same transformation the
// online router uses; intended for short traces.
double packing_enumeration_optimum(const Network& net,
                                   const std::vector<DynamicDemand>& trace,
                                   const OnlineOptions& opt);

}  // namespace rinp::oracle

#endif
