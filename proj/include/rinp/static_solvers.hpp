#ifndef RINP_STATIC_SOLVERS_HPP
#define RINP_STATIC_SOLVERS_HPP

#include <string>
#include <vector>

#include "rinp/lp.hpp"
#include "rinp/netmodel.hpp"

namespace rinp {

// One processing stage of an ordered service chain: which resource type the
// stage consumes and the per-stage output/input volume ratio. The demand's
// own scale factor applies at the last stage on top of the stage ratio, so a
// single-stage chain matches the plain two-segment model.
struct ChainStage {
  std::string resource;
  double scale = 1.0;
};

struct FormulationOptions {
  DelayModel delay = DelayModel::default_pwl();
  bool aggregate_second_segment = false;  // destination-indexed post flows
  bool apply_scale = true;                // honor Demand::scale
  double provision_budget = 0.0;          // > 0: node capacities become vars
  std::vector<ChainStage> chain;          // empty: single universal stage
  bool include_propagation = false;       // add prop_delay * f_e to objective
  SolveOptions solver;
};

// Integral single-walk routing result. Vectors are indexed [resource][link]
// or [resource][node]; u/eps by link id.
struct DemandWalk {
  int demand = -1;                       // original demand id
  std::vector<int> u;                    // traversal count per link
  std::vector<uint8_t> eps;              // 1 iff the walk uses the link
  std::vector<std::vector<double>> y;    // unprocessed demand flow
  std::vector<std::vector<double>> w;    // processed amount per node
  std::vector<int> walk;                 // ordered link ids, src to dst
  double volume = 0.0;                   // traffic carried (h or h/k)
};

struct WalkSolution {
  SolveStatus status = SolveStatus::infeasible;
  double objective = std::numeric_limits<double>::quiet_NaN();
  std::vector<DemandWalk> walks;  // one per demand, or k per demand (k-split)
  LinkFlowMap flows;
  std::string infeasible_cause;  // connectivity | bandwidth | compute
  long nodes = 0;                // branch-and-bound nodes
  long lp_vars = 0, lp_rows = 0;
};

// Fractional segment-routing result. seg1/seg2 are [demand][box][link] and
// only populated in the flow-based universal mode; eta is [dest][link] in
// aggregated mode; stage_arrivals is [demand][stage][node] for chains.
struct SplitSolution {
  SolveStatus status = SolveStatus::infeasible;
  double objective = std::numeric_limits<double>::quiet_NaN();
  std::vector<std::vector<double>> shares;  // h_d^z per [demand][node]
  std::vector<std::vector<std::vector<double>>> seg1, seg2;
  std::vector<std::vector<double>> eta;
  std::vector<std::vector<std::vector<double>>> stage_arrivals;
  std::vector<double> provisioned;  // chosen N_z when provisioning
  LinkFlowMap flows;
  std::string infeasible_cause;
  long lp_vars = 0, lp_rows = 0;
};

// Exact single-path (walk) routing with in-network processing: integer link
// traversal counts, processing split over visited interior nodes, linearized
// congestion objective. Demands with mode single_node must place all work of
// a type on one visited node.
WalkSolution solve_mip_rinp(const Network& net, const std::vector<Demand>& demands,
                            const FormulationOptions& opt = {});

// k-split variant: every demand is replaced by k equal subflows (volume h/k,
// work W/k) routed jointly as independent non-splittable flows. walks holds
// k entries per demand, grouped in input order.
WalkSolution solve_mip_k(const Network& net, const std::vector<Demand>& demands,
                         int k, const FormulationOptions& opt = {});

// Infinitely splittable segment routing: per-box traffic shares with
// proportional work allocation, two flow segments per share (or chain
// stages), optional destination aggregation, scaling and provisioning.
SplitSolution solve_sr_infinite(const Network& net,
                                const std::vector<Demand>& demands,
                                const FormulationOptions& opt = {});

// Water-filling allocation baseline: biggest work to the most powerful node,
// then routing-only LP with the shares frozen. infeasible_cause
// "frozen-allocation" marks failures introduced by the greedy fixing.
SplitSolution greedy_alloc_baseline(const Network& net,
                                    const std::vector<Demand>& demands,
                                    const FormulationOptions& opt = {});

// Orders a balanced traversal-count vector into one connected walk from s to
// t using every link e exactly u[e] times (lowest link id first). Throws
// std::invalid_argument when u is unbalanced or its support is disconnected.
std::vector<int> extract_walk(const Network& net, const std::vector<int>& u,
                              int s, int t);

struct OneStopPath {
  std::vector<int> links;  // same link sequence as the input walk
  int stop = -1;           // node doing the processing
  double traffic = 0.0;    // f * w_i / w
  double work = 0.0;       // w_i
};

// Splits an n-stop walk into n single-stop walks carrying proportional
// traffic. allocations maps node id to processed amount; total must be > 0.
std::vector<OneStopPath> decompose_to_one_stop(
    const std::vector<int>& walk, double traffic,
    const std::vector<std::pair<int, double>>& allocations);

// Staged infeasibility probe shared by the solvers: reports "connectivity"
// when some demand cannot reach a usable processing node and its sink,
// "compute" when work exceeds usable capacity, "bandwidth" otherwise.
std::string diagnose_infeasibility(const Network& net,
                                   const std::vector<Demand>& demands,
                                   const FormulationOptions& opt);

}  // namespace rinp

#endif
