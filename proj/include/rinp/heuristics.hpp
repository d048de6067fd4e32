#ifndef RINP_HEURISTICS_HPP
#define RINP_HEURISTICS_HPP

#include <cstddef>
#include <utility>
#include <vector>

#include "rinp/common.hpp"
#include "rinp/netmodel.hpp"
#include "rinp/static_solvers.hpp"

namespace rinp {

// Marginal delay of pushing h more units over a link already carrying f:
// the M/M/1 difference plus propagation. Infinite once f+h reaches the
// operating cap u_max*C, which doubles as the pruning signal.
double incremental_link_cost(const Link& link, double f, double h,
                             double u_max = 0.98);

// Complete metric over the nodes one demand must visit. dist[i][j] is the
// cheapest-path cost from nodes[i] to nodes[j]; infinity marks an
// unreachable pair. Distances are directed, the matrix need not be
// symmetric.
struct OverlayInstance {
  std::vector<int> nodes;  // node ids, endpoints included
  std::vector<std::vector<double>> dist;
  int s = -1, t = -1;
};

// Visit order covering every overlay node, from s to t (or a closed tour
// s..s when s == t). Exact subset dynamic program up to 12 interior stops,
// spanning-tree doubling plus 2-opt above that. Throws std::invalid_argument
// when a required node cannot be reached.
std::vector<int> metric_tsp_path(const OverlayInstance& inst);

// Mutable routing state shared by the heuristics: per-link flow under the
// u_max*C operating cap and remaining usable compute per node and type,
// with an append-only debit log so every routing step can be audited or
// rolled back. Remaining amounts never go negative.
class CapacityLedger {
 public:
  CapacityLedger(const Network& net, double u_max);

  double u_max() const { return umax_; }
  double flow(int e) const { return flow_[e]; }
  const LinkFlowMap& flows() const { return flow_; }
  // headroom under the delay envelope, u_max*C - f
  double remaining_bandwidth(int e) const {
    return umax_ * net_->links[e].capacity - flow_[e];
  }
  double remaining_compute(int r, int v) const { return compute_[r][v]; }

  // Applies the debit and logs it; returns false (no change) when the added
  // flow would reach the operating cap or the work exceeds what is left.
  bool debit_link(int demand, int e, double h);
  bool debit_compute(int demand, int r, int v, double w);

  struct Mark {
    size_t entries = 0;
  };
  Mark mark() const { return {log_.size()}; }
  void rollback(Mark m);  // undo every debit logged after the mark

  struct Entry {
    int demand = -1;
    bool is_link = false;
    int type = 0;   // resource type for compute entries
    int index = 0;  // link id or node id
    double amount = 0.0;
  };
  const std::vector<Entry>& entries() const { return log_; }

 private:
  const Network* net_;
  double umax_;
  LinkFlowMap flow_;
  std::vector<std::vector<double>> compute_;
  std::vector<Entry> log_;
};

// One routed (sub)flow: the link walk in travel order and the processing
// stops with the amount of work placed on each.
struct HeuristicRoute {
  int demand = -1;
  double volume = 0.0;
  std::vector<int> links;
  std::vector<std::pair<int, double>> stops;  // node id, processed amount
};

// Heuristics evaluate their own routes: flows come from the ledger, both
// delay readings are over the same flows. Scaling is ignored; every route
// carries its full volume end to end. unrouted lists one demand id per
// failed routing attempt.
struct HeuristicSolution {
  std::vector<HeuristicRoute> routes;
  std::vector<int> unrouted;
  LinkFlowMap flows;
  double delay_pwl = std::numeric_limits<double>::quiet_NaN();
  double delay_mm1 = std::numeric_limits<double>::quiet_NaN();
};

// Non-splittable routing, largest demand first: one splittable-relaxation
// solve fixes the per-node processing amounts, then each demand's stop set
// is ordered by metric_tsp_path over incremental-cost distances and mapped
// back to underlay shortest paths. Links whose remaining bandwidth is below
// h/u_max are pruned from the overlay. A demand whose debits cannot all be
// applied is rolled back and reported unrouted.
HeuristicSolution sr_tsp(const Network& net, const std::vector<Demand>& demands,
                         const FormulationOptions& opt = {});

// k-split routing: k equal subflows per demand, processed in decreasing
// volume; each takes the cheapest two-segment path through a node whose
// remaining compute covers the subflow's work (within LP tolerance).
// Subflows of one demand that end up on the identical path and stop are
// merged into one reported route.
HeuristicSolution sr_iteration(const Network& net,
                               const std::vector<Demand>& demands, int k,
                               const FormulationOptions& opt = {});

// Baseline: demands in input order, nearest compute node with enough
// remaining capacity by current incremental cost, then the cheapest path
// onward.
HeuristicSolution greedy_nearest_baseline(const Network& net,
                                          const std::vector<Demand>& demands,
                                          const FormulationOptions& opt = {});

}  // namespace rinp

#endif
