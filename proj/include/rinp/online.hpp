#ifndef RINP_ONLINE_HPP
#define RINP_ONLINE_HPP

#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "rinp/common.hpp"
#include "rinp/lp.hpp"
#include "rinp/netmodel.hpp"

namespace rinp {

// Transformed routing graph: every compute node is split into an inbound and
// an outbound copy joined by a red link (consumes processing capacity) and a
// green link (plain pass-through). Non-compute nodes keep a single copy.
// Flows start at the source's outbound side and end at the destination's
// inbound side, so processing happens strictly between the endpoints.
struct SplitGraph {
  enum class LinkKind { physical, red, green };
  struct VLink {
    int id = -1;
    int src = -1, dst = -1;  // transformed node ids
    double capacity = 0.0;
    LinkKind kind = LinkKind::physical;
    int orig_link = -1;     // physical links only
    int compute_node = -1;  // red/green links only
  };

  const Network* net = nullptr;
  double ratio = 0.0;  // > 0: red capacities are N_z/ratio in traffic units
  int nodes = 0;
  std::vector<VLink> links;
  std::vector<int> in_copy, out_copy;  // original node -> transformed ids
  std::vector<int> orig_node;          // transformed -> original
  std::vector<std::vector<int>> out_adj, in_adj;
  std::vector<int> red_of;  // original node -> red link id or -1

  bool is_red(int e) const { return links[e].kind == LinkKind::red; }
  bool is_green(int e) const { return links[e].kind == LinkKind::green; }
};

// Uniform-ratio conversion: red capacity = N_z / ratio traffic units.
// Throws on ratio <= 0.
SplitGraph split_compute_nodes(const Network& net, double ratio);
// Per-demand mode: red capacity stays N_z in resource units; each demand's
// red-link coefficient is its own W_d/h_d.
SplitGraph split_compute_nodes(const Network& net);

// One admissible route in the split graph. delta holds the per-link traffic
// multiplier (1 on physical and green links, W_d/h_d on the red link in
// per-demand mode), Delta its sum. Exactly one red link when the demand has
// work, none otherwise.
struct CandidatePath {
  int id = -1;
  int demand = -1;
  std::vector<int> links;     // vlink ids in travel order
  std::vector<double> delta;  // aligned with links
  double Delta = 0.0;
  int red_link = -1;
  int hops() const { return static_cast<int>(links.size()); }
};

// Up to K shortest source->node segments composed with up to K shortest
// node->destination segments per compute node, transiting the node's red
// link; segments themselves only use physical and green links. Deduplicated,
// simple paths only, ordered by (hops, Delta, id) and capped at K * number
// of compute nodes. Zero-work demands get up to K red-free paths.
std::vector<CandidatePath> generate_candidate_paths(const SplitGraph& g,
                                                    const Demand& d, int K);

// Dual/packing state of one run. x is indexed [vlink][slot] and never
// decreases; z_d is 0 until acceptance and tau_d*h_d afterwards. tau_d is
// the number of active slots. load tracks per-slot committed traffic for
// the capacity checks and utilization reporting.
struct DualState {
  double slot_len = 1.0;
  int horizon_slots = 0;
  std::vector<std::vector<double>> x;
  std::vector<double> z;
  struct Member {  // one accepted path crossing a link
    int demand = -1;
    double h = 0.0, tau = 0.0;
    double delta = 0.0;  // this link's coefficient
    double Delta = 0.0;  // whole-path length
  };
  std::vector<std::vector<Member>> members;  // P(e) per vlink
  std::vector<std::vector<double>> load;     // [vlink][slot]
};

enum class OnlineVariant {
  violating,       // dual condition only; capacities may be exceeded
  violation_free,  // dual condition plus per-slot capacity feasibility
  baseline,        // hop-shortest candidate, capacity feasibility only
};

// Picks the first acceptable candidate and applies the bookkeeping:
// z_d = tau*h, membership, and the multiplicative x update on every path
// link and active slot. Returns the candidate index or -1 for reject.
int admit(const DynamicDemand& dd, const std::vector<CandidatePath>& cands,
          const SplitGraph& g, DualState& state, OnlineVariant variant);

// Workload model: Poisson arrivals, lognormal durations, Gaussian sizes
// truncated at one traffic unit, endpoints assigned round-robin.
struct ScenarioConfig {
  double arrival_rate = 2.0;  // flows per minute
  double duration_mu = 0.974;
  double duration_sigma = 0.5;
  double size_mean = 85.0;
  double size_std = 10.0;
  std::vector<std::pair<int, int>> pairs;
  double horizon = 30.0;   // minutes of arrivals
  int max_demands = 0;     // truncate the trace at this many flows, 0 = off
  std::uint64_t seed = 1;
  double slot_len = 1.0;
  double resource_ratio = 1.0;  // W_d = ratio * h_d
  int K = 2;
  double uniform_ratio = 0.0;  // > 0 switches the split to uniform mode
};

std::vector<DynamicDemand> generate_trace(const ScenarioConfig& sc);

struct OnlineMetrics {
  double accepted_volume = 0.0;  // sum of tau_d*h_d over accepted demands
  long accepted_count = 0;
  long rejected_count = 0;
  std::vector<double> dual_trace;  // dual objective after each arrival
  double max_step_growth = 0.0;    // max dual increase / (tau*h) per accept
  long violation_events = 0;       // link-slot pairs loaded past capacity
  double max_utilization = 0.0;    // over physical and red links and slots
};

struct OnlineResult {
  OnlineMetrics metrics;
  DualState state;
  SplitGraph graph;
  std::vector<DynamicDemand> trace;
  std::vector<int> decisions;  // candidate index per trace entry, -1 reject
};

struct OnlineOptions {
  int K = 2;
  double uniform_ratio = 0.0;
  double slot_len = 1.0;
  OnlineVariant variant = OnlineVariant::violating;
};

OnlineResult run_trace(const Network& net,
                       const std::vector<DynamicDemand>& trace,
                       const OnlineOptions& opt);
OnlineResult run_simulation(const Network& net, const ScenarioConfig& sc,
                            OnlineVariant variant);

// Exact packing optimum over the same candidate sets: pick at most one path
// per demand, respect every link-slot capacity, maximize total accepted
// tau*h. Refuses models past a size guard.
double offline_optimum(const Network& net,
                       const std::vector<DynamicDemand>& trace,
                       const OnlineOptions& opt, const SolveOptions& sopt = {});

// sum z + sum C_e x_et
double dual_objective(const DualState& state, const SplitGraph& g);

// Capacity-overload cap for one link from the accepted paths crossing it:
// W_e * log(Delta_e * (2*gamma_e + 1) + 1), zero when nothing crosses it.
double violation_bound(const DualState& state, const SplitGraph& g, int vlink);

// Committed traffic divided by capacity, ignoring time: how far past its
// capacity a link was subscribed by accepted paths.
double realized_overload(const DualState& state, const SplitGraph& g,
                         int vlink);

// line format: id src dst arrival duration size
void write_trace(const std::vector<DynamicDemand>& trace, std::ostream& os,
                 double resource_ratio);
std::vector<DynamicDemand> read_trace(std::istream& is, double resource_ratio);

}  // namespace rinp

#endif
