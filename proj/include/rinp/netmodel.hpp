#ifndef RINP_NETMODEL_HPP
#define RINP_NETMODEL_HPP

#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "rinp/common.hpp"

namespace rinp {

struct Node {
  int id = -1;            // dense: equals position in Network::nodes
  std::string label;      // external name, kept for file round-trips
  std::vector<double> compute;  // capacity per resource type, resource units
};

struct Link {
  int id = -1;            // dense: equals position in Network::links
  int src = -1;
  int dst = -1;
  double capacity = 0.0;  // traffic units
  double prop_delay = 0.0;
};

// Directed network with typed per-node compute capacities. Immutable after
// finalize(); solvers index nodes/links by their dense ids.
struct Network {
  std::string name;
  std::vector<std::string> resource_types;
  std::vector<double> utilization_bound;  // rho_r per type, in (0,1]
  std::vector<Node> nodes;
  std::vector<Link> links;

  void finalize();
  bool finalized() const { return finalized_; }

  const std::vector<int>& out_links(int v) const { return out_[v]; }
  const std::vector<int>& in_links(int v) const { return in_[v]; }
  int node_count() const { return static_cast<int>(nodes.size()); }
  int link_count() const { return static_cast<int>(links.size()); }
  int resource_count() const { return static_cast<int>(resource_types.size()); }

  // usable capacity rho_r * N_v^r
  double usable_compute(int type, int v) const {
    return utilization_bound[type] * nodes[v].compute[type];
  }
  bool is_compute(int type, int v) const { return nodes[v].compute[type] > 0.0; }
  std::vector<int> compute_nodes(int type) const;

 private:
  bool finalized_ = false;
  std::vector<std::vector<int>> out_, in_;
};

enum class ProcessingMode { splittable, single_node };

struct Demand {
  int id = -1;
  int src = -1;
  int dst = -1;
  double volume = 0.0;          // h_d, traffic units
  std::vector<double> work;     // W_d^r per resource type
  double scale = 1.0;           // post-processing volume ratio
  int split_limit = 0;          // 0 = unbounded
  ProcessingMode mode = ProcessingMode::splittable;

  double total_work() const;
};

struct DynamicDemand {
  Demand demand;
  double start = 0.0;     // arrival time
  double duration = 0.0;  // > 0
  double finish() const { return start + duration; }
  // slots whose [t*slot_len, (t+1)*slot_len) window overlaps [start, finish)
  std::vector<int> active_slots(double slot_len) const;
};

// Congestion delay model. The piecewise-linear form is the max over tangents
// of f/(C-f) taken at the breakpoint utilizations; it never exceeds the M/M/1
// curve and touches it at every breakpoint. The last breakpoint is u_max.
struct DelayModel {
  enum class Kind { mm1, piecewise };
  Kind kind = Kind::piecewise;
  std::vector<double> breakpoints = {0.0, 0.5, 0.75, 0.9, 0.95, 0.98};

  double u_max() const { return breakpoints.back(); }
  static DelayModel mm1() { return DelayModel{Kind::mm1, {0.0, 0.98}}; }
  static DelayModel default_pwl() { return DelayModel{}; }
  void validate() const;
};

using LinkFlowMap = std::vector<double>;  // f_e per link id

struct SaturatedLinkError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Total M/M/1 congestion delay sum_e f/(C-f), plus sum_e prop_e * f_e where
// propagation delays are set. Throws SaturatedLinkError if any f_e >= C_e.
double mm1_delay(const Network& net, const LinkFlowMap& flows);

// Piecewise-linear envelope delay; equals mm1_delay at breakpoint loads and
// never exceeds it. Throws SaturatedLinkError when f_e > u_max * C_e.
double pwl_delay(const Network& net, const LinkFlowMap& flows,
                 const DelayModel& model);

// Envelope value for one link at load f (congestion term only).
double pwl_link_delay(double capacity, double f, const DelayModel& model);

enum class DiagSeverity { error, warning, info };

struct Diagnostic {
  DiagSeverity severity = DiagSeverity::error;
  std::string code;
  std::string message;
};

struct Diagnostics {
  std::vector<Diagnostic> items;
  bool ok() const;  // no error-severity items
  std::string summary() const;
};

// Structural and feasibility screening: malformed records, unreachable
// demand pairs, aggregate compute vs. demand per resource type. Pure; never
// throws on malformed input.
Diagnostics validate_network(const Network& net,
                             const std::vector<Demand>& demands);

// residual(v) = sum_{e out of v} x_e - sum_{e into v} x_e
std::vector<double> flow_conservation_residual(const Network& net,
                                               const LinkFlowMap& flows);

}  // namespace rinp

#endif
