#include "rinp/netmodel.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <numeric>
#include <sstream>

namespace rinp {

void Network::finalize() {
  out_.assign(nodes.size(), {});
  in_.assign(nodes.size(), {});
  for (size_t i = 0; i < nodes.size(); ++i) {
    if (nodes[i].id != static_cast<int>(i))
      throw std::invalid_argument("node ids must be dense 0..N-1");
    if (nodes[i].compute.size() != resource_types.size())
      throw std::invalid_argument("node compute vector does not match resource types");
  }
  for (size_t i = 0; i < links.size(); ++i) {
    const Link& e = links[i];
    if (e.id != static_cast<int>(i))
      throw std::invalid_argument("link ids must be dense 0..E-1");
    if (e.src < 0 || e.src >= node_count() || e.dst < 0 || e.dst >= node_count())
      throw std::invalid_argument("link endpoint out of range");
    out_[e.src].push_back(e.id);
    in_[e.dst].push_back(e.id);
  }
  finalized_ = true;
}

std::vector<int> Network::compute_nodes(int type) const {
  std::vector<int> out;
  for (const Node& n : nodes)
    if (n.compute[type] > 0.0) out.push_back(n.id);
  return out;
}

double Demand::total_work() const {
  return std::accumulate(work.begin(), work.end(), 0.0);
}

std::vector<int> DynamicDemand::active_slots(double slot_len) const {
  std::vector<int> slots;
  if (duration <= 0.0) return slots;
  int first = static_cast<int>(std::floor(start / slot_len));
  // finish() itself is exclusive
  int last = static_cast<int>(std::ceil(finish() / slot_len)) - 1;
  for (int t = first; t <= last; ++t) slots.push_back(t);
  return slots;
}

void DelayModel::validate() const {
  if (breakpoints.empty()) throw std::invalid_argument("delay model needs breakpoints");
  for (size_t i = 0; i + 1 < breakpoints.size(); ++i)
    if (breakpoints[i] >= breakpoints[i + 1])
      throw std::invalid_argument("breakpoints must be strictly increasing");
  if (breakpoints.front() < 0.0 || breakpoints.back() >= 1.0)
    throw std::invalid_argument("breakpoints must lie in [0, 1)");
}

double mm1_delay(const Network& net, const LinkFlowMap& flows) {
  double total = 0.0;
  for (const Link& e : net.links) {
    double f = flows[e.id];
    if (f < 0.0) throw std::invalid_argument("negative link flow");
    if (f >= e.capacity) {
      std::ostringstream os;
      os << "link " << e.id << " saturated: f=" << f << " C=" << e.capacity;
      throw SaturatedLinkError(os.str());
    }
    total += f / (e.capacity - f) + e.prop_delay * f;
  }
  return total;
}

double pwl_link_delay(double capacity, double f, const DelayModel& model) {
  // tangent of g(x)=x/(C-x) at x0=u*C: g(x0) + g'(x0)(x-x0),
  // g(x0)=u/(1-u), g'(x0)=1/(C(1-u)^2)
  double best = 0.0;
  for (double u : model.breakpoints) {
    double denom = 1.0 - u;
    double val = u / denom + (f - u * capacity) / (capacity * denom * denom);
    best = std::max(best, val);
  }
  return best;
}

double pwl_delay(const Network& net, const LinkFlowMap& flows,
                 const DelayModel& model) {
  model.validate();
  double total = 0.0;
  for (const Link& e : net.links) {
    double f = flows[e.id];
    if (f < 0.0) throw std::invalid_argument("negative link flow");
    if (f > model.u_max() * e.capacity * (1.0 + 1e-12)) {
      std::ostringstream os;
      os << "link " << e.id << " outside envelope: f=" << f
         << " u_max*C=" << model.u_max() * e.capacity;
      throw SaturatedLinkError(os.str());
    }
    total += pwl_link_delay(e.capacity, f, model) + e.prop_delay * f;
  }
  return total;
}

bool Diagnostics::ok() const {
  for (const auto& d : items)
    if (d.severity == DiagSeverity::error) return false;
  return true;
}

std::string Diagnostics::summary() const {
  std::ostringstream os;
  for (const auto& d : items) {
    switch (d.severity) {
      case DiagSeverity::error: os << "error"; break;
      case DiagSeverity::warning: os << "warning"; break;
      case DiagSeverity::info: os << "info"; break;
    }
    os << " [" << d.code << "] " << d.message << "\n";
  }
  return os.str();
}

namespace {

// reachability over link records without requiring finalize()
std::vector<bool> reachable_from(const Network& net, int src) {
  std::vector<std::vector<int>> adj(net.nodes.size());
  for (const Link& e : net.links)
    if (e.src >= 0 && e.src < net.node_count() && e.dst >= 0 &&
        e.dst < net.node_count() && e.capacity > 0.0)
      adj[e.src].push_back(e.dst);
  std::vector<bool> seen(net.nodes.size(), false);
  if (src < 0 || src >= net.node_count()) return seen;
  std::deque<int> q{src};
  seen[src] = true;
  while (!q.empty()) {
    int v = q.front();
    q.pop_front();
    for (int w : adj[v])
      if (!seen[w]) {
        seen[w] = true;
        q.push_back(w);
      }
  }
  return seen;
}

}  // namespace

Diagnostics validate_network(const Network& net,
                             const std::vector<Demand>& demands) {
  Diagnostics diag;
  auto err = [&](const std::string& code, const std::string& msg) {
    diag.items.push_back({DiagSeverity::error, code, msg});
  };
  auto info = [&](const std::string& code, const std::string& msg) {
    diag.items.push_back({DiagSeverity::info, code, msg});
  };

  size_t ntypes = net.resource_types.size();
  if (net.utilization_bound.size() != ntypes)
    err("rho-size", "utilization_bound size does not match resource types");
  for (size_t r = 0; r < net.utilization_bound.size(); ++r)
    if (!(net.utilization_bound[r] > 0.0 && net.utilization_bound[r] <= 1.0))
      err("rho-range", "utilization bound for type " + std::to_string(r) +
                           " outside (0,1]");

  for (size_t i = 0; i < net.nodes.size(); ++i) {
    const Node& n = net.nodes[i];
    if (n.id != static_cast<int>(i))
      err("node-id", "node at position " + std::to_string(i) + " has id " +
                         std::to_string(n.id));
    if (n.compute.size() != ntypes)
      err("node-compute", "node " + std::to_string(n.id) +
                              " compute vector size mismatch");
    for (double c : n.compute)
      if (c < 0.0)
        err("node-capacity", "node " + std::to_string(n.id) +
                                 " has negative compute capacity");
  }
  for (size_t i = 0; i < net.links.size(); ++i) {
    const Link& e = net.links[i];
    std::string tag = "link " + std::to_string(e.id);
    if (e.id != static_cast<int>(i))
      err("link-id", "link at position " + std::to_string(i) + " has id " +
                         std::to_string(e.id));
    if (e.src < 0 || e.src >= net.node_count() || e.dst < 0 ||
        e.dst >= net.node_count())
      err("link-endpoint", tag + " references missing node");
    else if (e.src == e.dst)
      err("link-self-loop", tag + " is a self-loop");
    if (e.capacity <= 0.0) err("link-capacity", tag + " capacity not positive");
    if (e.prop_delay < 0.0) err("link-delay", tag + " negative delay");
  }

  std::vector<double> total_work(ntypes, 0.0), total_cap(ntypes, 0.0);
  for (const Node& n : net.nodes)
    for (size_t r = 0; r < std::min(ntypes, n.compute.size()); ++r)
      total_cap[r] += n.compute[r];

  for (const Demand& d : demands) {
    std::string tag = "demand " + std::to_string(d.id);
    if (d.src < 0 || d.src >= net.node_count() || d.dst < 0 ||
        d.dst >= net.node_count()) {
      err("demand-endpoint", tag + " references missing node");
      continue;
    }
    if (d.src == d.dst) err("demand-endpoint", tag + " has src == dst");
    if (d.volume <= 0.0) err("demand-volume", tag + " volume not positive");
    if (d.scale <= 0.0) err("demand-scale", tag + " scale factor not positive");
    if (d.split_limit < 0) err("demand-split", tag + " negative split limit");
    if (d.work.size() != ntypes)
      err("demand-work", tag + " work vector size mismatch");
    for (size_t r = 0; r < std::min(ntypes, d.work.size()); ++r) {
      if (d.work[r] < 0.0) err("demand-work", tag + " negative work");
      else total_work[r] += d.work[r];
    }
    auto seen = reachable_from(net, d.src);
    if (d.dst >= 0 && d.dst < net.node_count() && !seen[d.dst])
      err("demand-unreachable", tag + " destination unreachable from source");
  }

  for (size_t r = 0; r < ntypes; ++r) {
    std::ostringstream os;
    os << "type " << net.resource_types[r] << ": total demand " << total_work[r]
       << " vs usable capacity " << total_cap[r] * net.utilization_bound[r];
    if (total_work[r] > total_cap[r] * net.utilization_bound[r])
      err("compute-shortfall", os.str());
    else
      info("compute-budget", os.str());
  }
  return diag;
}

std::vector<double> flow_conservation_residual(const Network& net,
                                               const LinkFlowMap& flows) {
  std::vector<double> res(net.nodes.size(), 0.0);
  for (const Link& e : net.links) {
    res[e.src] += flows[e.id];
    res[e.dst] -= flows[e.id];
  }
  return res;
}

}  // namespace rinp
