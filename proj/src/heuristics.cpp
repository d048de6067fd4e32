#include "rinp/heuristics.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <queue>
#include <stdexcept>
#include <tuple>

namespace rinp {

double incremental_link_cost(const Link& link, double f, double h,
                             double u_max) {
  if (h <= 0.0) throw std::invalid_argument("added flow must be > 0");
  if (f + h >= u_max * link.capacity) return kInf;
  return (f + h) / (link.capacity - f - h) - f / (link.capacity - f) +
         link.prop_delay * h;
}

CapacityLedger::CapacityLedger(const Network& net, double u_max)
    : net_(&net), umax_(u_max) {
  if (!net.finalized()) throw std::invalid_argument("network not finalized");
  flow_.assign(net.link_count(), 0.0);
  compute_.assign(net.resource_count(),
                  std::vector<double>(net.node_count(), 0.0));
  for (int r = 0; r < net.resource_count(); ++r)
    for (int v = 0; v < net.node_count(); ++v)
      compute_[r][v] = net.usable_compute(r, v);
}

bool CapacityLedger::debit_link(int demand, int e, double h) {
  if (h <= 0.0) throw std::invalid_argument("link debit must be > 0");
  if (flow_[e] + h >= umax_ * net_->links[e].capacity) return false;
  flow_[e] += h;
  log_.push_back({demand, true, 0, e, h});
  return true;
}

bool CapacityLedger::debit_compute(int demand, int r, int v, double w) {
  if (w <= 0.0) throw std::invalid_argument("compute debit must be > 0");
  double rem = compute_[r][v];
  if (w > rem + 1e-6) return false;
  double applied = std::min(w, rem);  // clamp LP dust, keep the rest exact
  compute_[r][v] = rem - applied;
  log_.push_back({demand, false, r, v, applied});
  return true;
}

void CapacityLedger::rollback(Mark m) {
  while (log_.size() > m.entries) {
    const Entry& e = log_.back();
    if (e.is_link)
      flow_[e.index] -= e.amount;
    else
      compute_[e.type][e.index] += e.amount;
    log_.pop_back();
  }
}

namespace {

struct PathTree {
  std::vector<double> dist;
  std::vector<int> via;  // link into the node (forward) or out of it (reverse)
};

using PqItem = std::pair<double, int>;

PathTree shortest_from(const Network& net, const CapacityLedger& led, double h,
                       int src, double prune_below) {
  PathTree t;
  t.dist.assign(net.node_count(), kInf);
  t.via.assign(net.node_count(), -1);
  t.dist[src] = 0.0;
  std::priority_queue<PqItem, std::vector<PqItem>, std::greater<>> pq;
  pq.push({0.0, src});
  while (!pq.empty()) {
    auto [dv, v] = pq.top();
    pq.pop();
    if (dv > t.dist[v]) continue;
    for (int e : net.out_links(v)) {
      if (prune_below > 0.0 && led.remaining_bandwidth(e) < prune_below)
        continue;
      double c = incremental_link_cost(net.links[e], led.flow(e), h,
                                       led.u_max());
      if (c == kInf) continue;
      int w = net.links[e].dst;
      if (dv + c < t.dist[w]) {
        t.dist[w] = dv + c;
        t.via[w] = e;
        pq.push({t.dist[w], w});
      }
    }
  }
  return t;
}

PathTree shortest_to(const Network& net, const CapacityLedger& led, double h,
                     int dst, double prune_below) {
  PathTree t;
  t.dist.assign(net.node_count(), kInf);
  t.via.assign(net.node_count(), -1);
  t.dist[dst] = 0.0;
  std::priority_queue<PqItem, std::vector<PqItem>, std::greater<>> pq;
  pq.push({0.0, dst});
  while (!pq.empty()) {
    auto [dv, v] = pq.top();
    pq.pop();
    if (dv > t.dist[v]) continue;
    for (int e : net.in_links(v)) {
      if (prune_below > 0.0 && led.remaining_bandwidth(e) < prune_below)
        continue;
      double c = incremental_link_cost(net.links[e], led.flow(e), h,
                                       led.u_max());
      if (c == kInf) continue;
      int w = net.links[e].src;
      if (dv + c < t.dist[w]) {
        t.dist[w] = dv + c;
        t.via[w] = e;
        pq.push({t.dist[w], w});
      }
    }
  }
  return t;
}

std::vector<int> walk_from(const Network& net, const PathTree& fwd, int src,
                           int v) {
  std::vector<int> links;
  while (v != src) {
    int e = fwd.via[v];
    links.push_back(e);
    v = net.links[e].src;
  }
  std::reverse(links.begin(), links.end());
  return links;
}

std::vector<int> walk_to(const Network& net, const PathTree& rev, int v,
                         int dst) {
  std::vector<int> links;
  while (v != dst) {
    int e = rev.via[v];
    links.push_back(e);
    v = net.links[e].dst;
  }
  return links;
}

void check_heuristic_inputs(const Network& net,
                            const std::vector<Demand>& demands,
                            const FormulationOptions& opt) {
  opt.delay.validate();
  if (opt.delay.kind != DelayModel::Kind::piecewise)
    throw std::invalid_argument("heuristics need a piecewise delay model");
  if (!net.finalized()) throw std::invalid_argument("network not finalized");
  if (net.resource_count() != 1 || !opt.chain.empty())
    throw std::invalid_argument("heuristics work on the universal model");
  if (opt.provision_budget > 0.0)
    throw std::invalid_argument("heuristics use fixed node capacities");
  for (const auto& d : demands)
    if (d.volume <= 0.0)
      throw std::invalid_argument("demand volume must be > 0");
}

void finish(const Network& net, const FormulationOptions& opt,
            const CapacityLedger& led, HeuristicSolution& out) {
  out.flows = led.flows();
  out.delay_pwl = pwl_delay(net, out.flows, opt.delay);
  out.delay_mm1 = mm1_delay(net, out.flows);
}

// debit every traversal plus the processing amounts; on any failure undo the
// whole demand and report it unrouted
bool commit_route(CapacityLedger& led, HeuristicSolution& out,
                  HeuristicRoute&& route) {
  CapacityLedger::Mark m = led.mark();
  for (int e : route.links)
    if (!led.debit_link(route.demand, e, route.volume)) {
      led.rollback(m);
      out.unrouted.push_back(route.demand);
      return false;
    }
  for (auto [z, w] : route.stops)
    if (!led.debit_compute(route.demand, 0, z, w)) {
      led.rollback(m);
      out.unrouted.push_back(route.demand);
      return false;
    }
  out.routes.push_back(std::move(route));
  return true;
}

}  // namespace

HeuristicSolution sr_tsp(const Network& net, const std::vector<Demand>& demands,
                         const FormulationOptions& opt) {
  check_heuristic_inputs(net, demands, opt);
  HeuristicSolution out;
  const double umax = opt.delay.u_max();
  CapacityLedger led(net, umax);

  // one splittable solve fixes each demand's processing amounts
  FormulationOptions ropt = opt;
  ropt.apply_scale = false;
  ropt.aggregate_second_segment = false;
  ropt.provision_budget = 0.0;
  SplitSolution rel = solve_sr_infinite(net, demands, ropt);
  if (rel.status != SolveStatus::optimal) {
    for (const auto& d : demands) out.unrouted.push_back(d.id);
    finish(net, opt, led, out);
    return out;
  }

  std::vector<int> order(demands.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return demands[a].volume > demands[b].volume;
  });

  for (int i : order) {
    const Demand& d = demands[i];
    const double W = d.work.empty() ? 0.0 : d.work[0];
    std::vector<std::pair<int, double>> alloc;
    for (int z = 0; z < net.node_count(); ++z) {
      double w = rel.shares[i][z] / d.volume * W;
      if (w > 1e-9 * W) alloc.push_back({z, w});
    }

    std::vector<int> required{d.src, d.dst};
    for (auto [z, w] : alloc) required.push_back(z);
    std::sort(required.begin(), required.end());
    required.erase(std::unique(required.begin(), required.end()),
                   required.end());

    const double prune = d.volume / umax;
    std::vector<PathTree> trees;
    trees.reserve(required.size());
    for (int a : required)
      trees.push_back(shortest_from(net, led, d.volume, a, prune));

    OverlayInstance inst;
    inst.nodes = required;
    inst.s = d.src;
    inst.t = d.dst;
    inst.dist.assign(required.size(),
                     std::vector<double>(required.size(), 0.0));
    for (size_t a = 0; a < required.size(); ++a)
      for (size_t b = 0; b < required.size(); ++b)
        inst.dist[a][b] = trees[a].dist[required[b]];

    std::vector<int> visit;
    try {
      visit = metric_tsp_path(inst);
    } catch (const std::invalid_argument&) {
      out.unrouted.push_back(d.id);  // pruning cut off a required node
      continue;
    }
    HeuristicRoute route;
    route.demand = d.id;
    route.volume = d.volume;
    for (size_t p = 0; p + 1 < visit.size(); ++p) {
      size_t a = std::lower_bound(required.begin(), required.end(), visit[p]) -
                 required.begin();
      std::vector<int> leg = walk_from(net, trees[a], visit[p], visit[p + 1]);
      route.links.insert(route.links.end(), leg.begin(), leg.end());
    }
    std::vector<char> used(net.node_count(), 0);
    for (int v : visit) {
      if (used[v]) continue;
      used[v] = 1;
      for (auto [z, w] : alloc)
        if (z == v) route.stops.push_back({z, w});
    }
    commit_route(led, out, std::move(route));
  }

  finish(net, opt, led, out);
  return out;
}

HeuristicSolution sr_iteration(const Network& net,
                               const std::vector<Demand>& demands, int k,
                               const FormulationOptions& opt) {
  if (k < 1) throw std::invalid_argument("split count must be >= 1");
  check_heuristic_inputs(net, demands, opt);
  HeuristicSolution out;
  CapacityLedger led(net, opt.delay.u_max());
  std::vector<int> boxes = net.compute_nodes(0);

  struct Sub {
    int idx;
    double volume, work;
  };
  std::vector<Sub> subs;
  subs.reserve(demands.size() * k);
  for (size_t i = 0; i < demands.size(); ++i) {
    const Demand& d = demands[i];
    double W = d.work.empty() ? 0.0 : d.work[0];
    for (int j = 0; j < k; ++j)
      subs.push_back({static_cast<int>(i), d.volume / k, W / k});
  }
  std::stable_sort(subs.begin(), subs.end(),
                   [](const Sub& a, const Sub& b) { return a.volume > b.volume; });

  for (const Sub& s : subs) {
    const Demand& d = demands[s.idx];
    HeuristicRoute route;
    route.demand = d.id;
    route.volume = s.volume;
    if (s.work <= 0.0) {
      PathTree fwd = shortest_from(net, led, s.volume, d.src, 0.0);
      if (fwd.dist[d.dst] == kInf) {
        out.unrouted.push_back(d.id);
        continue;
      }
      route.links = walk_from(net, fwd, d.src, d.dst);
      commit_route(led, out, std::move(route));
      continue;
    }
    PathTree fwd = shortest_from(net, led, s.volume, d.src, 0.0);
    PathTree rev = shortest_to(net, led, s.volume, d.dst, 0.0);
    int best = -1;
    double best_cost = kInf;
    for (int z : boxes) {
      if (led.remaining_compute(0, z) + 1e-9 < s.work) continue;
      double c = fwd.dist[z] + rev.dist[z];
      if (c < best_cost) {
        best_cost = c;
        best = z;
      }
    }
    if (best < 0 || best_cost == kInf) {
      out.unrouted.push_back(d.id);
      continue;
    }
    std::vector<int> leg1 = walk_from(net, fwd, d.src, best);
    std::vector<int> leg2 = walk_to(net, rev, best, d.dst);
    route.links = std::move(leg1);
    route.links.insert(route.links.end(), leg2.begin(), leg2.end());
    route.stops.push_back({best, s.work});
    commit_route(led, out, std::move(route));
  }

  // equal paths through the same stop fuse into one larger subflow
  std::map<std::tuple<int, int, std::vector<int>>, size_t> seen;
  std::vector<HeuristicRoute> merged;
  for (auto& r : out.routes) {
    int stop = r.stops.empty() ? -1 : r.stops[0].first;
    auto key = std::make_tuple(r.demand, stop, r.links);
    auto it = seen.find(key);
    if (it == seen.end()) {
      seen.emplace(std::move(key), merged.size());
      merged.push_back(std::move(r));
    } else {
      HeuristicRoute& m = merged[it->second];
      m.volume += r.volume;
      if (!m.stops.empty()) m.stops[0].second += r.stops[0].second;
    }
  }
  out.routes = std::move(merged);

  finish(net, opt, led, out);
  return out;
}

HeuristicSolution greedy_nearest_baseline(const Network& net,
                                          const std::vector<Demand>& demands,
                                          const FormulationOptions& opt) {
  check_heuristic_inputs(net, demands, opt);
  HeuristicSolution out;
  CapacityLedger led(net, opt.delay.u_max());
  std::vector<int> boxes = net.compute_nodes(0);

  for (const Demand& d : demands) {
    const double W = d.work.empty() ? 0.0 : d.work[0];
    HeuristicRoute route;
    route.demand = d.id;
    route.volume = d.volume;
    if (W <= 0.0) {
      PathTree fwd = shortest_from(net, led, d.volume, d.src, 0.0);
      if (fwd.dist[d.dst] == kInf) {
        out.unrouted.push_back(d.id);
        continue;
      }
      route.links = walk_from(net, fwd, d.src, d.dst);
      commit_route(led, out, std::move(route));
      continue;
    }
    PathTree fwd = shortest_from(net, led, d.volume, d.src, 0.0);
    int best = -1;
    for (int z : boxes) {
      if (led.remaining_compute(0, z) + 1e-9 < W) continue;
      if (fwd.dist[z] == kInf) continue;
      if (best < 0 || fwd.dist[z] < fwd.dist[best]) best = z;
    }
    if (best < 0) {
      out.unrouted.push_back(d.id);
      continue;
    }
    PathTree onward = shortest_from(net, led, d.volume, best, 0.0);
    if (onward.dist[d.dst] == kInf) {
      out.unrouted.push_back(d.id);
      continue;
    }
    route.links = walk_from(net, fwd, d.src, best);
    std::vector<int> leg2 = walk_from(net, onward, best, d.dst);
    route.links.insert(route.links.end(), leg2.begin(), leg2.end());
    route.stops.push_back({best, W});
    commit_route(led, out, std::move(route));
  }

  finish(net, opt, led, out);
  return out;
}

}  // namespace rinp
