#include "rinp/online.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <istream>
#include <map>
#include <ostream>
#include <set>
#include <sstream>
#include <stdexcept>

#include "rinp/rng.hpp"

namespace rinp {

namespace {

constexpr double kCapTol = 1e-9;
constexpr double kGreenFactor = 1e6;

void check_online_network(const Network& net) {
  if (!net.finalized()) throw std::invalid_argument("network not finalized");
  if (net.resource_count() != 1)
    throw std::invalid_argument(
        "online router needs exactly one resource type");
}

SplitGraph build_split(const Network& net, double ratio, bool uniform) {
  check_online_network(net);
  if (uniform && ratio <= 0.0)
    throw std::invalid_argument("resource ratio must be positive");

  SplitGraph g;
  g.net = &net;
  g.ratio = uniform ? ratio : 0.0;
  int nv = net.node_count();
  g.in_copy.resize(nv);
  g.out_copy.resize(nv);
  g.red_of.assign(nv, -1);
  g.orig_node.resize(nv);
  for (int v = 0; v < nv; ++v) {
    g.in_copy[v] = v;
    g.out_copy[v] = v;
    g.orig_node[v] = v;
  }
  int next = nv;
  for (int v = 0; v < nv; ++v) {
    if (!net.is_compute(0, v)) continue;
    g.out_copy[v] = next++;
    g.orig_node.push_back(v);
  }
  g.nodes = next;

  double max_cap = 0.0;
  for (const auto& l : net.links) max_cap = std::max(max_cap, l.capacity);

  for (const auto& l : net.links) {
    SplitGraph::VLink vl;
    vl.id = static_cast<int>(g.links.size());
    vl.src = g.out_copy[l.src];
    vl.dst = g.in_copy[l.dst];
    vl.capacity = l.capacity;
    vl.kind = SplitGraph::LinkKind::physical;
    vl.orig_link = l.id;
    g.links.push_back(vl);
  }
  for (int v = 0; v < nv; ++v) {
    if (!net.is_compute(0, v)) continue;
    SplitGraph::VLink red;
    red.id = static_cast<int>(g.links.size());
    red.src = g.in_copy[v];
    red.dst = g.out_copy[v];
    red.capacity = uniform ? net.nodes[v].compute[0] / ratio
                           : net.nodes[v].compute[0];
    red.kind = SplitGraph::LinkKind::red;
    red.compute_node = v;
    g.red_of[v] = red.id;
    g.links.push_back(red);

    SplitGraph::VLink green = red;
    green.id = static_cast<int>(g.links.size());
    green.capacity = kGreenFactor * max_cap;
    green.kind = SplitGraph::LinkKind::green;
    g.links.push_back(green);
  }

  g.out_adj.assign(g.nodes, {});
  g.in_adj.assign(g.nodes, {});
  for (const auto& vl : g.links) {
    g.out_adj[vl.src].push_back(vl.id);
    g.in_adj[vl.dst].push_back(vl.id);
  }
  return g;
}

// Minimum-hop path avoiding red links and any banned links/nodes. Neighbors
// relax in link-id order, so ties resolve to the lexicographically smallest
// predecessor chain. Returns false when t is unreachable.
bool bfs_segment(const SplitGraph& g, int s, int t,
                 const std::vector<char>& banned_link,
                 const std::vector<char>& banned_node,
                 std::vector<int>& out_links) {
  out_links.clear();
  if (banned_node[s] || banned_node[t]) return false;
  if (s == t) return true;
  std::vector<int> via(g.nodes, -1);
  std::vector<char> seen(g.nodes, 0);
  std::deque<int> q;
  seen[s] = 1;
  q.push_back(s);
  while (!q.empty()) {
    int v = q.front();
    q.pop_front();
    if (v == t) break;
    for (int e : g.out_adj[v]) {
      if (g.is_red(e) || banned_link[e]) continue;
      int w = g.links[e].dst;
      if (seen[w] || banned_node[w]) continue;
      seen[w] = 1;
      via[w] = e;
      q.push_back(w);
    }
  }
  if (!seen[t]) return false;
  for (int v = t; v != s;) {
    int e = via[v];
    out_links.push_back(e);
    v = g.links[e].src;
  }
  std::reverse(out_links.begin(), out_links.end());
  return true;
}

bool path_less(const std::vector<int>& a, const std::vector<int>& b) {
  if (a.size() != b.size()) return a.size() < b.size();
  return a < b;
}

// Yen-style K shortest simple segments by hop count over the non-red links.
std::vector<std::vector<int>> k_shortest_segments(const SplitGraph& g, int s,
                                                  int t, int K) {
  std::vector<std::vector<int>> found;
  std::vector<char> no_link(g.links.size(), 0), no_node(g.nodes, 0);
  std::vector<int> first;
  if (!bfs_segment(g, s, t, no_link, no_node, first)) return found;
  found.push_back(first);

  std::set<std::vector<int>, bool (*)(const std::vector<int>&,
                                      const std::vector<int>&)>
      candidates(&path_less);

  while (static_cast<int>(found.size()) < K) {
    const std::vector<int>& prev = found.back();
    for (std::size_t i = 0; i <= prev.size(); ++i) {
      if (i == prev.size() && !prev.empty()) break;  // spur must leave room
      std::vector<int> root(prev.begin(), prev.begin() + i);
      int spur = i == 0 ? s : g.links[prev[i - 1]].dst;
      std::vector<char> banned_link(g.links.size(), 0);
      std::vector<char> banned_node(g.nodes, 0);
      for (const auto& p : found) {
        if (p.size() >= i &&
            std::equal(root.begin(), root.end(), p.begin()) &&
            p.size() > i)
          banned_link[p[i]] = 1;
      }
      int v = s;
      for (std::size_t j = 0; j < i; ++j) {
        banned_node[v] = 1;  // root nodes except the spur node
        v = g.links[root[j]].dst;
      }
      std::vector<int> tail;
      if (!bfs_segment(g, spur, t, banned_link, banned_node, tail)) continue;
      std::vector<int> full = root;
      full.insert(full.end(), tail.begin(), tail.end());
      if (std::find(found.begin(), found.end(), full) == found.end())
        candidates.insert(full);
    }
    if (candidates.empty()) break;
    found.push_back(*candidates.begin());
    candidates.erase(candidates.begin());
  }
  return found;
}

bool simple_in_split(const SplitGraph& g, int start,
                     const std::vector<int>& links) {
  std::set<int> seen{start};
  int v = start;
  for (int e : links) {
    if (g.links[e].src != v) return false;
    v = g.links[e].dst;
    if (!seen.insert(v).second) return false;
  }
  return true;
}

double demand_work(const Demand& d) {
  return d.work.empty() ? 0.0 : d.work[0];
}

}  // namespace

SplitGraph split_compute_nodes(const Network& net, double ratio) {
  return build_split(net, ratio, true);
}

SplitGraph split_compute_nodes(const Network& net) {
  return build_split(net, 0.0, false);
}

std::vector<CandidatePath> generate_candidate_paths(const SplitGraph& g,
                                                    const Demand& d, int K) {
  if (K < 1) throw std::invalid_argument("K must be at least 1");
  const Network& net = *g.net;
  if (d.src < 0 || d.src >= net.node_count() || d.dst < 0 ||
      d.dst >= net.node_count() || d.src == d.dst)
    throw std::invalid_argument("bad demand endpoints");
  if (d.volume <= 0.0) throw std::invalid_argument("demand volume must be positive");

  double h = d.volume;
  double w = demand_work(d);
  int from = g.out_copy[d.src];
  int to = g.in_copy[d.dst];

  std::vector<CandidatePath> out;
  auto finish_path = [&](std::vector<int> links, int red) {
    CandidatePath p;
    p.id = static_cast<int>(out.size());
    p.demand = d.id;
    p.links = std::move(links);
    p.red_link = red;
    p.delta.reserve(p.links.size());
    for (int e : p.links) {
      double de = 1.0;
      if (g.is_red(e)) de = g.ratio > 0.0 ? 1.0 : w / h;
      p.delta.push_back(de);
      p.Delta += de;
    }
    out.push_back(std::move(p));
  };

  if (w <= 0.0) {
    for (auto& seg : k_shortest_segments(g, from, to, K))
      finish_path(std::move(seg), -1);
  } else {
    std::set<std::vector<int>> seen;
    auto zs = net.compute_nodes(0);
    for (int z : zs) {
      int red = g.red_of[z];
      auto seg1s = k_shortest_segments(g, from, g.in_copy[z], K);
      auto seg2s = k_shortest_segments(g, g.out_copy[z], to, K);
      for (const auto& a : seg1s)
        for (const auto& b : seg2s) {
          std::vector<int> links = a;
          links.push_back(red);
          links.insert(links.end(), b.begin(), b.end());
          if (!simple_in_split(g, from, links)) continue;
          if (!seen.insert(links).second) continue;
          finish_path(std::move(links), red);
        }
    }
    std::stable_sort(out.begin(), out.end(),
                     [](const CandidatePath& x, const CandidatePath& y) {
                       if (x.hops() != y.hops()) return x.hops() < y.hops();
                       if (x.Delta != y.Delta) return x.Delta < y.Delta;
                       return x.id < y.id;
                     });
    std::size_t cap = static_cast<std::size_t>(K) * zs.size();
    if (out.size() > cap) out.resize(cap);
  }
  return out;
}

int admit(const DynamicDemand& dd, const std::vector<CandidatePath>& cands,
          const SplitGraph& g, DualState& state, OnlineVariant variant) {
  auto slots = dd.active_slots(state.slot_len);
  double tau = static_cast<double>(slots.size());
  double h = dd.demand.volume;
  int id = dd.demand.id;
  if (id < 0 || id >= static_cast<int>(state.z.size()))
    throw std::invalid_argument("demand id outside dual state range");

  for (std::size_t idx = 0; idx < cands.size(); ++idx) {
    const CandidatePath& p = cands[idx];
    if (variant == OnlineVariant::baseline && idx > 0) break;
    if (variant != OnlineVariant::baseline) {
      double price = 0.0;
      for (std::size_t i = 0; i < p.links.size(); ++i) {
        double sum = 0.0;
        for (int t : slots) sum += state.x[p.links[i]][t];
        price += p.delta[i] * sum;
      }
      if (!(price < tau)) continue;
    }
    if (variant != OnlineVariant::violating) {
      bool fits = true;
      for (std::size_t i = 0; i < p.links.size() && fits; ++i) {
        int e = p.links[i];
        double add = h * p.delta[i];
        double cap = g.links[e].capacity;
        for (int t : slots)
          if (state.load[e][t] + add > cap + kCapTol) {
            fits = false;
            break;
          }
      }
      if (!fits) continue;
    }

    state.z[id] = tau * h;
    for (std::size_t i = 0; i < p.links.size(); ++i) {
      int e = p.links[i];
      double add = h * p.delta[i];
      double cap = g.links[e].capacity;
      for (int t : slots) {
        state.x[e][t] = state.x[e][t] * (1.0 + add / cap) + add / (cap * p.Delta);
        state.load[e][t] += add;
      }
      state.members[e].push_back({id, h, tau, p.delta[i], p.Delta});
    }
    return static_cast<int>(idx);
  }
  return -1;
}

std::vector<DynamicDemand> generate_trace(const ScenarioConfig& sc) {
  if (sc.pairs.empty())
    throw std::invalid_argument("scenario needs endpoint pairs");
  if (sc.arrival_rate <= 0.0 || sc.horizon <= 0.0)
    throw std::invalid_argument("scenario needs positive rate and horizon");
  Rng rng(sc.seed);
  std::vector<DynamicDemand> out;
  double t = 0.0;
  int id = 0;
  for (;;) {
    if (sc.max_demands > 0 && id >= sc.max_demands) break;
    t += rng.exponential(sc.arrival_rate);
    if (t >= sc.horizon) break;
    double dur = rng.lognormal(sc.duration_mu, sc.duration_sigma);
    double size = rng.normal(sc.size_mean, sc.size_std);
    if (size < 1.0) size = 1.0;
    auto [s, d] = sc.pairs[id % sc.pairs.size()];
    Demand dem;
    dem.id = id;
    dem.src = s;
    dem.dst = d;
    dem.volume = size;
    dem.work = {sc.resource_ratio * size};
    DynamicDemand dd;
    dd.demand = std::move(dem);
    dd.start = t;
    dd.duration = dur;
    out.push_back(std::move(dd));
    ++id;
  }
  return out;
}

namespace {

// Sorted arrival order plus id validation shared by the simulator and the
// offline packing solver so both see the same indexing.
std::vector<DynamicDemand> prepare_trace(const std::vector<DynamicDemand>& in,
                                         double slot_len, int* horizon_slots) {
  if (slot_len <= 0.0) throw std::invalid_argument("slot length must be positive");
  std::vector<DynamicDemand> trace = in;
  std::stable_sort(trace.begin(), trace.end(),
                   [](const DynamicDemand& a, const DynamicDemand& b) {
                     if (a.start != b.start) return a.start < b.start;
                     return a.demand.id < b.demand.id;
                   });
  std::vector<char> used(trace.size(), 0);
  int max_slot = 0;
  for (const auto& dd : trace) {
    int id = dd.demand.id;
    if (id < 0 || id >= static_cast<int>(trace.size()) || used[id])
      throw std::invalid_argument("trace demand ids must be unique and dense");
    used[id] = 1;
    if (dd.duration <= 0.0)
      throw std::invalid_argument("trace durations must be positive");
    auto slots = dd.active_slots(slot_len);
    if (!slots.empty()) max_slot = std::max(max_slot, slots.back() + 1);
  }
  *horizon_slots = max_slot;
  return trace;
}

}  // namespace

OnlineResult run_trace(const Network& net,
                       const std::vector<DynamicDemand>& trace,
                       const OnlineOptions& opt) {
  OnlineResult res;
  res.graph = opt.uniform_ratio > 0.0 ? split_compute_nodes(net, opt.uniform_ratio)
                                      : split_compute_nodes(net);
  int horizon = 0;
  res.trace = prepare_trace(trace, opt.slot_len, &horizon);

  DualState& st = res.state;
  st.slot_len = opt.slot_len;
  st.horizon_slots = horizon;
  st.x.assign(res.graph.links.size(), std::vector<double>(horizon, 0.0));
  st.load.assign(res.graph.links.size(), std::vector<double>(horizon, 0.0));
  st.z.assign(res.trace.size(), 0.0);
  st.members.assign(res.graph.links.size(), {});

  OnlineMetrics& m = res.metrics;
  res.decisions.assign(res.trace.size(), -1);
  for (std::size_t i = 0; i < res.trace.size(); ++i) {
    const DynamicDemand& dd = res.trace[i];
    auto cands = generate_candidate_paths(res.graph, dd.demand, opt.K);
    double before = dual_objective(st, res.graph);
    int pick = admit(dd, cands, res.graph, st, opt.variant);
    double after = dual_objective(st, res.graph);
    res.decisions[i] = pick;
    if (pick >= 0) {
      double gain = dd.demand.volume *
                    static_cast<double>(dd.active_slots(opt.slot_len).size());
      m.accepted_volume += gain;
      ++m.accepted_count;
      if (gain > 0.0)
        m.max_step_growth = std::max(m.max_step_growth, (after - before) / gain);
    } else {
      ++m.rejected_count;
    }
    m.dual_trace.push_back(after);
  }

  for (const auto& vl : res.graph.links) {
    if (vl.kind == SplitGraph::LinkKind::green) continue;
    for (int t = 0; t < horizon; ++t) {
      double util = st.load[vl.id][t] / vl.capacity;
      m.max_utilization = std::max(m.max_utilization, util);
      if (st.load[vl.id][t] > vl.capacity * (1.0 + kCapTol)) ++m.violation_events;
    }
  }
  return res;
}

OnlineResult run_simulation(const Network& net, const ScenarioConfig& sc,
                            OnlineVariant variant) {
  OnlineOptions opt;
  opt.K = sc.K;
  opt.uniform_ratio = sc.uniform_ratio;
  opt.slot_len = sc.slot_len;
  opt.variant = variant;
  return run_trace(net, generate_trace(sc), opt);
}

namespace {

struct PackEntry {
  int pos = -1;  // index into the sorted trace
  std::vector<CandidatePath> cands;
  int first_slot = 0, last_slot = 0;  // active window, inclusive
  double volume = 0.0;
  double gain = 0.0;  // tau * h
};

int uf_find(std::vector<int>& up, int a) {
  while (up[a] != a) a = up[a] = up[up[a]];
  return a;
}

}  // namespace

// Exact packing optimum. Demand activity windows are contiguous slot ranges,
// so per link it is enough to enforce capacity at slots where some demand
// using that link starts: any other slot's load is dominated by the row at
// the latest start among the demands active there. Demands that never share
// a capacity row are independent, so the model splits into components that
// solve as separate small MIPs seeded with a first-fit incumbent.
double offline_optimum(const Network& net,
                       const std::vector<DynamicDemand>& trace,
                       const OnlineOptions& opt, const SolveOptions& sopt) {
  SplitGraph g = opt.uniform_ratio > 0.0 ? split_compute_nodes(net, opt.uniform_ratio)
                                         : split_compute_nodes(net);
  int horizon = 0;
  auto sorted = prepare_trace(trace, opt.slot_len, &horizon);

  std::vector<PackEntry> entries;
  std::size_t total_vars = 0;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    const DynamicDemand& dd = sorted[i];
    PackEntry en;
    en.pos = static_cast<int>(i);
    en.cands = generate_candidate_paths(g, dd.demand, opt.K);
    if (en.cands.empty()) continue;
    total_vars += en.cands.size();
    if (total_vars > 20000)
      throw std::runtime_error("offline packing model too large");
    auto slots = dd.active_slots(opt.slot_len);
    en.first_slot = slots.front();
    en.last_slot = slots.back();
    en.volume = dd.demand.volume;
    en.gain = dd.demand.volume * static_cast<double>(slots.size());
    entries.push_back(std::move(en));
  }
  if (entries.empty()) return 0.0;

  // kept rows: (link, start slot of some demand with a candidate on it)
  std::map<int, std::set<int>> link_starts;
  for (const auto& en : entries)
    for (const auto& p : en.cands)
      for (int e : p.links)
        if (!g.is_green(e)) link_starts[e].insert(en.first_slot);

  // row membership: (entry, cand, h*delta) triples per kept (link, slot)
  struct Term {
    int entry, cand;
    double coef;
  };
  std::map<std::pair<int, int>, std::vector<Term>> rows;
  for (std::size_t i = 0; i < entries.size(); ++i) {
    const PackEntry& en = entries[i];
    for (std::size_t c = 0; c < en.cands.size(); ++c) {
      const CandidatePath& p = en.cands[c];
      for (std::size_t k = 0; k < p.links.size(); ++k) {
        int e = p.links[k];
        if (g.is_green(e)) continue;
        auto it = link_starts.find(e);
        if (it == link_starts.end()) continue;
        double add = en.volume * p.delta[k];
        for (int t : it->second)
          if (t >= en.first_slot && t <= en.last_slot)
            rows[{e, t}].push_back({static_cast<int>(i), static_cast<int>(c), add});
      }
    }
  }
  if (rows.size() > 200000)
    throw std::runtime_error("offline packing model too large");

  // greedy first-fit over the kept rows, remembering the chosen candidate
  std::map<std::pair<int, int>, double> ff_load;
  std::vector<int> ff_pick(entries.size(), -1);
  for (std::size_t i = 0; i < entries.size(); ++i) {
    const PackEntry& en = entries[i];
    for (std::size_t ci = 0; ci < en.cands.size(); ++ci) {
      const CandidatePath& p = en.cands[ci];
      bool fits = true;
      for (std::size_t k = 0; k < p.links.size() && fits; ++k) {
        int e = p.links[k];
        if (g.is_green(e)) continue;
        double add = en.volume * p.delta[k];
        auto it = link_starts.find(e);
        for (int t : it->second) {
          if (t < en.first_slot || t > en.last_slot) continue;
          if (ff_load[{e, t}] + add > g.links[e].capacity + kCapTol) {
            fits = false;
            break;
          }
        }
      }
      if (!fits) continue;
      for (std::size_t k = 0; k < p.links.size(); ++k) {
        int e = p.links[k];
        if (g.is_green(e)) continue;
        double add = en.volume * p.delta[k];
        for (int t : link_starts[e])
          if (t >= en.first_slot && t <= en.last_slot) ff_load[{e, t}] += add;
      }
      ff_pick[i] = static_cast<int>(ci);
      break;
    }
  }

  // independent components: entries sharing any capacity row must be solved
  // jointly, everything else separates
  std::vector<int> up(entries.size());
  for (std::size_t i = 0; i < entries.size(); ++i) up[i] = static_cast<int>(i);
  for (const auto& [key, terms] : rows)
    for (std::size_t k = 1; k < terms.size(); ++k) {
      int a = uf_find(up, terms[0].entry), b = uf_find(up, terms[k].entry);
      if (a != b) up[b] = a;
    }

  std::map<int, std::vector<int>> comps;
  for (std::size_t i = 0; i < entries.size(); ++i)
    comps[uf_find(up, static_cast<int>(i))].push_back(static_cast<int>(i));

  double total = 0.0;
  for (const auto& [root, members] : comps) {
    LinearProgram lp;
    lp.sense = ObjSense::maximize;
    std::map<std::pair<int, int>, int> yvar;  // (entry, cand) -> var
    for (int i : members) {
      const PackEntry& en = entries[i];
      std::vector<std::pair<int, double>> choice;
      for (std::size_t c = 0; c < en.cands.size(); ++c) {
        int y = lp.add_var("y" + std::to_string(sorted[en.pos].demand.id) +
                               "_" + std::to_string(c),
                           0.0, 1.0, true);
        lp.set_obj(y, en.gain);
        yvar[{i, static_cast<int>(c)}] = y;
        choice.push_back({y, 1.0});
      }
      lp.add_row(std::move(choice), Relation::le, 1.0,
                 "pick" + std::to_string(sorted[en.pos].demand.id));
    }
    for (const auto& [key, terms] : rows) {
      if (uf_find(up, terms[0].entry) != root) continue;
      std::vector<std::pair<int, double>> coefs;
      coefs.reserve(terms.size());
      for (const auto& tm : terms)
        coefs.push_back({yvar.at({tm.entry, tm.cand}), tm.coef});
      lp.add_row(std::move(coefs), Relation::le, g.links[key.first].capacity,
                 "cap" + std::to_string(key.first) + "_" +
                     std::to_string(key.second));
    }
    SolveOptions mopt = sopt;
    std::vector<double> x0(lp.vars.size(), 0.0);
    for (int i : members)
      if (ff_pick[i] >= 0) x0[yvar.at({i, ff_pick[i]})] = 1.0;
    mopt.initial_solution = std::move(x0);
    LpSolution sol = solve_mip(lp, mopt);
    if (sol.status != SolveStatus::optimal)
      throw std::runtime_error("offline packing solve failed: " +
                               std::string(to_string(sol.status)));
    total += sol.objective;
  }
  return total;
}

double dual_objective(const DualState& state, const SplitGraph& g) {
  double total = 0.0;
  for (double zd : state.z) total += zd;
  for (const auto& vl : g.links)
    for (double xe : state.x[vl.id]) total += vl.capacity * xe;
  return total;
}

double violation_bound(const DualState& state, const SplitGraph& g,
                       int vlink) {
  const auto& mem = state.members[vlink];
  if (mem.empty()) return 0.0;
  double gamma = 0.0, alpha = 0.0, delta_max = 0.0;
  bool all_small = true;
  for (const auto& r : mem) {
    gamma = std::max(gamma, r.tau / r.delta);
    alpha = std::max(alpha, r.h * r.delta);
    delta_max = std::max(delta_max, r.Delta);
    if (r.h >= 1.0) all_small = false;
  }
  double cap = g.links[vlink].capacity;
  double we;
  if (all_small) {
    we = 1.0;
  } else {
    we = 1.0 / (cap * (std::pow(1.0 + alpha / cap, 1.0 / alpha) - 1.0));
  }
  return we * std::log(delta_max * (2.0 * gamma + 1.0) + 1.0);
}

double realized_overload(const DualState& state, const SplitGraph& g,
                         int vlink) {
  double sum = 0.0;
  for (const auto& r : state.members[vlink]) sum += r.h * r.delta;
  return sum / g.links[vlink].capacity;
}

void write_trace(const std::vector<DynamicDemand>& trace, std::ostream& os,
                 double resource_ratio) {
  os << "# id src dst arrival duration size (resource ratio "
     << resource_ratio << ")\n";
  os.precision(17);
  for (const auto& dd : trace)
    os << dd.demand.id << ' ' << dd.demand.src << ' ' << dd.demand.dst << ' '
       << dd.start << ' ' << dd.duration << ' ' << dd.demand.volume << '\n';
}

std::vector<DynamicDemand> read_trace(std::istream& is,
                                      double resource_ratio) {
  std::vector<DynamicDemand> out;
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    DynamicDemand dd;
    double size = 0.0;
    if (!(ls >> dd.demand.id >> dd.demand.src >> dd.demand.dst >> dd.start >>
          dd.duration >> size))
      throw std::invalid_argument("bad trace line: " + line);
    dd.demand.volume = size;
    dd.demand.work = {resource_ratio * size};
    out.push_back(std::move(dd));
  }
  return out;
}

}  // namespace rinp
