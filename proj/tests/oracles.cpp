#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>

namespace rinp::oracle {

namespace {

// sparse traversal counts, ascending by link id
using SparseCount = std::vector<std::pair<int, int>>;

struct WalkOption {
  SparseCount u;
  std::vector<int> stops;  // sorted nodes allowed to take work
  double sd = 0.0;         // standalone envelope delay
};

double work_of(const Demand& d, int r) {
  return r < static_cast<int>(d.work.size()) ? d.work[r] : 0.0;
}

// every stop sequence the walk oracle must consider for one demand: single
// stops always, ordered pairs only for splittable processing
std::vector<std::vector<int>> stop_sequences(const Network& net,
                                             const Demand& d) {
  std::vector<int> cand;
  for (int v = 0; v < net.node_count(); ++v)
    if (v != d.src && v != d.dst && net.is_compute(0, v)) cand.push_back(v);
  std::vector<std::vector<int>> seqs;
  if (d.mode == ProcessingMode::splittable && cand.size() > 2)
    throw std::logic_error("walk oracle handles at most two compute nodes");
  for (int v : cand) seqs.push_back({v});
  if (d.mode == ProcessingMode::splittable)
    for (int v1 : cand)
      for (int v2 : cand)
        if (v1 != v2) seqs.push_back({v1, v2});
  return seqs;
}

bool stops_can_take(const Network& net, const Demand& d,
                    const std::vector<int>& stops) {
  double W = work_of(d, 0);
  if (d.mode == ProcessingMode::single_node) {
    for (int v : stops)
      if (W <= net.usable_compute(0, v) + 1e-9) return true;
    return false;
  }
  double cap = 0.0;
  for (int v : stops) cap += net.usable_compute(0, v);
  return W <= cap + 1e-9;
}

std::vector<WalkOption> build_walk_options(const Network& net, const Demand& d,
                                           const FormulationOptions& opt) {
  const int E = net.link_count();
  const double umax = opt.delay.u_max();
  const double h = d.volume;

  std::vector<std::vector<int>> seqs;
  if (work_of(d, 0) > 0.0)
    seqs = stop_sequences(net, d);
  else
    seqs.push_back({});

  std::vector<WalkOption> out;
  std::map<std::vector<int>, bool> seen;  // stops then flattened counts
  std::vector<int> cnt(E, 0);

  for (const auto& seq : seqs) {
    if (!seq.empty() && !stops_can_take(net, d, seq)) continue;

    std::vector<std::vector<std::vector<int>>> segs;
    int prev = d.src;
    bool reachable = true;
    for (int v : seq) {
      segs.push_back(simple_paths(net, prev, v));
      prev = v;
    }
    segs.push_back(simple_paths(net, prev, d.dst));
    for (const auto& s : segs)
      if (s.empty()) reachable = false;
    if (!reachable) continue;

    std::vector<int> stops = seq;
    std::sort(stops.begin(), stops.end());

    std::vector<std::size_t> pick(segs.size(), 0);
    while (true) {
      std::fill(cnt.begin(), cnt.end(), 0);
      for (std::size_t i = 0; i < segs.size(); ++i)
        for (int e : segs[i][pick[i]]) ++cnt[e];

      bool fits = true;
      double sd = 0.0;
      for (int e = 0; e < E && fits; ++e) {
        if (cnt[e] == 0) continue;
        double f = h * cnt[e];
        if (f > umax * net.links[e].capacity + 1e-9)
          fits = false;
        else
          sd += pwl_link_delay(net.links[e].capacity, f, opt.delay);
      }
      if (fits) {
        std::vector<int> key = stops;
        key.push_back(-1);
        for (int e = 0; e < E; ++e)
          if (cnt[e] > 0) {
            key.push_back(e);
            key.push_back(cnt[e]);
          }
        if (seen.emplace(std::move(key), true).second) {
          WalkOption o;
          for (int e = 0; e < E; ++e)
            if (cnt[e] > 0) o.u.push_back({e, cnt[e]});
          o.stops = stops;
          o.sd = sd;
          out.push_back(std::move(o));
        }
      }

      std::size_t k = 0;
      while (k < pick.size() && ++pick[k] == segs[k].size()) pick[k++] = 0;
      if (k == pick.size()) break;
    }
  }

  std::sort(out.begin(), out.end(),
            [](const WalkOption& a, const WalkOption& b) { return a.sd < b.sd; });
  return out;
}

// joint processing feasibility of two demands on their stop sets, one
// resource type; subset sums for splittable work, direct placement for
// single-node work
bool joint_work_ok(const Network& net, const Demand& d1,
                   const std::vector<int>& s1, const Demand& d2,
                   const std::vector<int>& s2) {
  double W1 = work_of(d1, 0), W2 = work_of(d2, 0);
  auto cap = [&](int v) { return net.usable_compute(0, v); };
  auto cap_sum = [&](const std::vector<int>& s) {
    double c = 0.0;
    for (int v : s) c += cap(v);
    return c;
  };
  bool one1 = d1.mode == ProcessingMode::single_node && W1 > 0.0;
  bool one2 = d2.mode == ProcessingMode::single_node && W2 > 0.0;

  if (one1 && one2) {
    for (int v1 : s1)
      for (int v2 : s2) {
        if (W1 > cap(v1) + 1e-9) continue;
        if (v1 == v2) {
          if (W1 + W2 <= cap(v1) + 1e-9) return true;
        } else if (W2 <= cap(v2) + 1e-9) {
          return true;
        }
      }
    return false;
  }
  if (one1 || one2) {
    const Demand& ds = one1 ? d1 : d2;          // single-node side
    const std::vector<int>& ss = one1 ? s1 : s2;
    double Ws = one1 ? W1 : W2;
    const std::vector<int>& sp = one1 ? s2 : s1;  // splittable side
    double Wp = one1 ? W2 : W1;
    (void)ds;
    for (int v : ss) {
      if (Ws > cap(v) + 1e-9) continue;
      double avail = cap_sum(sp);
      if (std::find(sp.begin(), sp.end(), v) != sp.end()) avail -= Ws;
      if (Wp <= avail + 1e-9) return true;
    }
    return false;
  }
  if (W1 > cap_sum(s1) + 1e-9) return false;
  if (W2 > cap_sum(s2) + 1e-9) return false;
  std::vector<int> uni = s1;
  for (int v : s2)
    if (std::find(uni.begin(), uni.end(), v) == uni.end()) uni.push_back(v);
  return W1 + W2 <= cap_sum(uni) + 1e-9;
}

}  // namespace

std::vector<std::vector<int>> simple_paths(const Network& net, int s, int t,
                                           std::size_t cap) {
  std::vector<std::vector<int>> out;
  if (s == t) {
    out.push_back({});
    return out;
  }
  std::vector<char> visited(net.node_count(), 0);
  std::vector<int> trail;
  visited[s] = 1;

  // explicit DFS stack of (node, next out-link position)
  std::vector<std::pair<int, std::size_t>> stack{{s, 0}};
  while (!stack.empty()) {
    auto& [v, pos] = stack.back();
    if (pos < net.out_links(v).size()) {
      int e = net.out_links(v)[pos++];
      int w = net.links[e].dst;
      if (w == t) {
        trail.push_back(e);
        out.push_back(trail);
        trail.pop_back();
        if (out.size() > cap)
          throw std::runtime_error("simple path enumeration exceeded cap");
        continue;
      }
      if (visited[w]) continue;
      visited[w] = 1;
      trail.push_back(e);
      stack.push_back({w, 0});
    } else {
      stack.pop_back();
      visited[v] = 0;
      if (!trail.empty()) trail.pop_back();
    }
  }
  return out;
}

double exact_walk_optimum(const Network& net,
                          const std::vector<Demand>& demands,
                          const FormulationOptions& opt) {
  if (net.resource_count() != 1)
    throw std::logic_error("walk oracle expects one resource type");
  if (demands.size() > 2)
    throw std::logic_error("walk oracle expects at most two demands");
  if (demands.empty()) return 0.0;

  auto L1 = build_walk_options(net, demands[0], opt);
  if (demands.size() == 1) return L1.empty() ? kInf : L1.front().sd;
  auto L2 = build_walk_options(net, demands[1], opt);
  if (L1.empty() || L2.empty()) return kInf;

  const double umax = opt.delay.u_max();
  const double h1 = demands[0].volume, h2 = demands[1].volume;
  double best = kInf;
  // the envelope is superadditive in the flow, so the sum of standalone
  // delays bounds every combination from below; both lists are sorted
  for (const WalkOption& o1 : L1) {
    if (o1.sd + L2.front().sd >= best) break;
    for (const WalkOption& o2 : L2) {
      if (o1.sd + o2.sd >= best) break;
      if (!joint_work_ok(net, demands[0], o1.stops, demands[1], o2.stops))
        continue;

      double delay = 0.0;
      bool fits = true;
      std::size_t i = 0, j = 0;
      while (fits && (i < o1.u.size() || j < o2.u.size())) {
        int e;
        double f = 0.0;
        if (j >= o2.u.size() || (i < o1.u.size() && o1.u[i].first < o2.u[j].first)) {
          e = o1.u[i].first;
          f = h1 * o1.u[i++].second;
        } else if (i >= o1.u.size() || o2.u[j].first < o1.u[i].first) {
          e = o2.u[j].first;
          f = h2 * o2.u[j++].second;
        } else {
          e = o1.u[i].first;
          f = h1 * o1.u[i++].second + h2 * o2.u[j++].second;
        }
        if (f > umax * net.links[e].capacity + 1e-9)
          fits = false;
        else
          delay += pwl_link_delay(net.links[e].capacity, f, opt.delay);
      }
      if (fits && delay < best) best = delay;
    }
  }
  return best;
}

LpCheck one_stop_lp_optimum(const Network& net,
                            const std::vector<Demand>& demands,
                            const FormulationOptions& opt) {
  if (opt.delay.kind != DelayModel::Kind::piecewise)
    throw std::invalid_argument("one-stop oracle needs a piecewise delay model");
  const int E = net.link_count();
  const int R = net.resource_count();
  const double umax = opt.delay.u_max();

  LinearProgram lp;
  lp.sense = ObjSense::minimize;
  std::vector<int> fvar(E);
  for (int e = 0; e < E; ++e) {
    const Link& link = net.links[e];
    fvar[e] = lp.add_var("f" + std::to_string(e), 0.0, umax * link.capacity);
    int te = lp.add_var("t" + std::to_string(e), 0.0, kInf);
    lp.set_obj(te, 1.0);
    for (double u : opt.delay.breakpoints) {
      double denom = (1.0 - u) * (1.0 - u);
      lp.add_row({{te, 1.0}, {fvar[e], -1.0 / (link.capacity * denom)}},
                 Relation::ge, -u * u / denom);
    }
  }

  std::vector<std::vector<std::pair<int, double>>> link_terms(E);
  std::map<std::pair<int, int>, std::vector<std::pair<int, double>>> node_terms;
  std::size_t columns = 0;

  std::vector<std::vector<std::pair<int, double>>> demand_terms(demands.size());
  for (std::size_t i = 0; i < demands.size(); ++i) {
    const Demand& d = demands[i];
    double phi = opt.apply_scale ? d.scale : 1.0;
    bool has_work = false;
    for (int r = 0; r < R; ++r)
      if (work_of(d, r) > 0.0) has_work = true;

    // column coefficients per link, deduplicated per (stop, coefficients)
    std::map<std::pair<int, std::vector<std::pair<int, double>>>, int> cols;
    auto add_column = [&](int stop, std::vector<std::pair<int, double>> coef) {
      auto key = std::make_pair(stop, coef);
      if (cols.count(key)) return;
      int x = lp.add_var("x" + std::to_string(i) + "_" +
                             std::to_string(cols.size()),
                         0.0, kInf);
      cols.emplace(std::move(key), x);
      demand_terms[i].push_back({x, 1.0});
      for (auto& [e, c] : coef) link_terms[e].push_back({x, c});
      if (stop >= 0)
        for (int r = 0; r < R; ++r)
          if (work_of(d, r) > 0.0)
            node_terms[{r, stop}].push_back({x, work_of(d, r) / d.volume});
      if (++columns > 40000)
        throw std::runtime_error("one-stop oracle column cap exceeded");
    };

    std::vector<double> acc(E, 0.0);
    if (!has_work) {
      for (const auto& p : simple_paths(net, d.src, d.dst)) {
        std::fill(acc.begin(), acc.end(), 0.0);
        for (int e : p) acc[e] += 1.0;
        std::vector<std::pair<int, double>> coef;
        for (int e = 0; e < E; ++e)
          if (acc[e] != 0.0) coef.push_back({e, acc[e]});
        add_column(-1, std::move(coef));
      }
      continue;
    }

    for (int z = 0; z < net.node_count(); ++z) {
      if (z == d.src || z == d.dst) continue;
      bool eligible = true;
      for (int r = 0; r < R; ++r)
        if (work_of(d, r) > 0.0 && !net.is_compute(r, z)) eligible = false;
      if (!eligible) continue;
      auto first = simple_paths(net, d.src, z);
      auto second = simple_paths(net, z, d.dst);
      for (const auto& p1 : first)
        for (const auto& p2 : second) {
          std::fill(acc.begin(), acc.end(), 0.0);
          for (int e : p1) acc[e] += 1.0;
          for (int e : p2) acc[e] += phi;
          std::vector<std::pair<int, double>> coef;
          for (int e = 0; e < E; ++e)
            if (acc[e] != 0.0) coef.push_back({e, acc[e]});
          add_column(z, std::move(coef));
        }
    }
  }

  for (std::size_t i = 0; i < demands.size(); ++i) {
    if (demand_terms[i].empty()) return {false, 0.0};
    lp.add_row(std::move(demand_terms[i]), Relation::eq, demands[i].volume);
  }
  for (int e = 0; e < E; ++e) {
    auto row = link_terms[e];
    row.push_back({fvar[e], -1.0});
    lp.add_row(std::move(row), Relation::eq, 0.0);
  }
  for (auto& [key, terms] : node_terms)
    lp.add_row(std::move(terms), Relation::le,
               net.usable_compute(key.first, key.second));

  LpSolution sol = solve_lp(lp);
  if (sol.status != SolveStatus::optimal) return {false, 0.0};
  return {true, sol.objective};
}

LpCheck vertex_enumeration_optimum(const LinearProgram& lp) {
  const int n = static_cast<int>(lp.vars.size());
  const int m = static_cast<int>(lp.rows.size());
  if (n < 1 || n > 10) throw std::logic_error("vertex oracle expects 1..10 vars");
  for (const auto& v : lp.vars)
    if (!std::isfinite(v.lb) || !std::isfinite(v.ub))
      throw std::logic_error("vertex oracle needs finite bounds");

  // hyperplanes: every row taken at equality, then both bounds per variable
  struct Plane {
    std::vector<double> a;
    double b = 0.0;
  };
  std::vector<Plane> planes;
  for (const auto& row : lp.rows) {
    Plane p;
    p.a.assign(n, 0.0);
    for (auto [j, c] : row.coef) p.a[j] += c;
    p.b = row.rhs;
    planes.push_back(std::move(p));
  }
  for (int j = 0; j < n; ++j) {
    Plane p;
    p.a.assign(n, 0.0);
    p.a[j] = 1.0;
    p.b = lp.vars[j].lb;
    planes.push_back(p);
    p.b = lp.vars[j].ub;
    planes.push_back(std::move(p));
  }

  const int P = static_cast<int>(planes.size());
  const bool maximize = lp.sense == ObjSense::maximize;
  bool found = false;
  double best = 0.0;

  std::vector<int> idx(n);
  for (int i = 0; i < n; ++i) idx[i] = i;
  std::vector<double> mat, rhs, x(n);
  while (true) {
    mat.assign(static_cast<std::size_t>(n) * n, 0.0);
    rhs.assign(n, 0.0);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) mat[i * n + j] = planes[idx[i]].a[j];
      rhs[i] = planes[idx[i]].b;
    }
    // partial-pivot elimination; singular selections are skipped
    bool ok = true;
    for (int c = 0; c < n && ok; ++c) {
      int piv = -1;
      double mag = 1e-9;
      for (int r = c; r < n; ++r)
        if (std::fabs(mat[r * n + c]) > mag) {
          mag = std::fabs(mat[r * n + c]);
          piv = r;
        }
      if (piv < 0) {
        ok = false;
        break;
      }
      if (piv != c) {
        for (int k = 0; k < n; ++k) std::swap(mat[piv * n + k], mat[c * n + k]);
        std::swap(rhs[piv], rhs[c]);
      }
      for (int r = c + 1; r < n; ++r) {
        double f = mat[r * n + c] / mat[c * n + c];
        if (f == 0.0) continue;
        for (int k = c; k < n; ++k) mat[r * n + k] -= f * mat[c * n + k];
        rhs[r] -= f * rhs[c];
      }
    }
    if (ok) {
      for (int r = n - 1; r >= 0; --r) {
        double s = rhs[r];
        for (int k = r + 1; k < n; ++k) s -= mat[r * n + k] * x[k];
        x[r] = s / mat[r * n + r];
      }
      bool feas = true;
      for (int j = 0; j < n && feas; ++j)
        feas = x[j] >= lp.vars[j].lb - 1e-7 && x[j] <= lp.vars[j].ub + 1e-7;
      for (int i = 0; i < m && feas; ++i) {
        double lhs = 0.0;
        for (auto [j, c] : lp.rows[i].coef) lhs += c * x[j];
        switch (lp.rows[i].rel) {
          case Relation::le: feas = lhs <= lp.rows[i].rhs + 1e-7; break;
          case Relation::ge: feas = lhs >= lp.rows[i].rhs - 1e-7; break;
          case Relation::eq: feas = std::fabs(lhs - lp.rows[i].rhs) <= 1e-7; break;
        }
      }
      if (feas) {
        double obj = 0.0;
        for (int j = 0; j < n; ++j) obj += lp.obj[j] * x[j];
        if (!found || (maximize ? obj > best : obj < best)) best = obj;
        found = true;
      }
    }

    // next n-combination of plane indices
    int k = n - 1;
    while (k >= 0 && idx[k] == P - n + k) --k;
    if (k < 0) break;
    ++idx[k];
    for (int i = k + 1; i < n; ++i) idx[i] = idx[i - 1] + 1;
  }
  return {found, best};
}

LpCheck integer_enumeration_optimum(const LinearProgram& lp) {
  const int n = static_cast<int>(lp.vars.size());
  std::vector<long> lo(n), hi(n);
  double grid = 1.0;
  for (int j = 0; j < n; ++j) {
    const auto& v = lp.vars[j];
    if (!v.integer || !std::isfinite(v.lb) || !std::isfinite(v.ub))
      throw std::logic_error("integer oracle needs bounded integer variables");
    lo[j] = static_cast<long>(std::ceil(v.lb - 1e-9));
    hi[j] = static_cast<long>(std::floor(v.ub + 1e-9));
    if (lo[j] > hi[j]) return {false, 0.0};
    grid *= static_cast<double>(hi[j] - lo[j] + 1);
    if (grid > 4e6) throw std::logic_error("integer oracle grid too large");
  }

  const bool maximize = lp.sense == ObjSense::maximize;
  bool found = false;
  double best = 0.0;
  std::vector<long> x(lo);
  while (true) {
    bool feas = true;
    for (const auto& row : lp.rows) {
      double lhs = 0.0;
      for (auto [j, c] : row.coef) lhs += c * x[j];
      bool ok = true;
      switch (row.rel) {
        case Relation::le: ok = lhs <= row.rhs + 1e-9; break;
        case Relation::ge: ok = lhs >= row.rhs - 1e-9; break;
        case Relation::eq: ok = std::fabs(lhs - row.rhs) <= 1e-9; break;
      }
      if (!ok) {
        feas = false;
        break;
      }
    }
    if (feas) {
      double obj = 0.0;
      for (int j = 0; j < n; ++j) obj += lp.obj[j] * x[j];
      if (!found || (maximize ? obj > best : obj < best)) best = obj;
      found = true;
    }
    int k = 0;
    while (k < n && ++x[k] > hi[k]) x[k++] = lo[k];
    if (k == n) break;
  }
  return {found, best};
}

double packing_enumeration_optimum(const Network& net,
                                   const std::vector<DynamicDemand>& trace,
                                   const OnlineOptions& opt) {
  if (trace.size() > 12)
    throw std::logic_error("packing oracle expects short traces");
  SplitGraph g = opt.uniform_ratio > 0.0
                     ? split_compute_nodes(net, opt.uniform_ratio)
                     : split_compute_nodes(net);

  struct Entry {
    std::vector<CandidatePath> cands;
    std::vector<int> slots;
    double h = 0.0;
    double value = 0.0;  // tau * h
  };
  std::vector<Entry> entries;
  int horizon = 0;
  for (const auto& dd : trace) {
    Entry en;
    en.cands = generate_candidate_paths(g, dd.demand, opt.K);
    en.slots = dd.active_slots(opt.slot_len);
    en.h = dd.demand.volume;
    en.value = en.h * static_cast<double>(en.slots.size());
    for (int s : en.slots) horizon = std::max(horizon, s + 1);
    entries.push_back(std::move(en));
  }

  std::vector<std::vector<double>> load(
      g.links.size(), std::vector<double>(std::max(horizon, 1), 0.0));
  double best = 0.0;

  // suffix value sums for the branch bound
  std::vector<double> suffix(entries.size() + 1, 0.0);
  for (int i = static_cast<int>(entries.size()) - 1; i >= 0; --i)
    suffix[i] = suffix[i + 1] + entries[i].value;

  auto rec = [&](auto&& self, std::size_t i, double acc) -> void {
    if (acc + suffix[i] <= best) return;
    if (i == entries.size()) {
      best = std::max(best, acc);
      return;
    }
    const Entry& en = entries[i];
    for (const auto& c : en.cands) {
      bool fits = true;
      for (std::size_t k = 0; k < c.links.size() && fits; ++k) {
        double add = en.h * c.delta[k];
        for (int s : en.slots)
          if (load[c.links[k]][s] + add >
              g.links[c.links[k]].capacity + 1e-9) {
            fits = false;
            break;
          }
      }
      if (!fits) continue;
      for (std::size_t k = 0; k < c.links.size(); ++k)
        for (int s : en.slots) load[c.links[k]][s] += en.h * c.delta[k];
      self(self, i + 1, acc + en.value);
      for (std::size_t k = 0; k < c.links.size(); ++k)
        for (int s : en.slots) load[c.links[k]][s] -= en.h * c.delta[k];
    }
    self(self, i + 1, acc);  // rejection branch
  };
  rec(rec, 0, 0.0);
  return best;
}

}  // namespace rinp::oracle
