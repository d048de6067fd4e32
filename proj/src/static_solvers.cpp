#include "rinp/static_solvers.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <numeric>
#include <stdexcept>
#include <string>

namespace rinp {

namespace {

std::string idx2(const char* p, int a, int b) {
  return std::string(p) + std::to_string(a) + "_" + std::to_string(b);
}
std::string idx3(const char* p, int a, int b, int c) {
  return idx2(p, a, b) + "_" + std::to_string(c);
}
std::string idx4(const char* p, int a, int b, int c, int d) {
  return idx3(p, a, b, c) + "_" + std::to_string(d);
}

void require_piecewise(const FormulationOptions& opt) {
  opt.delay.validate();
  if (opt.delay.kind != DelayModel::Kind::piecewise)
    throw std::invalid_argument(
        "exact solvers linearize the delay; pass a piecewise delay model");
}

// f_e variables capped at u_max*C_e plus epigraph variables t_e bounded below
// by every tangent of f/(C-f): t >= f/(C(1-u)^2) - u^2/(1-u)^2.
std::vector<int> add_flow_objective(LinearProgram& lp, const Network& net,
                                    const FormulationOptions& opt) {
  const double umax = opt.delay.u_max();
  std::vector<int> fvar(net.link_count());
  for (int e = 0; e < net.link_count(); ++e) {
    const Link& link = net.links[e];
    fvar[e] = lp.add_var("f" + std::to_string(e), 0.0, umax * link.capacity);
    int te = lp.add_var("t" + std::to_string(e), 0.0, kInf);
    lp.set_obj(te, 1.0);
    for (double u : opt.delay.breakpoints) {
      double denom = (1.0 - u) * (1.0 - u);
      double slope = 1.0 / (link.capacity * denom);
      double icept = -u * u / denom;
      lp.add_row({{te, 1.0}, {fvar[e], -slope}}, Relation::ge, icept);
    }
    if (opt.include_propagation && link.prop_delay != 0.0)
      lp.add_obj(fvar[e], link.prop_delay);
  }
  return fvar;
}

bool reachable(const Network& net, int from, int to) {
  if (from == to) return true;
  std::vector<char> seen(net.node_count(), 0);
  std::deque<int> q{from};
  seen[from] = 1;
  while (!q.empty()) {
    int v = q.front();
    q.pop_front();
    for (int e : net.out_links(v)) {
      if (net.links[e].capacity <= 0.0) continue;
      int w = net.links[e].dst;
      if (seen[w]) continue;
      if (w == to) return true;
      seen[w] = 1;
      q.push_back(w);
    }
  }
  return false;
}

}  // namespace

std::string diagnose_infeasibility(const Network& net,
                                   const std::vector<Demand>& demands,
                                   const FormulationOptions& opt) {
  for (const auto& d : demands) {
    if (!reachable(net, d.src, d.dst)) return "connectivity";
    for (int r = 0; r < net.resource_count(); ++r) {
      if (r >= static_cast<int>(d.work.size()) || d.work[r] <= 0.0) continue;
      bool ok = false;
      for (int v : net.compute_nodes(r))
        if (reachable(net, d.src, v) && reachable(net, v, d.dst)) {
          ok = true;
          break;
        }
      if (!ok) return "connectivity";
    }
  }
  for (int r = 0; r < net.resource_count(); ++r) {
    double want = 0.0, have = 0.0;
    for (const auto& d : demands)
      if (r < static_cast<int>(d.work.size())) want += d.work[r];
    for (int v = 0; v < net.node_count(); ++v) have += net.usable_compute(r, v);
    if (opt.provision_budget > 0.0)
      have = std::max(have, opt.provision_budget * net.utilization_bound[r]);
    if (want > have + 1e-9) return "compute";
  }
  return "bandwidth";
}

// ---------------------------------------------------------------------------
// exact walk routing

namespace {

struct WalkModel {
  LinearProgram lp;
  std::vector<int> fvar;
  std::vector<std::vector<int>> uvar, evar;
  // yvar[d][r][e], wvar[d][r][v], kvar[d][r][v]; -1 or empty where absent
  std::vector<std::vector<std::vector<int>>> yvar, wvar, kvar;
  bool no_eligible_node = false;  // single_node demand without any candidate
};

WalkModel build_walk_model(const Network& net,
                           const std::vector<Demand>& demands,
                           const FormulationOptions& opt) {
  const int E = net.link_count();
  const int V = net.node_count();
  const int R = net.resource_count();
  const int D = static_cast<int>(demands.size());
  const double Bu = 2.0 * E;  // traversal-count cap

  WalkModel m;
  m.lp.sense = ObjSense::minimize;
  m.fvar = add_flow_objective(m.lp, net, opt);
  m.uvar.resize(D);
  m.evar.resize(D);
  m.yvar.resize(D);
  m.wvar.resize(D);
  m.kvar.resize(D);

  for (int i = 0; i < D; ++i) {
    const Demand& d = demands[i];
    m.uvar[i].resize(E);
    m.evar[i].resize(E);
    for (int e = 0; e < E; ++e) {
      m.uvar[i][e] = m.lp.add_var(idx2("u", i, e), 0.0, Bu, true);
      m.evar[i][e] = m.lp.add_var(idx2("e", i, e), 0.0, 1.0, true);
      m.lp.add_row({{m.evar[i][e], 1.0}, {m.uvar[i][e], -1.0}}, Relation::le,
                   0.0);
      m.lp.add_row({{m.uvar[i][e], 1.0}, {m.evar[i][e], -Bu}}, Relation::le,
                   0.0);
    }
    // walk balance: one net departure at src, one net arrival at dst
    for (int v = 0; v < V; ++v) {
      std::vector<std::pair<int, double>> row;
      for (int e : net.out_links(v)) row.push_back({m.uvar[i][e], 1.0});
      for (int e : net.in_links(v)) row.push_back({m.uvar[i][e], -1.0});
      double rhs = v == d.src ? 1.0 : v == d.dst ? -1.0 : 0.0;
      m.lp.add_row(std::move(row), Relation::eq, rhs);
    }

    m.yvar[i].assign(R, {});
    m.wvar[i].assign(R, {});
    m.kvar[i].assign(R, {});
    for (int r = 0; r < R; ++r) {
      double W = r < static_cast<int>(d.work.size()) ? d.work[r] : 0.0;
      if (W <= 0.0) continue;
      if (d.mode == ProcessingMode::single_node) {
        // one visited interior node takes the whole type-r work; the carried
        // work flow below keeps the picked node connected to the source side
        // of the walk, otherwise an isolated cycle could satisfy the pick row
        m.kvar[i][r].assign(V, -1);
        std::vector<std::pair<int, double>> pick;
        for (int v = 0; v < V; ++v) {
          if (v == d.src || v == d.dst || !net.is_compute(r, v)) continue;
          int kv = m.lp.add_var(idx3("k", i, r, v), 0.0, 1.0, true);
          m.kvar[i][r][v] = kv;
          pick.push_back({kv, 1.0});
          std::vector<std::pair<int, double>> row{{kv, 1.0}};
          for (int e : net.out_links(v)) row.push_back({m.evar[i][e], -1.0});
          m.lp.add_row(std::move(row), Relation::le, 0.0);
        }
        if (pick.empty()) {
          m.no_eligible_node = true;
          return m;
        }
        m.lp.add_row(std::move(pick), Relation::eq, 1.0);
        m.yvar[i][r].assign(E, -1);
        for (int e = 0; e < E; ++e) {
          int yv = m.lp.add_var(idx3("y", i, r, e), 0.0, W);
          m.yvar[i][r][e] = yv;
          m.lp.add_row({{yv, 1.0}, {m.evar[i][e], -W}}, Relation::le, 0.0);
        }
        for (int v = 0; v < V; ++v) {
          std::vector<std::pair<int, double>> row;
          for (int e : net.out_links(v)) row.push_back({m.yvar[i][r][e], 1.0});
          for (int e : net.in_links(v)) row.push_back({m.yvar[i][r][e], -1.0});
          if (m.kvar[i][r][v] >= 0) row.push_back({m.kvar[i][r][v], W});
          m.lp.add_row(std::move(row), Relation::eq, v == d.src ? W : 0.0);
        }
        continue;
      }
      m.yvar[i][r].assign(E, -1);
      for (int e = 0; e < E; ++e) {
        int yv = m.lp.add_var(idx3("y", i, r, e), 0.0, W);
        m.yvar[i][r][e] = yv;
        m.lp.add_row({{yv, 1.0}, {m.evar[i][e], -W}}, Relation::le, 0.0);
      }
      m.wvar[i][r].assign(V, -1);
      for (int v = 0; v < V; ++v) {
        if (v == d.src || v == d.dst || !net.is_compute(r, v)) continue;
        m.wvar[i][r][v] =
            m.lp.add_var(idx3("w", i, r, v), 0.0, net.usable_compute(r, v));
      }
      // unprocessed-work balance: out - in + processed = W at src, 0 else
      for (int v = 0; v < V; ++v) {
        std::vector<std::pair<int, double>> row;
        for (int e : net.out_links(v)) row.push_back({m.yvar[i][r][e], 1.0});
        for (int e : net.in_links(v)) row.push_back({m.yvar[i][r][e], -1.0});
        if (m.wvar[i][r][v] >= 0) row.push_back({m.wvar[i][r][v], 1.0});
        m.lp.add_row(std::move(row), Relation::eq, v == d.src ? W : 0.0);
      }
    }
  }

  for (int e = 0; e < E; ++e) {
    std::vector<std::pair<int, double>> row{{m.fvar[e], -1.0}};
    for (int i = 0; i < D; ++i)
      row.push_back({m.uvar[i][e], demands[i].volume});
    m.lp.add_row(std::move(row), Relation::eq, 0.0);
  }
  for (int r = 0; r < R; ++r) {
    for (int v : net.compute_nodes(r)) {
      std::vector<std::pair<int, double>> row;
      for (int i = 0; i < D; ++i) {
        if (!m.wvar[i][r].empty() && m.wvar[i][r][v] >= 0)
          row.push_back({m.wvar[i][r][v], 1.0});
        if (!m.kvar[i][r].empty() && m.kvar[i][r][v] >= 0)
          row.push_back({m.kvar[i][r][v], demands[i].work[r]});
      }
      if (!row.empty())
        m.lp.add_row(std::move(row), Relation::le, net.usable_compute(r, v));
    }
  }
  return m;
}

WalkSolution extract_walk_solution(const Network& net,
                                   const std::vector<Demand>& demands,
                                   const WalkModel& m, const LpSolution& sol) {
  const int E = net.link_count();
  const int V = net.node_count();
  const int R = net.resource_count();
  WalkSolution out;
  out.lp_vars = static_cast<long>(m.lp.vars.size());
  out.lp_rows = static_cast<long>(m.lp.rows.size());
  out.nodes = sol.nodes;
  out.status = sol.status;
  if (sol.status != SolveStatus::optimal) return out;
  out.objective = sol.objective;
  out.flows.assign(E, 0.0);
  for (size_t i = 0; i < demands.size(); ++i) {
    const Demand& d = demands[i];
    DemandWalk dw;
    dw.demand = d.id;
    dw.volume = d.volume;
    dw.u.resize(E);
    dw.eps.resize(E);
    for (int e = 0; e < E; ++e) {
      dw.u[e] = static_cast<int>(std::llround(sol.x[m.uvar[i][e]]));
      dw.eps[e] = dw.u[e] > 0 ? 1 : 0;
      out.flows[e] += d.volume * dw.u[e];
    }
    dw.y.assign(R, std::vector<double>(E, 0.0));
    dw.w.assign(R, std::vector<double>(V, 0.0));
    for (int r = 0; r < R; ++r) {
      if (!m.yvar[i][r].empty())
        for (int e = 0; e < E; ++e)
          if (m.yvar[i][r][e] >= 0) dw.y[r][e] = sol.x[m.yvar[i][r][e]];
      if (!m.wvar[i][r].empty())
        for (int v = 0; v < V; ++v)
          if (m.wvar[i][r][v] >= 0) dw.w[r][v] = sol.x[m.wvar[i][r][v]];
      if (!m.kvar[i][r].empty())
        for (int v = 0; v < V; ++v)
          if (m.kvar[i][r][v] >= 0 && sol.x[m.kvar[i][r][v]] > 0.5)
            dw.w[r][v] = d.work[r];
    }
    dw.walk = extract_walk(net, dw.u, d.src, d.dst);
    out.walks.push_back(std::move(dw));
  }
  return out;
}

void check_walk_inputs(const Network& net, const std::vector<Demand>& demands,
                       const FormulationOptions& opt) {
  require_piecewise(opt);
  if (!net.finalized()) throw std::invalid_argument("network not finalized");
  if (!opt.chain.empty())
    throw std::invalid_argument("chains apply to segment routing only");
  if (opt.provision_budget > 0.0)
    throw std::invalid_argument("provisioning applies to segment routing only");
  for (const auto& d : demands) {
    if (d.src == d.dst)
      throw std::invalid_argument("walk routing needs distinct endpoints");
    if (d.volume <= 0.0)
      throw std::invalid_argument("demand volume must be > 0");
  }
}

WalkSolution infeasible_walk_result(const Network& net,
                                    const std::vector<Demand>& demands,
                                    const FormulationOptions& opt) {
  WalkSolution bad;
  bad.status = SolveStatus::infeasible;
  bad.infeasible_cause = diagnose_infeasibility(net, demands, opt);
  return bad;
}

}  // namespace

WalkSolution solve_mip_rinp(const Network& net,
                            const std::vector<Demand>& demands,
                            const FormulationOptions& opt) {
  check_walk_inputs(net, demands, opt);
  WalkModel m = build_walk_model(net, demands, opt);
  if (m.no_eligible_node) return infeasible_walk_result(net, demands, opt);
  LpSolution sol = solve_mip(m.lp, opt.solver);
  WalkSolution out = extract_walk_solution(net, demands, m, sol);
  if (out.status == SolveStatus::infeasible)
    out.infeasible_cause = diagnose_infeasibility(net, demands, opt);
  return out;
}

WalkSolution solve_mip_k(const Network& net, const std::vector<Demand>& demands,
                         int k, const FormulationOptions& opt) {
  if (k < 1) throw std::invalid_argument("split count must be >= 1");
  check_walk_inputs(net, demands, opt);
  if (k == 1) return solve_mip_rinp(net, demands, opt);

  std::vector<Demand> subs;
  subs.reserve(demands.size() * k);
  for (const auto& d : demands) {
    Demand s = d;
    s.volume = d.volume / k;
    for (auto& w : s.work) w /= k;
    for (int j = 0; j < k; ++j) subs.push_back(s);
  }

  WalkModel m = build_walk_model(net, subs, opt);
  if (m.no_eligible_node) return infeasible_walk_result(net, demands, opt);

  // subflows of one demand are interchangeable; ordering them by a fixed
  // linear score keeps one optimum and removes the k! permutations
  const int E = net.link_count();
  for (size_t d = 0; d < demands.size(); ++d) {
    for (int j = 0; j + 1 < k; ++j) {
      size_t a = d * k + j, b = a + 1;
      std::vector<std::pair<int, double>> row;
      for (int e = 0; e < E; ++e) {
        row.push_back({m.uvar[a][e], static_cast<double>(e + 1)});
        row.push_back({m.uvar[b][e], -static_cast<double>(e + 1)});
      }
      m.lp.add_row(std::move(row), Relation::ge, 0.0);
    }
  }

  SolveOptions sopt = opt.solver;
  if (!std::isfinite(sopt.initial_incumbent)) {
    // replicating the unsplit optimum k times is feasible for every k, so
    // the one-walk objective is a valid cutoff that trims the joint tree
    WalkSolution seed = solve_mip_rinp(net, demands, opt);
    if (seed.status == SolveStatus::optimal)
      sopt.initial_incumbent = seed.objective;
    else if (seed.status == SolveStatus::infeasible)
      return seed;
  }

  LpSolution sol = solve_mip(m.lp, sopt);
  WalkSolution out = extract_walk_solution(net, subs, m, sol);
  if (out.status == SolveStatus::infeasible)
    out.infeasible_cause = diagnose_infeasibility(net, demands, opt);
  for (size_t i = 0; i < out.walks.size(); ++i)
    out.walks[i].demand = demands[i / k].id;
  return out;
}

// ---------------------------------------------------------------------------
// segment routing

namespace {

struct SrContext {
  const Network& net;
  const std::vector<Demand>& demands;
  const FormulationOptions& opt;
  // frozen shares: [demand][node] fixed h_d^z, null when free
  const std::vector<std::vector<double>>* fixed_shares = nullptr;

  LinearProgram lp;
  std::vector<int> fvar;
  std::vector<std::vector<int>> share;             // [d][v] or -1
  std::vector<std::vector<std::vector<int>>> s1;   // [d][z][e]
  std::vector<std::vector<std::vector<int>>> s2;   // [d][z][e]
  std::vector<std::vector<int>> etav;              // [v][e] or empty
  std::vector<std::vector<int>> direct;            // [d][e] for zero-work
  std::vector<int> nz;                             // provisioned capacities
  std::vector<std::vector<std::vector<int>>> arr;  // chain: [d][stage][z]
  std::vector<std::vector<int>> chain_flows;       // [d][segment*E + e]
};

double demand_phi(const Demand& d, const FormulationOptions& opt) {
  return opt.apply_scale ? d.scale : 1.0;
}

void add_direct_flow(SrContext& c, int i) {
  const Demand& d = c.demands[i];
  const int E = c.net.link_count();
  c.direct[i].resize(E);
  for (int e = 0; e < E; ++e)
    c.direct[i][e] = c.lp.add_var(idx2("x0_", i, e), 0.0, kInf);
  for (int v = 0; v < c.net.node_count(); ++v) {
    std::vector<std::pair<int, double>> row;
    for (int e : c.net.out_links(v)) row.push_back({c.direct[i][e], 1.0});
    for (int e : c.net.in_links(v)) row.push_back({c.direct[i][e], -1.0});
    double rhs = 0.0;
    if (v == d.src) rhs += d.volume;
    if (v == d.dst) rhs -= d.volume;
    c.lp.add_row(std::move(row), Relation::eq, rhs);
  }
}

// universal single-type model: shares plus two flow segments per box, or one
// destination-pooled commodity for the post-processing traffic
void build_universal(SrContext& c) {
  const Network& net = c.net;
  const FormulationOptions& opt = c.opt;
  const int E = net.link_count();
  const int V = net.node_count();
  const int D = static_cast<int>(c.demands.size());
  const double rho = net.utilization_bound[0];
  std::vector<int> boxes = net.compute_nodes(0);
  if (boxes.empty())
    for (const auto& d : c.demands)
      if (d.total_work() > 0.0)
        throw std::invalid_argument("no processing-capable node");

  if (opt.provision_budget > 0.0) {
    std::vector<std::pair<int, double>> budget;
    c.nz.assign(V, -1);
    for (int z : boxes) {
      c.nz[z] =
          c.lp.add_var("N" + std::to_string(z), 0.0, opt.provision_budget);
      budget.push_back({c.nz[z], 1.0});
    }
    c.lp.add_row(std::move(budget), Relation::le, opt.provision_budget);
  }

  c.share.assign(D, std::vector<int>(V, -1));
  c.s1.resize(D);
  c.s2.resize(D);

  for (int i = 0; i < D; ++i) {
    const Demand& d = c.demands[i];
    double W = d.work.empty() ? 0.0 : d.work[0];
    if (W <= 0.0) {
      add_direct_flow(c, i);
      continue;
    }
    double phi = demand_phi(d, opt);
    std::vector<std::pair<int, double>> total;
    for (int z : boxes) {
      double lb = 0.0, ub = d.volume;
      if (c.fixed_shares) lb = ub = (*c.fixed_shares)[i][z];
      c.share[i][z] = c.lp.add_var(idx2("h", i, z), lb, ub);
      total.push_back({c.share[i][z], 1.0});
    }
    c.lp.add_row(std::move(total), Relation::eq, d.volume);

    c.s1[i].assign(V, {});
    for (int z : boxes) {
      auto& seg = c.s1[i][z];
      seg.resize(E);
      for (int e = 0; e < E; ++e)
        seg[e] = c.lp.add_var(idx3("x1_", i, z, e), 0.0, kInf);
      for (int v = 0; v < V; ++v) {
        std::vector<std::pair<int, double>> row;
        for (int e : net.out_links(v)) row.push_back({seg[e], 1.0});
        for (int e : net.in_links(v)) row.push_back({seg[e], -1.0});
        double coef = 0.0;  // injection h_d^z moved to the left side
        if (v == d.src) coef -= 1.0;
        if (v == z) coef += 1.0;
        if (coef != 0.0) row.push_back({c.share[i][z], coef});
        c.lp.add_row(std::move(row), Relation::eq, 0.0);
      }
    }

    if (!opt.aggregate_second_segment) {
      c.s2[i].assign(V, {});
      for (int z : boxes) {
        auto& seg = c.s2[i][z];
        seg.resize(E);
        for (int e = 0; e < E; ++e)
          seg[e] = c.lp.add_var(idx3("x2_", i, z, e), 0.0, kInf);
        for (int v = 0; v < V; ++v) {
          std::vector<std::pair<int, double>> row;
          for (int e : net.out_links(v)) row.push_back({seg[e], 1.0});
          for (int e : net.in_links(v)) row.push_back({seg[e], -1.0});
          double coef = 0.0;
          if (v == z) coef -= phi;
          if (v == d.dst) coef += phi;
          if (coef != 0.0) row.push_back({c.share[i][z], coef});
          c.lp.add_row(std::move(row), Relation::eq, 0.0);
        }
      }
    }
  }

  if (opt.aggregate_second_segment) {
    c.etav.assign(V, {});
    std::vector<char> is_dest(V, 0);
    for (const auto& d : c.demands)
      if (!d.work.empty() && d.work[0] > 0.0) is_dest[d.dst] = 1;
    for (int t = 0; t < V; ++t) {
      if (!is_dest[t]) continue;
      auto& seg = c.etav[t];
      seg.resize(E);
      for (int e = 0; e < E; ++e)
        seg[e] = c.lp.add_var(idx2("g", t, e), 0.0, kInf);
      for (int v = 0; v < V; ++v) {
        std::vector<std::pair<int, double>> row;
        for (int e : net.out_links(v)) row.push_back({seg[e], 1.0});
        for (int e : net.in_links(v)) row.push_back({seg[e], -1.0});
        double rhs = 0.0;
        for (int i = 0; i < D; ++i) {
          const Demand& d = c.demands[i];
          if (d.dst != t || d.work.empty() || d.work[0] <= 0.0) continue;
          double phi = demand_phi(d, opt);
          // each box's scaled output feeds the pool; the whole scaled volume
          // drains at the destination, additively when a box is the dest
          if (c.share[i][v] >= 0) row.push_back({c.share[i][v], -phi});
          if (v == t) rhs -= phi * d.volume;
        }
        c.lp.add_row(std::move(row), Relation::eq, rhs);
      }
    }
  }

  for (int z : boxes) {
    std::vector<std::pair<int, double>> row;
    for (int i = 0; i < D; ++i) {
      const Demand& d = c.demands[i];
      if (c.share[i][z] < 0) continue;
      row.push_back({c.share[i][z], d.work[0] / d.volume});
    }
    double rhs = rho * net.nodes[z].compute[0];
    if (!c.nz.empty() && c.nz[z] >= 0) {
      row.push_back({c.nz[z], -rho});
      rhs = 0.0;
    }
    if (!row.empty()) c.lp.add_row(std::move(row), Relation::le, rhs);
  }

  for (int e = 0; e < E; ++e) {
    std::vector<std::pair<int, double>> row{{c.fvar[e], -1.0}};
    for (int i = 0; i < D; ++i) {
      if (!c.direct[i].empty()) row.push_back({c.direct[i][e], 1.0});
      for (int z : boxes) {
        if (!c.s1[i].empty() && !c.s1[i][z].empty())
          row.push_back({c.s1[i][z][e], 1.0});
        if (!c.s2[i].empty() && !c.s2[i][z].empty())
          row.push_back({c.s2[i][z][e], 1.0});
      }
    }
    if (!c.etav.empty())
      for (int v = 0; v < V; ++v)
        if (!c.etav[v].empty()) row.push_back({c.etav[v][e], 1.0});
    c.lp.add_row(std::move(row), Relation::eq, 0.0);
  }
}

// ordered heterogeneous stages: per-stage arrivals, pairwise mid-segment
// volumes, per-stage output scaling, work proportional to processed share
void build_chain(SrContext& c) {
  const Network& net = c.net;
  const FormulationOptions& opt = c.opt;
  const int E = net.link_count();
  const int V = net.node_count();
  const int D = static_cast<int>(c.demands.size());
  const int n = static_cast<int>(opt.chain.size());

  std::vector<int> stage_type(n);
  std::vector<std::vector<int>> P(n);
  for (int i = 0; i < n; ++i) {
    int r = -1;
    for (int j = 0; j < net.resource_count(); ++j)
      if (net.resource_types[j] == opt.chain[i].resource) r = j;
    if (r < 0)
      throw std::invalid_argument("chain stage resource not in network: " +
                                  opt.chain[i].resource);
    stage_type[i] = r;
    P[i] = net.compute_nodes(r);
    if (P[i].empty())
      throw std::invalid_argument("no node carries chain resource " +
                                  opt.chain[i].resource);
  }
  for (const auto& d : c.demands)
    for (int r = 0; r < net.resource_count(); ++r) {
      if (r >= static_cast<int>(d.work.size()) || d.work[r] <= 0.0) continue;
      if (std::find(stage_type.begin(), stage_type.end(), r) ==
          stage_type.end())
        throw std::invalid_argument("demand work for resource " +
                                    net.resource_types[r] +
                                    " has no chain stage");
    }

  c.arr.assign(D, {});
  c.share.assign(D, std::vector<int>(V, -1));
  c.chain_flows.assign(D, {});

  for (int i = 0; i < D; ++i) {
    const Demand& d = c.demands[i];
    if (d.total_work() <= 0.0) {
      add_direct_flow(c, i);
      continue;
    }
    // per-stage output ratios; the demand's own factor folds into the last
    std::vector<double> sigma(n);
    for (int j = 0; j < n; ++j) {
      sigma[j] = opt.chain[j].scale;
      if (j == n - 1) sigma[j] *= demand_phi(d, opt);
    }

    c.arr[i].assign(n, std::vector<int>(V, -1));
    for (int j = 0; j < n; ++j)
      for (int z : P[j])
        c.arr[i][j][z] = c.lp.add_var(idx3("a", i, j, z), 0.0, kInf);
    for (int z : P[0]) c.share[i][z] = c.arr[i][0][z];

    {
      std::vector<std::pair<int, double>> row;
      for (int z : P[0]) row.push_back({c.arr[i][0][z], 1.0});
      c.lp.add_row(std::move(row), Relation::eq, d.volume);
    }

    auto add_segment = [&](int tag, int seg_idx, int from, int to, int volvar,
                           double mult) {
      std::vector<int> flow(E);
      for (int e = 0; e < E; ++e)
        flow[e] = c.lp.add_var(idx4("q", i, tag, seg_idx, e), 0.0, kInf);
      for (int v = 0; v < V; ++v) {
        std::vector<std::pair<int, double>> row;
        for (int e : net.out_links(v)) row.push_back({flow[e], 1.0});
        for (int e : net.in_links(v)) row.push_back({flow[e], -1.0});
        double coef = 0.0;
        if (v == from) coef -= mult;
        if (v == to) coef += mult;
        if (coef != 0.0) row.push_back({volvar, coef});
        c.lp.add_row(std::move(row), Relation::eq, 0.0);
      }
      for (int e = 0; e < E; ++e) c.chain_flows[i].push_back(flow[e]);
    };

    for (int z : P[0]) add_segment(0, z, d.src, z, c.arr[i][0][z], 1.0);

    for (int j = 0; j + 1 < n; ++j) {
      // pairwise hand-off volumes between consecutive stages
      std::vector<std::vector<int>> mv(V, std::vector<int>(V, -1));
      for (int z : P[j])
        for (int zp : P[j + 1]) {
          mv[z][zp] = c.lp.add_var(idx4("m", i, j, z, zp), 0.0, kInf);
          add_segment(1 + j, z * V + zp, z, zp, mv[z][zp], 1.0);
        }
      for (int z : P[j]) {
        // what leaves a box is the scaled amount that arrived there
        std::vector<std::pair<int, double>> row{{c.arr[i][j][z], -sigma[j]}};
        for (int zp : P[j + 1]) row.push_back({mv[z][zp], 1.0});
        c.lp.add_row(std::move(row), Relation::eq, 0.0);
      }
      for (int zp : P[j + 1]) {
        std::vector<std::pair<int, double>> row{{c.arr[i][j + 1][zp], -1.0}};
        for (int z : P[j]) row.push_back({mv[z][zp], 1.0});
        c.lp.add_row(std::move(row), Relation::eq, 0.0);
      }
    }

    for (int z : P[n - 1])
      add_segment(1 + n, z, z, d.dst, c.arr[i][n - 1][z], sigma[n - 1]);
  }

  // work per stage: arrivals are measured in post-previous-stage units, so
  // the processed fraction of W_r at box z is arr / (volume * cum_j)
  for (int r = 0; r < net.resource_count(); ++r) {
    for (int z : net.compute_nodes(r)) {
      std::vector<std::pair<int, double>> row;
      for (int i = 0; i < D; ++i) {
        const Demand& d = c.demands[i];
        if (c.arr[i].empty()) continue;
        std::vector<double> cum(n + 1, 1.0);
        for (int j = 0; j < n; ++j) {
          double s = opt.chain[j].scale;
          if (j == n - 1) s *= demand_phi(d, opt);
          cum[j + 1] = cum[j] * s;
        }
        for (int j = 0; j < n; ++j) {
          if (stage_type[j] != r || c.arr[i][j][z] < 0) continue;
          double W = r < static_cast<int>(d.work.size()) ? d.work[r] : 0.0;
          if (W <= 0.0) continue;
          row.push_back({c.arr[i][j][z], W / (d.volume * cum[j])});
        }
      }
      if (!row.empty())
        c.lp.add_row(std::move(row), Relation::le,
                     net.utilization_bound[r] * net.nodes[z].compute[r]);
    }
  }

  for (int e = 0; e < E; ++e) {
    std::vector<std::pair<int, double>> row{{c.fvar[e], -1.0}};
    for (int i = 0; i < D; ++i) {
      if (!c.direct[i].empty()) row.push_back({c.direct[i][e], 1.0});
      size_t count = c.chain_flows[i].size() / E;
      for (size_t s = 0; s < count; ++s)
        row.push_back({c.chain_flows[i][s * E + e], 1.0});
    }
    c.lp.add_row(std::move(row), Relation::eq, 0.0);
  }
}

SplitSolution run_sr(SrContext& c) {
  const Network& net = c.net;
  const int E = net.link_count();
  const int V = net.node_count();
  const int D = static_cast<int>(c.demands.size());

  c.fvar = add_flow_objective(c.lp, net, c.opt);
  c.direct.assign(D, {});
  if (c.opt.chain.empty())
    build_universal(c);
  else
    build_chain(c);

  LpSolution sol = solve_lp(c.lp, c.opt.solver);
  SplitSolution out;
  out.lp_vars = static_cast<long>(c.lp.vars.size());
  out.lp_rows = static_cast<long>(c.lp.rows.size());
  out.status = sol.status;
  if (sol.status != SolveStatus::optimal) {
    if (sol.status == SolveStatus::infeasible)
      out.infeasible_cause = diagnose_infeasibility(net, c.demands, c.opt);
    return out;
  }
  out.objective = sol.objective;
  out.flows.assign(E, 0.0);
  for (int e = 0; e < E; ++e) out.flows[e] = sol.x[c.fvar[e]];

  out.shares.assign(D, std::vector<double>(V, 0.0));
  for (int i = 0; i < D; ++i)
    for (int v = 0; v < V; ++v)
      if (c.share[i][v] >= 0) out.shares[i][v] = sol.x[c.share[i][v]];

  auto grab = [&](const std::vector<std::vector<std::vector<int>>>& vars,
                  std::vector<std::vector<std::vector<double>>>& dst) {
    dst.assign(D, {});
    for (int i = 0; i < D; ++i) {
      if (vars[i].empty()) continue;
      dst[i].assign(V, {});
      for (int z = 0; z < V; ++z) {
        if (vars[i][z].empty()) continue;
        dst[i][z].resize(E);
        for (int e = 0; e < E; ++e) dst[i][z][e] = sol.x[vars[i][z][e]];
      }
    }
  };
  if (c.opt.chain.empty()) {
    grab(c.s1, out.seg1);
    grab(c.s2, out.seg2);
    if (!c.etav.empty()) {
      out.eta.assign(V, {});
      for (int v = 0; v < V; ++v) {
        if (c.etav[v].empty()) continue;
        out.eta[v].resize(E);
        for (int e = 0; e < E; ++e) out.eta[v][e] = sol.x[c.etav[v][e]];
      }
    }
  } else {
    out.stage_arrivals.assign(D, {});
    for (int i = 0; i < D; ++i) {
      if (c.arr[i].empty()) continue;
      out.stage_arrivals[i].assign(c.arr[i].size(),
                                   std::vector<double>(V, 0.0));
      for (size_t j = 0; j < c.arr[i].size(); ++j)
        for (int v = 0; v < V; ++v)
          if (c.arr[i][j][v] >= 0)
            out.stage_arrivals[i][j][v] = sol.x[c.arr[i][j][v]];
    }
  }
  if (!c.nz.empty()) {
    out.provisioned.assign(V, 0.0);
    for (int v = 0; v < V; ++v)
      if (c.nz[v] >= 0) out.provisioned[v] = sol.x[c.nz[v]];
  }
  return out;
}

void check_sr_inputs(const Network& net, const std::vector<Demand>& demands,
                     const FormulationOptions& opt) {
  require_piecewise(opt);
  if (!net.finalized()) throw std::invalid_argument("network not finalized");
  if (opt.chain.empty() && net.resource_count() != 1)
    throw std::invalid_argument(
        "universal segment routing expects one resource type; pass a chain");
  if (!opt.chain.empty() && opt.aggregate_second_segment)
    throw std::invalid_argument("aggregation applies to the two-segment model");
  if (!opt.chain.empty() && opt.provision_budget > 0.0)
    throw std::invalid_argument("provisioning applies to the two-segment model");
  for (const auto& d : demands)
    if (d.volume <= 0.0)
      throw std::invalid_argument("demand volume must be > 0");
}

}  // namespace

SplitSolution solve_sr_infinite(const Network& net,
                                const std::vector<Demand>& demands,
                                const FormulationOptions& opt) {
  check_sr_inputs(net, demands, opt);
  SrContext c{net, demands, opt};
  return run_sr(c);
}

SplitSolution greedy_alloc_baseline(const Network& net,
                                    const std::vector<Demand>& demands,
                                    const FormulationOptions& opt) {
  check_sr_inputs(net, demands, opt);
  if (!opt.chain.empty())
    throw std::invalid_argument(
        "allocation baseline works on the universal model");
  const int V = net.node_count();
  const int D = static_cast<int>(demands.size());

  // biggest work first to the node with the most room, spilling when full
  std::vector<double> remaining(V, 0.0);
  for (int v : net.compute_nodes(0)) remaining[v] = net.usable_compute(0, v);
  std::vector<int> order(D);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    double wa = demands[a].work.empty() ? 0.0 : demands[a].work[0];
    double wb = demands[b].work.empty() ? 0.0 : demands[b].work[0];
    return wa > wb;
  });

  std::vector<std::vector<double>> shares(D, std::vector<double>(V, 0.0));
  for (int i : order) {
    const Demand& d = demands[i];
    double W = d.work.empty() ? 0.0 : d.work[0];
    if (W <= 0.0) continue;
    double left = W;
    while (left > 1e-12) {
      int best = -1;
      for (int v = 0; v < V; ++v)
        if (remaining[v] > 1e-12 &&
            (best < 0 || remaining[v] > remaining[best]))
          best = v;
      if (best < 0) {
        SplitSolution bad;
        bad.status = SolveStatus::infeasible;
        bad.infeasible_cause = "compute";
        return bad;
      }
      double take = std::min(left, remaining[best]);
      remaining[best] -= take;
      left -= take;
      shares[i][best] += d.volume * take / W;
    }
  }

  SrContext c{net, demands, opt, &shares};
  SplitSolution out = run_sr(c);
  if (out.status == SolveStatus::infeasible) {
    SplitSolution free_sol = solve_sr_infinite(net, demands, opt);
    if (free_sol.status == SolveStatus::optimal)
      out.infeasible_cause = "frozen-allocation";
  }
  return out;
}

}  // namespace rinp
