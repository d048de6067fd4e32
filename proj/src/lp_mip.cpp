#include "rinp/lp.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <queue>
#include <set>
#include <stdexcept>
#include <vector>

namespace rinp {

namespace {

struct BnbNode {
  // bound changes relative to the root program, applied in order
  std::vector<std::pair<int, std::pair<double, double>>> fixes;
  double parent_key;  // parent LP objective in minimize space
  long id;
};

struct WorseBound {
  bool operator()(const BnbNode& a, const BnbNode& b) const {
    if (a.parent_key != b.parent_key) return a.parent_key > b.parent_key;
    return a.id > b.id;
  }
};

int most_fractional(const LinearProgram& lp, const std::vector<double>& x,
                    double int_tol) {
  int pick = -1;
  double best = int_tol;
  for (size_t j = 0; j < lp.vars.size(); ++j) {
    if (!lp.vars[j].integer) continue;
    double frac = x[j] - std::floor(x[j]);
    double dist = std::min(frac, 1.0 - frac);
    if (dist > best) {
      best = dist;
      pick = static_cast<int>(j);
    }
  }
  return pick;
}

// Knapsack cover cuts over <= rows whose support is all binary with positive
// coefficients. Binaries tied together by a "sum <= 1" row count as one item
// whose weight is the smallest member coefficient, since at most one member
// can be active: if the chosen item weights already exceed the rhs, at most
// |cover|-1 of those items can be active, extended by every item at least as
// heavy as the heaviest cover member. Cuts stay valid for every integer
// point, so they are added once at the root and kept for the whole tree.
// var -> index of one "sum <= 1" row over plain binaries that contains it
std::vector<int> gub_membership(const LinearProgram& work) {
  std::vector<int> gub(work.vars.size(), -1);
  for (std::size_t r = 0; r < work.rows.size(); ++r) {
    const auto& row = work.rows[r];
    if (row.rel != Relation::le || row.rhs != 1.0) continue;
    bool plain = true;
    for (const auto& [j, c] : row.coef)
      if (c != 1.0 || !work.vars[j].integer || work.vars[j].lb != 0.0 ||
          work.vars[j].ub != 1.0) {
        plain = false;
        break;
      }
    if (!plain) continue;
    for (const auto& [j, c] : row.coef)
      if (gub[j] < 0) gub[j] = static_cast<int>(r);
  }
  return gub;
}

int separate_cover_cuts(LinearProgram& work, const std::vector<double>& x,
                        std::set<std::vector<int>>& seen, int max_cuts) {
  std::vector<int> gub = gub_membership(work);

  int added = 0;
  const std::size_t snapshot = work.rows.size();
  for (std::size_t r = 0; r < snapshot && added < max_cuts; ++r) {
    const auto& row = work.rows[r];
    if (row.rel != Relation::le || row.rhs <= 0.0 || row.coef.empty())
      continue;
    bool knapsack = true;
    for (const auto& [j, c] : row.coef) {
      if (c <= 0.0 || !work.vars[j].integer || work.vars[j].lb != 0.0 ||
          work.vars[j].ub != 1.0) {
        knapsack = false;
        break;
      }
    }
    if (!knapsack) continue;

    struct Item {
      double weight = 0.0, value = 0.0;  // min coef, sum of relaxation values
      std::vector<int> vars;
    };
    std::map<int, Item> grouped;  // key: gub row or -(var+2) for singletons
    for (const auto& [j, c] : row.coef) {
      int key = gub[j] >= 0 && gub[j] != static_cast<int>(r) ? gub[j] : -(j + 2);
      Item& it = grouped[key];
      it.weight = it.vars.empty() ? c : std::min(it.weight, c);
      it.value += x[j];
      it.vars.push_back(j);
    }
    std::vector<Item> items;
    items.reserve(grouped.size());
    for (auto& [key, it] : grouped) items.push_back(std::move(it));

    // greedy most-violated cover: cheapest (1 - value)/weight first
    std::vector<int> order(items.size());
    for (std::size_t k = 0; k < order.size(); ++k) order[k] = static_cast<int>(k);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
      double ka = (1.0 - items[a].value) / items[a].weight;
      double kb = (1.0 - items[b].value) / items[b].weight;
      if (ka != kb) return ka < kb;
      return items[a].vars.front() < items[b].vars.front();
    });
    std::vector<int> cover;
    double suma = 0.0;
    for (int k : order) {
      cover.push_back(k);
      suma += items[k].weight;
      if (suma > row.rhs + 1e-9) break;
    }
    if (suma <= row.rhs + 1e-9) continue;  // row can never be violated
    for (std::size_t k = 0; k < cover.size();) {  // keep the cover minimal
      double a = items[cover[k]].weight;
      if (suma - a > row.rhs + 1e-9) {
        suma -= a;
        cover.erase(cover.begin() + k);
      } else {
        ++k;
      }
    }
    double lhs = 0.0, wmax = 0.0;
    for (int k : cover) {
      lhs += items[k].value;
      wmax = std::max(wmax, items[k].weight);
    }
    double rhs = static_cast<double>(cover.size()) - 1.0;
    if (lhs <= rhs + 1e-6) continue;  // not violated by the relaxation

    std::vector<int> members;
    for (int k : cover)
      members.insert(members.end(), items[k].vars.begin(), items[k].vars.end());
    for (std::size_t k = 0; k < items.size(); ++k)
      if (std::find(cover.begin(), cover.end(), static_cast<int>(k)) ==
              cover.end() &&
          items[k].weight >= wmax - 1e-12)
        members.insert(members.end(), items[k].vars.begin(),
                       items[k].vars.end());
    std::sort(members.begin(), members.end());
    if (!seen.insert(members).second) continue;

    std::vector<std::pair<int, double>> coef;
    coef.reserve(members.size());
    for (int j : members) coef.push_back({j, 1.0});
    work.add_row(std::move(coef), Relation::le, rhs,
                 "cover" + std::to_string(seen.size()));
    ++added;
  }
  return added;
}

}  // namespace

LpSolution solve_mip(const LinearProgram& lp, const SolveOptions& opt) {
  const int n = static_cast<int>(lp.vars.size());
  const double sgn = lp.sense == ObjSense::maximize ? -1.0 : 1.0;

  std::vector<double> root_lb(n), root_ub(n);
  for (int j = 0; j < n; ++j) {
    root_lb[j] = lp.vars[j].lb;
    root_ub[j] = lp.vars[j].ub;
  }

  LpSolution best;
  best.status = SolveStatus::infeasible;
  bool have_incumbent = false;
  double incumbent_key = std::numeric_limits<double>::infinity();
  // external cutoff: a feasible objective the caller already knows, used for
  // pruning only; kept slightly loose so the matching solution is still found
  double cutoff_key = std::numeric_limits<double>::infinity();
  if (std::isfinite(opt.initial_incumbent)) {
    double k = sgn * opt.initial_incumbent;
    cutoff_key = k + std::max(1e-6, 1e-6 * std::fabs(k));
  }
  auto incumbent_slack = [&]() {
    return std::max(opt.gap_tol * std::fabs(incumbent_key), 1e-9);
  };

  // caller-supplied feasible point: verify, snap integers, adopt as the
  // starting incumbent so pruning works from the first node
  if (static_cast<int>(opt.initial_solution.size()) == n) {
    std::vector<double> x0 = opt.initial_solution;
    bool ok = true;
    for (int j = 0; j < n && ok; ++j) {
      if (lp.vars[j].integer) {
        double r = std::round(x0[j]);
        if (std::fabs(x0[j] - r) > opt.int_tol) ok = false;
        x0[j] = r;
      }
      if (x0[j] < root_lb[j] - 1e-9 || x0[j] > root_ub[j] + 1e-9) ok = false;
    }
    for (std::size_t r = 0; r < lp.rows.size() && ok; ++r) {
      double sum = 0.0;
      for (auto& [j, c] : lp.rows[r].coef) sum += c * x0[j];
      double tol = 1e-7 * std::max(1.0, std::fabs(lp.rows[r].rhs));
      switch (lp.rows[r].rel) {
        case Relation::le: ok = sum <= lp.rows[r].rhs + tol; break;
        case Relation::ge: ok = sum >= lp.rows[r].rhs - tol; break;
        case Relation::eq: ok = std::fabs(sum - lp.rows[r].rhs) <= tol; break;
      }
    }
    if (ok) {
      double obj0 = 0.0;
      for (int j = 0; j < n; ++j) obj0 += lp.obj[j] * x0[j];
      have_incumbent = true;
      incumbent_key = sgn * obj0;
      best.status = SolveStatus::optimal;
      best.objective = obj0;
      best.x = std::move(x0);
      best.duals.assign(lp.rows.size(), 0.0);
      best.reduced_costs.assign(n, 0.0);
    }
  }

  std::vector<BnbNode> stack;
  std::priority_queue<BnbNode, std::vector<BnbNode>, WorseBound> pool;
  long next_id = 0;
  long processed = 0;
  stack.push_back({{}, -std::numeric_limits<double>::infinity(), next_id++});

  std::vector<double> lb(n), ub(n);
  long total_iterations = 0;

  // cut-and-branch: strengthen the root relaxation with knapsack cover
  // rounds, then run the tree on the tightened program
  LinearProgram work = lp;
  if (lp.has_integers()) {
    std::set<std::vector<int>> seen_cuts;
    for (int round = 0; round < 10; ++round) {
      LpSolution rel = solve_lp_bounded(work, root_lb, root_ub, opt);
      total_iterations += rel.iterations;
      if (rel.status != SolveStatus::optimal) break;
      if (separate_cover_cuts(work, rel.x, seen_cuts, 30) == 0) break;
    }
  }

  while (!stack.empty() || !pool.empty()) {
    if (processed >= opt.max_nodes) break;
    // plunge along the dive stack when it has nodes, otherwise take the
    // best-bound node from the pool; branching feeds the nearer child back
    // to the stack, so every pool pick starts a fresh dive
    BnbNode node;
    if (!stack.empty()) {
      node = std::move(stack.back());
      stack.pop_back();
    } else {
      node = pool.top();
      pool.pop();
    }

    if (node.parent_key >= cutoff_key) continue;
    if (have_incumbent && node.parent_key >= incumbent_key - incumbent_slack())
      continue;

    ++processed;
    lb = root_lb;
    ub = root_ub;
    for (auto& [j, b] : node.fixes) {
      lb[j] = std::max(lb[j], b.first);
      ub[j] = std::min(ub[j], b.second);
    }

    LpSolution rel = solve_lp_bounded(work, lb, ub, opt);
    total_iterations += rel.iterations;
    if (rel.status == SolveStatus::infeasible) continue;
    if (rel.status == SolveStatus::unbounded) {
      best.status = SolveStatus::unbounded;
      best.nodes = processed;
      best.iterations = total_iterations;
      return best;
    }
    if (rel.status != SolveStatus::optimal)
      throw std::runtime_error("branch and bound: node relaxation hit a limit");

    double key = sgn * rel.objective;
    if (key >= cutoff_key) continue;
    if (have_incumbent && key >= incumbent_key - incumbent_slack()) continue;

    if (node.fixes.empty()) {
      // reduced-cost fixing at the root: an integer variable nonbasic at a
      // bound must move at least one unit to change, which worsens any
      // descendant's objective by at least its reduced cost; if that already
      // crosses the cutoff the variable can be pinned for the whole tree
      double cut = cutoff_key;
      if (have_incumbent)
        cut = std::min(cut, incumbent_key - incumbent_slack());
      if (std::isfinite(cut)) {
        for (int j = 0; j < n; ++j) {
          if (!lp.vars[j].integer || root_ub[j] - root_lb[j] < 0.5) continue;
          double kc = sgn * rel.reduced_costs[j];
          if (rel.x[j] <= root_lb[j] + opt.int_tol && kc > 0.0 &&
              key + kc >= cut + 1e-9)
            root_ub[j] = root_lb[j];
          else if (rel.x[j] >= root_ub[j] - opt.int_tol && kc < 0.0 &&
                   key - kc >= cut + 1e-9)
            root_lb[j] = root_ub[j];
        }
      }
    }

    int branch = most_fractional(lp, rel.x, opt.int_tol);
    if (branch < 0) {
      // integral: new incumbent
      if (!have_incumbent || key < incumbent_key - 1e-12) {
        have_incumbent = true;
        incumbent_key = key;
        best.status = SolveStatus::optimal;
        best.objective = rel.objective;
        best.x = rel.x;
        best.duals.assign(lp.rows.size(), 0.0);
        best.reduced_costs.assign(n, 0.0);
        for (int j = 0; j < n; ++j)
          if (lp.vars[j].integer) best.x[j] = std::round(best.x[j]);
      }
      continue;
    }

    double floor_v = std::floor(rel.x[branch] + opt.int_tol);
    BnbNode down{node.fixes, key, next_id++};
    down.fixes.push_back({branch, {-kInf, floor_v}});
    BnbNode up{std::move(node.fixes), key, next_id++};
    up.fixes.push_back({branch, {floor_v + 1.0, kInf}});
    // nearer child continues the dive, the other waits on its bound
    if (rel.x[branch] - floor_v > 0.5) {
      pool.push(std::move(down));
      stack.push_back(std::move(up));
    } else {
      pool.push(std::move(up));
      stack.push_back(std::move(down));
    }
  }

  bool exhausted = stack.empty() && pool.empty();
  double open_key = std::numeric_limits<double>::infinity();
  if (!pool.empty()) open_key = pool.top().parent_key;
  for (auto& nd : stack) open_key = std::min(open_key, nd.parent_key);

  best.nodes = processed;
  best.iterations = total_iterations;
  if (have_incumbent) {
    double bound_key = exhausted ? incumbent_key : std::min(incumbent_key, open_key);
    best.best_bound = sgn * bound_key;
    best.mip_gap = std::max(0.0, (incumbent_key - bound_key) /
                                     std::max(1.0, std::fabs(incumbent_key)));
    best.status = exhausted || best.mip_gap <= opt.gap_tol
                      ? SolveStatus::optimal
                      : SolveStatus::node_limit;
  } else if (!exhausted) {
    best.status = SolveStatus::node_limit;
    best.best_bound = sgn * open_key;
  } else {
    best.status = SolveStatus::infeasible;
  }
  return best;
}

}  // namespace rinp
