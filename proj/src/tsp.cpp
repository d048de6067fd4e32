#include <algorithm>
#include <stdexcept>
#include <vector>

#include "rinp/heuristics.hpp"

namespace rinp {

namespace {

// cost of visiting positions in order; closed tours pass the start again as
// the last element, so no special casing here
double order_cost(const std::vector<std::vector<double>>& d,
                  const std::vector<int>& pos) {
  double c = 0.0;
  for (size_t i = 0; i + 1 < pos.size(); ++i) c += d[pos[i]][pos[i + 1]];
  return c;
}

std::vector<int> held_karp(const std::vector<std::vector<double>>& d,
                           const std::vector<int>& interior, int s, int t) {
  const int m = static_cast<int>(interior.size());
  const int full = (1 << m) - 1;
  std::vector<std::vector<double>> dp(1 << m, std::vector<double>(m, kInf));
  std::vector<std::vector<int>> par(1 << m, std::vector<int>(m, -1));
  for (int j = 0; j < m; ++j) dp[1 << j][j] = d[s][interior[j]];
  for (int mask = 1; mask <= full; ++mask) {
    for (int j = 0; j < m; ++j) {
      if (!(mask & (1 << j)) || dp[mask][j] == kInf) continue;
      for (int l = 0; l < m; ++l) {
        if (mask & (1 << l)) continue;
        double cand = dp[mask][j] + d[interior[j]][interior[l]];
        int nm = mask | (1 << l);
        if (cand < dp[nm][l]) {
          dp[nm][l] = cand;
          par[nm][l] = j;
        }
      }
    }
  }
  double best = kInf;
  int last = -1;
  for (int j = 0; j < m; ++j) {
    double cand = dp[full][j] + d[interior[j]][t];
    if (cand < best) {
      best = cand;
      last = j;
    }
  }
  if (last < 0 || best == kInf)
    throw std::invalid_argument("unreachable required node in stop ordering");
  std::vector<int> rev;
  int mask = full, j = last;
  while (j >= 0) {
    rev.push_back(interior[j]);
    int pj = par[mask][j];
    mask &= ~(1 << j);
    j = pj;
  }
  std::reverse(rev.begin(), rev.end());
  std::vector<int> out{s};
  out.insert(out.end(), rev.begin(), rev.end());
  out.push_back(t);
  return out;
}

std::vector<int> mst_double(const OverlayInstance& inst,
                            const std::vector<int>& interior, int s, int t,
                            bool tour) {
  const auto& d = inst.dist;
  std::vector<int> req{s};
  for (int p : interior) req.push_back(p);
  if (!tour) req.push_back(t);
  const int n = static_cast<int>(req.size());

  auto sym = [&](int a, int b) { return 0.5 * (d[a][b] + d[b][a]); };
  std::vector<char> in_tree(n, 0);
  std::vector<double> key(n, kInf);
  std::vector<int> par(n, -1);
  key[0] = 0.0;
  std::vector<std::vector<int>> kids(n);
  for (int it = 0; it < n; ++it) {
    int best = -1;
    for (int v = 0; v < n; ++v)
      if (!in_tree[v] && (best < 0 || key[v] < key[best])) best = v;
    if (key[best] == kInf)
      throw std::invalid_argument("unreachable required node in stop ordering");
    in_tree[best] = 1;
    if (par[best] >= 0) kids[par[best]].push_back(best);
    for (int v = 0; v < n; ++v)
      if (!in_tree[v] && sym(req[best], req[v]) < key[v]) {
        key[v] = sym(req[best], req[v]);
        par[v] = best;
      }
  }
  for (auto& k : kids)
    std::sort(k.begin(), k.end(), [&](int a, int b) {
      return inst.nodes[req[a]] < inst.nodes[req[b]];
    });
  std::vector<int> pre;
  std::vector<int> stack{0};
  while (!stack.empty()) {
    int v = stack.back();
    stack.pop_back();
    pre.push_back(req[v]);
    for (auto it = kids[v].rbegin(); it != kids[v].rend(); ++it)
      stack.push_back(*it);
  }
  if (!tour) {
    pre.erase(std::find(pre.begin(), pre.end(), t));
    pre.push_back(t);
  }

  // 2-opt segment reversal over the interior, endpoints pinned
  auto eval = [&](const std::vector<int>& p) {
    double c = order_cost(d, p);
    if (tour) c += d[p.back()][p.front()];
    return c;
  };
  double cur = eval(pre);
  const int last = static_cast<int>(pre.size()) - 1;
  for (int pass = 0; pass < 100; ++pass) {
    bool improved = false;
    for (int i = 1; i < last; ++i) {
      for (int j = i + 1; j <= (tour ? last : last - 1); ++j) {
        std::reverse(pre.begin() + i, pre.begin() + j + 1);
        double cand = eval(pre);
        if (cand < cur - 1e-12) {
          cur = cand;
          improved = true;
        } else {
          std::reverse(pre.begin() + i, pre.begin() + j + 1);
        }
      }
    }
    if (!improved) break;
  }
  if (cur == kInf)
    throw std::invalid_argument("unreachable required node in stop ordering");
  return pre;
}

}  // namespace

std::vector<int> metric_tsp_path(const OverlayInstance& inst) {
  const int n = static_cast<int>(inst.nodes.size());
  if (n == 0) throw std::invalid_argument("empty overlay");
  if (static_cast<int>(inst.dist.size()) != n)
    throw std::invalid_argument("distance matrix size mismatch");
  for (const auto& row : inst.dist)
    if (static_cast<int>(row.size()) != n)
      throw std::invalid_argument("distance matrix size mismatch");

  int s_pos = -1, t_pos = -1;
  for (int i = 0; i < n; ++i) {
    if (inst.nodes[i] == inst.s && s_pos < 0) s_pos = i;
    if (inst.nodes[i] == inst.t && t_pos < 0) t_pos = i;
  }
  if (s_pos < 0 || t_pos < 0)
    throw std::invalid_argument("endpoints missing from overlay");
  const bool tour = inst.s == inst.t;

  std::vector<int> interior;
  for (int i = 0; i < n; ++i)
    if (i != s_pos && i != t_pos) interior.push_back(i);

  std::vector<int> pos_order;
  if (interior.empty()) {
    pos_order = tour ? std::vector<int>{s_pos}
                     : std::vector<int>{s_pos, t_pos};
    if (!tour && inst.dist[s_pos][t_pos] == kInf)
      throw std::invalid_argument("unreachable required node in stop ordering");
  } else if (static_cast<int>(interior.size()) <= 12) {
    pos_order = held_karp(inst.dist, interior, s_pos, tour ? s_pos : t_pos);
    if (tour) pos_order.pop_back();  // closing hop re-added below
  } else {
    pos_order = mst_double(inst, interior, s_pos, t_pos, tour);
  }

  std::vector<int> out;
  out.reserve(pos_order.size() + (tour ? 1 : 0));
  for (int p : pos_order) out.push_back(inst.nodes[p]);
  if (tour && !interior.empty()) out.push_back(inst.s);
  return out;
}

}  // namespace rinp
