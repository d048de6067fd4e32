#include <algorithm>
#include <stdexcept>

#include "rinp/static_solvers.hpp"

namespace rinp {

std::vector<int> extract_walk(const Network& net, const std::vector<int>& u,
                              int s, int t) {
  const int n = net.node_count();
  std::vector<int> balance(n, 0);
  long total = 0;
  for (int e = 0; e < net.link_count(); ++e) {
    if (u[e] < 0) throw std::invalid_argument("negative traversal count");
    if (u[e] == 0) continue;
    balance[net.links[e].src] += u[e];
    balance[net.links[e].dst] -= u[e];
    total += u[e];
  }
  for (int v = 0; v < n; ++v) {
    int want = s == t ? 0 : (v == s ? 1 : v == t ? -1 : 0);
    if (balance[v] != want)
      throw std::invalid_argument("traversal counts are not walk-balanced");
  }
  if (total == 0) {
    if (s == t) return {};
    throw std::invalid_argument("empty traversal counts for distinct endpoints");
  }

  // Hierholzer, smallest link id first for determinism
  std::vector<int> remaining = u;
  std::vector<std::pair<int, int>> stack;  // (node, link taken to reach it)
  std::vector<int> walk;
  stack.push_back({s, -1});
  while (!stack.empty()) {
    auto [v, via] = stack.back();
    int next = -1;
    for (int e : net.out_links(v))
      if (remaining[e] > 0) { next = e; break; }  // out_links sorted by id
    if (next >= 0) {
      --remaining[next];
      stack.push_back({net.links[next].dst, next});
    } else {
      stack.pop_back();
      if (via >= 0) walk.push_back(via);
    }
  }
  std::reverse(walk.begin(), walk.end());
  for (int e = 0; e < net.link_count(); ++e)
    if (remaining[e] != 0)
      throw std::invalid_argument("traversal counts form a disconnected walk");
  return walk;
}

std::vector<OneStopPath> decompose_to_one_stop(
    const std::vector<int>& walk, double traffic,
    const std::vector<std::pair<int, double>>& allocations) {
  double total = 0.0;
  for (auto& [v, w] : allocations) total += w;
  if (total <= 0.0)
    throw std::invalid_argument("one-stop decomposition needs positive total work");
  std::vector<OneStopPath> out;
  out.reserve(allocations.size());
  for (auto& [v, w] : allocations) {
    if (w == 0.0) continue;
    OneStopPath p;
    p.links = walk;
    p.stop = v;
    p.work = w;
    p.traffic = traffic * w / total;
    out.push_back(std::move(p));
  }
  return out;
}

}  // namespace rinp
