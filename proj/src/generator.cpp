#include "rinp/generator.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>
#include <string>

#include "rinp/rng.hpp"

namespace rinp {

namespace {

void check_spec(const InstanceSpec& s) {
  if (s.nodes < 2) throw std::invalid_argument("instance needs >= 2 nodes");
  if (s.link_density <= 0.0 || s.link_density > 1.0)
    throw std::invalid_argument("link density must be in (0, 1]");
  if (s.compute_nodes < 1 || s.compute_nodes > s.nodes)
    throw std::invalid_argument("compute node count out of range");
  if (s.demands < 1) throw std::invalid_argument("instance needs demands");
  if (s.margin < 0.0) throw std::invalid_argument("margin must be >= 0");
  if (s.volume_lo <= 0.0 || s.volume_hi < s.volume_lo)
    throw std::invalid_argument("bad volume range");
  if (s.work_ratio < 0.0) throw std::invalid_argument("work ratio must be >= 0");
  if (s.capacity_factor <= 0.0)
    throw std::invalid_argument("capacity factor must be positive");
  if (s.split_limit < 0) throw std::invalid_argument("bad split limit");
  if (s.compute_off_endpoints && s.compute_nodes >= s.nodes - 1)
    throw std::invalid_argument(
        "compute_off_endpoints needs at least two non-compute nodes");
}

GeneratedInstance attempt(const InstanceSpec& s, Rng& rng) {
  int n = s.nodes;
  Network net;
  net.name = "gen" + std::to_string(s.seed);
  net.resource_types = {"cpu"};
  net.utilization_bound = {1.0};
  net.nodes.resize(n);
  for (int v = 0; v < n; ++v) {
    net.nodes[v].id = v;
    net.nodes[v].label = "g" + std::to_string(v);
    net.nodes[v].compute = {0.0};
  }

  // a random directed cycle through all nodes makes the graph strongly
  // connected, extra arcs are sampled up to the density target
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  for (int i = n - 1; i > 0; --i)
    std::swap(order[i], order[rng.uniform_int(0, i)]);
  std::vector<std::vector<char>> have(n, std::vector<char>(n, 0));
  std::vector<std::pair<int, int>> arcs;
  for (int i = 0; i < n; ++i) {
    int a = order[i], b = order[(i + 1) % n];
    arcs.push_back({a, b});
    have[a][b] = 1;
  }
  long target = std::max<long>(n, std::lround(s.link_density * n * (n - 1)));
  std::vector<std::pair<int, int>> rest;
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      if (a != b && !have[a][b]) rest.push_back({a, b});
  for (int i = static_cast<int>(rest.size()) - 1; i > 0; --i)
    std::swap(rest[i], rest[rng.uniform_int(0, i)]);
  for (const auto& ab : rest) {
    if (static_cast<long>(arcs.size()) >= target) break;
    arcs.push_back(ab);
  }

  std::vector<int> ids(n);
  std::iota(ids.begin(), ids.end(), 0);
  for (int i = n - 1; i > 0; --i)
    std::swap(ids[i], ids[rng.uniform_int(0, i)]);
  std::vector<int> compute(ids.begin(), ids.begin() + s.compute_nodes);
  std::vector<char> is_compute(n, 0);
  for (int z : compute) is_compute[z] = 1;

  std::vector<Demand> demands;
  double total_volume = 0.0, total_work = 0.0;
  for (int i = 0; i < s.demands; ++i) {
    Demand d;
    d.id = i;
    do {
      d.src = rng.uniform_int(0, n - 1);
      d.dst = rng.uniform_int(0, n - 1);
    } while (d.src == d.dst ||
             (s.compute_off_endpoints && (is_compute[d.src] || is_compute[d.dst])));
    d.volume = rng.uniform(s.volume_lo, s.volume_hi);
    d.work = {s.work_ratio * d.volume};
    d.split_limit = s.split_limit;
    d.mode = s.mode;
    total_volume += d.volume;
    total_work += d.work[0];
    demands.push_back(std::move(d));
  }

  double per_node =
      total_work > 0.0 ? (1.0 + s.margin) * total_work / s.compute_nodes : 1.0;
  for (int z : compute) net.nodes[z].compute = {per_node};

  double cap = s.capacity_factor * total_volume;
  for (const auto& [a, b] : arcs) {
    Link l;
    l.id = static_cast<int>(net.links.size());
    l.src = a;
    l.dst = b;
    l.capacity = cap;
    net.links.push_back(l);
  }
  net.finalize();
  return {std::move(net), std::move(demands)};
}

}  // namespace

GeneratedInstance gen_random_instance(const InstanceSpec& spec) {
  check_spec(spec);
  Rng rng(spec.seed);
  for (int retry = 0; retry < 16; ++retry) {
    GeneratedInstance inst = attempt(spec, rng);
    if (validate_network(inst.net, inst.demands).ok()) return inst;
  }
  throw std::runtime_error("instance spec infeasible after bounded retries");
}

}  // namespace rinp
