#ifndef RINP_GENERATOR_HPP
#define RINP_GENERATOR_HPP

#include <cstdint>
#include <vector>

#include "rinp/netmodel.hpp"

namespace rinp {

// Random instance source for solver cross-checks. Construction guarantees a
// strongly connected digraph, total compute >= (1 + margin) * total demand
// work, and a validate_network pass; a spec that cannot satisfy those after
// bounded retries is rejected.
struct InstanceSpec {
  int nodes = 8;
  double link_density = 0.35;  // fraction of the n*(n-1) possible arcs
  int compute_nodes = 2;
  int demands = 3;
  double margin = 0.5;
  std::uint64_t seed = 1;
  double volume_lo = 5.0;
  double volume_hi = 15.0;
  double work_ratio = 1.0;        // W_d = work_ratio * h_d
  double capacity_factor = 4.0;   // link capacity = factor * total volume
  int split_limit = 1;
  ProcessingMode mode = ProcessingMode::splittable;
  bool compute_off_endpoints = false;  // keep compute away from demand ends
};

struct GeneratedInstance {
  Network net;
  std::vector<Demand> demands;
};

GeneratedInstance gen_random_instance(const InstanceSpec& spec);

}  // namespace rinp

#endif
