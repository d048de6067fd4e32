#ifndef RINP_IO_HPP
#define RINP_IO_HPP

#include <string>
#include <vector>

#include "rinp/netmodel.hpp"
#include "rinp/online.hpp"

namespace rinp {

// Structured on-disk documents, one JSON object per file with an embedded
// schema tag. Loaders validate fully before returning anything; errors name
// the file and the offending field. Writers emit documents the loaders
// accept unchanged.

Network load_topology(const std::string& path);
void save_topology(const Network& net, const std::string& path);

std::vector<Demand> load_demands(const std::string& path);
void save_demands(const std::vector<Demand>& demands, const std::string& path);

ScenarioConfig load_scenario(const std::string& path);
void save_scenario(const ScenarioConfig& sc, const std::string& path);

}  // namespace rinp

#endif
