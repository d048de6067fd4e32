#include "rinp/io.hpp"

#include <fstream>
#include <stdexcept>

#include "json.hpp"

namespace rinp {

using nlohmann::json;

namespace {

constexpr const char* kTopologySchema = "rinp-topology/1";
constexpr const char* kDemandSchema = "rinp-demands/1";
constexpr const char* kScenarioSchema = "rinp-scenario/1";

[[noreturn]] void fail(const std::string& path, const std::string& what) {
  throw std::runtime_error(path + ": " + what);
}

json parse_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(path, "cannot open");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    fail(path, e.what());
  }
  if (!j.is_object()) fail(path, "top level must be an object");
  return j;
}

void check_schema(const json& j, const char* want, const std::string& path) {
  if (!j.contains("schema") || !j["schema"].is_string() ||
      j["schema"].get<std::string>() != want)
    fail(path, std::string("schema must be \"") + want + "\"");
}

const json& need(const json& j, const char* key, const std::string& where) {
  auto it = j.find(key);
  if (it == j.end()) fail(where, std::string("missing field ") + key);
  return *it;
}

double num(const json& j, const char* key, const std::string& where) {
  const json& v = need(j, key, where);
  if (!v.is_number()) fail(where, std::string(key) + ": expected a number");
  return v.get<double>();
}

int integer(const json& j, const char* key, const std::string& where) {
  const json& v = need(j, key, where);
  if (!v.is_number_integer())
    fail(where, std::string(key) + ": expected an integer");
  return v.get<int>();
}

std::string text(const json& j, const char* key, const std::string& where) {
  const json& v = need(j, key, where);
  if (!v.is_string()) fail(where, std::string(key) + ": expected a string");
  return v.get<std::string>();
}

std::vector<double> num_list(const json& v, const std::string& where) {
  if (!v.is_array()) fail(where, "expected an array of numbers");
  std::vector<double> out;
  for (const auto& x : v) {
    if (!x.is_number()) fail(where, "expected an array of numbers");
    out.push_back(x.get<double>());
  }
  return out;
}

void write_file(const json& j, const std::string& path) {
  std::ofstream out(path);
  if (!out) fail(path, "cannot open for writing");
  out << j.dump(2) << "\n";
  if (!out) fail(path, "write failed");
}

}  // namespace

Network load_topology(const std::string& path) {
  json j = parse_file(path);
  check_schema(j, kTopologySchema, path);
  Network net;
  net.name = j.contains("name") ? text(j, "name", path) : std::string();
  const json& res = need(j, "resources", path);
  if (!res.is_array() || res.empty()) fail(path, "resources: nonempty array");
  for (const auto& r : res) {
    if (!r.is_string()) fail(path, "resources: expected strings");
    net.resource_types.push_back(r.get<std::string>());
  }
  net.utilization_bound =
      num_list(need(j, "utilization_bound", path), path + ": utilization_bound");
  if (net.utilization_bound.size() != net.resource_types.size())
    fail(path, "utilization_bound: one entry per resource");

  const json& nodes = need(j, "nodes", path);
  if (!nodes.is_array()) fail(path, "nodes: expected an array");
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    std::string where = path + ": nodes[" + std::to_string(i) + "]";
    const json& nj = nodes[i];
    if (!nj.is_object()) fail(where, "expected an object");
    Node n;
    n.id = integer(nj, "id", where);
    if (n.id != static_cast<int>(i))
      fail(where, "id: nodes must be listed in dense id order");
    n.label = nj.contains("label") ? text(nj, "label", where)
                                   : "n" + std::to_string(n.id);
    n.compute = num_list(need(nj, "compute", where), where + ".compute");
    if (n.compute.size() != net.resource_types.size())
      fail(where, "compute: one entry per resource");
    net.nodes.push_back(std::move(n));
  }

  const json& links = need(j, "links", path);
  if (!links.is_array()) fail(path, "links: expected an array");
  for (std::size_t i = 0; i < links.size(); ++i) {
    std::string where = path + ": links[" + std::to_string(i) + "]";
    const json& lj = links[i];
    if (!lj.is_object()) fail(where, "expected an object");
    Link l;
    l.id = integer(lj, "id", where);
    if (l.id != static_cast<int>(i))
      fail(where, "id: links must be listed in dense id order");
    l.src = integer(lj, "src", where);
    l.dst = integer(lj, "dst", where);
    l.capacity = num(lj, "capacity", where);
    l.prop_delay = lj.contains("prop_delay") ? num(lj, "prop_delay", where) : 0.0;
    net.links.push_back(l);
  }

  try {
    net.finalize();
  } catch (const std::exception& e) {
    fail(path, e.what());
  }
  return net;
}

void save_topology(const Network& net, const std::string& path) {
  json j;
  j["schema"] = kTopologySchema;
  j["name"] = net.name;
  j["resources"] = net.resource_types;
  j["utilization_bound"] = net.utilization_bound;
  j["nodes"] = json::array();
  for (const Node& n : net.nodes)
    j["nodes"].push_back(
        {{"id", n.id}, {"label", n.label}, {"compute", n.compute}});
  j["links"] = json::array();
  for (const Link& l : net.links) {
    json lj = {{"id", l.id},
               {"src", l.src},
               {"dst", l.dst},
               {"capacity", l.capacity}};
    if (l.prop_delay != 0.0) lj["prop_delay"] = l.prop_delay;
    j["links"].push_back(std::move(lj));
  }
  write_file(j, path);
}

std::vector<Demand> load_demands(const std::string& path) {
  json j = parse_file(path);
  check_schema(j, kDemandSchema, path);
  const json& arr = need(j, "demands", path);
  if (!arr.is_array()) fail(path, "demands: expected an array");
  std::vector<Demand> out;
  for (std::size_t i = 0; i < arr.size(); ++i) {
    std::string where = path + ": demands[" + std::to_string(i) + "]";
    const json& dj = arr[i];
    if (!dj.is_object()) fail(where, "expected an object");
    Demand d;
    d.id = integer(dj, "id", where);
    d.src = integer(dj, "src", where);
    d.dst = integer(dj, "dst", where);
    d.volume = num(dj, "volume", where);
    d.work = num_list(need(dj, "work", where), where + ".work");
    if (dj.contains("scale")) d.scale = num(dj, "scale", where);
    if (dj.contains("split_limit")) d.split_limit = integer(dj, "split_limit", where);
    if (dj.contains("mode")) {
      std::string m = text(dj, "mode", where);
      if (m == "splittable")
        d.mode = ProcessingMode::splittable;
      else if (m == "single_node")
        d.mode = ProcessingMode::single_node;
      else
        fail(where, "mode: expected splittable or single_node");
    }
    if (d.volume <= 0.0) fail(where, "volume: must be positive");
    if (d.scale <= 0.0) fail(where, "scale: must be positive");
    if (d.split_limit < 0) fail(where, "split_limit: must be >= 0");
    out.push_back(std::move(d));
  }
  return out;
}

void save_demands(const std::vector<Demand>& demands, const std::string& path) {
  json j;
  j["schema"] = kDemandSchema;
  j["demands"] = json::array();
  for (const Demand& d : demands) {
    json dj = {{"id", d.id},       {"src", d.src},
               {"dst", d.dst},     {"volume", d.volume},
               {"work", d.work},   {"scale", d.scale},
               {"split_limit", d.split_limit},
               {"mode", d.mode == ProcessingMode::single_node ? "single_node"
                                                              : "splittable"}};
    j["demands"].push_back(std::move(dj));
  }
  write_file(j, path);
}

ScenarioConfig load_scenario(const std::string& path) {
  json j = parse_file(path);
  check_schema(j, kScenarioSchema, path);
  ScenarioConfig sc;
  if (j.contains("arrival_rate")) sc.arrival_rate = num(j, "arrival_rate", path);
  if (j.contains("duration_mu")) sc.duration_mu = num(j, "duration_mu", path);
  if (j.contains("duration_sigma"))
    sc.duration_sigma = num(j, "duration_sigma", path);
  if (j.contains("size_mean")) sc.size_mean = num(j, "size_mean", path);
  if (j.contains("size_std")) sc.size_std = num(j, "size_std", path);
  if (j.contains("horizon")) sc.horizon = num(j, "horizon", path);
  if (j.contains("max_demands")) sc.max_demands = integer(j, "max_demands", path);
  if (j.contains("seed")) {
    if (!j["seed"].is_number_integer() || j["seed"].get<long long>() < 0)
      fail(path, "seed: expected a nonnegative integer");
    sc.seed = j["seed"].get<std::uint64_t>();
  }
  if (j.contains("slot_len")) sc.slot_len = num(j, "slot_len", path);
  if (j.contains("resource_ratio"))
    sc.resource_ratio = num(j, "resource_ratio", path);
  if (j.contains("K")) sc.K = integer(j, "K", path);
  if (j.contains("uniform_ratio")) sc.uniform_ratio = num(j, "uniform_ratio", path);
  const json& pairs = need(j, "pairs", path);
  if (!pairs.is_array() || pairs.empty())
    fail(path, "pairs: nonempty array of [src, dst]");
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const json& p = pairs[i];
    std::string where = path + ": pairs[" + std::to_string(i) + "]";
    if (!p.is_array() || p.size() != 2 || !p[0].is_number_integer() ||
        !p[1].is_number_integer())
      fail(where, "expected [src, dst]");
    sc.pairs.push_back({p[0].get<int>(), p[1].get<int>()});
  }
  if (sc.arrival_rate <= 0.0) fail(path, "arrival_rate: must be positive");
  if (sc.duration_sigma < 0.0) fail(path, "duration_sigma: must be >= 0");
  if (sc.size_mean <= 0.0) fail(path, "size_mean: must be positive");
  if (sc.size_std < 0.0) fail(path, "size_std: must be >= 0");
  if (sc.horizon <= 0.0) fail(path, "horizon: must be positive");
  if (sc.max_demands < 0) fail(path, "max_demands: must be >= 0");
  if (sc.slot_len <= 0.0) fail(path, "slot_len: must be positive");
  if (sc.resource_ratio < 0.0) fail(path, "resource_ratio: must be >= 0");
  if (sc.K < 1) fail(path, "K: must be >= 1");
  if (sc.uniform_ratio < 0.0) fail(path, "uniform_ratio: must be >= 0");
  return sc;
}

void save_scenario(const ScenarioConfig& sc, const std::string& path) {
  json j;
  j["schema"] = kScenarioSchema;
  j["arrival_rate"] = sc.arrival_rate;
  j["duration_mu"] = sc.duration_mu;
  j["duration_sigma"] = sc.duration_sigma;
  j["size_mean"] = sc.size_mean;
  j["size_std"] = sc.size_std;
  j["pairs"] = json::array();
  for (auto [s, t] : sc.pairs) j["pairs"].push_back({s, t});
  j["horizon"] = sc.horizon;
  j["max_demands"] = sc.max_demands;
  j["seed"] = sc.seed;
  j["slot_len"] = sc.slot_len;
  j["resource_ratio"] = sc.resource_ratio;
  j["K"] = sc.K;
  j["uniform_ratio"] = sc.uniform_ratio;
  write_file(j, path);
}

}  // namespace rinp
