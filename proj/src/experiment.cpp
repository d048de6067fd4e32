#include "rinp/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

#include "json.hpp"
#include "rinp/heuristics.hpp"
#include "rinp/io.hpp"

namespace rinp {

using nlohmann::json;

namespace {

constexpr const char* kPlanSchema = "rinp-plan/1";
constexpr const char* kResultSchema = "rinp-results/1";

const char* kStaticModes[] = {"mip",     "mip-k",        "sr-infinite",
                              "sr-tsp",  "sr-iteration", "greedy-alloc",
                              "greedy-nearest"};
const char* kOnlineModes[] = {"online", "online-safe", "online-base",
                              "offline-opt"};

[[noreturn]] void fail(const std::string& path, const std::string& what) {
  throw std::runtime_error(path + ": " + what);
}

double elapsed_ms(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(
             std::chrono::steady_clock::now() - t0)
      .count();
}

std::vector<double> util_from_flows(const Network& net,
                                    const LinkFlowMap& flows) {
  std::vector<double> util(net.link_count(), 0.0);
  if (flows.size() != util.size()) return util;
  for (int e = 0; e < net.link_count(); ++e)
    util[e] = net.links[e].capacity > 0.0 ? flows[e] / net.links[e].capacity
                                          : 0.0;
  return util;
}

ResultRecord run_static_cell(const Network& net,
                             const std::vector<Demand>& demands,
                             const std::string& mode,
                             const ExperimentPlan& plan) {
  FormulationOptions fo;
  fo.aggregate_second_segment = plan.aggregation;
  fo.provision_budget = plan.provision_budget;
  fo.chain = plan.chain;

  ResultRecord rec;
  rec.mode = mode;
  rec.k = mode == "mip-k" || mode == "sr-iteration" ? plan.k : 0;
  rec.node_alloc.assign(net.node_count(), 0.0);
  auto t0 = std::chrono::steady_clock::now();

  if (mode == "mip" || mode == "mip-k") {
    WalkSolution ws = mode == "mip" ? solve_mip_rinp(net, demands, fo)
                                    : solve_mip_k(net, demands, plan.k, fo);
    rec.objective = ws.objective;
    rec.status = to_string(ws.status);
    rec.link_util = util_from_flows(net, ws.flows);
    for (const DemandWalk& w : ws.walks)
      if (!w.w.empty())
        for (int v = 0; v < net.node_count(); ++v) rec.node_alloc[v] += w.w[0][v];
  } else if (mode == "sr-infinite" || mode == "greedy-alloc") {
    SplitSolution ss = mode == "sr-infinite"
                           ? solve_sr_infinite(net, demands, fo)
                           : greedy_alloc_baseline(net, demands);
    rec.objective = ss.objective;
    rec.status = to_string(ss.status);
    rec.link_util = util_from_flows(net, ss.flows);
    for (std::size_t d = 0; d < ss.shares.size(); ++d) {
      double per_unit = demands[d].volume > 0.0
                            ? demands[d].work[0] / demands[d].volume
                            : 0.0;
      for (int v = 0; v < net.node_count(); ++v)
        rec.node_alloc[v] += ss.shares[d][v] * per_unit;
    }
  } else {
    HeuristicSolution hs;
    if (mode == "sr-tsp")
      hs = sr_tsp(net, demands, fo);
    else if (mode == "sr-iteration")
      hs = sr_iteration(net, demands, plan.k, fo);
    else
      hs = greedy_nearest_baseline(net, demands, fo);
    rec.objective = hs.delay_pwl;
    rec.status = hs.unrouted.empty() ? "ok" : "partial";
    rec.link_util = util_from_flows(net, hs.flows);
    for (const HeuristicRoute& r : hs.routes)
      for (const auto& [v, amount] : r.stops) rec.node_alloc[v] += amount;
  }
  rec.wall_ms = elapsed_ms(t0);
  return rec;
}

ResultRecord run_online_cell(const Network& net,
                             const std::vector<DynamicDemand>& trace,
                             const ScenarioConfig& sc,
                             const std::string& mode) {
  OnlineOptions o;
  o.K = sc.K;
  o.uniform_ratio = sc.uniform_ratio;
  o.slot_len = sc.slot_len;

  ResultRecord rec;
  rec.mode = mode;
  rec.k = sc.K;
  auto t0 = std::chrono::steady_clock::now();
  if (mode == "offline-opt") {
    rec.objective = offline_optimum(net, trace, o);
    rec.status = "ok";
  } else {
    if (mode == "online")
      o.variant = OnlineVariant::violating;
    else if (mode == "online-safe")
      o.variant = OnlineVariant::violation_free;
    else
      o.variant = OnlineVariant::baseline;
    OnlineResult res = run_trace(net, trace, o);
    rec.objective = res.metrics.accepted_volume;
    rec.status = "ok";
    // peak per-slot utilization, folded back onto physical links and the
    // compute nodes behind the red copies
    rec.link_util.assign(net.link_count(), 0.0);
    rec.node_alloc.assign(net.node_count(), 0.0);
    const SplitGraph& g = res.graph;
    for (const SplitGraph::VLink& vl : g.links) {
      if (g.is_green(vl.id)) continue;
      double peak = 0.0;
      for (double v : res.state.load[vl.id]) peak = std::max(peak, v);
      if (vl.kind == SplitGraph::LinkKind::physical)
        rec.link_util[vl.orig_link] = std::max(
            rec.link_util[vl.orig_link],
            vl.capacity > 0.0 ? peak / vl.capacity : 0.0);
      else
        rec.node_alloc[vl.compute_node] =
            std::max(rec.node_alloc[vl.compute_node], peak);
    }
  }
  rec.wall_ms = elapsed_ms(t0);
  return rec;
}

}  // namespace

bool mode_is_online(const std::string& mode) {
  for (const char* m : kOnlineModes)
    if (mode == m) return true;
  return false;
}

bool mode_known(const std::string& mode) {
  for (const char* m : kStaticModes)
    if (mode == m) return true;
  return mode_is_online(mode);
}

void check_plan(const ExperimentPlan& plan) {
  if (plan.topology.empty())
    throw std::invalid_argument("plan needs a topology");
  if (plan.modes.empty()) throw std::invalid_argument("plan needs modes");
  bool any_static = false, any_online = false;
  for (const std::string& m : plan.modes) {
    if (!mode_known(m)) throw std::invalid_argument("unknown mode " + m);
    (mode_is_online(m) ? any_online : any_static) = true;
  }
  if (any_static && plan.demands.empty())
    throw std::invalid_argument("static modes need a demand document");
  if (any_online && plan.scenario.empty())
    throw std::invalid_argument("online modes need a scenario document");
  if (!plan.reference.empty() && !mode_known(plan.reference))
    throw std::invalid_argument("unknown reference mode " + plan.reference);
  if (plan.k < 1) throw std::invalid_argument("k must be >= 1");
  if (plan.scales.empty()) throw std::invalid_argument("plan needs scales");
  for (double s : plan.scales)
    if (s <= 0.0) throw std::invalid_argument("scales must be positive");
  if (plan.seeds.empty()) throw std::invalid_argument("plan needs seeds");
  bool has_sr = std::count(plan.modes.begin(), plan.modes.end(), "sr-infinite");
  if (plan.aggregation && !has_sr)
    throw std::invalid_argument("aggregation applies to sr-infinite only");
  if (plan.provision_budget < 0.0)
    throw std::invalid_argument("provision budget must be >= 0");
  if (plan.provision_budget > 0.0 && !has_sr)
    throw std::invalid_argument("provisioning applies to sr-infinite only");
  if (!plan.chain.empty() &&
      (plan.aggregation || plan.provision_budget > 0.0))
    throw std::invalid_argument("chains exclude aggregation and provisioning");
  if (plan.format != "structured" && plan.format != "rows")
    throw std::invalid_argument("format must be structured or rows");
}

ExperimentPlan load_plan(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(path, "cannot open");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    fail(path, e.what());
  }
  if (!j.is_object() || !j.contains("schema") ||
      j["schema"] != json(kPlanSchema))
    fail(path, std::string("schema must be \"") + kPlanSchema + "\"");

  ExperimentPlan plan;
  auto str = [&](const char* key, std::string& out) {
    if (!j.contains(key)) return;
    if (!j[key].is_string()) fail(path, std::string(key) + ": expected string");
    out = j[key].get<std::string>();
  };
  str("topology", plan.topology);
  str("demands", plan.demands);
  str("scenario", plan.scenario);
  str("reference", plan.reference);
  str("out", plan.out);
  str("format", plan.format);
  if (j.contains("modes")) {
    if (!j["modes"].is_array()) fail(path, "modes: expected array");
    plan.modes.clear();
    for (const auto& m : j["modes"]) {
      if (!m.is_string()) fail(path, "modes: expected strings");
      plan.modes.push_back(m.get<std::string>());
    }
  }
  if (j.contains("k")) {
    if (!j["k"].is_number_integer()) fail(path, "k: expected integer");
    plan.k = j["k"].get<int>();
  }
  if (j.contains("scales")) {
    if (!j["scales"].is_array()) fail(path, "scales: expected array");
    plan.scales.clear();
    for (const auto& s : j["scales"]) {
      if (!s.is_number()) fail(path, "scales: expected numbers");
      plan.scales.push_back(s.get<double>());
    }
  }
  if (j.contains("seeds")) {
    if (!j["seeds"].is_array()) fail(path, "seeds: expected array");
    plan.seeds.clear();
    for (const auto& s : j["seeds"]) {
      if (!s.is_number_integer() || s.get<long long>() < 0)
        fail(path, "seeds: expected nonnegative integers");
      plan.seeds.push_back(s.get<std::uint64_t>());
    }
  }
  if (j.contains("aggregation")) {
    if (!j["aggregation"].is_boolean())
      fail(path, "aggregation: expected bool");
    plan.aggregation = j["aggregation"].get<bool>();
  }
  if (j.contains("provision_budget")) {
    if (!j["provision_budget"].is_number())
      fail(path, "provision_budget: expected number");
    plan.provision_budget = j["provision_budget"].get<double>();
  }
  if (j.contains("chain")) {
    if (!j["chain"].is_array()) fail(path, "chain: expected array");
    for (const auto& st : j["chain"]) {
      if (!st.is_object() || !st.contains("resource") ||
          !st["resource"].is_string())
        fail(path, "chain: stages need a resource name");
      ChainStage stage;
      stage.resource = st["resource"].get<std::string>();
      if (st.contains("scale")) {
        if (!st["scale"].is_number()) fail(path, "chain: scale must be number");
        stage.scale = st["scale"].get<double>();
      }
      plan.chain.push_back(std::move(stage));
    }
  }

  // document references resolve relative to the plan file
  std::filesystem::path base = std::filesystem::path(path).parent_path();
  auto resolve = [&](std::string& p) {
    if (!p.empty() && std::filesystem::path(p).is_relative())
      p = (base / p).string();
  };
  resolve(plan.topology);
  resolve(plan.demands);
  resolve(plan.scenario);

  try {
    check_plan(plan);
  } catch (const std::invalid_argument& e) {
    fail(path, e.what());
  }
  return plan;
}

void save_plan(const ExperimentPlan& plan, const std::string& path) {
  json j;
  j["schema"] = kPlanSchema;
  j["topology"] = plan.topology;
  if (!plan.demands.empty()) j["demands"] = plan.demands;
  if (!plan.scenario.empty()) j["scenario"] = plan.scenario;
  j["modes"] = plan.modes;
  if (!plan.reference.empty()) j["reference"] = plan.reference;
  j["k"] = plan.k;
  j["scales"] = plan.scales;
  j["seeds"] = plan.seeds;
  j["aggregation"] = plan.aggregation;
  j["provision_budget"] = plan.provision_budget;
  if (!plan.chain.empty()) {
    j["chain"] = json::array();
    for (const ChainStage& st : plan.chain)
      j["chain"].push_back({{"resource", st.resource}, {"scale", st.scale}});
  }
  if (!plan.out.empty()) j["out"] = plan.out;
  j["format"] = plan.format;
  std::ofstream out(path);
  if (!out) fail(path, "cannot open for writing");
  out << j.dump(2) << "\n";
}

std::vector<ResultRecord> run_experiment(
    const ExperimentPlan& plan,
    const std::function<void(const ResultRecord&)>& on_record) {
  check_plan(plan);
  Network net = load_topology(plan.topology);

  bool any_static = false, any_online = false;
  for (const std::string& m : plan.modes)
    (mode_is_online(m) ? any_online : any_static) = true;

  std::vector<Demand> base_demands;
  if (any_static) {
    base_demands = load_demands(plan.demands);
    Diagnostics diag = validate_network(net, base_demands);
    if (!diag.ok()) throw std::runtime_error(diag.summary());
    if (std::count(plan.modes.begin(), plan.modes.end(), "sr-tsp"))
      for (const Demand& d : base_demands)
        if (d.split_limit != 1)
          throw std::invalid_argument(
              "sr-tsp needs single-path demands (split_limit 1), demand " +
              std::to_string(d.id) + " differs");
  }
  ScenarioConfig base_sc;
  if (any_online) base_sc = load_scenario(plan.scenario);

  std::vector<ResultRecord> records;
  for (std::uint64_t seed : plan.seeds) {
    for (double scale : plan.scales) {
      std::vector<Demand> scaled = base_demands;
      for (Demand& d : scaled) {
        d.volume *= scale;
        for (double& w : d.work) w *= scale;
      }
      std::vector<DynamicDemand> trace;
      ScenarioConfig sc = base_sc;
      if (any_online) {
        sc.seed = seed;
        trace = generate_trace(sc);
        for (DynamicDemand& dd : trace) {
          dd.demand.volume *= scale;
          for (double& w : dd.demand.work) w *= scale;
        }
      }
      for (const std::string& mode : plan.modes) {
        ResultRecord rec = mode_is_online(mode)
                               ? run_online_cell(net, trace, sc, mode)
                               : run_static_cell(net, scaled, mode, plan);
        rec.instance = net.name;
        rec.seed = seed;
        rec.scale = scale;
        records.push_back(std::move(rec));
        if (on_record) on_record(records.back());
      }
    }
  }

  if (!plan.reference.empty()) {
    std::map<std::tuple<std::string, std::uint64_t, double>, double> ref;
    for (const ResultRecord& r : records)
      if (r.mode == plan.reference)
        ref[{r.instance, r.seed, r.scale}] = r.objective;
    for (ResultRecord& r : records) {
      if (r.mode == plan.reference) continue;
      auto it = ref.find({r.instance, r.seed, r.scale});
      if (it != ref.end())
        r.gap_vs_ref = (r.objective - it->second) /
                       std::max(1e-12, std::fabs(it->second));
    }
  }

  if (!plan.out.empty()) {
    if (plan.format == "structured")
      emit_structured(records, plan.out + ".results.json");
    else
      emit_rows(records, plan.out + ".results.csv", plan.out + ".util.csv");
  }
  return records;
}

void emit_structured(const std::vector<ResultRecord>& records,
                     const std::string& path) {
  if (records.empty()) fail(path, "no records to emit");
  json j;
  j["schema"] = kResultSchema;
  j["records"] = json::array();
  for (const ResultRecord& r : records) {
    json rj = {{"mode", r.mode},         {"instance", r.instance},
               {"seed", r.seed},         {"scale", r.scale},
               {"k", r.k},               {"objective", r.objective},
               {"status", r.status},     {"wall_ms", r.wall_ms},
               {"link_util", r.link_util}, {"node_alloc", r.node_alloc}};
    if (std::isfinite(r.gap_vs_ref)) rj["gap_vs_ref"] = r.gap_vs_ref;
    j["records"].push_back(std::move(rj));
  }
  std::ofstream out(path);
  if (!out) fail(path, "cannot open for writing");
  out << j.dump(2) << "\n";
  if (!out) fail(path, "write failed");
}

std::vector<ResultRecord> load_structured(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(path, "cannot open");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    fail(path, e.what());
  }
  if (!j.is_object() || !j.contains("schema") ||
      j["schema"] != json(kResultSchema))
    fail(path, std::string("schema must be \"") + kResultSchema + "\"");
  std::vector<ResultRecord> out;
  for (const auto& rj : j["records"]) {
    ResultRecord r;
    r.mode = rj.at("mode").get<std::string>();
    r.instance = rj.at("instance").get<std::string>();
    r.seed = rj.at("seed").get<std::uint64_t>();
    r.scale = rj.at("scale").get<double>();
    r.k = rj.at("k").get<int>();
    r.objective = rj.at("objective").get<double>();
    r.status = rj.at("status").get<std::string>();
    r.wall_ms = rj.at("wall_ms").get<double>();
    r.link_util = rj.at("link_util").get<std::vector<double>>();
    r.node_alloc = rj.at("node_alloc").get<std::vector<double>>();
    if (rj.contains("gap_vs_ref")) r.gap_vs_ref = rj["gap_vs_ref"].get<double>();
    out.push_back(std::move(r));
  }
  return out;
}

void emit_rows(const std::vector<ResultRecord>& records,
               const std::string& results_csv, const std::string& util_csv) {
  if (records.empty()) fail(results_csv, "no records to emit");
  std::ofstream out(results_csv);
  if (!out) fail(results_csv, "cannot open for writing");
  out.precision(17);
  out << "mode,instance,seed,scale,k,objective,status,wall_ms,gap_vs_ref\n";
  for (const ResultRecord& r : records) {
    out << r.mode << ',' << r.instance << ',' << r.seed << ',' << r.scale
        << ',' << r.k << ',' << r.objective << ',' << r.status << ','
        << r.wall_ms << ',';
    if (std::isfinite(r.gap_vs_ref)) out << r.gap_vs_ref;
    out << '\n';
  }
  if (!out) fail(results_csv, "write failed");

  std::ofstream ut(util_csv);
  if (!ut) fail(util_csv, "cannot open for writing");
  ut.precision(17);
  ut << "mode,instance,seed,scale,k,link,utilization\n";
  for (const ResultRecord& r : records)
    for (std::size_t e = 0; e < r.link_util.size(); ++e)
      ut << r.mode << ',' << r.instance << ',' << r.seed << ',' << r.scale
         << ',' << r.k << ',' << e << ',' << r.link_util[e] << '\n';
  if (!ut) fail(util_csv, "write failed");
}

std::string compare_table(const std::vector<ResultRecord>& records,
                          const std::string& reference_mode) {
  std::map<std::tuple<std::string, std::uint64_t, double>, double> ref;
  for (const ResultRecord& r : records)
    if (r.mode == reference_mode) ref[{r.instance, r.seed, r.scale}] = r.objective;
  if (ref.empty())
    throw std::invalid_argument("no records for reference mode " +
                                reference_mode);
  struct Acc {
    int cells = 0;
    double sum = 0.0, worst = 0.0;
  };
  std::map<std::string, Acc> by_mode;
  for (const ResultRecord& r : records) {
    if (r.mode == reference_mode) continue;
    auto it = ref.find({r.instance, r.seed, r.scale});
    if (it == ref.end()) continue;
    double gap =
        (r.objective - it->second) / std::max(1e-12, std::fabs(it->second));
    Acc& a = by_mode[r.mode];
    ++a.cells;
    a.sum += gap;
    if (std::fabs(gap) > std::fabs(a.worst)) a.worst = gap;
  }
  std::ostringstream os;
  os << "gap vs " << reference_mode << " ((objective - ref) / |ref|)\n";
  os << "mode             cells   mean_gap    worst_gap\n";
  os.setf(std::ios::fixed);
  os.precision(4);
  for (const auto& [mode, a] : by_mode) {
    os.width(16);
    os.setf(std::ios::left, std::ios::adjustfield);
    os << mode;
    os.setf(std::ios::right, std::ios::adjustfield);
    os.width(6);
    os << a.cells;
    os.width(11);
    os << (a.cells ? a.sum / a.cells : 0.0);
    os.width(13);
    os << a.worst;
    os << '\n';
  }
  return os.str();
}

}  // namespace rinp
