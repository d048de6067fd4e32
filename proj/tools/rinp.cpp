#include <cstdio>
#include <exception>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "rinp/experiment.hpp"
#include "rinp/generator.hpp"
#include "rinp/heuristics.hpp"
#include "rinp/io.hpp"
#include "rinp/online.hpp"
#include "rinp/static_solvers.hpp"

using namespace rinp;

namespace {

int g_log = 1;  // 0 quiet, 1 info, 2 debug

void info(const std::string& line) {
  if (g_log >= 1) std::cerr << line << "\n";
}

std::vector<ChainStage> parse_chain(const std::vector<std::string>& tokens) {
  std::vector<ChainStage> chain;
  for (const std::string& t : tokens) {
    ChainStage st;
    auto pos = t.find(':');
    st.resource = t.substr(0, pos);
    if (pos != std::string::npos) st.scale = std::stod(t.substr(pos + 1));
    if (st.resource.empty())
      throw std::invalid_argument("chain stage needs a resource name");
    chain.push_back(std::move(st));
  }
  return chain;
}

void write_records(const std::vector<ResultRecord>& recs,
                   const std::string& out, const std::string& format) {
  if (out.empty()) return;
  if (format == "rows")
    emit_rows(recs, out + ".results.csv", out + ".util.csv");
  else
    emit_structured(recs, out + ".results.json");
  info("wrote " + out + (format == "rows" ? ".results.csv" : ".results.json"));
}

int cmd_solve(const std::string& topology, const std::string& demands_path,
              const std::string& mode, int k, double scale, bool aggregate,
              double provision_budget,
              const std::vector<std::string>& chain_tokens,
              const std::string& out, const std::string& format) {
  ExperimentPlan plan;
  plan.topology = topology;
  plan.demands = demands_path;
  plan.modes = {mode};
  plan.k = k;
  plan.scales = {scale};
  plan.aggregation = aggregate;
  plan.provision_budget = provision_budget;
  plan.chain = parse_chain(chain_tokens);
  auto recs = run_experiment(plan);
  const ResultRecord& r = recs.front();
  std::printf("mode=%s instance=%s objective=%.9g status=%s wall_ms=%.1f\n",
              r.mode.c_str(), r.instance.c_str(), r.objective,
              r.status.c_str(), r.wall_ms);
  write_records(recs, out, format);
  return r.status == "optimal" || r.status == "ok" ? 0 : 1;
}

int cmd_online(const std::string& topology, const std::string& scenario_path,
               const std::string& variant, std::uint64_t seed_override,
               bool with_offline, const std::string& trace_in,
               const std::string& trace_out, const std::string& out,
               const std::string& format) {
  Network net = load_topology(topology);
  ScenarioConfig sc = load_scenario(scenario_path);
  if (seed_override) sc.seed = seed_override;

  std::vector<DynamicDemand> trace;
  if (!trace_in.empty()) {
    std::ifstream ts(trace_in);
    if (!ts) throw std::runtime_error(trace_in + ": cannot open");
    trace = read_trace(ts, sc.resource_ratio);
  } else {
    trace = generate_trace(sc);
  }
  if (!trace_out.empty()) {
    std::ofstream ts(trace_out);
    if (!ts) throw std::runtime_error(trace_out + ": cannot open for writing");
    write_trace(trace, ts, sc.resource_ratio);
    info("wrote " + trace_out);
  }

  OnlineOptions o;
  o.K = sc.K;
  o.uniform_ratio = sc.uniform_ratio;
  o.slot_len = sc.slot_len;
  if (variant == "violating")
    o.variant = OnlineVariant::violating;
  else if (variant == "safe")
    o.variant = OnlineVariant::violation_free;
  else
    o.variant = OnlineVariant::baseline;

  OnlineResult res = run_trace(net, trace, o);
  const OnlineMetrics& m = res.metrics;
  std::printf("variant=%s demands=%zu accepted=%ld rejected=%ld "
              "accepted_volume=%.9g dual=%.9g max_step_growth=%.6f "
              "violations=%ld max_utilization=%.6f\n",
              variant.c_str(), trace.size(), m.accepted_count,
              m.rejected_count, m.accepted_volume,
              m.dual_trace.empty() ? 0.0 : m.dual_trace.back(),
              m.max_step_growth, m.violation_events, m.max_utilization);
  if (with_offline) {
    double off = offline_optimum(net, trace, o);
    std::printf("offline_optimum=%.9g competitive=%.6f\n", off,
                off > 0.0 ? m.accepted_volume / off : 1.0);
  }
  if (!out.empty()) {
    ResultRecord rec;
    rec.mode = variant == "safe" ? "online-safe"
               : variant == "baseline" ? "online-base"
                                       : "online";
    rec.instance = net.name;
    rec.seed = sc.seed;
    rec.k = sc.K;
    rec.objective = m.accepted_volume;
    rec.status = "ok";
    write_records({rec}, out, format);
  }
  return 0;
}

int cmd_transform(const std::string& topology, double ratio,
                  const std::string& out) {
  Network net = load_topology(topology);
  SplitGraph g = ratio > 0.0 ? split_compute_nodes(net, ratio)
                             : split_compute_nodes(net);
  nlohmann::json j;
  j["schema"] = "rinp-splitgraph/1";
  j["uniform_ratio"] = ratio;
  j["nodes"] = nlohmann::json::array();
  for (std::size_t v = 0; v < g.orig_node.size(); ++v)
    j["nodes"].push_back(
        {{"id", v},
         {"orig", g.orig_node[v]},
         {"role", static_cast<int>(v) == g.in_copy[g.orig_node[v]] ? "in"
                                                                   : "out"}});
  j["links"] = nlohmann::json::array();
  for (const SplitGraph::VLink& l : g.links) {
    nlohmann::json lj = {{"id", l.id},
                         {"src", l.src},
                         {"dst", l.dst},
                         {"capacity", l.capacity}};
    if (l.kind == SplitGraph::LinkKind::physical) {
      lj["kind"] = "physical";
      lj["orig_link"] = l.orig_link;
    } else if (l.kind == SplitGraph::LinkKind::red) {
      lj["kind"] = "red";
      lj["compute_node"] = l.compute_node;
    } else {
      lj["kind"] = "green";
    }
    j["links"].push_back(std::move(lj));
  }
  if (out.empty()) {
    std::cout << j.dump(2) << "\n";
  } else {
    std::ofstream os(out);
    if (!os) throw std::runtime_error(out + ": cannot open for writing");
    os << j.dump(2) << "\n";
    info("wrote " + out);
  }
  return 0;
}

int cmd_gen(const InstanceSpec& spec, const std::string& prefix) {
  GeneratedInstance inst = gen_random_instance(spec);
  save_topology(inst.net, prefix + ".topo.json");
  save_demands(inst.demands, prefix + ".demands.json");
  std::printf("generated %s: %d nodes, %d links, %zu demands\n",
              inst.net.name.c_str(), inst.net.node_count(),
              inst.net.link_count(), inst.demands.size());
  info("wrote " + prefix + ".topo.json, " + prefix + ".demands.json");
  return 0;
}

int cmd_run(const std::string& plan_path, std::uint64_t seed_override) {
  ExperimentPlan plan = load_plan(plan_path);
  if (seed_override) plan.seeds = {seed_override};
  auto recs = run_experiment(plan, [](const ResultRecord& r) {
    if (g_log >= 1)
      std::fprintf(stderr,
                   "  %-14s seed=%llu scale=%g objective=%.9g status=%s "
                   "(%.0f ms)\n",
                   r.mode.c_str(), (unsigned long long)r.seed, r.scale,
                   r.objective, r.status.c_str(), r.wall_ms);
  });
  std::printf("%zu records\n", recs.size());
  if (!plan.reference.empty())
    std::cout << compare_table(recs, plan.reference);
  return 0;
}

int cmd_compare(const std::string& results_path, const std::string& reference) {
  auto recs = load_structured(results_path);
  std::cout << compare_table(recs, reference);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"routing optimization for networks with in-network processing"};
  app.require_subcommand(1);
  app.fallthrough();

  std::uint64_t seed = 0;
  std::string out, format = "structured", log_level = "info";
  app.add_option("--seed", seed, "override the input seed (0 keeps it)");
  app.add_option("--out", out, "output path prefix");
  app.add_option("--format", format, "structured | rows")
      ->check(CLI::IsMember({"structured", "rows"}));
  app.add_option("--log-level", log_level, "quiet | info | debug")
      ->check(CLI::IsMember({"quiet", "info", "debug"}));

  auto* solve = app.add_subcommand("solve", "run one static solver");
  std::string topology, demands_path, mode;
  int k = 1;
  double scale = 1.0, provision_budget = 0.0;
  bool aggregate = false;
  std::vector<std::string> chain_tokens;
  solve->add_option("--topology", topology, "topology document")->required();
  solve->add_option("--demands", demands_path, "demand document")->required();
  solve->add_option("--mode", mode, "solver mode")
      ->required()
      ->check(CLI::IsMember({"mip", "mip-k", "sr-infinite", "sr-tsp",
                             "sr-iteration", "greedy-alloc",
                             "greedy-nearest"}));
  solve->add_option("--k", k, "subflow count for mip-k / sr-iteration");
  solve->add_option("--scale", scale, "demand scale multiplier");
  solve->add_flag("--aggregate", aggregate, "destination-aggregated posts");
  solve->add_option("--provision-budget", provision_budget,
                    "joint provisioning budget (> 0 enables)");
  solve->add_option("--chain", chain_tokens,
                    "ordered chain stages, resource[:scale]");

  auto* online = app.add_subcommand("online", "run the admission simulator");
  std::string scenario_path, variant = "violating", trace_in, trace_out;
  bool with_offline = false;
  online->add_option("--topology", topology, "topology document")->required();
  online->add_option("--scenario", scenario_path, "scenario document")
      ->required();
  online->add_option("--variant", variant, "violating | safe | baseline")
      ->check(CLI::IsMember({"violating", "safe", "baseline"}));
  online->add_flag("--offline", with_offline,
                   "also solve the exact offline packing");
  online->add_option("--trace", trace_in, "replay this trace file");
  online->add_option("--trace-out", trace_out, "write the trace to a file");

  auto* transform = app.add_subcommand(
      "transform", "emit the compute-node split graph for inspection");
  double ratio = 0.0;
  transform->add_option("--topology", topology, "topology document")
      ->required();
  transform->add_option("--ratio", ratio,
                        "uniform traffic-to-work ratio (0 = per-demand)");

  auto* gen = app.add_subcommand("gen", "generate a random instance");
  InstanceSpec spec;
  std::string prefix = "instance";
  bool single_node = false;
  gen->add_option("--nodes", spec.nodes, "node count");
  gen->add_option("--density", spec.link_density, "arc density in (0, 1]");
  gen->add_option("--compute", spec.compute_nodes, "compute node count");
  gen->add_option("--demands", spec.demands, "demand count");
  gen->add_option("--margin", spec.margin, "compute headroom margin");
  gen->add_option("--volume-lo", spec.volume_lo, "demand volume lower bound");
  gen->add_option("--volume-hi", spec.volume_hi, "demand volume upper bound");
  gen->add_option("--work-ratio", spec.work_ratio, "work per traffic unit");
  gen->add_option("--capacity-factor", spec.capacity_factor,
                  "link capacity as a multiple of total volume");
  gen->add_option("--split-limit", spec.split_limit, "per-demand split limit");
  gen->add_flag("--single-node", single_node, "single-node processing mode");
  gen->add_flag("--compute-off-endpoints", spec.compute_off_endpoints,
                "keep compute nodes away from demand endpoints");
  gen->add_option("--out-prefix", prefix, "output file prefix");

  auto* run = app.add_subcommand("run", "execute an experiment plan");
  std::string plan_path;
  run->add_option("--plan", plan_path, "plan document")->required();

  auto* compare = app.add_subcommand("compare", "gap table from results");
  std::string results_path, reference;
  compare->add_option("--results", results_path, "structured results file")
      ->required();
  compare->add_option("--reference", reference, "reference mode")->required();

  CLI11_PARSE(app, argc, argv);
  g_log = log_level == "quiet" ? 0 : log_level == "debug" ? 2 : 1;

  try {
    if (solve->parsed())
      return cmd_solve(topology, demands_path, mode, k, scale, aggregate,
                       provision_budget, chain_tokens, out, format);
    if (online->parsed())
      return cmd_online(topology, scenario_path, variant, seed, with_offline,
                        trace_in, trace_out, out, format);
    if (transform->parsed()) return cmd_transform(topology, ratio, out);
    if (gen->parsed()) {
      if (seed) spec.seed = seed;
      if (single_node) spec.mode = ProcessingMode::single_node;
      return cmd_gen(spec, prefix);
    }
    if (run->parsed()) return cmd_run(plan_path, seed);
    if (compare->parsed()) return cmd_compare(results_path, reference);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
