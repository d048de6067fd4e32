#ifndef RINP_EXPERIMENT_HPP
#define RINP_EXPERIMENT_HPP

#include <cstdint>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "rinp/online.hpp"
#include "rinp/static_solvers.hpp"

namespace rinp {

// One solver execution on one input cell. Self-describing: the mode string,
// instance name, seed, scale and k pin down exactly what ran. objective is
// the total delay for static modes and the accepted volume for online modes.
struct ResultRecord {
  std::string mode;
  std::string instance;
  std::uint64_t seed = 0;
  double scale = 1.0;
  int k = 0;
  double objective = std::numeric_limits<double>::quiet_NaN();
  std::string status;
  double wall_ms = 0.0;
  std::vector<double> link_util;   // f_e / C_e per link id
  std::vector<double> node_alloc;  // placed work per node, first resource
  double gap_vs_ref = std::numeric_limits<double>::quiet_NaN();
};

// A sweep over modes x seeds x scales on one topology. Static modes read the
// demand document and scale every h_d and W_d^r by the scale factor; online
// modes generate one trace per (seed, scale) that all of them consume.
struct ExperimentPlan {
  std::string topology;   // topology document path
  std::string demands;    // demand document path, static modes
  std::string scenario;   // scenario document path, online modes
  std::vector<std::string> modes;
  std::string reference;  // when set, records carry gap_vs_ref against it
  int k = 1;              // subflow count for mip-k and sr-iteration
  std::vector<double> scales{1.0};
  std::vector<std::uint64_t> seeds{1};
  bool aggregation = false;
  double provision_budget = 0.0;  // > 0 turns on joint provisioning
  std::vector<ChainStage> chain;
  std::string out;                 // output path prefix, may be empty
  std::string format = "structured";  // structured | rows
};

// Modes executed by run_experiment. online runs the admission policy that
// may overload links, online-safe the capacity-checked variant,
// online-base the first-candidate baseline, offline-opt the exact packing.
bool mode_is_online(const std::string& mode);
bool mode_known(const std::string& mode);

ExperimentPlan load_plan(const std::string& path);
void save_plan(const ExperimentPlan& plan, const std::string& path);

// Throws std::invalid_argument on unknown modes or incompatible options
// (aggregation outside sr-infinite, provisioning with chains, sr-tsp on
// demands with split_limit != 1, online modes without a scenario, ...).
void check_plan(const ExperimentPlan& plan);

// Executes every (mode, seed, scale) cell. Deterministic per seed; modes in
// one cell consume identical inputs. on_record, when set, sees each record
// as it is produced.
std::vector<ResultRecord> run_experiment(
    const ExperimentPlan& plan,
    const std::function<void(const ResultRecord&)>& on_record = {});

// Structured results round-trip losslessly; rows output is one flat CSV of
// records plus a long-format link utilization CSV (records x links rows).
void emit_structured(const std::vector<ResultRecord>& records,
                     const std::string& path);
std::vector<ResultRecord> load_structured(const std::string& path);
void emit_rows(const std::vector<ResultRecord>& records,
               const std::string& results_csv, const std::string& util_csv);

// Per-mode gap summary against a reference mode, matching records on
// (instance, seed, scale). Returns a plain text table.
std::string compare_table(const std::vector<ResultRecord>& records,
                          const std::string& reference_mode);

}  // namespace rinp

#endif
