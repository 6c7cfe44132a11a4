#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "bdsim/bigdata.hpp"
#include "bdsim/energy.hpp"
#include "bdsim/reports.hpp"
#include "bdsim/topology.hpp"

namespace bdsim {

struct ScenarioConfig {
  std::string topology_path;
  std::string workload_path;
  std::string mode = "sdn";  // sdn | legacy | both
  uint64_t seed = 1;
  std::string out_dir = "results";

  struct Policies {
    std::string job_selection = "fcfs";
    std::string task_placement = "least_used";
    std::string vm_scheduler = "time_shared";  // or space_shared
    std::string routing_sdn = "sdn_max_bandwidth";
    std::string routing_legacy = "legacy_shortest_path";
    std::string traffic = "fair_share";
  } policies;

  int vm_count = 1;
  VmSpec vm;

  PowerModel power;

  bool per_task_mi = false;
  std::string legacy_pin = "endpoint_pair";  // or task_pair
  double heartbeat_interval_s = 1.0;
  std::optional<double> reduce_factor_override;
  int am_task_slots = 0;  // concurrently running jobs; 0 = unlimited
};

ScenarioConfig parse_scenario_file(const std::string& path);
ScenarioConfig parse_scenario_text(const std::string& text,
                                   const std::string& base_dir = "");

std::vector<JobSpec> parse_workload_file(const std::string& path);
std::vector<JobSpec> parse_workload_text(const std::string& text);

/// FNV-1a over the canonical scenario + topology + workload bytes.
std::string config_hash(const ScenarioConfig& cfg,
                        const std::string& topology_text,
                        const std::string& workload_text);

/// Executes one full simulation of `jobs` on `topo` in the given network
/// mode ("sdn" or "legacy") and returns the populated report. Also exposed
/// for in-memory tests; the CLI goes through run_scenario.
RunReport run_simulation(const PhysicalTopology& topo,
                         const std::vector<JobSpec>& jobs,
                         const ScenarioConfig& cfg, const std::string& mode,
                         uint64_t seed,
                         std::vector<HeartbeatRecord>* heartbeats = nullptr);

/// Loads the files referenced by cfg and runs one mode.
RunReport run_scenario(const ScenarioConfig& cfg, const std::string& mode,
                       uint64_t seed);

/// Writes topology.json, workload.csv, and scenario.json for the bundled
/// three-tier use case (16 hosts, 16 VMs, 15 jobs in 3 size classes, 1 s
/// inter-arrival, seeded-random job order).
void generate_usecase_fixture(const std::string& out_dir,
                              uint64_t order_seed = 42);

}  // namespace bdsim
