#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace bdsim {

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct JobSetMismatch : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Seconds quantized to the 6-decimal fixed point used in every CSV.
double quantize_seconds(double s);
std::string format_seconds(double s);

struct JobRow {
  int job_id = -1;
  std::string job_type;
  double submit = 0;
  double queuing_delay = 0;
  double start = 0;
  double j_tr = 0;
  double j_mp = 0;
  double j_rd = 0;
  double j_ct = 0;
};

struct TransmissionRow {
  int packet_id = -1;
  int job_id = -1;
  std::string leg;  // storage_to_map | map_to_reduce | reduce_to_storage
  std::string src;
  std::string dst;
  double bits = 0;
  double start = 0;
  double finish = 0;
  double duration = 0;
  int src_task = -1;  // -1 when the endpoint is storage
  int dst_task = -1;
};

struct ProcessingRow {
  int task_id = -1;
  int job_id = -1;
  std::string kind;  // map | reduce
  int vm_id = -1;
  double start = 0;
  double duration = 0;
};

struct EnergyRow {
  std::string node;
  std::string kind;  // host | switch | storage
  double joules = 0;
  double busy_seconds = 0;
  double idle_seconds = 0;
};

struct ForwardingIntervalRow {
  double start = 0;
  double end = 0;
  double bps = 0;
};

struct ForwardingRow {
  int packet_id = -1;
  std::vector<std::string> path;
  std::vector<ForwardingIntervalRow> intervals;
};

struct RunReport {
  std::string mode;  // sdn | legacy
  uint64_t seed = 0;
  std::string config_hash;
  double run_end = 0;
  std::vector<JobRow> jobs;
  std::vector<TransmissionRow> transmissions;
  std::vector<ProcessingRow> processing;
  std::vector<EnergyRow> energy;
  std::vector<ForwardingRow> forwarding;

  double total_energy_joules() const;
};

/// Writes jobs.csv, transmissions.csv, processing.csv, energy.csv,
/// forwarding.csv, and run.meta into `directory` (created if absent).
/// Byte-stable for a fixed report.
void emit(const RunReport& report, const std::string& directory);

/// Reads a directory written by emit().
RunReport load_report(const std::string& directory);

struct JobComparison {
  int job_id = -1;
  double transmission_improvement_pct = 0;
  double completion_improvement_pct = 0;
};

/// Percentage gains of `sdn` over `legacy`, (legacy - sdn) / legacy * 100.
struct ComparisonSummary {
  std::vector<JobComparison> jobs;
  double mean_transmission_improvement_pct = 0;
  double mean_completion_improvement_pct = 0;
  double energy_improvement_pct = 0;
};

ComparisonSummary compare(const RunReport& sdn, const RunReport& legacy);
void emit_comparison(const ComparisonSummary& s, const std::string& path);

}  // namespace bdsim
