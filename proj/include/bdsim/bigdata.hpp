#pragma once

#include <cstdint>
#include <deque>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace bdsim {

struct ZeroMappers : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct EmptyQueue : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct NoVms : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct IncompleteLegs : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct TaskNotDone : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// ---- sizing (mapper/reducer data block equations) ----

/// Per-mapper share of a job quantity (instruction count or bits).
double mapper_size(double job_total, int num_mappers);

/// Reducer block size as a factor of the mapper block.
double reducer_size(double mapper_block, double factor);

// ---- jobs and tasks ----

struct JobSpec {
  int user_id = 0;
  int job_id = 0;
  std::string job_type;  // small | medium | big | custom
  double submit_time = 0;
  double map_mi_total = 0;
  double reduce_mi_total = 0;
  double storage_to_map_bits = 0;
  double map_to_reduce_bits = 0;
  double reduce_to_storage_bits = 0;
  int num_mappers = 1;
  int num_reducers = 1;
};

enum class TaskKind { Map, Reduce };
enum class TaskState { Pending, AwaitingData, Executing, TransmittingOutput, Done };

struct BigDataTask {
  int task_id = -1;
  int job_id = -1;
  TaskKind kind = TaskKind::Map;
  double length_mi = 0;
  double input_bits = 0;
  double output_bits = 0;
  int vm = -1;
  TaskState state = TaskState::Pending;
  double exec_start = -1;
  double exec_end = -1;
  int inputs_pending = 0;  // packets still to arrive before execution
  double last_input_at = -1;
};

/// Per-job timing results. j_ct is exactly j_tr + j_mp + j_rd.
struct JobMetrics {
  int job_id = -1;
  double submit = 0;
  double queuing_delay = 0;
  double start = 0;
  double j_tr = 0;
  double j_mp = 0;
  double j_rd = 0;
  double j_ct = 0;
};

struct TransferLegs {
  std::vector<double> storage_to_map;
  std::vector<double> map_to_reduce;
  std::vector<double> reduce_to_storage;
};

/// j_tr = max(s_tr) + max(mp_tr) + max(rd_tr); every leg must have run.
double job_transmission_time(const TransferLegs& legs);

/// (max mapper duration, max reducer duration); all tasks must be Done.
std::pair<double, double> job_phase_times(const std::vector<BigDataTask>& tasks);

double job_completion_time(double j_tr, double j_mp, double j_rd);

// ---- scheduling policies ----

/// FCFS: minimum submit time, ties by job id. Operates on queue indices.
size_t select_next_job(const std::vector<JobSpec>& queue);

// ---- virtual machines ----

enum class VmSchedulerKind { TimeShared, SpaceShared };

struct VmSpec {
  int pes = 1;
  double mips_per_pe = 1000;
  int64_t ram_mb = 1024;
  VmSchedulerKind scheduler = VmSchedulerKind::TimeShared;
};

/// A VM with its task scheduler. Time-shared splits total capacity equally
/// among running tasks; space-shared runs up to `pes` tasks at full per-pe
/// rate with FIFO waiting.
class Vm {
 public:
  Vm(int id, int host_node, VmSpec spec) : id_(id), host_node_(host_node), spec_(spec) {}

  int id() const { return id_; }
  int host_node() const { return host_node_; }
  const VmSpec& spec() const { return spec_; }

  /// True if the task starts running immediately, false if it waits
  /// (space-shared FIFO overflow).
  bool add_task(int task_id, double length_mi);
  /// Advances all running tasks by dt; returns tasks that completed, in
  /// submission order. Waiting tasks promoted into freed slots are appended
  /// to `promoted` when given.
  std::vector<int> step(double dt, std::vector<int>* promoted = nullptr);
  /// Seconds until the next task completes at current rates.
  std::optional<double> next_completion() const;

  double rate_of(int task_id) const;  // MIPS currently given to the task
  /// Sum of remaining MI over resident tasks (placement load metric).
  double load_mi() const;
  /// MIPS currently being consumed (utilization reporting).
  double used_mips() const;
  double capacity_mips() const { return spec_.pes * spec_.mips_per_pe; }
  size_t task_count() const { return running_.size() + waiting_.size(); }

 private:
  struct Slot {
    int task_id;
    double remaining_mi;
  };
  int running_limit() const;

  int id_;
  int host_node_;
  VmSpec spec_;
  std::vector<Slot> running_;
  std::deque<Slot> waiting_;  // space-shared overflow
};

/// Least-used placement: tasks assigned one at a time to the VM with the
/// smallest load (remaining MI, including earlier assignments in this call);
/// ties by VM id. Returns task index -> VM id.
std::vector<int> place_tasks(const std::vector<double>& task_lengths_mi,
                             const std::vector<Vm*>& vms);

// ---- cluster bookkeeping ----

struct HeartbeatRecord {
  double time = 0;
  int host_node = -1;
  double used_mips = 0;
  int64_t used_ram_mb = 0;
};

struct HostCapacity {
  int node = -1;  // topology index
  int pes = 0;
  double mips_per_pe = 0;
  int64_t ram_mb = 0;
};

/// Tracks free host resources; VM allocation is first-fit over hosts in
/// registration order, all-or-nothing per request.
class ClusterResources {
 public:
  explicit ClusterResources(std::vector<HostCapacity> hosts);

  /// Host node index per VM, or nullopt if the fleet does not fit.
  std::optional<std::vector<int>> try_allocate(const std::vector<VmSpec>& vms);
  void release(const std::vector<int>& host_nodes,
               const std::vector<VmSpec>& vms);
  int free_pes(int host_node) const;

 private:
  struct Free {
    HostCapacity cap;
    int pes;
    int64_t ram_mb;
  };
  std::vector<Free> hosts_;
};

/// FCFS reservation queue in front of ClusterResources. Requests that cannot
/// be satisfied are held and granted in order as resources free up.
class ResourceManagerCore {
 public:
  explicit ResourceManagerCore(ClusterResources res) : res_(std::move(res)) {}

  /// Immediate grant (host per VM) or nullopt when queued.
  std::optional<std::vector<int>> request(int app_id,
                                          const std::vector<VmSpec>& vms);
  /// Releases an app's fleet and grants now-satisfiable queued requests.
  std::vector<std::pair<int, std::vector<int>>> release(int app_id);

  size_t queued() const { return pending_.size(); }

 private:
  struct Pending {
    int app_id;
    std::vector<VmSpec> vms;
  };
  ClusterResources res_;
  std::deque<Pending> pending_;
  std::map<int, std::pair<std::vector<int>, std::vector<VmSpec>>> granted_;
};

}  // namespace bdsim
