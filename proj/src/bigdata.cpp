#include "bdsim/bigdata.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace bdsim {

double mapper_size(double job_total, int num_mappers) {
  if (num_mappers < 1) throw ZeroMappers("job needs at least one mapper");
  if (job_total < 0) throw ConfigError("negative job size");
  return job_total / num_mappers;
}

double reducer_size(double mapper_block, double factor) {
  return mapper_block * factor;
}

double job_transmission_time(const TransferLegs& legs) {
  if (legs.storage_to_map.empty() || legs.map_to_reduce.empty() ||
      legs.reduce_to_storage.empty()) {
    throw IncompleteLegs("a transfer leg has not run");
  }
  auto mx = [](const std::vector<double>& v) {
    return *std::max_element(v.begin(), v.end());
  };
  return mx(legs.storage_to_map) + mx(legs.map_to_reduce) +
         mx(legs.reduce_to_storage);
}

std::pair<double, double> job_phase_times(const std::vector<BigDataTask>& tasks) {
  double j_mp = 0, j_rd = 0;
  for (const auto& t : tasks) {
    if (t.state != TaskState::Done) {
      throw TaskNotDone("task " + std::to_string(t.task_id) + " not finished");
    }
    double d = t.exec_end - t.exec_start;
    if (t.kind == TaskKind::Map) {
      j_mp = std::max(j_mp, d);
    } else {
      j_rd = std::max(j_rd, d);
    }
  }
  return {j_mp, j_rd};
}

double job_completion_time(double j_tr, double j_mp, double j_rd) {
  return j_tr + j_mp + j_rd;
}

size_t select_next_job(const std::vector<JobSpec>& queue) {
  if (queue.empty()) throw EmptyQueue("no jobs queued");
  size_t best = 0;
  for (size_t i = 1; i < queue.size(); ++i) {
    if (queue[i].submit_time < queue[best].submit_time ||
        (queue[i].submit_time == queue[best].submit_time &&
         queue[i].job_id < queue[best].job_id)) {
      best = i;
    }
  }
  return best;
}

int Vm::running_limit() const {
  return spec_.scheduler == VmSchedulerKind::SpaceShared
             ? spec_.pes
             : std::numeric_limits<int>::max();
}

bool Vm::add_task(int task_id, double length_mi) {
  if (static_cast<int>(running_.size()) < running_limit()) {
    running_.push_back({task_id, length_mi});
    return true;
  }
  waiting_.push_back({task_id, length_mi});
  return false;
}

double Vm::rate_of(int task_id) const {
  for (const auto& s : running_) {
    if (s.task_id == task_id) {
      if (spec_.scheduler == VmSchedulerKind::TimeShared) {
        return capacity_mips() / running_.size();
      }
      return spec_.mips_per_pe;
    }
  }
  return 0;
}

std::vector<int> Vm::step(double dt, std::vector<int>* promoted) {
  std::vector<int> finished;
  if (dt > 0 && !running_.empty()) {
    double share = spec_.scheduler == VmSchedulerKind::TimeShared
                       ? capacity_mips() / running_.size()
                       : spec_.mips_per_pe;
    for (auto& s : running_) s.remaining_mi -= share * dt;
  }
  // anything that would finish within a nanosecond at the current rate is
  // done; absorbs double rounding that could stall the clock
  double share = spec_.scheduler == VmSchedulerKind::TimeShared
                     ? (running_.empty() ? capacity_mips()
                                         : capacity_mips() / running_.size())
                     : spec_.mips_per_pe;
  double eps = std::max(1e-9, share * 1e-9);
  for (auto it = running_.begin(); it != running_.end();) {
    if (it->remaining_mi <= eps) {
      finished.push_back(it->task_id);
      it = running_.erase(it);
    } else {
      ++it;
    }
  }
  while (!waiting_.empty() &&
         static_cast<int>(running_.size()) < running_limit()) {
    if (promoted) promoted->push_back(waiting_.front().task_id);
    running_.push_back(waiting_.front());
    waiting_.pop_front();
  }
  return finished;
}

ClusterResources::ClusterResources(std::vector<HostCapacity> hosts) {
  for (auto& h : hosts) hosts_.push_back({h, h.pes, h.ram_mb});
}

std::optional<std::vector<int>> ClusterResources::try_allocate(
    const std::vector<VmSpec>& vms) {
  std::vector<Free> snapshot = hosts_;
  std::vector<int> placement;
  placement.reserve(vms.size());
  for (const auto& vm : vms) {
    bool placed = false;
    for (auto& h : snapshot) {
      if (h.pes >= vm.pes && h.ram_mb >= vm.ram_mb) {
        h.pes -= vm.pes;
        h.ram_mb -= vm.ram_mb;
        placement.push_back(h.cap.node);
        placed = true;
        break;
      }
    }
    if (!placed) return std::nullopt;
  }
  hosts_ = std::move(snapshot);
  return placement;
}

void ClusterResources::release(const std::vector<int>& host_nodes,
                               const std::vector<VmSpec>& vms) {
  for (size_t i = 0; i < host_nodes.size(); ++i) {
    for (auto& h : hosts_) {
      if (h.cap.node == host_nodes[i]) {
        h.pes += vms[i].pes;
        h.ram_mb += vms[i].ram_mb;
        break;
      }
    }
  }
}

int ClusterResources::free_pes(int host_node) const {
  for (const auto& h : hosts_) {
    if (h.cap.node == host_node) return h.pes;
  }
  return 0;
}

std::optional<std::vector<int>> ResourceManagerCore::request(
    int app_id, const std::vector<VmSpec>& vms) {
  if (pending_.empty()) {
    if (auto hosts = res_.try_allocate(vms)) {
      granted_[app_id] = {*hosts, vms};
      return hosts;
    }
  }
  pending_.push_back({app_id, vms});
  return std::nullopt;
}

std::vector<std::pair<int, std::vector<int>>> ResourceManagerCore::release(
    int app_id) {
  auto it = granted_.find(app_id);
  if (it != granted_.end()) {
    res_.release(it->second.first, it->second.second);
    granted_.erase(it);
  }
  std::vector<std::pair<int, std::vector<int>>> grants;
  while (!pending_.empty()) {
    auto hosts = res_.try_allocate(pending_.front().vms);
    if (!hosts) break;
    granted_[pending_.front().app_id] = {*hosts, pending_.front().vms};
    grants.emplace_back(pending_.front().app_id, *hosts);
    pending_.pop_front();
  }
  return grants;
}

std::optional<double> Vm::next_completion() const {
  if (running_.empty()) return std::nullopt;
  double share = spec_.scheduler == VmSchedulerKind::TimeShared
                     ? capacity_mips() / running_.size()
                     : spec_.mips_per_pe;
  double best = std::numeric_limits<double>::infinity();
  for (const auto& s : running_) {
    best = std::min(best, std::max(0.0, s.remaining_mi) / share);
  }
  return best;
}

double Vm::load_mi() const {
  double sum = 0;
  for (const auto& s : running_) sum += std::max(0.0, s.remaining_mi);
  for (const auto& s : waiting_) sum += std::max(0.0, s.remaining_mi);
  return sum;
}

double Vm::used_mips() const {
  if (running_.empty()) return 0;
  if (spec_.scheduler == VmSchedulerKind::TimeShared) return capacity_mips();
  return std::min<double>(running_.size(), spec_.pes) * spec_.mips_per_pe;
}

std::vector<int> place_tasks(const std::vector<double>& task_lengths_mi,
                             const std::vector<Vm*>& vms) {
  if (vms.empty()) throw NoVms("no VMs available for placement");
  std::vector<double> load;
  load.reserve(vms.size());
  for (const Vm* vm : vms) load.push_back(vm->load_mi());
  std::vector<int> out;
  out.reserve(task_lengths_mi.size());
  for (double mi : task_lengths_mi) {
    size_t best = 0;
    for (size_t i = 1; i < vms.size(); ++i) {
      if (load[i] < load[best] ||
          (load[i] == load[best] && vms[i]->id() < vms[best]->id())) {
        best = i;
      }
    }
    load[best] += mi;
    out.push_back(vms[best]->id());
  }
  return out;
}

}  // namespace bdsim
