#include "bdsim/scenario.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <memory>
#include <sstream>

#include <nlohmann/json.hpp>

#include "bdsim/network.hpp"
#include "bdsim/sim.hpp"

namespace bdsim {

using json = nlohmann::json;
namespace fs = std::filesystem;

// ---------------------------------------------------------------- config

static VmSchedulerKind scheduler_from_string(const std::string& s) {
  if (s == "time_shared") return VmSchedulerKind::TimeShared;
  if (s == "space_shared") return VmSchedulerKind::SpaceShared;
  throw ConfigError("unknown vm scheduler '" + s + "'");
}

static json scenario_to_json(const ScenarioConfig& c) {
  json j;
  j["topology"] = c.topology_path;
  j["workload"] = c.workload_path;
  j["mode"] = c.mode;
  j["seed"] = c.seed;
  j["out_dir"] = c.out_dir;
  j["policies"] = {{"job_selection", c.policies.job_selection},
                   {"task_placement", c.policies.task_placement},
                   {"vm_scheduler", c.policies.vm_scheduler},
                   {"routing_sdn", c.policies.routing_sdn},
                   {"routing_legacy", c.policies.routing_legacy},
                   {"traffic", c.policies.traffic}};
  j["vm_fleet"] = {{"count", c.vm_count},
                   {"pes", c.vm.pes},
                   {"mips_per_pe", c.vm.mips_per_pe},
                   {"ram_mb", c.vm.ram_mb}};
  j["power"] = {{"host_idle_w", c.power.host_idle_w},
                {"host_max_w", c.power.host_max_w},
                {"switch_static_w", c.power.switch_static_w},
                {"switch_per_port_w", c.power.switch_per_port_w},
                {"switch_idle_w", c.power.switch_idle_w},
                {"idle_mode", c.power.idle_mode}};
  json opts = {{"per_task_mi", c.per_task_mi},
               {"legacy_pin", c.legacy_pin},
               {"heartbeat_interval_s", c.heartbeat_interval_s},
               {"am_task_slots", c.am_task_slots}};
  if (c.reduce_factor_override) {
    opts["reduce_factor"] = *c.reduce_factor_override;
  }
  j["options"] = opts;
  return j;
}

ScenarioConfig parse_scenario_text(const std::string& text,
                                   const std::string& base_dir) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("scenario parse error: ") + e.what());
  }
  ScenarioConfig c;
  auto path_of = [&](const std::string& p) {
    if (base_dir.empty() || fs::path(p).is_absolute()) return p;
    return (fs::path(base_dir) / p).string();
  };
  try {
    c.topology_path = path_of(j.at("topology").get<std::string>());
    c.workload_path = path_of(j.at("workload").get<std::string>());
    if (j.contains("mode")) c.mode = j["mode"].get<std::string>();
    if (j.contains("seed")) c.seed = j["seed"].get<uint64_t>();
    if (j.contains("out_dir")) c.out_dir = j["out_dir"].get<std::string>();
    if (j.contains("policies")) {
      const auto& p = j["policies"];
      if (p.contains("job_selection")) c.policies.job_selection = p["job_selection"];
      if (p.contains("task_placement")) c.policies.task_placement = p["task_placement"];
      if (p.contains("vm_scheduler")) c.policies.vm_scheduler = p["vm_scheduler"];
      if (p.contains("routing_sdn")) c.policies.routing_sdn = p["routing_sdn"];
      if (p.contains("routing_legacy")) c.policies.routing_legacy = p["routing_legacy"];
      if (p.contains("traffic")) c.policies.traffic = p["traffic"];
    }
    const auto& f = j.at("vm_fleet");
    c.vm_count = f.at("count").get<int>();
    c.vm.pes = f.at("pes").get<int>();
    c.vm.mips_per_pe = f.at("mips_per_pe").get<double>();
    c.vm.ram_mb = f.at("ram_mb").get<int64_t>();
    c.vm.scheduler = scheduler_from_string(c.policies.vm_scheduler);
    if (j.contains("power")) {
      const auto& p = j["power"];
      if (p.contains("host_idle_w")) c.power.host_idle_w = p["host_idle_w"];
      if (p.contains("host_max_w")) c.power.host_max_w = p["host_max_w"];
      if (p.contains("switch_static_w")) c.power.switch_static_w = p["switch_static_w"];
      if (p.contains("switch_per_port_w")) c.power.switch_per_port_w = p["switch_per_port_w"];
      if (p.contains("switch_idle_w")) c.power.switch_idle_w = p["switch_idle_w"];
      if (p.contains("idle_mode")) c.power.idle_mode = p["idle_mode"];
    }
    if (j.contains("options")) {
      const auto& o = j["options"];
      if (o.contains("per_task_mi")) c.per_task_mi = o["per_task_mi"];
      if (o.contains("legacy_pin")) c.legacy_pin = o["legacy_pin"];
      if (o.contains("heartbeat_interval_s")) c.heartbeat_interval_s = o["heartbeat_interval_s"];
      if (o.contains("am_task_slots")) c.am_task_slots = o["am_task_slots"];
      if (o.contains("reduce_factor")) c.reduce_factor_override = o["reduce_factor"].get<double>();
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("scenario field error: ") + e.what());
  }
  if (c.mode != "sdn" && c.mode != "legacy" && c.mode != "both") {
    throw ConfigError("mode must be sdn, legacy, or both");
  }
  if (c.legacy_pin != "endpoint_pair" && c.legacy_pin != "task_pair") {
    throw ConfigError("legacy_pin must be endpoint_pair or task_pair");
  }
  if (c.vm_count < 1) throw ConfigError("vm_fleet.count must be >= 1");
  return c;
}

ScenarioConfig parse_scenario_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open scenario '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_scenario_text(buf.str(), fs::path(path).parent_path().string());
}

std::vector<JobSpec> parse_workload_text(const std::string& text) {
  std::vector<JobSpec> jobs;
  std::istringstream in(text);
  std::string line;
  bool header = true;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (header) {
      header = false;
      continue;
    }
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::istringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) f.push_back(cell);
    if (f.size() != 11) {
      throw ConfigError("workload line " + std::to_string(lineno) +
                        ": expected 11 fields, got " + std::to_string(f.size()));
    }
    try {
      JobSpec s;
      s.user_id = std::stoi(f[0]);
      s.job_id = std::stoi(f[1]);
      s.job_type = f[2];
      s.submit_time = std::stod(f[3]);
      s.map_mi_total = std::stod(f[4]);
      s.reduce_mi_total = std::stod(f[5]);
      s.storage_to_map_bits = std::stod(f[6]) * 1e9;
      s.map_to_reduce_bits = std::stod(f[7]) * 1e9;
      s.reduce_to_storage_bits = std::stod(f[8]) * 1e9;
      s.num_mappers = std::stoi(f[9]);
      s.num_reducers = std::stoi(f[10]);
      if (s.num_mappers < 1 || s.num_reducers < 1) {
        throw ConfigError("workload line " + std::to_string(lineno) +
                          ": mappers and reducers must be >= 1");
      }
      jobs.push_back(s);
    } catch (const std::invalid_argument&) {
      throw ConfigError("workload line " + std::to_string(lineno) +
                        ": malformed number");
    }
  }
  return jobs;
}

std::vector<JobSpec> parse_workload_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open workload '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_workload_text(buf.str());
}

std::string config_hash(const ScenarioConfig& cfg,
                        const std::string& topology_text,
                        const std::string& workload_text) {
  std::string bytes = scenario_to_json(cfg).dump() + topology_text + workload_text;
  uint64_t h = 1469598103934665603ull;  // FNV-1a
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

// ---------------------------------------------------------------- run

namespace {

enum Tag : int {
  kAppSubmit = 1,
  kJobArrive,
  kNetTransmit,
  kNetProgress,
  kPacketDelivered,
  kTaskSubmit,
  kComputeProgress,
  kTaskDone,
  kHeartbeat,
  kAppDone,
};

enum class Leg { StorageToMap, MapToReduce, ReduceToStorage };

const char* leg_name(Leg l) {
  switch (l) {
    case Leg::StorageToMap: return "storage_to_map";
    case Leg::MapToReduce: return "map_to_reduce";
    case Leg::ReduceToStorage: return "reduce_to_storage";
  }
  return "?";
}

struct XferCtx {
  Leg leg = Leg::StorageToMap;
  int job_id = -1;
  int src_task = -1;
  int dst_task = -1;
};

struct TransmitRequest {
  Flow flow;
  double bits = 0;
  EntityId reply_to = -1;
  XferCtx ctx;
};

struct Delivered {
  int packet_id = -1;
  XferCtx ctx;
  double bits = 0;
  int src_node = -1;
  int dst_node = -1;
  double start = 0;
};

struct TaskRuntime {
  BigDataTask t;
  int outputs_pending = 0;
};

struct JobRuntime {
  JobSpec spec;
  double start = -1;
  bool started = false;
  bool done = false;
  std::vector<int> mapper_tasks;
  std::vector<int> reducer_tasks;
  int final_packets_pending = 0;
};

struct RunContext {
  const PhysicalTopology* topo = nullptr;
  ScenarioConfig cfg;
  std::string mode;
  Simulator sim;
  std::unique_ptr<NetworkFabric> fabric;
  std::vector<std::unique_ptr<Vm>> vms;
  std::map<int, std::vector<int>> host_vms;  // host node -> vm ids
  std::map<int, TaskRuntime> tasks;
  std::map<int, JobRuntime> jobs;
  EnergyLedger ledger;
  std::vector<HeartbeatRecord> heartbeats;
  std::vector<TransmissionRow> transmissions;
  int san_node = -1;
  EntityId controller_id = -1, compute_id = -1, am_id = -1, rm_id = -1;
  double compute_last_update = 0;
  double run_end = 0;
  int next_task_id = 1;

  RunContext(uint64_t seed) : sim(seed) {}

  Vm* vm(int id) { return vms[id].get(); }
  int vm_host(int id) { return vms[id]->host_node(); }

  void refresh_energy(double now) {
    for (size_t n = 0; n < topo->node_count(); ++n) {
      const Node& node = topo->node(n);
      double watts = 0;
      if (node.kind == NodeKind::Switch) {
        int active = 0;
        for (auto [w, l] : topo->adjacent(static_cast<int>(n))) {
          (void)w;
          if (fabric->channels_on_link(l) > 0) active++;
        }
        watts = switch_power(active, cfg.power);
      } else {
        double used = 0;
        auto it = host_vms.find(static_cast<int>(n));
        if (it != host_vms.end()) {
          for (int v : it->second) used += vms[v]->used_mips();
        }
        double cap = node.pes * node.mips_per_pe;
        watts = host_power(cap > 0 ? std::min(1.0, used / cap) : 0, cfg.power);
      }
      ledger.set_power(node.name, watts, now);
    }
  }
};

struct ControllerEntity : Entity {
  RunContext* ctx;
  std::map<int, TransmitRequest> pending;

  explicit ControllerEntity(RunContext* c) : ctx(c) {}

  void deliver(Simulator& sim, const std::vector<int>& ids, double now) {
    for (int id : ids) {
      auto it = pending.find(id);
      if (it == pending.end()) continue;
      const Packet* p = ctx->fabric->packet(id);
      Delivered d;
      d.packet_id = id;
      d.ctx = it->second.ctx;
      d.bits = it->second.bits;
      d.src_node = it->second.flow.src_node;
      d.dst_node = it->second.flow.dst_node;
      d.start = p ? p->start_time : now;
      sim.schedule(now, this->id, it->second.reply_to, kPacketDelivered, d);
      pending.erase(it);
    }
  }

  void reschedule(Simulator& sim, double now) {
    if (auto eft = ctx->fabric->earliest_finish_time(now)) {
      sim.schedule(std::max(*eft, now), this->id, this->id, kNetProgress);
    }
  }

  void handle(Simulator& sim, const SimEvent& ev) override {
    double now = sim.now();
    if (ev.tag == kNetTransmit) {
      auto req = std::any_cast<TransmitRequest>(ev.payload);
      if (!(req.bits > 0) || req.flow.src_node == req.flow.dst_node) {
        int id = ctx->fabric->note_instant_packet(req.flow, req.bits, now);
        Delivered d{id, req.ctx, req.bits, req.flow.src_node,
                    req.flow.dst_node, now};
        sim.schedule(now, this->id, req.reply_to, kPacketDelivered, d);
        return;
      }
      std::vector<int> completed;
      int id = ctx->fabric->transmit_packet(req.flow, req.bits, now, &completed);
      pending[id] = req;
      deliver(sim, completed, now);
      reschedule(sim, now);
      ctx->refresh_energy(now);
    } else if (ev.tag == kNetProgress) {
      auto completed = ctx->fabric->update_progress(now);
      ctx->fabric->reallocate_bandwidth(now);
      deliver(sim, completed, now);
      reschedule(sim, now);
      ctx->refresh_energy(now);
    }
  }
};

struct ComputeEntity : Entity {
  RunContext* ctx;

  explicit ComputeEntity(RunContext* c) : ctx(c) {}

  void sync(Simulator& sim, double now) {
    double dt = now - ctx->compute_last_update;
    ctx->compute_last_update = now;
    for (auto& vm : ctx->vms) {
      std::vector<int> promoted;
      auto finished = vm->step(dt, &promoted);
      for (int t : promoted) {
        auto& tr = ctx->tasks.at(t);
        tr.t.exec_start = now;
        tr.t.state = TaskState::Executing;
      }
      for (int t : finished) {
        auto& tr = ctx->tasks.at(t);
        tr.t.exec_end = now;
        tr.t.state = TaskState::TransmittingOutput;
        sim.schedule(now, id, ctx->am_id, kTaskDone, t);
      }
    }
    ctx->refresh_energy(now);
  }

  void reschedule(Simulator& sim, double now) {
    std::optional<double> best;
    for (auto& vm : ctx->vms) {
      if (auto t = vm->next_completion()) {
        if (!best || *t < *best) best = *t;
      }
    }
    if (best) sim.schedule(now + *best, id, id, kComputeProgress);
  }

  void handle(Simulator& sim, const SimEvent& ev) override {
    double now = sim.now();
    sync(sim, now);
    if (ev.tag == kTaskSubmit) {
      int task_id = std::any_cast<int>(ev.payload);
      auto& tr = ctx->tasks.at(task_id);
      bool running = ctx->vm(tr.t.vm)->add_task(task_id, tr.t.length_mi);
      if (running) {
        tr.t.exec_start = now;
        tr.t.state = TaskState::Executing;
      }
      ctx->refresh_energy(now);
    }
    reschedule(sim, now);
  }
};

struct MasterEntity : Entity {
  RunContext* ctx;
  std::vector<JobSpec> queue;
  int running_jobs = 0;
  int jobs_remaining = 0;

  explicit MasterEntity(RunContext* c) : ctx(c) {}

  void transmit(Simulator& sim, double now, int src_node, int dst_node,
                double bits, XferCtx xc) {
    TransmitRequest req;
    req.flow.src_node = src_node;
    req.flow.dst_node = dst_node;
    req.flow.job_id = xc.job_id;
    req.flow.src_task = xc.src_task;
    req.flow.dst_task = xc.dst_task;
    req.bits = bits;
    req.reply_to = id;
    req.ctx = xc;
    sim.schedule(now, id, ctx->controller_id, kNetTransmit, req);
  }

  void try_start_jobs(Simulator& sim, double now) {
    while (!queue.empty() &&
           (ctx->cfg.am_task_slots == 0 ||
            running_jobs < ctx->cfg.am_task_slots)) {
      size_t idx = select_next_job(queue);
      JobSpec spec = queue[idx];
      queue.erase(queue.begin() + idx);
      start_job(sim, now, spec);
    }
  }

  void start_job(Simulator& sim, double now, const JobSpec& spec) {
    running_jobs++;
    JobRuntime jr;
    jr.spec = spec;
    jr.start = now;
    jr.started = true;

    double map_mi = ctx->cfg.per_task_mi
                        ? spec.map_mi_total
                        : mapper_size(spec.map_mi_total, spec.num_mappers);
    double reduce_mi = ctx->cfg.per_task_mi
                           ? spec.reduce_mi_total
                           : spec.reduce_mi_total / spec.num_reducers;
    double ms_bits = mapper_size(spec.storage_to_map_bits, spec.num_mappers);
    double shuffle_total =
        ctx->cfg.reduce_factor_override
            ? spec.storage_to_map_bits * *ctx->cfg.reduce_factor_override
            : spec.map_to_reduce_bits;
    double pair_bits =
        shuffle_total / spec.num_mappers / spec.num_reducers;
    double final_bits = spec.reduce_to_storage_bits / spec.num_reducers;

    std::vector<double> lengths;
    std::vector<TaskKind> kinds;
    for (int m = 0; m < spec.num_mappers; ++m) {
      lengths.push_back(map_mi);
      kinds.push_back(TaskKind::Map);
    }
    for (int r = 0; r < spec.num_reducers; ++r) {
      lengths.push_back(reduce_mi);
      kinds.push_back(TaskKind::Reduce);
    }
    std::vector<Vm*> vm_ptrs;
    for (auto& vm : ctx->vms) vm_ptrs.push_back(vm.get());
    auto placement = place_tasks(lengths, vm_ptrs);

    for (size_t i = 0; i < lengths.size(); ++i) {
      TaskRuntime tr;
      tr.t.task_id = ctx->next_task_id++;
      tr.t.job_id = spec.job_id;
      tr.t.kind = kinds[i];
      tr.t.length_mi = lengths[i];
      tr.t.vm = placement[i];
      tr.t.state = TaskState::AwaitingData;
      if (kinds[i] == TaskKind::Map) {
        tr.t.input_bits = ms_bits;
        tr.t.output_bits = pair_bits * spec.num_reducers;
        tr.t.inputs_pending = 1;
        tr.outputs_pending = spec.num_reducers;
        jr.mapper_tasks.push_back(tr.t.task_id);
      } else {
        tr.t.input_bits = pair_bits * spec.num_mappers;
        tr.t.output_bits = final_bits;
        tr.t.inputs_pending = spec.num_mappers;
        tr.outputs_pending = 1;
        jr.reducer_tasks.push_back(tr.t.task_id);
      }
      ctx->tasks.emplace(tr.t.task_id, tr);
    }
    jr.final_packets_pending = spec.num_reducers;
    ctx->jobs[spec.job_id] = jr;

    // first transmission leg: storage to every mapper
    for (int m : ctx->jobs[spec.job_id].mapper_tasks) {
      const auto& tr = ctx->tasks.at(m);
      transmit(sim, now, ctx->san_node, ctx->vm_host(tr.t.vm), ms_bits,
               {Leg::StorageToMap, spec.job_id, -1, m});
    }
  }

  void on_delivered(Simulator& sim, double now, const Delivered& d) {
    TransmissionRow row;
    row.packet_id = d.packet_id;
    row.job_id = d.ctx.job_id;
    row.leg = leg_name(d.ctx.leg);
    row.src = ctx->topo->node(d.src_node).name;
    row.dst = ctx->topo->node(d.dst_node).name;
    row.bits = d.bits;
    row.start = d.start;
    row.finish = now;
    row.src_task = d.ctx.src_task;
    row.dst_task = d.ctx.dst_task;
    ctx->transmissions.push_back(row);

    switch (d.ctx.leg) {
      case Leg::StorageToMap:
      case Leg::MapToReduce: {
        auto& tr = ctx->tasks.at(d.ctx.dst_task);
        tr.t.last_input_at = now;
        if (d.ctx.leg == Leg::MapToReduce) {
          auto& src = ctx->tasks.at(d.ctx.src_task);
          if (--src.outputs_pending == 0) src.t.state = TaskState::Done;
        }
        if (--tr.t.inputs_pending == 0) {
          sim.schedule(now, id, ctx->compute_id, kTaskSubmit, tr.t.task_id);
        }
        break;
      }
      case Leg::ReduceToStorage: {
        auto& src = ctx->tasks.at(d.ctx.src_task);
        if (--src.outputs_pending == 0) src.t.state = TaskState::Done;
        auto& jr = ctx->jobs.at(d.ctx.job_id);
        if (--jr.final_packets_pending == 0) {
          jr.done = true;
          running_jobs--;
          jobs_remaining--;
          try_start_jobs(sim, now);
          if (jobs_remaining == 0) {
            sim.schedule(now, id, ctx->rm_id, kAppDone);
          }
        }
        break;
      }
    }
  }

  void on_task_done(Simulator& sim, double now, int task_id) {
    auto& tr = ctx->tasks.at(task_id);
    auto& jr = ctx->jobs.at(tr.t.job_id);
    if (tr.t.kind == TaskKind::Map) {
      double pair_bits = tr.t.output_bits / jr.spec.num_reducers;
      for (int r : jr.reducer_tasks) {
        const auto& rt = ctx->tasks.at(r);
        transmit(sim, now, ctx->vm_host(tr.t.vm), ctx->vm_host(rt.t.vm),
                 pair_bits, {Leg::MapToReduce, jr.spec.job_id, task_id, r});
      }
    } else {
      transmit(sim, now, ctx->vm_host(tr.t.vm), ctx->san_node,
               tr.t.output_bits,
               {Leg::ReduceToStorage, jr.spec.job_id, task_id, -1});
    }
  }

  void handle(Simulator& sim, const SimEvent& ev) override {
    double now = sim.now();
    switch (ev.tag) {
      case kJobArrive:
        queue.push_back(std::any_cast<JobSpec>(ev.payload));
        try_start_jobs(sim, now);
        break;
      case kPacketDelivered:
        on_delivered(sim, now, std::any_cast<Delivered>(ev.payload));
        break;
      case kTaskDone:
        on_task_done(sim, now, std::any_cast<int>(ev.payload));
        break;
      default:
        break;
    }
  }
};

struct RmEntity : Entity {
  RunContext* ctx;
  std::unique_ptr<ResourceManagerCore> core;
  std::vector<JobSpec> jobs;
  MasterEntity* am;

  RmEntity(RunContext* c, std::vector<JobSpec> j, MasterEntity* master)
      : ctx(c), jobs(std::move(j)), am(master) {
    std::vector<HostCapacity> caps;
    for (size_t n = 0; n < ctx->topo->node_count(); ++n) {
      const Node& node = ctx->topo->node(n);
      if (node.kind == NodeKind::Host) {
        caps.push_back({static_cast<int>(n), node.pes, node.mips_per_pe,
                        node.ram_mb});
      }
    }
    core = std::make_unique<ResourceManagerCore>(ClusterResources(caps));
  }

  void handle(Simulator& sim, const SimEvent& ev) override {
    double now = sim.now();
    if (ev.tag == kAppSubmit) {
      std::vector<VmSpec> fleet(ctx->cfg.vm_count, ctx->cfg.vm);
      auto hosts = core->request(0, fleet);
      if (!hosts) {
        throw ConfigError("VM fleet does not fit the cluster");
      }
      for (size_t i = 0; i < hosts->size(); ++i) {
        int vm_id = static_cast<int>(i);
        ctx->vms.push_back(
            std::make_unique<Vm>(vm_id, (*hosts)[i], ctx->cfg.vm));
        ctx->host_vms[(*hosts)[i]].push_back(vm_id);
      }
      am->jobs_remaining = static_cast<int>(jobs.size());
      if (jobs.empty()) {
        sim.schedule(now, id, id, kAppDone);
        return;
      }
      for (const auto& j : jobs) {
        sim.schedule(std::max(now, j.submit_time), id, ctx->am_id, kJobArrive, j);
      }
    } else if (ev.tag == kAppDone) {
      core->release(0);
      ctx->run_end = now;
      sim.stop();
    }
  }
};

struct NmEntity : Entity {
  RunContext* ctx;
  int host_node;

  NmEntity(RunContext* c, int host) : ctx(c), host_node(host) {}

  void handle(Simulator& sim, const SimEvent& ev) override {
    if (ev.tag != kHeartbeat) return;
    HeartbeatRecord rec;
    rec.time = sim.now();
    rec.host_node = host_node;
    auto it = ctx->host_vms.find(host_node);
    if (it != ctx->host_vms.end()) {
      for (int v : it->second) {
        rec.used_mips += ctx->vms[v]->used_mips();
        if (ctx->vms[v]->task_count() > 0) {
          rec.used_ram_mb += ctx->vms[v]->spec().ram_mb;
        }
      }
    }
    ctx->heartbeats.push_back(rec);
    sim.schedule(sim.now() + ctx->cfg.heartbeat_interval_s, id, id, kHeartbeat);
  }
};

struct SanEntity : Entity {
  void handle(Simulator&, const SimEvent&) override {}
};

}  // namespace

RunReport run_simulation(const PhysicalTopology& topo,
                         const std::vector<JobSpec>& jobs,
                         const ScenarioConfig& cfg, const std::string& mode,
                         uint64_t seed,
                         std::vector<HeartbeatRecord>* heartbeats) {
  if (mode != "sdn" && mode != "legacy") {
    throw ConfigError("run mode must be sdn or legacy");
  }
  RunContext ctx(seed);
  ctx.topo = &topo;
  ctx.cfg = cfg;
  ctx.cfg.vm.scheduler = scheduler_from_string(cfg.policies.vm_scheduler);
  ctx.mode = mode;

  for (size_t n = 0; n < topo.node_count(); ++n) {
    if (topo.node(n).kind == NodeKind::Storage) ctx.san_node = (int)n;
  }
  if (ctx.san_node < 0) throw ConfigError("topology has no storage node");

  std::unique_ptr<RoutingProtocol> routing;
  if (mode == "legacy") {
    auto pin = cfg.legacy_pin == "task_pair"
                   ? LegacyShortestPath::PinBy::TaskPair
                   : LegacyShortestPath::PinBy::EndpointPair;
    routing = std::make_unique<LegacyShortestPath>(ctx.sim.rng(), pin);
  } else {
    routing = std::make_unique<SdnMaxBandwidth>();
  }
  ctx.fabric = std::make_unique<NetworkFabric>(
      topo, std::move(routing), std::make_unique<FairShareTrafficPolicy>());

  auto controller = std::make_shared<ControllerEntity>(&ctx);
  auto compute = std::make_shared<ComputeEntity>(&ctx);
  auto master = std::make_shared<MasterEntity>(&ctx);
  auto rm = std::make_shared<RmEntity>(&ctx, jobs, master.get());
  ctx.controller_id = ctx.sim.add_entity(controller, "sdn-controller");
  ctx.compute_id = ctx.sim.add_entity(compute, "cluster-compute");
  ctx.am_id = ctx.sim.add_entity(master, "application-master");
  ctx.rm_id = ctx.sim.add_entity(rm, "resource-manager");
  ctx.sim.add_entity(std::make_shared<SanEntity>(), "san");

  for (size_t n = 0; n < topo.node_count(); ++n) {
    if (topo.node(n).kind == NodeKind::Host) {
      auto nm = std::make_shared<NmEntity>(&ctx, (int)n);
      EntityId nm_id =
          ctx.sim.add_entity(nm, "nm-" + topo.node(n).name);
      ctx.sim.schedule(cfg.heartbeat_interval_s, nm_id, nm_id, kHeartbeat);
    }
  }

  ctx.refresh_energy(0);
  ctx.sim.schedule(0, ctx.rm_id, ctx.rm_id, kAppSubmit);
  ctx.sim.run();
  if (ctx.run_end == 0) ctx.run_end = ctx.sim.now();
  ctx.ledger.finalize(ctx.run_end);

  // ---- report assembly ----
  RunReport rep;
  rep.mode = mode;
  rep.seed = seed;
  rep.run_end = quantize_seconds(ctx.run_end);

  for (auto& row : ctx.transmissions) {
    TransmissionRow t = row;
    t.start = quantize_seconds(t.start);
    t.finish = quantize_seconds(t.finish);
    t.duration = quantize_seconds(t.finish - t.start);
    rep.transmissions.push_back(t);
  }
  for (const auto& [tid, tr] : ctx.tasks) {
    ProcessingRow p;
    p.task_id = tid;
    p.job_id = tr.t.job_id;
    p.kind = tr.t.kind == TaskKind::Map ? "map" : "reduce";
    p.vm_id = tr.t.vm;
    p.start = quantize_seconds(tr.t.exec_start);
    p.duration = quantize_seconds(quantize_seconds(tr.t.exec_end) - p.start);
    rep.processing.push_back(p);
  }
  for (const auto& [jid, jr] : ctx.jobs) {
    JobRow j;
    j.job_id = jid;
    j.job_type = jr.spec.job_type;
    j.submit = quantize_seconds(jr.spec.submit_time);
    j.start = quantize_seconds(jr.start);
    j.queuing_delay = quantize_seconds(j.start - j.submit);
    TransferLegs legs;
    for (const auto& t : rep.transmissions) {
      if (t.job_id != jid) continue;
      if (t.leg == "storage_to_map") legs.storage_to_map.push_back(t.duration);
      if (t.leg == "map_to_reduce") legs.map_to_reduce.push_back(t.duration);
      if (t.leg == "reduce_to_storage") legs.reduce_to_storage.push_back(t.duration);
    }
    j.j_tr = job_transmission_time(legs);
    double j_mp = 0, j_rd = 0;
    for (const auto& p : rep.processing) {
      if (p.job_id != jid) continue;
      if (p.kind == "map") j_mp = std::max(j_mp, p.duration);
      if (p.kind == "reduce") j_rd = std::max(j_rd, p.duration);
    }
    j.j_mp = j_mp;
    j.j_rd = j_rd;
    j.j_ct = job_completion_time(j.j_tr, j.j_mp, j.j_rd);
    rep.jobs.push_back(j);
  }
  auto energy_totals = ctx.ledger.totals();
  for (const auto& [node, e] : energy_totals) {
    EnergyRow row;
    row.node = node;
    int idx = topo.node_index(node);
    row.kind = to_string(topo.node(idx).kind);
    row.joules = e.joules;
    row.busy_seconds = quantize_seconds(e.busy_seconds);
    row.idle_seconds = quantize_seconds(e.idle_seconds);
    rep.energy.push_back(row);
  }
  for (const auto& p : ctx.fabric->completed_packets()) {
    ForwardingRow f;
    f.packet_id = p.id;
    for (int n : p.route.nodes) f.path.push_back(topo.node(n).name);
    for (const auto& iv : p.intervals) {
      f.intervals.push_back({quantize_seconds(iv.start),
                             quantize_seconds(iv.end), iv.bps});
    }
    rep.forwarding.push_back(f);
  }
  std::sort(rep.forwarding.begin(), rep.forwarding.end(),
            [](const ForwardingRow& a, const ForwardingRow& b) {
              return a.packet_id < b.packet_id;
            });
  if (heartbeats) *heartbeats = ctx.heartbeats;
  return rep;
}

RunReport run_scenario(const ScenarioConfig& cfg, const std::string& mode,
                       uint64_t seed) {
  auto topo = PhysicalTopology::parse_file(cfg.topology_path);
  auto jobs = parse_workload_file(cfg.workload_path);
  auto slurp = [](const std::string& p) {
    std::ifstream in(p);
    std::stringstream buf;
    buf << in.rdbuf();
    return buf.str();
  };
  RunReport rep = run_simulation(topo, jobs, cfg, mode, seed);
  rep.config_hash =
      config_hash(cfg, slurp(cfg.topology_path), slurp(cfg.workload_path));
  return rep;
}

// ---------------------------------------------------------------- fixture

void generate_usecase_fixture(const std::string& out_dir, uint64_t order_seed) {
  fs::path dir(out_dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create '" + out_dir + "'");

  auto topo = PhysicalTopology::three_tier(4, 8, 8, 16, 1e9, 1e9, 1e9, 4e9,
                                           8, 10000, 30720);
  {
    std::ofstream out(dir / "topology.json", std::ios::binary);
    if (!out) throw IoError("cannot write topology.json");
    out << topo.to_json().dump(2) << '\n';
  }

  struct Row {
    const char* type;
    double map_mi, reduce_mi, storage_gb, shuffle_gb, final_gb;
    int nm, nr;
  };
  const Row small{"small", 100000, 75000, 200, 150, 100, 2, 1};
  const Row medium{"medium", 200000, 175000, 400, 350, 300, 4, 2};
  const Row big{"big", 300000, 275000, 600, 550, 500, 6, 3};
  std::vector<Row> rows;
  for (int i = 0; i < 5; ++i) rows.push_back(small);
  for (int i = 0; i < 5; ++i) rows.push_back(medium);
  for (int i = 0; i < 5; ++i) rows.push_back(big);
  std::mt19937_64 rng(order_seed);
  std::shuffle(rows.begin(), rows.end(), rng);

  {
    std::ofstream out(dir / "workload.csv", std::ios::binary);
    if (!out) throw IoError("cannot write workload.csv");
    out << "user_id,job_id,job_type,submit_time_s,map_mi_total,reduce_mi_total,"
           "storage_to_map_gbits,map_to_reduce_gbits,reduce_to_storage_gbits,"
           "num_mappers,num_reducers\n";
    char buf[256];
    for (size_t i = 0; i < rows.size(); ++i) {
      const Row& r = rows[i];
      std::snprintf(buf, sizeof(buf),
                    "1,%zu,%s,%.1f,%.0f,%.0f,%.0f,%.0f,%.0f,%d,%d\n", i + 1,
                    r.type, static_cast<double>(i), r.map_mi, r.reduce_mi,
                    r.storage_gb, r.shuffle_gb, r.final_gb, r.nm, r.nr);
      out << buf;
    }
  }
  {
    ScenarioConfig c;
    c.topology_path = "topology.json";
    c.workload_path = "workload.csv";
    c.mode = "both";
    c.seed = order_seed;
    c.out_dir = "results";
    c.vm_count = 16;
    c.vm = {4, 1250, 8192, VmSchedulerKind::TimeShared};
    // cap concurrent jobs: with all 15 jobs in flight the network saturates
    // and route choice no longer separates the two modes
    c.am_task_slots = 3;
    std::ofstream out(dir / "scenario.json", std::ios::binary);
    if (!out) throw IoError("cannot write scenario.json");
    out << scenario_to_json(c).dump(2) << '\n';
  }
}

}  // namespace bdsim
