#include "bdsim/energy.hpp"

#include <cmath>

namespace bdsim {

double host_power(double utilization, const PowerModel& model) {
  if (utilization < 0 || utilization > 1 + 1e-12) {
    throw UtilizationOutOfRange("utilization " + std::to_string(utilization) +
                                " outside [0,1]");
  }
  utilization = std::min(utilization, 1.0);
  if (utilization == 0) return model.idle_mode ? 0 : model.host_idle_w;
  return model.host_idle_w + (model.host_max_w - model.host_idle_w) * utilization;
}

double switch_power(int active_ports, const PowerModel& model) {
  if (active_ports == 0) return model.idle_mode ? 0 : model.switch_idle_w;
  return model.switch_static_w + active_ports * model.switch_per_port_w;
}

void EnergyLedger::set_power(const std::string& node, double watts, double now) {
  auto it = cursor_.find(node);
  if (it == cursor_.end()) {
    cursor_[node] = {now, watts};
    if (now > 0) intervals_[node].push_back({0, now, 0});
    return;
  }
  Cursor& c = it->second;
  if (c.watts == watts) return;
  if (now > c.since) intervals_[node].push_back({c.since, now, c.watts});
  c.since = now;
  c.watts = watts;
}

void EnergyLedger::finalize(double run_end) {
  for (auto& [node, c] : cursor_) {
    if (run_end > c.since) {
      intervals_[node].push_back({c.since, run_end, c.watts});
      c.since = run_end;
    } else if (intervals_[node].empty()) {
      intervals_[node].push_back({0, run_end, c.watts});
    }
  }
  finalized_ = true;
}

std::map<std::string, NodeEnergy> EnergyLedger::totals() const {
  std::map<std::string, NodeEnergy> out;
  for (const auto& [node, iv] : intervals_) {
    NodeEnergy e;
    double expect = 0;
    for (const auto& i : iv) {
      if (std::abs(i.start - expect) > 1e-9) {
        throw GapInLedger("ledger gap for '" + node + "' at t=" +
                          std::to_string(expect));
      }
      expect = i.end;
      double dt = i.end - i.start;
      e.joules += i.watts * dt;
      if (i.watts > 0) {
        e.busy_seconds += dt;
      } else {
        e.idle_seconds += dt;
      }
    }
    out[node] = e;
  }
  return out;
}

double EnergyLedger::grand_total_joules() const {
  double sum = 0;
  for (const auto& [node, e] : totals()) {
    (void)node;
    sum += e.joules;
  }
  return sum;
}

}  // namespace bdsim
