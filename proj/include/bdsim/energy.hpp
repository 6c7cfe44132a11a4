#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace bdsim {

struct UtilizationOutOfRange : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct GapInLedger : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct PowerModel {
  double host_idle_w = 100;
  double host_max_w = 250;
  double switch_static_w = 50;
  double switch_per_port_w = 5;
  double switch_idle_w = 50;
  bool idle_mode = true;  // nodes with no activity draw zero
};

/// Linear host power: idle + (max - idle) * utilization; zero when idle
/// with idle-mode on.
double host_power(double utilization, const PowerModel& model);

/// Static + per-active-port switch power; zero when no port is active and
/// idle-mode is on.
double switch_power(int active_ports, const PowerModel& model);

struct PowerInterval {
  double start = 0;
  double end = 0;
  double watts = 0;
};

struct NodeEnergy {
  double joules = 0;
  double busy_seconds = 0;
  double idle_seconds = 0;
};

/// Piecewise-constant power history per node; intervals are contiguous and
/// cover [0, run end].
class EnergyLedger {
 public:
  void set_power(const std::string& node, double watts, double now);
  void finalize(double run_end);

  const std::map<std::string, std::vector<PowerInterval>>& intervals() const {
    return intervals_;
  }

  /// Joules and busy/idle split per node. Throws GapInLedger if a node's
  /// intervals do not tile its timeline.
  std::map<std::string, NodeEnergy> totals() const;
  double grand_total_joules() const;

 private:
  struct Cursor {
    double since = 0;
    double watts = 0;
  };
  std::map<std::string, Cursor> cursor_;
  std::map<std::string, std::vector<PowerInterval>> intervals_;
  bool finalized_ = false;
};

}  // namespace bdsim
