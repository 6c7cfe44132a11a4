#pragma once

#include <any>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <queue>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace bdsim {

using SimTime = double;
using EntityId = int;

struct SchedulingInPast : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct UnknownDestination : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct SimEvent {
  SimTime fire_time = 0;
  EntityId source = -1;
  EntityId destination = -1;
  int tag = 0;
  std::any payload;
  uint64_t sequence = 0;
};

class Simulator;

class Entity {
 public:
  virtual ~Entity() = default;
  virtual void handle(Simulator& sim, const SimEvent& ev) = 0;

  EntityId id = -1;
  std::string name;
};

/// Single-threaded discrete-event engine. Events with equal fire times are
/// dispatched in insertion order.
class Simulator {
 public:
  explicit Simulator(uint64_t seed = 0) : rng_(seed) {}

  EntityId add_entity(std::shared_ptr<Entity> e, std::string name);
  Entity* entity(EntityId id);

  void schedule(SimEvent ev);
  void schedule(SimTime fire_time, EntityId source, EntityId destination,
                int tag, std::any payload = {});

  /// Drains the queue (or up to `until`), dispatching events in
  /// (fire_time, sequence) order. Returns the final clock.
  SimTime run(std::optional<SimTime> until = std::nullopt);

  SimTime now() const { return clock_; }
  void stop() { stopped_ = true; }
  bool stopped() const { return stopped_; }
  size_t pending() const { return queue_.size(); }

  std::mt19937_64& rng() { return rng_; }

  /// Test hook: observes every dispatched event.
  std::function<void(const SimEvent&)> on_dispatch;

 private:
  struct Later {
    bool operator()(const SimEvent& a, const SimEvent& b) const {
      if (a.fire_time != b.fire_time) return a.fire_time > b.fire_time;
      return a.sequence > b.sequence;
    }
  };

  std::vector<std::shared_ptr<Entity>> entities_;
  std::priority_queue<SimEvent, std::vector<SimEvent>, Later> queue_;
  SimTime clock_ = 0;
  uint64_t next_sequence_ = 0;
  bool stopped_ = false;
  std::mt19937_64 rng_;
};

}  // namespace bdsim
