#include "bdsim/sim.hpp"

namespace bdsim {

EntityId Simulator::add_entity(std::shared_ptr<Entity> e, std::string name) {
  e->id = static_cast<EntityId>(entities_.size());
  e->name = std::move(name);
  entities_.push_back(std::move(e));
  return entities_.back()->id;
}

Entity* Simulator::entity(EntityId id) {
  if (id < 0 || id >= static_cast<EntityId>(entities_.size())) return nullptr;
  return entities_[id].get();
}

void Simulator::schedule(SimEvent ev) {
  if (ev.fire_time < clock_) {
    throw SchedulingInPast("event at t=" + std::to_string(ev.fire_time) +
                           " scheduled while clock is at t=" +
                           std::to_string(clock_));
  }
  ev.sequence = next_sequence_++;
  queue_.push(std::move(ev));
}

void Simulator::schedule(SimTime fire_time, EntityId source,
                         EntityId destination, int tag, std::any payload) {
  SimEvent ev;
  ev.fire_time = fire_time;
  ev.source = source;
  ev.destination = destination;
  ev.tag = tag;
  ev.payload = std::move(payload);
  schedule(std::move(ev));
}

SimTime Simulator::run(std::optional<SimTime> until) {
  while (!queue_.empty() && !stopped_) {
    const SimEvent& head = queue_.top();
    if (until && head.fire_time > *until) break;
    SimEvent ev = head;
    queue_.pop();
    clock_ = ev.fire_time;
    Entity* dst = entity(ev.destination);
    if (!dst) {
      throw UnknownDestination("event targets unregistered entity id " +
                               std::to_string(ev.destination));
    }
    if (on_dispatch) on_dispatch(ev);
    dst->handle(*this, ev);
  }
  return clock_;
}

}  // namespace bdsim
