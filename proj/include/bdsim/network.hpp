#pragma once

#include <map>
#include <memory>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "bdsim/topology.hpp"

namespace bdsim {

struct NoRoute : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct ZeroSize : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct ZeroBandwidth : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Flow {
  int src_node = -1;  // topology index of a host or the SAN
  int dst_node = -1;
  int job_id = -1;
  int src_task = -1;
  int dst_task = -1;
};

struct Route {
  std::vector<int> nodes;  // topology indices, source first
  std::vector<int> links;  // link index between nodes[i] and nodes[i+1]
  int hops() const { return static_cast<int>(links.size()); }
};

struct BandwidthInterval {
  double start = 0;
  double end = 0;
  double bps = 0;
};

struct Packet {
  int id = -1;
  Flow flow;
  double size_bits = 0;
  double remaining_bits = 0;
  double start_time = 0;
  double finish_time = -1;
  Route route;
  double bandwidth_bps = 0;
  std::vector<BandwidthInterval> intervals;
};

struct ForwardingRule {
  int node = -1;
  int packet_id = -1;
  Flow flow;
  int next_hop_node = -1;
  int via_link = -1;
};

class NetworkFabric;

/// Route computation strategy. Implementations must return routes whose
/// consecutive nodes are joined by real links.
class RoutingProtocol {
 public:
  virtual ~RoutingProtocol() = default;
  virtual Route route(const NetworkFabric& net, int src, int dst,
                      const Flow& flow) = 0;
  virtual std::string name() const = 0;
};

/// Min-hop Dijkstra with a random choice among equal-length routes, made once
/// per pinning key and reused for the whole run.
class LegacyShortestPath : public RoutingProtocol {
 public:
  enum class PinBy { EndpointPair, TaskPair };
  LegacyShortestPath(std::mt19937_64& rng, PinBy pin = PinBy::EndpointPair)
      : rng_(rng), pin_(pin) {}
  Route route(const NetworkFabric& net, int src, int dst,
              const Flow& flow) override;
  std::string name() const override { return "legacy_shortest_path"; }

  const std::map<std::vector<int>, Route>& pinned() const { return pinned_; }

 private:
  std::mt19937_64& rng_;
  PinBy pin_;
  std::map<std::vector<int>, Route> pinned_;
};

/// Min-hop first, then maximum bottleneck of per-link available bandwidth
/// (capacity / (channels + 1)); evaluated fresh for every packet. Remaining
/// ties go to the lexicographically smallest node-name sequence.
class SdnMaxBandwidth : public RoutingProtocol {
 public:
  Route route(const NetworkFabric& net, int src, int dst,
              const Flow& flow) override;
  std::string name() const override { return "sdn_max_bandwidth"; }
};

class TrafficPolicy {
 public:
  virtual ~TrafficPolicy() = default;
  virtual void allocate(NetworkFabric& net) = 0;
  virtual std::string name() const = 0;
};

/// Equal division of each link's capacity among the channels crossing it;
/// a channel gets the minimum of its per-link shares.
class FairShareTrafficPolicy : public TrafficPolicy {
 public:
  void allocate(NetworkFabric& net) override;
  std::string name() const override { return "fair_share"; }
};

/// Flow-level data plane: one channel per admitted packet, global
/// reallocation at every admission and completion.
class NetworkFabric {
 public:
  NetworkFabric(const PhysicalTopology& topo,
                std::unique_ptr<RoutingProtocol> routing,
                std::unique_ptr<TrafficPolicy> traffic);

  /// Controller admission sequence: progress update, completed-packet sweep,
  /// route, rule installation, channel creation, reallocation. Completed
  /// packet ids from the initial sweep are appended to `completed`.
  int transmit_packet(const Flow& flow, double size_bits, double now,
                      std::vector<int>* completed = nullptr);

  /// Advances every active packet to `at`; returns packets that finished.
  /// Their channels and forwarding rules are removed.
  std::vector<int> update_progress(double at);

  /// Applies the traffic policy; returns channel(packet) id -> bandwidth.
  std::map<int, double> reallocate_bandwidth(double now);

  /// now + min(remaining / bandwidth) over active packets.
  std::optional<double> earliest_finish_time(double now) const;

  /// Records a transfer that never touches a link (same-host endpoints or
  /// zero bits) as an already-completed packet and returns its id.
  int note_instant_packet(const Flow& flow, double size_bits, double now);

  static double transmission_time(const Packet& p);

  const PhysicalTopology& topology() const { return topo_; }
  int channels_on_link(int link_idx) const { return link_channels_[link_idx]; }
  double link_capacity(int link_idx) const {
    return topo_.links()[link_idx].bandwidth_bps;
  }
  const std::map<int, Packet>& active_packets() const { return active_; }
  const std::vector<Packet>& completed_packets() const { return done_; }
  const Packet* packet(int id) const;
  const std::vector<ForwardingRule>& rules_at(int node_idx) const;
  RoutingProtocol& routing() { return *routing_; }

 private:
  void install_rules(const Packet& p);
  void remove_rules(int packet_id);

  const PhysicalTopology& topo_;
  std::unique_ptr<RoutingProtocol> routing_;
  std::unique_ptr<TrafficPolicy> traffic_;
  std::map<int, Packet> active_;
  std::vector<Packet> done_;
  std::vector<int> link_channels_;
  std::vector<std::vector<ForwardingRule>> rules_;
  double last_update_ = 0;
  int next_packet_id_ = 0;

  friend class FairShareTrafficPolicy;
};

/// All minimum-hop node sequences from src to dst (test oracle helper and
/// backing for the legacy random tie-break).
std::vector<std::vector<int>> min_hop_paths(const PhysicalTopology& topo,
                                            int src, int dst);

constexpr double kCompletionEpsilonBits = 1e-9;

}  // namespace bdsim
