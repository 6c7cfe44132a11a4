#include "bdsim/network.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <functional>
#include <limits>

namespace bdsim {

static std::vector<int> bfs_distances(const PhysicalTopology& topo, int src) {
  std::vector<int> dist(topo.node_count(), -1);
  std::deque<int> q{src};
  dist[src] = 0;
  while (!q.empty()) {
    int v = q.front();
    q.pop_front();
    for (auto [w, l] : topo.adjacent(v)) {
      (void)l;
      if (dist[w] < 0) {
        dist[w] = dist[v] + 1;
        q.push_back(w);
      }
    }
  }
  return dist;
}

std::vector<std::vector<int>> min_hop_paths(const PhysicalTopology& topo,
                                            int src, int dst) {
  std::vector<int> dist = bfs_distances(topo, src);
  if (dist[dst] < 0) return {};
  std::vector<std::vector<int>> out;
  std::vector<int> path{dst};
  // walk backward over the shortest-path DAG
  std::function<void(int)> dfs = [&](int v) {
    if (v == src) {
      out.emplace_back(path.rbegin(), path.rend());
      return;
    }
    std::vector<int> preds;
    for (auto [w, l] : topo.adjacent(v)) {
      (void)l;
      if (dist[w] == dist[v] - 1 &&
          std::find(preds.begin(), preds.end(), w) == preds.end()) {
        preds.push_back(w);
      }
    }
    std::sort(preds.begin(), preds.end());
    for (int w : preds) {
      path.push_back(w);
      dfs(w);
      path.pop_back();
    }
  };
  dfs(dst);
  return out;
}

// Attaches concrete link choices to a node sequence. `pick` selects among
// parallel links given their link indices.
static Route links_for_path(const PhysicalTopology& topo,
                            const std::vector<int>& nodes,
                            const std::function<int(const std::vector<int>&)>& pick) {
  Route r;
  r.nodes = nodes;
  for (size_t i = 0; i + 1 < nodes.size(); ++i) {
    std::vector<int> candidates;
    for (auto [w, l] : topo.adjacent(nodes[i])) {
      if (w == nodes[i + 1]) candidates.push_back(l);
    }
    std::sort(candidates.begin(), candidates.end());
    r.links.push_back(pick(candidates));
  }
  return r;
}

Route LegacyShortestPath::route(const NetworkFabric& net, int src, int dst,
                                const Flow& flow) {
  std::vector<int> key;
  if (pin_ == PinBy::EndpointPair) {
    key = {src, dst};
  } else {
    key = {src, dst, flow.src_task, flow.dst_task};
  }
  auto it = pinned_.find(key);
  if (it != pinned_.end()) return it->second;

  auto paths = min_hop_paths(net.topology(), src, dst);
  if (paths.empty()) {
    throw NoRoute("no path between '" + net.topology().node(src).name +
                  "' and '" + net.topology().node(dst).name + "'");
  }
  const auto& nodes = paths[rng_() % paths.size()];
  Route r = links_for_path(net.topology(), nodes, [&](const std::vector<int>& c) {
    return c[rng_() % c.size()];
  });
  pinned_[key] = r;
  return r;
}

Route SdnMaxBandwidth::route(const NetworkFabric& net, int src, int dst,
                             const Flow&) {
  const PhysicalTopology& topo = net.topology();
  if (src == dst) return Route{{src}, {}};
  std::vector<int> dist = bfs_distances(topo, src);
  if (dist[dst] < 0) {
    throw NoRoute("no path between '" + topo.node(src).name + "' and '" +
                  topo.node(dst).name + "'");
  }
  const double inf = std::numeric_limits<double>::infinity();
  size_t n = topo.node_count();
  std::vector<double> width(n, -1);
  std::vector<Route> best(n);
  width[src] = inf;
  best[src] = Route{{src}, {}};

  // nodes grouped by BFS layer; the shortest-path DAG contains every
  // min-hop route, so a layer-by-layer widest-path DP is exact
  std::vector<std::vector<int>> layers(dist[dst] + 1);
  for (size_t v = 0; v < n; ++v) {
    if (dist[v] >= 0 && dist[v] <= dist[dst]) layers[dist[v]].push_back((int)v);
  }
  auto path_names = [&](const Route& r) {
    std::vector<std::string> names;
    for (int v : r.nodes) names.push_back(topo.node(v).name);
    return names;
  };
  for (int d = 1; d <= dist[dst]; ++d) {
    for (int v : layers[d]) {
      for (auto [u, l] : topo.adjacent(v)) {
        if (dist[u] != d - 1 || width[u] < 0) continue;
        double avail =
            net.link_capacity(l) / (net.channels_on_link(l) + 1);
        double w = std::min(width[u], avail);
        Route cand = best[u];
        cand.nodes.push_back(v);
        cand.links.push_back(l);
        bool take = false;
        if (w > width[v]) {
          take = true;
        } else if (w == width[v]) {
          auto a = path_names(cand), b = path_names(best[v]);
          if (a < b || (a == b && cand.links < best[v].links)) take = true;
        }
        if (take) {
          width[v] = w;
          best[v] = std::move(cand);
        }
      }
    }
  }
  return best[dst];
}

void FairShareTrafficPolicy::allocate(NetworkFabric& net) {
  for (auto& [id, p] : net.active_) {
    (void)id;
    double bw = std::numeric_limits<double>::infinity();
    for (int l : p.route.links) {
      int nc = net.link_channels_[l];
      bw = std::min(bw, net.link_capacity(l) / nc);
    }
    if (p.route.links.empty()) bw = std::numeric_limits<double>::infinity();
    p.bandwidth_bps = bw;
  }
}

NetworkFabric::NetworkFabric(const PhysicalTopology& topo,
                             std::unique_ptr<RoutingProtocol> routing,
                             std::unique_ptr<TrafficPolicy> traffic)
    : topo_(topo),
      routing_(std::move(routing)),
      traffic_(std::move(traffic)),
      link_channels_(topo.links().size(), 0),
      rules_(topo.node_count()) {}

const Packet* NetworkFabric::packet(int id) const {
  auto it = active_.find(id);
  if (it != active_.end()) return &it->second;
  for (const auto& p : done_) {
    if (p.id == id) return &p;
  }
  return nullptr;
}

const std::vector<ForwardingRule>& NetworkFabric::rules_at(int node_idx) const {
  return rules_[node_idx];
}

void NetworkFabric::install_rules(const Packet& p) {
  for (size_t i = 0; i + 1 < p.route.nodes.size(); ++i) {
    ForwardingRule r;
    r.node = p.route.nodes[i];
    r.packet_id = p.id;
    r.flow = p.flow;
    r.next_hop_node = p.route.nodes[i + 1];
    r.via_link = p.route.links[i];
    rules_[r.node].push_back(r);
  }
}

void NetworkFabric::remove_rules(int packet_id) {
  for (auto& table : rules_) {
    std::erase_if(table, [&](const ForwardingRule& r) {
      return r.packet_id == packet_id;
    });
  }
}

std::vector<int> NetworkFabric::update_progress(double at) {
  double dt = at - last_update_;
  last_update_ = at;
  std::vector<int> completed;
  for (auto it = active_.begin(); it != active_.end();) {
    Packet& p = it->second;
    if (dt > 0 && std::isfinite(p.bandwidth_bps)) {
      p.remaining_bits -= p.bandwidth_bps * dt;
    } else if (dt > 0) {
      p.remaining_bits = 0;  // zero-hop channel, infinite rate
    }
    // the relative term absorbs double rounding when remaining ~ size
    double eps = std::max(kCompletionEpsilonBits, p.size_bits * 1e-9);
    if (p.remaining_bits <= eps) {
      p.remaining_bits = 0;
      p.finish_time = at;
      if (!p.intervals.empty()) p.intervals.back().end = at;
      for (int l : p.route.links) link_channels_[l]--;
      remove_rules(p.id);
      completed.push_back(p.id);
      done_.push_back(p);
      it = active_.erase(it);
    } else {
      ++it;
    }
  }
  return completed;
}

std::map<int, double> NetworkFabric::reallocate_bandwidth(double now) {
  traffic_->allocate(*this);
  std::map<int, double> out;
  for (auto& [id, p] : active_) {
    out[id] = p.bandwidth_bps;
    if (p.intervals.empty() || p.intervals.back().bps != p.bandwidth_bps) {
      if (!p.intervals.empty()) p.intervals.back().end = now;
      p.intervals.push_back({now, now, p.bandwidth_bps});
    }
  }
  return out;
}

std::optional<double> NetworkFabric::earliest_finish_time(double now) const {
  std::optional<double> best;
  for (const auto& [id, p] : active_) {
    (void)id;
    double t = std::isfinite(p.bandwidth_bps)
                   ? p.remaining_bits / p.bandwidth_bps
                   : 0.0;
    if (!best || now + t < *best) best = now + t;
  }
  return best;
}

int NetworkFabric::note_instant_packet(const Flow& flow, double size_bits,
                                       double now) {
  Packet p;
  p.id = next_packet_id_++;
  p.flow = flow;
  p.size_bits = size_bits;
  p.remaining_bits = 0;
  p.start_time = now;
  p.finish_time = now;
  p.route.nodes.push_back(flow.src_node);
  if (flow.dst_node != flow.src_node) p.route.nodes.push_back(flow.dst_node);
  done_.push_back(p);
  return p.id;
}

double NetworkFabric::transmission_time(const Packet& p) {
  if (!(p.bandwidth_bps > 0)) {
    throw ZeroBandwidth("packet " + std::to_string(p.id) +
                        " has no allocated bandwidth");
  }
  return p.size_bits / p.bandwidth_bps;
}

int NetworkFabric::transmit_packet(const Flow& flow, double size_bits,
                                   double now, std::vector<int>* completed) {
  if (!(size_bits > 0)) throw ZeroSize("packet size must be positive");
  auto done_now = update_progress(now);
  if (completed) {
    completed->insert(completed->end(), done_now.begin(), done_now.end());
  }
  Route r = routing_->route(*this, flow.src_node, flow.dst_node, flow);
  Packet p;
  p.id = next_packet_id_++;
  p.flow = flow;
  p.size_bits = size_bits;
  p.remaining_bits = size_bits;
  p.start_time = now;
  p.route = r;
  install_rules(p);
  for (int l : p.route.links) link_channels_[l]++;
  int id = p.id;
  active_.emplace(id, std::move(p));
  reallocate_bandwidth(now);
  return id;
}

}  // namespace bdsim
