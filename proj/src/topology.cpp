#include "bdsim/topology.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

namespace bdsim {

using json = nlohmann::json;
using Code = TopologyError::Code;

std::string to_string(NodeKind k) {
  switch (k) {
    case NodeKind::Host: return "host";
    case NodeKind::Switch: return "switch";
    case NodeKind::Storage: return "storage";
  }
  return "?";
}

std::string to_string(SwitchTier t) {
  switch (t) {
    case SwitchTier::Core: return "core";
    case SwitchTier::Aggregation: return "aggregation";
    case SwitchTier::Edge: return "edge";
  }
  return "?";
}

static SwitchTier tier_from_string(const std::string& s) {
  if (s == "core") return SwitchTier::Core;
  if (s == "aggregation") return SwitchTier::Aggregation;
  if (s == "edge") return SwitchTier::Edge;
  throw TopologyError(Code::SchemaError, "unknown switch tier '" + s + "'");
}

void PhysicalTopology::add_node(Node n) {
  if (index_.count(n.name)) {
    throw TopologyError(Code::DuplicateName, "duplicate node name '" + n.name + "'");
  }
  index_[n.name] = static_cast<int>(nodes_.size());
  nodes_.push_back(std::move(n));
}

void PhysicalTopology::add_link(const std::string& a, const std::string& b,
                                double bps) {
  if (!index_.count(a)) {
    throw TopologyError(Code::DanglingLink, "link endpoint '" + a + "' is not a node");
  }
  if (!index_.count(b)) {
    throw TopologyError(Code::DanglingLink, "link endpoint '" + b + "' is not a node");
  }
  if (a == b) {
    throw TopologyError(Code::SchemaError, "self-link at '" + a + "'");
  }
  if (!(bps > 0)) {
    throw TopologyError(Code::NonPositiveBandwidth,
                        "link " + a + "<->" + b + " has non-positive bandwidth");
  }
  links_.push_back({a, b, bps});
  link_ends_.emplace_back(index_.at(a), index_.at(b));
}

void PhysicalTopology::build_adjacency() {
  adj_.assign(nodes_.size(), {});
  for (size_t i = 0; i < links_.size(); ++i) {
    auto [ia, ib] = link_ends_[i];
    adj_[ia].emplace_back(ib, static_cast<int>(i));
    adj_[ib].emplace_back(ia, static_cast<int>(i));
  }
}

int PhysicalTopology::node_index(const std::string& name) const {
  auto it = index_.find(name);
  return it == index_.end() ? -1 : it->second;
}

int PhysicalTopology::link_endpoint_a(int link_idx) const {
  return link_ends_[link_idx].first;
}
int PhysicalTopology::link_endpoint_b(int link_idx) const {
  return link_ends_[link_idx].second;
}

static void check_fields(const json& obj, const char* where,
                         const std::set<std::string>& allowed) {
  if (!obj.is_object()) {
    throw TopologyError(Code::SchemaError, std::string(where) + ": expected object");
  }
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    if (!allowed.count(it.key())) {
      throw TopologyError(Code::SchemaError, std::string(where) +
                              ": unknown field '" + it.key() + "'");
    }
  }
  for (const auto& f : allowed) {
    if (!obj.contains(f)) {
      throw TopologyError(Code::SchemaError,
                          std::string(where) + ": missing field '" + f + "'");
    }
  }
}

PhysicalTopology PhysicalTopology::parse(const json& doc) {
  check_fields(doc, "topology", {"hosts", "switches", "storage", "links"});
  PhysicalTopology t;
  for (const auto& h : doc.at("hosts")) {
    check_fields(h, "host", {"name", "pes", "mips_per_pe", "ram_mb"});
    Node n;
    n.name = h.at("name").get<std::string>();
    n.kind = NodeKind::Host;
    n.pes = h.at("pes").get<int>();
    n.mips_per_pe = h.at("mips_per_pe").get<double>();
    n.ram_mb = h.at("ram_mb").get<int64_t>();
    if (n.pes < 1 || !(n.mips_per_pe > 0)) {
      throw TopologyError(Code::SchemaError, "host '" + n.name + "': invalid resources");
    }
    t.add_node(std::move(n));
  }
  for (const auto& s : doc.at("switches")) {
    check_fields(s, "switch", {"name", "tier"});
    Node n;
    n.name = s.at("name").get<std::string>();
    n.kind = NodeKind::Switch;
    n.tier = tier_from_string(s.at("tier").get<std::string>());
    t.add_node(std::move(n));
  }
  for (const auto& s : doc.at("storage")) {
    check_fields(s, "storage", {"name", "pes", "mips_per_pe", "ram_mb"});
    Node n;
    n.name = s.at("name").get<std::string>();
    n.kind = NodeKind::Storage;
    n.pes = s.at("pes").get<int>();
    n.mips_per_pe = s.at("mips_per_pe").get<double>();
    n.ram_mb = s.at("ram_mb").get<int64_t>();
    t.add_node(std::move(n));
  }
  for (const auto& l : doc.at("links")) {
    check_fields(l, "link", {"a", "b", "bandwidth_bps"});
    t.add_link(l.at("a").get<std::string>(), l.at("b").get<std::string>(),
               l.at("bandwidth_bps").get<double>());
  }
  t.build_adjacency();
  auto violations = t.validate();
  if (!violations.empty()) {
    std::string what = "invalid topology:";
    for (const auto& v : violations) what += " [" + v + "]";
    if (violations[0].rfind("DisconnectedGraph", 0) == 0) {
      throw TopologyError(Code::DisconnectedGraph, what);
    }
    throw TopologyError(Code::SchemaError, what);
  }
  return t;
}

PhysicalTopology PhysicalTopology::parse_text(const std::string& text) {
  return parse(json::parse(text));
}

PhysicalTopology PhysicalTopology::parse_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw TopologyError(Code::SchemaError, "cannot open '" + path + "'");
  json doc;
  in >> doc;
  return parse(doc);
}

json PhysicalTopology::to_json() const {
  json hosts = json::array(), switches = json::array(), storage = json::array();
  for (const auto& n : nodes_) {
    switch (n.kind) {
      case NodeKind::Host:
        hosts.push_back({{"name", n.name},
                         {"pes", n.pes},
                         {"mips_per_pe", n.mips_per_pe},
                         {"ram_mb", n.ram_mb}});
        break;
      case NodeKind::Switch:
        switches.push_back({{"name", n.name}, {"tier", to_string(n.tier)}});
        break;
      case NodeKind::Storage:
        storage.push_back({{"name", n.name},
                           {"pes", n.pes},
                           {"mips_per_pe", n.mips_per_pe},
                           {"ram_mb", n.ram_mb}});
        break;
    }
  }
  json links = json::array();
  for (const auto& l : links_) {
    links.push_back({{"a", l.a}, {"b", l.b}, {"bandwidth_bps", l.bandwidth_bps}});
  }
  return {{"hosts", hosts},
          {"switches", switches},
          {"storage", storage},
          {"links", links}};
}

std::vector<std::string> PhysicalTopology::validate() const {
  std::vector<std::string> out;
  for (size_t i = 0; i < links_.size(); ++i) {
    if (!(links_[i].bandwidth_bps > 0)) {
      out.push_back("NonPositiveBandwidth: link " + links_[i].a + "<->" + links_[i].b);
    }
  }
  if (!nodes_.empty()) {
    // connectivity via BFS from node 0
    std::vector<bool> seen(nodes_.size(), false);
    std::vector<int> stack{0};
    seen[0] = true;
    while (!stack.empty()) {
      int v = stack.back();
      stack.pop_back();
      for (auto [w, l] : adj_[v]) {
        (void)l;
        if (!seen[w]) {
          seen[w] = true;
          stack.push_back(w);
        }
      }
    }
    for (size_t i = 0; i < nodes_.size(); ++i) {
      if (!seen[i]) {
        out.push_back("DisconnectedGraph: node '" + nodes_[i].name +
                      "' unreachable");
      }
    }
  }
  int storage_count = 0;
  for (size_t i = 0; i < nodes_.size(); ++i) {
    const Node& n = nodes_[i];
    if (n.kind == NodeKind::Storage) storage_count++;
    if (n.kind != NodeKind::Switch) {
      bool attached = false;
      for (auto [w, l] : adj_[i]) {
        (void)l;
        if (nodes_[w].kind == NodeKind::Switch) attached = true;
      }
      if (!attached && nodes_.size() > 1) {
        out.push_back("UnattachedEndpoint: '" + n.name +
                      "' has no switch link");
      }
    }
  }
  if (storage_count > 1) {
    out.push_back("MultipleStorage: expected at most one SAN, found " +
                  std::to_string(storage_count));
  }
  return out;
}

PhysicalTopology PhysicalTopology::three_tier(
    int cores, int aggs, int edges, int hosts, double core_agg_bps,
    double agg_edge_bps, double edge_host_bps, double san_core_bps,
    int host_pes, double host_mips, int64_t host_ram_mb) {
  if (cores < 1 || aggs < 1 || edges < 1 || hosts < 1) {
    throw TopologyError(Code::ShapeError, "all tier counts must be >= 1");
  }
  if (hosts % edges != 0) {
    throw TopologyError(Code::ShapeError,
                        "hosts (" + std::to_string(hosts) +
                            ") not divisible by edges (" + std::to_string(edges) + ")");
  }
  if (edges % aggs != 0 && aggs % edges != 0) {
    throw TopologyError(Code::ShapeError, "aggregation/edge counts incompatible");
  }
  PhysicalTopology t;
  auto name = [](const char* prefix, int i) {
    return std::string(prefix) + std::to_string(i);
  };
  for (int i = 1; i <= hosts; ++i) {
    t.add_node({name("host", i), NodeKind::Host, SwitchTier::Edge, host_pes,
                host_mips, host_ram_mb});
  }
  for (int i = 1; i <= cores; ++i) {
    t.add_node({name("core", i), NodeKind::Switch, SwitchTier::Core});
  }
  for (int i = 1; i <= aggs; ++i) {
    t.add_node({name("agg", i), NodeKind::Switch, SwitchTier::Aggregation});
  }
  for (int i = 1; i <= edges; ++i) {
    t.add_node({name("edge", i), NodeKind::Switch, SwitchTier::Edge});
  }
  t.add_node({"san", NodeKind::Storage, SwitchTier::Edge, host_pes, host_mips,
              host_ram_mb});

  t.add_link("san", "core1", san_core_bps);

  // Core pair p (1-based) serves aggregation switches whose index is
  // congruent to p modulo the pair count, by dual links. With 4 cores and
  // 8 aggregation switches: pair 1 (core1,core2) -> agg1,3,5,7 and pair 2
  // (core3,core4) -> agg2,4,6,8, two links per core<->agg pair.
  int pairs = std::max(1, cores / 2);
  for (int c = 1; c <= cores; ++c) {
    int pair = (c - 1) / 2 + 1;
    for (int a = 1; a <= aggs; ++a) {
      if (pairs == 1 || (a - 1) % pairs == (pair - 1)) {
        int dual = cores >= 2 ? 2 : 1;
        for (int k = 0; k < dual; ++k) {
          t.add_link(name("core", c), name("agg", a), core_agg_bps);
        }
      }
    }
  }
  // Aggregation<->edge: pods of two aggregation switches fully meshed with
  // the two edge switches below them (agg1,agg2 <-> edge1,edge2 and so on).
  // Degenerate counts fall back to even round-robin attachment.
  if (aggs == edges && edges % 2 == 0) {
    for (int a = 1; a <= aggs; ++a) {
      int pod = (a - 1) / 2 + 1;
      t.add_link(name("agg", a), name("edge", 2 * pod - 1), agg_edge_bps);
      t.add_link(name("agg", a), name("edge", 2 * pod), agg_edge_bps);
    }
  } else if (edges >= aggs) {
    int per = edges / aggs;
    for (int a = 1; a <= aggs; ++a) {
      for (int k = 0; k < per; ++k) {
        int e = (a - 1) * per + k + 1;
        t.add_link(name("agg", a), name("edge", e), agg_edge_bps);
      }
    }
  } else {
    for (int e = 1; e <= edges; ++e) {
      int a = (e - 1) % aggs + 1;
      t.add_link(name("agg", a), name("edge", e), agg_edge_bps);
    }
  }
  int hosts_per_edge = hosts / edges;
  for (int e = 1; e <= edges; ++e) {
    for (int k = 0; k < hosts_per_edge; ++k) {
      int h = (e - 1) * hosts_per_edge + k + 1;
      t.add_link(name("edge", e), name("host", h), edge_host_bps);
    }
  }
  t.build_adjacency();
  return t;
}

bool PhysicalTopology::operator==(const PhysicalTopology& o) const {
  if (nodes_.size() != o.nodes_.size() || links_.size() != o.links_.size()) {
    return false;
  }
  for (size_t i = 0; i < nodes_.size(); ++i) {
    const Node &a = nodes_[i], &b = o.nodes_[i];
    if (a.name != b.name || a.kind != b.kind || a.tier != b.tier ||
        a.pes != b.pes || a.mips_per_pe != b.mips_per_pe || a.ram_mb != b.ram_mb) {
      return false;
    }
  }
  for (size_t i = 0; i < links_.size(); ++i) {
    const LinkSpec &a = links_[i], &b = o.links_[i];
    if (a.a != b.a || a.b != b.b || a.bandwidth_bps != b.bandwidth_bps) {
      return false;
    }
  }
  return true;
}

}  // namespace bdsim
