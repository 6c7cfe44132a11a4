#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json_fwd.hpp>

namespace bdsim {

enum class NodeKind { Host, Switch, Storage };
enum class SwitchTier { Core, Aggregation, Edge };

std::string to_string(NodeKind k);
std::string to_string(SwitchTier t);

struct TopologyError : std::runtime_error {
  enum class Code {
    SchemaError,
    DanglingLink,
    DisconnectedGraph,
    NonPositiveBandwidth,
    ShapeError,
    DuplicateName,
  };
  TopologyError(Code c, const std::string& what)
      : std::runtime_error(what), code(c) {}
  Code code;
};

struct Node {
  std::string name;
  NodeKind kind = NodeKind::Switch;
  SwitchTier tier = SwitchTier::Edge;  // switches only
  int pes = 0;                         // hosts and storage
  double mips_per_pe = 0;
  int64_t ram_mb = 0;
};

struct LinkSpec {
  std::string a;
  std::string b;
  double bandwidth_bps = 0;
};

/// Immutable physical graph of hosts, switches, storage, and links.
/// Parallel links between the same node pair are distinct link objects.
class PhysicalTopology {
 public:
  static PhysicalTopology parse(const nlohmann::json& doc);
  static PhysicalTopology parse_text(const std::string& text);
  static PhysicalTopology parse_file(const std::string& path);

  /// Generates the three-tier fabric: SAN attached to the first core switch,
  /// core pairs dual-linked to alternating aggregation switches, each
  /// aggregation switch single-linked to two edges, each edge to two hosts.
  static PhysicalTopology three_tier(int cores, int aggs, int edges, int hosts,
                                     double core_agg_bps, double agg_edge_bps,
                                     double edge_host_bps, double san_core_bps,
                                     int host_pes = 8,
                                     double host_mips = 10000,
                                     int64_t host_ram_mb = 30720);

  nlohmann::json to_json() const;

  /// Empty list iff all structural invariants hold. Violations are
  /// "Code: detail" strings.
  std::vector<std::string> validate() const;

  int node_index(const std::string& name) const;  // -1 if unknown
  const Node& node(int idx) const { return nodes_[idx]; }
  size_t node_count() const { return nodes_.size(); }
  const std::vector<Node>& nodes() const { return nodes_; }
  const std::vector<LinkSpec>& links() const { return links_; }
  /// Per-node list of (neighbor node index, link index).
  const std::vector<std::pair<int, int>>& adjacent(int node_idx) const {
    return adj_[node_idx];
  }
  int link_endpoint_a(int link_idx) const;
  int link_endpoint_b(int link_idx) const;

  bool operator==(const PhysicalTopology& o) const;

 private:
  void add_node(Node n);
  void add_link(const std::string& a, const std::string& b, double bps);
  void build_adjacency();

  std::vector<Node> nodes_;
  std::map<std::string, int> index_;
  std::vector<LinkSpec> links_;
  std::vector<std::pair<int, int>> link_ends_;
  std::vector<std::vector<std::pair<int, int>>> adj_;
};

}  // namespace bdsim
