#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <nlohmann/json.hpp>

#include "bdsim/topology.hpp"

using namespace bdsim;
using json = nlohmann::json;
using Code = TopologyError::Code;

static const char* kTinyDoc = R"({
  "hosts": [{"name": "h1", "pes": 8, "mips_per_pe": 10000, "ram_mb": 30720}],
  "switches": [{"name": "e1", "tier": "edge"}],
  "storage": [],
  "links": [{"a": "h1", "b": "e1", "bandwidth_bps": 1e9}]
})";

TEST_CASE("parse minimal host-switch pair") {
  auto t = PhysicalTopology::parse_text(kTinyDoc);
  CHECK(t.node_count() == 2);
  CHECK(t.links().size() == 1);
  CHECK(t.node(t.node_index("h1")).kind == NodeKind::Host);
  CHECK(t.validate().empty());
}

TEST_CASE("dangling link endpoint is rejected") {
  json doc = json::parse(kTinyDoc);
  doc["links"].push_back({{"a", "h1"}, {"b", "ghost"}, {"bandwidth_bps", 1e9}});
  try {
    PhysicalTopology::parse(doc);
    FAIL("expected DanglingLink");
  } catch (const TopologyError& e) {
    CHECK(e.code == Code::DanglingLink);
  }
}

TEST_CASE("unknown fields are schema errors in strict mode") {
  json doc = json::parse(kTinyDoc);
  doc["hosts"][0]["color"] = "blue";
  CHECK_THROWS_AS(PhysicalTopology::parse(doc), TopologyError);
}

TEST_CASE("missing field is a schema error") {
  json doc = json::parse(kTinyDoc);
  doc["hosts"][0].erase("ram_mb");
  CHECK_THROWS_AS(PhysicalTopology::parse(doc), TopologyError);
}

TEST_CASE("non-positive bandwidth is rejected") {
  json doc = json::parse(kTinyDoc);
  doc["links"][0]["bandwidth_bps"] = 0;
  try {
    PhysicalTopology::parse(doc);
    FAIL("expected NonPositiveBandwidth");
  } catch (const TopologyError& e) {
    CHECK(e.code == Code::NonPositiveBandwidth);
  }
}

TEST_CASE("disconnected graph is rejected at parse and flagged by validate") {
  json doc = json::parse(kTinyDoc);
  doc["switches"].push_back({{"name", "island"}, {"tier", "core"}});
  try {
    PhysicalTopology::parse(doc);
    FAIL("expected DisconnectedGraph");
  } catch (const TopologyError& e) {
    CHECK(e.code == Code::DisconnectedGraph);
  }
}

TEST_CASE("three-tier use-case fabric has the frozen shape") {
  auto t = PhysicalTopology::three_tier(4, 8, 8, 16, 1e9, 1e9, 1e9, 4e9);
  // 1 SAN + 4 core + 8 aggregation + 8 edge + 16 hosts
  CHECK(t.node_count() == 37);
  // 1 SAN-core + 32 dual core-agg + 16 agg-edge + 16 edge-host
  CHECK(t.links().size() == 65);
  CHECK(t.validate().empty());

  // SAN hangs off core1 at 4 Gbps
  int san = t.node_index("san");
  REQUIRE(san >= 0);
  REQUIRE(t.adjacent(san).size() == 1);
  auto [peer, link] = t.adjacent(san)[0];
  CHECK(t.node(peer).name == "core1");
  CHECK(t.links()[link].bandwidth_bps == 4e9);

  // core pair 1 serves the odd aggregation switches with dual links
  int core1 = t.node_index("core1");
  int dual = 0;
  for (auto [w, l] : t.adjacent(core1)) {
    (void)l;
    if (t.node(w).name == "agg3") dual++;
    CHECK(t.node(w).name != "agg2");  // even aggs belong to pair 2
  }
  CHECK(dual == 2);

  // every edge switch reaches exactly two hosts
  for (size_t i = 0; i < t.node_count(); ++i) {
    if (t.node(i).kind == NodeKind::Switch && t.node(i).tier == SwitchTier::Edge) {
      int hosts = 0;
      for (auto [w, l] : t.adjacent((int)i)) {
        (void)l;
        if (t.node(w).kind == NodeKind::Host) hosts++;
      }
      CHECK(hosts == 2);
    }
  }
}

TEST_CASE("three-tier minimal tree") {
  auto t = PhysicalTopology::three_tier(1, 1, 1, 2, 1e9, 1e9, 1e9, 4e9);
  CHECK(t.node_count() == 6);
  CHECK(t.validate().empty());
}

TEST_CASE("indivisible host count is a shape error") {
  try {
    PhysicalTopology::three_tier(4, 8, 8, 15, 1e9, 1e9, 1e9, 4e9);
    FAIL("expected ShapeError");
  } catch (const TopologyError& e) {
    CHECK(e.code == Code::ShapeError);
  }
}

TEST_CASE("round trip: parse(serialize(t)) == t") {
  auto variants = {
      PhysicalTopology::three_tier(4, 8, 8, 16, 1e9, 1e9, 1e9, 4e9),
      PhysicalTopology::three_tier(1, 1, 1, 2, 5e8, 2e9, 1e9, 4e9),
      PhysicalTopology::three_tier(2, 4, 4, 8, 1e9, 1e9, 1e9, 4e9),
      PhysicalTopology::parse_text(kTinyDoc),
  };
  for (const auto& t : variants) {
    auto back = PhysicalTopology::parse(t.to_json());
    CHECK(back == t);
  }
}

TEST_CASE("node count identity for generated fabrics") {
  struct Shape { int c, a, e, h; };
  for (auto [c, a, e, h] : {Shape{4, 8, 8, 16}, Shape{1, 1, 1, 2},
                            Shape{2, 4, 4, 8}, Shape{2, 2, 2, 4}}) {
    auto t = PhysicalTopology::three_tier(c, a, e, h, 1e9, 1e9, 1e9, 4e9);
    CHECK(t.node_count() == size_t(1 + c + a + e + h));
    CHECK(t.validate().empty());
  }
}

TEST_CASE("validate reports zero-bandwidth links as data") {
  // bypass parse-time rejection by constructing via json round trip hack:
  // validate() itself must flag the bad value
  auto t = PhysicalTopology::three_tier(1, 1, 1, 2, 1e9, 1e9, 1e9, 4e9);
  auto doc = t.to_json();
  doc["links"][0]["bandwidth_bps"] = -1;
  CHECK_THROWS(PhysicalTopology::parse(doc));
}

TEST_CASE("parallel links are distinct objects") {
  auto t = PhysicalTopology::three_tier(4, 8, 8, 16, 1e9, 1e9, 1e9, 4e9);
  int core1 = t.node_index("core1");
  int agg1 = t.node_index("agg1");
  int count = 0;
  std::vector<int> link_ids;
  for (auto [w, l] : t.adjacent(core1)) {
    if (w == agg1) {
      count++;
      link_ids.push_back(l);
    }
  }
  REQUIRE(count == 2);
  CHECK(link_ids[0] != link_ids[1]);
}
