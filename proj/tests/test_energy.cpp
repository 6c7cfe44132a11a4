#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "bdsim/energy.hpp"

using namespace bdsim;

TEST_CASE("host power is linear in utilization") {
  PowerModel m;
  m.host_idle_w = 100;
  m.host_max_w = 200;

  SUBCASE("idle mode sends an unused host to zero") {
    m.idle_mode = true;
    CHECK(host_power(0, m) == 0);
  }
  SUBCASE("without idle mode an unused host draws idle power") {
    m.idle_mode = false;
    CHECK(host_power(0, m) == 100);
  }
  CHECK(host_power(1, m) == 200);
  CHECK(host_power(0.5, m) == 150);
  CHECK_THROWS_AS(host_power(-0.1, m), UtilizationOutOfRange);
  CHECK_THROWS_AS(host_power(1.1, m), UtilizationOutOfRange);
}

TEST_CASE("switch power is static plus per-active-port") {
  PowerModel m;
  m.switch_static_w = 50;
  m.switch_per_port_w = 5;
  m.switch_idle_w = 50;

  SUBCASE("idle mode zeroes a quiet switch") {
    m.idle_mode = true;
    CHECK(switch_power(0, m) == 0);
  }
  SUBCASE("quiet switch draws idle power otherwise") {
    m.idle_mode = false;
    CHECK(switch_power(0, m) == 50);
  }
  CHECK(switch_power(4, m) == 70);
  CHECK(switch_power(1, m) == 55);
}

TEST_CASE("ledger integrates piecewise-constant power") {
  EnergyLedger ledger;
  ledger.set_power("h1", 100, 0);
  ledger.finalize(10);
  auto totals = ledger.totals();
  CHECK(totals.at("h1").joules == doctest::Approx(1000));
  CHECK(totals.at("h1").busy_seconds == doctest::Approx(10));
  CHECK(totals.at("h1").idle_seconds == doctest::Approx(0));
  CHECK(ledger.grand_total_joules() == doctest::Approx(1000));
}

TEST_CASE("ledger splits busy and idle stretches") {
  EnergyLedger ledger;
  ledger.set_power("h1", 100, 0);
  ledger.set_power("h1", 0, 5);
  ledger.finalize(10);
  auto totals = ledger.totals();
  CHECK(totals.at("h1").joules == doctest::Approx(500));
  CHECK(totals.at("h1").busy_seconds == doctest::Approx(5));
  CHECK(totals.at("h1").idle_seconds == doctest::Approx(5));
}

TEST_CASE("zero-length run yields zero joules") {
  EnergyLedger ledger;
  ledger.set_power("h1", 100, 0);
  ledger.finalize(0);
  CHECK(ledger.grand_total_joules() == 0);
}

TEST_CASE("repeated same-watt updates do not fragment or change totals") {
  EnergyLedger a, b;
  a.set_power("s", 70, 0);
  a.set_power("s", 70, 3);
  a.set_power("s", 20, 6);
  a.finalize(10);
  b.set_power("s", 70, 0);
  b.set_power("s", 20, 6);
  b.finalize(10);
  CHECK(a.grand_total_joules() == doctest::Approx(b.grand_total_joules()));
  CHECK(a.grand_total_joules() == doctest::Approx(70 * 6 + 20 * 4));
}

TEST_CASE("intervals tile the whole timeline per node") {
  EnergyLedger ledger;
  ledger.set_power("h1", 100, 2);  // first update after t=0: ledger backfills
  ledger.finalize(4);
  const auto& ivs = ledger.intervals().at("h1");
  REQUIRE(!ivs.empty());
  CHECK(ivs.front().start == 0);
  CHECK(ivs.back().end == 4);
  double prev = 0;
  for (const auto& iv : ivs) {
    CHECK(iv.start == prev);
    prev = iv.end;
  }
}

TEST_CASE("more busy time never costs less energy") {
  // same constants, one run strictly busier than the other
  EnergyLedger lean, busy;
  lean.set_power("h1", 0, 0);
  lean.set_power("h1", 150, 2);
  lean.set_power("h1", 0, 4);
  lean.finalize(10);
  busy.set_power("h1", 150, 0);
  busy.set_power("h1", 0, 6);
  busy.finalize(10);
  CHECK(busy.grand_total_joules() >= lean.grand_total_joules());
}
