#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "bdsim/reports.hpp"

using namespace bdsim;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

RunReport sample_report() {
  RunReport r;
  r.mode = "sdn";
  r.seed = 42;
  r.config_hash = "deadbeef";
  r.run_end = 34.5;
  r.jobs.push_back({1, "small", 0, 0, 0, 21, 6, 7, 34});
  r.jobs.push_back({2, "big", 1, 0.25, 1.25, 10, 2, 3, 15});
  r.transmissions.push_back(
      {0, 1, "storage_to_map", "san", "host1", 1e9, 0, 1, 1});
  r.processing.push_back({0, 1, "map", 3, 1.0, 6.0});
  r.energy.push_back({"host1", "host", 1234.5, 10, 24.5});
  ForwardingRow fw;
  fw.packet_id = 0;
  fw.path = {"san", "core1", "host1"};
  fw.intervals = {{0, 0.5, 1e9}, {0.5, 1.0, 0.5e9}};
  r.forwarding.push_back(fw);
  return r;
}

}  // namespace

TEST_CASE("quantize and format use six decimals") {
  CHECK(format_seconds(1.0) == "1.000000");
  CHECK(format_seconds(0.1234564) == "0.123456");
  CHECK(quantize_seconds(0.1234564) == doctest::Approx(0.123456).epsilon(1e-12));
  CHECK(quantize_seconds(quantize_seconds(7.654321)) ==
        quantize_seconds(7.654321));
}

TEST_CASE("emit then load round trips the report") {
  auto dir = fs::temp_directory_path() / "bdsim_reports_rt";
  fs::remove_all(dir);
  auto r = sample_report();
  emit(r, dir.string());
  for (const char* f : {"jobs.csv", "transmissions.csv", "processing.csv",
                        "energy.csv", "forwarding.csv", "run.meta"}) {
    CHECK(fs::exists(dir / f));
  }
  auto back = load_report(dir.string());
  CHECK(back.mode == r.mode);
  CHECK(back.seed == r.seed);
  CHECK(back.config_hash == r.config_hash);
  REQUIRE(back.jobs.size() == 2);
  CHECK(back.jobs[0].j_ct == doctest::Approx(34));
  CHECK(back.jobs[1].queuing_delay == doctest::Approx(0.25));
  REQUIRE(back.transmissions.size() == 1);
  CHECK(back.transmissions[0].src == "san");
  REQUIRE(back.forwarding.size() == 1);
  CHECK(back.forwarding[0].path == r.forwarding[0].path);
  CHECK(back.forwarding[0].intervals.size() == 2);
  fs::remove_all(dir);
}

TEST_CASE("emit is byte stable") {
  auto d1 = fs::temp_directory_path() / "bdsim_reports_a";
  auto d2 = fs::temp_directory_path() / "bdsim_reports_b";
  fs::remove_all(d1);
  fs::remove_all(d2);
  auto r = sample_report();
  emit(r, d1.string());
  emit(r, d2.string());
  for (const char* f : {"jobs.csv", "transmissions.csv", "processing.csv",
                        "energy.csv", "forwarding.csv", "run.meta"}) {
    CHECK(slurp(d1 / f) == slurp(d2 / f));
  }
  fs::remove_all(d1);
  fs::remove_all(d2);
}

TEST_CASE("empty run emits headers only") {
  auto dir = fs::temp_directory_path() / "bdsim_reports_empty";
  fs::remove_all(dir);
  RunReport r;
  r.mode = "legacy";
  emit(r, dir.string());
  auto jobs = slurp(dir / "jobs.csv");
  CHECK(jobs.find('\n') == jobs.size() - 1);  // a single header line
  auto back = load_report(dir.string());
  CHECK(back.jobs.empty());
  CHECK(back.transmissions.empty());
  fs::remove_all(dir);
}

TEST_CASE("identical reports compare to zero improvement") {
  auto r = sample_report();
  auto s = compare(r, r);
  CHECK(s.mean_transmission_improvement_pct == doctest::Approx(0));
  CHECK(s.mean_completion_improvement_pct == doctest::Approx(0));
  CHECK(s.energy_improvement_pct == doctest::Approx(0));
}

TEST_CASE("improvement follows the legacy-baseline convention") {
  RunReport legacy, sdn;
  legacy.jobs.push_back({1, "small", 0, 0, 0, 100, 10, 10, 120});
  sdn.jobs.push_back({1, "small", 0, 0, 0, 59, 10, 10, 79});
  legacy.energy.push_back({"h", "host", 1000, 1, 1});
  sdn.energy.push_back({"h", "host", 780, 1, 1});
  auto s = compare(sdn, legacy);
  REQUIRE(s.jobs.size() == 1);
  CHECK(s.jobs[0].transmission_improvement_pct == doctest::Approx(41.0));
  CHECK(s.mean_completion_improvement_pct ==
        doctest::Approx((120.0 - 79.0) / 120.0 * 100));
  CHECK(s.energy_improvement_pct == doctest::Approx(22.0));
}

TEST_CASE("swapping arguments negates percentages on the swapped baseline") {
  RunReport a, b;
  a.jobs.push_back({1, "small", 0, 0, 0, 50, 5, 5, 60});
  b.jobs.push_back({1, "small", 0, 0, 0, 100, 5, 5, 110});
  a.energy.push_back({"h", "host", 500, 1, 1});
  b.energy.push_back({"h", "host", 1000, 1, 1});
  auto fwd = compare(a, b);   // baseline b
  auto rev = compare(b, a);   // baseline a
  // (b-a)/b and (a-b)/a relate by p_rev = -p_fwd / (1 - p_fwd/100)
  double p = fwd.jobs[0].transmission_improvement_pct;
  CHECK(rev.jobs[0].transmission_improvement_pct ==
        doctest::Approx(-p / (1 - p / 100)));
  CHECK(fwd.energy_improvement_pct == doctest::Approx(50));
  CHECK(rev.energy_improvement_pct == doctest::Approx(-100));
}

TEST_CASE("disjoint job sets are a mismatch") {
  RunReport a, b;
  a.jobs.push_back({1, "small", 0, 0, 0, 1, 1, 1, 3});
  b.jobs.push_back({2, "small", 0, 0, 0, 1, 1, 1, 3});
  CHECK_THROWS_AS(compare(a, b), JobSetMismatch);
}

TEST_CASE("every stored job row satisfies the additive identity") {
  auto r = sample_report();
  for (const auto& j : r.jobs) {
    CHECK(j.j_ct == j.j_tr + j.j_mp + j.j_rd);
  }
}

TEST_CASE("comparison summary file is written") {
  auto path = fs::temp_directory_path() / "bdsim_cmp.csv";
  fs::remove(path);
  auto r = sample_report();
  emit_comparison(compare(r, r), path.string());
  CHECK(fs::exists(path));
  auto text = slurp(path);
  CHECK(text.find("legacy") != std::string::npos);
  fs::remove(path);
}

TEST_CASE("load of a missing directory raises") {
  CHECK_THROWS_AS(load_report("/nonexistent/bdsim_nowhere"), IoError);
}
