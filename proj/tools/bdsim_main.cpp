#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "bdsim/reports.hpp"
#include "bdsim/scenario.hpp"

namespace fs = std::filesystem;

int main(int argc, char** argv) {
  CLI::App app{"MapReduce-over-SDN data center simulator"};

  std::string scenario_path;
  std::string mode_flag;
  std::optional<uint64_t> seed_flag;
  std::string out_flag;
  std::string fixture_dir;

  app.add_option("--scenario", scenario_path, "Scenario config JSON");
  app.add_option("--mode", mode_flag, "sdn | legacy | both (overrides config)");
  app.add_option("--seed", seed_flag, "Run seed (overrides config)");
  app.add_option("--out", out_flag, "Output directory (overrides config)");
  app.add_option("--emit-fixture", fixture_dir,
                 "Write the bundled use-case fixture to DIR and exit");

  CLI11_PARSE(app, argc, argv);

  try {
    if (!fixture_dir.empty()) {
      bdsim::generate_usecase_fixture(fixture_dir);
      std::cout << "fixture written to " << fixture_dir << "\n";
      return 0;
    }
    if (scenario_path.empty()) {
      std::cerr << "error: --scenario or --emit-fixture required\n";
      return 1;
    }
    bdsim::ScenarioConfig cfg;
    try {
      cfg = bdsim::parse_scenario_file(scenario_path);
    } catch (const std::exception& e) {
      std::cerr << "config error: " << e.what() << "\n";
      return 1;
    }
    if (!mode_flag.empty()) cfg.mode = mode_flag;
    if (seed_flag) cfg.seed = *seed_flag;
    if (!out_flag.empty()) cfg.out_dir = out_flag;
    if (cfg.mode != "sdn" && cfg.mode != "legacy" && cfg.mode != "both") {
      std::cerr << "config error: mode must be sdn, legacy, or both\n";
      return 1;
    }
    if (!fs::exists(cfg.topology_path)) {
      std::cerr << "config error: topology file '" << cfg.topology_path
                << "' not found\n";
      return 1;
    }
    if (!fs::exists(cfg.workload_path)) {
      std::cerr << "config error: workload file '" << cfg.workload_path
                << "' not found\n";
      return 1;
    }

    std::vector<std::string> modes =
        cfg.mode == "both" ? std::vector<std::string>{"sdn", "legacy"}
                           : std::vector<std::string>{cfg.mode};
    std::optional<bdsim::RunReport> sdn_report, legacy_report;
    for (const auto& m : modes) {
      auto rep = bdsim::run_scenario(cfg, m, cfg.seed);
      fs::path dir = fs::path(cfg.out_dir) / m;
      bdsim::emit(rep, dir.string());
      std::cout << m << ": " << rep.jobs.size() << " jobs, run end "
                << bdsim::format_seconds(rep.run_end) << " s, reports in "
                << dir.string() << "\n";
      if (m == "sdn") sdn_report = rep;
      else legacy_report = rep;
    }
    if (sdn_report && legacy_report) {
      auto cmp = bdsim::compare(*sdn_report, *legacy_report);
      fs::path cmp_path = fs::path(cfg.out_dir) / "comparison.csv";
      bdsim::emit_comparison(cmp, cmp_path.string());
      std::cout << "comparison: transmission " << cmp.mean_transmission_improvement_pct
                << "%, completion " << cmp.mean_completion_improvement_pct
                << "%, energy " << cmp.energy_improvement_pct << "% ("
                << cmp_path.string() << ")\n";
    }
    return 0;
  } catch (const bdsim::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "simulation error: " << e.what() << "\n";
    return 2;
  }
}
