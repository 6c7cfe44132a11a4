#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <filesystem>

#include <nlohmann/json.hpp>

#include "bdsim/bigdata.hpp"
#include "bdsim/network.hpp"
#include "bdsim/reports.hpp"
#include "bdsim/scenario.hpp"
#include "bdsim/topology.hpp"

namespace py = pybind11;
using namespace bdsim;

namespace {

py::dict report_to_dict(const RunReport& r) {
  py::dict d;
  d["mode"] = r.mode;
  d["seed"] = r.seed;
  d["run_end_s"] = r.run_end;
  d["total_energy_joules"] = r.total_energy_joules();
  py::list jobs;
  for (const auto& j : r.jobs) {
    py::dict row;
    row["job_id"] = j.job_id;
    row["job_type"] = j.job_type;
    row["submit_s"] = j.submit;
    row["queuing_delay_s"] = j.queuing_delay;
    row["start_s"] = j.start;
    row["j_tr_s"] = j.j_tr;
    row["j_mp_s"] = j.j_mp;
    row["j_rd_s"] = j.j_rd;
    row["j_ct_s"] = j.j_ct;
    jobs.append(row);
  }
  d["jobs"] = jobs;
  d["num_transmissions"] = r.transmissions.size();
  d["num_tasks"] = r.processing.size();
  return d;
}

}  // namespace

PYBIND11_MODULE(_bdsim, m) {
  m.doc() = "Flow-level simulator of MapReduce workloads in SDN-enabled "
            "cloud data centers";

  py::class_<PhysicalTopology>(m, "Topology")
      .def_static("parse", &PhysicalTopology::parse_text, py::arg("text"))
      .def_static("parse_file", &PhysicalTopology::parse_file, py::arg("path"))
      .def_static("three_tier", &PhysicalTopology::three_tier,
                  py::arg("cores"), py::arg("aggs"), py::arg("edges"),
                  py::arg("hosts"), py::arg("core_agg_bps"),
                  py::arg("agg_edge_bps"), py::arg("edge_host_bps"),
                  py::arg("san_core_bps"), py::arg("host_pes") = 8,
                  py::arg("host_mips") = 10000.0,
                  py::arg("host_ram_mb") = int64_t{30720})
      .def("node_count", &PhysicalTopology::node_count)
      .def("link_count",
           [](const PhysicalTopology& t) { return t.links().size(); })
      .def("validate", &PhysicalTopology::validate)
      .def("to_json",
           [](const PhysicalTopology& t) { return t.to_json().dump(2); });

  m.def("mapper_size", &mapper_size, py::arg("job_total"),
        py::arg("num_mappers"));
  m.def("reducer_size", &reducer_size, py::arg("mapper_block"),
        py::arg("factor"));

  m.def("generate_usecase_fixture", &generate_usecase_fixture,
        py::arg("out_dir"), py::arg("order_seed") = 42);

  m.def(
      "run_scenario",
      [](const std::string& scenario_path, const std::string& mode,
         uint64_t seed, const std::string& out_dir) {
        auto cfg = parse_scenario_file(scenario_path);
        if (!out_dir.empty()) cfg.out_dir = out_dir;
        auto rep = run_scenario(cfg, mode, seed);
        if (!out_dir.empty()) {
          emit(rep, (std::filesystem::path(out_dir) / mode).string());
        }
        return report_to_dict(rep);
      },
      py::arg("scenario_path"), py::arg("mode"), py::arg("seed"),
      py::arg("out_dir") = "");

  m.def(
      "compare_runs",
      [](const std::string& sdn_dir, const std::string& legacy_dir) {
        auto s = compare(load_report(sdn_dir), load_report(legacy_dir));
        py::dict d;
        d["mean_transmission_improvement_pct"] =
            s.mean_transmission_improvement_pct;
        d["mean_completion_improvement_pct"] = s.mean_completion_improvement_pct;
        d["energy_improvement_pct"] = s.energy_improvement_pct;
        return d;
      },
      py::arg("sdn_dir"), py::arg("legacy_dir"));
}
