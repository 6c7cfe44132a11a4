#include "bdsim/reports.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace bdsim {

namespace fs = std::filesystem;

double quantize_seconds(double s) {
  return std::round(s * 1e6) / 1e6;
}

std::string format_seconds(double s) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6f", s);
  return buf;
}

static std::string format_bits(double bits) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.0f", bits);
  return buf;
}

double RunReport::total_energy_joules() const {
  double sum = 0;
  for (const auto& e : energy) sum += e.joules;
  return sum;
}

static std::ofstream open_out(const fs::path& p) {
  std::ofstream out(p, std::ios::binary);
  if (!out) throw IoError("cannot write '" + p.string() + "'");
  return out;
}

void emit(const RunReport& r, const std::string& directory) {
  fs::path dir(directory);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create '" + directory + "': " + ec.message());

  {
    auto out = open_out(dir / "jobs.csv");
    out << "job_id,job_type,submit_s,queuing_delay_s,start_s,j_tr_s,j_mp_s,j_rd_s,j_ct_s\n";
    for (const auto& j : r.jobs) {
      out << j.job_id << ',' << j.job_type << ',' << format_seconds(j.submit)
          << ',' << format_seconds(j.queuing_delay) << ','
          << format_seconds(j.start) << ',' << format_seconds(j.j_tr) << ','
          << format_seconds(j.j_mp) << ',' << format_seconds(j.j_rd) << ','
          << format_seconds(j.j_ct) << '\n';
    }
  }
  {
    auto out = open_out(dir / "transmissions.csv");
    out << "packet_id,job_id,leg,src,dst,bits,start_s,finish_s,duration_s,"
           "src_task,dst_task\n";
    for (const auto& t : r.transmissions) {
      out << t.packet_id << ',' << t.job_id << ',' << t.leg << ',' << t.src
          << ',' << t.dst << ',' << format_bits(t.bits) << ','
          << format_seconds(t.start) << ',' << format_seconds(t.finish) << ','
          << format_seconds(t.duration) << ',' << t.src_task << ','
          << t.dst_task << '\n';
    }
  }
  {
    auto out = open_out(dir / "processing.csv");
    out << "task_id,job_id,kind,vm_id,start_s,duration_s\n";
    for (const auto& p : r.processing) {
      out << p.task_id << ',' << p.job_id << ',' << p.kind << ',' << p.vm_id
          << ',' << format_seconds(p.start) << ',' << format_seconds(p.duration)
          << '\n';
    }
  }
  {
    auto out = open_out(dir / "energy.csv");
    out << "node,kind,joules,busy_s,idle_s\n";
    for (const auto& e : r.energy) {
      char jbuf[64];
      std::snprintf(jbuf, sizeof(jbuf), "%.6f", e.joules);
      out << e.node << ',' << e.kind << ',' << jbuf << ','
          << format_seconds(e.busy_seconds) << ','
          << format_seconds(e.idle_seconds) << '\n';
    }
  }
  {
    auto out = open_out(dir / "forwarding.csv");
    out << "packet_id,path,intervals\n";
    for (const auto& f : r.forwarding) {
      out << f.packet_id << ',';
      for (size_t i = 0; i < f.path.size(); ++i) {
        if (i) out << '|';
        out << f.path[i];
      }
      out << ',';
      for (size_t i = 0; i < f.intervals.size(); ++i) {
        if (i) out << ';';
        out << format_seconds(f.intervals[i].start) << ':'
            << format_seconds(f.intervals[i].end) << ':'
            << format_bits(f.intervals[i].bps);
      }
      out << '\n';
    }
  }
  {
    auto out = open_out(dir / "run.meta");
    out << "mode=" << r.mode << '\n'
        << "seed=" << r.seed << '\n'
        << "config_hash=" << r.config_hash << '\n'
        << "run_end_s=" << format_seconds(r.run_end) << '\n';
  }
}

static std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(line);
  while (std::getline(in, cur, sep)) out.push_back(cur);
  if (!line.empty() && line.back() == sep) out.push_back("");
  return out;
}

static std::vector<std::vector<std::string>> read_csv(const fs::path& p) {
  std::ifstream in(p);
  if (!in) throw IoError("cannot read '" + p.string() + "'");
  std::vector<std::vector<std::string>> rows;
  std::string line;
  bool header = true;
  while (std::getline(in, line)) {
    if (header) {
      header = false;
      continue;
    }
    if (!line.empty()) rows.push_back(split(line, ','));
  }
  return rows;
}

RunReport load_report(const std::string& directory) {
  fs::path dir(directory);
  RunReport r;
  for (const auto& row : read_csv(dir / "jobs.csv")) {
    JobRow j;
    j.job_id = std::stoi(row[0]);
    j.job_type = row[1];
    j.submit = std::stod(row[2]);
    j.queuing_delay = std::stod(row[3]);
    j.start = std::stod(row[4]);
    j.j_tr = std::stod(row[5]);
    j.j_mp = std::stod(row[6]);
    j.j_rd = std::stod(row[7]);
    j.j_ct = std::stod(row[8]);
    r.jobs.push_back(j);
  }
  for (const auto& row : read_csv(dir / "transmissions.csv")) {
    TransmissionRow t;
    t.packet_id = std::stoi(row[0]);
    t.job_id = std::stoi(row[1]);
    t.leg = row[2];
    t.src = row[3];
    t.dst = row[4];
    t.bits = std::stod(row[5]);
    t.start = std::stod(row[6]);
    t.finish = std::stod(row[7]);
    t.duration = std::stod(row[8]);
    t.src_task = std::stoi(row[9]);
    t.dst_task = std::stoi(row[10]);
    r.transmissions.push_back(t);
  }
  for (const auto& row : read_csv(dir / "processing.csv")) {
    ProcessingRow p;
    p.task_id = std::stoi(row[0]);
    p.job_id = std::stoi(row[1]);
    p.kind = row[2];
    p.vm_id = std::stoi(row[3]);
    p.start = std::stod(row[4]);
    p.duration = std::stod(row[5]);
    r.processing.push_back(p);
  }
  for (const auto& row : read_csv(dir / "energy.csv")) {
    EnergyRow e;
    e.node = row[0];
    e.kind = row[1];
    e.joules = std::stod(row[2]);
    e.busy_seconds = std::stod(row[3]);
    e.idle_seconds = std::stod(row[4]);
    r.energy.push_back(e);
  }
  for (const auto& row : read_csv(dir / "forwarding.csv")) {
    ForwardingRow f;
    f.packet_id = std::stoi(row[0]);
    f.path = split(row[1], '|');
    if (!row[2].empty()) {
      for (const auto& iv : split(row[2], ';')) {
        auto parts = split(iv, ':');
        f.intervals.push_back(
            {std::stod(parts[0]), std::stod(parts[1]), std::stod(parts[2])});
      }
    }
    r.forwarding.push_back(f);
  }
  std::ifstream meta(dir / "run.meta");
  std::string line;
  while (std::getline(meta, line)) {
    auto eq = line.find('=');
    if (eq == std::string::npos) continue;
    std::string key = line.substr(0, eq), val = line.substr(eq + 1);
    if (key == "mode") r.mode = val;
    if (key == "seed") r.seed = std::stoull(val);
    if (key == "config_hash") r.config_hash = val;
    if (key == "run_end_s") r.run_end = std::stod(val);
  }
  return r;
}

ComparisonSummary compare(const RunReport& sdn, const RunReport& legacy) {
  auto by_id = [](const RunReport& r) {
    std::vector<const JobRow*> v;
    for (const auto& j : r.jobs) v.push_back(&j);
    std::sort(v.begin(), v.end(),
              [](auto* a, auto* b) { return a->job_id < b->job_id; });
    return v;
  };
  auto a = by_id(sdn), b = by_id(legacy);
  if (a.size() != b.size()) throw JobSetMismatch("different job counts");
  ComparisonSummary s;
  double sum_tr = 0, sum_ct = 0;
  for (size_t i = 0; i < a.size(); ++i) {
    if (a[i]->job_id != b[i]->job_id) {
      throw JobSetMismatch("job id mismatch at position " + std::to_string(i));
    }
    JobComparison c;
    c.job_id = a[i]->job_id;
    c.transmission_improvement_pct =
        b[i]->j_tr > 0 ? (b[i]->j_tr - a[i]->j_tr) / b[i]->j_tr * 100 : 0;
    c.completion_improvement_pct =
        b[i]->j_ct > 0 ? (b[i]->j_ct - a[i]->j_ct) / b[i]->j_ct * 100 : 0;
    sum_tr += c.transmission_improvement_pct;
    sum_ct += c.completion_improvement_pct;
    s.jobs.push_back(c);
  }
  if (!s.jobs.empty()) {
    s.mean_transmission_improvement_pct = sum_tr / s.jobs.size();
    s.mean_completion_improvement_pct = sum_ct / s.jobs.size();
  }
  double el = legacy.total_energy_joules(), es = sdn.total_energy_joules();
  s.energy_improvement_pct = el > 0 ? (el - es) / el * 100 : 0;
  return s;
}

void emit_comparison(const ComparisonSummary& s, const std::string& path) {
  auto out = open_out(path);
  out << "# improvement convention: (legacy - sdn) / legacy * 100\n";
  out << "job_id,transmission_improvement_pct,completion_improvement_pct\n";
  char buf[64];
  for (const auto& j : s.jobs) {
    std::snprintf(buf, sizeof(buf), "%d,%.4f,%.4f", j.job_id,
                  j.transmission_improvement_pct, j.completion_improvement_pct);
    out << buf << '\n';
  }
  std::snprintf(buf, sizeof(buf), "%.4f", s.mean_transmission_improvement_pct);
  out << "mean_transmission_improvement_pct," << buf << "\n";
  std::snprintf(buf, sizeof(buf), "%.4f", s.mean_completion_improvement_pct);
  out << "mean_completion_improvement_pct," << buf << "\n";
  std::snprintf(buf, sizeof(buf), "%.4f", s.energy_improvement_pct);
  out << "energy_improvement_pct," << buf << "\n";
}

}  // namespace bdsim
