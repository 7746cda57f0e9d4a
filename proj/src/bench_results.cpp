#include <fcntl.h>
#include <sys/stat.h>
#include <unistd.h>

#include <json.hpp>

#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <stdexcept>

#include "slip/bench.hpp"

namespace slip {

namespace {

std::string fmt(double v) {
  if (std::isnan(v)) return "nan";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + "\"";
}

std::string csv_line(const std::vector<std::string>& fields) {
  std::string line;
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i > 0) line += ',';
    line += csv_field(fields[i]);
  }
  return line + '\n';
}

void write_all(int fd, const std::string& text, const std::string& path) {
  std::size_t off = 0;
  while (off < text.size()) {
    const ssize_t n = ::write(fd, text.data() + off, text.size() - off);
    if (n < 0) {
      if (errno == EINTR) continue;
      throw std::runtime_error("write failed for " + path + ": " + std::strerror(errno));
    }
    off += static_cast<std::size_t>(n);
  }
}

const char* kDirectionNames[] = {"left", "right", "up", "down"};

}  // namespace

const std::vector<std::string>& summary_columns() {
  static const std::vector<std::string> cols{
      "run_id",        "replicate",       "seed",          "workload",
      "mode",          "locus",           "workers",       "worker_id",
      "nodes",         "grid_width",      "grid_height",   "buffer_capacity",
      "num_colors",    "b",               "compute_units", "duration_s",
      "max_updates",   "updates",         "wall_seconds",  "update_rate",
      "barriers",      "wire_transfers",  "initial_conflicts", "final_conflicts",
      "qos_windows",   "qos_output",      "software_version"};
  return cols;
}

const std::vector<std::string>& qos_columns() {
  static const std::vector<std::string> cols = [] {
    std::vector<std::string> c{"run_id",      "replicate",   "mode",          "worker_id",
                               "target_worker", "source_node", "direction",   "window_index"};
    for (const char* side : {"inlet", "outlet", "mean"}) {
      for (auto name : kMetricNames) c.push_back(std::string(name) + "_" + side);
    }
    return c;
  }();
  return cols;
}

std::vector<std::vector<std::string>> summary_rows(const RunRecord& record) {
  const RunConfig& c = record.config;
  const std::string qos_output = c.snapshots_enabled() ? c.qos_path : "none";
  std::vector<std::vector<std::string>> rows;
  for (const auto& w : record.workers) {
    rows.push_back({c.run_id,
                    std::to_string(w.replicate),
                    std::to_string(w.seed),
                    to_string(c.workload),
                    std::to_string(to_int(c.mode.mode)),
                    to_string(c.locus),
                    std::to_string(c.workers),
                    std::to_string(w.worker_id),
                    std::to_string(w.node_count),
                    std::to_string(c.grid_width),
                    std::to_string(c.grid_height),
                    std::to_string(c.buffer_capacity),
                    std::to_string(c.coloring.num_colors),
                    fmt(c.coloring.b),
                    std::to_string(c.compute_work_units),
                    fmt(c.duration_seconds),
                    c.max_updates ? std::to_string(*c.max_updates) : "",
                    std::to_string(w.record.updates),
                    fmt(w.record.wall_seconds),
                    fmt(w.update_rate()),
                    std::to_string(w.record.barriers),
                    std::to_string(w.wire_transfers),
                    std::to_string(w.initial_conflicts),
                    std::to_string(w.final_conflicts),
                    std::to_string(w.qos_windows),
                    qos_output,
                    SLIP_VERSION});
  }
  return rows;
}

std::vector<std::vector<std::string>> qos_rows(const RunRecord& record) {
  const RunConfig& c = record.config;
  std::vector<std::vector<std::string>> rows;
  for (const auto& q : record.qos) {
    std::vector<std::string> row{c.run_id,
                                 std::to_string(q.replicate),
                                 std::to_string(to_int(c.mode.mode)),
                                 std::to_string(q.source_worker),
                                 std::to_string(q.target_worker),
                                 std::to_string(q.source_node),
                                 kDirectionNames[q.direction & 3],
                                 std::to_string(q.window_index)};
    const double nan = std::nan("");
    for (const auto& side : {q.inlet, q.outlet, std::optional<QosReport>(q.mean())}) {
      for (std::size_t m = 0; m < kMetricCount; ++m) row.push_back(fmt(side ? side->values[m] : nan));
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

void append_csv(const std::string& path, const std::vector<std::string>& header,
                const std::vector<std::vector<std::string>>& rows) {
  const int fd = ::open(path.c_str(), O_WRONLY | O_CREAT | O_APPEND | O_CLOEXEC, 0644);
  if (fd < 0) throw std::runtime_error("cannot open " + path + ": " + std::strerror(errno));
  try {
    struct stat st {};
    if (::fstat(fd, &st) == 0 && st.st_size == 0) write_all(fd, csv_line(header), path);
    for (const auto& row : rows) write_all(fd, csv_line(row), path);
  } catch (...) {
    ::close(fd);
    throw;
  }
  ::close(fd);
}

void emit_results(const RunRecord& record) {
  if (!record.root) return;
  const RunConfig& c = record.config;
  append_csv(c.summary_path, summary_columns(), summary_rows(record));
  if (!c.snapshots_enabled()) return;
  append_csv(c.qos_path, qos_columns(), qos_rows(record));

  nlohmann::json meta;
  meta["software_version"] = SLIP_VERSION;
  meta["simstep_period"] = "wall seconds elapsed per update over the window";
  meta["simstep_latency"] = "updates / max(touch diff, 1); bounded by the window's updates";
  meta["walltime_latency"] = "simstep_latency * simstep_period";
  meta["delivery_failure_rate"] = "1 - successful sends / attempted sends (inlet side only)";
  meta["delivery_clumpiness"] =
      "1 - laden pulls / min(messages, pull attempts); 0 when that minimum is 0 (outlet side only)";
  meta["mean"] = "per metric mean of the inlet and outlet values that are defined";
  meta["median"] = "lower of the two middle values for even counts";
  meta["nan"] = "metric undefined for that window or side";
  meta["snapshot_interval_s"] = c.snapshot_interval_seconds;
  meta["snapshot_window_s"] = c.snapshot_window_seconds;
  std::ofstream out(c.qos_path + ".meta.json");
  out << meta.dump(2) << '\n';
  if (!out) throw std::runtime_error("cannot write " + c.qos_path + ".meta.json");
}

}  // namespace slip
