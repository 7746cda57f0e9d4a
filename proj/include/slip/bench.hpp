#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "slip/bench_config.hpp"
#include "slip/modes.hpp"
#include "slip/qos.hpp"

namespace slip {

struct WorkerRow {
  std::size_t replicate = 0;
  std::uint64_t seed = 0;
  std::size_t worker_id = 0;
  std::size_t node_count = 0;
  WorkerRecord record;
  std::uint64_t wire_transfers = 0;  // data datagrams sent during the timed loop
  std::uint64_t initial_conflicts = 0;
  std::uint64_t final_conflicts = 0;
  std::size_t qos_windows = 0;

  double update_rate() const {
    return record.wall_seconds > 0.0 ? static_cast<double>(record.updates) / record.wall_seconds : 0.0;
  }
};

struct QosRow {
  std::size_t replicate = 0;
  std::size_t window_index = 0;
  std::uint64_t source_node = 0;
  int direction = 0;
  std::size_t source_worker = 0;
  std::size_t target_worker = 0;
  std::optional<QosReport> inlet;
  std::optional<QosReport> outlet;

  QosReport mean() const;
};

struct RunRecord {
  RunConfig config;
  bool root = true;  // only the root holds the gathered rows
  std::vector<WorkerRow> workers;
  std::vector<QosRow> qos;
};

// Seed of replicate r; replicates never share a seed.
std::uint64_t replicate_seed(std::uint64_t master, std::size_t replicate);

// Runs every replicate. In process locus this is one rank of a group of
// invocations that must all be started with matching configs. Throws
// LaunchError on setup failures and propagates transport errors.
RunRecord run_benchmark(const RunConfig& config);

// Column names, in file order.
const std::vector<std::string>& summary_columns();
const std::vector<std::string>& qos_columns();

std::vector<std::vector<std::string>> summary_rows(const RunRecord& record);
std::vector<std::vector<std::string>> qos_rows(const RunRecord& record);

// Appends to the summary CSV and, when snapshots were configured, the QoS CSV
// plus a JSON sidecar describing the metric conventions. Headers are written
// only to new or empty files; each row goes out in a single append write.
// Non-root ranks write nothing. Throws std::runtime_error on I/O failure.
void emit_results(const RunRecord& record);

// Low-level helper used by emit_results.
void append_csv(const std::string& path, const std::vector<std::string>& header,
                const std::vector<std::vector<std::string>>& rows);

}  // namespace slip
