#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "slip/coloring_worker.hpp"
#include "slip/modes.hpp"
#include "slip/socket.hpp"
#include "slip/workloads.hpp"

namespace slip {

enum class Workload { Coloring, Compute };
enum class Locus { Threads, Processes };

std::string to_string(Workload w);
std::string to_string(Locus l);

inline constexpr const char* kBasePortVariable = "SLIP_BASE_PORT";
inline constexpr std::uint64_t kDefaultComputeUnits = 16777216;

struct RunConfig {
  std::string run_id = "run";
  Workload workload = Workload::Coloring;
  ModeSettings mode;
  std::size_t workers = 1;
  Locus locus = Locus::Threads;

  // Process locus: this invocation's rank and every rank's address.
  std::size_t rank = 0;
  std::vector<Address> peers;

  std::size_t grid_width = 0;
  std::size_t grid_height = 0;
  std::size_t nodes_per_worker = 2048;

  std::size_t buffer_capacity = 2;
  ColoringParams coloring;
  std::uint64_t compute_work_units = 0;
  ReadMode read = ReadMode::Jump;
  bool pooled = true;

  double duration_seconds = 5.0;
  std::optional<std::uint64_t> max_updates;
  double jitter_ms = 0.0;
  std::vector<std::size_t> jitter_workers;

  double snapshot_interval_seconds = 0.0;  // 0 disables snapshots
  double snapshot_window_seconds = 1.0;

  std::size_t replicates = 1;
  std::uint64_t seed = 1;

  std::string summary_path = "summary.csv";
  std::string qos_path = "qos.csv";

  double fault_drop_probability = 0.0;

  bool snapshots_enabled() const noexcept { return snapshot_interval_seconds > 0.0; }
  std::size_t node_count() const noexcept { return grid_width * grid_height; }
  bool is_root() const noexcept { return locus == Locus::Threads || rank == 0; }
};

class HelpRequested : public std::runtime_error {
 public:
  explicit HelpRequested(const std::string& text) : std::runtime_error(text) {}
};

// Flags override values from an optional --config TOML/INI file. Grid
// dimensions not given are derived from workers * nodes_per_worker. Throws
// ConfigError naming the offending key, or HelpRequested for --help.
RunConfig parse_config(int argc, const char* const* argv);
RunConfig parse_config(const std::vector<std::string>& args);

// Checks cross-field consistency; throws ConfigError.
void validate(const RunConfig& config);

// Smallest divisor of n that is at least sqrt(n).
std::size_t grid_width_for(std::size_t n);

}  // namespace slip
