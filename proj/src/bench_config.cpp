#include "slip/bench_config.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <cstdlib>
#include <regex>
#include <sstream>

#include "slip/errors.hpp"

namespace slip {

std::string to_string(Workload w) { return w == Workload::Coloring ? "coloring" : "compute"; }
std::string to_string(Locus l) { return l == Locus::Threads ? "threads" : "processes"; }

std::size_t grid_width_for(std::size_t n) {
  for (std::size_t w = static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(n))));
       w <= n; ++w) {
    if (w > 0 && n % w == 0) return w;
  }
  return n;
}

namespace {

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream in(s);
  std::string item;
  while (std::getline(in, item, sep)) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::string offending_key(const std::string& message) {
  static const std::regex option(R"(--([A-Za-z0-9][A-Za-z0-9_-]*))");
  std::smatch m;
  if (std::regex_search(message, m, option)) return m[1];
  return {};
}

}  // namespace

RunConfig parse_config(const std::vector<std::string>& args) {
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  return parse_config(static_cast<int>(argv.size()), argv.data());
}

RunConfig parse_config(int argc, const char* const* argv) {
  RunConfig c;
  CLI::App app{"Best-effort communication benchmark"};
  app.set_config("--config", "", "TOML/INI file with option defaults; flags win");

  std::string workload = "coloring";
  int mode = 3;
  std::string locus = "threads";
  std::string peers;
  std::string read = "jump";
  std::string jitter_workers;
  double chunk_ms = 0.0;
  double tick_seconds = 1.0;
  std::uint64_t max_updates = 0;
  std::uint64_t compute_units = 0;
  bool no_pool = false;

  app.add_option("--run-id", c.run_id, "Label written to every result row");
  app.add_option("--workload", workload, "coloring | compute");
  app.add_option("--mode", mode, "Asynchronicity mode 0..4");
  app.add_option("--workers", c.workers, "Worker count");
  app.add_option("--locus", locus, "threads | processes");
  app.add_option("--rank", c.rank, "This process's rank (process locus)");
  app.add_option("--peers", peers, "Comma-separated host:port per rank (process locus)");
  app.add_option("--grid-width", c.grid_width, "Torus width");
  app.add_option("--grid-height", c.grid_height, "Torus height");
  auto* npw = app.add_option("--nodes-per-worker", c.nodes_per_worker, "Graph nodes per worker");
  auto* buffer = app.add_option("--buffer", c.buffer_capacity, "Send buffer capacity");
  app.add_option("--colors", c.coloring.num_colors, "Number of colors");
  app.add_option("--b", c.coloring.b, "Learning factor in (0,1)");
  app.add_flag("--success-reset", c.coloring.success_reset,
               "Collapse probabilities onto the current color after a clean update");
  auto* units = app.add_option("--compute-units", compute_units, "Compute work units per update");
  app.add_option("--read", read, "jump | try-step");
  app.add_flag("--no-pool", no_pool, "Send one datagram per message between processes");
  app.add_option("--duration", c.duration_seconds, "Timed run length in seconds");
  app.add_option("--max-updates", max_updates, "Stop after this many updates (0: time only)");
  auto* chunk = app.add_option("--chunk-ms", chunk_ms, "Mode 1 chunk length");
  app.add_option("--tick", tick_seconds, "Mode 2 barrier interval in seconds");
  app.add_option("--jitter-ms", c.jitter_ms, "Max uniform sleep per update on jittered workers");
  app.add_option("--jitter-workers", jitter_workers, "Comma-separated jittered worker ids");
  app.add_option("--snapshot-interval", c.snapshot_interval_seconds,
                 "Seconds between QoS windows (0 disables)");
  app.add_option("--snapshot-window", c.snapshot_window_seconds, "QoS window length in seconds");
  app.add_option("--replicates", c.replicates, "Number of replicates");
  app.add_option("--seed", c.seed, "Master seed");
  app.add_option("--summary", c.summary_path, "Summary CSV path");
  app.add_option("--qos", c.qos_path, "QoS CSV path");
  app.add_option("--fault-drop", c.fault_drop_probability,
                 "Probability of dropping each outgoing data datagram");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    throw HelpRequested(app.help());
  } catch (const CLI::ParseError& e) {
    throw ConfigError(offending_key(e.what()), e.what());
  }

  if (workload == "coloring") {
    c.workload = Workload::Coloring;
  } else if (workload == "compute") {
    c.workload = Workload::Compute;
  } else {
    throw ConfigError("workload", "expected coloring or compute, got '" + workload + "'");
  }
  try {
    c.mode.mode = mode_from_int(mode);
  } catch (const std::invalid_argument&) {
    throw ConfigError("mode", "expected 0..4, got " + std::to_string(mode));
  }
  if (locus == "threads") {
    c.locus = Locus::Threads;
  } else if (locus == "processes") {
    c.locus = Locus::Processes;
  } else {
    throw ConfigError("locus", "expected threads or processes, got '" + locus + "'");
  }
  if (read == "jump") {
    c.read = ReadMode::Jump;
  } else if (read == "try-step") {
    c.read = ReadMode::TryStep;
  } else {
    throw ConfigError("read", "expected jump or try-step, got '" + read + "'");
  }
  c.pooled = !no_pool;
  if (max_updates > 0) c.max_updates = max_updates;

  const bool compute = c.workload == Workload::Compute;
  c.compute_work_units = units->count() > 0 ? compute_units : (compute ? kDefaultComputeUnits : 0);
  if (chunk->count() == 0) chunk_ms = compute ? 100.0 : 10.0;
  if (chunk_ms <= 0.0) throw ConfigError("chunk-ms", "must be positive");
  if (tick_seconds <= 0.0) throw ConfigError("tick", "must be positive");
  c.mode.chunk = std::chrono::nanoseconds(static_cast<std::int64_t>(chunk_ms * 1e6));
  c.mode.interval = std::chrono::nanoseconds(static_cast<std::int64_t>(tick_seconds * 1e9));
  if (buffer->count() == 0 && c.snapshots_enabled()) c.buffer_capacity = 64;

  for (const auto& w : split(jitter_workers, ',')) {
    try {
      c.jitter_workers.push_back(std::stoul(w));
    } catch (const std::exception&) {
      throw ConfigError("jitter-workers", "not a worker id: '" + w + "'");
    }
  }
  if (c.jitter_ms > 0.0 && c.jitter_workers.empty()) c.jitter_workers.push_back(0);

  if (c.locus == Locus::Processes) {
    if (!peers.empty()) {
      for (const auto& p : split(peers, ',')) {
        try {
          c.peers.push_back(Address::parse(p));
        } catch (const std::exception& e) {
          throw ConfigError("peers", e.what());
        }
      }
      if (app.count("--workers") > 0 && c.workers != c.peers.size()) {
        throw ConfigError("workers", "disagrees with the number of peers");
      }
      c.workers = c.peers.size();
    } else if (const char* base = std::getenv(kBasePortVariable)) {
      long port = 0;
      try {
        port = std::stol(base);
      } catch (const std::exception&) {
        throw ConfigError(kBasePortVariable, "not a port number");
      }
      for (std::size_t r = 0; r < c.workers; ++r) {
        c.peers.push_back(Address{"127.0.0.1", static_cast<std::uint16_t>(port + static_cast<long>(r))});
      }
    } else {
      throw ConfigError("peers", std::string("process locus needs --peers or ") + kBasePortVariable);
    }
  }

  const bool grid_given = c.grid_width > 0 || c.grid_height > 0;
  if (grid_given) {
    if (c.grid_width == 0 || c.grid_height == 0) {
      throw ConfigError(c.grid_width == 0 ? "grid-width" : "grid-height", "give both grid dimensions");
    }
    if (npw->count() > 0 && c.node_count() != c.workers * c.nodes_per_worker) {
      throw ConfigError("nodes-per-worker", "grid size must equal workers * nodes_per_worker");
    }
    if (c.workers > 0) c.nodes_per_worker = c.node_count() / c.workers;
  } else {
    const std::size_t n = c.workers * c.nodes_per_worker;
    c.grid_width = grid_width_for(n);
    c.grid_height = n == 0 ? 0 : n / c.grid_width;
  }
  validate(c);
  return c;
}

void validate(const RunConfig& c) {
  if (c.workers == 0) throw ConfigError("workers", "must be positive");
  if (c.nodes_per_worker == 0) throw ConfigError("nodes-per-worker", "must be positive");
  if (c.node_count() < c.workers) throw ConfigError("workers", "more workers than graph nodes");
  if (c.grid_width < 2 || c.grid_height < 2) {
    throw ConfigError("grid-width", "torus must be at least 2x2 for the coloring workload");
  }
  if (c.buffer_capacity == 0) throw ConfigError("buffer", "must be positive");
  try {
    c.coloring.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(c.coloring.num_colors < 2 ? "colors" : "b", e.what());
  }
  if (!(c.duration_seconds > 0.0)) throw ConfigError("duration", "must be positive");
  if (c.jitter_ms < 0.0) throw ConfigError("jitter-ms", "must not be negative");
  for (auto w : c.jitter_workers) {
    if (w >= c.workers) throw ConfigError("jitter-workers", "worker id out of range");
  }
  if (c.snapshot_interval_seconds < 0.0) throw ConfigError("snapshot-interval", "must not be negative");
  if (c.snapshots_enabled() && !(c.snapshot_window_seconds > 0.0)) {
    throw ConfigError("snapshot-window", "must be positive");
  }
  if (c.replicates == 0) throw ConfigError("replicates", "must be positive");
  if (c.fault_drop_probability < 0.0 || c.fault_drop_probability > 1.0) {
    throw ConfigError("fault-drop", "must lie in [0, 1]");
  }
  if (c.locus == Locus::Processes) {
    if (c.peers.size() != c.workers) throw ConfigError("peers", "one address per worker required");
    if (c.rank >= c.workers) throw ConfigError("rank", "must be below the worker count");
  }
}

}  // namespace slip
