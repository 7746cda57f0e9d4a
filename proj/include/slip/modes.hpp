#pragma once

#include <chrono>
#include <cstdint>
#include <optional>
#include <string>

#include "slip/coloring_worker.hpp"
#include "slip/sync.hpp"

namespace slip {

enum class AsyncMode : int {
  FullBarrier = 0,   // barrier after every update
  TimedChunks = 1,   // barrier after each chunk of work time
  UtcSchedule = 2,   // barrier at fixed ticks of the shared epoch
  FullyAsync = 3,    // no barriers
  NoComm = 4,        // no barriers, no inter-worker communication
};

// Throws std::invalid_argument outside 0..4.
AsyncMode mode_from_int(int value);
int to_int(AsyncMode mode) noexcept;

struct ModeSettings {
  AsyncMode mode = AsyncMode::FullyAsync;
  std::chrono::nanoseconds chunk = std::chrono::milliseconds(10);
  std::chrono::nanoseconds interval = std::chrono::seconds(1);
};

// Every worker of a run shares the epoch; the timed loop starts at the epoch
// and ends at the first update boundary after epoch + duration, or once
// `max_updates` updates completed.
struct RunWindow {
  std::chrono::system_clock::time_point epoch;
  std::chrono::nanoseconds duration{0};
  std::optional<std::uint64_t> max_updates;
};

struct WorkerRecord {
  std::uint64_t updates = 0;
  double wall_seconds = 0.0;
  std::uint64_t barriers = 0;
  bool broken = false;
  std::string error;
};

// Runs one worker's timed loop under `settings`. Failures do not escape: a
// broken barrier or a throwing update is reported in the record, and the sync
// point is abandoned so peers are released as well.
WorkerRecord run_worker(const ModeSettings& settings, UpdateTarget& target, SyncPoint& sync,
                        const RunWindow& window);

}  // namespace slip
