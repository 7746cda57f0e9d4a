#include "slip/modes.hpp"

#include <stdexcept>
#include <thread>

#include "slip/errors.hpp"

namespace slip {

AsyncMode mode_from_int(int value) {
  if (value < 0 || value > 4) throw std::invalid_argument("mode must be 0..4");
  return static_cast<AsyncMode>(value);
}

int to_int(AsyncMode mode) noexcept { return static_cast<int>(mode); }

namespace {

using SteadyClock = std::chrono::steady_clock;

class Loop {
 public:
  Loop(UpdateTarget& target, SyncPoint& sync, const RunWindow& window, WorkerRecord& record)
      : target_(target), sync_(sync), window_(window), record_(record) {
    const auto offset = window.epoch - std::chrono::system_clock::now();
    epoch_ = SteadyClock::now() + std::chrono::duration_cast<SteadyClock::duration>(offset);
    deadline_ = epoch_ + std::chrono::duration_cast<SteadyClock::duration>(window.duration);
  }

  SteadyClock::time_point epoch() const { return epoch_; }

  void update() {
    target_.update();
    ++record_.updates;
  }

  // Time limit only applies when no update budget was given, so budgeted runs
  // are reproducible regardless of speed.
  bool done() const {
    if (window_.max_updates && record_.updates >= *window_.max_updates) return true;
    return !window_.max_updates.has_value() && SteadyClock::now() >= deadline_;
  }

  bool vote(bool stop) {
    ++record_.barriers;
    return sync_.vote_stop(stop);
  }

 private:
  UpdateTarget& target_;
  SyncPoint& sync_;
  const RunWindow& window_;
  WorkerRecord& record_;
  SteadyClock::time_point epoch_;
  SteadyClock::time_point deadline_;
};

void full_barrier(Loop& loop) {
  for (;;) {
    loop.update();
    if (loop.vote(loop.done())) return;
  }
}

void timed_chunks(Loop& loop, std::chrono::nanoseconds chunk) {
  for (;;) {
    const auto chunk_end = SteadyClock::now() + chunk;
    bool stop = false;
    do {
      loop.update();
      stop = loop.done();
    } while (!stop && SteadyClock::now() < chunk_end);
    if (loop.vote(stop)) return;
  }
}

void utc_schedule(Loop& loop, std::chrono::nanoseconds interval) {
  const auto tick_of = [&](SteadyClock::time_point t) { return (t - loop.epoch()) / interval; };
  auto last_tick = tick_of(SteadyClock::now());
  for (;;) {
    loop.update();
    const bool stop = loop.done();
    const auto tick = tick_of(SteadyClock::now());
    if (stop || tick != last_tick) {
      last_tick = tick;
      if (loop.vote(stop)) return;
    }
  }
}

void free_running(Loop& loop) {
  do {
    loop.update();
  } while (!loop.done());
}

}  // namespace

WorkerRecord run_worker(const ModeSettings& settings, UpdateTarget& target, SyncPoint& sync,
                        const RunWindow& window) {
  WorkerRecord record;
  Loop loop(target, sync, window, record);
  std::this_thread::sleep_until(loop.epoch());
  const auto start = SteadyClock::now();
  try {
    switch (settings.mode) {
      case AsyncMode::FullBarrier: full_barrier(loop); break;
      case AsyncMode::TimedChunks: timed_chunks(loop, settings.chunk); break;
      case AsyncMode::UtcSchedule: utc_schedule(loop, settings.interval); break;
      case AsyncMode::FullyAsync: free_running(loop); break;
      case AsyncMode::NoComm:
        target.set_communication(false);
        free_running(loop);
        target.set_communication(true);
        break;
    }
  } catch (const BarrierBroken& e) {
    record.broken = true;
    record.error = e.what();
    sync.abandon();
  } catch (const std::exception& e) {
    record.error = e.what();
    sync.abandon();
  }
  target.set_communication(true);
  record.wall_seconds = std::chrono::duration<double>(SteadyClock::now() - start).count();
  return record;
}

}  // namespace slip
