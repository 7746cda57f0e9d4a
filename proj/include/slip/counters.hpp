#pragma once

#include <atomic>
#include <cstdint>
#include <memory>

namespace slip {

// Single-writer counter that an observer may read at any time. Each load is
// atomic on its own; loads of several counters are not mutually consistent.
class Counter {
 public:
  Counter() = default;
  Counter(const Counter&) = delete;
  Counter& operator=(const Counter&) = delete;

  void add(std::uint64_t n = 1) noexcept {
    value_.store(value_.load(std::memory_order_relaxed) + n, std::memory_order_relaxed);
  }
  void set(std::uint64_t v) noexcept { value_.store(v, std::memory_order_relaxed); }
  std::uint64_t load() const noexcept { return value_.load(std::memory_order_relaxed); }

 private:
  std::atomic<std::uint64_t> value_{0};
};

// Per-worker simulation update count, shared by every endpoint the worker owns.
class UpdateClock {
 public:
  void tick() noexcept { count_.add(); }
  std::uint64_t read() const noexcept { return count_.load(); }

 private:
  Counter count_;
};

// Zero-initialized per-neighbor counter. Written by the outlet receiving from
// that neighbor, read by the inlet sending to it.
using TouchCounter = Counter;

struct InletCounters {
  Counter attempted_send_count;
  Counter successful_send_count;

  void record(bool success) noexcept {
    attempted_send_count.add();
    if (success) successful_send_count.add();
  }
};

struct OutletCounters {
  Counter pull_attempt_count;
  Counter laden_pull_count;
  Counter message_count;
};

struct InletSnapshot {
  std::uint64_t update_count = 0;
  std::uint64_t touch_count = 0;
  std::uint64_t attempted_send_count = 0;
  std::uint64_t successful_send_count = 0;

  friend bool operator==(const InletSnapshot&, const InletSnapshot&) = default;
};

struct OutletSnapshot {
  std::uint64_t update_count = 0;
  std::uint64_t touch_count = 0;
  std::uint64_t message_count = 0;
  std::uint64_t pull_attempt_count = 0;
  std::uint64_t laden_pull_count = 0;

  friend bool operator==(const OutletSnapshot&, const OutletSnapshot&) = default;
};

// Read-only handles onto an endpoint's instrumentation. They outlive moves of
// the endpoint itself, so an observer can keep them for the whole run.
struct InletProbe {
  std::shared_ptr<const InletCounters> counters;
  std::shared_ptr<const UpdateClock> clock;
  std::shared_ptr<const TouchCounter> touch;

  InletSnapshot read() const noexcept {
    InletSnapshot s;
    s.update_count = clock ? clock->read() : 0;
    s.touch_count = touch ? touch->load() : 0;
    s.attempted_send_count = counters->attempted_send_count.load();
    s.successful_send_count = counters->successful_send_count.load();
    return s;
  }
};

struct OutletProbe {
  std::shared_ptr<const OutletCounters> counters;
  std::shared_ptr<const UpdateClock> clock;
  std::shared_ptr<const TouchCounter> touch;

  OutletSnapshot read() const noexcept {
    OutletSnapshot s;
    s.update_count = clock ? clock->read() : 0;
    s.touch_count = touch->load();
    s.message_count = counters->message_count.load();
    s.pull_attempt_count = counters->pull_attempt_count.load();
    s.laden_pull_count = counters->laden_pull_count.load();
    return s;
  }
};

}  // namespace slip
