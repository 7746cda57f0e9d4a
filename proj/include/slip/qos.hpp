#pragma once

#include <array>
#include <atomic>
#include <chrono>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <thread>
#include <vector>

#include "slip/counters.hpp"

namespace slip {

// All metric functions take counter differences over one window, so the same
// arithmetic applied to the same integers gives bit-identical results.

// Seconds of wall time per update. Throws NoUpdatesElapsed.
double simstep_period(std::uint64_t updates, std::int64_t elapsed_ns);
// Updates per touch; with no touches the window's update count is the bound.
double simstep_latency(std::uint64_t updates, std::uint64_t touches);
// simstep_latency * simstep_period. Throws NoUpdatesElapsed.
double walltime_latency(std::uint64_t updates, std::uint64_t touches, std::int64_t elapsed_ns);
// Fraction of attempted sends that were dropped. Throws NoSendsAttempted.
double delivery_failure_rate(std::uint64_t attempted, std::uint64_t successful);
// 1 - laden / min(messages, pull_attempts); 0 when that minimum is 0.
double delivery_clumpiness(std::uint64_t messages, std::uint64_t pull_attempts,
                           std::uint64_t laden_pulls);

enum class Metric : std::size_t {
  SimstepPeriod,
  SimstepLatency,
  WalltimeLatency,
  DeliveryFailureRate,
  DeliveryClumpiness,
};
inline constexpr std::size_t kMetricCount = 5;
inline constexpr std::array<std::string_view, kMetricCount> kMetricNames{
    "simstep_period", "simstep_latency", "walltime_latency", "delivery_failure_rate",
    "delivery_clumpiness"};

// NaN marks a metric that is undefined for the window or for that endpoint side.
struct QosReport {
  std::array<double, kMetricCount> values{};

  double operator[](Metric m) const { return values[static_cast<std::size_t>(m)]; }
  double& operator[](Metric m) { return values[static_cast<std::size_t>(m)]; }
};

QosReport inlet_report(const InletSnapshot& before, const InletSnapshot& after,
                       std::int64_t elapsed_ns);
QosReport outlet_report(const OutletSnapshot& before, const OutletSnapshot& after,
                        std::int64_t elapsed_ns);
// Per metric: mean of the defined values, NaN if neither is.
QosReport mean_report(const QosReport& a, const QosReport& b);

struct MetricSummary {
  double mean = 0.0;
  double median = 0.0;
  std::size_t count = 0;
};

// Lower-middle median for even counts. Throws EmptyInput.
MetricSummary summarize(std::span<const double> values);
// NaN entries are skipped per metric; a metric with no values summarizes to
// NaN. Throws EmptyInput on an empty list.
std::array<MetricSummary, kMetricCount> aggregate_replicate(std::span<const QosReport> reports);

// One endpoint of the observed system. Either side may be absent when that
// side lives in another process.
struct EndpointProbe {
  std::uint64_t source_node = 0;
  int direction = 0;
  std::uint64_t source_worker = 0;
  std::uint64_t target_worker = 0;
  std::optional<InletProbe> inlet;
  std::optional<OutletProbe> outlet;
};

struct EndpointReading {
  std::optional<InletSnapshot> inlet;
  std::optional<OutletSnapshot> outlet;
};

struct SnapshotTranche {
  std::int64_t capture_walltime_ns = 0;  // since run start
  std::vector<EndpointReading> readings;  // parallel to the probe list
};

SnapshotTranche capture(std::span<const EndpointProbe> probes, std::int64_t walltime_ns);

struct SnapshotWindow {
  std::size_t index = 0;
  SnapshotTranche before;
  SnapshotTranche after;
};

struct EndpointWindowReport {
  std::size_t window_index = 0;
  std::size_t endpoint = 0;  // index into the probe list
  std::optional<QosReport> inlet;
  std::optional<QosReport> outlet;
};

std::vector<EndpointWindowReport> evaluate(std::span<const SnapshotWindow> windows);

// Window start offsets: k * interval for k >= 1 while start + window fits in
// the run duration.
std::vector<std::chrono::nanoseconds> snapshot_schedule(std::chrono::nanoseconds duration,
                                                        std::chrono::nanoseconds interval,
                                                        std::chrono::nanoseconds window);

// Observer thread. Reads counters while workers run; nothing is paused, so a
// tranche is a blurred picture (each counter read is atomic, the set is not).
class SnapshotObserver {
 public:
  SnapshotObserver(std::vector<EndpointProbe> probes, std::chrono::steady_clock::time_point start,
                   std::vector<std::chrono::nanoseconds> window_starts,
                   std::chrono::nanoseconds window);
  ~SnapshotObserver();

  SnapshotObserver(const SnapshotObserver&) = delete;
  SnapshotObserver& operator=(const SnapshotObserver&) = delete;

  // Stops early if still running; windows not completed are discarded.
  std::vector<SnapshotWindow> finish();
  const std::vector<EndpointProbe>& probes() const noexcept { return probes_; }

 private:
  void run();

  std::vector<EndpointProbe> probes_;
  std::chrono::steady_clock::time_point start_;
  std::vector<std::chrono::nanoseconds> starts_;
  std::chrono::nanoseconds window_;
  std::vector<SnapshotWindow> windows_;
  std::atomic<bool> cancel_{false};
  std::thread thread_;
};

}  // namespace slip
