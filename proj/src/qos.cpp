#include "slip/qos.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "slip/errors.hpp"

namespace slip {

namespace {
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
}

double simstep_period(std::uint64_t updates, std::int64_t elapsed_ns) {
  if (updates == 0) throw NoUpdatesElapsed();
  return (static_cast<double>(elapsed_ns) / 1e9) / static_cast<double>(updates);
}

double simstep_latency(std::uint64_t updates, std::uint64_t touches) {
  return static_cast<double>(updates) / static_cast<double>(std::max<std::uint64_t>(touches, 1));
}

double walltime_latency(std::uint64_t updates, std::uint64_t touches, std::int64_t elapsed_ns) {
  return simstep_latency(updates, touches) * simstep_period(updates, elapsed_ns);
}

double delivery_failure_rate(std::uint64_t attempted, std::uint64_t successful) {
  if (attempted == 0) throw NoSendsAttempted();
  // 1 - s/a, with the difference taken before dividing so it stays exact.
  const double a = static_cast<double>(attempted);
  return (a - static_cast<double>(successful)) / a;
}

double delivery_clumpiness(std::uint64_t messages, std::uint64_t pull_attempts,
                           std::uint64_t laden_pulls) {
  const std::uint64_t opportunities = std::min(messages, pull_attempts);
  if (opportunities == 0) return 0.0;
  const double o = static_cast<double>(opportunities);
  return (o - static_cast<double>(laden_pulls)) / o;
}

namespace {

void fill_timing(QosReport& r, std::uint64_t updates, std::uint64_t touches,
                 std::int64_t elapsed_ns) {
  r[Metric::SimstepLatency] = simstep_latency(updates, touches);
  if (updates == 0) {
    r[Metric::SimstepPeriod] = kNaN;
    r[Metric::WalltimeLatency] = kNaN;
    return;
  }
  r[Metric::SimstepPeriod] = simstep_period(updates, elapsed_ns);
  r[Metric::WalltimeLatency] = walltime_latency(updates, touches, elapsed_ns);
}

}  // namespace

QosReport inlet_report(const InletSnapshot& before, const InletSnapshot& after,
                       std::int64_t elapsed_ns) {
  QosReport r;
  fill_timing(r, after.update_count - before.update_count, after.touch_count - before.touch_count,
              elapsed_ns);
  const std::uint64_t attempted = after.attempted_send_count - before.attempted_send_count;
  const std::uint64_t successful = after.successful_send_count - before.successful_send_count;
  r[Metric::DeliveryFailureRate] = attempted == 0 ? kNaN : delivery_failure_rate(attempted, successful);
  r[Metric::DeliveryClumpiness] = kNaN;
  return r;
}

QosReport outlet_report(const OutletSnapshot& before, const OutletSnapshot& after,
                        std::int64_t elapsed_ns) {
  QosReport r;
  fill_timing(r, after.update_count - before.update_count, after.touch_count - before.touch_count,
              elapsed_ns);
  r[Metric::DeliveryFailureRate] = kNaN;
  r[Metric::DeliveryClumpiness] = delivery_clumpiness(
      after.message_count - before.message_count,
      after.pull_attempt_count - before.pull_attempt_count,
      after.laden_pull_count - before.laden_pull_count);
  return r;
}

QosReport mean_report(const QosReport& a, const QosReport& b) {
  QosReport r;
  for (std::size_t i = 0; i < kMetricCount; ++i) {
    const double x = a.values[i];
    const double y = b.values[i];
    if (std::isnan(x)) {
      r.values[i] = y;
    } else if (std::isnan(y)) {
      r.values[i] = x;
    } else {
      r.values[i] = (x + y) / 2.0;
    }
  }
  return r;
}

MetricSummary summarize(std::span<const double> values) {
  if (values.empty()) throw EmptyInput();
  MetricSummary s;
  s.count = values.size();
  double sum = 0.0;
  for (double v : values) sum += v;
  s.mean = sum / static_cast<double>(values.size());
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  s.median = sorted[(sorted.size() - 1) / 2];
  return s;
}

std::array<MetricSummary, kMetricCount> aggregate_replicate(std::span<const QosReport> reports) {
  if (reports.empty()) throw EmptyInput();
  std::array<MetricSummary, kMetricCount> out{};
  for (std::size_t m = 0; m < kMetricCount; ++m) {
    std::vector<double> values;
    for (const auto& r : reports) {
      if (!std::isnan(r.values[m])) values.push_back(r.values[m]);
    }
    out[m] = values.empty() ? MetricSummary{kNaN, kNaN, 0} : summarize(values);
  }
  return out;
}

SnapshotTranche capture(std::span<const EndpointProbe> probes, std::int64_t walltime_ns) {
  SnapshotTranche t;
  t.capture_walltime_ns = walltime_ns;
  t.readings.reserve(probes.size());
  for (const auto& p : probes) {
    EndpointReading r;
    if (p.inlet) r.inlet = p.inlet->read();
    if (p.outlet) r.outlet = p.outlet->read();
    t.readings.push_back(r);
  }
  return t;
}

std::vector<EndpointWindowReport> evaluate(std::span<const SnapshotWindow> windows) {
  std::vector<EndpointWindowReport> out;
  for (const auto& w : windows) {
    const std::int64_t elapsed = w.after.capture_walltime_ns - w.before.capture_walltime_ns;
    const std::size_t n = std::min(w.before.readings.size(), w.after.readings.size());
    for (std::size_t e = 0; e < n; ++e) {
      const auto& b = w.before.readings[e];
      const auto& a = w.after.readings[e];
      EndpointWindowReport r;
      r.window_index = w.index;
      r.endpoint = e;
      if (b.inlet && a.inlet) r.inlet = inlet_report(*b.inlet, *a.inlet, elapsed);
      if (b.outlet && a.outlet) r.outlet = outlet_report(*b.outlet, *a.outlet, elapsed);
      out.push_back(r);
    }
  }
  return out;
}

std::vector<std::chrono::nanoseconds> snapshot_schedule(std::chrono::nanoseconds duration,
                                                        std::chrono::nanoseconds interval,
                                                        std::chrono::nanoseconds window) {
  std::vector<std::chrono::nanoseconds> starts;
  if (interval.count() <= 0 || window.count() <= 0) return starts;
  for (auto start = interval; start + window <= duration; start += interval) {
    starts.push_back(start);
  }
  return starts;
}

SnapshotObserver::SnapshotObserver(std::vector<EndpointProbe> probes,
                                   std::chrono::steady_clock::time_point start,
                                   std::vector<std::chrono::nanoseconds> window_starts,
                                   std::chrono::nanoseconds window)
    : probes_(std::move(probes)), start_(start), starts_(std::move(window_starts)), window_(window) {
  thread_ = std::thread([this] { run(); });
}

SnapshotObserver::~SnapshotObserver() {
  cancel_ = true;
  if (thread_.joinable()) thread_.join();
}

void SnapshotObserver::run() {
  const auto since_start = [&] {
    return std::chrono::duration_cast<std::chrono::nanoseconds>(std::chrono::steady_clock::now() -
                                                                start_)
        .count();
  };
  // Sleeping in short slices keeps finish() responsive without spinning a
  // core away from the workers.
  const auto wait_until = [&](std::chrono::steady_clock::time_point t) {
    while (!cancel_) {
      const auto now = std::chrono::steady_clock::now();
      if (now >= t) return true;
      std::this_thread::sleep_for(std::min<std::chrono::steady_clock::duration>(
          t - now, std::chrono::milliseconds(20)));
    }
    return false;
  };
  for (std::size_t k = 0; k < starts_.size(); ++k) {
    if (!wait_until(start_ + starts_[k])) return;
    SnapshotWindow w;
    w.index = k;
    w.before = capture(probes_, since_start());
    if (!wait_until(start_ + starts_[k] + window_)) return;
    w.after = capture(probes_, since_start());
    windows_.push_back(std::move(w));
  }
}

std::vector<SnapshotWindow> SnapshotObserver::finish() {
  cancel_ = true;
  if (thread_.joinable()) thread_.join();
  return std::move(windows_);
}

}  // namespace slip
