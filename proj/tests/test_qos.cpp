#include <doctest.h>

#include <cmath>
#include <thread>

#include "slip/channel.hpp"
#include "slip/errors.hpp"
#include "slip/qos.hpp"

using namespace slip;
using namespace std::chrono_literals;

TEST_CASE("metric spot values") {
  CHECK(simstep_period(100, 1'000'000'000) == doctest::Approx(0.01));
  CHECK(simstep_latency(48, 48) == 1.0);
  CHECK(simstep_latency(100, 0) == 100.0);
  CHECK(simstep_latency(10, 5) == 2.0);
  CHECK(walltime_latency(100, 50, 1'000'000'000) == doctest::Approx(0.02));
  CHECK(delivery_failure_rate(3, 2) == doctest::Approx(1.0 / 3.0));
  CHECK(delivery_failure_rate(10, 10) == 0.0);
  CHECK(delivery_clumpiness(10, 10, 1) == doctest::Approx(0.9));
  CHECK(delivery_clumpiness(10, 10, 10) == 0.0);
  CHECK(delivery_clumpiness(0, 10, 0) == 0.0);
  CHECK(delivery_clumpiness(50, 10, 5) == doctest::Approx(0.5));
}

TEST_CASE("undefined metrics throw") {
  CHECK_THROWS_AS(simstep_period(0, 1000), NoUpdatesElapsed);
  CHECK_THROWS_AS(walltime_latency(0, 0, 1000), NoUpdatesElapsed);
  CHECK_THROWS_AS(delivery_failure_rate(0, 0), NoSendsAttempted);
}

TEST_CASE("endpoint reports mark the other side's metrics undefined") {
  InletSnapshot ib{10, 4, 20, 18}, ia{60, 29, 70, 58};
  const auto in = inlet_report(ib, ia, 500'000'000);
  CHECK(in[Metric::SimstepPeriod] == doctest::Approx(0.5 / 50));
  CHECK(in[Metric::SimstepLatency] == doctest::Approx(50.0 / 25));
  CHECK(in[Metric::DeliveryFailureRate] == doctest::Approx(1.0 - 40.0 / 50));
  CHECK(std::isnan(in[Metric::DeliveryClumpiness]));

  OutletSnapshot ob{0, 0, 0, 0, 0}, oa{40, 20, 30, 40, 10};
  const auto out = outlet_report(ob, oa, 1'000'000'000);
  CHECK(out[Metric::SimstepLatency] == doctest::Approx(2.0));
  CHECK(out[Metric::DeliveryClumpiness] == doctest::Approx(1.0 - 10.0 / 30));
  CHECK(std::isnan(out[Metric::DeliveryFailureRate]));

  const auto m = mean_report(in, out);
  CHECK(m[Metric::SimstepLatency] == doctest::Approx(2.0));
  CHECK(m[Metric::DeliveryFailureRate] == in[Metric::DeliveryFailureRate]);
  CHECK(m[Metric::DeliveryClumpiness] == out[Metric::DeliveryClumpiness]);
}

TEST_CASE("windows without updates or sends report NaN instead of throwing") {
  InletSnapshot s{5, 5, 5, 5};
  const auto r = inlet_report(s, s, 1000);
  CHECK(std::isnan(r[Metric::SimstepPeriod]));
  CHECK(std::isnan(r[Metric::DeliveryFailureRate]));
}

TEST_CASE("summaries") {
  const std::vector<double> v{1, 2, 3, 100};
  const auto s = summarize(v);
  CHECK(s.mean == doctest::Approx(26.5));
  CHECK(s.median == 2.0);
  CHECK(s.count == 4);
  const std::vector<double> odd{5, 1, 3};
  CHECK(summarize(odd).median == 3.0);
  CHECK_THROWS_AS(summarize(std::vector<double>{}), EmptyInput);

  std::vector<QosReport> reports(3);
  for (std::size_t i = 0; i < 3; ++i) {
    reports[i].values.fill(static_cast<double>(i + 1));
    reports[i][Metric::DeliveryClumpiness] = std::nan("");
  }
  reports[1][Metric::DeliveryFailureRate] = std::nan("");
  const auto agg = aggregate_replicate(reports);
  CHECK(agg[0].mean == doctest::Approx(2.0));
  CHECK(agg[3].count == 2);
  CHECK(agg[3].mean == doctest::Approx(2.0));
  CHECK(agg[4].count == 0);
  CHECK(std::isnan(agg[4].mean));
  CHECK_THROWS_AS(aggregate_replicate(std::vector<QosReport>{}), EmptyInput);
}

TEST_CASE("snapshot schedule") {
  CHECK(snapshot_schedule(10s, 2s, 500ms).size() == 4);
  const auto s = snapshot_schedule(301s, 60s, 1s);
  REQUIRE(s.size() == 5);
  CHECK(s.front() == 60s);
  CHECK(s.back() == 300s);
  CHECK(snapshot_schedule(1s, 2s, 500ms).empty());
}

TEST_CASE("evaluate turns tranche pairs into per-endpoint reports") {
  SnapshotWindow w;
  w.index = 3;
  w.before.capture_walltime_ns = 1'000'000'000;
  w.after.capture_walltime_ns = 2'000'000'000;
  w.before.readings.push_back({InletSnapshot{0, 0, 0, 0}, OutletSnapshot{0, 0, 0, 0, 0}});
  w.after.readings.push_back({InletSnapshot{100, 50, 100, 90}, OutletSnapshot{100, 100, 80, 100, 80}});
  w.before.readings.push_back({std::nullopt, OutletSnapshot{0, 0, 0, 0, 0}});
  w.after.readings.push_back({std::nullopt, OutletSnapshot{10, 5, 5, 10, 5}});
  const auto reports = evaluate(std::vector<SnapshotWindow>{w});
  REQUIRE(reports.size() == 2);
  CHECK(reports[0].window_index == 3);
  CHECK((*reports[0].inlet)[Metric::SimstepPeriod] == doctest::Approx(0.01));
  CHECK((*reports[0].inlet)[Metric::DeliveryFailureRate] == doctest::Approx(0.1));
  CHECK((*reports[0].outlet)[Metric::SimstepLatency] == doctest::Approx(1.0));
  CHECK(reports[1].endpoint == 1);
  CHECK_FALSE(reports[1].inlet.has_value());
  CHECK((*reports[1].outlet)[Metric::SimstepLatency] == doctest::Approx(2.0));
}

TEST_CASE("observer captures live counters on schedule") {
  auto clock = std::make_shared<UpdateClock>();
  auto ends = make_channel<int>(std::make_shared<InterThreadDuct<int>>(4), 0, clock, clock);
  ends.inlet.link_touch_counter(ends.outlet.touch_counter());
  EndpointProbe probe;
  probe.inlet = ends.inlet.probe();
  probe.outlet = ends.outlet.probe();

  const auto start = std::chrono::steady_clock::now();
  SnapshotObserver observer({probe}, start, snapshot_schedule(400ms, 100ms, 50ms), 50ms);
  std::atomic<bool> stop{false};
  std::thread worker([&] {
    while (!stop) {
      ends.inlet.try_put(1);
      ends.outlet.jump();
      clock->tick();
      std::this_thread::sleep_for(200us);
    }
  });
  std::this_thread::sleep_for(450ms);
  const auto windows = observer.finish();
  stop = true;
  worker.join();
  REQUIRE(windows.size() == 3);
  for (const auto& w : windows) {
    CHECK(w.after.capture_walltime_ns > w.before.capture_walltime_ns);
    CHECK(w.after.readings[0].inlet->update_count > w.before.readings[0].inlet->update_count);
  }
  const auto reports = evaluate(windows);
  for (const auto& r : reports) {
    CHECK((*r.inlet)[Metric::DeliveryFailureRate] == 0.0);
    CHECK((*r.outlet)[Metric::SimstepLatency] == doctest::Approx(1.0).epsilon(0.1));
  }
}

TEST_CASE("finishing early discards incomplete windows") {
  auto ends = make_channel<int>(std::make_shared<InterThreadDuct<int>>(2), 0);
  EndpointProbe probe;
  probe.outlet = ends.outlet.probe();
  SnapshotObserver observer({probe}, std::chrono::steady_clock::now(),
                            snapshot_schedule(100s, 10s, 1s), 1s);
  const auto t0 = std::chrono::steady_clock::now();
  CHECK(observer.finish().empty());
  CHECK(std::chrono::steady_clock::now() - t0 < 1s);
}
