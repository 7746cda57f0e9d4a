// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// nonzero if any failed. Pass criterion numbers as arguments to run a subset.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <deque>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "slip/bench.hpp"
#include "slip/channel.hpp"
#include "slip/coloring_worker.hpp"
#include "slip/hub.hpp"
#include "slip/inter_process.hpp"
#include "slip/modes.hpp"
#include "slip/qos.hpp"
#include "slip/workloads.hpp"

using namespace slip;
namespace fs = std::filesystem;

namespace {

struct Verdict {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double median(std::vector<double> v) {
  if (v.empty()) return std::nan("");
  std::sort(v.begin(), v.end());
  return v[(v.size() - 1) / 2];
}

bool same(double a, double b) { return (std::isnan(a) && std::isnan(b)) || a == b; }

RunConfig parse(std::vector<std::string> args) {
  args.insert(args.begin(), "slipbench");
  return parse_config(args);
}

fs::path scratch_dir(const std::string& name) {
  const auto dir = fs::temp_directory_path() /
                   ("slip_acceptance_" + name + "_" + std::to_string(std::random_device{}()));
  fs::create_directories(dir);
  return dir;
}

using CsvRow = std::map<std::string, std::string>;

std::vector<CsvRow> read_csv(const fs::path& path) {
  std::ifstream in(path);
  std::vector<CsvRow> rows;
  std::string line;
  std::vector<std::string> header;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (header.empty()) {
      header = cells;
      continue;
    }
    CsvRow row;
    for (std::size_t i = 0; i < header.size() && i < cells.size(); ++i) row[header[i]] = cells[i];
    rows.push_back(std::move(row));
  }
  return rows;
}

int base_port() { return 43000 + static_cast<int>(std::random_device{}() % 4000) * 4; }

// Starts `ranks` slipbench processes and waits for all of them.
bool run_ranks(std::size_t ranks, const std::string& args) {
  const std::string bin = SLIPBENCH_PATH;
  std::string script = "export SLIP_BASE_PORT=" + std::to_string(base_port()) + "; pids=; ";
  for (std::size_t r = 1; r < ranks; ++r) {
    script += bin + " --rank " + std::to_string(r) + " " + args + " >/dev/null 2>&1 & pids=\"$pids $!\"; ";
  }
  script += bin + " --rank 0 " + args + " >/dev/null 2>&1; rc=$?; for p in $pids; do wait $p || rc=1; done; exit $rc";
  const std::string cmd = "sh -c '" + script + "'";
  return std::system(cmd.c_str()) == 0;
}

// ---------------------------------------------------------------------------

struct PairedTrials {
  std::vector<std::uint64_t> total0, total3;
  std::vector<double> conflicts0, conflicts3;
};

PairedTrials run_jitter_trials(bool success_reset) {
  PairedTrials t;
  for (int trial = 0; trial < 10; ++trial) {
    auto c = parse({"--workload", "coloring", "--workers", "4", "--duration", "5", "--jitter-ms", "1",
                    "--jitter-workers", "0", "--seed", std::to_string(trial + 1)});
    c.coloring.success_reset = success_reset;
    for (AsyncMode m : {AsyncMode::FullBarrier, AsyncMode::FullyAsync}) {
      c.mode.mode = m;
      const auto r = run_benchmark(c);
      std::uint64_t total = 0;
      for (const auto& w : r.workers) total += w.record.updates;
      const double conflicts = static_cast<double>(r.workers.at(0).final_conflicts);
      if (m == AsyncMode::FullBarrier) {
        t.total0.push_back(total);
        t.conflicts0.push_back(conflicts);
      } else {
        t.total3.push_back(total);
        t.conflicts3.push_back(conflicts);
      }
    }
  }
  return t;
}

// Criteria 1 and 4 share one set of paired runs.
const PairedTrials& jitter_trials() {
  static const PairedTrials trials = run_jitter_trials(true);
  return trials;
}

Verdict criterion1() {
  const auto& t = jitter_trials();
  int wins = 0;
  double min_ratio = 1e300, max_ratio = 0;
  for (std::size_t i = 0; i < t.total0.size(); ++i) {
    const double ratio = static_cast<double>(t.total3[i]) / static_cast<double>(t.total0[i]);
    min_ratio = std::min(min_ratio, ratio);
    max_ratio = std::max(max_ratio, ratio);
    wins += ratio >= 1.5;
  }
  return {wins >= 9, fmt("mode3/mode0 total updates >= 1.5 in %d/10 trials (ratio %.3f..%.3f, "
                         "mode0 median %.0f, mode3 median %.0f)",
                         wins, min_ratio, max_ratio,
                         median({t.total0.begin(), t.total0.end()}),
                         median({t.total3.begin(), t.total3.end()}))};
}

Verdict criterion2() {
  const auto dir = scratch_dir("c2");
  const std::string common = "--mode 4 --duration 5 --workload coloring";
  const std::string single = std::string(SLIPBENCH_PATH) + " --workers 1 " + common + " --summary " +
                             (dir / "single.csv").string() + " >/dev/null 2>&1";
  if (std::system(single.c_str()) != 0) return {false, "single-worker run failed"};
  if (!run_ranks(4, "--locus processes --workers 4 " + common + " --summary " +
                        (dir / "multi.csv").string())) {
    return {false, "4-process run failed"};
  }
  const auto s = read_csv(dir / "single.csv");
  const auto m = read_csv(dir / "multi.csv");
  if (s.size() != 1 || m.size() != 4) return {false, "unexpected summary row count"};
  const double base = std::stod(s[0].at("update_rate"));
  double worst = 0;
  std::string rates;
  for (const auto& row : m) {
    const double rate = std::stod(row.at("update_rate"));
    worst = std::max(worst, std::abs(rate / base - 1.0));
    rates += fmt(" %.0f", rate);
  }
  fs::remove_all(dir);
  return {worst <= 0.15, fmt("single %.0f updates/s; 4 processes:%s; worst deviation %.1f%% (limit 15%%)",
                             base, rates.c_str(), worst * 100)};
}

class ConflictTracker final : public UpdateTarget {
 public:
  ConflictTracker(ColoringWorker& worker, const TorusTopology& topo) : worker_(worker), topo_(topo) {
    history_.push_back(count());
  }
  void update() override {
    worker_.update();
    history_.push_back(count());
  }
  void set_communication(bool enabled) override { worker_.set_communication(enabled); }
  const std::vector<std::size_t>& history() const { return history_; }

 private:
  std::size_t count() const { return count_conflicts(topo_, worker_.colors()); }
  ColoringWorker& worker_;
  const TorusTopology& topo_;
  std::vector<std::size_t> history_;
};

// Conflict trajectory of one 16x16 single-worker mode 0 run.
std::vector<std::size_t> cfl_run(std::uint64_t seed, bool success_reset) {
  const auto topo = build_torus(16, 16);
  auto reg = instantiate_channels<Color>(topo, partition_block(topo, 1), DuctConfig<Color>{});
  ColoringWorkerOptions opts;
  opts.params.num_colors = 3;
  opts.params.b = 0.1;
  opts.params.success_reset = success_reset;
  opts.seed = seed;
  ColoringWorker worker(reg, 0, opts);
  worker.prime();
  ConflictTracker tracker(worker, topo);
  ThreadBarrier barrier(1);
  ModeSettings settings;
  settings.mode = AsyncMode::FullBarrier;
  RunWindow window;
  window.epoch = std::chrono::system_clock::now();
  window.duration = std::chrono::hours(1);
  window.max_updates = 10000;
  run_worker(settings, tracker, barrier, window);
  return tracker.history();
}

Verdict criterion3() {
  int solved = 0, not_worse = 0;
  std::size_t slowest = 0;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const auto h = cfl_run(seed, true);
    const auto zero = std::find(h.begin(), h.end(), 0u);
    if (zero != h.end()) {
      ++solved;
      slowest = std::max(slowest, static_cast<std::size_t>(zero - h.begin()));
    }
    not_worse += h.size() == 10001 && h.back() <= h.front();
  }
  int plain_solved = 0;
  std::size_t plain_best = SIZE_MAX;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const auto h = cfl_run(seed, false);
    plain_solved += std::find(h.begin(), h.end(), 0u) != h.end();
    plain_best = std::min(plain_best, h.back());
  }
  std::printf("INFO     3 without success reset: %d/10 seeds reached 0 conflicts, best final %zu\n",
              plain_solved, plain_best);
  return {solved >= 9 && not_worse == 10,
          fmt("success-reset rule: %d/10 seeds reached 0 conflicts (slowest at update %zu); "
              "final <= initial in %d/10",
              solved, slowest, not_worse)};
}

Verdict criterion4() {
  const auto& t = jitter_trials();
  const double m0 = median(t.conflicts0), m3 = median(t.conflicts3);
  const auto plain = run_jitter_trials(false);
  std::printf("INFO     4 without success reset: median final conflicts mode3 %.0f, mode0 %.0f\n",
              median(plain.conflicts3), median(plain.conflicts0));
  return {m3 <= m0, fmt("success-reset rule: median final conflicts mode3 %.0f, mode0 %.0f "
                        "(10 paired replicates)",
                        m3, m0)};
}

// Independent model of one channel pair, replayed from the same event log.
struct ReplayChannel {
  struct Msg {
    int payload;
    std::uint64_t touch;
  };
  std::size_t capacity;
  std::deque<Msg> queue;
  std::uint64_t attempted = 0, successful = 0;
  std::uint64_t pulls = 0, laden = 0, messages = 0;
  std::uint64_t receiver_touch = 0;
};

struct ReplayTotals {
  std::uint64_t updates_sender, updates_receiver, touch_sender, touch_receiver;
  std::uint64_t attempted, successful, pulls, laden, messages;
};

struct OracleReport {
  double values[kMetricCount];
};

OracleReport oracle_metrics(std::uint64_t updates, std::uint64_t touches, std::int64_t elapsed_ns,
                            bool inlet, std::uint64_t a, std::uint64_t b, std::uint64_t c) {
  OracleReport r;
  const double nan = std::nan("");
  const double latency = static_cast<double>(updates) / static_cast<double>(touches == 0 ? 1 : touches);
  const double period =
      updates == 0 ? nan : (static_cast<double>(elapsed_ns) / 1e9) / static_cast<double>(updates);
  r.values[0] = period;
  r.values[1] = latency;
  r.values[2] = updates == 0 ? nan : latency * period;
  if (inlet) {
    // a = attempted, b = successful
    r.values[3] = a == 0 ? nan : (static_cast<double>(a) - static_cast<double>(b)) / static_cast<double>(a);
    r.values[4] = nan;
  } else {
    // a = messages, b = pulls, c = laden
    const std::uint64_t opp = a < b ? a : b;
    r.values[3] = nan;
    r.values[4] = opp == 0 ? 0.0 : (static_cast<double>(opp) - static_cast<double>(c)) / static_cast<double>(opp);
  }
  return r;
}

Verdict criterion5() {
  std::mt19937_64 gen(5);
  std::size_t compared = 0, mismatches = 0;
  for (int log = 0; log < 1000; ++log) {
    // Endpoint A sends on channel 0 and receives on channel 1; B the reverse.
    const std::size_t cap0 = 1 + gen() % 4, cap1 = 1 + gen() % 4;
    auto clock_a = std::make_shared<UpdateClock>();
    auto clock_b = std::make_shared<UpdateClock>();
    auto ab = make_channel<int>(std::make_shared<InterThreadDuct<int>>(cap0), 0, clock_a, clock_b);
    auto ba = make_channel<int>(std::make_shared<InterThreadDuct<int>>(cap1), 0, clock_b, clock_a);
    ab.inlet.link_touch_counter(ba.outlet.touch_counter());
    ba.inlet.link_touch_counter(ab.outlet.touch_counter());
    std::vector<EndpointProbe> probes(2);
    probes[0].inlet = ab.inlet.probe();
    probes[0].outlet = ab.outlet.probe();
    probes[1].inlet = ba.inlet.probe();
    probes[1].outlet = ba.outlet.probe();

    ReplayChannel rc[2] = {{cap0, {}}, {cap1, {}}};
    std::uint64_t clocks[2] = {0, 0};

    const std::size_t events = 20 + gen() % 300;
    const std::size_t windows = 1 + gen() % 4;
    std::vector<std::size_t> marks(windows * 2);
    for (auto& m : marks) m = gen() % (events + 1);
    std::sort(marks.begin(), marks.end());
    std::vector<std::int64_t> walltimes(marks.size());
    std::int64_t wall = 0;
    for (auto& w : walltimes) w = wall += 1 + static_cast<std::int64_t>(gen() % 2'000'000'000);

    std::vector<SnapshotTranche> tranches;
    std::vector<std::array<ReplayTotals, 2>> oracle_tranches;
    std::size_t next_mark = 0;
    int next_payload = 1;
    const auto take_marks = [&](std::size_t position) {
      while (next_mark < marks.size() && marks[next_mark] == position) {
        tranches.push_back(capture(probes, walltimes[next_mark]));
        std::array<ReplayTotals, 2> t{};
        for (int ch = 0; ch < 2; ++ch) {
          const int sender = ch, receiver = 1 - ch;
          t[ch] = {clocks[sender], clocks[receiver], rc[receiver].receiver_touch, rc[ch].receiver_touch,
                   rc[ch].attempted, rc[ch].successful, rc[ch].pulls, rc[ch].laden, rc[ch].messages};
        }
        oracle_tranches.push_back(t);
        ++next_mark;
      }
    };

    for (std::size_t e = 0; e < events; ++e) {
      take_marks(e);
      const int kind = static_cast<int>(gen() % 4);
      const int side = static_cast<int>(gen() % 2);
      auto& ends = side == 0 ? ab : ba;       // channel this side sends on
      auto& incoming = side == 0 ? ba : ab;   // channel this side receives on
      ReplayChannel& out_model = rc[side];
      ReplayChannel& in_model = rc[1 - side];
      switch (kind) {
        case 0: {
          const int payload = next_payload++;
          ends.inlet.try_put(payload);
          ++out_model.attempted;
          if (out_model.queue.size() < out_model.capacity) {
            ++out_model.successful;
            // The sender bundles its own counter for the peer, kept by its receiving outlet.
            out_model.queue.push_back({payload, in_model.receiver_touch});
          }
          break;
        }
        case 1: {
          incoming.outlet.jump();
          ++in_model.pulls;
          if (!in_model.queue.empty()) {
            ++in_model.laden;
            in_model.messages += in_model.queue.size();
            in_model.receiver_touch = 1 + in_model.queue.back().touch;
            in_model.queue.clear();
          }
          break;
        }
        case 2: {
          incoming.outlet.try_step();
          ++in_model.pulls;
          if (!in_model.queue.empty()) {
            ++in_model.laden;
            ++in_model.messages;
            in_model.receiver_touch = 1 + in_model.queue.front().touch;
            in_model.queue.pop_front();
          }
          break;
        }
        default:
          (side == 0 ? clock_a : clock_b)->tick();
          ++clocks[side];
      }
    }
    take_marks(events);

    std::vector<SnapshotWindow> sw;
    for (std::size_t w = 0; w < windows; ++w) {
      sw.push_back({w, tranches[2 * w], tranches[2 * w + 1]});
    }
    for (const auto& r : evaluate(sw)) {
      const auto& before = oracle_tranches[2 * r.window_index][r.endpoint];
      const auto& after = oracle_tranches[2 * r.window_index + 1][r.endpoint];
      const std::int64_t elapsed = walltimes[2 * r.window_index + 1] - walltimes[2 * r.window_index];
      const auto in = oracle_metrics(after.updates_sender - before.updates_sender,
                                     after.touch_sender - before.touch_sender, elapsed, true,
                                     after.attempted - before.attempted,
                                     after.successful - before.successful, 0);
      const auto out = oracle_metrics(after.updates_receiver - before.updates_receiver,
                                      after.touch_receiver - before.touch_receiver, elapsed, false,
                                      after.messages - before.messages, after.pulls - before.pulls,
                                      after.laden - before.laden);
      for (std::size_t m = 0; m < kMetricCount; ++m) {
        compared += 2;
        mismatches += !same(r.inlet->values[m], in.values[m]);
        mismatches += !same(r.outlet->values[m], out.values[m]);
      }
    }
  }
  return {mismatches == 0 && compared > 0,
          fmt("1000 logs, %zu metric values compared, %zu mismatches", compared, mismatches)};
}

Verdict criterion6() {
  bool ok = delivery_clumpiness(10, 100, 1) == 0.9;
  ok &= delivery_failure_rate(3, 2) == 1.0 / 3.0;
  const auto dir = scratch_dir("c6");
  auto c = parse({"--workers", "2", "--grid-width", "4", "--grid-height", "4", "--duration", "1.2",
                  "--snapshot-interval", "0.2", "--snapshot-window", "0.1", "--summary",
                  (dir / "s.csv").string(), "--qos", (dir / "q.csv").string()});
  const auto record = run_benchmark(c);
  std::size_t checked = 0, broken = 0;
  for (const auto& row : record.qos) {
    for (const auto& rep : {row.inlet, row.outlet}) {
      if (!rep) continue;
      ++checked;
      broken += !same((*rep)[Metric::WalltimeLatency],
                      (*rep)[Metric::SimstepLatency] * (*rep)[Metric::SimstepPeriod]);
    }
  }
  fs::remove_all(dir);
  ok &= broken == 0 && checked > 0;
  return {ok, fmt("clumpiness(1,10,100) = %.17g, failure(3,2) = %.17g, walltime identity held on "
                  "%zu/%zu window reports",
                  delivery_clumpiness(10, 100, 1), delivery_failure_rate(3, 2), checked - broken,
                  checked)};
}

Verdict criterion7() {
  auto clock_a = std::make_shared<UpdateClock>();
  auto clock_b = std::make_shared<UpdateClock>();
  auto ab = make_channel<int>(std::make_shared<InterThreadDuct<int>>(2), 0, clock_a, clock_b);
  auto ba = make_channel<int>(std::make_shared<InterThreadDuct<int>>(2), 0, clock_b, clock_a);
  ab.inlet.link_touch_counter(ba.outlet.touch_counter());
  ba.inlet.link_touch_counter(ab.outlet.touch_counter());

  // One exchange: the ball holder pulls, updates and sends; the other side
  // pulls it in and updates. Both clocks advance once per exchange.
  const auto exchange = [](auto& send, auto& recv_own, auto& recv_peer, auto& clk_s, auto& clk_r) {
    recv_own.outlet.jump();
    clk_s->tick();
    send.inlet.try_put(1);
    recv_peer.outlet.jump();
    clk_r->tick();
  };

  const std::size_t round_trips = 200;
  bool plus_two = true;
  std::uint64_t prev_a = 0, prev_b = 0;
  const auto before_a = ba.outlet.snapshot();
  const auto before_b = ab.outlet.snapshot();
  for (std::size_t i = 0; i < round_trips; ++i) {
    exchange(ab, ba, ab, clock_a, clock_b);  // A -> B
    exchange(ba, ab, ba, clock_b, clock_a);  // B -> A
    const auto ta = ba.outlet.snapshot().touch_count;  // A's counter for B
    const auto tb = ab.outlet.snapshot().touch_count;  // B's counter for A
    if (i > 0) plus_two &= ta == prev_a + 2 && tb == prev_b + 2;
    prev_a = ta;
    prev_b = tb;
  }
  const auto after_a = ba.outlet.snapshot();
  const auto after_b = ab.outlet.snapshot();
  const double lat_a = outlet_report(before_a, after_a, 1'000'000'000)[Metric::SimstepLatency];
  const double lat_b = outlet_report(before_b, after_b, 1'000'000'000)[Metric::SimstepLatency];
  const bool ok = plus_two && std::abs(lat_a - 1.0) <= 0.1 && std::abs(lat_b - 1.0) <= 0.1;
  return {ok, fmt("%zu round trips (%zu exchanges): +2 per round trip on both sides: %s; "
                  "simstep latency A %.4f, B %.4f",
                  round_trips, 2 * round_trips, plus_two ? "yes" : "no", lat_a, lat_b)};
}

Verdict criterion8() {
  auto ends = make_channel<int>(std::make_shared<InterThreadDuct<int>>(2), 0);
  std::vector<PutOutcome> outcomes;
  for (int v : {11, 22, 33}) outcomes.push_back(ends.inlet.try_put(v));
  const auto dropped = std::count(outcomes.begin(), outcomes.end(), PutOutcome::Dropped);
  const bool last_dropped = outcomes.back() == PutOutcome::Dropped;
  const bool first = ends.outlet.try_step().advanced();
  const Message<int> m1 = ends.outlet.last_message();
  const bool second = ends.outlet.try_step().advanced();
  const Message<int> m2 = ends.outlet.last_message();
  const bool third = ends.outlet.try_step().advanced();
  const bool ok = dropped == 1 && last_dropped && first && m1.payload == 11 && second &&
                  m2.payload == 22 && m1.sequence_number < m2.sequence_number && !third;
  return {ok, fmt("%ld dropped (third put), delivered %d then %d, queue then empty: %s",
                  static_cast<long>(dropped), m1.payload, m2.payload, third ? "no" : "yes")};
}

Verdict criterion9() {
  const auto dir = scratch_dir("c9");
  std::string detail;
  bool ok = true;
  for (std::size_t width : {8u, 32u}) {
    const auto file = dir / ("w" + std::to_string(width) + ".csv");
    if (!run_ranks(2, "--locus processes --workers 2 --grid-width " + std::to_string(width) +
                          " --grid-height 4 --mode 3 --duration 60 --max-updates 2000 --summary " +
                          file.string())) {
      return {false, "2-process run failed"};
    }
    const auto rows = read_csv(file);
    if (rows.size() != 2) return {false, "unexpected summary row count"};
    for (const auto& row : rows) {
      const auto updates = std::stoull(row.at("updates"));
      const auto transfers = std::stoull(row.at("wire_transfers"));
      ok &= updates == 2000 && transfers == updates;
      detail += fmt("%s%zu channels/direction worker %s: %llu transfers / %llu updates",
                    detail.empty() ? "" : "; ", 2 * width, row.at("worker_id").c_str(),
                    static_cast<unsigned long long>(transfers), static_cast<unsigned long long>(updates));
    }
  }
  fs::remove_all(dir);
  return {ok, detail};
}

struct Checked {
  std::uint64_t value;
  std::uint64_t check;
};

Verdict criterion10() {
  FaultInjection faults;
  faults.drop_probability = 0.2;
  faults.seed = 10;
  auto hub = std::make_shared<DatagramHub>(Address{"127.0.0.1", 0}, faults);
  const PeerId self = hub->add_peer(hub->local_address());
  Inlet<Checked> in(std::make_shared<DatagramSendDuct<Checked>>(hub, self, 77, 1024));
  auto rx = std::make_shared<DatagramReceiveDuct<Checked>>(hub, 77);
  Outlet<Checked> out(rx, Checked{0, 0});

  constexpr std::uint64_t kSent = 100000;
  std::vector<bool> seen(kSent + 1, false);
  std::uint64_t delivered = 0, corrupted = 0, duplicates = 0;
  const auto drain = [&] {
    while (out.try_step().advanced()) {
      const Checked m = out.last();
      ++delivered;
      if (m.value == 0 || m.value > kSent || m.check != mix64(m.value)) {
        ++corrupted;
        continue;
      }
      if (seen[m.value]) ++duplicates;
      seen[m.value] = true;
    }
  };
  std::uint64_t inlet_drops = 0;
  for (std::uint64_t i = 1; i <= kSent; ++i) {
    inlet_drops += in.try_put(Checked{i, mix64(i)}) == PutOutcome::Dropped;
    if (i % 16 == 0) drain();
  }
  for (int i = 0; i < 50 && hub->wait_readable(20); ++i) drain();
  drain();
  const auto s = hub->stats();
  const std::uint64_t lost = s.injected_drops + inlet_drops;
  const bool ok = corrupted == 0 && duplicates == 0 && delivered + lost == kSent &&
                  s.corrupt_discarded == 0;
  return {ok, fmt("sent %llu, delivered %llu, lost %llu (%.2f%%), corrupted %llu, duplicates %llu",
                  static_cast<unsigned long long>(kSent), static_cast<unsigned long long>(delivered),
                  static_cast<unsigned long long>(lost), 100.0 * lost / kSent,
                  static_cast<unsigned long long>(corrupted),
                  static_cast<unsigned long long>(duplicates))};
}

Verdict criterion11() {
  const auto dir = scratch_dir("c11");
  const std::vector<std::uint64_t> units{0, 4096, 262144};
  std::vector<double> period, clump;
  for (auto u : units) {
    const auto file = dir / ("q" + std::to_string(u) + ".csv");
    if (!run_ranks(2, "--locus processes --workers 2 --grid-width 2 --grid-height 2 --mode 3"
                      " --duration 10 --snapshot-interval 2 --snapshot-window 0.5 --replicates 3"
                      " --compute-units " + std::to_string(u) + " --summary " +
                      (dir / "s.csv").string() + " --qos " + file.string())) {
      return {false, "2-process run failed"};
    }
    std::vector<double> p, c;
    for (const auto& row : read_csv(file)) {
      if (row.at("worker_id") == row.at("target_worker")) continue;
      const double pv = std::stod(row.at("simstep_period_mean"));
      const double cv = std::stod(row.at("delivery_clumpiness_mean"));
      if (!std::isnan(pv)) p.push_back(pv);
      if (!std::isnan(cv)) c.push_back(cv);
    }
    period.push_back(median(p));
    clump.push_back(median(c));
  }
  fs::remove_all(dir);
  const bool increasing = period[0] < period[1] && period[1] < period[2];
  const bool less_clumpy = clump[2] < clump[0];
  return {increasing && less_clumpy,
          fmt("median period %.3g < %.3g < %.3g s: %s; median clumpiness %.3f (0 units) vs %.3f "
              "(262144 units): %s",
              period[0], period[1], period[2], increasing ? "yes" : "no", clump[0], clump[2],
              less_clumpy ? "lower" : "not lower")};
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria{
      {"best-effort throughput under jitter", criterion1},
      {"mode 4 per-worker rate across processes", criterion2},
      {"coloring convergence", criterion3},
      {"best-effort solution quality", criterion4},
      {"QoS oracle equivalence", criterion5},
      {"metric spot values", criterion6},
      {"touch-counter protocol", criterion7},
      {"buffer-drop semantics", criterion8},
      {"pooling consolidation", criterion9},
      {"wire integrity under loss", criterion10},
      {"communication/computation QoS trend", criterion11},
  };
  std::set<std::size_t> selected;
  for (int i = 1; i < argc; ++i) selected.insert(std::stoul(argv[i]));

  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    if (!selected.empty() && !selected.count(i + 1)) continue;
    Verdict v;
    try {
      v = criteria[i].second();
    } catch (const std::exception& e) {
      v = {false, std::string("error: ") + e.what()};
    }
    failed += !v.pass;
    std::printf("%s %2zu %s: %s\n", v.pass ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(),
                v.detail.c_str());
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
