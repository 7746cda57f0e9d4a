#include "slip/bench.hpp"

#include <json.hpp>

#include <exception>
#include <map>
#include <thread>

#include "slip/errors.hpp"
#include "slip/registry.hpp"
#include "slip/sync.hpp"

namespace slip {

using nlohmann::json;

QosReport QosRow::mean() const {
  if (inlet && outlet) return mean_report(*inlet, *outlet);
  if (inlet) return *inlet;
  if (outlet) return *outlet;
  QosReport r;
  r.values.fill(std::numeric_limits<double>::quiet_NaN());
  return r;
}

std::uint64_t replicate_seed(std::uint64_t master, std::size_t replicate) {
  return derive_seed(master, 0x5e ^ (static_cast<std::uint64_t>(replicate) << 8));
}

namespace {

using SteadyClock = std::chrono::steady_clock;
using SystemClock = std::chrono::system_clock;

SteadyClock::time_point to_steady(SystemClock::time_point t) {
  return SteadyClock::now() +
         std::chrono::duration_cast<SteadyClock::duration>(t - SystemClock::now());
}

std::chrono::nanoseconds seconds(double s) {
  return std::chrono::nanoseconds(static_cast<std::int64_t>(s * 1e9));
}

ColoringWorkerOptions worker_options(const RunConfig& c, std::uint64_t seed, WorkerId w) {
  ColoringWorkerOptions o;
  o.params = c.coloring;
  o.seed = seed;
  o.compute_work_units = c.compute_work_units;
  o.read = c.read;
  for (auto j : c.jitter_workers) {
    if (j == w) o.jitter = std::chrono::nanoseconds(static_cast<std::int64_t>(c.jitter_ms * 1e6));
  }
  return o;
}

std::uint64_t initial_conflicts(const TorusTopology& topo, const ColoringParams& params,
                                std::uint64_t seed) {
  std::vector<Color> colors(topo.node_count());
  for (NodeId n = 0; n < colors.size(); ++n) colors[n] = init_node(params, seed, n).current_color;
  return count_conflicts(topo, colors);
}

std::vector<EndpointProbe> local_probes(const ChannelRegistry<Color>& reg) {
  std::vector<EndpointProbe> probes;
  for (const auto& e : reg.entries()) {
    if (!e.inlet && !e.outlet) continue;
    EndpointProbe p;
    p.source_node = e.key.source;
    p.direction = static_cast<int>(e.key.direction);
    p.source_worker = e.source_worker;
    p.target_worker = e.target_worker;
    if (e.inlet) p.inlet = e.inlet->probe();
    if (e.outlet) p.outlet = e.outlet->probe();
    probes.push_back(std::move(p));
  }
  return probes;
}

std::vector<QosRow> qos_rows_from(std::size_t replicate, const std::vector<EndpointProbe>& probes,
                                  const std::vector<SnapshotWindow>& windows) {
  std::vector<QosRow> rows;
  for (const auto& r : evaluate(windows)) {
    const auto& p = probes.at(r.endpoint);
    QosRow row;
    row.replicate = replicate;
    row.window_index = r.window_index;
    row.source_node = p.source_node;
    row.direction = p.direction;
    row.source_worker = p.source_worker;
    row.target_worker = p.target_worker;
    row.inlet = r.inlet;
    row.outlet = r.outlet;
    rows.push_back(row);
  }
  return rows;
}

std::unique_ptr<SnapshotObserver> start_observer(const RunConfig& c,
                                                 const ChannelRegistry<Color>& reg,
                                                 SystemClock::time_point epoch) {
  if (!c.snapshots_enabled()) return nullptr;
  return std::make_unique<SnapshotObserver>(local_probes(reg), to_steady(epoch),
                   snapshot_schedule(seconds(c.duration_seconds),
                                     seconds(c.snapshot_interval_seconds),
                                     seconds(c.snapshot_window_seconds)),
                   seconds(c.snapshot_window_seconds));
}

std::size_t window_count(const std::vector<QosRow>& rows) {
  std::size_t n = 0;
  for (const auto& r : rows) n = std::max(n, r.window_index + 1);
  return n;
}

RunWindow run_window(const RunConfig& c, SystemClock::time_point epoch) {
  RunWindow w;
  w.epoch = epoch;
  w.duration = seconds(c.duration_seconds);
  w.max_updates = c.max_updates;
  return w;
}

void run_threads_replicate(const RunConfig& c, std::size_t replicate, RunRecord& out) {
  const std::uint64_t seed = replicate_seed(c.seed, replicate);
  const TorusTopology topo = build_torus(c.grid_width, c.grid_height);
  require_simple_topology(topo);
  const PartitionAssignment assignment = partition_block(topo, c.workers);
  DuctConfig<Color> ducts;
  ducts.buffer_capacity = c.buffer_capacity;
  auto reg = instantiate_channels<Color>(topo, assignment, ducts);

  std::vector<std::unique_ptr<ColoringWorker>> workers;
  for (WorkerId w = 0; w < c.workers; ++w) {
    workers.push_back(std::make_unique<ColoringWorker>(reg, w, worker_options(c, seed, w)));
  }
  for (auto& w : workers) w->prime();

  ThreadBarrier barrier(c.workers);
  const auto epoch = SystemClock::now() + std::chrono::milliseconds(20);
  auto observer = start_observer(c, reg, epoch);
  const RunWindow window = run_window(c, epoch);

  std::vector<WorkerRecord> records(c.workers);
  std::vector<std::thread> threads;
  try {
    for (WorkerId w = 0; w < c.workers; ++w) {
      threads.emplace_back([&, w] { records[w] = run_worker(c.mode, *workers[w], barrier, window); });
    }
  } catch (const std::system_error& e) {
    barrier.abandon();
    for (auto& t : threads) t.join();
    throw LaunchError(std::string("cannot start worker thread: ") + e.what());
  }
  for (auto& t : threads) t.join();

  std::vector<QosRow> qos;
  if (observer) {
    const auto probes = observer->probes();
    qos = qos_rows_from(replicate, probes, observer->finish());
  }

  std::vector<Color> colors(topo.node_count());
  for (const auto& w : workers) {
    const auto nodes = w->nodes();
    const auto cs = w->colors();
    for (std::size_t i = 0; i < nodes.size(); ++i) colors[nodes[i]] = cs[i];
  }
  const std::uint64_t conflicts = count_conflicts(topo, colors);
  const std::uint64_t initial = initial_conflicts(topo, c.coloring, seed);
  const std::size_t windows = window_count(qos);

  for (WorkerId w = 0; w < c.workers; ++w) {
    WorkerRow row;
    row.replicate = replicate;
    row.seed = seed;
    row.worker_id = w;
    row.node_count = assignment.members[w].size();
    row.record = records[w];
    row.initial_conflicts = initial;
    row.final_conflicts = conflicts;
    row.qos_windows = windows;
    out.workers.push_back(row);
  }
  out.qos.insert(out.qos.end(), qos.begin(), qos.end());
}

// ---------------------------------------------------------------------------
// Process locus

json report_to_json(const std::optional<QosReport>& r) {
  if (!r) return nullptr;
  return json(r->values);
}

std::optional<QosReport> report_from_json(const json& j) {
  if (j.is_null()) return std::nullopt;
  QosReport r;
  for (std::size_t m = 0; m < kMetricCount; ++m) {
    r.values[m] = j.at(m).is_null() ? std::numeric_limits<double>::quiet_NaN() : j.at(m).get<double>();
  }
  return r;
}

struct ProcessContext {
  std::shared_ptr<DatagramHub> hub;
  std::vector<PeerId> peer_ids;
  std::unique_ptr<ProcessGroup> group;

  std::uint64_t data_sent_to_others(std::size_t rank) const {
    std::uint64_t n = 0;
    for (std::size_t r = 0; r < peer_ids.size(); ++r) {
      if (r != rank) n += hub->data_sent_to(peer_ids[r]);
    }
    return n;
  }
};

ProcessContext connect(const RunConfig& c) {
  ProcessContext ctx;
  FaultInjection faults;
  faults.drop_probability = c.fault_drop_probability;
  faults.seed = derive_seed(c.seed, 0xfa017 + c.rank);
  try {
    ctx.hub = std::make_shared<DatagramHub>(c.peers.at(c.rank), faults);
    for (const auto& p : c.peers) ctx.peer_ids.push_back(ctx.hub->add_peer(p));
  } catch (const TransportError& e) {
    throw LaunchError(std::string("cannot open rank socket: ") + e.what());
  }
  ProcessGroupOptions options;
  options.timeout = std::chrono::seconds(60);
  ctx.group = std::make_unique<ProcessGroup>(ctx.hub, c.rank, ctx.peer_ids, options);
  return ctx;
}

void run_process_replicate(const RunConfig& c, std::size_t replicate, ProcessContext& ctx,
                           RunRecord& out) {
  const std::uint64_t seed = replicate_seed(c.seed, replicate);
  const TorusTopology topo = build_torus(c.grid_width, c.grid_height);
  require_simple_topology(topo);
  PartitionAssignment assignment = partition_block(topo, c.workers);
  assign_one_process_per_worker(assignment);

  DuctConfig<Color> ducts;
  ducts.buffer_capacity = c.buffer_capacity;
  NetworkWiring net;
  net.hub = ctx.hub;
  net.peer_of_process = ctx.peer_ids;
  net.local_process = c.rank;
  net.run_tag = static_cast<std::uint32_t>(replicate + 1);
  net.pooled = c.pooled;
  ducts.network = net;
  auto reg = instantiate_channels<Color>(topo, assignment, ducts);
  ColoringWorker worker(reg, c.rank, worker_options(c, seed, c.rank));

  ProcessGroup& group = *ctx.group;
  // Every rank has its receivers registered past this point.
  group.sync(0, Reduction::Max);
  worker.prime();
  const std::uint64_t proposed =
      c.rank == 0 ? static_cast<std::uint64_t>(std::chrono::duration_cast<std::chrono::nanoseconds>(
                                                    (SystemClock::now() + std::chrono::milliseconds(300))
                                                        .time_since_epoch())
                                                    .count())
                  : 0;
  const auto epoch = SystemClock::time_point(std::chrono::duration_cast<SystemClock::duration>(
      std::chrono::nanoseconds(group.sync(proposed, Reduction::Max))));

  auto observer = start_observer(c, reg, epoch);
  const std::uint64_t sent_before = ctx.data_sent_to_others(c.rank);
  const WorkerRecord record = run_worker(c.mode, worker, group, run_window(c, epoch));
  const std::uint64_t sent_after = ctx.data_sent_to_others(c.rank);
  if (!record.error.empty()) {
    throw TransportError("rank " + std::to_string(c.rank) + " aborted: " + record.error);
  }

  std::vector<QosRow> qos;
  if (observer) {
    const auto probes = observer->probes();
    qos = qos_rows_from(replicate, probes, observer->finish());
  }

  json blob;
  blob["updates"] = record.updates;
  blob["wall_seconds"] = record.wall_seconds;
  blob["barriers"] = record.barriers;
  blob["wire_transfers"] = sent_after - sent_before;
  blob["nodes"] = worker.nodes();
  blob["colors"] = worker.colors();
  json rows = json::array();
  for (const auto& q : qos) {
    rows.push_back({q.window_index, q.source_node, q.direction, q.source_worker, q.target_worker,
                    report_to_json(q.inlet), report_to_json(q.outlet)});
  }
  blob["qos"] = std::move(rows);
  const auto packed = json::to_msgpack(blob);
  const auto bytes = std::as_bytes(std::span(packed));
  const auto gathered = group.gather(bytes);

  std::uint64_t conflicts = 0;
  if (c.rank == 0) {
    std::vector<Color> colors(topo.node_count());
    std::vector<json> parts;
    for (const auto& g : gathered) {
      const auto* begin = reinterpret_cast<const std::uint8_t*>(g.data());
      parts.push_back(json::from_msgpack(begin, begin + g.size()));
    }
    for (const auto& p : parts) {
      const auto nodes = p.at("nodes").get<std::vector<NodeId>>();
      const auto cs = p.at("colors").get<std::vector<Color>>();
      for (std::size_t i = 0; i < nodes.size(); ++i) colors.at(nodes[i]) = cs.at(i);
    }
    conflicts = count_conflicts(topo, colors);

    // Inlet and outlet of an inter-process channel were observed by different
    // ranks; join their halves per window.
    std::map<std::tuple<std::size_t, std::uint64_t, int>, QosRow> merged;
    for (const auto& p : parts) {
      for (const auto& r : p.at("qos")) {
        const auto key = std::make_tuple(r.at(0).get<std::size_t>(), r.at(1).get<std::uint64_t>(),
                                         r.at(2).get<int>());
        QosRow& row = merged[key];
        row.replicate = replicate;
        row.window_index = std::get<0>(key);
        row.source_node = std::get<1>(key);
        row.direction = std::get<2>(key);
        row.source_worker = r.at(3).get<std::size_t>();
        row.target_worker = r.at(4).get<std::size_t>();
        if (auto in = report_from_json(r.at(5))) row.inlet = in;
        if (auto o = report_from_json(r.at(6))) row.outlet = o;
      }
    }
    std::vector<QosRow> all;
    for (auto& [key, row] : merged) all.push_back(row);
    const std::size_t windows = window_count(all);
    const std::uint64_t initial = initial_conflicts(topo, c.coloring, seed);
    for (std::size_t r = 0; r < parts.size(); ++r) {
      const auto& p = parts[r];
      WorkerRow row;
      row.replicate = replicate;
      row.seed = seed;
      row.worker_id = r;
      row.node_count = assignment.members[r].size();
      row.record.updates = p.at("updates").get<std::uint64_t>();
      row.record.wall_seconds = p.at("wall_seconds").get<double>();
      row.record.barriers = p.at("barriers").get<std::uint64_t>();
      row.wire_transfers = p.at("wire_transfers").get<std::uint64_t>();
      row.initial_conflicts = initial;
      row.final_conflicts = conflicts;
      row.qos_windows = windows;
      out.workers.push_back(row);
    }
    out.qos.insert(out.qos.end(), all.begin(), all.end());
  }
  // Releases the other ranks only once the root has everything.
  group.sync(conflicts, Reduction::Max);
}

}  // namespace

RunRecord run_benchmark(const RunConfig& config) {
  validate(config);
  RunRecord out;
  out.config = config;
  out.root = config.is_root();
  if (config.locus == Locus::Threads) {
    for (std::size_t r = 0; r < config.replicates; ++r) run_threads_replicate(config, r, out);
    return out;
  }
  ProcessContext ctx = connect(config);
  for (std::size_t r = 0; r < config.replicates; ++r) run_process_replicate(config, r, ctx, out);
  ctx.group->finish();
  return out;
}

}  // namespace slip
