#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "slip/channel.hpp"
#include "slip/consolidation.hpp"
#include "slip/hub.hpp"
#include "slip/inter_process.hpp"
#include "slip/topology.hpp"

namespace slip {

enum class DuctKind { IntraThread, InterThread, InterProcess };

struct ChannelKey {
  NodeId source = 0;
  Direction direction = Direction::Left;

  friend bool operator==(const ChannelKey&, const ChannelKey&) = default;
};

// How to reach other processes. Peer ids index the hub's peer table.
struct NetworkWiring {
  std::shared_ptr<DatagramHub> hub;
  std::vector<PeerId> peer_of_process;
  std::size_t local_process = 0;
  // Distinguishes channel ids between successive runs on the same sockets.
  std::uint32_t run_tag = 0;
  bool pooled = true;
  std::size_t max_payload = wire::kMaxPayload;
  std::size_t reorder_window = kDefaultReorderWindow;
};

template <typename T>
struct DuctConfig {
  std::size_t buffer_capacity = 2;
  T initial_value{};
  std::optional<NetworkWiring> network;
};

inline std::uint64_t channel_id_for(std::uint32_t run_tag, ChannelKey key) {
  return (static_cast<std::uint64_t>(run_tag & 0x7fffff) << 40) |
         (static_cast<std::uint64_t>(key.source) << 2) | static_cast<std::uint64_t>(key.direction);
}

inline std::uint64_t pool_id_for(std::uint32_t run_tag, WorkerId from, WorkerId to,
                                 std::size_t part) {
  return (1ull << 63) | (static_cast<std::uint64_t>(run_tag & 0x7fffff) << 40) |
         (static_cast<std::uint64_t>(from & 0xffff) << 24) |
         (static_cast<std::uint64_t>(to & 0xffff) << 8) | (part & 0xff);
}

// Every directed edge of the topology mapped to its endpoints. Construction is
// single-threaded; afterwards the set of channels is fixed and each worker
// mutates only the endpoints it owns.
template <typename T>
class ChannelRegistry {
 public:
  struct Entry {
    ChannelKey key;
    NodeId target = 0;
    WorkerId source_worker = 0;
    WorkerId target_worker = 0;
    DuctKind kind = DuctKind::IntraThread;
    std::optional<Inlet<T>> inlet;
    std::optional<Outlet<T>> outlet;
    std::optional<std::size_t> pool;  // index into pools() when pooled
  };

  struct PoolGroup {
    WorkerId from = 0;
    WorkerId to = 0;
    std::vector<ChannelKey> members;
    std::shared_ptr<ChannelPool<T>> sender;              // set when `from` is local
    std::shared_ptr<ConsolidatedReceiver<T>> receiver;   // set when `to` is local
  };

  ChannelRegistry(const TorusTopology& topology, const PartitionAssignment& assignment)
      : topology_(topology), entries_(topology.node_count() * 4), clocks_(assignment.worker_count()) {
    for (auto& c : clocks_) c = std::make_shared<UpdateClock>();
  }

  const TorusTopology& topology() const noexcept { return topology_; }

  Entry& entry(ChannelKey key) { return entries_.at(index(key)); }
  const Entry& entry(ChannelKey key) const { return entries_.at(index(key)); }
  const std::vector<Entry>& entries() const noexcept { return entries_; }
  std::vector<Entry>& entries() noexcept { return entries_; }

  // Inlet at `source` sending toward its neighbor in direction `d`.
  Inlet<T>& inlet(NodeId source, Direction d) { return entry({source, d}).inlet.value(); }
  // Outlet at `target` receiving from its neighbor in direction `from`.
  Outlet<T>& outlet_into(NodeId target, Direction from) {
    return entry({topology_.neighbor(target, from), opposite(from)}).outlet.value();
  }
  bool has_inlet(NodeId source, Direction d) const { return entry({source, d}).inlet.has_value(); }
  bool has_outlet_into(NodeId target, Direction from) const {
    return entry({topology_.neighbor(target, from), opposite(from)}).outlet.has_value();
  }

  std::vector<PoolGroup>& pools() noexcept { return pools_; }
  const std::vector<PoolGroup>& pools() const noexcept { return pools_; }

  // Flushes every pool whose sending worker is `worker`. Returns transfers sent.
  std::size_t flush_pools(WorkerId worker) {
    std::size_t sent = 0;
    for (auto& g : pools_) {
      if (g.from == worker && g.sender &&
          g.sender->try_flush().kind == FlushOutcome::Kind::Flushed) {
        ++sent;
      }
    }
    return sent;
  }

  std::uint64_t wire_transfers(WorkerId worker) const {
    std::uint64_t n = 0;
    for (const auto& g : pools_) {
      if (g.from == worker && g.sender) n += g.sender->wire_transfers();
    }
    return n;
  }

  std::size_t count(DuctKind kind) const {
    std::size_t n = 0;
    for (const auto& e : entries_) n += e.kind == kind;
    return n;
  }

  const std::shared_ptr<UpdateClock>& clock(WorkerId w) const { return clocks_.at(w); }

 private:
  std::size_t index(ChannelKey key) const {
    return key.source * 4 + static_cast<std::size_t>(key.direction);
  }

  TorusTopology topology_;
  std::vector<Entry> entries_;
  std::vector<std::shared_ptr<UpdateClock>> clocks_;
  std::vector<PoolGroup> pools_;
};

// Creates one inlet at the source worker and one outlet at the destination
// worker for every directed edge, choosing the duct by locus relation. In a
// multi-process layout only endpoints local to this process are created, and
// inter-process edges are pooled per ordered worker pair (split into several
// pools if one frame would exceed the datagram cap).
template <typename T>
ChannelRegistry<T> instantiate_channels(const TorusTopology& topology,
                                        const PartitionAssignment& assignment,
                                        const DuctConfig<T>& config) {
  if (assignment.owner.size() != topology.node_count()) {
    throw std::invalid_argument("assignment does not match topology");
  }
  ChannelRegistry<T> reg(topology, assignment);
  const std::size_t local_process = config.network ? config.network->local_process : 0;
  const auto is_local = [&](WorkerId w) { return assignment.loci[w].process == local_process; };

  // Pass 1: classify edges; in-memory ducts are wired immediately.
  std::map<std::pair<WorkerId, WorkerId>, std::vector<ChannelKey>> remote_edges;
  for (NodeId n = 0; n < topology.node_count(); ++n) {
    for (Direction d : kDirections) {
      auto& e = reg.entry({n, d});
      e.key = {n, d};
      e.target = topology.neighbor(n, d);
      e.source_worker = assignment.owner[n];
      e.target_worker = assignment.owner[e.target];
      const WorkerLocus& src = assignment.loci[e.source_worker];
      const WorkerLocus& dst = assignment.loci[e.target_worker];
      if (src.process != dst.process) {
        e.kind = DuctKind::InterProcess;
        if (is_local(e.source_worker) || is_local(e.target_worker)) {
          remote_edges[{e.source_worker, e.target_worker}].push_back(e.key);
        }
        continue;
      }
      if (!is_local(e.source_worker)) continue;
      std::shared_ptr<LocalDuct<T>> duct;
      if (e.source_worker == e.target_worker) {
        e.kind = DuctKind::IntraThread;
        duct = std::make_shared<IntraThreadDuct<T>>(config.buffer_capacity);
      } else {
        e.kind = DuctKind::InterThread;
        duct = std::make_shared<InterThreadDuct<T>>(config.buffer_capacity);
      }
      e.inlet.emplace(duct, reg.clock(e.source_worker));
      e.outlet.emplace(duct, config.initial_value, reg.clock(e.target_worker));
    }
  }

  // Pass 2: inter-process edges.
  if (!remote_edges.empty()) {
    if (!config.network) throw AddressUnreachable("inter-process edges need network wiring");
    const NetworkWiring& net = *config.network;
    for (auto& [pair, keys] : remote_edges) {
      const auto [from, to] = pair;
      const PeerId peer_out = net.peer_of_process.at(assignment.loci[to].process);
      if (!net.pooled) {
        for (ChannelKey key : keys) {
          auto& e = reg.entry(key);
          const std::uint64_t id = channel_id_for(net.run_tag, key);
          if (is_local(from)) {
            e.inlet.emplace(std::make_shared<DatagramSendDuct<T>>(net.hub, peer_out, id,
                                                                  config.buffer_capacity,
                                                                  net.max_payload),
                            reg.clock(from));
          }
          if (is_local(to)) {
            e.outlet.emplace(std::make_shared<DatagramReceiveDuct<T>>(net.hub, id, net.reorder_window),
                             config.initial_value, reg.clock(to));
          }
        }
        continue;
      }
      if constexpr (FixedSizePayload<T>) {
        const std::size_t per_pool = ChannelPool<T>::max_members(net.max_payload);
        if (per_pool == 0) throw PayloadTooLarge("payload too large for pooling");
        for (std::size_t start = 0, part = 0; start < keys.size(); start += per_pool, ++part) {
          typename ChannelRegistry<T>::PoolGroup g;
          g.from = from;
          g.to = to;
          g.members.assign(keys.begin() + start,
                           keys.begin() + std::min(keys.size(), start + per_pool));
          const std::uint64_t id = pool_id_for(net.run_tag, from, to, part);
          if (is_local(from)) {
            g.sender = std::make_shared<ChannelPool<T>>(net.hub, peer_out, id, g.members.size(),
                                                        config.buffer_capacity, net.max_payload);
          }
          if (is_local(to)) {
            g.receiver = std::make_shared<ConsolidatedReceiver<T>>(
                net.hub, id, g.members.size(), config.buffer_capacity, net.reorder_window);
          }
          const std::size_t pool_index = reg.pools().size();
          for (std::size_t m = 0; m < g.members.size(); ++m) {
            auto& e = reg.entry(g.members[m]);
            e.pool = pool_index;
            if (g.sender) e.inlet.emplace(g.sender->member_duct(m), reg.clock(from));
            if (g.receiver) {
              e.outlet.emplace(g.receiver->member_duct(m), config.initial_value, reg.clock(to));
            }
          }
          reg.pools().push_back(std::move(g));
        }
      } else {
        throw std::invalid_argument("pooling requires a fixed-size payload type");
      }
    }
  }

  // Pass 3: each inlet bundles the touch count of the reciprocal outlet.
  for (NodeId n = 0; n < topology.node_count(); ++n) {
    for (Direction d : kDirections) {
      auto& e = reg.entry({n, d});
      if (e.inlet && reg.has_outlet_into(n, d)) {
        e.inlet->link_touch_counter(reg.outlet_into(n, d).touch_counter());
      }
    }
  }
  return reg;
}

}  // namespace slip
