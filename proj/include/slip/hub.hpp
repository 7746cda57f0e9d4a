#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <mutex>
#include <random>
#include <span>
#include <unordered_map>
#include <vector>

#include "slip/socket.hpp"
#include "slip/wire.hpp"

namespace slip {

using PeerId = std::size_t;

// Test hook: datagrams are dropped or bit-flipped after being counted as sent.
struct FaultInjection {
  double drop_probability = 0.0;
  double corrupt_probability = 0.0;
  std::uint64_t seed = 1;
};

enum class Traffic { Data, Control };

struct HubStats {
  std::uint64_t data_sent = 0;
  std::uint64_t control_sent = 0;
  std::uint64_t injected_drops = 0;
  std::uint64_t injected_corruptions = 0;
  std::uint64_t received = 0;
  std::uint64_t corrupt_discarded = 0;
  std::uint64_t unrouted_discarded = 0;
};

// One socket per process. Outbound datagrams go to registered peers; inbound
// datagrams are validated and demultiplexed to sinks by channel id.
//
// Sinks run inside pump() with the hub's routing lock held and must not call
// register_sink/unregister_sink/pump themselves.
class DatagramHub {
 public:
  using Sink = std::function<void(const wire::PacketView&)>;

  explicit DatagramHub(const Address& bind, FaultInjection faults = {});

  Address local_address() const { return socket_.local_address(); }

  PeerId add_peer(const Address& address);
  std::size_t peer_count() const;

  // False when the kernel send buffer is full; nothing was sent.
  bool send(PeerId peer, std::span<const std::byte> bytes, Traffic traffic = Traffic::Data);

  void register_sink(std::uint64_t channel_id, Sink sink);
  void unregister_sink(std::uint64_t channel_id);

  // Ingests every datagram currently readable. Returns how many were read.
  std::size_t pump();
  bool wait_readable(int timeout_ms) { return socket_.wait_readable(timeout_ms); }

  HubStats stats() const;
  std::uint64_t data_sent_to(PeerId peer) const;

 private:
  UdpSocket socket_;
  FaultInjection faults_;

  mutable std::mutex send_mu_;
  std::vector<SocketAddress> peers_;
  std::vector<std::uint64_t> data_sent_per_peer_;
  std::mt19937_64 fault_rng_;
  HubStats send_stats_;

  mutable std::mutex route_mu_;
  std::unordered_map<std::uint64_t, Sink> sinks_;
  std::vector<std::byte> receive_buffer_;
  HubStats receive_stats_;
};

}  // namespace slip
