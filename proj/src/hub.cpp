#include "slip/hub.hpp"

#include <stdexcept>

namespace slip {

DatagramHub::DatagramHub(const Address& bind, FaultInjection faults)
    : socket_(bind), faults_(faults), fault_rng_(faults.seed), receive_buffer_(1 << 16) {}

PeerId DatagramHub::add_peer(const Address& address) {
  const SocketAddress resolved = SocketAddress::resolve(address);
  std::lock_guard lock(send_mu_);
  peers_.push_back(resolved);
  data_sent_per_peer_.push_back(0);
  return peers_.size() - 1;
}

std::size_t DatagramHub::peer_count() const {
  std::lock_guard lock(send_mu_);
  return peers_.size();
}

bool DatagramHub::send(PeerId peer, std::span<const std::byte> bytes, Traffic traffic) {
  std::lock_guard lock(send_mu_);
  if (peer >= peers_.size()) throw std::out_of_range("unknown peer");

  const bool injecting = faults_.drop_probability > 0.0 || faults_.corrupt_probability > 0.0;
  std::vector<std::byte> corrupted;
  std::span<const std::byte> wire_bytes = bytes;
  bool drop = false;
  if (injecting) {
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    drop = unit(fault_rng_) < faults_.drop_probability;
    if (!drop && unit(fault_rng_) < faults_.corrupt_probability && !bytes.empty()) {
      corrupted.assign(bytes.begin(), bytes.end());
      std::uniform_int_distribution<std::size_t> pick(0, corrupted.size() * 8 - 1);
      const std::size_t bit = pick(fault_rng_);
      corrupted[bit / 8] ^= std::byte{static_cast<unsigned char>(1u << (bit % 8))};
      wire_bytes = corrupted;
      ++send_stats_.injected_corruptions;
    }
  }

  if (drop) {
    ++send_stats_.injected_drops;
  } else if (socket_.send_to(peers_[peer], wire_bytes) == SendStatus::WouldBlock) {
    return false;
  }

  if (traffic == Traffic::Data) {
    ++send_stats_.data_sent;
    ++data_sent_per_peer_[peer];
  } else {
    ++send_stats_.control_sent;
  }
  return true;
}

void DatagramHub::register_sink(std::uint64_t channel_id, Sink sink) {
  std::lock_guard lock(route_mu_);
  sinks_[channel_id] = std::move(sink);
}

void DatagramHub::unregister_sink(std::uint64_t channel_id) {
  std::lock_guard lock(route_mu_);
  sinks_.erase(channel_id);
}

std::size_t DatagramHub::pump() {
  std::lock_guard lock(route_mu_);
  std::size_t count = 0;
  while (auto n = socket_.receive(receive_buffer_)) {
    ++count;
    ++receive_stats_.received;
    const auto packet = wire::decode_packet(std::span<const std::byte>(receive_buffer_).first(*n));
    if (!packet) {
      ++receive_stats_.corrupt_discarded;
      continue;
    }
    const auto it = sinks_.find(packet->channel_id);
    if (it == sinks_.end()) {
      ++receive_stats_.unrouted_discarded;
      continue;
    }
    it->second(*packet);
  }
  return count;
}

HubStats DatagramHub::stats() const {
  HubStats out;
  {
    std::lock_guard lock(send_mu_);
    out = send_stats_;
  }
  std::lock_guard lock(route_mu_);
  out.received = receive_stats_.received;
  out.corrupt_discarded = receive_stats_.corrupt_discarded;
  out.unrouted_discarded = receive_stats_.unrouted_discarded;
  return out;
}

std::uint64_t DatagramHub::data_sent_to(PeerId peer) const {
  std::lock_guard lock(send_mu_);
  return data_sent_per_peer_.at(peer);
}

}  // namespace slip
