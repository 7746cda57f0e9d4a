#pragma once

#include <cstddef>
#include <cstdint>
#include <deque>
#include <memory>
#include <mutex>
#include <vector>

#include "slip/duct.hpp"
#include "slip/hub.hpp"
#include "slip/reorder_window.hpp"
#include "slip/wire.hpp"

namespace slip {

inline constexpr std::size_t kDefaultReorderWindow = 64;

// Bounded local send buffer in front of the hub. Encoded datagrams wait here
// while the kernel refuses them; a full outbox refuses new ones.
class DatagramOutbox {
 public:
  DatagramOutbox(std::shared_ptr<DatagramHub> hub, PeerId peer, std::size_t capacity)
      : hub_(std::move(hub)), peer_(peer), capacity_(capacity) {}

  bool offer(std::vector<std::byte> datagram) {
    flush();
    if (backlog_.size() >= capacity_) return false;
    backlog_.push_back(std::move(datagram));
    flush();
    return true;
  }

  void flush() {
    while (!backlog_.empty() && hub_->send(peer_, backlog_.front())) {
      backlog_.pop_front();
      ++dispatched_;
    }
  }

  std::size_t capacity() const noexcept { return capacity_; }
  std::size_t backlog() const noexcept { return backlog_.size(); }
  std::uint64_t dispatched() const noexcept { return dispatched_; }
  const std::shared_ptr<DatagramHub>& hub() const noexcept { return hub_; }

 private:
  std::shared_ptr<DatagramHub> hub_;
  PeerId peer_;
  std::size_t capacity_;
  std::deque<std::vector<std::byte>> backlog_;
  std::uint64_t dispatched_ = 0;
};

// Sending half of an inter-process channel: one datagram per message.
template <typename T>
class DatagramSendDuct final : public SendDuct<T> {
 public:
  DatagramSendDuct(std::shared_ptr<DatagramHub> hub, PeerId peer, std::uint64_t channel_id,
                   std::size_t capacity, std::size_t max_payload = wire::kMaxPayload)
      : outbox_(std::move(hub), peer, capacity), channel_id_(channel_id), max_payload_(max_payload) {}

  EnqueueResult enqueue(const Message<T>& msg) override {
    auto bytes = wire::encode_message(msg, channel_id_, max_payload_);
    return outbox_.offer(std::move(bytes)) ? EnqueueResult::Accepted : EnqueueResult::Full;
  }

  std::size_t capacity() const noexcept override { return outbox_.capacity(); }
  std::uint64_t channel_id() const noexcept { return channel_id_; }
  const DatagramOutbox& outbox() const noexcept { return outbox_; }

 private:
  DatagramOutbox outbox_;
  std::uint64_t channel_id_;
  std::size_t max_payload_;
};

// Receiving half of an inter-process channel. Datagrams are held in a reorder
// window so a drain yields them in sequence order, each at most once.
template <typename T>
class DatagramReceiveDuct final : public ReceiveDuct<T> {
 public:
  DatagramReceiveDuct(std::shared_ptr<DatagramHub> hub, std::uint64_t channel_id,
                      std::size_t window = kDefaultReorderWindow)
      : hub_(std::move(hub)), channel_id_(channel_id), window_(window) {
    hub_->register_sink(channel_id_, [this](const wire::PacketView& p) { ingest(p); });
  }

  ~DatagramReceiveDuct() override { hub_->unregister_sink(channel_id_); }

  DatagramReceiveDuct(const DatagramReceiveDuct&) = delete;
  DatagramReceiveDuct& operator=(const DatagramReceiveDuct&) = delete;

  std::size_t drain(std::vector<Message<T>>& out, std::size_t max) override {
    hub_->pump();
    std::lock_guard lock(mu_);
    return window_.release(max, [&](SequenceNumber, Message<T>&& m) { out.push_back(std::move(m)); });
  }

  WindowStats window_stats() const {
    std::lock_guard lock(mu_);
    return window_.stats();
  }
  std::uint64_t undecodable() const {
    std::lock_guard lock(mu_);
    return undecodable_;
  }
  std::uint64_t channel_id() const noexcept { return channel_id_; }

 private:
  void ingest(const wire::PacketView& packet) {
    auto msg = wire::decode_message<T>(packet);
    std::lock_guard lock(mu_);
    if (!msg) {
      ++undecodable_;
      return;
    }
    const SequenceNumber seq = msg->sequence_number;
    window_.ingest(seq, std::move(*msg));
  }

  std::shared_ptr<DatagramHub> hub_;
  std::uint64_t channel_id_;
  mutable std::mutex mu_;
  ReorderWindow<Message<T>> window_;
  std::uint64_t undecodable_ = 0;
};

}  // namespace slip
