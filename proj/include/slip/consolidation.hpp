#pragma once

#include <cstddef>
#include <cstdint>
#include <deque>
#include <memory>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "slip/codec.hpp"
#include "slip/counters.hpp"
#include "slip/duct.hpp"
#include "slip/inter_process.hpp"
#include "slip/wire.hpp"

namespace slip {

enum class OfferOutcome { Staged, Replaced };

struct FlushOutcome {
  enum class Kind { Flushed, Incomplete, Dropped };
  Kind kind = Kind::Incomplete;
  std::size_t missing = 0;
};

struct AggregateFlushOutcome {
  std::size_t frames = 0;
  std::size_t messages = 0;
  std::size_t dropped_frames = 0;
};

// Joins exactly one message per member channel into one fixed-size datagram
// per flush. Slot order is fixed at construction and shared with the receiver.
template <FixedSizePayload T>
class ChannelPool : public std::enable_shared_from_this<ChannelPool<T>> {
 public:
  static constexpr std::size_t kSlotSize = wire::kPooledSlotOverhead + PayloadCodec<T>::kFixedSize;

  static std::size_t max_members(std::size_t max_payload = wire::kMaxPayload) {
    return max_payload / kSlotSize;
  }

  ChannelPool(std::shared_ptr<DatagramHub> hub, PeerId peer, std::uint64_t pool_id,
              std::size_t member_count, std::size_t capacity,
              std::size_t max_payload = wire::kMaxPayload)
      : outbox_(std::move(hub), peer, capacity),
        pool_id_(pool_id),
        max_payload_(max_payload),
        slots_(member_count),
        counters_(member_count) {
    if (member_count == 0) throw std::invalid_argument("pool needs at least one member");
    if (member_count * kSlotSize > max_payload) {
      throw PayloadTooLarge("pool of " + std::to_string(member_count) + " members needs " +
                            std::to_string(member_count * kSlotSize) + " bytes per frame");
    }
  }

  std::shared_ptr<SendDuct<T>> member_duct(std::size_t index);

  OfferOutcome offer(std::size_t index, const Message<T>& msg) {
    auto& slot = slots_.at(index);
    const bool replaced = slot.has_value();
    // The superseded message never reaches the wire.
    if (replaced && counters_[index]) counters_[index]->record(false);
    if (!replaced) ++staged_;
    slot = msg;
    return replaced ? OfferOutcome::Replaced : OfferOutcome::Staged;
  }

  FlushOutcome try_flush() {
    if (staged_ < slots_.size()) return {FlushOutcome::Kind::Incomplete, slots_.size() - staged_};
    std::vector<std::byte> body;
    body.reserve(slots_.size() * kSlotSize);
    for (const auto& slot : slots_) {
      wire::append_u64(body, slot->bundled_touch_count);
      PayloadCodec<T>::encode(slot->payload, body);
    }
    auto frame = wire::encode_frame(wire::PacketKind::Pooled, pool_id_, next_sequence_, body,
                                    max_payload_);
    const bool ok = outbox_.offer(std::move(frame));
    ++next_sequence_;
    for (std::size_t i = 0; i < slots_.size(); ++i) {
      if (counters_[i]) counters_[i]->record(ok);
      slots_[i].reset();
    }
    staged_ = 0;
    if (ok) ++wire_transfers_;
    return {ok ? FlushOutcome::Kind::Flushed : FlushOutcome::Kind::Dropped, 0};
  }

  void bind_counters(std::size_t index, std::shared_ptr<InletCounters> counters) {
    counters_.at(index) = std::move(counters);
  }

  std::size_t member_count() const noexcept { return slots_.size(); }
  std::size_t staged_count() const noexcept { return staged_; }
  std::size_t capacity() const noexcept { return outbox_.capacity(); }
  std::uint64_t pool_id() const noexcept { return pool_id_; }
  std::uint64_t wire_transfers() const noexcept { return wire_transfers_; }

 private:
  DatagramOutbox outbox_;
  std::uint64_t pool_id_;
  std::size_t max_payload_;
  std::vector<std::optional<Message<T>>> slots_;
  std::vector<std::shared_ptr<InletCounters>> counters_;
  std::size_t staged_ = 0;
  SequenceNumber next_sequence_ = 0;
  std::uint64_t wire_transfers_ = 0;
};

template <FixedSizePayload T>
class PoolMemberDuct final : public SendDuct<T> {
 public:
  PoolMemberDuct(std::shared_ptr<ChannelPool<T>> pool, std::size_t index)
      : pool_(std::move(pool)), index_(index) {}

  EnqueueResult enqueue(const Message<T>& msg) override {
    pool_->offer(index_, msg);
    return EnqueueResult::Staged;
  }
  std::size_t capacity() const noexcept override { return pool_->capacity(); }
  void bind_counters(std::shared_ptr<InletCounters> counters) override {
    pool_->bind_counters(index_, std::move(counters));
  }

 private:
  std::shared_ptr<ChannelPool<T>> pool_;
  std::size_t index_;
};

template <FixedSizePayload T>
std::shared_ptr<SendDuct<T>> ChannelPool<T>::member_duct(std::size_t index) {
  if (index >= slots_.size()) throw std::out_of_range("pool member index");
  return std::make_shared<PoolMemberDuct<T>>(this->shared_from_this(), index);
}

// Joins any number of messages per member channel into variable-size frames,
// each entry tagged with its member index.
template <typename T>
class ChannelAggregator : public std::enable_shared_from_this<ChannelAggregator<T>> {
 public:
  ChannelAggregator(std::shared_ptr<DatagramHub> hub, PeerId peer, std::uint64_t channel_id,
                    std::size_t member_count, std::size_t capacity,
                    std::size_t max_payload = wire::kMaxPayload)
      : outbox_(std::move(hub), peer, capacity),
        channel_id_(channel_id),
        max_payload_(max_payload),
        staged_(member_count),
        counters_(member_count) {
    if (member_count > 0xffff) throw std::invalid_argument("aggregator supports 65535 members");
  }

  std::shared_ptr<SendDuct<T>> member_duct(std::size_t index);

  void offer(std::size_t index, const Message<T>& msg) {
    std::vector<std::byte> payload = encode_payload(msg.payload);
    if (payload.size() + wire::kAggregatedEntryOverhead > max_payload_ || payload.size() > 0xffff) {
      throw PayloadTooLarge("aggregated entry of " + std::to_string(payload.size()) + " bytes");
    }
    staged_.at(index).push_back(Entry{msg.bundled_touch_count, std::move(payload)});
    ++staged_count_;
  }

  // Packs staged messages in member order into as few frames as fit the cap.
  AggregateFlushOutcome flush() {
    AggregateFlushOutcome outcome;
    if (staged_count_ == 0) return outcome;
    std::vector<std::byte> body;
    std::vector<std::size_t> members_in_frame;
    auto dispatch = [&] {
      auto frame = wire::encode_frame(wire::PacketKind::Aggregated, channel_id_, next_sequence_++,
                                      body, max_payload_);
      const bool ok = outbox_.offer(std::move(frame));
      for (std::size_t m : members_in_frame) {
        if (counters_[m]) counters_[m]->record(ok);
      }
      ++outcome.frames;
      if (ok) {
        ++wire_transfers_;
      } else {
        ++outcome.dropped_frames;
      }
      body.clear();
      members_in_frame.clear();
    };
    for (std::size_t m = 0; m < staged_.size(); ++m) {
      for (auto& entry : staged_[m]) {
        const std::size_t need = wire::kAggregatedEntryOverhead + entry.payload.size();
        if (body.size() + need > max_payload_) dispatch();
        wire::append_u16(body, static_cast<std::uint16_t>(m));
        wire::append_u16(body, static_cast<std::uint16_t>(entry.payload.size()));
        wire::append_u64(body, entry.touch);
        body.insert(body.end(), entry.payload.begin(), entry.payload.end());
        members_in_frame.push_back(m);
        ++outcome.messages;
      }
      staged_[m].clear();
    }
    if (!members_in_frame.empty()) dispatch();
    staged_count_ = 0;
    return outcome;
  }

  void bind_counters(std::size_t index, std::shared_ptr<InletCounters> counters) {
    counters_.at(index) = std::move(counters);
  }

  std::size_t member_count() const noexcept { return staged_.size(); }
  std::size_t staged_count() const noexcept { return staged_count_; }
  std::size_t capacity() const noexcept { return outbox_.capacity(); }
  std::uint64_t wire_transfers() const noexcept { return wire_transfers_; }

 private:
  struct Entry {
    TouchCount touch;
    std::vector<std::byte> payload;
  };

  DatagramOutbox outbox_;
  std::uint64_t channel_id_;
  std::size_t max_payload_;
  std::vector<std::vector<Entry>> staged_;
  std::vector<std::shared_ptr<InletCounters>> counters_;
  std::size_t staged_count_ = 0;
  SequenceNumber next_sequence_ = 0;
  std::uint64_t wire_transfers_ = 0;
};

template <typename T>
class AggregatorMemberDuct final : public SendDuct<T> {
 public:
  AggregatorMemberDuct(std::shared_ptr<ChannelAggregator<T>> agg, std::size_t index)
      : agg_(std::move(agg)), index_(index) {}

  EnqueueResult enqueue(const Message<T>& msg) override {
    agg_->offer(index_, msg);
    return EnqueueResult::Staged;
  }
  std::size_t capacity() const noexcept override { return agg_->capacity(); }
  void bind_counters(std::shared_ptr<InletCounters> counters) override {
    agg_->bind_counters(index_, std::move(counters));
  }

 private:
  std::shared_ptr<ChannelAggregator<T>> agg_;
  std::size_t index_;
};

template <typename T>
std::shared_ptr<SendDuct<T>> ChannelAggregator<T>::member_duct(std::size_t index) {
  if (index >= staged_.size()) throw std::out_of_range("aggregator member index");
  return std::make_shared<AggregatorMemberDuct<T>>(this->shared_from_this(), index);
}

// Receiving side for pooled or aggregated frames on one consolidated channel.
// Frames pass through a reorder window, then fan out into bounded per-member
// queues that drop their oldest entry on overflow.
template <typename T>
class ConsolidatedReceiver : public std::enable_shared_from_this<ConsolidatedReceiver<T>> {
 public:
  ConsolidatedReceiver(std::shared_ptr<DatagramHub> hub, std::uint64_t channel_id,
                       std::size_t member_count, std::size_t queue_capacity,
                       std::size_t window = kDefaultReorderWindow)
      : hub_(std::move(hub)),
        channel_id_(channel_id),
        queue_capacity_(queue_capacity),
        window_(window),
        queues_(member_count),
        member_sequence_(member_count, 0) {
    hub_->register_sink(channel_id_, [this](const wire::PacketView& p) { ingest(p); });
  }

  ~ConsolidatedReceiver() { hub_->unregister_sink(channel_id_); }

  ConsolidatedReceiver(const ConsolidatedReceiver&) = delete;
  ConsolidatedReceiver& operator=(const ConsolidatedReceiver&) = delete;

  std::shared_ptr<ReceiveDuct<T>> member_duct(std::size_t index);

  std::size_t drain_member(std::size_t index, std::vector<Message<T>>& out, std::size_t max) {
    hub_->pump();
    std::lock_guard lock(mu_);
    window_.release(kDrainAll, [&](SequenceNumber seq, Frame&& f) { fan_out(seq, f); });
    auto& q = queues_.at(index);
    std::size_t n = 0;
    while (n < max && !q.empty()) {
      out.push_back(std::move(q.front()));
      q.pop_front();
      ++n;
    }
    return n;
  }

  std::size_t member_count() const noexcept { return queues_.size(); }
  std::uint64_t frames_received() const {
    std::lock_guard lock(mu_);
    return frames_received_;
  }
  std::uint64_t malformed_frames() const {
    std::lock_guard lock(mu_);
    return malformed_;
  }
  std::uint64_t queue_overflows() const {
    std::lock_guard lock(mu_);
    return overflows_;
  }

 private:
  struct Frame {
    wire::PacketKind kind;
    std::vector<std::byte> body;
  };

  void ingest(const wire::PacketView& packet) {
    std::lock_guard lock(mu_);
    if (packet.kind == wire::PacketKind::Message) {
      ++malformed_;
      return;
    }
    ++frames_received_;
    window_.ingest(packet.sequence_number,
                   Frame{packet.kind, {packet.body.begin(), packet.body.end()}});
  }

  void push(std::size_t member, Message<T>&& msg) {
    auto& q = queues_[member];
    if (q.size() >= queue_capacity_) {
      q.pop_front();
      ++overflows_;
    }
    q.push_back(std::move(msg));
  }

  void fan_out(SequenceNumber seq, const Frame& frame) {
    std::span<const std::byte> body = frame.body;
    if (frame.kind == wire::PacketKind::Pooled) {
      if constexpr (FixedSizePayload<T>) {
        constexpr std::size_t slot = ChannelPool<T>::kSlotSize;
        if (body.size() != slot * queues_.size()) {
          ++malformed_;
          return;
        }
        for (std::size_t m = 0; m < queues_.size(); ++m) {
          const auto s = body.subspan(m * slot, slot);
          push(m, Message<T>{PayloadCodec<T>::decode(s.subspan(wire::kPooledSlotOverhead)),
                             wire::read_u64(s), seq});
        }
      } else {
        ++malformed_;
      }
      return;
    }
    const auto entries = wire::parse_aggregated_body(body);
    if (!entries) {
      ++malformed_;
      return;
    }
    for (const auto& e : *entries) {
      if (e.member_index >= queues_.size()) {
        ++malformed_;
        continue;
      }
      try {
        push(e.member_index, Message<T>{PayloadCodec<T>::decode(e.payload), e.bundled_touch_count,
                                        member_sequence_[e.member_index]++});
      } catch (const TransportError&) {
        ++malformed_;
      }
    }
  }

  std::shared_ptr<DatagramHub> hub_;
  std::uint64_t channel_id_;
  std::size_t queue_capacity_;
  mutable std::mutex mu_;
  ReorderWindow<Frame> window_;
  std::vector<std::deque<Message<T>>> queues_;
  std::vector<SequenceNumber> member_sequence_;
  std::uint64_t frames_received_ = 0;
  std::uint64_t malformed_ = 0;
  std::uint64_t overflows_ = 0;
};

template <typename T>
class ConsolidatedMemberDuct final : public ReceiveDuct<T> {
 public:
  ConsolidatedMemberDuct(std::shared_ptr<ConsolidatedReceiver<T>> receiver, std::size_t index)
      : receiver_(std::move(receiver)), index_(index) {}

  std::size_t drain(std::vector<Message<T>>& out, std::size_t max) override {
    return receiver_->drain_member(index_, out, max);
  }

 private:
  std::shared_ptr<ConsolidatedReceiver<T>> receiver_;
  std::size_t index_;
};

template <typename T>
std::shared_ptr<ReceiveDuct<T>> ConsolidatedReceiver<T>::member_duct(std::size_t index) {
  if (index >= queues_.size()) throw std::out_of_range("receiver member index");
  return std::make_shared<ConsolidatedMemberDuct<T>>(this->shared_from_this(), index);
}

}  // namespace slip
