#pragma once

#include <atomic>
#include <cstddef>
#include <limits>
#include <memory>
#include <vector>

#include "slip/counters.hpp"
#include "slip/message.hpp"

namespace slip {

// Staged: the transport took the message but defers the send decision (and
// the inlet's counter update) to a later consolidated flush.
enum class EnqueueResult { Accepted, Full, Staged };

inline constexpr std::size_t kDrainAll = std::numeric_limits<std::size_t>::max();

// Sending half of a transport.
template <typename T>
class SendDuct {
 public:
  virtual ~SendDuct() = default;

  virtual EnqueueResult enqueue(const Message<T>& msg) = 0;
  virtual std::size_t capacity() const noexcept = 0;
  virtual bool receiver_alive() const noexcept { return true; }
  virtual void sender_detached() noexcept {}
  // Consolidating transports record send outcomes themselves at flush time.
  virtual void bind_counters(std::shared_ptr<InletCounters>) {}
};

// Receiving half of a transport. drain() is the only consumption path.
template <typename T>
class ReceiveDuct {
 public:
  virtual ~ReceiveDuct() = default;

  // Appends up to `max` available messages to `out` in sequence order and
  // returns how many were appended.
  virtual std::size_t drain(std::vector<Message<T>>& out, std::size_t max) = 0;
  virtual bool sender_alive() const noexcept { return true; }
  virtual void receiver_detached() noexcept {}
};

// Both halves living in one address space, with liveness tracking so blocking
// calls can escape when the other side goes away.
template <typename T>
class LocalDuct : public SendDuct<T>, public ReceiveDuct<T> {
 public:
  bool receiver_alive() const noexcept override {
    return receiver_open_.load(std::memory_order_acquire);
  }
  bool sender_alive() const noexcept override {
    return sender_open_.load(std::memory_order_acquire);
  }
  void sender_detached() noexcept override {
    sender_open_.store(false, std::memory_order_release);
  }
  void receiver_detached() noexcept override {
    receiver_open_.store(false, std::memory_order_release);
  }

 private:
  std::atomic<bool> sender_open_{true};
  std::atomic<bool> receiver_open_{true};
};

// Bounded FIFO for endpoints owned by the same worker. No synchronization.
template <typename T>
class IntraThreadDuct final : public LocalDuct<T> {
 public:
  explicit IntraThreadDuct(std::size_t capacity) : slots_(capacity) {}

  EnqueueResult enqueue(const Message<T>& msg) override {
    if (size_ == slots_.size()) return EnqueueResult::Full;
    slots_[(head_ + size_) % slots_.size()] = msg;
    ++size_;
    return EnqueueResult::Accepted;
  }

  std::size_t drain(std::vector<Message<T>>& out, std::size_t max) override {
    std::size_t n = size_ < max ? size_ : max;
    for (std::size_t i = 0; i < n; ++i) {
      out.push_back(std::move(slots_[head_]));
      head_ = (head_ + 1) % slots_.size();
    }
    size_ -= n;
    return n;
  }

  std::size_t capacity() const noexcept override { return slots_.size(); }
  std::size_t size() const noexcept { return size_; }

 private:
  std::vector<Message<T>> slots_;
  std::size_t head_ = 0;
  std::size_t size_ = 0;
};

// Lock-free single-producer/single-consumer ring. Indices grow monotonically
// and are reduced modulo capacity on access, so all `capacity` slots are usable.
template <typename T>
class InterThreadDuct final : public LocalDuct<T> {
 public:
  explicit InterThreadDuct(std::size_t capacity) : slots_(capacity) {}

  EnqueueResult enqueue(const Message<T>& msg) override {
    const std::uint64_t w = write_.load(std::memory_order_relaxed);
    const std::uint64_t r = read_.load(std::memory_order_acquire);
    if (w - r == slots_.size()) return EnqueueResult::Full;
    slots_[w % slots_.size()] = msg;
    write_.store(w + 1, std::memory_order_release);
    return EnqueueResult::Accepted;
  }

  std::size_t drain(std::vector<Message<T>>& out, std::size_t max) override {
    const std::uint64_t r = read_.load(std::memory_order_relaxed);
    const std::uint64_t w = write_.load(std::memory_order_acquire);
    const std::uint64_t avail = w - r;
    const std::size_t n = avail < max ? static_cast<std::size_t>(avail) : max;
    for (std::size_t i = 0; i < n; ++i) out.push_back(std::move(slots_[(r + i) % slots_.size()]));
    read_.store(r + n, std::memory_order_release);
    return n;
  }

  std::size_t capacity() const noexcept override { return slots_.size(); }

 private:
  std::vector<Message<T>> slots_;
  alignas(64) std::atomic<std::uint64_t> write_{0};
  alignas(64) std::atomic<std::uint64_t> read_{0};
};

}  // namespace slip
