#pragma once

#include <chrono>
#include <memory>
#include <thread>
#include <utility>
#include <vector>

#include "slip/counters.hpp"
#include "slip/duct.hpp"
#include "slip/errors.hpp"
#include "slip/message.hpp"

namespace slip {

namespace detail {

class Backoff {
 public:
  void pause() {
    if (++spins_ < 64) {
      std::this_thread::yield();
    } else {
      std::this_thread::sleep_for(std::chrono::microseconds(50));
    }
  }

 private:
  unsigned spins_ = 0;
};

}  // namespace detail

// Sending endpoint of one directed channel. One producer per inlet.
template <typename T>
class Inlet {
 public:
  explicit Inlet(std::shared_ptr<SendDuct<T>> duct,
                 std::shared_ptr<const UpdateClock> clock = nullptr)
      : duct_(std::move(duct)),
        counters_(std::make_shared<InletCounters>()),
        clock_(std::move(clock)) {
    duct_->bind_counters(counters_);
  }

  Inlet(Inlet&&) noexcept = default;
  Inlet& operator=(Inlet&& other) noexcept {
    detach();
    duct_ = std::move(other.duct_);
    counters_ = std::move(other.counters_);
    clock_ = std::move(other.clock_);
    touch_ = std::move(other.touch_);
    next_sequence_ = other.next_sequence_;
    return *this;
  }
  ~Inlet() { detach(); }

  // Never blocks. A full buffer drops the new message.
  PutOutcome try_put(const T& payload) {
    if (!duct_->receiver_alive()) throw DuctClosed();
    const EnqueueResult r = duct_->enqueue(make_message(payload));
    if (r == EnqueueResult::Staged) {
      ++next_sequence_;
      return PutOutcome::Queued;
    }
    const bool ok = r == EnqueueResult::Accepted;
    counters_->record(ok);
    if (ok) ++next_sequence_;
    return ok ? PutOutcome::Queued : PutOutcome::Dropped;
  }

  // Blocks until the duct has room.
  PutOutcome put(const T& payload) {
    const Message<T> msg = make_message(payload);
    detail::Backoff backoff;
    for (;;) {
      if (!duct_->receiver_alive()) throw DuctClosed();
      const EnqueueResult r = duct_->enqueue(msg);
      if (r != EnqueueResult::Full) {
        if (r == EnqueueResult::Accepted) counters_->record(true);
        ++next_sequence_;
        return PutOutcome::Queued;
      }
      backoff.pause();
    }
  }

  // The touch count bundled into each message is read from `touch`, normally
  // the outlet receiving from the same neighbor.
  void link_touch_counter(std::shared_ptr<const TouchCounter> touch) { touch_ = std::move(touch); }

  InletSnapshot snapshot() const noexcept { return probe().read(); }
  InletProbe probe() const { return InletProbe{counters_, clock_, touch_}; }
  const InletCounters& counters() const noexcept { return *counters_; }
  std::size_t buffer_capacity() const noexcept { return duct_->capacity(); }
  SequenceNumber next_sequence_number() const noexcept { return next_sequence_; }

 private:
  Message<T> make_message(const T& payload) const {
    return Message<T>{payload, touch_ ? touch_->load() : 0, next_sequence_};
  }

  void detach() noexcept {
    if (duct_) duct_->sender_detached();
  }

  std::shared_ptr<SendDuct<T>> duct_;
  std::shared_ptr<InletCounters> counters_;
  std::shared_ptr<const UpdateClock> clock_;
  std::shared_ptr<const TouchCounter> touch_;
  SequenceNumber next_sequence_ = 0;
};

// Receiving endpoint of one directed channel. One consumer per outlet. Reads
// with nothing new return the last received payload (or the initial value).
template <typename T>
class Outlet {
 public:
  Outlet(std::shared_ptr<ReceiveDuct<T>> duct, T initial,
         std::shared_ptr<const UpdateClock> clock = nullptr)
      : duct_(std::move(duct)),
        counters_(std::make_shared<OutletCounters>()),
        touch_(std::make_shared<TouchCounter>()),
        clock_(std::move(clock)) {
    last_.payload = std::move(initial);
  }

  Outlet(Outlet&&) noexcept = default;
  Outlet& operator=(Outlet&& other) noexcept {
    detach();
    duct_ = std::move(other.duct_);
    counters_ = std::move(other.counters_);
    touch_ = std::move(other.touch_);
    clock_ = std::move(other.clock_);
    last_ = std::move(other.last_);
    received_any_ = other.received_any_;
    scratch_ = std::move(other.scratch_);
    return *this;
  }
  ~Outlet() { detach(); }

  // Drains everything available in one call and keeps the newest.
  const T& jump() {
    counters_->pull_attempt_count.add();
    scratch_.clear();
    const std::size_t n = duct_->drain(scratch_, kDrainAll);
    if (n > 0) accept(n);
    return last_.payload;
  }

  // Fetches at most one message, in sequence order.
  StepOutcome<T> try_step() {
    counters_->pull_attempt_count.add();
    scratch_.clear();
    if (duct_->drain(scratch_, 1) == 0) return {StepStatus::Stale, last_.payload};
    accept(1);
    return {StepStatus::Advanced, last_.payload};
  }

  // Blocks until one new message arrives. Counts as one pull attempt.
  const T& step() {
    detail::Backoff backoff;
    for (;;) {
      scratch_.clear();
      if (duct_->drain(scratch_, 1) == 1) break;
      if (!duct_->sender_alive()) {
        // Recheck once: the sender may have enqueued right before leaving.
        if (duct_->drain(scratch_, 1) == 1) break;
        throw DuctClosed();
      }
      backoff.pause();
    }
    counters_->pull_attempt_count.add();
    accept(1);
    return last_.payload;
  }

  // Last received payload without attempting a pull.
  const T& last() const noexcept { return last_.payload; }
  const Message<T>& last_message() const noexcept { return last_; }
  bool received_any() const noexcept { return received_any_; }

  std::shared_ptr<const TouchCounter> touch_counter() const { return touch_; }
  OutletSnapshot snapshot() const noexcept { return probe().read(); }
  OutletProbe probe() const { return OutletProbe{counters_, clock_, touch_}; }
  const OutletCounters& counters() const noexcept { return *counters_; }

 private:
  void accept(std::size_t n) {
    counters_->message_count.add(n);
    counters_->laden_pull_count.add();
    last_ = std::move(scratch_.back());
    received_any_ = true;
    touch_->set(1 + last_.bundled_touch_count);
  }

  void detach() noexcept {
    if (duct_) duct_->receiver_detached();
  }

  std::shared_ptr<ReceiveDuct<T>> duct_;
  std::shared_ptr<OutletCounters> counters_;
  std::shared_ptr<TouchCounter> touch_;
  std::shared_ptr<const UpdateClock> clock_;
  Message<T> last_{};
  bool received_any_ = false;
  std::vector<Message<T>> scratch_;
};

template <typename T>
struct ChannelEnds {
  Inlet<T> inlet;
  Outlet<T> outlet;
};

// Wires an inlet and outlet onto one shared in-memory duct.
template <typename T>
ChannelEnds<T> make_channel(std::shared_ptr<LocalDuct<T>> duct, T initial,
                            std::shared_ptr<const UpdateClock> sender_clock = nullptr,
                            std::shared_ptr<const UpdateClock> receiver_clock = nullptr) {
  return ChannelEnds<T>{Inlet<T>(duct, std::move(sender_clock)),
                        Outlet<T>(duct, std::move(initial), std::move(receiver_clock))};
}

}  // namespace slip
