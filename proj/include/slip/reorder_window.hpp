#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <utility>

#include "slip/message.hpp"

namespace slip {

struct WindowStats {
  std::uint64_t duplicates = 0;
  std::uint64_t late = 0;
  std::uint64_t overflowed = 0;
  // Sequence numbers never seen before a later one was released.
  std::uint64_t skipped = 0;
};

// Receive-side holding area keyed by sequence number. Releases items in
// ascending order; anything at or below the last released number is late.
// At most `span` items are held, the oldest being discarded first.
template <typename Item>
class ReorderWindow {
 public:
  enum class Admit { Accepted, Duplicate, Late };

  explicit ReorderWindow(std::size_t span) : span_(span) {}

  Admit ingest(SequenceNumber seq, Item item) {
    if (seq < next_expected_) {
      ++stats_.late;
      return Admit::Late;
    }
    if (!pending_.try_emplace(seq, std::move(item)).second) {
      ++stats_.duplicates;
      return Admit::Duplicate;
    }
    if (pending_.size() > span_) {
      auto oldest = pending_.begin();
      stats_.skipped += oldest->first - next_expected_;
      next_expected_ = oldest->first + 1;
      pending_.erase(oldest);
      ++stats_.overflowed;
    }
    return Admit::Accepted;
  }

  template <typename Emit>
  std::size_t release(std::size_t max, Emit&& emit) {
    std::size_t n = 0;
    while (n < max && !pending_.empty()) {
      auto node = pending_.extract(pending_.begin());
      stats_.skipped += node.key() - next_expected_;
      next_expected_ = node.key() + 1;
      emit(node.key(), std::move(node.mapped()));
      ++n;
    }
    return n;
  }

  std::size_t pending() const noexcept { return pending_.size(); }
  std::size_t span() const noexcept { return span_; }
  SequenceNumber next_expected() const noexcept { return next_expected_; }
  const WindowStats& stats() const noexcept { return stats_; }

 private:
  std::size_t span_;
  SequenceNumber next_expected_ = 0;
  std::map<SequenceNumber, Item> pending_;
  WindowStats stats_;
};

}  // namespace slip
