#pragma once

#include <cstdint>

namespace slip {

using SequenceNumber = std::uint64_t;
using TouchCount = std::uint64_t;

// Envelope for one payload travelling along a channel.
template <typename T>
struct Message {
  T payload{};
  TouchCount bundled_touch_count = 0;
  SequenceNumber sequence_number = 0;

  friend bool operator==(const Message&, const Message&) = default;
};

enum class PutOutcome { Queued, Dropped };

enum class StepStatus { Advanced, Stale };

template <typename T>
struct StepOutcome {
  StepStatus status;
  const T& value;

  bool advanced() const noexcept { return status == StepStatus::Advanced; }
};

}  // namespace slip
