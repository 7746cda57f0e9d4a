#pragma once

#include <chrono>
#include <condition_variable>
#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <set>
#include <span>
#include <vector>

#include "slip/hub.hpp"

namespace slip {

enum class Reduction { Max, Sum, Or };

std::uint64_t reduce(Reduction op, std::uint64_t a, std::uint64_t b) noexcept;

// A global synchronization point across all workers of a run. Each call to
// sync() is one barrier generation: nobody returns from generation g until
// every participant has entered it, and all receive the same reduced value.
class SyncPoint {
 public:
  virtual ~SyncPoint() = default;

  // Throws BarrierBroken if a participant abandoned the barrier.
  virtual std::uint64_t sync(std::uint64_t contribution, Reduction op) = 0;
  // Marks this participant as gone; peers blocked in sync() are released with
  // BarrierBroken where the transport allows it.
  virtual void abandon() noexcept = 0;
  // Number of completed sync() calls by this participant.
  virtual std::uint64_t generation() const noexcept = 0;

  // Barrier that also agrees on whether to stop: true if anyone votes true.
  bool vote_stop(bool stop) { return sync(stop ? 1 : 0, Reduction::Or) != 0; }
};

class ThreadBarrier final : public SyncPoint {
 public:
  explicit ThreadBarrier(std::size_t participants);

  std::uint64_t sync(std::uint64_t contribution, Reduction op) override;
  void abandon() noexcept override;
  std::uint64_t generation() const noexcept override;

  std::size_t participants() const noexcept { return participants_; }

 private:
  const std::size_t participants_;
  mutable std::mutex mu_;
  std::condition_variable cv_;
  std::size_t arrived_ = 0;
  std::uint64_t generation_ = 0;
  std::uint64_t accumulator_ = 0;
  std::uint64_t result_ = 0;
  bool broken_ = false;
};

struct ProcessGroupOptions {
  std::chrono::milliseconds retry{5};
  std::chrono::milliseconds timeout{30000};
  std::chrono::milliseconds finish_timeout{1000};
};

// Reliable collectives for one process per rank, built on the lossy datagram
// hub: rank 0 collects arrivals and answers with releases; every message is
// retried until acknowledged, and a silent peer eventually breaks the barrier.
class ProcessGroup final : public SyncPoint {
 public:
  static constexpr std::uint64_t kControlChannel = 0xC000'0000'0000'0001ull;

  ProcessGroup(std::shared_ptr<DatagramHub> hub, std::size_t rank,
               std::vector<PeerId> peer_of_rank, ProcessGroupOptions options = {});
  ~ProcessGroup() override;

  ProcessGroup(const ProcessGroup&) = delete;
  ProcessGroup& operator=(const ProcessGroup&) = delete;

  std::uint64_t sync(std::uint64_t contribution, Reduction op) override;
  void abandon() noexcept override;
  std::uint64_t generation() const noexcept override { return completed_; }

  // Collects one blob per rank at rank 0 (indexed by rank). Other ranks get
  // an empty result.
  std::vector<std::vector<std::byte>> gather(std::span<const std::byte> local);

  // Rank 0 lingers until every peer acknowledged the last release, so a lost
  // final release does not strand anyone. Bounded by finish_timeout.
  void finish();

  std::size_t rank() const noexcept { return rank_; }
  std::size_t size() const noexcept { return peer_of_rank_.size(); }

 private:
  struct Control;

  void send(std::size_t to_rank, const Control& c);
  void poll(std::chrono::milliseconds wait);
  void handle(const Control& c);
  void check_deadline(std::chrono::steady_clock::time_point start) const;

  std::shared_ptr<DatagramHub> hub_;
  std::size_t rank_;
  std::vector<PeerId> peer_of_rank_;
  ProcessGroupOptions options_;
  bool broken_ = false;
  std::uint64_t next_generation_ = 0;
  std::uint64_t completed_ = 0;
  std::uint64_t send_sequence_ = 0;

  std::mutex inbox_mu_;
  std::vector<std::vector<std::byte>> inbox_;

  // rank 0
  std::map<std::uint64_t, std::map<std::size_t, std::uint64_t>> arrivals_;
  std::map<std::uint64_t, std::uint64_t> results_;
  std::map<std::uint64_t, std::set<std::size_t>> acks_;
  struct Partial {
    std::uint32_t total = 0;
    std::vector<std::byte> bytes;
    std::set<std::uint32_t> offsets;
    std::size_t received = 0;
  };
  std::map<std::uint64_t, std::map<std::size_t, Partial>> gathers_;

  // other ranks
  std::map<std::uint64_t, std::uint64_t> released_;
  std::set<std::pair<std::uint64_t, std::uint32_t>> chunk_acks_;
};

}  // namespace slip
