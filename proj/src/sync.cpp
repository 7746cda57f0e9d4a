#include "slip/sync.hpp"

#include <algorithm>
#include <optional>
#include <stdexcept>
#include <thread>

#include "slip/errors.hpp"
#include "slip/wire.hpp"

namespace slip {

std::uint64_t reduce(Reduction op, std::uint64_t a, std::uint64_t b) noexcept {
  switch (op) {
    case Reduction::Max: return std::max(a, b);
    case Reduction::Sum: return a + b;
    case Reduction::Or: return (a != 0 || b != 0) ? 1 : 0;
  }
  return a;
}

ThreadBarrier::ThreadBarrier(std::size_t participants) : participants_(participants) {
  if (participants == 0) throw std::invalid_argument("barrier needs participants");
}

std::uint64_t ThreadBarrier::sync(std::uint64_t contribution, Reduction op) {
  std::unique_lock lock(mu_);
  if (broken_) throw BarrierBroken();
  const std::uint64_t gen = generation_;
  accumulator_ = arrived_ == 0 ? contribution : reduce(op, accumulator_, contribution);
  if (++arrived_ == participants_) {
    result_ = accumulator_;
    arrived_ = 0;
    ++generation_;
    cv_.notify_all();
    return result_;
  }
  cv_.wait(lock, [&] { return generation_ != gen || broken_; });
  if (generation_ == gen) throw BarrierBroken();
  return result_;
}

void ThreadBarrier::abandon() noexcept {
  std::lock_guard lock(mu_);
  broken_ = true;
  cv_.notify_all();
}

std::uint64_t ThreadBarrier::generation() const noexcept {
  std::lock_guard lock(mu_);
  return generation_;
}

// ---------------------------------------------------------------------------

namespace {

enum class ControlKind : std::uint8_t { Arrive = 1, Release = 2, Ack = 3, Chunk = 4, ChunkAck = 5 };

constexpr std::size_t kChunkBytes = 1024;

}  // namespace

struct ProcessGroup::Control {
  ControlKind kind{};
  std::uint32_t rank = 0;
  std::uint64_t generation = 0;
  std::uint64_t value = 0;
  std::uint32_t offset = 0;
  std::uint32_t total = 0;
  std::vector<std::byte> bytes;

  static Control of(ControlKind kind, std::size_t rank, std::uint64_t generation,
                    std::uint64_t value = 0) {
    Control c;
    c.kind = kind;
    c.rank = static_cast<std::uint32_t>(rank);
    c.generation = generation;
    c.value = value;
    return c;
  }

  std::vector<std::byte> encode() const {
    std::vector<std::byte> out;
    out.push_back(static_cast<std::byte>(kind));
    wire::append_u32(out, rank);
    wire::append_u64(out, generation);
    wire::append_u64(out, value);
    wire::append_u32(out, offset);
    wire::append_u32(out, total);
    out.insert(out.end(), bytes.begin(), bytes.end());
    return out;
  }

  static std::optional<Control> decode(std::span<const std::byte> in) {
    constexpr std::size_t kFixed = 1 + 4 + 8 + 8 + 4 + 4;
    if (in.size() < kFixed) return std::nullopt;
    Control c;
    c.kind = static_cast<ControlKind>(std::to_integer<std::uint8_t>(in[0]));
    c.rank = wire::read_u32(in.subspan(1));
    c.generation = wire::read_u64(in.subspan(5));
    c.value = wire::read_u64(in.subspan(13));
    c.offset = wire::read_u32(in.subspan(21));
    c.total = wire::read_u32(in.subspan(25));
    c.bytes.assign(in.begin() + kFixed, in.end());
    return c;
  }
};

ProcessGroup::ProcessGroup(std::shared_ptr<DatagramHub> hub, std::size_t rank,
                           std::vector<PeerId> peer_of_rank, ProcessGroupOptions options)
    : hub_(std::move(hub)), rank_(rank), peer_of_rank_(std::move(peer_of_rank)), options_(options) {
  if (rank_ >= peer_of_rank_.size()) throw std::invalid_argument("rank outside group");
  hub_->register_sink(kControlChannel, [this](const wire::PacketView& p) {
    std::lock_guard lock(inbox_mu_);
    inbox_.emplace_back(p.body.begin(), p.body.end());
  });
}

ProcessGroup::~ProcessGroup() { hub_->unregister_sink(kControlChannel); }

void ProcessGroup::send(std::size_t to_rank, const Control& c) {
  const auto payload = c.encode();
  const auto datagram = wire::encode_datagram(kControlChannel, send_sequence_++, 0, payload);
  // A refused send is just another lost datagram; the retry loop covers it.
  hub_->send(peer_of_rank_.at(to_rank), datagram, Traffic::Control);
}

void ProcessGroup::poll(std::chrono::milliseconds wait) {
  hub_->wait_readable(static_cast<int>(wait.count()));
  hub_->pump();
  std::vector<std::vector<std::byte>> batch;
  {
    std::lock_guard lock(inbox_mu_);
    batch.swap(inbox_);
  }
  for (const auto& raw : batch) {
    if (auto c = Control::decode(raw)) handle(*c);
  }
}

void ProcessGroup::handle(const Control& c) {
  switch (c.kind) {
    case ControlKind::Arrive:
      if (rank_ != 0) break;
      if (auto it = results_.find(c.generation); it != results_.end()) {
        send(c.rank, Control::of(ControlKind::Release, 0, c.generation, it->second));
      } else {
        arrivals_[c.generation][c.rank] = c.value;
      }
      break;
    case ControlKind::Release:
      if (rank_ == 0) break;
      released_[c.generation] = c.value;
      send(0, Control::of(ControlKind::Ack, rank_, c.generation));
      break;
    case ControlKind::Ack:
      if (rank_ == 0) acks_[c.generation].insert(c.rank);
      break;
    case ControlKind::Chunk: {
      if (rank_ != 0) break;
      Partial& part = gathers_[c.generation][c.rank];
      if (part.offsets.empty() && part.received == 0) {
        part.total = c.total;
        part.bytes.resize(c.total);
      }
      if (c.offset + c.bytes.size() <= part.bytes.size() && part.offsets.insert(c.offset).second) {
        std::copy(c.bytes.begin(), c.bytes.end(), part.bytes.begin() + c.offset);
        part.received += c.bytes.size();
      }
      Control ack = Control::of(ControlKind::ChunkAck, 0, c.generation);
      ack.offset = c.offset;
      send(c.rank, ack);
      break;
    }
    case ControlKind::ChunkAck:
      if (rank_ != 0) chunk_acks_.insert({c.generation, c.offset});
      break;
  }
}

void ProcessGroup::check_deadline(std::chrono::steady_clock::time_point start) const {
  if (std::chrono::steady_clock::now() - start > options_.timeout) {
    throw BarrierBroken("process barrier timed out waiting for peers");
  }
}

std::uint64_t ProcessGroup::sync(std::uint64_t contribution, Reduction op) {
  if (broken_) throw BarrierBroken();
  const std::uint64_t gen = next_generation_++;
  const auto start = std::chrono::steady_clock::now();
  try {
    if (rank_ == 0) {
      arrivals_[gen][0] = contribution;
      while (arrivals_[gen].size() < size()) {
        poll(options_.retry);
        check_deadline(start);
      }
      std::uint64_t result = 0;
      bool first = true;
      for (const auto& [r, v] : arrivals_[gen]) {
        result = first ? v : reduce(op, result, v);
        first = false;
      }
      arrivals_.erase(gen);
      results_[gen] = result;
      for (std::size_t r = 1; r < size(); ++r) send(r, Control::of(ControlKind::Release, 0, gen, result));
      ++completed_;
      return result;
    }
    const Control arrive = Control::of(ControlKind::Arrive, rank_, gen, contribution);
    auto last_send = std::chrono::steady_clock::now();
    send(0, arrive);
    while (!released_.count(gen)) {
      poll(options_.retry);
      check_deadline(start);
      if (std::chrono::steady_clock::now() - last_send >= options_.retry) {
        send(0, arrive);
        last_send = std::chrono::steady_clock::now();
      }
    }
    const std::uint64_t result = released_[gen];
    released_.erase(gen);
    ++completed_;
    return result;
  } catch (...) {
    broken_ = true;
    throw;
  }
}

std::vector<std::vector<std::byte>> ProcessGroup::gather(std::span<const std::byte> local) {
  if (broken_) throw BarrierBroken();
  const std::uint64_t gen = next_generation_++;
  const auto start = std::chrono::steady_clock::now();
  try {
    if (rank_ == 0) {
      const auto complete = [&] {
        auto& parts = gathers_[gen];
        for (std::size_t r = 1; r < size(); ++r) {
          auto it = parts.find(r);
          if (it == parts.end() || it->second.received < it->second.total ||
              (it->second.total == 0 && it->second.offsets.empty())) {
            return false;
          }
        }
        return true;
      };
      while (!complete()) {
        poll(options_.retry);
        check_deadline(start);
      }
      std::vector<std::vector<std::byte>> out(size());
      out[0].assign(local.begin(), local.end());
      for (auto& [r, part] : gathers_[gen]) {
        if (r < size() && r != 0) out[r] = std::move(part.bytes);
      }
      gathers_.erase(gen);
      return out;
    }
    const auto total = static_cast<std::uint32_t>(local.size());
    std::uint32_t offset = 0;
    do {
      const std::uint32_t len = std::min<std::uint32_t>(kChunkBytes, total - offset);
      Control chunk = Control::of(ControlKind::Chunk, rank_, gen);
      chunk.offset = offset;
      chunk.total = total;
      chunk.bytes.assign(local.begin() + offset, local.begin() + offset + len);
      send(0, chunk);
      auto last_send = std::chrono::steady_clock::now();
      while (!chunk_acks_.count({gen, offset})) {
        poll(options_.retry);
        check_deadline(start);
        if (std::chrono::steady_clock::now() - last_send >= options_.retry) {
          send(0, chunk);
          last_send = std::chrono::steady_clock::now();
        }
      }
      offset += len;
    } while (offset < total);
    return {};
  } catch (...) {
    broken_ = true;
    throw;
  }
}

void ProcessGroup::finish() {
  if (rank_ != 0 || results_.empty() || broken_) return;
  const auto [gen, result] = *results_.rbegin();
  const auto start = std::chrono::steady_clock::now();
  auto last_send = start;
  while (acks_[gen].size() + 1 < size()) {
    if (std::chrono::steady_clock::now() - start > options_.finish_timeout) return;
    poll(options_.retry);
    if (std::chrono::steady_clock::now() - last_send >= options_.retry) {
      for (std::size_t r = 1; r < size(); ++r) {
        if (!acks_[gen].count(r)) send(r, Control::of(ControlKind::Release, 0, gen, result));
      }
      last_send = std::chrono::steady_clock::now();
    }
  }
}

void ProcessGroup::abandon() noexcept { broken_ = true; }

}  // namespace slip
