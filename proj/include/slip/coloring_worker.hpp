#pragma once

#include <array>
#include <chrono>
#include <cstdint>
#include <vector>

#include "slip/registry.hpp"
#include "slip/workloads.hpp"

namespace slip {

// One simulation update of everything a worker owns.
class UpdateTarget {
 public:
  virtual ~UpdateTarget() = default;
  virtual void update() = 0;
  // Disabled communication skips every put and pull that crosses to another
  // worker; reads fall back to the last value received.
  virtual void set_communication(bool enabled) = 0;
};

enum class ReadMode { Jump, TryStep };

struct ColoringWorkerOptions {
  ColoringParams params;
  std::uint64_t seed = 1;
  std::uint64_t compute_work_units = 0;
  ReadMode read = ReadMode::Jump;
  // Each update ends with a sleep drawn uniformly from [0, jitter].
  std::chrono::nanoseconds jitter{0};
};

// Graph coloring over the nodes one worker owns: per update, every node reads
// its four neighbors, applies the coloring rule and sends its color on all
// four inlets; then pooled transfers are flushed and the compute knob burned.
class ColoringWorker final : public UpdateTarget {
 public:
  ColoringWorker(ChannelRegistry<Color>& registry, WorkerId worker, ColoringWorkerOptions options);

  // Sends every node's initial color so neighbors start from real values.
  void prime();
  void update() override;
  void set_communication(bool enabled) override { communicate_ = enabled; }

  WorkerId worker() const noexcept { return worker_; }
  std::vector<NodeId> nodes() const;
  std::vector<Color> colors() const;
  const ColoringNodeState& state(std::size_t i) const { return nodes_.at(i).state; }
  std::uint64_t updates() const noexcept { return updates_; }
  std::uint64_t compute_checksum() const noexcept { return burner_.checksum(); }

 private:
  struct Node {
    NodeId id = 0;
    ColoringNodeState state;
    std::array<Outlet<Color>*, 4> in{};
    std::array<Inlet<Color>*, 4> out{};
    std::array<bool, 4> in_local{};
    std::array<bool, 4> out_local{};
  };

  void send(Node& node, Color color);

  ChannelRegistry<Color>& registry_;
  WorkerId worker_;
  ColoringWorkerOptions options_;
  std::vector<Node> nodes_;
  std::shared_ptr<UpdateClock> clock_;
  ComputeBurner burner_;
  CounterRng jitter_rng_;
  bool communicate_ = true;
  std::uint64_t updates_ = 0;
};

}  // namespace slip
