#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <random>
#include <span>
#include <vector>

#include "slip/topology.hpp"

namespace slip {

using Color = std::uint32_t;

// Counter-based generator: output i of stream k is splitmix64(k, i). Any
// (seed, node) pair names an independent, reproducible stream.
class CounterRng {
 public:
  using result_type = std::uint64_t;

  CounterRng() = default;
  explicit CounterRng(std::uint64_t key) : key_(key) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()() noexcept;
  // Uniform in [0, 1) with 53 bits of resolution.
  double uniform() noexcept;
  std::uint64_t below(std::uint64_t bound) noexcept;

  std::uint64_t key() const noexcept { return key_; }
  std::uint64_t position() const noexcept { return counter_; }

  friend bool operator==(const CounterRng&, const CounterRng&) = default;

 private:
  std::uint64_t key_ = 0;
  std::uint64_t counter_ = 0;
};

std::uint64_t mix64(std::uint64_t x) noexcept;
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) noexcept;

struct ColoringParams {
  std::size_t num_colors = 3;
  double b = 0.1;
  // On a conflict-free update, collapse onto the current color as in the
  // original learning rule. Off by default.
  bool success_reset = false;

  // Throws std::invalid_argument unless C >= 2 and 0 < b < 1.
  void validate() const;
};

struct ColoringNodeState {
  Color current_color = 0;
  std::vector<double> probabilities;
  CounterRng rng;

  friend bool operator==(const ColoringNodeState&, const ColoringNodeState&) = default;
};

ColoringNodeState init_node(const ColoringParams& params, CounterRng rng);
ColoringNodeState init_node(const ColoringParams& params, std::uint64_t run_seed, NodeId node);

// Returns the color to transmit, which is always the (possibly new) current color.
Color coloring_update(ColoringNodeState& node, std::span<const Color> neighbor_colors,
                      const ColoringParams& params);

std::size_t count_conflicts(const TorusTopology& topology, std::span<const Color> colors);

// Throws InvalidTopology for tori with self-edges (either dimension below 2).
void require_simple_topology(const TorusTopology& topology);

// Advances a std::mt19937 `work_units` times and folds the outputs into a checksum.
std::uint64_t burn_compute(std::uint64_t work_units, std::uint64_t seed);

class ComputeBurner {
 public:
  explicit ComputeBurner(std::uint64_t seed) : engine_(static_cast<std::mt19937::result_type>(seed)) {}

  std::uint64_t burn(std::uint64_t work_units) noexcept;
  std::uint64_t checksum() const noexcept { return checksum_; }

 private:
  std::mt19937 engine_;
  std::uint64_t checksum_ = 0;
};

}  // namespace slip
