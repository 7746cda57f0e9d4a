#include "slip/workloads.hpp"

#include <stdexcept>

#include "slip/errors.hpp"

namespace slip {

std::uint64_t mix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) noexcept {
  return mix64(mix64(seed) ^ (stream * 0xd1b54a32d192ed03ull));
}

CounterRng::result_type CounterRng::operator()() noexcept {
  return mix64(key_ ^ mix64(counter_++));
}

double CounterRng::uniform() noexcept {
  return static_cast<double>((*this)() >> 11) * 0x1.0p-53;
}

std::uint64_t CounterRng::below(std::uint64_t bound) noexcept {
  // Lemire's multiply-shift with rejection.
  for (;;) {
    const unsigned __int128 m = static_cast<unsigned __int128>((*this)()) * bound;
    const auto low = static_cast<std::uint64_t>(m);
    if (low >= bound || low >= (-bound) % bound) return static_cast<std::uint64_t>(m >> 64);
  }
}

void ColoringParams::validate() const {
  if (num_colors < 2) throw std::invalid_argument("num_colors must be at least 2");
  if (!(b > 0.0 && b < 1.0)) throw std::invalid_argument("b must lie in (0, 1)");
}

ColoringNodeState init_node(const ColoringParams& params, CounterRng rng) {
  params.validate();
  ColoringNodeState s;
  s.rng = rng;
  s.current_color = static_cast<Color>(s.rng.below(params.num_colors));
  s.probabilities.assign(params.num_colors, 1.0 / static_cast<double>(params.num_colors));
  return s;
}

ColoringNodeState init_node(const ColoringParams& params, std::uint64_t run_seed, NodeId node) {
  return init_node(params, CounterRng(derive_seed(run_seed, node)));
}

namespace {

Color sample(std::span<const double> p, CounterRng& rng) {
  const double u = rng.uniform();
  double cumulative = 0.0;
  std::size_t last_positive = 0;
  for (std::size_t j = 0; j < p.size(); ++j) {
    if (p[j] <= 0.0) continue;
    last_positive = j;
    cumulative += p[j];
    if (u < cumulative) return static_cast<Color>(j);
  }
  return static_cast<Color>(last_positive);
}

}  // namespace

Color coloring_update(ColoringNodeState& node, std::span<const Color> neighbor_colors,
                      const ColoringParams& params) {
  bool conflict = false;
  for (Color c : neighbor_colors) conflict |= c == node.current_color;

  auto& p = node.probabilities;
  if (!conflict) {
    if (params.success_reset) {
      for (std::size_t j = 0; j < p.size(); ++j) p[j] = j == node.current_color ? 1.0 : 0.0;
    }
    return node.current_color;
  }
  const double keep = 1.0 - params.b;
  const double share = params.b / static_cast<double>(p.size() - 1);
  for (std::size_t j = 0; j < p.size(); ++j) {
    p[j] = j == node.current_color ? keep * p[j] : keep * p[j] + share;
  }
  node.current_color = sample(p, node.rng);
  return node.current_color;
}

std::size_t count_conflicts(const TorusTopology& topology, std::span<const Color> colors) {
  if (colors.size() != topology.node_count()) {
    throw std::invalid_argument("one color per node required");
  }
  std::size_t conflicts = 0;
  for (const auto& e : topology.undirected_edges()) conflicts += colors[e.a] == colors[e.b];
  return conflicts;
}

void require_simple_topology(const TorusTopology& topology) {
  if (topology.has_self_edges()) {
    throw InvalidTopology("coloring needs a torus at least 2x2; self-edges have no meaning");
  }
}

std::uint64_t ComputeBurner::burn(std::uint64_t work_units) noexcept {
  std::uint64_t acc = checksum_;
  for (std::uint64_t i = 0; i < work_units; ++i) acc = (acc << 1 | acc >> 63) ^ engine_();
  checksum_ = acc;
  return acc;
}

std::uint64_t burn_compute(std::uint64_t work_units, std::uint64_t seed) {
  ComputeBurner burner(seed);
  return burner.burn(work_units);
}

}  // namespace slip
