#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

namespace slip {

using NodeId = std::size_t;
using WorkerId = std::size_t;

enum class Direction : std::uint8_t { Left = 0, Right = 1, Up = 2, Down = 3 };

inline constexpr std::array<Direction, 4> kDirections{Direction::Left, Direction::Right,
                                                      Direction::Up, Direction::Down};

constexpr Direction opposite(Direction d) noexcept {
  switch (d) {
    case Direction::Left: return Direction::Right;
    case Direction::Right: return Direction::Left;
    case Direction::Up: return Direction::Down;
    case Direction::Down: return Direction::Up;
  }
  return d;
}

std::string_view to_string(Direction d) noexcept;

struct UndirectedEdge {
  NodeId a;
  NodeId b;
};

// Row-major 2-D grid with wraparound in both axes. Every node has four
// neighbor slots, which may coincide on narrow tori.
class TorusTopology {
 public:
  TorusTopology(std::size_t width, std::size_t height);

  std::size_t width() const noexcept { return width_; }
  std::size_t height() const noexcept { return height_; }
  std::size_t node_count() const noexcept { return width_ * height_; }

  NodeId node_at(std::size_t x, std::size_t y) const noexcept { return y * width_ + x; }
  std::size_t column(NodeId n) const noexcept { return n % width_; }
  std::size_t row(NodeId n) const noexcept { return n / width_; }

  NodeId neighbor(NodeId n, Direction d) const noexcept;

  // One entry per (node, Right) and (node, Down) pair: 2 * width * height.
  std::vector<UndirectedEdge> undirected_edges() const;

  // True if any neighbor slot refers back to the node itself.
  bool has_self_edges() const noexcept { return width_ < 2 || height_ < 2; }

 private:
  std::size_t width_;
  std::size_t height_;
};

// Throws InvalidDimensions on a zero dimension.
TorusTopology build_torus(std::size_t width, std::size_t height);

// Where a worker runs: process index and thread index within that process.
struct WorkerLocus {
  std::size_t process = 0;
  std::size_t thread = 0;

  friend bool operator==(const WorkerLocus&, const WorkerLocus&) = default;
};

struct PartitionAssignment {
  std::vector<WorkerId> owner;               // node -> worker
  std::vector<std::vector<NodeId>> members;  // worker -> nodes, ascending
  std::vector<WorkerLocus> loci;             // worker -> locus

  std::size_t worker_count() const noexcept { return members.size(); }
  WorkerId worker_of(NodeId n) const { return owner.at(n); }
};

// Contiguous blocks in row-major order. Without `rows_per_band` the blocks
// are balanced (sizes differ by at most one); with it, each worker takes that
// many whole rows and the last worker takes the remainder. Loci default to one
// thread per worker in a single process.
PartitionAssignment partition_block(const TorusTopology& topology, std::size_t num_workers,
                                    std::optional<std::size_t> rows_per_band = std::nullopt);

// Rewrites loci so each worker is its own process.
void assign_one_process_per_worker(PartitionAssignment& assignment);

// Directed edges whose endpoints sit on different workers, counted per worker
// as outgoing edges.
std::vector<std::size_t> outgoing_cut_edges(const TorusTopology& topology,
                                            const PartitionAssignment& assignment);

}  // namespace slip
