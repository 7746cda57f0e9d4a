#include "slip/topology.hpp"

#include <stdexcept>
#include <string>

#include "slip/errors.hpp"

namespace slip {

std::string_view to_string(Direction d) noexcept {
  switch (d) {
    case Direction::Left: return "left";
    case Direction::Right: return "right";
    case Direction::Up: return "up";
    case Direction::Down: return "down";
  }
  return "?";
}

TorusTopology::TorusTopology(std::size_t width, std::size_t height) : width_(width), height_(height) {
  if (width == 0 || height == 0) {
    throw InvalidDimensions("torus dimensions must be positive, got " + std::to_string(width) +
                            "x" + std::to_string(height));
  }
}

NodeId TorusTopology::neighbor(NodeId n, Direction d) const noexcept {
  const std::size_t x = column(n);
  const std::size_t y = row(n);
  switch (d) {
    case Direction::Left: return node_at((x + width_ - 1) % width_, y);
    case Direction::Right: return node_at((x + 1) % width_, y);
    case Direction::Up: return node_at(x, (y + height_ - 1) % height_);
    case Direction::Down: return node_at(x, (y + 1) % height_);
  }
  return n;
}

std::vector<UndirectedEdge> TorusTopology::undirected_edges() const {
  std::vector<UndirectedEdge> edges;
  edges.reserve(2 * node_count());
  for (NodeId n = 0; n < node_count(); ++n) {
    edges.push_back({n, neighbor(n, Direction::Right)});
    edges.push_back({n, neighbor(n, Direction::Down)});
  }
  return edges;
}

TorusTopology build_torus(std::size_t width, std::size_t height) {
  return TorusTopology(width, height);
}

PartitionAssignment partition_block(const TorusTopology& topology, std::size_t num_workers,
                                    std::optional<std::size_t> rows_per_band) {
  if (num_workers == 0) throw std::invalid_argument("partition needs at least one worker");
  const std::size_t n = topology.node_count();
  PartitionAssignment out;
  out.owner.resize(n);
  out.members.resize(num_workers);
  out.loci.resize(num_workers);
  for (WorkerId w = 0; w < num_workers; ++w) out.loci[w] = WorkerLocus{0, w};

  for (NodeId node = 0; node < n; ++node) {
    WorkerId w = 0;
    if (rows_per_band && *rows_per_band > 0) {
      w = std::min(topology.row(node) / *rows_per_band, num_workers - 1);
    } else {
      // Balanced split: the first n % k workers get one extra node.
      const std::size_t base = n / num_workers;
      const std::size_t extra = n % num_workers;
      const std::size_t big_span = extra * (base + 1);
      w = node < big_span ? node / (base + 1) : extra + (node - big_span) / (base == 0 ? 1 : base);
    }
    out.owner[node] = w;
    out.members[w].push_back(node);
  }
  return out;
}

void assign_one_process_per_worker(PartitionAssignment& assignment) {
  for (WorkerId w = 0; w < assignment.loci.size(); ++w) assignment.loci[w] = WorkerLocus{w, 0};
}

std::vector<std::size_t> outgoing_cut_edges(const TorusTopology& topology,
                                            const PartitionAssignment& assignment) {
  std::vector<std::size_t> counts(assignment.worker_count(), 0);
  for (NodeId n = 0; n < topology.node_count(); ++n) {
    for (Direction d : kDirections) {
      if (assignment.owner[n] != assignment.owner[topology.neighbor(n, d)]) {
        ++counts[assignment.owner[n]];
      }
    }
  }
  return counts;
}

}  // namespace slip
