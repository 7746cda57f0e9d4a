#include "slip/coloring_worker.hpp"

#include <thread>

namespace slip {

ColoringWorker::ColoringWorker(ChannelRegistry<Color>& registry, WorkerId worker,
                               ColoringWorkerOptions options)
    : registry_(registry),
      worker_(worker),
      options_(options),
      clock_(registry.clock(worker)),
      burner_(derive_seed(options.seed, 0x10000000ull + worker)),
      jitter_rng_(derive_seed(options.seed, 0x20000000ull + worker)) {
  options_.params.validate();
  const TorusTopology& topo = registry.topology();
  require_simple_topology(topo);
  for (NodeId n = 0; n < topo.node_count(); ++n) {
    const auto& self = registry.entry({n, Direction::Left});
    if (self.source_worker != worker) continue;
    Node node;
    node.id = n;
    node.state = init_node(options_.params, options_.seed, n);
    for (Direction d : kDirections) {
      const auto i = static_cast<std::size_t>(d);
      auto& out_entry = registry.entry({n, d});
      node.out[i] = &out_entry.inlet.value();
      node.out_local[i] = out_entry.kind == DuctKind::IntraThread;
      node.in[i] = &registry.outlet_into(n, d);
      auto& in_entry = registry.entry({topo.neighbor(n, d), opposite(d)});
      node.in_local[i] = in_entry.kind == DuctKind::IntraThread;
    }
    nodes_.push_back(std::move(node));
  }
}

void ColoringWorker::send(Node& node, Color color) {
  for (std::size_t i = 0; i < 4; ++i) {
    if (communicate_ || node.out_local[i]) node.out[i]->try_put(color);
  }
}

void ColoringWorker::prime() {
  for (auto& node : nodes_) send(node, node.state.current_color);
  if (communicate_) registry_.flush_pools(worker_);
}

void ColoringWorker::update() {
  std::array<Color, 4> seen{};
  for (auto& node : nodes_) {
    for (std::size_t i = 0; i < 4; ++i) {
      Outlet<Color>& in = *node.in[i];
      if (!communicate_ && !node.in_local[i]) {
        seen[i] = in.last();
      } else if (options_.read == ReadMode::Jump) {
        seen[i] = in.jump();
      } else {
        seen[i] = in.try_step().value;
      }
    }
    send(node, coloring_update(node.state, seen, options_.params));
  }
  if (communicate_) registry_.flush_pools(worker_);
  if (options_.compute_work_units > 0) burner_.burn(options_.compute_work_units);
  if (options_.jitter.count() > 0) {
    const auto pause = static_cast<std::int64_t>(jitter_rng_.uniform() *
                                                 static_cast<double>(options_.jitter.count()));
    std::this_thread::sleep_for(std::chrono::nanoseconds(pause));
  }
  ++updates_;
  clock_->tick();
}

std::vector<NodeId> ColoringWorker::nodes() const {
  std::vector<NodeId> out;
  out.reserve(nodes_.size());
  for (const auto& n : nodes_) out.push_back(n.id);
  return out;
}

std::vector<Color> ColoringWorker::colors() const {
  std::vector<Color> out;
  out.reserve(nodes_.size());
  for (const auto& n : nodes_) out.push_back(n.state.current_color);
  return out;
}

}  // namespace slip
