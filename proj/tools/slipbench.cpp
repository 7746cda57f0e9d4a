#include <cstdio>
#include <exception>
#include <iostream>

#include "slip/bench.hpp"
#include "slip/errors.hpp"

int main(int argc, char** argv) {
  slip::RunConfig config;
  try {
    config = slip::parse_config(argc, argv);
  } catch (const slip::HelpRequested& help) {
    std::cout << help.what();
    return 0;
  } catch (const slip::ConfigError& e) {
    std::cerr << "slipbench: config error: " << e.what() << '\n';
    return 2;
  }

  try {
    const slip::RunRecord record = slip::run_benchmark(config);
    slip::emit_results(record);
    if (record.root) {
      for (const auto& w : record.workers) {
        std::printf("replicate %zu worker %zu: %llu updates in %.3f s (%.1f/s), conflicts %llu -> %llu\n",
                    w.replicate, w.worker_id, static_cast<unsigned long long>(w.record.updates),
                    w.record.wall_seconds, w.update_rate(),
                    static_cast<unsigned long long>(w.initial_conflicts),
                    static_cast<unsigned long long>(w.final_conflicts));
      }
    }
  } catch (const slip::LaunchError& e) {
    std::cerr << "slipbench: launch failed: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "slipbench: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
