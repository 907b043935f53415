#pragma once

#include <cstdint>
#include <vector>

#include "bmrep/expr.hpp"
#include "bmrep/path.hpp"

namespace bmrep {

struct TimeGrid {
  std::vector<double> times;  // strictly increasing, starting at 0

  static TimeGrid uniform(double horizon, double step);
  double max_step() const;
};

struct MCEstimate {
  double mean = 0.0;
  double standard_error = 0.0;
  std::uint64_t samples = 0;
  std::uint64_t seed = 0;
  double grid_step = 0.0;
};

struct MCOptions {
  unsigned threads = 0;          // 0: BMREP_THREADS or hardware concurrency
  std::uint64_t block_size = 4096;
};

// Worker count from the BMREP_THREADS environment variable, falling back to
// the hardware concurrency.
unsigned default_thread_count();

// Sample k draws its increments from block k / block_size; every block owns
// an mt19937_64 seeded with seed_seq{seed, block}, and std::normal_distribution
// turns its output into N(0, dt) increments in grid order. Results do not
// depend on the number of workers.
std::vector<std::vector<double>> simulate_paths(const TimeGrid& grid, std::uint64_t n,
                                                std::uint64_t seed,
                                                std::uint64_t block_size = 4096);

// E[F]; the grid is refined with every time argument of F so point values
// are sampled exactly. A functional of point values only is sampled at its
// own times and the grid is not used. MCEstimate::grid_step is the largest
// step actually simulated.
MCEstimate estimate_expectation(const Expr& f, const TimeGrid& grid, std::uint64_t n,
                                std::uint64_t seed, const MCOptions& options = {});

// E[F | F_t] on the given prefix: only increments after t are simulated.
MCEstimate estimate_conditional(const Expr& f, double t, const PathContext& prefix,
                                const TimeGrid& grid, std::uint64_t n, std::uint64_t seed,
                                const MCOptions& options = {});

}  // namespace bmrep
