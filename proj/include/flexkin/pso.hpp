#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace flexkin {

/// Global-best particle swarm with constriction-equivalent defaults.
struct PsoConfig {
  std::size_t swarm_size = 30;
  std::size_t iterations = 100;
  double inertia = 0.729;
  double cognitive = 1.49445;
  double social = 1.49445;
  std::vector<double> lower;
  std::vector<double> upper;
  std::uint64_t seed = 0;

  /// Optional starting positions for the first particles (clamped to bounds).
  std::vector<std::vector<double>> initial_positions;

  /// Worker threads for particle evaluation; results do not depend on it.
  std::size_t threads = 1;

  void validate() const;
};

struct PsoResult {
  std::vector<double> best_position;
  double best_cost = 0.0;
  /// Best cost after initialization (entry 0) and after every iteration.
  std::vector<double> convergence;
  std::size_t evaluations = 0;
  std::size_t rejected = 0;  ///< non-finite objective values
};

using Objective = std::function<double(std::span<const double>)>;

/// Minimizes `objective` inside the box. Deterministic for a given seed:
/// each particle owns an RNG stream derived from the seed and its index, and
/// the global best is updated once per iteration after all evaluations.
PsoResult pso_optimize(const PsoConfig& config, const Objective& objective);

}  // namespace flexkin
