#include "flexkin/pso.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <string>
#include <thread>

#include "flexkin/errors.hpp"
#include "flexkin/seeding.hpp"

namespace flexkin {

void PsoConfig::validate() const {
  if (swarm_size < 2) throw ArgumentError("PSO swarm_size must be >= 2");
  if (lower.empty() || lower.size() != upper.size())
    throw ArgumentError("PSO bounds must be non-empty and of equal dimension");
  for (std::size_t d = 0; d < lower.size(); ++d) {
    if (!std::isfinite(lower[d]) || !std::isfinite(upper[d]) || !(lower[d] < upper[d]))
      throw ArgumentError("PSO bounds for dimension " + std::to_string(d) +
                          " must be finite with lower < upper");
  }
  for (const auto& p : initial_positions)
    if (p.size() != lower.size())
      throw ArgumentError("PSO initial position has wrong dimension");
  if (initial_positions.size() > swarm_size)
    throw ArgumentError("PSO has more initial positions than particles");
  if (!std::isfinite(inertia) || !std::isfinite(cognitive) || !std::isfinite(social))
    throw ArgumentError("PSO coefficients must be finite");
}

namespace {

struct Particle {
  std::vector<double> x;
  std::vector<double> v;
  std::vector<double> best_x;
  double best_cost = std::numeric_limits<double>::infinity();
  double cost = std::numeric_limits<double>::infinity();
  std::mt19937_64 rng;
};

template <typename Fn>
void for_each_particle(std::size_t count, std::size_t threads, Fn&& fn) {
  threads = std::clamp<std::size_t>(threads, 1, count);
  if (threads == 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::vector<std::jthread> pool;
  for (std::size_t t = 0; t < threads; ++t)
    pool.emplace_back([&, t] {
      for (std::size_t i = t; i < count; i += threads) fn(i);
    });
}

}  // namespace

PsoResult pso_optimize(const PsoConfig& config, const Objective& objective) {
  config.validate();
  const std::size_t dims = config.lower.size();
  const double worst = std::numeric_limits<double>::infinity();

  std::vector<Particle> swarm(config.swarm_size);
  for (std::size_t i = 0; i < swarm.size(); ++i) {
    auto& p = swarm[i];
    p.rng.seed(derive_seed(config.seed, i));
    p.x.resize(dims);
    p.v.resize(dims);
    for (std::size_t d = 0; d < dims; ++d) {
      const double span = config.upper[d] - config.lower[d];
      p.x[d] = config.lower[d] + span * uniform01(p.rng);
      p.v[d] = 0.1 * span * (2.0 * uniform01(p.rng) - 1.0);
    }
    if (i < config.initial_positions.size())
      for (std::size_t d = 0; d < dims; ++d)
        p.x[d] = std::clamp(config.initial_positions[i][d], config.lower[d], config.upper[d]);
  }

  PsoResult result;
  std::size_t rejected = 0;

  auto evaluate_all = [&] {
    std::vector<char> bad(swarm.size(), 0);
    for_each_particle(swarm.size(), config.threads, [&](std::size_t i) {
      const double c = objective(swarm[i].x);
      if (std::isfinite(c)) {
        swarm[i].cost = c;
      } else {
        swarm[i].cost = worst;
        bad[i] = 1;
      }
    });
    for (std::size_t i = 0; i < swarm.size(); ++i) {
      if (bad[i]) {
        ++rejected;
        spdlog::warn("PSO: non-finite objective at particle {}, candidate rejected", i);
      }
      if (swarm[i].cost < swarm[i].best_cost) {
        swarm[i].best_cost = swarm[i].cost;
        swarm[i].best_x = swarm[i].x;
      }
    }
    result.evaluations += swarm.size();
  };

  auto update_global = [&] {
    for (const auto& p : swarm) {
      if (!p.best_x.empty() && (result.best_position.empty() || p.best_cost < result.best_cost)) {
        result.best_cost = p.best_cost;
        result.best_position = p.best_x;
      }
    }
    if (result.best_position.empty()) {
      // Every candidate so far was rejected; keep the first particle as a placeholder.
      result.best_position = swarm.front().x;
      result.best_cost = worst;
    }
    result.convergence.push_back(result.best_cost);
  };

  evaluate_all();
  update_global();

  for (std::size_t it = 0; it < config.iterations; ++it) {
    const std::vector<double> gbest = result.best_position;
    for (auto& p : swarm) {
      const std::vector<double>& pbest = p.best_x.empty() ? p.x : p.best_x;
      for (std::size_t d = 0; d < dims; ++d) {
        const double span = config.upper[d] - config.lower[d];
        const double r1 = uniform01(p.rng);
        const double r2 = uniform01(p.rng);
        double v = config.inertia * p.v[d] + config.cognitive * r1 * (pbest[d] - p.x[d]) +
                   config.social * r2 * (gbest[d] - p.x[d]);
        v = std::clamp(v, -span, span);
        double x = p.x[d] + v;
        if (x < config.lower[d]) {
          x = config.lower[d];
          v = 0.0;
        } else if (x > config.upper[d]) {
          x = config.upper[d];
          v = 0.0;
        }
        p.x[d] = x;
        p.v[d] = v;
      }
    }
    evaluate_all();
    update_global();
  }
  result.rejected = rejected;
  return result;
}

}  // namespace flexkin
