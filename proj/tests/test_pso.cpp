#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "flexkin/errors.hpp"
#include "flexkin/pso.hpp"

using namespace flexkin;

namespace {

double sphere(std::span<const double> x) {
  return std::pow(x[0] - 3.0, 2) + std::pow(x[1] - 1.0, 2);
}

double rosenbrock(std::span<const double> x) {
  return std::pow(1.0 - x[0], 2) + 100.0 * std::pow(x[1] - x[0] * x[0], 2);
}

PsoConfig box(double lo, double hi, std::size_t swarm, std::size_t iters, std::uint64_t seed) {
  PsoConfig c;
  c.lower = {lo, lo};
  c.upper = {hi, hi};
  c.swarm_size = swarm;
  c.iterations = iters;
  c.seed = seed;
  return c;
}

void expect_monotone(const PsoResult& r) {
  for (std::size_t i = 1; i < r.convergence.size(); ++i) EXPECT_LE(r.convergence[i], r.convergence[i - 1]);
}

}  // namespace

TEST(Pso, FindsSphereOptimum) {
  const auto r = pso_optimize(box(-10, 10, 30, 100, 1), sphere);
  EXPECT_NEAR(r.best_position[0], 3.0, 1e-3);
  EXPECT_NEAR(r.best_position[1], 1.0, 1e-3);
  EXPECT_EQ(r.convergence.size(), 101u);
  EXPECT_EQ(r.evaluations, 30u * 101u);
  expect_monotone(r);
}

TEST(Pso, SolvesRosenbrock) {
  const auto r = pso_optimize(box(-5, 5, 50, 500, 2), rosenbrock);
  EXPECT_LT(r.best_cost, 1e-2);
  EXPECT_EQ(r.best_cost, rosenbrock(r.best_position));
  expect_monotone(r);
}

TEST(Pso, SeededRunsRepeat) {
  auto cfg = box(-5, 5, 20, 40, 9);
  const auto a = pso_optimize(cfg, rosenbrock);
  const auto b = pso_optimize(cfg, rosenbrock);
  EXPECT_EQ(a.convergence, b.convergence);
  EXPECT_EQ(a.best_position, b.best_position);
  cfg.threads = 3;
  const auto c = pso_optimize(cfg, rosenbrock);
  EXPECT_EQ(a.convergence, c.convergence);
  cfg.seed = 10;
  EXPECT_NE(pso_optimize(cfg, rosenbrock).convergence, a.convergence);
}

TEST(Pso, StaysInsideBounds) {
  auto cfg = box(0.5, 2.0, 10, 30, 3);
  const auto r = pso_optimize(cfg, [](std::span<const double> x) {
    EXPECT_GE(x[0], 0.5);
    EXPECT_LE(x[0], 2.0);
    EXPECT_GE(x[1], 0.5);
    EXPECT_LE(x[1], 2.0);
    return sphere(x);
  });
  EXPECT_NEAR(r.best_position[0], 2.0, 1e-9);
  EXPECT_NEAR(r.best_position[1], 1.0, 1e-3);
}

TEST(Pso, RejectsNonFiniteCosts) {
  const auto r = pso_optimize(box(-5, 5, 10, 20, 4), [](std::span<const double> x) {
    return x[0] > 0.0 ? std::numeric_limits<double>::quiet_NaN() : sphere(x);
  });
  EXPECT_GT(r.rejected, 0u);
  EXPECT_LE(r.best_position[0], 0.0);
  EXPECT_TRUE(std::isfinite(r.best_cost));
}

TEST(Pso, InitialPositionIsEvaluated) {
  auto cfg = box(-5, 5, 5, 0, 5);
  cfg.initial_positions = {{3.0, 1.0}};
  const auto r = pso_optimize(cfg, sphere);
  EXPECT_EQ(r.best_cost, 0.0);
}

TEST(Pso, ValidatesConfig) {
  auto cfg = box(-1, 1, 1, 10, 0);
  EXPECT_THROW(pso_optimize(cfg, sphere), ArgumentError);
  cfg = box(1, -1, 10, 10, 0);
  EXPECT_THROW(pso_optimize(cfg, sphere), ArgumentError);
  cfg = box(-1, 1, 10, 10, 0);
  cfg.initial_positions = {{0.0}};
  EXPECT_THROW(pso_optimize(cfg, sphere), ArgumentError);
}
