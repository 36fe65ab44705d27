#include "flexkin/gain_tuner.hpp"

#include <cmath>
#include <limits>

#include "flexkin/errors.hpp"

namespace flexkin {

TuningProblem::TuningProblem(SegmentChain chain, const AlignedDataset& dataset,
                             CostWeights weights)
    : chain_(std::move(chain)), sample_period_(dataset.sample_period), weights_(weights) {
  dataset.validate();
  weights_.validate();
  joints_ = estimate_joints(chain_, dataset.imu, dataset.sample_period);
  truth_ = dataset.truth;
}

TuningProblem::TuningProblem(SegmentChain chain, JointMeasurementTrace joints,
                             std::vector<Pose2D> truth, double sample_period,
                             CostWeights weights)
    : chain_(std::move(chain)),
      joints_(std::move(joints)),
      truth_(std::move(truth)),
      sample_period_(sample_period),
      weights_(weights) {
  weights_.validate();
  if (joints_.samples() != truth_.size())
    throw ArgumentError("TuningProblem: joint measurements and truth are not aligned");
}

CostBreakdown TuningProblem::evaluate(const FilterGains& gains) const {
  const auto poses = filtered_poses(chain_, joints_, gains, sample_period_);
  return cost_breakdown(poses, truth_, weights_, sample_period_);
}

PsoConfig default_gain_search(std::uint64_t seed) {
  PsoConfig c;
  c.lower = {FilterGains::kMinKp, FilterGains::kMinKi};
  c.upper = {FilterGains::kMaxKp, FilterGains::kMaxKi};
  c.seed = seed;
  return c;
}

TuningResult tune_gains(const TuningProblem& problem, PsoConfig config) {
  const FilterGains reference = FilterGains::reference();
  config.initial_positions.insert(config.initial_positions.begin(), {reference.k_p, reference.k_i});
  if (config.initial_positions.size() > config.swarm_size)
    config.initial_positions.resize(config.swarm_size);

  TuningResult result;
  result.reference_breakdown = problem.evaluate(reference);
  const double error_cap = result.reference_breakdown.error_penalty;
  result.search = pso_optimize(config, [&](std::span<const double> x) {
    try {
      const auto c = problem.evaluate({x[0], x[1]});
      if (c.error_penalty <= error_cap) return c.penalty_sum();
      // Infeasible: ranked behind every feasible point, then by the excess.
      return kInfeasibleCost + (c.error_penalty - error_cap);
    } catch (const PropagationError&) {
      return std::numeric_limits<double>::quiet_NaN();
    }
  });
  result.gains = {result.search.best_position[0], result.search.best_position[1]};
  result.breakdown = problem.evaluate(result.gains);
  return result;
}

}  // namespace flexkin
