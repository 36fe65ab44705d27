#pragma once

#include <vector>

#include "flexkin/cost.hpp"
#include "flexkin/pso.hpp"

namespace flexkin {

/// Gain-independent part of the tuning run, computed once: joint
/// measurements from the IMU traces plus the aligned ground truth.
class TuningProblem {
 public:
  TuningProblem(SegmentChain chain, const AlignedDataset& dataset, CostWeights weights);
  TuningProblem(SegmentChain chain, JointMeasurementTrace joints, std::vector<Pose2D> truth,
                double sample_period, CostWeights weights);

  /// Same result as evaluate_gains() on the originating dataset.
  CostBreakdown evaluate(const FilterGains& gains) const;

  const CostWeights& weights() const { return weights_; }
  std::size_t samples() const { return truth_.size(); }

 private:
  SegmentChain chain_;
  JointMeasurementTrace joints_;
  std::vector<Pose2D> truth_;
  double sample_period_;
  CostWeights weights_;
};

struct TuningResult {
  FilterGains gains;
  CostBreakdown breakdown;
  CostBreakdown reference_breakdown;  ///< at FilterGains::reference()
  PsoResult search;
};

/// PSO config over (k_p, k_i) with the documented tuning bounds.
PsoConfig default_gain_search(std::uint64_t seed);

/// Added to the objective of gains whose error penalty exceeds the one at the
/// reference gains.
inline constexpr double kInfeasibleCost = 1e15;

/// Minimizes the penalty sum over (k_p, k_i) subject to
/// error_penalty <= error_penalty(reference). The reference gains seed
/// particle 0, so the result is never worse than the reference on either.
TuningResult tune_gains(const TuningProblem& problem, PsoConfig config);

}  // namespace flexkin
