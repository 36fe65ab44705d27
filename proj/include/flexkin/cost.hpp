#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "flexkin/aligned_dataset.hpp"
#include "flexkin/chain_model.hpp"
#include "flexkin/complementary_filter.hpp"
#include "flexkin/joint_estimator.hpp"

namespace flexkin {

struct CostWeights {
  double k_delay = 200.0;
  double k_noise = 5e6;
  double k_error = 1.0;
  double hpf_cutoff_hz = 5.0;
  std::size_t peak_buffer = 1000;  ///< samples

  void validate() const;
};

/// `total` follows the sign convention J = -(delay + noise + error); the
/// tuner minimizes penalty_sum(), i.e. maximizes J.
struct CostBreakdown {
  double delay_penalty = 0.0;
  double noise_penalty = 0.0;
  double error_penalty = 0.0;
  double total = 0.0;

  double penalty_sum() const { return delay_penalty + noise_penalty + error_penalty; }
  static CostBreakdown from_parts(double delay, double noise, double error) {
    return {delay, noise, error, -(delay + noise + error)};
  }
  friend bool operator==(const CostBreakdown&, const CostBreakdown&) = default;
};

/// Window ranges below this are treated as "no peak" (m).
inline constexpr double kNoPeakRange = 1e-6;

/// K_delay * sum_k T_s |loc_est - loc_gt| T_s, where loc_* are the argmax
/// indices of the trailing peak_buffer-sample window ending at k. Only full
/// windows count (k >= peak_buffer - 1).
double delay_penalty(std::span<const double> est_z, std::span<const double> gt_z,
                     const CostWeights& weights, double sample_period);

/// K_noise * sum_k |HPF{P[k] - P[k-1]}| T_s with P = sqrt(y^2 + z^2) and a
/// first-order high-pass at hpf_cutoff_hz.
double noise_penalty(std::span<const double> y, std::span<const double> z,
                     const CostWeights& weights, double sample_period);

/// K_error * sum_k |(y, z)_est - (y, z)_gt| T_s.
double error_penalty(std::span<const Pose2D> est, std::span<const Pose2D> gt,
                     const CostWeights& weights, double sample_period);

CostBreakdown cost_breakdown(std::span<const Pose2D> est, std::span<const Pose2D> gt,
                             const CostWeights& weights, double sample_period);

/// Filters every joint and maps the filtered angles through forward kinematics.
std::vector<Pose2D> filtered_poses(const SegmentChain& chain, const JointMeasurementTrace& joints,
                                   const FilterGains& gains, double sample_period);

/// Raw (unfiltered) poses from the measured joint angles.
std::vector<Pose2D> measured_poses(const SegmentChain& chain, const JointMeasurementTrace& joints);

/// Joint estimation -> filtering -> forward kinematics -> penalties.
CostBreakdown evaluate_gains(const FilterGains& gains, const SegmentChain& chain,
                             const AlignedDataset& dataset, const CostWeights& weights);

}  // namespace flexkin
