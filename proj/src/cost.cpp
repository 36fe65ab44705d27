#include "flexkin/cost.hpp"

#include <cmath>
#include <deque>
#include <numbers>
#include <string>

#include "flexkin/errors.hpp"

namespace flexkin {

void CostWeights::validate() const {
  if (!(k_delay >= 0.0) || !(k_noise >= 0.0) || !(k_error >= 0.0))
    throw ArgumentError("cost weights must be >= 0");
  if (!(hpf_cutoff_hz > 0.0)) throw ArgumentError("hpf_cutoff_hz must be > 0");
  if (peak_buffer == 0) throw ArgumentError("peak_buffer must be >= 1 sample");
}

namespace {

/// Trailing-window extrema; ties resolve to the earliest index.
class WindowExtrema {
 public:
  WindowExtrema(std::span<const double> x, std::size_t window) : x_(x), window_(window) {}

  void push(std::size_t k) {
    while (!max_.empty() && x_[max_.back()] < x_[k]) max_.pop_back();
    max_.push_back(k);
    while (!min_.empty() && x_[min_.back()] > x_[k]) min_.pop_back();
    min_.push_back(k);
    if (k >= window_) {
      const std::size_t oldest = k - window_ + 1;
      while (max_.front() < oldest) max_.pop_front();
      while (min_.front() < oldest) min_.pop_front();
    }
  }

  std::size_t argmax() const { return max_.front(); }
  double range() const { return x_[max_.front()] - x_[min_.front()]; }

 private:
  std::span<const double> x_;
  std::size_t window_;
  std::deque<std::size_t> max_;
  std::deque<std::size_t> min_;
};

}  // namespace

double delay_penalty(std::span<const double> est_z, std::span<const double> gt_z,
                     const CostWeights& weights, double sample_period) {
  if (est_z.size() != gt_z.size())
    throw ArgumentError("delay_penalty: traces differ in length");
  if (est_z.size() < weights.peak_buffer)
    throw ArgumentError("delay_penalty: trace of " + std::to_string(est_z.size()) +
                        " samples is shorter than the peak buffer (" +
                        std::to_string(weights.peak_buffer) + ")");
  WindowExtrema est(est_z, weights.peak_buffer);
  WindowExtrema gt(gt_z, weights.peak_buffer);
  double sum = 0.0;
  for (std::size_t k = 0; k < est_z.size(); ++k) {
    est.push(k);
    gt.push(k);
    if (k + 1 < weights.peak_buffer) continue;
    if (est.range() < kNoPeakRange || gt.range() < kNoPeakRange) continue;
    const double lag = std::abs(static_cast<double>(est.argmax()) - static_cast<double>(gt.argmax()));
    sum += sample_period * lag * sample_period;
  }
  return weights.k_delay * sum;
}

double noise_penalty(std::span<const double> y, std::span<const double> z,
                     const CostWeights& weights, double sample_period) {
  if (y.size() != z.size()) throw ArgumentError("noise_penalty: traces differ in length");
  if (y.size() < 2) throw ArgumentError("noise_penalty: need at least 2 samples");
  const double rc = 1.0 / (2.0 * std::numbers::pi * weights.hpf_cutoff_hz);
  const double alpha = rc / (rc + sample_period);

  double prev_p = std::hypot(y[0], z[0]);
  double prev_x = 0.0;
  double prev_out = 0.0;
  double sum = 0.0;
  for (std::size_t k = 1; k < y.size(); ++k) {
    const double p = std::hypot(y[k], z[k]);
    const double x = p - prev_p;
    prev_p = p;
    if (k == 1) prev_x = x;  // start the high-pass at rest
    const double out = alpha * (prev_out + x - prev_x);
    prev_x = x;
    prev_out = out;
    sum += std::abs(out) * sample_period;
  }
  return weights.k_noise * sum;
}

double error_penalty(std::span<const Pose2D> est, std::span<const Pose2D> gt,
                     const CostWeights& weights, double sample_period) {
  if (est.size() != gt.size()) throw ArgumentError("error_penalty: traces differ in length");
  double sum = 0.0;
  for (std::size_t k = 0; k < est.size(); ++k)
    sum += std::hypot(est[k].y - gt[k].y, est[k].z - gt[k].z) * sample_period;
  return weights.k_error * sum;
}

CostBreakdown cost_breakdown(std::span<const Pose2D> est, std::span<const Pose2D> gt,
                             const CostWeights& weights, double sample_period) {
  weights.validate();
  if (est.size() != gt.size()) throw ArgumentError("cost: traces differ in length");
  std::vector<double> ey(est.size()), ez(est.size()), gz(gt.size());
  for (std::size_t k = 0; k < est.size(); ++k) {
    ey[k] = est[k].y;
    ez[k] = est[k].z;
    gz[k] = gt[k].z;
  }
  return CostBreakdown::from_parts(delay_penalty(ez, gz, weights, sample_period),
                                   noise_penalty(ey, ez, weights, sample_period),
                                   error_penalty(est, gt, weights, sample_period));
}

std::vector<Pose2D> filtered_poses(const SegmentChain& chain, const JointMeasurementTrace& joints,
                                   const FilterGains& gains, double sample_period) {
  if (joints.joints() != chain.segments())
    throw ArgumentError("filtered_poses: joint count does not match the chain");
  const std::size_t n = joints.samples();
  std::vector<std::vector<double>> filtered(joints.joints());
  for (std::size_t j = 0; j < joints.joints(); ++j)
    filtered[j] = filter_trace(gains, joints.theta_meas[j], joints.theta_dot_meas[j],
                               sample_period, j);
  std::vector<Pose2D> poses(n);
  std::vector<double> angles(joints.joints());
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t j = 0; j < angles.size(); ++j) angles[j] = filtered[j][k];
    poses[k] = forward_kinematics(chain, angles);
  }
  return poses;
}

std::vector<Pose2D> measured_poses(const SegmentChain& chain, const JointMeasurementTrace& joints) {
  if (joints.joints() != chain.segments())
    throw ArgumentError("measured_poses: joint count does not match the chain");
  std::vector<Pose2D> poses(joints.samples());
  std::vector<double> angles(joints.joints());
  for (std::size_t k = 0; k < poses.size(); ++k) {
    for (std::size_t j = 0; j < angles.size(); ++j) angles[j] = joints.theta_meas[j][k];
    poses[k] = forward_kinematics(chain, angles);
  }
  return poses;
}

CostBreakdown evaluate_gains(const FilterGains& gains, const SegmentChain& chain,
                             const AlignedDataset& dataset, const CostWeights& weights) {
  dataset.validate();
  const auto joints = estimate_joints(chain, dataset.imu, dataset.sample_period);
  const auto poses = filtered_poses(chain, joints, gains, dataset.sample_period);
  return cost_breakdown(poses, dataset.truth, weights, dataset.sample_period);
}

}  // namespace flexkin
