#pragma once

#include <Eigen/Core>
#include <cstddef>
#include <vector>

#include "flexkin/chain_model.hpp"
#include "flexkin/imu_synth.hpp"

namespace flexkin {

/// Below this |(A, B)| the gravity reference is considered lost.
inline constexpr double kDegenerateQuality = 1e-3;

struct JointMeasurement {
  double theta_meas = 0.0;
  double theta_dot_meas = 0.0;
  double quality = 0.0;  ///< sqrt(A^2 + B^2)
};

struct AngleEstimate {
  double theta = 0.0;
  double quality = 0.0;
};

/**
 * Acceleration of P_i relative to P_{i-1}, expressed in S_i:
 *
 *   (w'_i x) r_i + (w_i x)(w_i x) r_i - R^T [(w'_{i-1} x) r' + (w_{i-1} x)^2 r']
 *
 * with r_i = ^i_{i-1}r_{P_i}, r' = ^{i-1}_{i-1}r_{P_{i-1}} and R = R_x(align).
 * `joint` is 0-based: joint j couples IMU j (proximal) and IMU j + 1 (distal).
 * `align` rotates the proximal term into S_i; 0 gives the unrotated form.
 */
Eigen::Vector3d relative_accel_term(const ImuSample& distal, const ImuSample& proximal,
                                    const SegmentChain& chain, std::size_t joint,
                                    const Eigen::Vector3d& distal_rate_derivative,
                                    const Eigen::Vector3d& proximal_rate_derivative,
                                    double align = 0.0);

/// theta = atan2(A, B) from the proximal specific force and the distal
/// specific force minus the relative term. Throws DegenerateGeometryError
/// when sqrt(A^2 + B^2) < kDegenerateQuality.
AngleEstimate estimate_joint_angle(const ImuSample& proximal, const ImuSample& distal,
                                   const Eigen::Vector3d& rel_accel);

/// x-component of ^i w_meas - R_x(theta)^T ^{i-1}w_meas.
double estimate_joint_rate(const ImuSample& proximal, const ImuSample& distal, double theta);

/// Causal angular-acceleration estimate from gyro samples: backward
/// difference followed by a two-sample moving average. First output is 0.
class RateDifferentiator {
 public:
  explicit RateDifferentiator(double sample_period);

  Eigen::Vector3d update(const Eigen::Vector3d& rate);
  void reset();

 private:
  double dt_;
  bool has_rate_ = false;
  bool has_diff_ = false;
  Eigen::Vector3d last_rate_ = Eigen::Vector3d::Zero();
  Eigen::Vector3d last_diff_ = Eigen::Vector3d::Zero();
};

/// Per-joint measurement traces (index [joint][sample]).
struct JointMeasurementTrace {
  std::vector<std::vector<double>> theta_meas;
  std::vector<std::vector<double>> theta_dot_meas;
  std::vector<std::vector<double>> quality;
  std::size_t degenerate_samples = 0;

  std::size_t joints() const { return theta_meas.size(); }
  std::size_t samples() const { return theta_meas.empty() ? 0 : theta_meas.front().size(); }
};

/**
 * Runs the pairwise estimator over aligned IMU traces.
 *
 * The proximal relative-acceleration term is rotated with the previous
 * angle estimate, then refined once with the fresh estimate. On degenerate
 * geometry the joint angle is propagated with the measured rate instead.
 */
JointMeasurementTrace estimate_joints(const SegmentChain& chain,
                                      const std::vector<ImuTrace>& traces,
                                      double sample_period);

}  // namespace flexkin
