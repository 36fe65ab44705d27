#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <string>
#include <vector>

#include "flexkin/chain_model.hpp"

namespace flexkin {

/// Constant bias plus i.i.d. Gaussian white noise, per IMU.
struct ImuErrorModel {
  Eigen::Vector3d gyro_bias = Eigen::Vector3d::Zero();   ///< rad/s
  Eigen::Vector3d accel_bias = Eigen::Vector3d::Zero();  ///< m/s^2
  double gyro_noise_std = 0.0;                           ///< rad/s per sample
  double accel_noise_std = 0.0;                          ///< m/s^2 per sample
  std::uint64_t seed = 0;
};

struct ImuSample {
  double t = 0.0;
  Eigen::Vector3d gyro = Eigen::Vector3d::Zero();
  Eigen::Vector3d accel = Eigen::Vector3d::Zero();
};

using ImuTrace = std::vector<ImuSample>;

/// theta(t) = offset + amplitude * sin(omega * t + phase)
struct JointSinusoid {
  double offset = 0.0;
  double amplitude = 0.0;
  double phase = 0.0;
};

/// High-frequency angle perturbation on the inter-segment joints (2..n).
struct Ripple {
  double amplitude = 0.0;     ///< rad
  double frequency_hz = 0.0;
};

/// Unsensed gravity droop of the tip, added to the ground truth only.
/// With total angle T: dy = d cos T sin T, dz = -d cos^2 T, dtheta = -r cos T.
struct ModelMismatch {
  double tip_droop = 0.0;      ///< d, m
  double tip_rotation = 0.0;   ///< r, rad

  bool enabled() const { return tip_droop != 0.0 || tip_rotation != 0.0; }
  Pose2D apply(const Pose2D& pose) const;
};

struct SimScenario {
  std::vector<JointSinusoid> joints;   ///< one per segment
  double omega = 0.1;                  ///< trajectory angular frequency, rad/s
  double duration = 60.0;              ///< s
  double sample_period = 0.001;        ///< s
  std::string payload_tag = "none";
  Ripple ripple;
  ModelMismatch mismatch;

  std::size_t sample_count() const;
  void validate(std::size_t segments) const;

  /// Exact joint angles, rates and accelerations at local time t.
  JointState joint_state(double t) const;
};

/// Ground truth sampled at the IMU instants.
struct GroundTruth {
  std::vector<double> t;
  std::vector<Pose2D> pose;
  std::vector<JointState> joints;
};

struct SimulationResult {
  std::vector<ImuTrace> imu;  ///< one trace per IMU (n + 1)
  GroundTruth truth;
};

/// Specific force a_meas = ^i r''_{P_i} - ^W R_i^T g + b_a + n_a and
/// rate w_meas = ^i w_i + b_w + n_w for every IMU, sample by sample.
SimulationResult simulate(const SegmentChain& chain, const SimScenario& scenario,
                          const std::vector<ImuErrorModel>& errors);

/// Runs scenarios back to back on one uniform time base. Scenario k uses
/// error seeds mixed with k so noise streams never repeat.
SimulationResult simulate_batch(const SegmentChain& chain,
                                const std::vector<SimScenario>& scenarios,
                                const std::vector<ImuErrorModel>& errors);

}  // namespace flexkin
