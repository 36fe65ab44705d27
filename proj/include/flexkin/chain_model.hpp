#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>
#include <cstddef>
#include <span>
#include <vector>

namespace flexkin {

/// End-effector pose in the vertical y-z plane.
struct Pose2D {
  double y = 0.0;
  double z = 0.0;
  double theta = 0.0;
};

/**
 * Planar approximation of a flexible link as n rigid segments joined by
 * revolute joints about x.
 *
 * Frame S_i sits at the distal end of segment i; S_0 is the base frame.
 * Segment i points along +y of S_i. There are n + 1 IMUs: IMU 0 is mounted
 * on the base body and IMU k (k >= 1) on segment k.
 */
struct SegmentChain {
  std::vector<double> lengths;

  /// imu_mounts[0]: position of P_0 relative to S_0, expressed in S_0.
  /// imu_mounts[k], k >= 1: position of P_k relative to S_{k-1} (the proximal
  /// joint of segment k), expressed in S_k.
  std::vector<Eigen::Vector3d> imu_mounts;

  Eigen::Vector3d gravity{0.0, 0.0, -9.81};

  /// Skip the plausibility range on |gravity| (tests use zero gravity).
  bool gravity_override = false;

  /// n equal segments spanning total_length; IMU k sits at mount_fraction of
  /// segment k measured from its proximal joint, IMU 0 at the base origin.
  static SegmentChain uniform(std::size_t segments, double total_length,
                              double mount_fraction = 1.0);

  std::size_t segments() const { return lengths.size(); }
  std::size_t imu_count() const { return lengths.size() + 1; }
  double total_length() const;

  /// Constant vector of P_k relative to S_{k-1}, in S_k (k >= 1).
  Eigen::Vector3d offset_from_proximal_joint(std::size_t k) const;

  /// Constant vector of P_k relative to S_k, in S_k (any k).
  Eigen::Vector3d offset_from_frame_origin(std::size_t k) const;

  /// Throws ArgumentError on violated invariants.
  void validate() const;
};

/// Joint angles, rates and (optionally) accelerations; accels empty = absent.
struct JointState {
  std::vector<double> angles;
  std::vector<double> rates;
  std::vector<double> accels;
};

/// Motion of the base frame S_0 in the world. Rotation is restricted to x.
struct BaseMotion {
  Eigen::Vector3d position = Eigen::Vector3d::Zero();
  Eigen::Vector3d velocity = Eigen::Vector3d::Zero();
  Eigen::Vector3d acceleration = Eigen::Vector3d::Zero();
  double angle = 0.0;
  double rate = 0.0;
  double accel = 0.0;
};

/// True kinematics of one IMU frame P_k.
struct ImuKinematics {
  Eigen::Vector3d local_accel;         ///< ^k r''_{P_k}, in P_k
  Eigen::Vector3d angular_velocity;    ///< ^k omega_k
  Eigen::Vector3d angular_accel;       ///< ^k omega'_k
  Eigen::Vector3d world_position;
  double world_angle = 0.0;            ///< rotation of S_k about world x
};

/// x-axis rotation ^{i-1}R_i for joint angle theta.
Eigen::Matrix3d relative_rotation(double theta);

/// y = sum l_i cos(phi_i), z = sum l_i sin(phi_i), theta = wrap(sum theta_i)
/// with phi_i the cumulative angle of segment i.
Pose2D forward_kinematics(const SegmentChain& chain, std::span<const double> angles);

/// Local-frame acceleration and angular velocity of every IMU frame for the
/// given joint state and base motion. Gravity is not included.
std::vector<ImuKinematics> propagate_imu_kinematics(const SegmentChain& chain,
                                                    const JointState& state,
                                                    const BaseMotion& base = {});

inline Eigen::Matrix3d skew(const Eigen::Vector3d& v) {
  Eigen::Matrix3d m;
  m << 0.0, -v.z(), v.y(), v.z(), 0.0, -v.x(), -v.y(), v.x(), 0.0;
  return m;
}

}  // namespace flexkin
