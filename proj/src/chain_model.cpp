#include "flexkin/chain_model.hpp"

#include <Eigen/Geometry>
#include <cmath>
#include <numeric>
#include <string>

#include "flexkin/angles.hpp"
#include "flexkin/errors.hpp"

namespace flexkin {

namespace {

Eigen::Vector3d along_link(double length) { return {0.0, length, 0.0}; }

Eigen::Matrix3d world_rotation(double angle) {
  return Eigen::AngleAxisd(angle, Eigen::Vector3d::UnitX()).toRotationMatrix();
}

bool finite(const Eigen::Vector3d& v) { return v.allFinite(); }

}  // namespace

SegmentChain SegmentChain::uniform(std::size_t segments, double total_length,
                                   double mount_fraction) {
  if (segments == 0) throw ArgumentError("chain needs at least one segment");
  SegmentChain chain;
  const double l = total_length / static_cast<double>(segments);
  chain.lengths.assign(segments, l);
  chain.imu_mounts.push_back(Eigen::Vector3d::Zero());
  for (std::size_t k = 0; k < segments; ++k)
    chain.imu_mounts.push_back(along_link(mount_fraction * l));
  return chain;
}

double SegmentChain::total_length() const {
  return std::accumulate(lengths.begin(), lengths.end(), 0.0);
}

Eigen::Vector3d SegmentChain::offset_from_proximal_joint(std::size_t k) const {
  if (k == 0 || k >= imu_mounts.size())
    throw ArgumentError("offset_from_proximal_joint: IMU index " + std::to_string(k) +
                        " out of range");
  return imu_mounts[k];
}

Eigen::Vector3d SegmentChain::offset_from_frame_origin(std::size_t k) const {
  if (k >= imu_mounts.size())
    throw ArgumentError("offset_from_frame_origin: IMU index " + std::to_string(k) +
                        " out of range");
  if (k == 0) return imu_mounts[0];
  return imu_mounts[k] - along_link(lengths[k - 1]);
}

void SegmentChain::validate() const {
  if (lengths.empty()) throw ArgumentError("chain needs at least one segment");
  for (std::size_t i = 0; i < lengths.size(); ++i) {
    if (!(lengths[i] > 0.0) || !std::isfinite(lengths[i]))
      throw ArgumentError("segment " + std::to_string(i + 1) +
                          " length must be positive and finite");
  }
  if (imu_mounts.size() != lengths.size() + 1)
    throw ArgumentError("chain with " + std::to_string(lengths.size()) +
                        " segments needs " + std::to_string(lengths.size() + 1) +
                        " IMU mounts, got " + std::to_string(imu_mounts.size()));
  for (const auto& m : imu_mounts)
    if (!finite(m)) throw ArgumentError("IMU mount vectors must be finite");
  if (!finite(gravity)) throw ArgumentError("gravity must be finite");
  const double g = gravity.norm();
  if (!gravity_override && (g < 9.0 || g > 10.5))
    throw ArgumentError("gravity magnitude " + std::to_string(g) +
                        " outside [9.0, 10.5] m/s^2");
}

Eigen::Matrix3d relative_rotation(double theta) {
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  Eigen::Matrix3d r;
  r << 1.0, 0.0, 0.0,
       0.0, c, -s,
       0.0, s, c;
  return r;
}

Pose2D forward_kinematics(const SegmentChain& chain, std::span<const double> angles) {
  if (angles.size() != chain.segments())
    throw ArgumentError("forward_kinematics: expected " +
                        std::to_string(chain.segments()) + " angles, got " +
                        std::to_string(angles.size()));
  Pose2D pose;
  double cumulative = 0.0;
  for (std::size_t i = 0; i < angles.size(); ++i) {
    cumulative += angles[i];
    pose.y += chain.lengths[i] * std::cos(cumulative);
    pose.z += chain.lengths[i] * std::sin(cumulative);
  }
  pose.theta = wrap_angle(cumulative);
  return pose;
}

std::vector<ImuKinematics> propagate_imu_kinematics(const SegmentChain& chain,
                                                    const JointState& state,
                                                    const BaseMotion& base) {
  const std::size_t n = chain.segments();
  if (state.angles.size() != n || state.rates.size() != n)
    throw ArgumentError("propagate_imu_kinematics: joint state must have " +
                        std::to_string(n) + " angles and rates");
  if (state.accels.size() != n)
    throw ArgumentError("propagate_imu_kinematics: joint accelerations are required");
  if (!finite(base.position) || !finite(base.velocity) || !finite(base.acceleration) ||
      !std::isfinite(base.angle) || !std::isfinite(base.rate) || !std::isfinite(base.accel))
    throw ArgumentError("propagate_imu_kinematics: base motion must be finite");

  std::vector<ImuKinematics> out(n + 1);

  double angle = base.angle;
  double rate = base.rate;
  double accel = base.accel;

  auto imu_at = [](const Eigen::Matrix3d& r_world, const Eigen::Vector3d& origin_pos,
                   const Eigen::Vector3d& origin_acc, const Eigen::Vector3d& omega,
                   const Eigen::Vector3d& omega_dot, const Eigen::Vector3d& offset,
                   double world_angle) {
    // Rigid-body transport from the frame origin to the IMU, local frame.
    ImuKinematics k;
    k.local_accel = r_world.transpose() * origin_acc + omega_dot.cross(offset) +
                    omega.cross(omega.cross(offset));
    k.angular_velocity = omega;
    k.angular_accel = omega_dot;
    k.world_position = origin_pos + r_world * offset;
    k.world_angle = world_angle;
    return k;
  };

  // Planar chain: angular velocity is along x in every frame, so local and
  // world components coincide.
  Eigen::Matrix3d r_prev = world_rotation(angle);
  Eigen::Vector3d omega_prev(rate, 0.0, 0.0);
  Eigen::Vector3d omega_dot_prev(accel, 0.0, 0.0);
  Eigen::Vector3d origin_pos = base.position;
  Eigen::Vector3d origin_acc = base.acceleration;

  out[0] = imu_at(r_prev, origin_pos, origin_acc, omega_prev, omega_dot_prev,
                  chain.imu_mounts[0], angle);

  for (std::size_t i = 0; i < n; ++i) {
    angle += state.angles[i];
    rate += state.rates[i];
    accel += state.accels[i];
    const Eigen::Matrix3d r_world = world_rotation(angle);
    const Eigen::Vector3d omega(rate, 0.0, 0.0);
    const Eigen::Vector3d omega_dot(accel, 0.0, 0.0);

    // IMU i+1 is referenced to the proximal joint (origin of S_i).
    out[i + 1] = imu_at(r_world, origin_pos, origin_acc, omega, omega_dot,
                        chain.imu_mounts[i + 1], angle);

    const Eigen::Vector3d link_world = r_world * along_link(chain.lengths[i]);
    origin_acc += omega_dot.cross(link_world) + omega.cross(omega.cross(link_world));
    origin_pos += link_world;
  }
  return out;
}

}  // namespace flexkin
