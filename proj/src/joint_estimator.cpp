#include "flexkin/joint_estimator.hpp"

#include <cmath>
#include <string>

#include "flexkin/errors.hpp"

namespace flexkin {

namespace {

Eigen::Vector3d transport(const Eigen::Vector3d& omega, const Eigen::Vector3d& omega_dot,
                          const Eigen::Vector3d& r) {
  return omega_dot.cross(r) + omega.cross(omega.cross(r));
}

}  // namespace

Eigen::Vector3d relative_accel_term(const ImuSample& distal, const ImuSample& proximal,
                                    const SegmentChain& chain, std::size_t joint,
                                    const Eigen::Vector3d& distal_rate_derivative,
                                    const Eigen::Vector3d& proximal_rate_derivative,
                                    double align) {
  if (joint >= chain.segments())
    throw ArgumentError("relative_accel_term: joint " + std::to_string(joint) +
                        " out of range");
  const Eigen::Vector3d r_distal = chain.offset_from_proximal_joint(joint + 1);
  const Eigen::Vector3d r_proximal = chain.offset_from_frame_origin(joint);
  const Eigen::Vector3d distal_term = transport(distal.gyro, distal_rate_derivative, r_distal);
  const Eigen::Vector3d proximal_term =
      transport(proximal.gyro, proximal_rate_derivative, r_proximal);
  return distal_term - relative_rotation(align).transpose() * proximal_term;
}

AngleEstimate estimate_joint_angle(const ImuSample& proximal, const ImuSample& distal,
                                   const Eigen::Vector3d& rel_accel) {
  const Eigen::Vector3d& p = proximal.accel;
  const Eigen::Vector3d u = distal.accel - rel_accel;
  const double a = p.z() * u.y() - p.y() * u.z();
  const double b = p.y() * u.y() + p.z() * u.z();
  const double quality = std::hypot(a, b);
  if (!std::isfinite(quality))
    throw ArgumentError("estimate_joint_angle: non-finite accelerations");
  if (quality < kDegenerateQuality)
    throw DegenerateGeometryError("estimate_joint_angle: gravity reference lost (|A,B| = " +
                                  std::to_string(quality) + ")");
  return {std::atan2(a, b), quality};
}

double estimate_joint_rate(const ImuSample& proximal, const ImuSample& distal, double theta) {
  const Eigen::Vector3d rel = distal.gyro - relative_rotation(theta).transpose() * proximal.gyro;
  return rel.x();
}

RateDifferentiator::RateDifferentiator(double sample_period) : dt_(sample_period) {
  if (!(sample_period > 0.0)) throw ArgumentError("RateDifferentiator: sample period must be > 0");
}

Eigen::Vector3d RateDifferentiator::update(const Eigen::Vector3d& rate) {
  if (!has_rate_) {
    has_rate_ = true;
    last_rate_ = rate;
    return Eigen::Vector3d::Zero();
  }
  const Eigen::Vector3d diff = (rate - last_rate_) / dt_;
  last_rate_ = rate;
  const Eigen::Vector3d out = has_diff_ ? Eigen::Vector3d(0.5 * (diff + last_diff_)) : diff;
  last_diff_ = diff;
  has_diff_ = true;
  return out;
}

void RateDifferentiator::reset() {
  has_rate_ = false;
  has_diff_ = false;
  last_rate_.setZero();
  last_diff_.setZero();
}

JointMeasurementTrace estimate_joints(const SegmentChain& chain,
                                      const std::vector<ImuTrace>& traces,
                                      double sample_period) {
  chain.validate();
  if (traces.size() != chain.imu_count())
    throw ArgumentError("estimate_joints: expected " + std::to_string(chain.imu_count()) +
                        " IMU traces, got " + std::to_string(traces.size()));
  const std::size_t n = traces.front().size();
  for (const auto& t : traces)
    if (t.size() != n) throw ArgumentError("estimate_joints: IMU traces are not aligned");

  const std::size_t joints = chain.segments();
  JointMeasurementTrace out;
  out.theta_meas.assign(joints, std::vector<double>(n));
  out.theta_dot_meas.assign(joints, std::vector<double>(n));
  out.quality.assign(joints, std::vector<double>(n));

  std::vector<RateDifferentiator> diffs(chain.imu_count(), RateDifferentiator(sample_period));
  std::vector<Eigen::Vector3d> rate_dot(chain.imu_count());
  std::vector<double> last_theta(joints, 0.0);

  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t i = 0; i < chain.imu_count(); ++i) rate_dot[i] = diffs[i].update(traces[i][k].gyro);

    for (std::size_t j = 0; j < joints; ++j) {
      const ImuSample& prox = traces[j][k];
      const ImuSample& dist = traces[j + 1][k];
      double theta = 0.0;
      double quality = 0.0;
      try {
        auto rel = relative_accel_term(dist, prox, chain, j, rate_dot[j + 1], rate_dot[j],
                                       last_theta[j]);
        AngleEstimate est = estimate_joint_angle(prox, dist, rel);
        rel = relative_accel_term(dist, prox, chain, j, rate_dot[j + 1], rate_dot[j], est.theta);
        est = estimate_joint_angle(prox, dist, rel);
        theta = est.theta;
        quality = est.quality;
      } catch (const DegenerateGeometryError&) {
        const double rate = estimate_joint_rate(prox, dist, last_theta[j]);
        theta = last_theta[j] + (k > 0 ? sample_period * rate : 0.0);
        ++out.degenerate_samples;
      }
      out.theta_meas[j][k] = theta;
      out.theta_dot_meas[j][k] = estimate_joint_rate(prox, dist, theta);
      out.quality[j][k] = quality;
      last_theta[j] = theta;
    }
  }
  return out;
}

}  // namespace flexkin
