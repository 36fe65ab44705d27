#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "flexkin/angles.hpp"
#include "flexkin/errors.hpp"
#include "flexkin/imu_synth.hpp"
#include "flexkin/joint_estimator.hpp"

using namespace flexkin;

namespace {

ImuSample sample(Eigen::Vector3d accel, Eigen::Vector3d gyro = Eigen::Vector3d::Zero()) {
  ImuSample s;
  s.accel = accel;
  s.gyro = gyro;
  return s;
}

SimScenario sweep(std::size_t n, double duration) {
  SimScenario s;
  s.omega = 0.1;
  s.duration = duration;
  for (std::size_t i = 0; i < n; ++i)
    s.joints.push_back({0.1 + 0.05 * static_cast<double>(i), i == 0 ? 0.4 : 0.1, 0.0});
  return s;
}

}  // namespace

TEST(RelativeAccel, ZeroRatesGiveZero) {
  const auto chain = SegmentChain::uniform(2, 2.0);
  const auto z = Eigen::Vector3d::Zero();
  const auto r = relative_accel_term(sample(z), sample(z), chain, 1, z, z, 0.3);
  EXPECT_EQ(r.norm(), 0.0);
}

TEST(RelativeAccel, ConstantRotationIsCentripetal) {
  const auto chain = SegmentChain::uniform(1, 2.0, 0.5);
  const double w = 0.8;
  const auto z = Eigen::Vector3d::Zero();
  const auto r = relative_accel_term(sample(z, {w, 0, 0}), sample(z), chain, 0, z, z);
  EXPECT_NEAR(r.norm(), w * w * 1.0, 1e-14);
  EXPECT_NEAR(r.y(), -w * w * 1.0, 1e-14);
}

// The relative term must equal the difference of the true kinematic
// accelerations once both are expressed in the distal frame.
TEST(RelativeAccel, MatchesSimulatorKinematics) {
  auto chain = SegmentChain::uniform(3, 3.0, 0.7);
  chain.imu_mounts[0] = Eigen::Vector3d(0.0, 0.2, -0.1);
  SimScenario sc;
  sc.omega = 1.3;
  sc.joints = {{0.2, 0.5, 0.1}, {-0.1, 0.4, 1.0}, {0.3, 0.6, 2.0}};
  for (double t : {0.0, 0.4, 1.7, 3.3}) {
    const auto js = sc.joint_state(t);
    const auto kin = propagate_imu_kinematics(chain, js);
    for (std::size_t j = 0; j < 3; ++j) {
      const auto& prox = kin[j];
      const auto& dist = kin[j + 1];
      const auto term = relative_accel_term(sample(dist.local_accel, dist.angular_velocity),
                                            sample(prox.local_accel, prox.angular_velocity), chain,
                                            j, dist.angular_accel, prox.angular_accel,
                                            js.angles[j]);
      const Eigen::Vector3d oracle =
          dist.local_accel - relative_rotation(js.angles[j]).transpose() * prox.local_accel;
      EXPECT_NEAR((term - oracle).norm(), 0.0, 1e-9) << "joint " << j << " t " << t;
    }
  }
}

TEST(JointAngle, AlignedStaticPairGivesZero) {
  const Eigen::Vector3d g(0.0, 2.0, 9.6);
  const auto e = estimate_joint_angle(sample(g), sample(g), Eigen::Vector3d::Zero());
  EXPECT_NEAR(e.theta, 0.0, 1e-15);
  EXPECT_NEAR(e.quality, g.squaredNorm(), 1e-12);
}

TEST(JointAngle, RightAngleFromGravity) {
  const auto e = estimate_joint_angle(sample({0, 0, 9.81}), sample({0, 9.81, 0}),
                                      Eigen::Vector3d::Zero());
  EXPECT_NEAR(e.theta, std::numbers::pi / 2, 1e-15);
}

TEST(JointAngle, RecoversArbitraryStaticAngles) {
  for (double prev : {-1.0, 0.0, 0.6}) {
    for (double q : {-3.0, -1.2, 0.0, 0.4, 2.9}) {
      const Eigen::Vector3d up(0, 0, 9.81);
      const auto p = relative_rotation(prev).transpose() * up;
      const auto d = relative_rotation(prev + q).transpose() * up;
      const auto e = estimate_joint_angle(sample(p), sample(d), Eigen::Vector3d::Zero());
      EXPECT_NEAR(angle_diff(e.theta, q), 0.0, 1e-12);
    }
  }
}

TEST(JointAngle, FreeFallIsDegenerate) {
  const auto z = Eigen::Vector3d::Zero();
  EXPECT_THROW(estimate_joint_angle(sample(z), sample({0, 1e-4, 0}), z), DegenerateGeometryError);
}

TEST(JointRate, Examples) {
  const auto z = Eigen::Vector3d::Zero();
  EXPECT_EQ(estimate_joint_rate(sample(z), sample(z), 0.7), 0.0);
  for (double th : {-2.0, 0.0, 1.1})
    EXPECT_NEAR(estimate_joint_rate(sample(z, {0.2, 0, 0}), sample(z, {0.5, 0, 0}), th), 0.3,
                1e-15);
}

TEST(RateDifferentiator, BackwardDifferenceThenAverage) {
  RateDifferentiator d(0.01);
  auto at = [](double k) { return Eigen::Vector3d(2.0 * k * k, 0.0, -k); };
  EXPECT_EQ(d.update(at(0)).norm(), 0.0);
  // Second output is the raw difference.
  EXPECT_NEAR(d.update(at(1)).x(), 2.0 / 0.01, 1e-9);
  for (int k = 2; k < 6; ++k) {
    const auto out = d.update(at(k));
    const double raw_now = (at(k).x() - at(k - 1).x()) / 0.01;
    const double raw_prev = (at(k - 1).x() - at(k - 2).x()) / 0.01;
    EXPECT_NEAR(out.x(), 0.5 * (raw_now + raw_prev), 1e-9);
    EXPECT_NEAR(out.z(), -1.0 / 0.01, 1e-9);
  }
  d.reset();
  EXPECT_EQ(d.update(at(3)).norm(), 0.0);
}

TEST(EstimateJoints, NoiseFreeTraceMatchesTruth) {
  const auto chain = SegmentChain::uniform(4, 4.5);
  const auto sc = sweep(4, 20.0);
  const auto sim = simulate(chain, sc, std::vector<ImuErrorModel>(5));
  const auto m = estimate_joints(chain, sim.imu, sc.sample_period);
  ASSERT_EQ(m.joints(), 4u);
  EXPECT_EQ(m.degenerate_samples, 0u);
  double worst = 0.0, worst_rate = 0.0;
  for (std::size_t j = 0; j < 4; ++j)
    for (std::size_t k = 0; k < m.samples(); ++k) {
      worst = std::max(worst, std::abs(angle_diff(m.theta_meas[j][k], sim.truth.joints[k].angles[j])));
      worst_rate = std::max(worst_rate, std::abs(m.theta_dot_meas[j][k] - sim.truth.joints[k].rates[j]));
    }
  EXPECT_LT(worst, 1e-6);
  EXPECT_LT(worst_rate, 1e-9);
}

// Exchanging the IMU roles negates the angle: the distal reading minus the
// relative term is the gravity-only part in the distal frame.
TEST(EstimateJoints, SwappingThePairNegatesTheAngle) {
  const auto chain = SegmentChain::uniform(2, 2.0);
  SimScenario sc;
  sc.omega = 0.9;
  sc.duration = 2.0;
  sc.joints = {{0.3, 0.5, 0.2}, {0.2, 0.4, 1.0}};
  for (double t : {0.0, 0.5, 1.5}) {
    const auto js = sc.joint_state(t);
    const auto kin = propagate_imu_kinematics(chain, js);
    const Eigen::Vector3d up(0, 0, 9.81);
    auto meas = [&](std::size_t k) {
      return sample(kin[k].local_accel + relative_rotation(kin[k].world_angle).transpose() * up,
                    kin[k].angular_velocity);
    };
    const auto prox = meas(1), dist = meas(2);
    const auto rel = relative_accel_term(dist, prox, chain, 1, kin[2].angular_accel,
                                         kin[1].angular_accel, js.angles[1]);
    const auto fwd = estimate_joint_angle(prox, dist, rel);
    EXPECT_NEAR(fwd.theta, js.angles[1], 1e-9);
    const auto back = estimate_joint_angle(sample(dist.accel - rel), prox, Eigen::Vector3d::Zero());
    EXPECT_NEAR(back.theta, -fwd.theta, 1e-9);
  }
}

TEST(EstimateJoints, FreeFallFallsBackToRateIntegration) {
  auto chain = SegmentChain::uniform(1, 1.0);
  chain.gravity = Eigen::Vector3d::Zero();
  chain.gravity_override = true;
  SimScenario sc;
  sc.duration = 0.1;
  sc.joints = {{0.0, 0.0, 0.0}};
  std::vector<ImuErrorModel> errors(2);
  errors[1].gyro_bias = Eigen::Vector3d(0.5, 0, 0);
  const auto sim = simulate(chain, sc, errors);
  const auto m = estimate_joints(chain, sim.imu, sc.sample_period);
  EXPECT_EQ(m.degenerate_samples, m.samples());
  const std::size_t last = m.samples() - 1;
  EXPECT_NEAR(m.theta_meas[0][last], 0.5 * static_cast<double>(last) * 0.001, 1e-12);
  EXPECT_EQ(m.quality[0][last], 0.0);
}

TEST(EstimateJoints, RejectsWrongTraceCount) {
  const auto chain = SegmentChain::uniform(2, 2.0);
  std::vector<ImuTrace> traces(2, ImuTrace(5));
  EXPECT_THROW(estimate_joints(chain, traces, 0.001), ArgumentError);
}
