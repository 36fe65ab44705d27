#include "flexkin/imu_synth.hpp"

#include <Eigen/Geometry>
#include <cmath>
#include <numbers>
#include <random>
#include <string>

#include "flexkin/angles.hpp"
#include "flexkin/errors.hpp"
#include "flexkin/seeding.hpp"

namespace flexkin {

Pose2D ModelMismatch::apply(const Pose2D& pose) const {
  const double c = std::cos(pose.theta);
  const double s = std::sin(pose.theta);
  return {pose.y + tip_droop * c * s, pose.z - tip_droop * c * c,
          wrap_angle(pose.theta - tip_rotation * c)};
}

std::size_t SimScenario::sample_count() const {
  return static_cast<std::size_t>(std::llround(duration / sample_period));
}

void SimScenario::validate(std::size_t segments) const {
  if (!(sample_period > 0.0) || !std::isfinite(sample_period))
    throw ArgumentError("scenario sample_period must be positive");
  if (!(duration >= 10.0 * sample_period) || !std::isfinite(duration))
    throw ArgumentError("scenario duration must be at least 10 sample periods");
  if (joints.size() != segments)
    throw ArgumentError("scenario defines " + std::to_string(joints.size()) +
                        " joint trajectories for a " + std::to_string(segments) +
                        "-segment chain");
  if (!std::isfinite(omega) || !std::isfinite(ripple.amplitude) ||
      !std::isfinite(ripple.frequency_hz) || ripple.frequency_hz < 0.0)
    throw ArgumentError("scenario trajectory parameters must be finite");
  for (const auto& j : joints)
    if (!std::isfinite(j.offset) || !std::isfinite(j.amplitude) || !std::isfinite(j.phase))
      throw ArgumentError("scenario joint sinusoid parameters must be finite");
}

JointState SimScenario::joint_state(double t) const {
  JointState js;
  const std::size_t n = joints.size();
  js.angles.resize(n);
  js.rates.resize(n);
  js.accels.resize(n);
  const double w = omega;
  const double wr = 2.0 * std::numbers::pi * ripple.frequency_hz;
  const double sr = std::sin(wr * t);
  const double cr = std::cos(wr * t);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& j = joints[i];
    const double s = std::sin(w * t + j.phase);
    const double c = std::cos(w * t + j.phase);
    double angle = j.offset + j.amplitude * s;
    double rate = j.amplitude * w * c;
    double accel = -j.amplitude * w * w * s;
    if (i > 0) {
      angle += ripple.amplitude * sr;
      rate += ripple.amplitude * wr * cr;
      accel -= ripple.amplitude * wr * wr * sr;
    }
    js.angles[i] = wrap_angle(angle);
    js.rates[i] = rate;
    js.accels[i] = accel;
  }
  return js;
}

namespace {

void simulate_into(const SegmentChain& chain, const SimScenario& scenario,
                   const std::vector<ImuErrorModel>& errors, double t0,
                   std::uint64_t stream, SimulationResult& out) {
  const std::size_t m = chain.imu_count();
  std::vector<std::mt19937_64> rngs;
  rngs.reserve(m);
  for (const auto& e : errors) rngs.emplace_back(derive_seed(e.seed, stream));
  std::normal_distribution<double> normal(0.0, 1.0);

  const std::size_t count = scenario.sample_count();
  for (auto& trace : out.imu) trace.reserve(trace.size() + count);
  out.truth.t.reserve(out.truth.t.size() + count);
  out.truth.pose.reserve(out.truth.pose.size() + count);
  out.truth.joints.reserve(out.truth.joints.size() + count);

  for (std::size_t k = 0; k < count; ++k) {
    const double local_t = static_cast<double>(k) * scenario.sample_period;
    const double t = t0 + local_t;
    JointState js = scenario.joint_state(local_t);
    const auto kin = propagate_imu_kinematics(chain, js);

    for (std::size_t i = 0; i < m; ++i) {
      const auto& e = errors[i];
      const Eigen::Matrix3d r_world =
          Eigen::AngleAxisd(kin[i].world_angle, Eigen::Vector3d::UnitX()).toRotationMatrix();
      ImuSample s;
      s.t = t;
      s.gyro = kin[i].angular_velocity + e.gyro_bias;
      s.accel = kin[i].local_accel - r_world.transpose() * chain.gravity + e.accel_bias;
      if (e.gyro_noise_std > 0.0)
        for (int a = 0; a < 3; ++a) s.gyro[a] += e.gyro_noise_std * normal(rngs[i]);
      if (e.accel_noise_std > 0.0)
        for (int a = 0; a < 3; ++a) s.accel[a] += e.accel_noise_std * normal(rngs[i]);
      out.imu[i].push_back(s);
    }

    Pose2D pose = forward_kinematics(chain, js.angles);
    if (scenario.mismatch.enabled()) pose = scenario.mismatch.apply(pose);
    out.truth.t.push_back(t);
    out.truth.pose.push_back(pose);
    out.truth.joints.push_back(std::move(js));
  }
}

void check_errors(const SegmentChain& chain, const std::vector<ImuErrorModel>& errors) {
  if (errors.size() != chain.imu_count())
    throw ArgumentError("simulate: expected " + std::to_string(chain.imu_count()) +
                        " IMU error models, got " + std::to_string(errors.size()));
  for (const auto& e : errors) {
    if (!(e.gyro_noise_std >= 0.0) || !(e.accel_noise_std >= 0.0))
      throw ArgumentError("simulate: noise standard deviations must be >= 0");
    if (!e.gyro_bias.allFinite() || !e.accel_bias.allFinite())
      throw ArgumentError("simulate: biases must be finite");
  }
}

}  // namespace

SimulationResult simulate(const SegmentChain& chain, const SimScenario& scenario,
                          const std::vector<ImuErrorModel>& errors) {
  return simulate_batch(chain, {scenario}, errors);
}

SimulationResult simulate_batch(const SegmentChain& chain,
                                const std::vector<SimScenario>& scenarios,
                                const std::vector<ImuErrorModel>& errors) {
  chain.validate();
  check_errors(chain, errors);
  if (scenarios.empty()) throw ArgumentError("simulate: no scenarios");
  for (const auto& s : scenarios) {
    s.validate(chain.segments());
    if (s.sample_period != scenarios.front().sample_period)
      throw ArgumentError("simulate: all scenarios must share one sample period");
  }

  SimulationResult out;
  out.imu.resize(chain.imu_count());
  std::size_t offset = 0;
  for (std::size_t k = 0; k < scenarios.size(); ++k) {
    const double t0 = static_cast<double>(offset) * scenarios[k].sample_period;
    simulate_into(chain, scenarios[k], errors, t0, k, out);
    offset += scenarios[k].sample_count();
  }
  return out;
}

}  // namespace flexkin
