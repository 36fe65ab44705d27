#include "flexkin/aligned_dataset.hpp"

#include <cmath>
#include <string>

#include "flexkin/errors.hpp"

namespace flexkin {

void AlignedDataset::validate() const {
  if (!(sample_period > 0.0)) throw ArgumentError("dataset sample period must be positive");
  const std::size_t n = t.size();
  if (truth.size() != n)
    throw ArgumentError("dataset: " + std::to_string(truth.size()) +
                        " ground-truth poses for " + std::to_string(n) + " timestamps");
  for (std::size_t i = 0; i < imu.size(); ++i)
    if (imu[i].size() != n)
      throw ArgumentError("dataset: IMU " + std::to_string(i) + " has " +
                          std::to_string(imu[i].size()) + " samples, expected " +
                          std::to_string(n));
  if (!joint_truth.empty() && joint_truth.size() != n)
    throw ArgumentError("dataset: joint truth length differs from time base");
  for (std::size_t k = 0; k < n; ++k) {
    const double expected = t.front() + static_cast<double>(k) * sample_period;
    if (std::abs(t[k] - expected) > 1e-9)
      throw ArgumentError("dataset: timestamp " + std::to_string(k) + " is off the uniform grid");
    for (const auto& trace : imu)
      if (std::abs(trace[k].t - t[k]) > 1e-9)
        throw ArgumentError("dataset: IMU timestamps not aligned at sample " + std::to_string(k));
  }
}

AlignedDataset AlignedDataset::from_simulation(const SimulationResult& sim, double sample_period) {
  AlignedDataset d;
  d.sample_period = sample_period;
  d.t = sim.truth.t;
  d.imu = sim.imu;
  d.truth = sim.truth.pose;
  d.joint_truth.reserve(sim.truth.joints.size());
  for (const auto& js : sim.truth.joints) d.joint_truth.push_back(js.angles);
  return d;
}

}  // namespace flexkin
