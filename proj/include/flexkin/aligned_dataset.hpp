#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "flexkin/chain_model.hpp"
#include "flexkin/imu_synth.hpp"

namespace flexkin {

/// Contiguous block of samples produced by one scenario.
struct ScenarioSpan {
  std::size_t begin = 0;
  std::size_t end = 0;
  std::string payload_tag;
  double omega = 0.0;
};

struct Provenance {
  std::vector<ScenarioSpan> spans;
  std::uint64_t seed = 0;
  std::string config_hash;
};

/// Measurements and ground truth on one uniform time base.
struct AlignedDataset {
  double sample_period = 0.001;
  std::vector<double> t;
  std::vector<ImuTrace> imu;
  std::vector<Pose2D> truth;
  std::vector<std::vector<double>> joint_truth;  ///< optional, [sample][joint]
  Provenance provenance;

  std::size_t size() const { return t.size(); }

  /// Throws ArgumentError on unequal lengths or non-uniform timestamps
  /// (tolerance 1e-9 s).
  void validate() const;

  static AlignedDataset from_simulation(const SimulationResult& sim, double sample_period);
};

}  // namespace flexkin
