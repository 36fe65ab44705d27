#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "flexkin/chain_model.hpp"
#include "flexkin/complementary_filter.hpp"
#include "flexkin/cost.hpp"
#include "flexkin/imu_synth.hpp"
#include "flexkin/metrics.hpp"
#include "flexkin/pso.hpp"
#include "flexkin/residual_corrector.hpp"

namespace flexkin {

struct GainSearchSettings {
  std::size_t swarm_size = 30;
  std::size_t iterations = 100;
  double inertia = 0.729;
  double cognitive = 1.49445;
  double social = 1.49445;
  double k_p_min = FilterGains::kMinKp, k_p_max = FilterGains::kMaxKp;
  double k_i_min = FilterGains::kMinKi, k_i_max = FilterGains::kMaxKi;
  std::size_t threads = 1;
  double tuning_window_s = 0.0;  ///< 0 = whole dataset

  PsoConfig pso(std::uint64_t seed) const;
};

/// Everything a pipeline run needs, validated.
struct PipelineConfig {
  std::uint64_t seed = 0;
  SegmentChain chain;
  std::vector<SimScenario> scenarios;
  std::vector<ImuErrorModel> imu_errors;  ///< seeds derived from `seed`
  std::optional<FilterGains> fixed_gains; ///< empty = tune with PSO
  CostWeights cost;
  GainSearchSettings search;
  RbfConfig rbf;
  double split_ratio = 0.7;
  SplitMode split_mode = SplitMode::kChronological;

  /// FNV-1a of the canonical JSON the config was parsed from.
  std::string hash;

  double sample_period() const { return scenarios.front().sample_period; }

  /// Replaces the master seed and re-derives every per-IMU noise seed.
  void set_seed(std::uint64_t new_seed);
};

/// Throws ConfigError with the dotted path of the first offending field.
/// Unknown keys are rejected.
PipelineConfig parse_config(const nlohmann::json& j);

/// Reads a JSON file (// and /* */ comments allowed) and parses it.
PipelineConfig load_config(const std::filesystem::path& path);

}  // namespace flexkin
