#include <gtest/gtest.h>

#include <fstream>

#include "flexkin/config.hpp"
#include "flexkin/errors.hpp"
#include "flexkin/seeding.hpp"
#include "test_util.hpp"

using namespace flexkin;
using nlohmann::json;

namespace {

json minimal() {
  json joint = {{"offset", 0.1}, {"amplitude", 0.2}, {"phase", 0.0}};
  return {{"seed", 7},
          {"chain", {{"segments", 2}, {"total_length", 2.0}}},
          {"scenarios", json::array({{{"payload_tag", "a"}, {"omega", 0.5}, {"duration", 2.0},
                                      {"joints", json::array({joint, joint})}}})}};
}

std::string failing_field(const json& j) {
  try {
    parse_config(j);
  } catch (const ConfigError& e) {
    return e.field();
  }
  return "<no error>";
}

}  // namespace

TEST(Config, MinimalConfigUsesDefaults) {
  const auto cfg = parse_config(minimal());
  EXPECT_EQ(cfg.chain.segments(), 2u);
  EXPECT_EQ(cfg.imu_errors.size(), 3u);
  EXPECT_FALSE(cfg.fixed_gains.has_value());
  EXPECT_EQ(cfg.cost.k_noise, CostWeights{}.k_noise);
  EXPECT_EQ(cfg.cost.peak_buffer, CostWeights{}.peak_buffer);
  EXPECT_EQ(cfg.split_ratio, 0.7);
  EXPECT_EQ(cfg.hash.size(), 16u);
}

TEST(Config, UnknownKeysCarryTheirPath) {
  auto j = minimal();
  j["colour"] = 1;
  EXPECT_EQ(failing_field(j), "colour");
  j = minimal();
  j["scenarios"][0]["joints"][1]["amplitud"] = 0.1;
  EXPECT_EQ(failing_field(j), "scenarios[0].joints[1].amplitud");
  j = minimal();
  j["cost"] = {{"k_delay", 1}, {"k_noize", 2}};
  EXPECT_EQ(failing_field(j), "cost.k_noize");
}

TEST(Config, StructuralErrors) {
  auto j = minimal();
  j.erase("scenarios");
  EXPECT_EQ(failing_field(j), "scenarios");
  j = minimal();
  j["scenarios"][0]["joints"].push_back(j["scenarios"][0]["joints"][0]);
  EXPECT_EQ(failing_field(j), "scenarios[0].joints");
  j = minimal();
  j["scenarios"][0]["omega"] = -1.0;
  EXPECT_EQ(failing_field(j), "scenarios[0].omega");
  j = minimal();
  j["split"] = {{"ratio", 1.0}};
  EXPECT_EQ(failing_field(j), "split.ratio");
  j = minimal();
  j["pso"] = {{"k_p_bounds", {5.0, 1.0}}};
  EXPECT_EQ(failing_field(j), "pso.k_p_bounds");
  j = minimal();
  j["filter"] = {{"gains", "auto"}};
  EXPECT_EQ(failing_field(j), "filter.gains");
}

TEST(Config, FixedGainsAndPerImuErrors) {
  auto j = minimal();
  j["filter"] = {{"gains", {{"k_p", 2.0}, {"k_i", 0.5}}}};
  j["imu_errors"] = {{"gyro_noise_std", 0.001}, {"per_imu", {{{"index", 2}, {"accel_noise_std", 0.5}}}}};
  const auto cfg = parse_config(j);
  ASSERT_TRUE(cfg.fixed_gains.has_value());
  EXPECT_EQ(cfg.fixed_gains->k_p, 2.0);
  EXPECT_EQ(cfg.imu_errors[0].gyro_noise_std, 0.001);
  EXPECT_EQ(cfg.imu_errors[2].gyro_noise_std, 0.001);
  EXPECT_EQ(cfg.imu_errors[2].accel_noise_std, 0.5);
  j["imu_errors"]["per_imu"][0]["index"] = 3;
  EXPECT_EQ(failing_field(j), "imu_errors.per_imu[0].index");
}

TEST(Config, HashIsStableAndSensitive) {
  const auto a = parse_config(minimal());
  const auto b = parse_config(json::parse(minimal().dump(2)));
  EXPECT_EQ(a.hash, b.hash);
  auto j = minimal();
  j["scenarios"][0]["omega"] = 0.51;
  EXPECT_NE(parse_config(j).hash, a.hash);
}

TEST(Config, SeedDrivesImuStreams) {
  auto cfg = parse_config(minimal());
  const auto root = derive_seed(std::uint64_t{7}, "imu");
  EXPECT_EQ(cfg.imu_errors[1].seed, derive_seed(root, std::uint64_t{1}));
  const auto before = cfg.imu_errors[0].seed;
  cfg.set_seed(8);
  EXPECT_NE(cfg.imu_errors[0].seed, before);
  EXPECT_NE(cfg.imu_errors[0].seed, cfg.imu_errors[1].seed);
}

TEST(Config, DemoFileLoads) {
  const auto cfg = load_config(FLEXKIN_SOURCE_DIR "/configs/demo.json");
  EXPECT_EQ(cfg.scenarios.size(), 2u);
  EXPECT_EQ(cfg.chain.segments(), 4u);
  EXPECT_EQ(cfg.split_mode, SplitMode::kShuffled);
  EXPECT_EQ(cfg.search.tuning_window_s, 20.0);
}

TEST(Config, FileErrors) {
  TempDir dir;
  EXPECT_THROW(load_config(dir.path / "none.json"), ConfigError);
  std::ofstream(dir.path / "bad.json") << "{ \"seed\": ";
  EXPECT_THROW(load_config(dir.path / "bad.json"), ConfigError);
}
