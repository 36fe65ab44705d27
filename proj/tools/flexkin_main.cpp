#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "flexkin/config.hpp"
#include "flexkin/errors.hpp"
#include "flexkin/pipeline.hpp"

namespace {

using nlohmann::json;

struct Common {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out = "out";
  bool verbose = false;
};

struct TuneFlags {
  std::vector<double> k_p_bounds, k_i_bounds;
  std::optional<double> k_delay, k_noise, k_error;
  std::optional<std::size_t> swarm, iterations;
  std::string dataset;
};

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("-c,--config", c.config, "JSON config file (comments allowed)")->required();
  cmd->add_option("--seed", c.seed, "override the master seed");
  cmd->add_option("-o,--out", c.out, "output directory");
  cmd->add_flag("-v,--verbose", c.verbose, "debug logging");
}

json read_config_json(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw flexkin::ConfigError("", "cannot read config file " + path);
  try {
    return json::parse(in, nullptr, true, true);
  } catch (const json::parse_error& e) {
    throw flexkin::ConfigError("", "config " + path + " is not valid JSON: " + e.what());
  }
}

// Command-line overrides are merged into the JSON so the config hash covers them.
flexkin::PipelineConfig build_config(const Common& c, const TuneFlags* t) {
  json j = read_config_json(c.config);
  if (!j.is_object()) throw flexkin::ConfigError("", "config root must be an object");
  if (c.seed) j["seed"] = *c.seed;
  if (t) {
    auto& pso = j["pso"];
    if (pso.is_null()) pso = json::object();
    if (!t->k_p_bounds.empty()) pso["k_p_bounds"] = t->k_p_bounds;
    if (!t->k_i_bounds.empty()) pso["k_i_bounds"] = t->k_i_bounds;
    if (t->swarm) pso["swarm_size"] = *t->swarm;
    if (t->iterations) pso["iterations"] = *t->iterations;
    auto& cost = j["cost"];
    if (cost.is_null()) cost = json::object();
    if (t->k_delay) cost["k_delay"] = *t->k_delay;
    if (t->k_noise) cost["k_noise"] = *t->k_noise;
    if (t->k_error) cost["k_error"] = *t->k_error;
    if (cost.empty()) j.erase("cost");
    if (pso.empty()) j.erase("pso");
  }
  return flexkin::parse_config(j);
}

void set_log_level(bool verbose) {
  spdlog::set_level(spdlog::level::info);
  if (const char* env = std::getenv("FLEXKIN_LOG_LEVEL"))
    spdlog::set_level(spdlog::level::from_str(env));
  if (verbose) spdlog::set_level(spdlog::level::debug);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Kinematics estimation for IMU-instrumented segment chains"};
  app.require_subcommand(1);

  using Stage = void (*)(const flexkin::PipelineConfig&, const flexkin::StageDirs&);
  struct Sub {
    const char* name;
    const char* help;
    Stage run;
  };
  const Sub subs[] = {
      {"simulate", "synthesize IMU data and ground truth", flexkin::run_simulate},
      {"estimate", "joint angles and rates from IMU pairs", flexkin::run_estimate},
      {"tune", "tune complementary filter gains", flexkin::run_tune},
      {"train", "train RBF and linear residual correctors", flexkin::run_train},
      {"evaluate", "error metrics, report and plot data", flexkin::run_evaluate},
      {"pipeline", "run every stage in order", flexkin::run_pipeline},
  };

  Common common;
  TuneFlags tune;
  std::vector<std::pair<CLI::App*, const Sub*>> cmds;
  for (const auto& s : subs) {
    auto* cmd = app.add_subcommand(s.name, s.help);
    add_common(cmd, common);
    if (std::string(s.name) != "pipeline" && std::string(s.name) != "simulate")
      cmd->add_option("--dataset", tune.dataset, "dataset directory (default <out>/dataset)");
    if (std::string(s.name) == "tune" || std::string(s.name) == "pipeline") {
      cmd->add_option("--kp-bounds", tune.k_p_bounds, "k_p search range")->expected(2);
      cmd->add_option("--ki-bounds", tune.k_i_bounds, "k_i search range")->expected(2);
      cmd->add_option("--k-delay", tune.k_delay, "delay penalty weight");
      cmd->add_option("--k-noise", tune.k_noise, "noise penalty weight");
      cmd->add_option("--k-error", tune.k_error, "error penalty weight");
      cmd->add_option("--swarm", tune.swarm, "swarm size");
      cmd->add_option("--iterations", tune.iterations, "PSO iterations");
    }
    cmds.emplace_back(cmd, &s);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    // Usage errors are treated like config errors.
    return app.exit(e) == 0 ? 0 : 2;
  }

  spdlog::set_default_logger(spdlog::stderr_color_mt("flexkin"));
  set_log_level(common.verbose);
  try {
    for (const auto& [cmd, sub] : cmds) {
      if (!cmd->parsed()) continue;
      const bool tune_flags = std::string(sub->name) == "tune" || std::string(sub->name) == "pipeline";
      const auto cfg = build_config(common, tune_flags ? &tune : nullptr);
      flexkin::StageDirs dirs{common.out, {}};
      if (!tune.dataset.empty()) dirs.dataset = tune.dataset;
      spdlog::debug("config {} seed {}", cfg.hash, cfg.seed);
      sub->run(cfg, dirs);
    }
  } catch (const flexkin::ConfigError& e) {
    spdlog::error("config error: {}", e.what());
    return 2;
  } catch (const std::exception& e) {
    spdlog::error("{}", e.what());
    return 3;
  }
  return 0;
}
