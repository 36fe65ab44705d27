#include "flexkin/config.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <initializer_list>
#include <set>

#include "flexkin/errors.hpp"
#include "flexkin/seeding.hpp"

namespace flexkin {

using nlohmann::json;

namespace {

std::string join(const std::string& parent, const std::string& key) {
  return parent.empty() ? key : parent + "." + key;
}

std::string index(const std::string& parent, std::size_t i) {
  return parent + "[" + std::to_string(i) + "]";
}

// Object view that remembers its dotted path and refuses unknown keys.
class Section {
 public:
  Section(const json& j, std::string path, std::initializer_list<const char*> allowed)
      : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError(path_, "expected an object");
    std::set<std::string> ok(allowed.begin(), allowed.end());
    for (const auto& [key, _] : j_.items())
      if (!ok.count(key)) throw ConfigError(join(path_, key), "unknown key");
  }

  bool has(const char* key) const { return j_.contains(key) && !j_.at(key).is_null(); }
  const json& raw(const char* key) const { return j_.at(key); }
  std::string path(const char* key) const { return join(path_, key); }

  double number(const char* key, double fallback) const {
    if (!has(key)) return fallback;
    return number(key);
  }
  double number(const char* key) const {
    if (!j_.contains(key)) throw ConfigError(path(key), "missing required number");
    const auto& v = j_.at(key);
    if (!v.is_number()) throw ConfigError(path(key), "expected a number");
    const double x = v.get<double>();
    if (!std::isfinite(x)) throw ConfigError(path(key), "must be finite");
    return x;
  }
  double positive(const char* key, double fallback) const {
    const double x = number(key, fallback);
    if (!(x > 0.0)) throw ConfigError(path(key), "must be > 0");
    return x;
  }
  double non_negative(const char* key, double fallback) const {
    const double x = number(key, fallback);
    if (!(x >= 0.0)) throw ConfigError(path(key), "must be >= 0");
    return x;
  }
  std::size_t count(const char* key, std::size_t fallback, std::size_t min = 1) const {
    if (!has(key)) return fallback;
    const auto& v = j_.at(key);
    if (!v.is_number_integer()) throw ConfigError(path(key), "expected an integer");
    const auto x = v.get<std::int64_t>();
    if (x < static_cast<std::int64_t>(min))
      throw ConfigError(path(key), "must be >= " + std::to_string(min));
    return static_cast<std::size_t>(x);
  }
  std::string string(const char* key, const std::string& fallback) const {
    if (!has(key)) return fallback;
    const auto& v = j_.at(key);
    if (!v.is_string()) throw ConfigError(path(key), "expected a string");
    return v.get<std::string>();
  }
  std::vector<double> numbers(const char* key, std::size_t expected) const {
    const auto& v = j_.at(key);
    if (!v.is_array()) throw ConfigError(path(key), "expected an array");
    if (expected != 0 && v.size() != expected)
      throw ConfigError(path(key), "expected " + std::to_string(expected) + " numbers");
    std::vector<double> out;
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (!v[i].is_number()) throw ConfigError(index(path(key), i), "expected a number");
      out.push_back(v[i].get<double>());
      if (!std::isfinite(out.back())) throw ConfigError(index(path(key), i), "must be finite");
    }
    return out;
  }
  Eigen::Vector3d vec3(const char* key, const Eigen::Vector3d& fallback) const {
    if (!has(key)) return fallback;
    const auto v = numbers(key, 3);
    return {v[0], v[1], v[2]};
  }
  std::pair<double, double> range(const char* key, double lo, double hi) const {
    if (!has(key)) return {lo, hi};
    const auto v = numbers(key, 2);
    if (!(v[0] > 0.0 && v[0] < v[1])) throw ConfigError(path(key), "expected [min, max] with 0 < min < max");
    return {v[0], v[1]};
  }

 private:
  const json& j_;
  std::string path_;
};

SegmentChain parse_chain(const json& j) {
  Section s(j, "chain", {"segments", "total_length", "lengths", "imu_mount_fraction", "gravity"});
  const double fraction = s.number("imu_mount_fraction", 1.0);
  if (!(fraction > 0.0 && fraction <= 1.0))
    throw ConfigError(s.path("imu_mount_fraction"), "must lie in (0, 1]");
  SegmentChain chain;
  if (s.has("lengths")) {
    if (s.has("segments") || s.has("total_length"))
      throw ConfigError(s.path("lengths"), "give either lengths or segments/total_length");
    const auto lengths = s.numbers("lengths", 0);
    if (lengths.empty()) throw ConfigError(s.path("lengths"), "must not be empty");
    chain = SegmentChain::uniform(lengths.size(), 1.0, fraction);
    for (std::size_t i = 0; i < lengths.size(); ++i) {
      if (!(lengths[i] > 0.0)) throw ConfigError(index(s.path("lengths"), i), "must be > 0");
      chain.lengths[i] = lengths[i];
      chain.imu_mounts[i + 1] = Eigen::Vector3d(0.0, fraction * lengths[i], 0.0);
    }
  } else {
    chain = SegmentChain::uniform(s.count("segments", 4), s.positive("total_length", 4.5), fraction);
  }
  chain.gravity = s.vec3("gravity", chain.gravity);
  try {
    chain.validate();
  } catch (const ArgumentError& e) {
    throw ConfigError("chain", e.what());
  }
  return chain;
}

SimScenario parse_scenario(const json& j, const std::string& path, std::size_t segments) {
  Section s(j, path,
            {"payload_tag", "omega", "duration", "sample_period", "joints", "ripple", "mismatch"});
  SimScenario sc;
  sc.payload_tag = s.string("payload_tag", "none");
  if (sc.payload_tag.empty() ||
      sc.payload_tag.find_first_of("/\\ ,\n") != std::string::npos)
    throw ConfigError(s.path("payload_tag"), "must be a non-empty name without separators");
  sc.omega = s.positive("omega", 0.1);
  sc.duration = s.positive("duration", 60.0);
  sc.sample_period = s.positive("sample_period", 0.001);

  if (!s.has("joints")) throw ConfigError(s.path("joints"), "missing required array");
  const auto& joints = s.raw("joints");
  if (!joints.is_array()) throw ConfigError(s.path("joints"), "expected an array");
  if (joints.size() != segments)
    throw ConfigError(s.path("joints"), "expected " + std::to_string(segments) +
                                            " entries (one per segment), got " +
                                            std::to_string(joints.size()));
  for (std::size_t i = 0; i < joints.size(); ++i) {
    Section js(joints[i], index(s.path("joints"), i), {"offset", "amplitude", "phase"});
    sc.joints.push_back({js.number("offset", 0.0), js.non_negative("amplitude", 0.0),
                         js.number("phase", 0.0)});
  }
  if (s.has("ripple")) {
    Section r(s.raw("ripple"), s.path("ripple"), {"amplitude", "frequency_hz"});
    sc.ripple = {r.non_negative("amplitude", 0.0), r.non_negative("frequency_hz", 0.0)};
  }
  if (s.has("mismatch")) {
    Section m(s.raw("mismatch"), s.path("mismatch"), {"tip_droop", "tip_rotation"});
    sc.mismatch = {m.number("tip_droop", 0.0), m.number("tip_rotation", 0.0)};
  }
  try {
    sc.validate(segments);
  } catch (const ArgumentError& e) {
    throw ConfigError(path, e.what());
  }
  return sc;
}

ImuErrorModel parse_error_fields(const Section& s, const ImuErrorModel& base) {
  ImuErrorModel e = base;
  e.gyro_noise_std = s.non_negative("gyro_noise_std", base.gyro_noise_std);
  e.accel_noise_std = s.non_negative("accel_noise_std", base.accel_noise_std);
  e.gyro_bias = s.vec3("gyro_bias", base.gyro_bias);
  e.accel_bias = s.vec3("accel_bias", base.accel_bias);
  return e;
}

std::vector<ImuErrorModel> parse_errors(const json* j, std::size_t imus) {
  ImuErrorModel base;
  base.gyro_noise_std = 0.002;
  base.accel_noise_std = 0.02;
  std::vector<ImuErrorModel> out(imus, base);
  if (!j) return out;
  Section s(*j, "imu_errors",
            {"gyro_noise_std", "accel_noise_std", "gyro_bias", "accel_bias", "per_imu"});
  base = parse_error_fields(s, base);
  out.assign(imus, base);
  if (s.has("per_imu")) {
    const auto& arr = s.raw("per_imu");
    if (!arr.is_array()) throw ConfigError(s.path("per_imu"), "expected an array");
    std::set<std::size_t> seen;
    for (std::size_t i = 0; i < arr.size(); ++i) {
      const auto path = index(s.path("per_imu"), i);
      Section p(arr[i], path,
                {"index", "gyro_noise_std", "accel_noise_std", "gyro_bias", "accel_bias"});
      if (!p.has("index")) throw ConfigError(p.path("index"), "missing required integer");
      const std::size_t k = p.count("index", 0, 0);
      if (k >= imus)
        throw ConfigError(p.path("index"), "IMU index out of range (0.." + std::to_string(imus - 1) + ")");
      if (!seen.insert(k).second) throw ConfigError(p.path("index"), "duplicate IMU index");
      out[k] = parse_error_fields(p, base);
    }
  }
  return out;
}

void parse_filter(const json& j, PipelineConfig& cfg) {
  Section s(j, "filter", {"gains"});
  if (!s.has("gains")) return;
  const auto& g = s.raw("gains");
  if (g.is_string()) {
    if (g.get<std::string>() != "tune")
      throw ConfigError(s.path("gains"), "expected \"tune\" or {k_p, k_i}");
    cfg.fixed_gains.reset();
    return;
  }
  Section gs(g, s.path("gains"), {"k_p", "k_i"});
  FilterGains gains{gs.positive("k_p", 0.0), gs.positive("k_i", 0.0)};
  if (!gs.has("k_p") || !gs.has("k_i"))
    throw ConfigError(s.path("gains"), "both k_p and k_i are required");
  cfg.fixed_gains = gains;
}

CostWeights parse_cost(const json& j) {
  Section s(j, "cost", {"k_delay", "k_noise", "k_error", "hpf_cutoff_hz", "peak_buffer"});
  CostWeights w;
  w.k_delay = s.non_negative("k_delay", w.k_delay);
  w.k_noise = s.non_negative("k_noise", w.k_noise);
  w.k_error = s.non_negative("k_error", w.k_error);
  w.hpf_cutoff_hz = s.positive("hpf_cutoff_hz", w.hpf_cutoff_hz);
  w.peak_buffer = s.count("peak_buffer", w.peak_buffer);
  return w;
}

GainSearchSettings parse_pso(const json& j) {
  Section s(j, "pso",
            {"swarm_size", "iterations", "inertia", "cognitive", "social", "k_p_bounds",
             "k_i_bounds", "threads", "tuning_window_s"});
  GainSearchSettings g;
  g.swarm_size = s.count("swarm_size", g.swarm_size);
  g.iterations = s.count("iterations", g.iterations, 0);
  g.inertia = s.non_negative("inertia", g.inertia);
  g.cognitive = s.non_negative("cognitive", g.cognitive);
  g.social = s.non_negative("social", g.social);
  std::tie(g.k_p_min, g.k_p_max) = s.range("k_p_bounds", g.k_p_min, g.k_p_max);
  std::tie(g.k_i_min, g.k_i_max) = s.range("k_i_bounds", g.k_i_min, g.k_i_max);
  g.threads = s.count("threads", g.threads);
  g.tuning_window_s = s.non_negative("tuning_window_s", g.tuning_window_s);
  return g;
}

RbfConfig parse_rbf(const json& j) {
  Section s(j, "rbf",
            {"mse_goal", "max_neurons", "sigma", "ridge", "candidate_pool", "selection_rows"});
  RbfConfig r;
  r.mse_goal = s.non_negative("mse_goal", r.mse_goal);
  r.max_neurons = s.count("max_neurons", r.max_neurons);
  if (s.has("sigma")) r.sigma = s.positive("sigma", 1.0);
  r.ridge = s.non_negative("ridge", r.ridge);
  r.candidate_pool = s.count("candidate_pool", r.candidate_pool);
  r.selection_rows = s.count("selection_rows", r.selection_rows);
  return r;
}

std::string hex16(std::uint64_t h) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace

PsoConfig GainSearchSettings::pso(std::uint64_t seed) const {
  PsoConfig c;
  c.swarm_size = swarm_size;
  c.iterations = iterations;
  c.inertia = inertia;
  c.cognitive = cognitive;
  c.social = social;
  c.lower = {k_p_min, k_i_min};
  c.upper = {k_p_max, k_i_max};
  c.seed = seed;
  c.threads = threads;
  return c;
}

void PipelineConfig::set_seed(std::uint64_t new_seed) {
  seed = new_seed;
  const auto imu_root = derive_seed(seed, "imu");
  for (std::size_t k = 0; k < imu_errors.size(); ++k) imu_errors[k].seed = derive_seed(imu_root, k);
}

PipelineConfig parse_config(const json& j) {
  Section root(j, "",
               {"seed", "chain", "scenarios", "imu_errors", "filter", "cost", "pso", "rbf", "split"});
  PipelineConfig cfg;

  std::uint64_t seed = 0;
  if (root.has("seed")) {
    const auto& v = root.raw("seed");
    if (!v.is_number_integer() || (v.is_number_integer() && !v.is_number_unsigned() && v.get<std::int64_t>() < 0))
      throw ConfigError("seed", "expected a non-negative integer");
    seed = v.get<std::uint64_t>();
  }

  cfg.chain = root.has("chain") ? parse_chain(root.raw("chain")) : SegmentChain::uniform(4, 4.5);

  if (!root.has("scenarios")) throw ConfigError("scenarios", "missing required array");
  const auto& sc = root.raw("scenarios");
  if (!sc.is_array() || sc.empty()) throw ConfigError("scenarios", "expected a non-empty array");
  for (std::size_t i = 0; i < sc.size(); ++i)
    cfg.scenarios.push_back(parse_scenario(sc[i], index("scenarios", i), cfg.chain.segments()));
  for (std::size_t i = 1; i < cfg.scenarios.size(); ++i)
    if (cfg.scenarios[i].sample_period != cfg.scenarios[0].sample_period)
      throw ConfigError(join(index("scenarios", i), "sample_period"),
                        "all scenarios must share one sample period");

  cfg.imu_errors = parse_errors(root.has("imu_errors") ? &root.raw("imu_errors") : nullptr,
                                cfg.chain.imu_count());
  if (root.has("filter")) parse_filter(root.raw("filter"), cfg);
  if (root.has("cost")) cfg.cost = parse_cost(root.raw("cost"));
  if (root.has("pso")) cfg.search = parse_pso(root.raw("pso"));
  if (root.has("rbf")) cfg.rbf = parse_rbf(root.raw("rbf"));

  if (root.has("split")) {
    Section s(root.raw("split"), "split", {"ratio", "mode"});
    cfg.split_ratio = s.number("ratio", cfg.split_ratio);
    if (!(cfg.split_ratio > 0.0 && cfg.split_ratio < 1.0))
      throw ConfigError(s.path("ratio"), "must lie in (0, 1)");
    const auto mode = s.string("mode", "chronological");
    if (mode == "chronological")
      cfg.split_mode = SplitMode::kChronological;
    else if (mode == "shuffled")
      cfg.split_mode = SplitMode::kShuffled;
    else
      throw ConfigError(s.path("mode"), "expected \"chronological\" or \"shuffled\"");
  }

  const std::string canonical = j.dump();
  cfg.hash = hex16(fnv1a({reinterpret_cast<const unsigned char*>(canonical.data()), canonical.size()}));
  cfg.set_seed(seed);
  return cfg;
}

PipelineConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("", "cannot read config file " + path.string());
  json j;
  try {
    j = json::parse(in, nullptr, true, true);
  } catch (const json::parse_error& e) {
    throw ConfigError("", "config " + path.string() + " is not valid JSON: " + e.what());
  }
  return parse_config(j);
}

}  // namespace flexkin
