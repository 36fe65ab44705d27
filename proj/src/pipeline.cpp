#include "flexkin/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include <spdlog/spdlog.h>

#include "flexkin/cost.hpp"
#include "flexkin/dataset_io.hpp"
#include "flexkin/errors.hpp"
#include "flexkin/gain_tuner.hpp"
#include "flexkin/metrics.hpp"
#include "flexkin/residual_corrector.hpp"
#include "flexkin/seeding.hpp"

namespace flexkin {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr std::size_t kPlotStride = 10;

void require(const fs::path& path, const char* producer) {
  if (!fs::exists(path))
    throw PipelineError("missing " + path.string() + "; run `flexkin " + producer + "` first");
}

json stamp(const PipelineConfig& cfg) { return {{"config_hash", cfg.hash}, {"seed", cfg.seed}}; }

void check_stamp(const json& j, const PipelineConfig& cfg, const fs::path& where) {
  if (j.value("seed", cfg.seed) != cfg.seed)
    throw PipelineError(where.string() + " was produced with seed " +
                        std::to_string(j.value("seed", std::uint64_t{0})) + ", current seed is " +
                        std::to_string(cfg.seed) + "; re-run the upstream stages");
  if (j.value("config_hash", cfg.hash) != cfg.hash)
    spdlog::warn("{} was produced by config {}, current config is {}", where.string(),
                 j.value("config_hash", ""), cfg.hash);
}

json breakdown_json(const CostBreakdown& c) {
  return {{"delay_penalty", c.delay_penalty},
          {"noise_penalty", c.noise_penalty},
          {"error_penalty", c.error_penalty},
          {"total", c.total}};
}

void check_chain(const AlignedDataset& ds, const PipelineConfig& cfg) {
  if (ds.imu.size() != cfg.chain.imu_count())
    throw PipelineError("dataset has " + std::to_string(ds.imu.size()) + " IMUs, config chain needs " +
                        std::to_string(cfg.chain.imu_count()));
}

AlignedDataset load_checked(const PipelineConfig& cfg, const StageDirs& dirs) {
  auto ds = load_dataset(dirs.dataset_dir());
  check_stamp(load_json(dirs.dataset_dir() / "meta.json"), cfg, dirs.dataset_dir() / "meta.json");
  check_chain(ds, cfg);
  return ds;
}

std::vector<Pose2D> read_poses_csv(const fs::path& path, std::vector<double>* t = nullptr) {
  const auto table = read_csv(path);
  const auto ct = table.column("t"), cy = table.column("y"), cz = table.column("z"),
             cth = table.column("theta");
  std::vector<Pose2D> out;
  out.reserve(table.rows.size());
  for (const auto& r : table.rows) {
    out.push_back({r[cy], r[cz], r[cth]});
    if (t) t->push_back(r[ct]);
  }
  return out;
}

}  // namespace

void write_joints_csv(const fs::path& path, const std::vector<double>& t,
                      const JointMeasurementTrace& joints) {
  const std::size_t n = joints.joints();
  if (joints.samples() != t.size()) throw ArgumentError("write_joints_csv: length mismatch");
  std::vector<std::string> header{"t"};
  for (const char* name : {"theta_", "theta_dot_", "quality_"})
    for (std::size_t j = 1; j <= n; ++j) header.push_back(name + std::to_string(j));
  std::vector<std::vector<double>> rows(t.size());
  for (std::size_t k = 0; k < t.size(); ++k) {
    auto& r = rows[k];
    r.reserve(1 + 3 * n);
    r.push_back(t[k]);
    for (std::size_t j = 0; j < n; ++j) r.push_back(joints.theta_meas[j][k]);
    for (std::size_t j = 0; j < n; ++j) r.push_back(joints.theta_dot_meas[j][k]);
    for (std::size_t j = 0; j < n; ++j) r.push_back(joints.quality[j][k]);
  }
  write_csv(path, header, rows);
}

JointMeasurementTrace read_joints_csv(const fs::path& path) {
  const auto table = read_csv(path);
  if (table.header.empty() || (table.header.size() - 1) % 3 != 0)
    throw IoError("unexpected joints header", path.string());
  const std::size_t n = (table.header.size() - 1) / 3;
  JointMeasurementTrace out;
  out.theta_meas.assign(n, {});
  out.theta_dot_meas.assign(n, {});
  out.quality.assign(n, {});
  for (std::size_t j = 0; j < n; ++j) {
    const auto c0 = table.column("theta_" + std::to_string(j + 1));
    const auto c1 = table.column("theta_dot_" + std::to_string(j + 1));
    const auto c2 = table.column("quality_" + std::to_string(j + 1));
    for (const auto& r : table.rows) {
      out.theta_meas[j].push_back(r[c0]);
      out.theta_dot_meas[j].push_back(r[c1]);
      out.quality[j].push_back(r[c2]);
      if (r[c2] < kDegenerateQuality) ++out.degenerate_samples;
    }
  }
  return out;
}

AlignedDataset load_dataset(const fs::path& dir) {
  const auto imu_path = dir / "imu.csv", gt_path = dir / "ground_truth.csv",
             meta_path = dir / "meta.json";
  for (const auto& p : {imu_path, gt_path, meta_path}) require(p, "simulate");
  const json meta = load_json(meta_path);
  AlignedDataset ds;
  try {
    ds.sample_period = meta.at("sample_period").get<double>();
    ds.provenance.seed = meta.at("seed").get<std::uint64_t>();
    ds.provenance.config_hash = meta.at("config_hash").get<std::string>();
    for (const auto& s : meta.at("spans"))
      ds.provenance.spans.push_back({s.at("begin").get<std::size_t>(), s.at("end").get<std::size_t>(),
                                     s.at("payload_tag").get<std::string>(),
                                     s.at("omega").get<double>()});
  } catch (const json::exception& e) {
    throw IoError(std::string("malformed dataset metadata (") + e.what() + ")", meta_path.string());
  }
  ds.imu = read_imu_csv(imu_path);
  auto truth = read_ground_truth_csv(gt_path);
  ds.t = std::move(truth.t);
  ds.truth = std::move(truth.pose);
  for (auto& js : truth.joints) ds.joint_truth.push_back(std::move(js.angles));
  try {
    ds.validate();
  } catch (const ArgumentError& e) {
    throw PipelineError(std::string("dataset in ") + dir.string() + " is inconsistent: " + e.what());
  }
  return ds;
}

void run_simulate(const PipelineConfig& cfg, const StageDirs& dirs) {
  spdlog::info("simulate: {} scenario(s), {} IMUs", cfg.scenarios.size(), cfg.chain.imu_count());
  const auto sim = simulate_batch(cfg.chain, cfg.scenarios, cfg.imu_errors);
  const auto dir = dirs.dataset_dir();
  export_dataset(sim.imu, sim.truth, dir);

  json spans = json::array();
  std::size_t begin = 0;
  for (const auto& sc : cfg.scenarios) {
    const std::size_t end = begin + sc.sample_count();
    spans.push_back({{"begin", begin}, {"end", end}, {"payload_tag", sc.payload_tag}, {"omega", sc.omega}});
    begin = end;
  }
  json meta = stamp(cfg);
  meta["sample_period"] = cfg.sample_period();
  meta["samples"] = sim.truth.t.size();
  meta["imu_count"] = cfg.chain.imu_count();
  meta["segment_lengths"] = cfg.chain.lengths;
  meta["spans"] = spans;
  save_json(meta, dir / "meta.json");
  spdlog::info("simulate: wrote {} samples to {}", sim.truth.t.size(), dir.string());
}

void run_estimate(const PipelineConfig& cfg, const StageDirs& dirs) {
  const auto ds = load_checked(cfg, dirs);
  const auto joints = estimate_joints(cfg.chain, ds.imu, ds.sample_period);
  if (joints.degenerate_samples > 0)
    spdlog::warn("estimate: {} degenerate samples fell back to rate integration",
                 joints.degenerate_samples);
  fs::create_directories(dirs.out);
  write_joints_csv(dirs.out / "joints.csv", ds.t, joints);
  json meta = stamp(cfg);
  meta["degenerate_samples"] = joints.degenerate_samples;
  save_json(meta, dirs.out / "joints.meta.json");
  spdlog::info("estimate: {} joints x {} samples", joints.joints(), joints.samples());
}

void run_tune(const PipelineConfig& cfg, const StageDirs& dirs) {
  const auto joints_path = dirs.out / "joints.csv";
  require(joints_path, "estimate");
  const auto ds = load_checked(cfg, dirs);
  if (fs::exists(dirs.out / "joints.meta.json"))
    check_stamp(load_json(dirs.out / "joints.meta.json"), cfg, dirs.out / "joints.meta.json");
  auto joints = read_joints_csv(joints_path);
  if (joints.samples() != ds.size() || joints.joints() != cfg.chain.segments())
    throw PipelineError("joints.csv does not match the dataset; run `flexkin estimate` again");

  std::size_t window = ds.size();
  if (cfg.search.tuning_window_s > 0.0)
    window = std::min(window, static_cast<std::size_t>(
                                  std::llround(cfg.search.tuning_window_s / ds.sample_period)));
  if (window < 2) throw PipelineError("tuning window holds fewer than 2 samples");
  for (auto* series : {&joints.theta_meas, &joints.theta_dot_meas, &joints.quality})
    for (auto& v : *series) v.resize(window);
  std::vector<Pose2D> truth(ds.truth.begin(), ds.truth.begin() + static_cast<std::ptrdiff_t>(window));
  const TuningProblem problem(cfg.chain, std::move(joints), std::move(truth), ds.sample_period, cfg.cost);

  json out = stamp(cfg);
  std::vector<std::vector<double>> convergence;
  FilterGains gains;
  if (cfg.fixed_gains) {
    gains = *cfg.fixed_gains;
    const auto c = problem.evaluate(gains);
    out["source"] = "config";
    out["cost"] = breakdown_json(c);
    convergence.push_back({0.0, c.penalty_sum()});
  } else {
    const auto psocfg = cfg.search.pso(derive_seed(cfg.seed, "pso"));
    spdlog::info("tune: PSO {} particles x {} iterations on {} samples", psocfg.swarm_size,
                 psocfg.iterations, window);
    const auto r = tune_gains(problem, psocfg);
    gains = r.gains;
    out["source"] = "pso";
    out["cost"] = breakdown_json(r.breakdown);
    out["reference_cost"] = breakdown_json(r.reference_breakdown);
    out["evaluations"] = r.search.evaluations;
    out["rejected"] = r.search.rejected;
    out["search"] = {{"swarm_size", psocfg.swarm_size}, {"iterations", psocfg.iterations},
                     {"inertia", psocfg.inertia},       {"cognitive", psocfg.cognitive},
                     {"social", psocfg.social},         {"lower", psocfg.lower},
                     {"upper", psocfg.upper}};
    for (std::size_t i = 0; i < r.search.convergence.size(); ++i)
      convergence.push_back({static_cast<double>(i), r.search.convergence[i]});
  }
  out["k_p"] = gains.k_p;
  out["k_i"] = gains.k_i;
  out["tuning_samples"] = window;
  out["weights"] = {{"k_delay", cfg.cost.k_delay},
                    {"k_noise", cfg.cost.k_noise},
                    {"k_error", cfg.cost.k_error},
                    {"hpf_cutoff_hz", cfg.cost.hpf_cutoff_hz},
                    {"peak_buffer", cfg.cost.peak_buffer}};
  save_json(out, dirs.out / "gains.json");
  write_csv(dirs.out / "convergence.csv", {"iteration", "best_cost"}, convergence);
  spdlog::info("tune: k_p = {}, k_i = {}", gains.k_p, gains.k_i);
}

void run_train(const PipelineConfig& cfg, const StageDirs& dirs) {
  const auto gains_path = dirs.out / "gains.json", joints_path = dirs.out / "joints.csv";
  require(joints_path, "estimate");
  require(gains_path, "tune");
  const auto ds = load_checked(cfg, dirs);
  const json gj = load_json(gains_path);
  check_stamp(gj, cfg, gains_path);
  FilterGains gains;
  try {
    gains = {gj.at("k_p").get<double>(), gj.at("k_i").get<double>()};
  } catch (const json::exception& e) {
    throw IoError(std::string("malformed gains (") + e.what() + ")", gains_path.string());
  }
  const auto joints = read_joints_csv(joints_path);
  if (joints.samples() != ds.size())
    throw PipelineError("joints.csv does not match the dataset; run `flexkin estimate` again");

  const auto est = filtered_poses(cfg.chain, joints, gains, ds.sample_period);
  std::vector<std::vector<double>> rows(est.size());
  for (std::size_t k = 0; k < est.size(); ++k) rows[k] = {ds.t[k], est[k].y, est[k].z, est[k].theta};
  write_csv(dirs.out / "filtered_poses.csv", {"t", "y", "z", "theta"}, rows);

  const auto idx = split(ds.size(), cfg.split_ratio, cfg.split_mode, derive_seed(cfg.seed, "split"));
  std::vector<ResidualSample> train;
  train.reserve(idx.train.size());
  for (auto k : idx.train) train.push_back(ResidualSample::from_poses(est[k], ds.truth[k]));

  const auto rbf = train_rbf(train, cfg.rbf);
  const auto lr = train_linear_baseline(train);
  json rj = rbf.to_json(), lj = lr.to_json();
  for (auto* j : {&rj, &lj}) {
    (*j)["config_hash"] = cfg.hash;
    (*j)["seed"] = cfg.seed;
    (*j)["training_samples"] = train.size();
  }
  save_json(rj, dirs.out / "model_rbf.json");
  save_json(lj, dirs.out / "model_lr.json");
  spdlog::info("train: {} neurons, training RMSE ({}, {}, {})", rbf.neurons(), rbf.training_rmse[0],
               rbf.training_rmse[1], rbf.training_rmse[2]);
}

void run_evaluate(const PipelineConfig& cfg, const StageDirs& dirs) {
  const auto rbf_path = dirs.out / "model_rbf.json", lr_path = dirs.out / "model_lr.json",
             est_path = dirs.out / "filtered_poses.csv";
  for (const auto& p : {rbf_path, lr_path, est_path}) require(p, "train");
  const auto ds = load_checked(cfg, dirs);
  const json rj = load_json(rbf_path), lj = load_json(lr_path);
  check_stamp(rj, cfg, rbf_path);
  check_stamp(lj, cfg, lr_path);
  const auto rbf = RbfModel::from_json(rj);
  const auto lr = LinearModel::from_json(lj);
  const auto est = read_poses_csv(est_path);
  if (est.size() != ds.size())
    throw PipelineError("filtered_poses.csv does not match the dataset; run `flexkin train` again");

  const auto idx = split(ds.size(), cfg.split_ratio, cfg.split_mode, derive_seed(cfg.seed, "split"));
  std::vector<Pose2D> gt, raw, lin, rb;
  for (auto k : idx.test) {
    gt.push_back(ds.truth[k]);
    raw.push_back(est[k]);
    lin.push_back(apply_correction(est[k], lr.predict(est[k])));
    rb.push_back(apply_correction(est[k], rbf.predict(est[k])));
  }
  MetricsReport report;
  report.config_hash = cfg.hash;
  report.seed = cfg.seed;
  report.methods = {{"Raw", compute_metrics(raw, gt)},
                    {"LR", compute_metrics(lin, gt)},
                    {"RBFNN", compute_metrics(rb, gt)}};
  emit_report(report, dirs.out);

  std::map<std::string, PlotSeries> plots;
  for (const auto& span : ds.provenance.spans) {
    auto& s = plots[span.payload_tag];
    for (std::size_t k = span.begin; k < std::min(span.end, ds.size()); k += kPlotStride) {
      s.t.push_back(ds.t[k]);
      s.gt.push_back(ds.truth[k]);
      s.raw.push_back(est[k]);
      s.corrected.push_back(apply_correction(est[k], rbf.predict(est[k])));
    }
  }
  for (const auto& [tag, s] : plots) write_plot_data(s, dirs.out / "plots" / (tag + ".csv"));
  spdlog::info("evaluate: {} test samples, report in {}", idx.test.size(), dirs.out.string());
}

void run_pipeline(const PipelineConfig& cfg, const StageDirs& dirs) {
  run_simulate(cfg, dirs);
  run_estimate(cfg, dirs);
  run_tune(cfg, dirs);
  run_train(cfg, dirs);
  run_evaluate(cfg, dirs);
}

}  // namespace flexkin
