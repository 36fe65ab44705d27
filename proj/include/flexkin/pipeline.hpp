#pragma once

#include <filesystem>
#include <optional>

#include "flexkin/aligned_dataset.hpp"
#include "flexkin/config.hpp"
#include "flexkin/joint_estimator.hpp"

namespace flexkin {

/// Where a stage reads and writes. `dataset` defaults to <out>/dataset.
struct StageDirs {
  std::filesystem::path out;
  std::optional<std::filesystem::path> dataset;

  std::filesystem::path dataset_dir() const { return dataset ? *dataset : out / "dataset"; }
};

/// dataset/imu.csv, dataset/ground_truth.csv, dataset/meta.json
void run_simulate(const PipelineConfig& cfg, const StageDirs& dirs);
/// joints.csv
void run_estimate(const PipelineConfig& cfg, const StageDirs& dirs);
/// gains.json, convergence.csv
void run_tune(const PipelineConfig& cfg, const StageDirs& dirs);
/// filtered_poses.csv, model_rbf.json, model_lr.json
void run_train(const PipelineConfig& cfg, const StageDirs& dirs);
/// metrics.json, report.md, plots/<payload_tag>.csv
void run_evaluate(const PipelineConfig& cfg, const StageDirs& dirs);
/// All of the above in order.
void run_pipeline(const PipelineConfig& cfg, const StageDirs& dirs);

/// Loads a dataset written by run_simulate. Throws PipelineError naming
/// `simulate` if a file is missing.
AlignedDataset load_dataset(const std::filesystem::path& dir);

void write_joints_csv(const std::filesystem::path& path, const std::vector<double>& t,
                      const JointMeasurementTrace& joints);
JointMeasurementTrace read_joints_csv(const std::filesystem::path& path);

}  // namespace flexkin
