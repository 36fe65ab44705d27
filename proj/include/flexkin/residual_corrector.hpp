#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "flexkin/chain_model.hpp"

namespace flexkin {

/// Training pair: estimated pose and the residual X_gt - X_hat
/// (orientation residual wrapped).
struct ResidualSample {
  Pose2D estimate;
  Eigen::Vector3d delta = Eigen::Vector3d::Zero();

  static ResidualSample from_poses(const Pose2D& estimate, const Pose2D& truth);
};

struct RbfConfig {
  double mse_goal = 0.0;
  std::size_t max_neurons = 10;
  std::optional<double> sigma;     ///< default: median pairwise distance
  double ridge = 1e-8;
  std::size_t candidate_pool = 400;
  std::size_t selection_rows = 4000;
};

struct RbfModel {
  Eigen::MatrixXd centers;          ///< neurons x 3, normalized input space
  Eigen::MatrixXd weights;          ///< neurons x 3
  double sigma = 1.0;
  Eigen::Vector3d input_mean = Eigen::Vector3d::Zero();
  Eigen::Vector3d input_std = Eigen::Vector3d::Ones();

  // metadata
  Eigen::Vector3d training_rmse = Eigen::Vector3d::Zero();
  std::vector<double> mse_history;  ///< training MSE after 0, 1, ... neurons
  std::uint64_t dataset_hash = 0;
  std::size_t training_samples = 0;

  std::size_t neurons() const { return static_cast<std::size_t>(centers.rows()); }

  /// sum_i w_i exp(-|x - c_i|^2 / (2 sigma^2)) on the normalized input.
  Eigen::Vector3d predict(const Pose2D& estimate) const;

  void validate() const;
  nlohmann::json to_json() const;
  static RbfModel from_json(const nlohmann::json& j);
};

/// Greedy forward selection of centers from the training inputs, scored by
/// orthogonal least squares; output weights refit by ridge least squares.
/// Stops at mse_goal or max_neurons. Throws TrainingError on degenerate data.
RbfModel train_rbf(std::span<const ResidualSample> samples, const RbfConfig& config = {});

inline Eigen::Vector3d predict(const RbfModel& model, const Pose2D& estimate) {
  return model.predict(estimate);
}

/// Affine least-squares baseline: delta = coeffs * x_hat + offset.
struct LinearModel {
  Eigen::Matrix3d coeffs = Eigen::Matrix3d::Zero();
  Eigen::Vector3d offset = Eigen::Vector3d::Zero();

  Eigen::Vector3d predict(const Pose2D& estimate) const;
  nlohmann::json to_json() const;
  static LinearModel from_json(const nlohmann::json& j);
};

/// Needs >= 4 samples and a full-rank design, else TrainingError.
LinearModel train_linear_baseline(std::span<const ResidualSample> samples);

/// (y + dy, z + dz, wrap(theta + dtheta)).
Pose2D apply_correction(const Pose2D& estimate, const Eigen::Vector3d& delta);

void save_json(const nlohmann::json& j, const std::filesystem::path& path);
nlohmann::json load_json(const std::filesystem::path& path);

}  // namespace flexkin
