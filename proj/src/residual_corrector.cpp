#include "flexkin/residual_corrector.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include "flexkin/angles.hpp"
#include "flexkin/errors.hpp"
#include "flexkin/seeding.hpp"

namespace flexkin {

using nlohmann::json;

ResidualSample ResidualSample::from_poses(const Pose2D& estimate, const Pose2D& truth) {
  return {estimate,
          {truth.y - estimate.y, truth.z - estimate.z, angle_diff(truth.theta, estimate.theta)}};
}

Pose2D apply_correction(const Pose2D& estimate, const Eigen::Vector3d& delta) {
  return {estimate.y + delta.x(), estimate.z + delta.y(), wrap_angle(estimate.theta + delta.z())};
}

namespace {

Eigen::Vector3d as_vector(const Pose2D& p) { return {p.y, p.z, p.theta}; }

void split_samples(std::span<const ResidualSample> samples, Eigen::MatrixXd& x,
                   Eigen::MatrixXd& y) {
  const auto n = static_cast<Eigen::Index>(samples.size());
  x.resize(n, 3);
  y.resize(n, 3);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& s = samples[static_cast<std::size_t>(i)];
    x.row(i) = as_vector(s.estimate).transpose();
    y.row(i) = s.delta.transpose();
    if (!x.row(i).allFinite() || !y.row(i).allFinite())
      throw TrainingError("training sample " + std::to_string(i) + " is not finite");
    if (s.delta.cwiseAbs().maxCoeff() >= 1.0)
      throw TrainingError("training sample " + std::to_string(i) +
                          " has a residual of 1 m / 1 rad or more");
  }
}

std::uint64_t hash_samples(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y) {
  auto bytes = [](const Eigen::MatrixXd& m) {
    return std::span<const unsigned char>(reinterpret_cast<const unsigned char*>(m.data()),
                                          sizeof(double) * static_cast<std::size_t>(m.size()));
  };
  return fnv1a(bytes(y), fnv1a(bytes(x)));
}

std::vector<Eigen::Index> strided(Eigen::Index n, std::size_t limit) {
  std::vector<Eigen::Index> idx;
  const auto cap = static_cast<Eigen::Index>(std::max<std::size_t>(limit, 1));
  const Eigen::Index stride = std::max<Eigen::Index>(1, (n + cap - 1) / cap);
  for (Eigen::Index i = 0; i < n; i += stride) idx.push_back(i);
  return idx;
}

double median_pairwise_distance(const Eigen::MatrixXd& z) {
  const auto rows = strided(z.rows(), 1000);
  std::vector<double> d;
  d.reserve(rows.size() * (rows.size() - 1) / 2);
  for (std::size_t a = 0; a < rows.size(); ++a)
    for (std::size_t b = a + 1; b < rows.size(); ++b)
      d.push_back((z.row(rows[a]) - z.row(rows[b])).norm());
  if (d.empty()) return 0.0;
  auto mid = d.begin() + static_cast<std::ptrdiff_t>(d.size() / 2);
  std::nth_element(d.begin(), mid, d.end());
  return *mid;
}

Eigen::MatrixXd kernel_matrix(const Eigen::MatrixXd& z, const Eigen::MatrixXd& centers,
                              double sigma) {
  Eigen::MatrixXd phi(z.rows(), centers.rows());
  const double inv = 1.0 / (2.0 * sigma * sigma);
  for (Eigen::Index j = 0; j < centers.rows(); ++j)
    for (Eigen::Index i = 0; i < z.rows(); ++i)
      phi(i, j) = std::exp(-(z.row(i) - centers.row(j)).squaredNorm() * inv);
  return phi;
}

Eigen::MatrixXd ridge_fit(const Eigen::MatrixXd& phi, const Eigen::MatrixXd& y, double ridge) {
  Eigen::MatrixXd gram = phi.transpose() * phi;
  gram.diagonal().array() += ridge * std::max(gram.diagonal().mean(), 1e-300);
  return gram.ldlt().solve(phi.transpose() * y);
}

double mean_squared(const Eigen::MatrixXd& r) {
  return r.size() ? r.squaredNorm() / static_cast<double>(r.size()) : 0.0;
}

}  // namespace

Eigen::Vector3d RbfModel::predict(const Pose2D& estimate) const {
  const Eigen::Vector3d z = (as_vector(estimate) - input_mean).cwiseQuotient(input_std);
  const double inv = 1.0 / (2.0 * sigma * sigma);
  Eigen::Vector3d out = Eigen::Vector3d::Zero();
  for (Eigen::Index i = 0; i < centers.rows(); ++i) {
    const double phi = std::exp(-(z.transpose() - centers.row(i)).squaredNorm() * inv);
    out += phi * weights.row(i).transpose();
  }
  return out;
}

void RbfModel::validate() const {
  if (centers.cols() != 3 || weights.cols() != 3 || centers.rows() != weights.rows())
    throw TrainingError("RBF model: centers and weights must both be neurons x 3");
  if (!(sigma > 0.0) || !std::isfinite(sigma)) throw TrainingError("RBF model: sigma must be > 0");
  if (!(input_std.array() > 0.0).all())
    throw TrainingError("RBF model: normalization std must be > 0");
  if (!centers.allFinite() || !weights.allFinite() || !input_mean.allFinite())
    throw TrainingError("RBF model: non-finite parameters");
}

namespace {

json vec_json(const Eigen::Vector3d& v) { return json::array({v.x(), v.y(), v.z()}); }

Eigen::Vector3d vec_from(const json& j, const char* what) {
  if (!j.is_array() || j.size() != 3) throw TrainingError(std::string("model JSON: ") + what + " must be a 3-array");
  return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

json rows_json(const Eigen::MatrixXd& m) {
  json a = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) a.push_back({m(i, 0), m(i, 1), m(i, 2)});
  return a;
}

Eigen::MatrixXd rows_from(const json& j, const char* what) {
  if (!j.is_array()) throw TrainingError(std::string("model JSON: ") + what + " must be an array");
  Eigen::MatrixXd m(static_cast<Eigen::Index>(j.size()), 3);
  for (std::size_t i = 0; i < j.size(); ++i) m.row(static_cast<Eigen::Index>(i)) = vec_from(j[i], what).transpose();
  return m;
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

}  // namespace

json RbfModel::to_json() const {
  return {{"type", "rbf"},
          {"sigma", sigma},
          {"centers", rows_json(centers)},
          {"weights", rows_json(weights)},
          {"normalization", {{"mean", vec_json(input_mean)}, {"std", vec_json(input_std)}}},
          {"metadata",
           {{"neurons", neurons()},
            {"training_rmse", vec_json(training_rmse)},
            {"mse_history", mse_history},
            {"training_samples", training_samples},
            {"dataset_hash", hex64(dataset_hash)}}}};
}

RbfModel RbfModel::from_json(const json& j) {
  try {
    if (j.at("type") != "rbf") throw TrainingError("model JSON: not an RBF model");
    RbfModel m;
    m.sigma = j.at("sigma").get<double>();
    m.centers = rows_from(j.at("centers"), "centers");
    m.weights = rows_from(j.at("weights"), "weights");
    m.input_mean = vec_from(j.at("normalization").at("mean"), "normalization.mean");
    m.input_std = vec_from(j.at("normalization").at("std"), "normalization.std");
    const auto& meta = j.at("metadata");
    m.training_rmse = vec_from(meta.at("training_rmse"), "training_rmse");
    m.mse_history = meta.at("mse_history").get<std::vector<double>>();
    m.training_samples = meta.at("training_samples").get<std::size_t>();
    m.dataset_hash = std::stoull(meta.at("dataset_hash").get<std::string>(), nullptr, 16);
    m.validate();
    return m;
  } catch (const json::exception& e) {
    throw TrainingError(std::string("model JSON: ") + e.what());
  }
}

RbfModel train_rbf(std::span<const ResidualSample> samples, const RbfConfig& config) {
  if (samples.size() < 2) throw TrainingError("train_rbf: need at least 2 samples");
  Eigen::MatrixXd x, y;
  split_samples(samples, x, y);
  const auto n = x.rows();

  RbfModel model;
  model.training_samples = samples.size();
  model.dataset_hash = hash_samples(x, y);

  model.input_mean = x.colwise().mean().transpose();
  bool any_variance = false;
  for (int d = 0; d < 3; ++d) {
    const double var = (x.col(d).array() - model.input_mean[d]).square().mean();
    const double sd = std::sqrt(var);
    if (sd > 1e-12 * std::max(1.0, std::abs(model.input_mean[d]))) {
      model.input_std[d] = sd;
      any_variance = true;
    } else {
      model.input_std[d] = 1.0;
    }
  }
  if (!any_variance) throw TrainingError("train_rbf: inputs have zero variance in every dimension");

  const Eigen::MatrixXd z =
      (x.rowwise() - model.input_mean.transpose()).array().rowwise() /
      model.input_std.transpose().array();

  model.sigma = config.sigma ? *config.sigma : median_pairwise_distance(z);
  if (!(model.sigma > 0.0) || !std::isfinite(model.sigma))
    throw TrainingError("train_rbf: kernel width must be positive (inputs too concentrated?)");

  // Candidate centers and the rows used to score them.
  const auto cand_idx = strided(n, config.candidate_pool);
  const auto row_idx = strided(n, config.selection_rows);
  Eigen::MatrixXd cand(static_cast<Eigen::Index>(cand_idx.size()), 3);
  for (std::size_t c = 0; c < cand_idx.size(); ++c) cand.row(static_cast<Eigen::Index>(c)) = z.row(cand_idx[c]);
  Eigen::MatrixXd zs(static_cast<Eigen::Index>(row_idx.size()), 3);
  Eigen::MatrixXd ys(static_cast<Eigen::Index>(row_idx.size()), 3);
  for (std::size_t r = 0; r < row_idx.size(); ++r) {
    zs.row(static_cast<Eigen::Index>(r)) = z.row(row_idx[r]);
    ys.row(static_cast<Eigen::Index>(r)) = y.row(row_idx[r]);
  }

  Eigen::MatrixXd basis = kernel_matrix(zs, cand, model.sigma);  // orthogonalized in place
  const Eigen::VectorXd original_norm = basis.colwise().squaredNorm();
  std::vector<char> used(static_cast<std::size_t>(cand.rows()), 0);
  std::vector<Eigen::Index> chosen;

  auto refit = [&](Eigen::MatrixXd& centers, Eigen::MatrixXd& weights) {
    centers.resize(static_cast<Eigen::Index>(chosen.size()), 3);
    for (std::size_t k = 0; k < chosen.size(); ++k) centers.row(static_cast<Eigen::Index>(k)) = cand.row(chosen[k]);
    if (chosen.empty()) {
      weights.resize(0, 3);
      return mean_squared(y);
    }
    const Eigen::MatrixXd phi = kernel_matrix(z, centers, model.sigma);
    weights = ridge_fit(phi, y, config.ridge);
    return mean_squared(y - phi * weights);
  };

  Eigen::MatrixXd centers(0, 3), weights(0, 3);
  double mse = refit(centers, weights);
  model.mse_history.push_back(mse);

  while (chosen.size() < config.max_neurons && mse > config.mse_goal) {
    Eigen::Index best = -1;
    double best_gain = 0.0;
    for (Eigen::Index c = 0; c < basis.cols(); ++c) {
      if (used[static_cast<std::size_t>(c)]) continue;
      const double norm = basis.col(c).squaredNorm();
      if (norm <= 1e-10 * original_norm[c] || norm <= 0.0) continue;
      const double gain = (basis.col(c).transpose() * ys).squaredNorm() / norm;
      if (gain > best_gain) {
        best_gain = gain;
        best = c;
      }
    }
    if (best < 0) break;
    used[static_cast<std::size_t>(best)] = 1;
    chosen.push_back(best);

    const Eigen::VectorXd q = basis.col(best).normalized();
    for (Eigen::Index c = 0; c < basis.cols(); ++c)
      if (!used[static_cast<std::size_t>(c)]) basis.col(c) -= q * q.dot(basis.col(c));

    Eigen::MatrixXd next_centers, next_weights;
    const double next_mse = refit(next_centers, next_weights);
    centers = std::move(next_centers);
    weights = std::move(next_weights);
    mse = next_mse;
    model.mse_history.push_back(mse);
  }

  model.centers = centers;
  model.weights = weights;
  Eigen::MatrixXd residual = y;
  if (model.neurons() > 0) residual -= kernel_matrix(z, centers, model.sigma) * weights;
  model.training_rmse = residual.colwise().squaredNorm().transpose().cwiseQuotient(
                            Eigen::Vector3d::Constant(static_cast<double>(n)))
                            .cwiseSqrt();
  model.validate();
  return model;
}

Eigen::Vector3d LinearModel::predict(const Pose2D& estimate) const {
  return coeffs * as_vector(estimate) + offset;
}

json LinearModel::to_json() const {
  json rows = json::array();
  for (int i = 0; i < 3; ++i) rows.push_back({coeffs(i, 0), coeffs(i, 1), coeffs(i, 2)});
  return {{"type", "linear"}, {"coefficients", rows}, {"offset", vec_json(offset)}};
}

LinearModel LinearModel::from_json(const json& j) {
  try {
    if (j.at("type") != "linear") throw TrainingError("model JSON: not a linear model");
    LinearModel m;
    const Eigen::MatrixXd c = rows_from(j.at("coefficients"), "coefficients");
    if (c.rows() != 3) throw TrainingError("model JSON: coefficients must be 3 x 3");
    m.coeffs = c;
    m.offset = vec_from(j.at("offset"), "offset");
    return m;
  } catch (const json::exception& e) {
    throw TrainingError(std::string("model JSON: ") + e.what());
  }
}

LinearModel train_linear_baseline(std::span<const ResidualSample> samples) {
  if (samples.size() < 4) throw TrainingError("train_linear_baseline: need at least 4 samples");
  Eigen::MatrixXd x, y;
  split_samples(samples, x, y);
  Eigen::MatrixXd design(x.rows(), 4);
  design.leftCols(3) = x;
  design.col(3).setOnes();
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design);
  if (qr.rank() < 4) throw TrainingError("train_linear_baseline: rank-deficient design");
  const Eigen::MatrixXd beta = qr.solve(y);  // 4 x 3
  LinearModel m;
  m.coeffs = beta.topRows(3).transpose();
  m.offset = beta.row(3).transpose();
  return m;
}

void save_json(const json& j, const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open for writing", path.string());
  out << j.dump(2) << '\n';
  if (!out) throw IoError("write failed", path.string());
}

json load_json(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open for reading", path.string());
  try {
    return json::parse(in, nullptr, true, true);
  } catch (const json::exception& e) {
    throw IoError(std::string("invalid JSON (") + e.what() + ")", path.string());
  }
}

}  // namespace flexkin
