#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "flexkin/chain_model.hpp"

namespace flexkin {

enum class SplitMode { kChronological, kShuffled };

struct SplitIndices {
  std::vector<std::size_t> train;
  std::vector<std::size_t> test;
};

/// Train gets floor(ratio * n) samples. Chronological keeps order; shuffled
/// permutes with `seed`. Throws ArgumentError if either side ends up empty.
SplitIndices split(std::size_t n, double ratio, SplitMode mode = SplitMode::kChronological,
                   std::uint64_t seed = 0);

struct ErrorStats {
  double rmse = 0.0;
  double mae = 0.0;
  double max_error = 0.0;

  friend bool operator==(const ErrorStats&, const ErrorStats&) = default;
};

ErrorStats error_stats(std::span<const double> errors);

struct PoseMetrics {
  ErrorStats y;
  ErrorStats z;
  ErrorStats theta;  ///< on wrapped differences

  friend bool operator==(const PoseMetrics&, const PoseMetrics&) = default;
};

PoseMetrics compute_metrics(std::span<const Pose2D> est, std::span<const Pose2D> gt);

struct MethodMetrics {
  std::string method;
  PoseMetrics metrics;

  friend bool operator==(const MethodMetrics&, const MethodMetrics&) = default;
};

/// Rows of the comparison table, in display order (e.g. Raw, LR, RBFNN).
struct MetricsReport {
  std::vector<MethodMetrics> methods;
  std::string config_hash;
  std::uint64_t seed = 0;

  /// Throws ArgumentError on an empty method set or violated identities
  /// (RMSE >= MAE, MaxError >= RMSE).
  void check() const;

  nlohmann::json to_json() const;
  static MetricsReport from_json(const nlohmann::json& j);

  friend bool operator==(const MetricsReport&, const MetricsReport&) = default;
};

/// Markdown table: Metric | Method | y [m] | z [m] | theta [rad], values
/// with five decimals, one row group per metric labelled on its middle row.
std::string format_markdown(const MetricsReport& report);

/// Writes report.md and metrics.json into `dir` after check().
void emit_report(const MetricsReport& report, const std::filesystem::path& dir);

/// One time series for the figure CSVs.
struct PlotSeries {
  std::vector<double> t;
  std::vector<Pose2D> gt;
  std::vector<Pose2D> raw;
  std::vector<Pose2D> corrected;
};

/// `t,var,gt,raw,corrected`, long format (var in {y, z, theta}).
void write_plot_data(const PlotSeries& series, const std::filesystem::path& path);

}  // namespace flexkin
