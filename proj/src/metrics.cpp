#include "flexkin/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>

#include "flexkin/angles.hpp"
#include "flexkin/dataset_io.hpp"
#include "flexkin/errors.hpp"
#include "flexkin/residual_corrector.hpp"
#include "flexkin/seeding.hpp"

namespace flexkin {

using nlohmann::json;

SplitIndices split(std::size_t n, double ratio, SplitMode mode, std::uint64_t seed) {
  if (n == 0) throw ArgumentError("split: empty dataset");
  if (!(ratio > 0.0 && ratio < 1.0)) throw ArgumentError("split: ratio must lie in (0, 1)");
  const auto n_train = static_cast<std::size_t>(std::floor(ratio * static_cast<double>(n) + 1e-9));
  if (n_train == 0 || n_train == n)
    throw ArgumentError("split: ratio " + std::to_string(ratio) + " on " + std::to_string(n) +
                        " samples leaves one side empty");

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  if (mode == SplitMode::kShuffled) {
    std::mt19937_64 rng(derive_seed(seed, "split"));
    for (std::size_t i = n - 1; i > 0; --i) {
      const auto j = static_cast<std::size_t>(uniform01(rng) * static_cast<double>(i + 1));
      std::swap(order[i], order[std::min(j, i)]);
    }
  }
  SplitIndices out;
  out.train.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_train));
  out.test.assign(order.begin() + static_cast<std::ptrdiff_t>(n_train), order.end());
  std::sort(out.train.begin(), out.train.end());
  std::sort(out.test.begin(), out.test.end());
  return out;
}

ErrorStats error_stats(std::span<const double> errors) {
  if (errors.empty()) throw ArgumentError("error_stats: no samples");
  double sq = 0.0, abs_sum = 0.0, mx = 0.0;
  for (double e : errors) {
    const double a = std::abs(e);
    sq += a * a;
    abs_sum += a;
    mx = std::max(mx, a);
  }
  const auto n = static_cast<double>(errors.size());
  return {std::sqrt(sq / n), abs_sum / n, mx};
}

PoseMetrics compute_metrics(std::span<const Pose2D> est, std::span<const Pose2D> gt) {
  if (est.size() != gt.size())
    throw ArgumentError("compute_metrics: " + std::to_string(est.size()) + " estimates vs " +
                        std::to_string(gt.size()) + " ground-truth samples");
  if (est.empty()) throw ArgumentError("compute_metrics: no samples");
  std::vector<double> ey(est.size()), ez(est.size()), et(est.size());
  for (std::size_t k = 0; k < est.size(); ++k) {
    ey[k] = est[k].y - gt[k].y;
    ez[k] = est[k].z - gt[k].z;
    et[k] = angle_diff(est[k].theta, gt[k].theta);
  }
  return {error_stats(ey), error_stats(ez), error_stats(et)};
}

namespace {

constexpr double kIdentityTol = 1e-12;

void check_stats(const ErrorStats& s, const std::string& where) {
  if (!(s.mae >= 0.0)) throw ArgumentError(where + ": MAE must be >= 0");
  if (s.rmse < s.mae * (1.0 - kIdentityTol))
    throw ArgumentError(where + ": RMSE < MAE");
  if (s.max_error < s.rmse * (1.0 - kIdentityTol))
    throw ArgumentError(where + ": MaxError < RMSE");
}

json stats_json(const ErrorStats& s) {
  return {{"rmse", s.rmse}, {"mae", s.mae}, {"max_error", s.max_error}};
}

ErrorStats stats_from(const json& j) {
  return {j.at("rmse").get<double>(), j.at("mae").get<double>(), j.at("max_error").get<double>()};
}

std::string cell(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.5f", v);
  return buf;
}

}  // namespace

void MetricsReport::check() const {
  if (methods.empty()) throw ArgumentError("metrics report has no methods");
  for (const auto& m : methods) {
    check_stats(m.metrics.y, m.method + " y");
    check_stats(m.metrics.z, m.method + " z");
    check_stats(m.metrics.theta, m.method + " theta");
  }
}

json MetricsReport::to_json() const {
  json rows = json::array();
  for (const auto& m : methods)
    rows.push_back({{"method", m.method},
                    {"y", stats_json(m.metrics.y)},
                    {"z", stats_json(m.metrics.z)},
                    {"theta", stats_json(m.metrics.theta)}});
  return {{"methods", rows}, {"config_hash", config_hash}, {"seed", seed}};
}

MetricsReport MetricsReport::from_json(const json& j) {
  try {
    MetricsReport r;
    for (const auto& row : j.at("methods"))
      r.methods.push_back({row.at("method").get<std::string>(),
                           {stats_from(row.at("y")), stats_from(row.at("z")),
                            stats_from(row.at("theta"))}});
    r.config_hash = j.value("config_hash", "");
    r.seed = j.value("seed", std::uint64_t{0});
    return r;
  } catch (const json::exception& e) {
    throw ArgumentError(std::string("metrics JSON: ") + e.what());
  }
}

std::string format_markdown(const MetricsReport& report) {
  if (report.methods.empty()) throw ArgumentError("metrics report has no methods");
  std::ostringstream out;
  out << "| Metric | Method | y [m] | z [m] | θ [rad] |\n";
  out << "|---|---|---:|---:|---:|\n";
  const char* labels[] = {"RMSE", "MAE", "Max Error"};
  // Label on the middle row of each group.
  const std::size_t label_row = (report.methods.size() - 1) / 2;
  for (int metric = 0; metric < 3; ++metric) {
    for (std::size_t i = 0; i < report.methods.size(); ++i) {
      const auto& m = report.methods[i];
      auto pick = [metric](const ErrorStats& s) {
        return metric == 0 ? s.rmse : metric == 1 ? s.mae : s.max_error;
      };
      out << "| " << (i == label_row ? labels[metric] : "") << " | " << m.method << " | "
          << cell(pick(m.metrics.y)) << " | " << cell(pick(m.metrics.z)) << " | "
          << cell(pick(m.metrics.theta)) << " |\n";
    }
  }
  return out.str();
}

void emit_report(const MetricsReport& report, const std::filesystem::path& dir) {
  report.check();
  const std::string md = format_markdown(report);
  std::filesystem::create_directories(dir);
  const auto md_path = dir / "report.md";
  std::ofstream out(md_path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open for writing", md_path.string());
  out << "# Kinematics correction comparison\n\n";
  if (!report.config_hash.empty())
    out << "config " << report.config_hash << ", seed " << report.seed << "\n\n";
  out << md;
  if (!out) throw IoError("write failed", md_path.string());
  save_json(report.to_json(), dir / "metrics.json");
}

void write_plot_data(const PlotSeries& s, const std::filesystem::path& path) {
  const std::size_t n = s.t.size();
  if (s.gt.size() != n || s.raw.size() != n || s.corrected.size() != n)
    throw ArgumentError("write_plot_data: series lengths differ");
  std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open for writing", path.string());
  out << "t,var,gt,raw,corrected\n";
  auto row = [&](double t, const char* var, double a, double b, double c) {
    out << format_double(t) << ',' << var << ',' << format_double(a) << ',' << format_double(b)
        << ',' << format_double(c) << '\n';
  };
  for (std::size_t k = 0; k < n; ++k) {
    row(s.t[k], "y", s.gt[k].y, s.raw[k].y, s.corrected[k].y);
    row(s.t[k], "z", s.gt[k].z, s.raw[k].z, s.corrected[k].z);
    row(s.t[k], "theta", s.gt[k].theta, s.raw[k].theta, s.corrected[k].theta);
  }
  if (!out) throw IoError("write failed", path.string());
}

}  // namespace flexkin
