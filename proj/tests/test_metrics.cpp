#include <gtest/gtest.h>

#include <cmath>
#include <fstream>
#include <sstream>

#include "fixtures/table_reference.hpp"
#include "flexkin/errors.hpp"
#include "flexkin/metrics.hpp"
#include "flexkin/residual_corrector.hpp"
#include "test_util.hpp"

using namespace flexkin;

TEST(Split, ChronologicalTakesPrefix) {
  const auto s = split(10, 0.7);
  EXPECT_EQ(s.train, (std::vector<std::size_t>{0, 1, 2, 3, 4, 5, 6}));
  EXPECT_EQ(s.test, (std::vector<std::size_t>{7, 8, 9}));
}

TEST(Split, FloorRuleAtBoundary) {
  const auto s = split(10, 0.999);
  EXPECT_EQ(s.train.size(), 9u);
  EXPECT_EQ(s.test.size(), 1u);
  EXPECT_THROW(split(10, 0.05), ArgumentError);
  EXPECT_THROW(split(0, 0.5), ArgumentError);
  EXPECT_THROW(split(10, 1.0), ArgumentError);
}

TEST(Split, ShuffledIsSeededPartition) {
  const auto a = split(1000, 0.7, SplitMode::kShuffled, 5);
  const auto b = split(1000, 0.7, SplitMode::kShuffled, 5);
  const auto c = split(1000, 0.7, SplitMode::kShuffled, 6);
  EXPECT_EQ(a.train, b.train);
  EXPECT_NE(a.train, c.train);
  ASSERT_EQ(a.train.size(), 700u);
  std::vector<int> seen(1000, 0);
  for (auto i : a.train) ++seen[i];
  for (auto i : a.test) ++seen[i];
  for (int v : seen) EXPECT_EQ(v, 1);
  EXPECT_NE(a.train.back(), 699u);
}

TEST(ErrorStats, HandComputedPair) {
  const std::vector<double> e{0.03, 0.04};
  const auto s = error_stats(e);
  EXPECT_NEAR(s.mae, 0.035, 1e-15);
  EXPECT_NEAR(s.rmse, std::sqrt((0.03 * 0.03 + 0.04 * 0.04) / 2.0), 1e-15);
  EXPECT_NEAR(s.rmse, 0.03536, 5e-6);
  EXPECT_EQ(s.max_error, 0.04);
}

TEST(ErrorStats, ConstantAndZeroErrors) {
  const std::vector<Pose2D> gt(50, Pose2D{1.0, 2.0, 3.0});
  std::vector<Pose2D> est = gt;
  const auto zero = compute_metrics(est, gt);
  EXPECT_EQ(zero.y, (ErrorStats{0, 0, 0}));
  for (auto& p : est) p.z += 0.01;
  const auto c = compute_metrics(est, gt);
  EXPECT_NEAR(c.z.rmse, 0.01, 1e-15);
  EXPECT_NEAR(c.z.mae, 0.01, 1e-15);
  EXPECT_NEAR(c.z.max_error, 0.01, 1e-15);
  EXPECT_THROW(compute_metrics(std::vector<Pose2D>(3), gt), ArgumentError);
}

TEST(ErrorStats, OrientationErrorIsWrapped) {
  const std::vector<Pose2D> gt{{0, 0, 3.1}}, est{{0, 0, -3.1}};
  EXPECT_NEAR(compute_metrics(est, gt).theta.max_error, 2.0 * M_PI - 6.2, 1e-12);
}

TEST(Report, ReproducesReferenceTableCells) {
  const auto report = table_reference::report();
  EXPECT_NO_THROW(report.check());
  EXPECT_EQ(format_markdown(report), table_reference::markdown());
  EXPECT_NE(format_markdown(report).find("| RBFNN | 0.00021 |"), std::string::npos);
}

TEST(Report, RejectsEmptyMethodSet) {
  EXPECT_THROW(format_markdown(MetricsReport{}), ArgumentError);
  EXPECT_THROW(MetricsReport{}.check(), ArgumentError);
}

TEST(Report, RejectsBrokenIdentities) {
  MetricsReport r;
  r.methods.push_back({"X", {{0.1, 0.2, 0.3}, {0, 0, 0}, {0, 0, 0}}});
  EXPECT_THROW(r.check(), ArgumentError);
  r.methods[0].metrics.y = {0.3, 0.2, 0.25};
  EXPECT_THROW(r.check(), ArgumentError);
}

TEST(Report, JsonRoundTripAndFiles) {
  auto report = table_reference::report();
  report.config_hash = "00ff00ff00ff00ff";
  report.seed = 17;
  EXPECT_EQ(MetricsReport::from_json(report.to_json()), report);
  TempDir dir;
  emit_report(report, dir.path);
  EXPECT_EQ(MetricsReport::from_json(load_json(dir.path / "metrics.json")), report);
  std::ifstream md(dir.path / "report.md");
  std::stringstream ss;
  ss << md.rdbuf();
  EXPECT_NE(ss.str().find(table_reference::markdown()), std::string::npos);
}

TEST(PlotData, LongFormat) {
  PlotSeries s;
  s.t = {0.0, 0.5};
  s.gt = {{1, 2, 0.1}, {1.5, 2.5, 0.2}};
  s.raw = s.gt;
  s.corrected = s.gt;
  TempDir dir;
  write_plot_data(s, dir.path / "plots" / "none.csv");
  std::ifstream in(dir.path / "plots" / "none.csv");
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "t,var,gt,raw,corrected");
  std::getline(in, line);
  EXPECT_EQ(line, "0,y,1,1,1");
  s.raw.pop_back();
  EXPECT_THROW(write_plot_data(s, dir.path / "x.csv"), ArgumentError);
}
