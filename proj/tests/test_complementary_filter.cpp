#include <gtest/gtest.h>

#include <Eigen/Dense>
#include <cmath>
#include <numbers>
#include <random>

#include "flexkin/angles.hpp"
#include "flexkin/complementary_filter.hpp"
#include "flexkin/errors.hpp"
#include "flexkin/imu_synth.hpp"
#include "flexkin/joint_estimator.hpp"

using namespace flexkin;

namespace {

constexpr double kDt = 0.001;

// Amplitude of the steady-state response, by least squares on
// [sin, cos, 1] after discarding the transient.
double fitted_amplitude(const std::vector<double>& y, double w, std::size_t skip) {
  const auto rows = static_cast<Eigen::Index>(y.size() - skip);
  Eigen::MatrixXd a(rows, 3);
  Eigen::VectorXd b(rows);
  for (Eigen::Index r = 0; r < rows; ++r) {
    const double t = static_cast<double>(skip + static_cast<std::size_t>(r)) * kDt;
    a.row(r) << std::sin(w * t), std::cos(w * t), 1.0;
    b[r] = y[skip + static_cast<std::size_t>(r)];
  }
  const Eigen::Vector3d c = a.colPivHouseholderQr().solve(b);
  return std::hypot(c[0], c[1]);
}

// Response of theta_hat to an angle-only sine (G) and a rate-only sine (1 - G).
std::pair<double, double> measured_gains(const FilterGains& g, double hz) {
  const double w = 2.0 * std::numbers::pi * hz;
  const std::size_t n = 20000, skip = 10000;
  std::vector<double> th(n), rate(n), zero(n, 0.0);
  for (std::size_t k = 0; k < n; ++k) {
    const double t = static_cast<double>(k) * kDt;
    th[k] = std::sin(w * t);
    rate[k] = w * std::cos(w * t);
  }
  const auto lp = filter_trace(g, th, zero, kDt, 0, false);
  const auto hp = filter_trace(g, zero, rate, kDt, 0, false);
  return {fitted_amplitude(lp, w, skip), fitted_amplitude(hp, w, skip)};
}

}  // namespace

TEST(ComplementaryFilter, FixedPoint) {
  const FilterState s{0.4, 0.0, 0.0};
  const auto next = step(s, FilterGains::reference(), 0.4, 0.0, kDt);
  EXPECT_EQ(next.theta_hat, 0.4);
  EXPECT_EQ(next.b_hat, 0.0);
}

TEST(ComplementaryFilter, ConvergesToConstantMeasurement) {
  FilterState s{-0.5, 0.0, 0.0};
  for (int k = 0; k < 20000; ++k) s = step(s, FilterGains::reference(), 0.3, 0.0, kDt);
  // Fast mode gone, slow mode (~35 s) still decaying.
  EXPECT_NEAR(s.theta_hat, 0.3, 5e-3);
  for (int k = 0; k < 300000; ++k) s = step(s, FilterGains::reference(), 0.3, 0.0, kDt);
  EXPECT_NEAR(s.theta_hat, 0.3, 1e-6);
}

TEST(ComplementaryFilter, LinearWithoutWrapping) {
  std::mt19937_64 rng(1);
  std::normal_distribution<double> nd;
  const std::size_t n = 5000;
  std::vector<double> a(n), ar(n), b(n), br(n), c(n), cr(n);
  for (std::size_t k = 0; k < n; ++k) {
    a[k] = nd(rng), ar[k] = nd(rng), b[k] = nd(rng), br[k] = nd(rng);
    c[k] = 2.0 * a[k] - 0.5 * b[k];
    cr[k] = 2.0 * ar[k] - 0.5 * br[k];
  }
  const auto g = FilterGains{3.0, 0.7};
  const auto fa = filter_trace(g, a, ar, kDt, 0, false);
  const auto fb = filter_trace(g, b, br, kDt, 0, false);
  const auto fc = filter_trace(g, c, cr, kDt, 0, false);
  for (std::size_t k = 0; k < n; ++k) EXPECT_NEAR(fc[k], 2.0 * fa[k] - 0.5 * fb[k], 1e-10);
}

TEST(ComplementaryFilter, BoundedInputBoundedOutput) {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (const auto& g : {FilterGains::reference(), FilterGains{100.0, 10.0}, FilterGains{0.1, 0.01}}) {
    FilterState s{0.0, 0.0, 0.0};
    double peak = 0.0;
    for (int k = 0; k < 1000000; ++k) {
      s = step(s, g, u(rng), u(rng), kDt, 0, false);
      peak = std::max(peak, std::abs(s.theta_hat));
    }
    EXPECT_LT(peak, 50.0) << g.k_p << " " << g.k_i;
    EXPECT_TRUE(std::isfinite(s.b_hat));
  }
}

TEST(ComplementaryFilter, LengthOneTrace) {
  const std::vector<double> th{0.7}, rate{3.0};
  const auto out = filter_trace(FilterGains::reference(), th, rate, kDt);
  ASSERT_EQ(out.size(), 1u);
  EXPECT_EQ(out[0], 0.7);
  const std::vector<double> two{0.1, 0.2};
  EXPECT_THROW(filter_trace(FilterGains::reference(), two, rate, kDt), ArgumentError);
}

TEST(ComplementaryFilter, NonFiniteInputNamesJoint) {
  try {
    step({}, FilterGains::reference(), std::nan(""), 0.0, kDt, 3);
    FAIL();
  } catch (const PropagationError& e) {
    EXPECT_NE(std::string(e.what()).find("joint 3"), std::string::npos);
  }
}

TEST(ComplementaryFilter, WrapsAcrossPi) {
  const double pi = std::numbers::pi;
  ComplementaryFilter f(FilterGains::reference());
  f.update(pi - 0.01, 0.0, kDt);
  for (int k = 0; k < 2000; ++k) f.update(wrap_angle(pi + 0.01), 0.0, kDt);
  EXPECT_NEAR(angle_diff(f.state()->theta_hat, pi + 0.01), 0.0, 1e-3);
}

TEST(TransferFunctions, Complementarity) {
  for (const auto& g : {FilterGains::reference(), FilterGains{0.3, 5.0}}) {
    const auto tf = transfer_functions(g);
    ASSERT_EQ(tf.low_pass.denominator, tf.high_pass.denominator);
    for (std::size_t i = 0; i < 3; ++i)
      EXPECT_NEAR(tf.low_pass.numerator[i] + tf.high_pass.numerator[i], tf.low_pass.denominator[i], 1e-15);
    for (double w : {0.01, 1.0, 30.0}) {
      const auto s = std::complex<double>(0.0, w);
      EXPECT_NEAR(std::abs(tf.low_pass(s) + tf.high_pass(s) - 1.0), 0.0, 1e-14);
    }
  }
}

TEST(TransferFunctions, Limits) {
  const auto tf = transfer_functions(FilterGains::reference());
  EXPECT_NEAR(tf.low_pass.magnitude(0.0), 1.0, 1e-15);
  EXPECT_LT(tf.low_pass.magnitude(1e6), 1e-5);
  EXPECT_NEAR(tf.high_pass.magnitude(1e6), 1.0, 1e-6);
}

TEST(TransferFunctions, CutoffMatchesBisection) {
  for (const auto& g : {FilterGains::reference(), FilterGains{1.0, 4.0}, FilterGains{50.0, 0.02}}) {
    const auto tf = transfer_functions(g);
    double lo = 1e-6, hi = 1e6;
    for (int i = 0; i < 200; ++i) {
      const double mid = std::sqrt(lo * hi);
      (std::pow(tf.low_pass.magnitude(mid), 2) > 0.5 ? lo : hi) = mid;
    }
    EXPECT_NEAR(low_pass_cutoff(g), lo, 1e-9 * lo);
  }
}

TEST(ComplementaryFilter, FrequencyResponseTracksTransferFunctions) {
  const auto g = FilterGains::reference();
  const auto tf = transfer_functions(g);
  for (double hz : {0.2, 1.0, 5.0, 10.0}) {
    const double w = 2.0 * std::numbers::pi * hz;
    const auto [lp, hp] = measured_gains(g, hz);
    EXPECT_NEAR(lp / tf.low_pass.magnitude(w), 1.0, 0.02) << hz << " Hz";
    EXPECT_NEAR(hp / tf.high_pass.magnitude(w), 1.0, 0.02) << hz << " Hz";
  }
}

TEST(ComplementaryFilter, RecoversRateBias) {
  // Slow mode of the reference gains is ~35 s, so give it 300 s.
  for (const auto& [g, seconds] : {std::pair{FilterGains{2.0, 1.0}, 60}, std::pair{FilterGains::reference(), 300}}) {
    ComplementaryFilter f(g);
    const double bias = 0.01;
    for (int k = 0; k < seconds * 1000; ++k) {
      const double t = k * kDt;
      f.update(0.3 * std::sin(0.1 * t), 0.03 * std::cos(0.1 * t) + bias, kDt);
    }
    EXPECT_NEAR(f.rate_bias_estimate(), bias, 0.05 * bias) << g.k_p;
  }
}

TEST(ComplementaryFilter, ImprovesOnNoiseFreeMeasurements) {
  const auto chain = SegmentChain::uniform(4, 4.5);
  SimScenario sc;
  sc.duration = 20.0;
  sc.joints = {{0.2, 0.4, 0.0}, {0.0, 0.1, 0.0}, {0.0, 0.1, 0.0}, {0.0, 0.1, 0.0}};
  const auto sim = simulate(chain, sc, std::vector<ImuErrorModel>(5));
  const auto m = estimate_joints(chain, sim.imu, kDt);
  for (std::size_t j = 0; j < 4; ++j) {
    const auto est = filter_trace(FilterGains::reference(), m.theta_meas[j], m.theta_dot_meas[j], kDt, j);
    double raw = 0.0, filt = 0.0;
    for (std::size_t k = 0; k < est.size(); ++k) {
      const double truth = sim.truth.joints[k].angles[j];
      raw += std::pow(angle_diff(m.theta_meas[j][k], truth), 2);
      filt += std::pow(angle_diff(est[k], truth), 2);
    }
    EXPECT_LE(filt, raw) << "joint " << j;
  }
}
