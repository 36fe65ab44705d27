#pragma once

#include <complex>
#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace flexkin {

struct FilterGains {
  double k_p = 7.0407;  ///< 1/s
  double k_i = 0.1984;  ///< 1/s^2

  /// Reference gains shipped as the default.
  static constexpr FilterGains reference() { return {7.0407, 0.1984}; }

  static constexpr double kMinKp = 0.1, kMaxKp = 100.0;
  static constexpr double kMinKi = 0.01, kMaxKi = 10.0;

  bool within_tuning_bounds() const {
    return k_p >= kMinKp && k_p <= kMaxKp && k_i >= kMinKi && k_i <= kMaxKi;
  }
  /// Throws ArgumentError unless both gains are positive and finite.
  void validate() const;

  friend bool operator==(const FilterGains&, const FilterGains&) = default;
};

struct FilterState {
  double theta_hat = 0.0;
  double b_hat = 0.0;      ///< additive rate correction, rad/s
  double last_rate = 0.0;  ///< previous theta_dot_meas, for rate integration

  /// State after seeing the first measurement pair.
  static FilterState initial(double theta_meas, double theta_dot_meas) {
    return {theta_meas, 0.0, theta_dot_meas};
  }
};

/**
 * One sample of the PI complementary filter
 *
 *   theta_hat' = b_hat + k_p (theta_meas - theta_hat) + theta_dot_meas
 *   b_hat'     = k_i (theta_meas - theta_hat)
 *
 * discretized as predict/correct: the measured rate is integrated with the
 * trapezoidal rule (b_hat with Euler), then the innovation
 * e = wrap(theta_meas - theta_pred) corrects both states with Euler steps.
 * `joint` only labels the error message for non-finite inputs.
 */
FilterState step(const FilterState& state, const FilterGains& gains, double theta_meas,
                 double theta_dot_meas, double dt, std::size_t joint = 0, bool wrap = true);

class ComplementaryFilter {
 public:
  ComplementaryFilter(FilterGains gains, std::size_t joint = 0, bool wrap = true);

  /// First call initializes from the measurement; returns theta_hat.
  double update(double theta_meas, double theta_dot_meas, double dt);

  const std::optional<FilterState>& state() const { return state_; }
  /// Estimated bias of the measured rate (b_hat cancels it, hence -b_hat).
  double rate_bias_estimate() const { return state_ ? -state_->b_hat : 0.0; }
  void reset() { state_.reset(); }

 private:
  FilterGains gains_;
  std::size_t joint_;
  bool wrap_;
  std::optional<FilterState> state_;
};

/// Applies the filter sample by sample; output[0] = theta_meas[0].
std::vector<double> filter_trace(const FilterGains& gains, std::span<const double> theta_meas,
                                 std::span<const double> theta_dot_meas, double dt,
                                 std::size_t joint = 0, bool wrap = true);

/// Polynomial in s, coefficients from the highest power down.
struct RationalFunction {
  std::vector<double> numerator;
  std::vector<double> denominator;

  std::complex<double> operator()(std::complex<double> s) const;
  double magnitude(double omega) const { return std::abs((*this)(std::complex<double>(0.0, omega))); }
};

/// G(s) = (k_p s + k_i)/(s^2 + k_p s + k_i) and its complement
/// 1 - G(s) = s^2/(s^2 + k_p s + k_i), both over the same denominator.
struct TransferPair {
  RationalFunction low_pass;
  RationalFunction high_pass;
};

TransferPair transfer_functions(const FilterGains& gains);

/// Angular frequency (rad/s) where |G(jw)|^2 = 1/2, closed form.
double low_pass_cutoff(const FilterGains& gains);

}  // namespace flexkin
