#include "flexkin/complementary_filter.hpp"

#include <cmath>
#include <string>

#include "flexkin/angles.hpp"
#include "flexkin/errors.hpp"

namespace flexkin {

void FilterGains::validate() const {
  if (!(k_p > 0.0) || !(k_i > 0.0) || !std::isfinite(k_p) || !std::isfinite(k_i))
    throw ArgumentError("filter gains must be positive and finite (k_p=" + std::to_string(k_p) +
                        ", k_i=" + std::to_string(k_i) + ")");
}

FilterState step(const FilterState& state, const FilterGains& gains, double theta_meas,
                 double theta_dot_meas, double dt, std::size_t joint, bool wrap) {
  if (!(dt > 0.0)) throw ArgumentError("filter step: dt must be positive");
  if (!std::isfinite(theta_meas) || !std::isfinite(theta_dot_meas) ||
      !std::isfinite(state.theta_hat) || !std::isfinite(state.b_hat))
    throw PropagationError("complementary filter, joint " + std::to_string(joint) +
                           ": non-finite input or state");

  const double predicted =
      state.theta_hat + dt * state.b_hat + 0.5 * dt * (state.last_rate + theta_dot_meas);
  const double raw_innovation = theta_meas - predicted;
  const double e = wrap ? wrap_angle(raw_innovation) : raw_innovation;

  FilterState next;
  next.theta_hat = predicted + dt * gains.k_p * e;
  next.b_hat = state.b_hat + dt * gains.k_i * e;
  next.last_rate = theta_dot_meas;
  return next;
}

ComplementaryFilter::ComplementaryFilter(FilterGains gains, std::size_t joint, bool wrap)
    : gains_(gains), joint_(joint), wrap_(wrap) {
  gains_.validate();
}

double ComplementaryFilter::update(double theta_meas, double theta_dot_meas, double dt) {
  if (!state_) {
    if (!std::isfinite(theta_meas) || !std::isfinite(theta_dot_meas))
      throw PropagationError("complementary filter, joint " + std::to_string(joint_) +
                             ": non-finite initial measurement");
    state_ = FilterState::initial(theta_meas, theta_dot_meas);
  } else {
    state_ = step(*state_, gains_, theta_meas, theta_dot_meas, dt, joint_, wrap_);
  }
  return state_->theta_hat;
}

std::vector<double> filter_trace(const FilterGains& gains, std::span<const double> theta_meas,
                                 std::span<const double> theta_dot_meas, double dt,
                                 std::size_t joint, bool wrap) {
  if (theta_meas.size() != theta_dot_meas.size())
    throw ArgumentError("filter_trace: angle and rate traces differ in length");
  ComplementaryFilter filter(gains, joint, wrap);
  std::vector<double> out;
  out.reserve(theta_meas.size());
  for (std::size_t k = 0; k < theta_meas.size(); ++k)
    out.push_back(filter.update(theta_meas[k], theta_dot_meas[k], dt));
  return out;
}

std::complex<double> RationalFunction::operator()(std::complex<double> s) const {
  auto horner = [s](const std::vector<double>& c) {
    std::complex<double> acc = 0.0;
    for (double a : c) acc = acc * s + a;
    return acc;
  };
  return horner(numerator) / horner(denominator);
}

TransferPair transfer_functions(const FilterGains& gains) {
  gains.validate();
  const std::vector<double> den{1.0, gains.k_p, gains.k_i};
  return {{{0.0, gains.k_p, gains.k_i}, den}, {{1.0, 0.0, 0.0}, den}};
}

double low_pass_cutoff(const FilterGains& gains) {
  gains.validate();
  const double b = 2.0 * gains.k_i + gains.k_p * gains.k_p;
  const double x = 0.5 * (b + std::sqrt(b * b + 4.0 * gains.k_i * gains.k_i));
  return std::sqrt(x);
}

}  // namespace flexkin
