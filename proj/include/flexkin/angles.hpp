#pragma once

#include <cmath>
#include <numbers>

namespace flexkin {

/// Wraps an angle to (-pi, pi].
inline double wrap_angle(double angle) {
  double r = std::remainder(angle, 2.0 * std::numbers::pi);
  if (r <= -std::numbers::pi) r += 2.0 * std::numbers::pi;
  return r;
}

/// Wrapped difference a - b.
inline double angle_diff(double a, double b) {
  const double d = a - b;
  return std::atan2(std::sin(d), std::cos(d));
}

}  // namespace flexkin
