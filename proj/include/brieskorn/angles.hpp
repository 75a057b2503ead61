#pragma once

#include <cmath>
#include <numbers>

namespace brieskorn {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Reduce an angle to [0, 2π).
inline double wrap_angle(double a) {
  double w = std::fmod(a, kTwoPi);
  if (w < 0.0) w += kTwoPi;
  // fmod can round a tiny negative input up to exactly 2π
  if (w >= kTwoPi) w = 0.0;
  return w;
}

/// Distance on the unit circle, in [0, π].
inline double circular_distance(double a, double b) {
  const double d = wrap_angle(a - b);
  return d > kPi ? kTwoPi - d : d;
}

}  // namespace brieskorn
