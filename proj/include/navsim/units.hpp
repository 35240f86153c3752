// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>

namespace navsim {

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;

/// Mean spherical Earth radius, meters.
inline constexpr double kEarthRadius = 6'371'000.0;

/// One nautical mile in meters.
inline constexpr double kMetersPerNm = 1852.0;

/// One knot in meters per second (1852 m / 3600 s).
inline constexpr double kKnot = kMetersPerNm / 3600.0;

inline constexpr double deg2rad(double deg) { return deg * kPi / 180.0; }
inline constexpr double rad2deg(double rad) { return rad * 180.0 / kPi; }
inline constexpr double knots2mps(double kn) { return kn * kKnot; }
inline constexpr double mps2knots(double mps) { return mps / kKnot; }
inline constexpr double nm2m(double nm) { return nm * kMetersPerNm; }
inline constexpr double m2nm(double m) { return m / kMetersPerNm; }

/// Normalize an angle to [0, 2*pi).
inline double wrap_two_pi(double a) {
  double w = std::fmod(a, kTwoPi);
  if (w < 0.0) w += kTwoPi;
  if (w >= kTwoPi) w = 0.0;  // fmod rounding at the seam
  return w;
}

/// Normalize an angle to (-pi, pi].
inline double wrap_pi(double a) {
  double w = wrap_two_pi(a);
  return w > kPi ? w - kTwoPi : w;
}

}  // namespace navsim
