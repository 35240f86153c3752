// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "navsim/units.hpp"

namespace navsim {

/// Geographic position, degrees. lon in [-180, 180), lat in [-90, 90].
struct GeoPosition {
  double lon = 0.0;
  double lat = 0.0;
};

/// Local tangent-plane point, meters east / north of the scenario origin.
struct LocalPoint {
  double x = 0.0;
  double y = 0.0;
};

/// Speed over ground (m/s, >= 0) and course over ground (rad, [0, 2*pi)).
struct Velocity {
  double sog = 0.0;
  double cog = 0.0;
};

/// Closest-point-of-approach result for an ordered (own, target) pair.
/// tcpa is signed: negative means the pair is past CPA and diverging, in
/// which case dcpa is clamped to the current range.
struct CpaResult {
  double range = 0.0;             // meters
  double relative_bearing = 0.0;  // rad, clockwise from own heading
  double dcpa = 0.0;              // meters
  double tcpa = 0.0;              // seconds
};

inline double normalize_lon(double lon) {
  if (lon >= -180.0 && lon < 180.0) return lon;  // exact fast path
  double w = std::fmod(lon + 180.0, 360.0);
  if (w < 0.0) w += 360.0;
  return w - 180.0;
}

inline GeoPosition normalized(GeoPosition p) {
  if (!(p.lat >= -90.0 && p.lat <= 90.0))
    throw std::range_error("latitude out of [-90, 90]");
  return {normalize_lon(p.lon), p.lat};
}

/// Maximum lon/lat offset from the origin accepted by project(), degrees.
inline constexpr double kProjectionValidityDeg = 1.0;

/// Equirectangular tangent-plane projection about `origin`.
/// Valid for points within kProjectionValidityDeg of the origin.
inline LocalPoint project(const GeoPosition& origin, const GeoPosition& p) {
  const double dlat = p.lat - origin.lat;
  const double dlon = normalize_lon(p.lon - origin.lon);
  if (std::abs(dlat) >= kProjectionValidityDeg ||
      std::abs(dlon) >= kProjectionValidityDeg)
    throw std::range_error("point outside local projection validity range");
  return {kEarthRadius * std::cos(deg2rad(origin.lat)) * deg2rad(dlon),
          kEarthRadius * deg2rad(dlat)};
}

/// Inverse of project().
inline GeoPosition unproject(const GeoPosition& origin, const LocalPoint& p) {
  const double dlat = rad2deg(p.y / kEarthRadius);
  const double dlon =
      rad2deg(p.x / (kEarthRadius * std::cos(deg2rad(origin.lat))));
  return {normalize_lon(origin.lon + dlon), origin.lat + dlat};
}

inline double distance(const LocalPoint& a, const LocalPoint& b) {
  return std::hypot(b.x - a.x, b.y - a.y);
}

/// True bearing from `from` to `to`, rad clockwise from north, [0, 2*pi).
inline double true_bearing(const LocalPoint& from, const LocalPoint& to) {
  return wrap_two_pi(std::atan2(to.x - from.x, to.y - from.y));
}

/// Clockwise angle from own bow to the line of sight, [0, 2*pi).
inline double relative_bearing(double own_heading, const LocalPoint& own_pos,
                               const LocalPoint& target_pos) {
  if (own_pos.x == target_pos.x && own_pos.y == target_pos.y)
    throw std::domain_error("relative bearing undefined for coincident positions");
  return wrap_two_pi(true_bearing(own_pos, target_pos) - own_heading);
}

/// Cartesian velocity components (east, north) of a Velocity.
inline LocalPoint velocity_components(const Velocity& v) {
  return {v.sog * std::sin(v.cog), v.sog * std::cos(v.cog)};
}

/// Relative speed below which the pair is treated as co-moving:
/// tcpa = 0 and dcpa = current range.
inline constexpr double kCpaSpeedEpsilon = 1e-6;  // m/s

/// Closed-form CPA under constant-velocity extrapolation.
/// Own course stands in for own heading when computing the bearing.
inline CpaResult cpa(const LocalPoint& own_pos, const Velocity& own_vel,
                     const LocalPoint& target_pos, const Velocity& target_vel) {
  CpaResult out;
  const double rx = target_pos.x - own_pos.x;
  const double ry = target_pos.y - own_pos.y;
  out.range = std::hypot(rx, ry);
  out.relative_bearing =
      out.range > 0.0
          ? wrap_two_pi(std::atan2(rx, ry) - own_vel.cog)
          : 0.0;

  const LocalPoint vo = velocity_components(own_vel);
  const LocalPoint vt = velocity_components(target_vel);
  const double vx = vt.x - vo.x;
  const double vy = vt.y - vo.y;
  const double v2 = vx * vx + vy * vy;
  if (std::sqrt(v2) < kCpaSpeedEpsilon) {
    out.tcpa = 0.0;
    out.dcpa = out.range;
    return out;
  }
  out.tcpa = -(rx * vx + ry * vy) / v2;
  const double t = std::max(out.tcpa, 0.0);
  out.dcpa = std::hypot(rx + vx * t, ry + vy * t);
  // guard the dcpa <= range invariant against rounding at t == 0
  if (out.dcpa > out.range) out.dcpa = out.range;
  return out;
}

/// Even-odd ray-cast point-in-polygon test. Points on an edge may land on
/// either side; callers needing boundary guarantees should inset polygons.
inline bool point_in_polygon(const LocalPoint& p,
                             const std::vector<LocalPoint>& poly) {
  if (poly.size() < 3) return false;
  bool inside = false;
  for (std::size_t i = 0, j = poly.size() - 1; i < poly.size(); j = i++) {
    const bool crosses = (poly[i].y > p.y) != (poly[j].y > p.y);
    if (crosses) {
      const double x_at = poly[j].x + (poly[i].x - poly[j].x) *
                                          (p.y - poly[j].y) /
                                          (poly[i].y - poly[j].y);
      if (p.x < x_at) inside = !inside;
    }
  }
  return inside;
}

}  // namespace navsim
