// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <stdexcept>

#include "navsim/kinematics.hpp"
#include "navsim/units.hpp"

namespace navsim {

/// Maneuvering model constants. Angles in radians, speeds in m/s.
/// Defaults are the reference tanker: first-order Nomoto steering with the
/// published rudder limits; K and T are calibration constants tuned for a
/// steady turn rate near 1.2 deg/s at full rudder.
struct ShipModelParams {
  double length = 304.8;                       // m
  double draft = 18.46;                        // m
  double nominal_speed = knots2mps(10.0);      // m/s
  double shaft_speed_rpm = 80.0;
  double max_rudder_angle = deg2rad(30.0);     // rad
  double max_rudder_rate = deg2rad(5.0);       // rad/s
  double nomoto_gain = 0.04;                   // K, 1/s
  double nomoto_time_constant = 80.0;          // T, s
  double speed_time_constant = 120.0;          // s
  double course_kp = 1.5;
  double course_kd = 60.0;                     // s
};

inline ShipModelParams reference_tanker() { return {}; }

/// Kinetic state of one vessel.
struct ShipState {
  LocalPoint pos;
  double heading = 0.0;   // rad, [0, 2*pi)
  double yaw_rate = 0.0;  // rad/s
  double speed = 0.0;     // m/s, >= 0
  double rudder = 0.0;    // rad, [-max, +max]
};

inline Velocity velocity_of(const ShipState& s) { return {s.speed, s.heading}; }

/// Helm order. When course_order is set it is resolved to a rudder order by
/// the course keeper each step; otherwise rudder_order is used directly.
struct HelmCommand {
  std::optional<double> course_order;  // rad
  double rudder_order = 0.0;           // rad
  double speed_order = 0.0;            // m/s
};

/// Proportional-derivative course-keeping law. Positive rudder = starboard.
inline double course_keeper(const ShipState& state, double course_order,
                            const ShipModelParams& p) {
  const double err = wrap_pi(course_order - state.heading);
  const double order = p.course_kp * err - p.course_kd * state.yaw_rate;
  return std::clamp(order, -p.max_rudder_angle, p.max_rudder_angle);
}

/// One forward-Euler step of the maneuvering model. The rudder actuator is
/// rate- and angle-limited; yaw follows first-order Nomoto dynamics
/// T*dr/dt + r = K*delta; speed lags toward speed_order.
inline ShipState step(const ShipState& state, const HelmCommand& cmd,
                      const ShipModelParams& p, double dt) {
  if (!(dt > 0.0) || dt > 1.0)
    throw std::invalid_argument("step: dt must be in (0, 1] s");

  const double order = cmd.course_order
                           ? course_keeper(state, *cmd.course_order, p)
                           : std::clamp(cmd.rudder_order, -p.max_rudder_angle,
                                        p.max_rudder_angle);

  ShipState next = state;

  const double max_slew = p.max_rudder_rate * dt;
  next.rudder = state.rudder + std::clamp(order - state.rudder, -max_slew, max_slew);
  next.rudder = std::clamp(next.rudder, -p.max_rudder_angle, p.max_rudder_angle);

  next.yaw_rate = state.yaw_rate +
                  dt * (p.nomoto_gain * next.rudder - state.yaw_rate) /
                      p.nomoto_time_constant;
  next.heading = wrap_two_pi(state.heading + dt * state.yaw_rate);
  next.speed = std::max(
      0.0, state.speed + dt * (std::max(0.0, cmd.speed_order) - state.speed) /
                             p.speed_time_constant);
  next.pos.x = state.pos.x + dt * state.speed * std::sin(state.heading);
  next.pos.y = state.pos.y + dt * state.speed * std::cos(state.heading);
  return next;
}

}  // namespace navsim
