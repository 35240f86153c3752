// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "navsim/dynamics.hpp"
#include "navsim/kinematics.hpp"
#include "navsim/units.hpp"

namespace navsim {

enum class EncounterType {
  HeadOn,
  StarboardCrossingSmall,
  StarboardCrossingLarge,
  PortCrossing,
  BeingOvertaken,
  Overtaking,
  Clear,
};

enum class RiskLevel { None, Watch, GiveWay, Critical };

inline const char* to_string(EncounterType e) {
  switch (e) {
    case EncounterType::HeadOn: return "HeadOn";
    case EncounterType::StarboardCrossingSmall: return "StarboardCrossingSmall";
    case EncounterType::StarboardCrossingLarge: return "StarboardCrossingLarge";
    case EncounterType::PortCrossing: return "PortCrossing";
    case EncounterType::BeingOvertaken: return "BeingOvertaken";
    case EncounterType::Overtaking: return "Overtaking";
    case EncounterType::Clear: return "Clear";
  }
  return "?";
}

inline const char* to_string(RiskLevel r) {
  switch (r) {
    case RiskLevel::None: return "None";
    case RiskLevel::Watch: return "Watch";
    case RiskLevel::GiveWay: return "GiveWay";
    case RiskLevel::Critical: return "Critical";
  }
  return "?";
}

/// Risk gates. Defaults: d_safe 0.5 nm, horizon 20 min, alert ring 6 nm,
/// critical ring 0.8 nm.
struct RiskThresholds {
  double d_safe = nm2m(0.5);      // m, DCPA bound
  double t_horizon = 1200.0;      // s, TCPA bound
  double r_alert = nm2m(6.0);     // m, range gate
  double r_critical = nm2m(0.8);  // m, stand-on-must-act gate
};

struct EncounterAssessment {
  std::string target_id;
  EncounterType encounter = EncounterType::Clear;
  CpaResult cpa;
  RiskLevel risk = RiskLevel::None;
  std::optional<int> priority;  // 1 = most urgent; absent when risk == None
};

enum class Maneuver {
  StarboardTurn,
  PortTurn,
  SlowDown,
  Stop,
  StandOn,
  ResumeCourse,
};

inline const char* to_string(Maneuver m) {
  switch (m) {
    case Maneuver::StarboardTurn: return "StarboardTurn";
    case Maneuver::PortTurn: return "PortTurn";
    case Maneuver::SlowDown: return "SlowDown";
    case Maneuver::Stop: return "Stop";
    case Maneuver::StandOn: return "StandOn";
    case Maneuver::ResumeCourse: return "ResumeCourse";
  }
  return "?";
}

inline std::optional<Maneuver> maneuver_from_string(const std::string& s) {
  if (s == "StarboardTurn") return Maneuver::StarboardTurn;
  if (s == "PortTurn") return Maneuver::PortTurn;
  if (s == "SlowDown") return Maneuver::SlowDown;
  if (s == "Stop") return Maneuver::Stop;
  if (s == "StandOn") return Maneuver::StandOn;
  if (s == "ResumeCourse") return Maneuver::ResumeCourse;
  return std::nullopt;
}

/// Course/speed order with the rule that produced it.
struct DecisionCommand {
  Maneuver maneuver = Maneuver::StandOn;
  std::optional<double> course_order;  // rad
  std::optional<double> speed_order;   // m/s
  std::string rationale;
};

// Sector boundaries (see docs/colregs_sectors.md). Comparisons are snapped
// by a small tolerance so geometry reconstructed through atan2 lands on the
// documented side of each boundary.
namespace sector {
inline constexpr double kHeadOnHalfWidth = deg2rad(6.0);
inline constexpr double kCrossingSplit = deg2rad(67.5);
inline constexpr double kAbaftBeam = deg2rad(112.5);
inline constexpr double kPortSectorEnd = deg2rad(354.0);
inline constexpr double kAngleTol = 1e-9;     // rad
inline constexpr double kTcpaTol = 1e-6;      // s
}  // namespace sector

/// Encounter-type classification over relative bearing, course difference,
/// speed ratio and closing geometry. Total: every input maps to exactly one
/// label, with Clear as the catch-all (and as the diverging override).
inline EncounterType classify(const ShipState& os, const ShipState& ts) {
  if (os.pos.x == ts.pos.x && os.pos.y == ts.pos.y)
    throw std::domain_error("classify: coincident ships");

  const double beta = relative_bearing(os.heading, os.pos, ts.pos);
  const CpaResult k = cpa(os.pos, velocity_of(os), ts.pos, velocity_of(ts));

  if (k.tcpa < -sector::kTcpaTol) return EncounterType::Clear;  // past CPA, opening

  const double dc = wrap_two_pi(ts.heading - os.heading);
  const bool closing = k.tcpa > sector::kTcpaTol;

  const double tol = sector::kAngleTol;
  const bool bow_window = std::abs(wrap_pi(beta)) <= sector::kHeadOnHalfWidth + tol;
  const bool reciprocal =
      std::abs(wrap_pi(dc - kPi)) <= sector::kHeadOnHalfWidth + tol;
  if (bow_window && reciprocal) return EncounterType::HeadOn;

  const bool ts_abaft_os =
      beta > sector::kAbaftBeam + tol && beta < kTwoPi - sector::kAbaftBeam - tol;
  if (ts_abaft_os && ts.speed > os.speed && closing)
    return EncounterType::BeingOvertaken;

  const double beta_ts = relative_bearing(ts.heading, ts.pos, os.pos);
  const bool os_abaft_ts = beta_ts > sector::kAbaftBeam + tol &&
                           beta_ts < kTwoPi - sector::kAbaftBeam - tol;
  if (os_abaft_ts && os.speed > ts.speed && closing)
    return EncounterType::Overtaking;

  if (beta > sector::kHeadOnHalfWidth + tol && beta <= sector::kCrossingSplit + tol)
    return EncounterType::StarboardCrossingSmall;
  if (beta > sector::kCrossingSplit + tol && beta <= sector::kAbaftBeam + tol)
    return EncounterType::StarboardCrossingLarge;
  if (beta >= kTwoPi - sector::kAbaftBeam - tol && beta < sector::kPortSectorEnd - tol)
    return EncounterType::PortCrossing;

  return EncounterType::Clear;
}

/// Risk grading of one CPA result against the gates.
inline RiskLevel assess_risk(const CpaResult& c, const RiskThresholds& th) {
  const bool closing = c.tcpa > sector::kTcpaTol;
  if (c.range < th.r_critical && closing) return RiskLevel::Critical;
  if (c.dcpa < th.d_safe && c.tcpa > 0.0 && c.tcpa < th.t_horizon &&
      c.range < th.r_alert)
    return RiskLevel::GiveWay;
  if (c.dcpa < 2.0 * th.d_safe && c.tcpa > 0.0 && c.tcpa < 2.0 * th.t_horizon)
    return RiskLevel::Watch;
  return RiskLevel::None;
}

/// Rank at-risk targets 1..n by (severity desc, tcpa asc, dcpa asc, range
/// asc, id asc). Risk-free targets keep an empty priority.
inline std::vector<EncounterAssessment> prioritize(
    std::vector<EncounterAssessment> assessments) {
  std::vector<EncounterAssessment*> at_risk;
  for (auto& a : assessments) {
    a.priority.reset();
    if (a.risk != RiskLevel::None) at_risk.push_back(&a);
  }
  std::sort(at_risk.begin(), at_risk.end(),
            [](const EncounterAssessment* a, const EncounterAssessment* b) {
              if (a->risk != b->risk)
                return static_cast<int>(a->risk) > static_cast<int>(b->risk);
              if (a->cpa.tcpa != b->cpa.tcpa) return a->cpa.tcpa < b->cpa.tcpa;
              if (a->cpa.dcpa != b->cpa.dcpa) return a->cpa.dcpa < b->cpa.dcpa;
              if (a->cpa.range != b->cpa.range) return a->cpa.range < b->cpa.range;
              return a->target_id < b->target_id;
            });
  for (std::size_t i = 0; i < at_risk.size(); ++i)
    at_risk[i]->priority = static_cast<int>(i) + 1;
  return assessments;
}

/// Build prioritized assessments for all targets of one own ship.
inline std::vector<EncounterAssessment> assess_targets(
    const ShipState& os,
    const std::vector<std::pair<std::string, ShipState>>& targets,
    const RiskThresholds& th) {
  std::vector<EncounterAssessment> out;
  out.reserve(targets.size());
  for (const auto& [id, ts] : targets) {
    EncounterAssessment a;
    a.target_id = id;
    a.cpa = cpa(os.pos, velocity_of(os), ts.pos, velocity_of(ts));
    a.encounter = classify(os, ts);
    a.risk = assess_risk(a.cpa, th);
    out.push_back(std::move(a));
  }
  return prioritize(std::move(out));
}

struct RuleOptions {
  double turn_increment = deg2rad(30.0);  // per decision cycle
  int resume_hold_cycles = 3;             // risk-free cycles before resume
};

/// Side of own ship where the target will pass, predicted from the CPA
/// offset point; falls back to the current bearing when DCPA ~ 0.
/// Returns +1 for starboard, -1 for port.
inline int passing_side(const ShipState& os, const ShipState& ts) {
  const CpaResult k = cpa(os.pos, velocity_of(os), ts.pos, velocity_of(ts));
  const LocalPoint vo = velocity_components(velocity_of(os));
  const LocalPoint vt = velocity_components(velocity_of(ts));
  const double t = std::max(k.tcpa, 0.0);
  const double ox = (ts.pos.x - os.pos.x) + (vt.x - vo.x) * t;
  const double oy = (ts.pos.y - os.pos.y) + (vt.y - vo.y) * t;
  double bearing;
  if (std::hypot(ox, oy) > 1.0)
    bearing = wrap_pi(std::atan2(ox, oy) - os.heading);
  else
    bearing = wrap_pi(relative_bearing(os.heading, os.pos, ts.pos));
  return bearing >= 0.0 ? +1 : -1;
}

/// Deterministic single-cycle avoidance rule. `clear_cycles` is the number
/// of consecutive risk-free decision cycles observed before this one; the
/// course is only resumed once it reaches opts.resume_hold_cycles (callers
/// with no history can pass the default to resume immediately).
///
/// Give-way classes turn starboard by opts.turn_increment per cycle while
/// risk persists. Stand-on classes (port crossing, being overtaken) hold on
/// until the risk turns Critical; a critical port-crosser gets a starboard
/// turn, a critical overtaker an evasive turn away from its passing side.
/// Watch-level traffic is monitored without maneuvering.
inline DecisionCommand rule_decision(
    const ShipState& os, const LocalPoint& goal, double cruise_speed,
    const std::vector<EncounterAssessment>& assessments,
    const std::vector<std::pair<std::string, ShipState>>& targets = {},
    const RuleOptions& opts = {},
    int clear_cycles = std::numeric_limits<int>::max()) {
  const EncounterAssessment* top = nullptr;
  for (const auto& a : assessments)
    if (a.priority && *a.priority == 1) top = &a;

  DecisionCommand cmd;
  if (top == nullptr) {
    if (clear_cycles >= opts.resume_hold_cycles) {
      cmd.maneuver = Maneuver::ResumeCourse;
      cmd.course_order = true_bearing(os.pos, goal);
      cmd.speed_order = cruise_speed;
      cmd.rationale = "no collision risk; resuming course toward the goal";
    } else {
      cmd.maneuver = Maneuver::StandOn;
      cmd.rationale = "risk recently cleared; holding course until confirmed";
    }
    return cmd;
  }

  if (top->risk == RiskLevel::Watch) {
    cmd.maneuver = Maneuver::StandOn;
    cmd.rationale = "target " + top->target_id +
                    " under watch; holding course and speed";
    return cmd;
  }

  const auto starboard_turn = [&](const std::string& why) {
    cmd.maneuver = Maneuver::StarboardTurn;
    cmd.course_order = wrap_two_pi(os.heading + opts.turn_increment);
    cmd.rationale = why;
  };

  switch (top->encounter) {
    case EncounterType::HeadOn:
      starboard_turn("head-on with " + top->target_id +
                     " (Rule 14): turn starboard, pass port to port");
      break;
    case EncounterType::StarboardCrossingSmall:
    case EncounterType::StarboardCrossingLarge:
      starboard_turn("give-way in starboard crossing with " + top->target_id +
                     " (Rule 15): turn starboard, pass astern");
      break;
    case EncounterType::Overtaking:
      starboard_turn("overtaking " + top->target_id +
                     " (Rule 13): turn starboard, keep clear");
      break;
    case EncounterType::PortCrossing:
      if (top->risk == RiskLevel::Critical) {
        starboard_turn("stand-on vessel in extremis with " + top->target_id +
                       " (Rule 17): evasive starboard turn");
      } else {
        cmd.maneuver = Maneuver::StandOn;
        cmd.rationale = "stand-on for port crossing with " + top->target_id +
                        " (Rule 17): hold course and speed";
      }
      break;
    case EncounterType::BeingOvertaken: {
      if (top->risk != RiskLevel::Critical) {
        cmd.maneuver = Maneuver::StandOn;
        cmd.rationale = "being overtaken by " + top->target_id +
                        " (Rule 13): hold course and speed";
        break;
      }
      int side = +1;
      for (const auto& [id, ts] : targets)
        if (id == top->target_id) side = passing_side(os, ts);
      if (side >= 0) {
        cmd.maneuver = Maneuver::PortTurn;
        cmd.course_order = wrap_two_pi(os.heading - opts.turn_increment);
        cmd.rationale = "overtaker " + top->target_id +
                        " not keeping clear, passing to starboard: evasive port turn";
      } else {
        starboard_turn("overtaker " + top->target_id +
                       " not keeping clear, passing to port: evasive starboard turn");
      }
      break;
    }
    case EncounterType::Clear:
      if (top->risk == RiskLevel::Critical) {
        int side = +1;
        for (const auto& [id, ts] : targets)
          if (id == top->target_id) side = passing_side(os, ts);
        if (side >= 0) {
          cmd.maneuver = Maneuver::PortTurn;
          cmd.course_order = wrap_two_pi(os.heading - opts.turn_increment);
          cmd.rationale = "close-quarters with " + top->target_id +
                          ": evasive port turn";
        } else {
          starboard_turn("close-quarters with " + top->target_id +
                         ": evasive starboard turn");
        }
      } else {
        cmd.maneuver = Maneuver::StandOn;
        cmd.rationale = "at-risk target " + top->target_id +
                        " outside maneuver sectors; holding";
      }
      break;
  }
  return cmd;
}

}  // namespace navsim
