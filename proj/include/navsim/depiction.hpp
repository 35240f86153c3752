// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "navsim/colregs.hpp"
#include "navsim/dynamics.hpp"
#include "navsim/kinematics.hpp"

namespace navsim {

// --- canonical number formatting -------------------------------------------
// The scene text is a byte-exact contract (see docs/depiction_template.md):
// distances in nm with 2 decimals, speeds in knots with 1 decimal, angles in
// degrees with 1 decimal zero-padded to 3 integer digits, TCPA in minutes
// with 1 decimal, positions as (lon, lat) with 6 decimals.

namespace detail {
inline std::string printf_str(const char* fmt, double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), fmt, v);
  return buf;
}
// avoid "-0.0" style output when a negative value rounds to zero
inline double snap_zero(double v, double scale) {
  return std::round(v * scale) == 0.0 ? 0.0 : v;
}
}  // namespace detail

inline std::string fmt_deg(double rad) {
  double deg = rad2deg(wrap_two_pi(rad));
  deg = std::round(deg * 10.0) / 10.0;
  if (deg >= 360.0) deg = 0.0;
  return detail::printf_str("%05.1f", deg);
}

inline std::string fmt_nm(double meters) {
  return detail::printf_str("%.2f", detail::snap_zero(m2nm(meters), 100.0));
}

inline std::string fmt_kn(double mps) {
  return detail::printf_str("%.1f", detail::snap_zero(mps2knots(mps), 10.0));
}

inline std::string fmt_min(double seconds) {
  return detail::printf_str("%.1f", detail::snap_zero(seconds / 60.0, 10.0));
}

inline std::string fmt_pos(const GeoPosition& p) {
  return "(" + detail::printf_str("%.6f", p.lon) + ", " +
         detail::printf_str("%.6f", p.lat) + ")";
}

inline const char* encounter_phrase(EncounterType e) {
  switch (e) {
    case EncounterType::HeadOn: return "head-on";
    case EncounterType::StarboardCrossingSmall:
      return "starboard crossing (small angle)";
    case EncounterType::StarboardCrossingLarge:
      return "starboard crossing (large angle)";
    case EncounterType::PortCrossing: return "port crossing";
    case EncounterType::BeingOvertaken: return "being overtaken";
    case EncounterType::Overtaking: return "overtaking";
    case EncounterType::Clear: return "clear";
  }
  return "?";
}

inline std::optional<EncounterType> encounter_from_phrase(const std::string& s) {
  for (EncounterType e :
       {EncounterType::HeadOn, EncounterType::StarboardCrossingSmall,
        EncounterType::StarboardCrossingLarge, EncounterType::PortCrossing,
        EncounterType::BeingOvertaken, EncounterType::Overtaking,
        EncounterType::Clear}) {
    if (s == encounter_phrase(e)) return e;
  }
  return std::nullopt;
}

inline const char* risk_word(RiskLevel r) {
  switch (r) {
    case RiskLevel::None: return "none";
    case RiskLevel::Watch: return "watch";
    case RiskLevel::GiveWay: return "give-way";
    case RiskLevel::Critical: return "critical";
  }
  return "?";
}

// --- scene snapshot ---------------------------------------------------------

/// Per-target view: raw state plus the derived tool values for this instant.
struct TargetView {
  std::string id;
  ShipState state;
  CpaResult cpa;
  EncounterType encounter = EncounterType::Clear;
  RiskLevel risk = RiskLevel::None;
};

/// No-go zone as seen at one instant. `newly_appeared` marks the first
/// snapshot at or after the zone's appearance event.
struct ZoneState {
  std::string id;
  std::string label = "a large area of fishing nets";
  std::string side_text = "on the starboard side";
  std::vector<LocalPoint> polygon;
  bool newly_appeared = false;
};

/// Observation of the scenario at one decision instant.
struct SceneSnapshot {
  double time = 0.0;  // s since scenario start
  GeoPosition origin;
  ShipState own;
  double own_cruise_speed = 0.0;  // m/s, configured transit speed
  std::optional<LocalPoint> goal;
  std::vector<TargetView> targets;  // rendered in ascending id order
  std::vector<ZoneState> zones;
  // consecutive risk-free decision cycles before this one; saturated by
  // default so snapshots without avoidance history resume immediately
  int clear_cycles = 1 << 20;
};

/// Canonical structured-text rendering of a snapshot. Pure and byte-exact:
/// equal snapshots produce identical text.
inline std::string depict(const SceneSnapshot& snap) {
  std::vector<std::string> lines;

  const GeoPosition own_geo = unproject(snap.origin, snap.own.pos);
  lines.push_back("[Own Ship] position: " + fmt_pos(own_geo) +
                  "; speed: " + fmt_kn(snap.own.speed) +
                  " kn; course: " + fmt_deg(snap.own.heading) + " deg.");

  if (snap.goal) {
    const GeoPosition goal_geo = unproject(snap.origin, *snap.goal);
    const double range = distance(snap.own.pos, *snap.goal);
    std::string line = "[Goal] position: " + fmt_pos(goal_geo) +
                       "; range: " + fmt_nm(range) + " nm";
    if (range > 0.0)
      line += "; bearing: " +
              fmt_deg(relative_bearing(snap.own.heading, snap.own.pos, *snap.goal)) +
              " deg";
    lines.push_back(line + ".");
  }

  std::vector<const TargetView*> targets;
  for (const auto& t : snap.targets) targets.push_back(&t);
  std::sort(targets.begin(), targets.end(),
            [](const TargetView* a, const TargetView* b) { return a->id < b->id; });
  for (const TargetView* t : targets) {
    const GeoPosition g = unproject(snap.origin, t->state.pos);
    lines.push_back(
        "[Target " + t->id + "] position: " + fmt_pos(g) +
        "; speed: " + fmt_kn(t->state.speed) +
        " kn; course: " + fmt_deg(t->state.heading) +
        " deg; range: " + fmt_nm(t->cpa.range) +
        " nm; bearing: " + fmt_deg(t->cpa.relative_bearing) +
        " deg; DCPA: " + fmt_nm(t->cpa.dcpa) +
        " nm; TCPA: " + fmt_min(t->cpa.tcpa) +
        " min; encounter: " + encounter_phrase(t->encounter) +
        "; risk: " + risk_word(t->risk) + ".");
  }

  for (const auto& z : snap.zones) {
    if (z.newly_appeared) {
      std::string label = z.label;
      if (!label.empty()) label[0] = static_cast<char>(std::toupper(label[0]));
      lines.push_back(label + " suddenly appears " + z.side_text + ".");
    } else {
      lines.push_back("[Zone " + z.id + "] " + z.label + " " + z.side_text +
                      "; status: active.");
    }
  }

  std::string out;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (i) out += '\n';
    out += lines[i];
  }
  return out;
}

// --- prompt assembly --------------------------------------------------------

/// Ordered prompt: system text, scene text, then tool feedback blocks.
struct PromptBundle {
  std::string system;
  std::string scene;
  std::vector<std::string> feedback;

  std::vector<std::string> blocks() const {
    std::vector<std::string> b{system, scene};
    b.insert(b.end(), feedback.begin(), feedback.end());
    return b;
  }

  std::string to_text() const {
    std::string out;
    for (const auto& b : blocks()) {
      if (!out.empty()) out += "\n\n";
      out += b;
    }
    return out;
  }
};

inline PromptBundle build_prompt(std::string system_template,
                                 const SceneSnapshot& snap,
                                 std::vector<std::string> feedback = {}) {
  if (system_template.empty())
    throw std::invalid_argument("build_prompt: empty system template");
  return {std::move(system_template), depict(snap), std::move(feedback)};
}

/// Shipped system prompt. Mirrors fixtures/prompts/system_prompt.txt; a test
/// guards the two copies against drift.
inline const char* default_system_prompt() {
  return
      "You are the collision-avoidance officer of the own ship. You receive a "
      "structured description of the navigation scene and must produce one "
      "safe maneuver decision that complies with the International "
      "Regulations for Preventing Collisions at Sea (COLREGs).\n"
      "\n"
      "You may reason step by step and call tools. Reply in exactly one of "
      "the two forms below.\n"
      "\n"
      "To call a tool:\n"
      "Thought: <your reasoning>\n"
      "Action: <tool_name>({\"target\": \"<id>\"})\n"
      "\n"
      "Available tools: get_sensor_data, compute_cpa, classify_encounter, "
      "assess_risk, propose_avoidance.\n"
      "\n"
      "To finish:\n"
      "Thought: <your reasoning>\n"
      "Final Answer: {\"maneuver\": \"<StarboardTurn|PortTurn|SlowDown|Stop|"
      "StandOn|ResumeCourse>\", \"course_order_deg\": <number, optional>, "
      "\"speed_order_kn\": <number, optional>, \"rationale\": \"<text>\"}\n"
      "\n"
      "Constraints: prefer starboard maneuvers where COLREGs allows a choice; "
      "keep clear of all no-go zones; never command a speed increase beyond "
      "the cruise speed; give way early and substantially; resume course to "
      "the goal only when the scene is risk-free.";
}

}  // namespace navsim
