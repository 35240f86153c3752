// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "navsim/agent.hpp"
#include "navsim/colregs.hpp"
#include "navsim/depiction.hpp"
#include "navsim/dynamics.hpp"
#include "navsim/kinematics.hpp"

namespace navsim {

// --- scenario configuration ---------------------------------------------------

struct ShipSpec {
  std::string id;
  bool is_own = false;
  GeoPosition start;
  std::optional<GeoPosition> goal;
  double speed = 0.0;   // m/s
  double course = 0.0;  // rad
  std::optional<ShipModelParams> model;  // overrides the scenario model
};

struct ZoneSpec {
  std::string id;
  std::string label = "a large area of fishing nets";
  std::string side_text = "on the starboard side";
  std::vector<LocalPoint> polygon;
};

struct Event {
  enum class Kind { PopUpShip, ZoneAppears, ZoneClears };
  double at = 0.0;
  Kind kind = Kind::PopUpShip;
  ShipSpec ship;        // PopUpShip
  ZoneSpec zone;        // ZoneAppears
  std::string zone_id;  // ZoneClears
};

inline const char* to_string(Event::Kind k) {
  switch (k) {
    case Event::Kind::PopUpShip: return "popup_ship";
    case Event::Kind::ZoneAppears: return "zone_appears";
    case Event::Kind::ZoneClears: return "zone_clears";
  }
  return "?";
}

struct ScenarioConfig {
  std::string name = "scenario";
  GeoPosition origin;
  double dt = 0.5;                  // s
  double decision_interval = 30.0;  // s
  double duration = 3600.0;         // s
  std::uint64_t seed = 0;
  bool decide_on_event = true;
  double goal_radius = nm2m(0.1);  // m
  RiskThresholds thresholds;
  RuleOptions rule;
  ValidatorOptions validator;
  int max_steps = 8;
  int parse_retries = 2;
  ShipModelParams model;
  std::vector<ShipSpec> ships;
  std::vector<Event> events;
};

namespace detail {
// segment intersection test used by the polygon-simplicity validation
inline double cross(const LocalPoint& o, const LocalPoint& a, const LocalPoint& b) {
  return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
}
inline bool segments_intersect(const LocalPoint& a, const LocalPoint& b,
                               const LocalPoint& c, const LocalPoint& d) {
  const double d1 = cross(c, d, a), d2 = cross(c, d, b);
  const double d3 = cross(a, b, c), d4 = cross(a, b, d);
  return ((d1 > 0) != (d2 > 0)) && ((d3 > 0) != (d4 > 0));
}
inline bool polygon_simple(const std::vector<LocalPoint>& poly) {
  const std::size_t n = poly.size();
  if (n < 3) return false;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (j == i || (j + 1) % n == i || (i + 1) % n == j) continue;  // adjacent
      if (segments_intersect(poly[i], poly[(i + 1) % n], poly[j], poly[(j + 1) % n]))
        return false;
    }
  }
  return true;
}
}  // namespace detail

/// Structural validation; throws std::invalid_argument with a description.
inline void validate(const ScenarioConfig& cfg) {
  if (!(cfg.dt > 0.0) || cfg.dt > 1.0)
    throw std::invalid_argument("config: dt must be in (0, 1] s");
  if (cfg.decision_interval < cfg.dt)
    throw std::invalid_argument("config: decision_interval must be >= dt");
  const double steps = cfg.duration / cfg.dt;
  if (std::abs(steps - std::round(steps)) > 1e-6)
    throw std::invalid_argument("config: duration must be a multiple of dt");
  int own_count = 0;
  std::set<std::string> ids;
  for (const auto& s : cfg.ships) {
    if (s.id.empty()) throw std::invalid_argument("config: empty ship id");
    if (!ids.insert(s.id).second)
      throw std::invalid_argument("config: duplicate ship id '" + s.id + "'");
    if (s.is_own) {
      ++own_count;
      if (!s.goal) throw std::invalid_argument("config: own ship needs a goal");
    }
  }
  if (own_count != 1)
    throw std::invalid_argument("config: exactly one own ship required, got " +
                                std::to_string(own_count));
  for (const auto& e : cfg.events) {
    if (e.at < 0.0 || e.at > cfg.duration)
      throw std::invalid_argument("config: event time outside [0, duration]");
    if (e.kind == Event::Kind::PopUpShip) {
      if (e.ship.id.empty() || ids.count(e.ship.id))
        throw std::invalid_argument("config: pop-up ship id missing or duplicate");
      ids.insert(e.ship.id);
      if (e.ship.is_own)
        throw std::invalid_argument("config: pop-up ship cannot be the own ship");
    }
    if (e.kind == Event::Kind::ZoneAppears &&
        !detail::polygon_simple(e.zone.polygon))
      throw std::invalid_argument("config: zone polygon must be simple with >= 3 points");
  }
}

// --- simulation log -------------------------------------------------------------

struct StepRecord {
  double t = 0.0;
  std::vector<std::pair<std::string, ShipState>> ships;  // in spawn order
};

struct DecisionRecord {
  double t = 0.0;
  std::string digest;  // FNV-1a of the scene text
  std::string top_target_id;
  EncounterType top_encounter = EncounterType::Clear;
  RiskLevel top_risk = RiskLevel::None;
  ReactTrace trace;
  DecisionCommand applied;
};

struct EventRecord {
  double t = 0.0;
  std::string kind;
  std::string id;
};

struct SimulationLog {
  ScenarioConfig config;
  std::vector<StepRecord> steps;
  std::vector<DecisionRecord> decisions;
  std::vector<EventRecord> events;
  double end_time = 0.0;
  std::string end_reason;  // "goal_reached" | "duration"
};

inline std::string fnv1a64_hex(const std::string& data) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : data) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

// --- engine ----------------------------------------------------------------------

/// Run one scenario to completion. Strictly sequential and deterministic for
/// a deterministic core; the own ship decides on the cadence (and optionally
/// on events), target ships hold their scripted course and speed.
inline SimulationLog run(const ScenarioConfig& cfg, DecisionCore& core) {
  validate(cfg);

  struct LiveShip {
    ShipSpec spec;
    ShipState state;
    HelmCommand helm;
    ShipModelParams model;
  };

  struct LiveZone {
    ZoneSpec spec;
    bool seen_in_snapshot = false;
  };

  SimulationLog log;
  log.config = cfg;

  std::vector<LiveShip> ships;
  std::size_t own_index = 0;
  const auto spawn = [&](const ShipSpec& spec) {
    LiveShip s;
    s.spec = spec;
    s.state.pos = project(cfg.origin, spec.start);
    s.state.heading = wrap_two_pi(spec.course);
    s.state.speed = spec.speed;
    s.helm.course_order = s.state.heading;
    s.helm.speed_order = s.state.speed;
    s.model = spec.model.value_or(cfg.model);
    if (spec.is_own) own_index = ships.size();
    ships.push_back(std::move(s));
  };
  for (const auto& spec : cfg.ships) spawn(spec);

  std::vector<LiveZone> zones;
  std::vector<bool> fired(cfg.events.size(), false);

  LocalPoint goal = project(cfg.origin, *ships[own_index].spec.goal);
  ReactOptions react_opts;
  react_opts.max_steps = cfg.max_steps;
  react_opts.parse_retries = cfg.parse_retries;
  const ToolRegistry registry = ToolRegistry::standard();

  // starts saturated: the hold applies after an avoidance, not at launch
  int clear_streak = cfg.rule.resume_hold_cycles;
  bool event_decision_due = false;

  const long long total_steps = std::llround(cfg.duration / cfg.dt);
  const long long steps_per_decision =
      std::max(1ll, std::llround(cfg.decision_interval / cfg.dt));

  for (long long i = 0; i <= total_steps; ++i) {
    const double t = static_cast<double>(i) * cfg.dt;

    for (std::size_t e = 0; e < cfg.events.size(); ++e) {
      if (fired[e] || cfg.events[e].at > t + 1e-9) continue;
      fired[e] = true;
      const Event& ev = cfg.events[e];
      EventRecord rec{t, to_string(ev.kind), ""};
      switch (ev.kind) {
        case Event::Kind::PopUpShip:
          spawn(ev.ship);
          rec.id = ev.ship.id;
          break;
        case Event::Kind::ZoneAppears:
          zones.push_back(LiveZone{ev.zone, false});
          rec.id = ev.zone.id;
          break;
        case Event::Kind::ZoneClears: {
          rec.id = ev.zone_id;
          std::erase_if(zones, [&](const LiveZone& z) {
            return z.spec.id == ev.zone_id;
          });
          break;
        }
      }
      log.events.push_back(std::move(rec));
      if (cfg.decide_on_event) event_decision_due = true;
    }

    auto& own = ships[own_index];

    if (distance(own.state.pos, goal) <= cfg.goal_radius) {
      StepRecord sr{t, {}};
      for (const auto& s : ships) sr.ships.emplace_back(s.spec.id, s.state);
      log.steps.push_back(std::move(sr));
      log.end_time = t;
      log.end_reason = "goal_reached";
      return log;
    }

    if (i % steps_per_decision == 0 || event_decision_due) {
      event_decision_due = false;

      SceneSnapshot snap;
      snap.time = t;
      snap.origin = cfg.origin;
      snap.own = own.state;
      snap.own_cruise_speed = own.spec.speed;
      snap.goal = goal;
      snap.clear_cycles = clear_streak;
      for (std::size_t k = 0; k < ships.size(); ++k) {
        if (k == own_index) continue;
        TargetView tv;
        tv.id = ships[k].spec.id;
        tv.state = ships[k].state;
        tv.cpa = cpa(own.state.pos, velocity_of(own.state), tv.state.pos,
                     velocity_of(tv.state));
        tv.encounter = classify(own.state, tv.state);
        tv.risk = assess_risk(tv.cpa, cfg.thresholds);
        snap.targets.push_back(std::move(tv));
      }
      std::sort(snap.targets.begin(), snap.targets.end(),
                [](const TargetView& a, const TargetView& b) { return a.id < b.id; });
      for (auto& z : zones) {
        ZoneState zs;
        zs.id = z.spec.id;
        zs.label = z.spec.label;
        zs.side_text = z.spec.side_text;
        zs.polygon = z.spec.polygon;
        zs.newly_appeared = !z.seen_in_snapshot;
        z.seen_in_snapshot = true;
        snap.zones.push_back(std::move(zs));
      }

      AgentContext ctx{snap, cfg.thresholds, own.model, cfg.rule, cfg.validator};
      ReactTrace trace = run_react(ctx, core, registry, react_opts);

      DecisionRecord dr;
      dr.t = t;
      dr.digest = fnv1a64_hex(depict(snap));
      const auto ranked = ctx.assessments();
      for (const auto& a : ranked) {
        if (a.priority && *a.priority == 1) {
          dr.top_target_id = a.target_id;
          dr.top_encounter = a.encounter;
          dr.top_risk = a.risk;
        }
      }
      dr.applied = trace.final;
      dr.trace = std::move(trace);

      own.helm = helm_for(dr.applied, own.state, own.spec.speed, snap);
      log.decisions.push_back(std::move(dr));

      bool all_clear = true;
      for (const auto& tv : snap.targets)
        if (tv.risk != RiskLevel::None) all_clear = false;
      clear_streak = all_clear ? std::min(clear_streak + 1, 1 << 20) : 0;
    }

    StepRecord sr{t, {}};
    for (const auto& s : ships) sr.ships.emplace_back(s.spec.id, s.state);
    log.steps.push_back(std::move(sr));

    if (i == total_steps) break;
    for (auto& s : ships) s.state = step(s.state, s.helm, s.model, cfg.dt);
  }

  log.end_time = cfg.duration;
  log.end_reason = "duration";
  return log;
}

// --- metrics ----------------------------------------------------------------------

struct Metrics {
  std::map<std::string, double> min_distance_m;  // "A-B", lexicographic pair key
  bool goal_reached = false;
  double goal_time_s = 0.0;
  int zone_incursions = 0;
  std::map<std::string, std::string> colregs_flags;
  int decision_count = 0;
  double mean_decision_ms = 0.0;
  double max_decision_ms = 0.0;
};

namespace detail {
inline std::string pair_key(const std::string& a, const std::string& b) {
  return a < b ? a + "-" + b : b + "-" + a;
}
}  // namespace detail

/// Derive metrics from a log. Uses the embedded config for zone windows and
/// the own-ship id; latency statistics come from the trace side channel.
inline Metrics compute_metrics(const SimulationLog& log) {
  Metrics m;
  const auto& cfg = log.config;

  std::string own_id;
  for (const auto& s : cfg.ships)
    if (s.is_own) own_id = s.id;

  for (const auto& sr : log.steps) {
    for (std::size_t i = 0; i < sr.ships.size(); ++i) {
      for (std::size_t j = i + 1; j < sr.ships.size(); ++j) {
        const double d = distance(sr.ships[i].second.pos, sr.ships[j].second.pos);
        const std::string key =
            detail::pair_key(sr.ships[i].first, sr.ships[j].first);
        auto it = m.min_distance_m.find(key);
        if (it == m.min_distance_m.end() || d < it->second)
          m.min_distance_m[key] = d;
      }
    }
  }

  m.goal_reached = log.end_reason == "goal_reached";
  m.goal_time_s = log.end_time;

  // zone activity windows from the config events
  struct Window {
    std::vector<LocalPoint> polygon;
    double from = 0.0;
    double to = std::numeric_limits<double>::infinity();
  };
  std::map<std::string, Window> zones;
  for (const auto& e : cfg.events) {
    if (e.kind == Event::Kind::ZoneAppears)
      zones[e.zone.id] = Window{e.zone.polygon, e.at, std::numeric_limits<double>::infinity()};
    else if (e.kind == Event::Kind::ZoneClears && zones.count(e.zone_id))
      zones[e.zone_id].to = e.at;
  }
  bool was_inside = false;
  for (const auto& sr : log.steps) {
    const ShipState* own = nullptr;
    for (const auto& [id, st] : sr.ships)
      if (id == own_id) own = &st;
    if (!own) continue;
    bool inside = false;
    for (const auto& [id, w] : zones)
      if (sr.t >= w.from && sr.t < w.to && point_in_polygon(own->pos, w.polygon))
        inside = true;
    if (inside && !was_inside) ++m.zone_incursions;
    was_inside = inside;
  }

  // COLREGs compliance: judge the first maneuver-level decision per class
  const auto note = [&](const std::string& key, bool ok) {
    if (!m.colregs_flags.count(key))
      m.colregs_flags[key] = ok ? "compliant" : "violated";
  };
  for (const auto& d : log.decisions) {
    if (d.top_risk == RiskLevel::None || d.top_risk == RiskLevel::Watch) continue;
    const Maneuver mv = d.applied.maneuver;
    switch (d.top_encounter) {
      case EncounterType::HeadOn:
        note("head_on_give_way_starboard",
             mv == Maneuver::StarboardTurn || mv == Maneuver::SlowDown ||
                 mv == Maneuver::Stop);
        break;
      case EncounterType::StarboardCrossingSmall:
      case EncounterType::StarboardCrossingLarge:
        note("crossing_give_way_starboard",
             mv == Maneuver::StarboardTurn || mv == Maneuver::SlowDown ||
                 mv == Maneuver::Stop);
        break;
      case EncounterType::PortCrossing:
        if (d.top_risk == RiskLevel::GiveWay)
          note("port_crossing_stand_on", mv == Maneuver::StandOn);
        else
          note("port_crossing_in_extremis", mv != Maneuver::StandOn);
        break;
      case EncounterType::BeingOvertaken:
        if (d.top_risk == RiskLevel::GiveWay)
          note("overtaken_stand_on", mv == Maneuver::StandOn);
        else
          note("overtaken_evasion",
               mv == Maneuver::PortTurn || mv == Maneuver::StarboardTurn ||
                   mv == Maneuver::SlowDown || mv == Maneuver::Stop);
        break;
      case EncounterType::Overtaking:
        note("overtaking_keep_clear", mv != Maneuver::StandOn);
        break;
      case EncounterType::Clear:
        break;
    }
  }

  m.decision_count = static_cast<int>(log.decisions.size());
  double total = 0.0;
  for (const auto& d : log.decisions) {
    double ms = d.trace.pipeline_ms;
    for (double c : d.trace.core_latency_ms) ms += c;
    total += ms;
    m.max_decision_ms = std::max(m.max_decision_ms, ms);
  }
  if (!log.decisions.empty()) m.mean_decision_ms = total / log.decisions.size();

  return m;
}

inline json metrics_to_json(const Metrics& m) {
  json j;
  j["schema"] = "navsim-metrics";
  j["version"] = 1;
  json dist = json::object();
  for (const auto& [k, v] : m.min_distance_m) dist[k] = v;
  j["min_distance_m"] = std::move(dist);
  j["goal_reached"] = m.goal_reached;
  j["goal_time_s"] = m.goal_time_s;
  j["zone_incursions"] = m.zone_incursions;
  json flags = json::object();
  for (const auto& [k, v] : m.colregs_flags) flags[k] = v;
  j["colregs_flags"] = std::move(flags);
  j["decision_count"] = m.decision_count;
  j["latency"] = {{"mean_ms", m.mean_decision_ms}, {"max_ms", m.max_decision_ms}};
  return j;
}

}  // namespace navsim
