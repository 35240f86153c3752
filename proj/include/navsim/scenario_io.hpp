// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "navsim/simulator.hpp"

namespace navsim {

/// Schema or I/O failure while reading a scenario or log file.
class LoadError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Failure while writing an output file.
class WriteError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {
// File values live in degrees / knots / nautical miles; internal values in
// radians / m/s / meters. Quantizing the exported value to 1e-9 makes
// save -> load -> save byte-stable.
inline double quant9(double v) { return std::round(v * 1e9) / 1e9; }
}  // namespace detail

// --- scenario config ------------------------------------------------------------

inline json config_to_json(const ScenarioConfig& cfg) {
  json j;
  j["schema"] = "navsim-scenario";
  j["version"] = 1;
  j["name"] = cfg.name;
  j["origin"] = {{"lon", cfg.origin.lon}, {"lat", cfg.origin.lat}};
  j["dt"] = cfg.dt;
  j["decision_interval"] = cfg.decision_interval;
  j["duration"] = cfg.duration;
  j["seed"] = cfg.seed;
  j["decide_on_event"] = cfg.decide_on_event;
  j["goal_radius_nm"] = detail::quant9(m2nm(cfg.goal_radius));
  j["thresholds"] = {{"d_safe_nm", detail::quant9(m2nm(cfg.thresholds.d_safe))},
                     {"t_horizon_s", cfg.thresholds.t_horizon},
                     {"r_alert_nm", detail::quant9(m2nm(cfg.thresholds.r_alert))},
                     {"r_critical_nm", detail::quant9(m2nm(cfg.thresholds.r_critical))}};
  j["rule"] = {{"turn_increment_deg", detail::quant9(rad2deg(cfg.rule.turn_increment))},
               {"resume_hold_cycles", cfg.rule.resume_hold_cycles}};
  j["validator"] = {
      {"lookahead_s", cfg.validator.lookahead},
      {"dt_s", cfg.validator.dt},
      {"min_sep_factor", cfg.validator.min_sep_factor},
      {"deepen_step_deg", detail::quant9(rad2deg(cfg.validator.deepen_step))},
      {"max_total_turn_deg", detail::quant9(rad2deg(cfg.validator.max_total_turn))},
      {"opposite_turn_deg", detail::quant9(rad2deg(cfg.validator.opposite_turn))}};
  j["agent"] = {{"max_steps", cfg.max_steps}, {"parse_retries", cfg.parse_retries}};

  const auto model_json = [](const ShipModelParams& p) {
    json m;
    m["length_m"] = p.length;
    m["draft_m"] = p.draft;
    m["nominal_speed_kn"] = detail::quant9(mps2knots(p.nominal_speed));
    m["shaft_speed_rpm"] = p.shaft_speed_rpm;
    m["max_rudder_deg"] = detail::quant9(rad2deg(p.max_rudder_angle));
    m["max_rudder_rate_deg_s"] = detail::quant9(rad2deg(p.max_rudder_rate));
    m["nomoto_gain"] = p.nomoto_gain;
    m["nomoto_time_s"] = p.nomoto_time_constant;
    m["speed_time_s"] = p.speed_time_constant;
    m["course_kp"] = p.course_kp;
    m["course_kd_s"] = p.course_kd;
    return m;
  };
  j["ship_model"] = model_json(cfg.model);

  const auto ship_json = [&](const ShipSpec& s) {
    json sj;
    sj["id"] = s.id;
    sj["role"] = s.is_own ? "own" : "target";
    sj["start"] = {{"lon", s.start.lon}, {"lat", s.start.lat}};
    if (s.goal) sj["goal"] = {{"lon", s.goal->lon}, {"lat", s.goal->lat}};
    sj["speed_kn"] = detail::quant9(mps2knots(s.speed));
    sj["course_deg"] = detail::quant9(rad2deg(s.course));
    if (s.model) sj["model"] = model_json(*s.model);
    return sj;
  };
  j["ships"] = json::array();
  for (const auto& s : cfg.ships) j["ships"].push_back(ship_json(s));

  j["events"] = json::array();
  for (const auto& e : cfg.events) {
    json ej;
    ej["at"] = e.at;
    ej["kind"] = to_string(e.kind);
    if (e.kind == Event::Kind::PopUpShip) ej["ship"] = ship_json(e.ship);
    if (e.kind == Event::Kind::ZoneAppears) {
      json poly = json::array();
      for (const auto& p : e.zone.polygon) poly.push_back({{"x", p.x}, {"y", p.y}});
      ej["zone"] = {{"id", e.zone.id},
                    {"label", e.zone.label},
                    {"side", e.zone.side_text},
                    {"polygon", std::move(poly)}};
    }
    if (e.kind == Event::Kind::ZoneClears) ej["zone_id"] = e.zone_id;
    j["events"].push_back(std::move(ej));
  }
  return j;
}

inline ScenarioConfig config_from_json(const json& j) {
  try {
    ScenarioConfig cfg;
    if (j.value("schema", "") != "navsim-scenario")
      throw std::invalid_argument("schema must be 'navsim-scenario'");
    cfg.name = j.value("name", std::string("scenario"));
    cfg.origin = normalized(
        {j.at("origin").at("lon").get<double>(), j.at("origin").at("lat").get<double>()});
    cfg.dt = j.value("dt", cfg.dt);
    cfg.decision_interval = j.value("decision_interval", cfg.decision_interval);
    cfg.duration = j.value("duration", cfg.duration);
    cfg.seed = j.value("seed", cfg.seed);
    cfg.decide_on_event = j.value("decide_on_event", cfg.decide_on_event);
    if (j.contains("goal_radius_nm")) cfg.goal_radius = nm2m(j.at("goal_radius_nm").get<double>());
    if (j.contains("thresholds")) {
      const auto& t = j.at("thresholds");
      if (t.contains("d_safe_nm")) cfg.thresholds.d_safe = nm2m(t.at("d_safe_nm").get<double>());
      if (t.contains("t_horizon_s")) cfg.thresholds.t_horizon = t.at("t_horizon_s").get<double>();
      if (t.contains("r_alert_nm")) cfg.thresholds.r_alert = nm2m(t.at("r_alert_nm").get<double>());
      if (t.contains("r_critical_nm"))
        cfg.thresholds.r_critical = nm2m(t.at("r_critical_nm").get<double>());
    }
    if (j.contains("rule")) {
      const auto& r = j.at("rule");
      if (r.contains("turn_increment_deg"))
        cfg.rule.turn_increment = deg2rad(r.at("turn_increment_deg").get<double>());
      if (r.contains("resume_hold_cycles"))
        cfg.rule.resume_hold_cycles = r.at("resume_hold_cycles").get<int>();
    }
    if (j.contains("validator")) {
      const auto& v = j.at("validator");
      if (v.contains("lookahead_s")) cfg.validator.lookahead = v.at("lookahead_s").get<double>();
      if (v.contains("dt_s")) cfg.validator.dt = v.at("dt_s").get<double>();
      if (v.contains("min_sep_factor"))
        cfg.validator.min_sep_factor = v.at("min_sep_factor").get<double>();
      if (v.contains("deepen_step_deg"))
        cfg.validator.deepen_step = deg2rad(v.at("deepen_step_deg").get<double>());
      if (v.contains("max_total_turn_deg"))
        cfg.validator.max_total_turn = deg2rad(v.at("max_total_turn_deg").get<double>());
      if (v.contains("opposite_turn_deg"))
        cfg.validator.opposite_turn = deg2rad(v.at("opposite_turn_deg").get<double>());
    }
    if (j.contains("agent")) {
      cfg.max_steps = j.at("agent").value("max_steps", cfg.max_steps);
      cfg.parse_retries = j.at("agent").value("parse_retries", cfg.parse_retries);
    }

    const auto model_from = [](const json& m, ShipModelParams base) {
      if (m.contains("length_m")) base.length = m.at("length_m").get<double>();
      if (m.contains("draft_m")) base.draft = m.at("draft_m").get<double>();
      if (m.contains("nominal_speed_kn"))
        base.nominal_speed = knots2mps(m.at("nominal_speed_kn").get<double>());
      if (m.contains("shaft_speed_rpm"))
        base.shaft_speed_rpm = m.at("shaft_speed_rpm").get<double>();
      if (m.contains("max_rudder_deg"))
        base.max_rudder_angle = deg2rad(m.at("max_rudder_deg").get<double>());
      if (m.contains("max_rudder_rate_deg_s"))
        base.max_rudder_rate = deg2rad(m.at("max_rudder_rate_deg_s").get<double>());
      if (m.contains("nomoto_gain")) base.nomoto_gain = m.at("nomoto_gain").get<double>();
      if (m.contains("nomoto_time_s"))
        base.nomoto_time_constant = m.at("nomoto_time_s").get<double>();
      if (m.contains("speed_time_s"))
        base.speed_time_constant = m.at("speed_time_s").get<double>();
      if (m.contains("course_kp")) base.course_kp = m.at("course_kp").get<double>();
      if (m.contains("course_kd_s")) base.course_kd = m.at("course_kd_s").get<double>();
      return base;
    };
    if (j.contains("ship_model")) cfg.model = model_from(j.at("ship_model"), cfg.model);

    const auto ship_from = [&](const json& sj) {
      ShipSpec s;
      s.id = sj.at("id").get<std::string>();
      const std::string role = sj.at("role").get<std::string>();
      if (role != "own" && role != "target")
        throw std::invalid_argument("ship role must be 'own' or 'target'");
      s.is_own = role == "own";
      s.start = normalized(
          {sj.at("start").at("lon").get<double>(), sj.at("start").at("lat").get<double>()});
      if (sj.contains("goal"))
        s.goal = normalized(
            {sj.at("goal").at("lon").get<double>(), sj.at("goal").at("lat").get<double>()});
      s.speed = knots2mps(sj.at("speed_kn").get<double>());
      if (s.speed < 0.0) throw std::invalid_argument("ship speed must be >= 0");
      s.course = wrap_two_pi(deg2rad(sj.at("course_deg").get<double>()));
      if (sj.contains("model")) s.model = model_from(sj.at("model"), cfg.model);
      return s;
    };
    for (const auto& sj : j.at("ships")) cfg.ships.push_back(ship_from(sj));

    if (j.contains("events")) {
      for (const auto& ej : j.at("events")) {
        Event e;
        e.at = ej.at("at").get<double>();
        const std::string kind = ej.at("kind").get<std::string>();
        if (kind == "popup_ship") {
          e.kind = Event::Kind::PopUpShip;
          e.ship = ship_from(ej.at("ship"));
        } else if (kind == "zone_appears") {
          e.kind = Event::Kind::ZoneAppears;
          const auto& z = ej.at("zone");
          e.zone.id = z.at("id").get<std::string>();
          e.zone.label = z.value("label", e.zone.label);
          e.zone.side_text = z.value("side", e.zone.side_text);
          for (const auto& p : z.at("polygon"))
            e.zone.polygon.push_back({p.at("x").get<double>(), p.at("y").get<double>()});
        } else if (kind == "zone_clears") {
          e.kind = Event::Kind::ZoneClears;
          e.zone_id = ej.at("zone_id").get<std::string>();
        } else {
          throw std::invalid_argument("unknown event kind '" + kind + "'");
        }
        cfg.events.push_back(std::move(e));
      }
    }

    validate(cfg);
    return cfg;
  } catch (const json::exception& e) {
    throw LoadError("scenario config: " + std::string(e.what()));
  } catch (const std::invalid_argument& e) {
    throw LoadError("scenario config: " + std::string(e.what()));
  } catch (const std::range_error& e) {
    throw LoadError("scenario config: " + std::string(e.what()));
  }
}

inline ScenarioConfig load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw LoadError("cannot open scenario file: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw LoadError("scenario config " + path + ": " + e.what());
  }
  return config_from_json(j);
}

// --- simulation log (JSONL + latency side channel) ------------------------------

namespace detail {

inline json ship_state_array(const std::string& id, const ShipState& s) {
  return json::array(
      {id, s.pos.x, s.pos.y, s.heading, s.yaw_rate, s.speed, s.rudder});
}

inline std::pair<std::string, ShipState> ship_state_from_array(const json& a) {
  if (!a.is_array() || a.size() != 7)
    throw std::invalid_argument("ship state must be a 7-element array");
  ShipState s;
  s.pos = {a.at(1).get<double>(), a.at(2).get<double>()};
  s.heading = a.at(3).get<double>();
  s.yaw_rate = a.at(4).get<double>();
  s.speed = a.at(5).get<double>();
  s.rudder = a.at(6).get<double>();
  return {a.at(0).get<std::string>(), s};
}

}  // namespace detail

/// Serialize a log as line-delimited records: one meta line, then events,
/// decisions and steps merged in chronological order, then an end line.
/// Core latencies are not part of this stream (see save_latency).
inline std::string log_to_jsonl(const SimulationLog& log) {
  std::ostringstream out;
  json meta;
  meta["schema"] = "navsim-log";
  meta["version"] = 1;
  meta["config"] = config_to_json(log.config);
  out << meta.dump() << '\n';

  std::size_t ei = 0, di = 0, si = 0;
  const auto next_time = [&](std::size_t idx, auto& vec) {
    return idx < vec.size() ? vec[idx].t : std::numeric_limits<double>::infinity();
  };
  while (ei < log.events.size() || di < log.decisions.size() || si < log.steps.size()) {
    const double te = next_time(ei, log.events);
    const double td = next_time(di, log.decisions);
    const double ts = next_time(si, log.steps);
    if (te <= td && te <= ts) {
      const auto& e = log.events[ei++];
      json j{{"type", "event"}, {"t", e.t}, {"kind", e.kind}, {"id", e.id}};
      out << j.dump() << '\n';
    } else if (td <= ts) {
      const auto& d = log.decisions[di++];
      json j;
      j["type"] = "decision";
      j["t"] = d.t;
      j["digest"] = d.digest;
      j["top"] = {{"target", d.top_target_id},
                  {"encounter", to_string(d.top_encounter)},
                  {"risk", to_string(d.top_risk)}};
      j["trace"] = trace_to_json(d.trace, /*include_latency=*/false);
      j["command"] = decision_to_json(d.applied);
      out << j.dump() << '\n';
    } else {
      const auto& s = log.steps[si++];
      json ships = json::array();
      for (const auto& [id, st] : s.ships)
        ships.push_back(detail::ship_state_array(id, st));
      json j{{"type", "step"}, {"t", s.t}, {"ships", std::move(ships)}};
      out << j.dump() << '\n';
    }
  }

  json end{{"type", "end"}, {"t", log.end_time}, {"reason", log.end_reason}};
  out << end.dump() << '\n';
  return out.str();
}

/// Latency side channel, one line per decision, aligned by order.
inline std::string latency_to_jsonl(const SimulationLog& log) {
  std::ostringstream out;
  for (const auto& d : log.decisions) {
    json j{{"t", d.t},
           {"core_ms", d.trace.core_latency_ms},
           {"pipeline_ms", d.trace.pipeline_ms}};
    out << j.dump() << '\n';
  }
  return out.str();
}

inline void write_file(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  const fs::path p(path);
  if (p.has_parent_path()) {
    std::error_code ec;
    fs::create_directories(p.parent_path(), ec);
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw WriteError("cannot open for writing: " + path);
  out << content;
  if (!out) throw WriteError("write failed: " + path);
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw LoadError("cannot open: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void save_log(const SimulationLog& log, const std::string& log_path,
                     const std::string& latency_path = "") {
  write_file(log_path, log_to_jsonl(log));
  if (!latency_path.empty()) write_file(latency_path, latency_to_jsonl(log));
}

/// Parse a JSONL log. Throws LoadError naming the offending line on any
/// schema violation. A missing latency file leaves latencies zeroed.
inline SimulationLog load_log(const std::string& log_path,
                              const std::string& latency_path = "") {
  std::ifstream in(log_path);
  if (!in) throw LoadError("cannot open log: " + log_path);

  SimulationLog log;
  std::string line;
  std::size_t line_no = 0;
  bool have_meta = false, have_end = false;

  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::exception& e) {
      throw LoadError("log line " + std::to_string(line_no) + ": " + e.what());
    }
    try {
      if (!have_meta) {
        if (j.value("schema", "") != "navsim-log" || j.value("version", 0) != 1)
          throw std::invalid_argument("first record must be the navsim-log meta");
        log.config = config_from_json(j.at("config"));
        have_meta = true;
        continue;
      }
      const std::string type = j.at("type").get<std::string>();
      if (type == "step") {
        StepRecord s;
        s.t = j.at("t").get<double>();
        for (const auto& a : j.at("ships"))
          s.ships.push_back(detail::ship_state_from_array(a));
        log.steps.push_back(std::move(s));
      } else if (type == "decision") {
        DecisionRecord d;
        d.t = j.at("t").get<double>();
        d.digest = j.at("digest").get<std::string>();
        const auto& top = j.at("top");
        d.top_target_id = top.at("target").get<std::string>();
        const std::string enc = top.at("encounter").get<std::string>();
        bool found = false;
        for (EncounterType e :
             {EncounterType::HeadOn, EncounterType::StarboardCrossingSmall,
              EncounterType::StarboardCrossingLarge, EncounterType::PortCrossing,
              EncounterType::BeingOvertaken, EncounterType::Overtaking,
              EncounterType::Clear}) {
          if (enc == to_string(e)) {
            d.top_encounter = e;
            found = true;
          }
        }
        if (!found) throw std::invalid_argument("unknown encounter '" + enc + "'");
        const std::string risk = top.at("risk").get<std::string>();
        found = false;
        for (RiskLevel r : {RiskLevel::None, RiskLevel::Watch, RiskLevel::GiveWay,
                            RiskLevel::Critical}) {
          if (risk == to_string(r)) {
            d.top_risk = r;
            found = true;
          }
        }
        if (!found) throw std::invalid_argument("unknown risk '" + risk + "'");
        d.trace = trace_from_json(j.at("trace"));
        d.applied = decision_from_json(j.at("command"));
        log.decisions.push_back(std::move(d));
      } else if (type == "event") {
        log.events.push_back(
            EventRecord{j.at("t").get<double>(), j.at("kind").get<std::string>(),
                        j.at("id").get<std::string>()});
      } else if (type == "end") {
        log.end_time = j.at("t").get<double>();
        log.end_reason = j.at("reason").get<std::string>();
        have_end = true;
      } else {
        throw std::invalid_argument("unknown record type '" + type + "'");
      }
    } catch (const json::exception& e) {
      throw LoadError("log line " + std::to_string(line_no) + ": " + e.what());
    } catch (const std::invalid_argument& e) {
      throw LoadError("log line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  if (!have_meta) throw LoadError("log " + log_path + ": missing meta record");
  if (!have_end)
    throw LoadError("log " + log_path + ": truncated (missing end record)");

  if (!latency_path.empty() && std::filesystem::exists(latency_path)) {
    std::ifstream lin(latency_path);
    std::size_t idx = 0;
    std::size_t lline = 0;
    while (std::getline(lin, line)) {
      ++lline;
      if (line.empty()) continue;
      if (idx >= log.decisions.size())
        throw LoadError("latency line " + std::to_string(lline) +
                        ": more latency records than decisions");
      try {
        json j = json::parse(line);
        log.decisions[idx].trace.core_latency_ms =
            j.at("core_ms").get<std::vector<double>>();
        log.decisions[idx].trace.pipeline_ms = j.at("pipeline_ms").get<double>();
      } catch (const json::exception& e) {
        throw LoadError("latency line " + std::to_string(lline) + ": " + e.what());
      }
      ++idx;
    }
  }
  return log;
}

// --- flat tables for plotting ----------------------------------------------------

inline std::string track_csv(const SimulationLog& log) {
  std::ostringstream out;
  out << "t,ship,x_m,y_m,heading_deg,speed_kn,rudder_deg\n";
  char buf[160];
  for (const auto& sr : log.steps) {
    for (const auto& [id, s] : sr.ships) {
      std::snprintf(buf, sizeof(buf), "%.3f,%s,%.3f,%.3f,%.3f,%.3f,%.3f\n", sr.t,
                    id.c_str(), s.pos.x, s.pos.y, rad2deg(s.heading),
                    mps2knots(s.speed), rad2deg(s.rudder));
      out << buf;
    }
  }
  return out.str();
}

inline std::string distances_csv(const SimulationLog& log) {
  std::vector<std::string> pairs;
  for (const auto& sr : log.steps) {
    for (std::size_t i = 0; i < sr.ships.size(); ++i)
      for (std::size_t j = i + 1; j < sr.ships.size(); ++j) {
        const std::string key = detail::pair_key(sr.ships[i].first, sr.ships[j].first);
        if (std::find(pairs.begin(), pairs.end(), key) == pairs.end())
          pairs.push_back(key);
      }
  }
  std::sort(pairs.begin(), pairs.end());

  std::ostringstream out;
  out << "t";
  for (const auto& p : pairs) out << ',' << p;
  out << '\n';
  char buf[64];
  for (const auto& sr : log.steps) {
    std::snprintf(buf, sizeof(buf), "%.3f", sr.t);
    out << buf;
    for (const auto& p : pairs) {
      double d = -1.0;
      for (std::size_t i = 0; i < sr.ships.size(); ++i)
        for (std::size_t j = i + 1; j < sr.ships.size(); ++j)
          if (detail::pair_key(sr.ships[i].first, sr.ships[j].first) == p)
            d = distance(sr.ships[i].second.pos, sr.ships[j].second.pos);
      if (d < 0.0)
        out << ',';
      else {
        std::snprintf(buf, sizeof(buf), ",%.3f", d);
        out << buf;
      }
    }
    out << '\n';
  }
  return out.str();
}

}  // namespace navsim
