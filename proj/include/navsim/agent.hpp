// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cmath>
#include <cstring>
#include <functional>
#include <limits>
#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "json.hpp"
#include "navsim/colregs.hpp"
#include "navsim/depiction.hpp"
#include "navsim/dynamics.hpp"
#include "navsim/kinematics.hpp"

namespace navsim {

using json = nlohmann::json;

// --- decision (de)serialization ---------------------------------------------
// Wire form uses degrees/knots; values are quantized to 1e-6 so that
// serialize -> parse -> serialize is byte-stable.

namespace detail {
inline double quant6(double v) { return std::round(v * 1e6) / 1e6; }
}  // namespace detail

inline json decision_to_json(const DecisionCommand& cmd) {
  json j;
  j["maneuver"] = to_string(cmd.maneuver);
  if (cmd.course_order)
    j["course_order_deg"] = detail::quant6(rad2deg(wrap_two_pi(*cmd.course_order)));
  if (cmd.speed_order) j["speed_order_kn"] = detail::quant6(mps2knots(*cmd.speed_order));
  j["rationale"] = cmd.rationale;
  return j;
}

inline DecisionCommand decision_from_json(const json& j) {
  DecisionCommand cmd;
  const auto m = maneuver_from_string(j.at("maneuver").get<std::string>());
  if (!m) throw std::invalid_argument("unknown maneuver tag");
  cmd.maneuver = *m;
  if (j.contains("course_order_deg"))
    cmd.course_order = deg2rad(j.at("course_order_deg").get<double>());
  if (j.contains("speed_order_kn"))
    cmd.speed_order = knots2mps(j.at("speed_order_kn").get<double>());
  cmd.rationale = j.at("rationale").get<std::string>();
  return cmd;
}

/// Canonical `Final Answer:` line for a decision.
inline std::string final_answer_line(const DecisionCommand& cmd) {
  return "Final Answer: " + decision_to_json(cmd).dump();
}

// --- response grammar --------------------------------------------------------
// Optional `Thought: <text>` (may span lines), then exactly one of
//   Action: <tool_name>(<json-object>)
//   Final Answer: <json-object>
// See docs/react_grammar.md.

struct AgentAction {
  std::string thought;
  std::string tool;
  json args;
};

struct FinalDecision {
  std::string thought;
  DecisionCommand decision;
};

struct ParseError {
  std::string message;
  std::size_t position = 0;  // byte offset into the response
};

using ParsedResponse = std::variant<AgentAction, FinalDecision, ParseError>;

inline const std::vector<std::string>& standard_tool_names() {
  static const std::vector<std::string> names = {
      "get_sensor_data", "compute_cpa", "classify_encounter", "assess_risk",
      "propose_avoidance"};
  return names;
}

namespace detail {

inline bool only_whitespace_after(const std::string& s, std::size_t pos) {
  for (; pos < s.size(); ++pos)
    if (!std::isspace(static_cast<unsigned char>(s[pos]))) return false;
  return true;
}

inline std::string trim(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

}  // namespace detail

/// Parse one core response under the action grammar. Never throws: malformed
/// input yields a ParseError carrying the offending byte position.
inline ParsedResponse parse_action(
    const std::string& response,
    const std::vector<std::string>& known_tools = standard_tool_names()) {
  static constexpr const char* kAction = "Action:";
  static constexpr const char* kFinal = "Final Answer:";
  static constexpr const char* kThought = "Thought:";

  if (detail::only_whitespace_after(response, 0))
    return ParseError{"empty response", 0};

  const std::size_t action_pos = response.find(kAction);
  const std::size_t final_pos = response.find(kFinal);
  if (action_pos == std::string::npos && final_pos == std::string::npos)
    return ParseError{"expected an 'Action:' or 'Final Answer:' line", 0};

  std::size_t marker = std::min(action_pos, final_pos);
  const bool is_final = final_pos < action_pos;

  std::string thought;
  const std::size_t thought_pos = response.find(kThought);
  if (thought_pos != std::string::npos && thought_pos < marker) {
    thought = detail::trim(response.substr(thought_pos + std::strlen(kThought),
                                           marker - thought_pos - std::strlen(kThought)));
  } else if (!detail::only_whitespace_after(response.substr(0, marker), 0)) {
    // bare leading text counts as the thought
    thought = detail::trim(response.substr(0, marker));
  }

  if (is_final) {
    std::size_t body = final_pos + std::strlen(kFinal);
    json payload;
    try {
      payload = json::parse(response.substr(body));
    } catch (const json::parse_error& e) {
      return ParseError{"malformed final-answer object: " + std::string(e.what()),
                        body + e.byte};
    }
    if (!payload.is_object())
      return ParseError{"final answer must be a JSON object", body};
    try {
      return FinalDecision{std::move(thought), decision_from_json(payload)};
    } catch (const std::exception& e) {
      return ParseError{"invalid decision object: " + std::string(e.what()), body};
    }
  }

  std::size_t p = action_pos + std::strlen(kAction);
  while (p < response.size() && (response[p] == ' ' || response[p] == '\t')) ++p;
  std::size_t name_end = p;
  while (name_end < response.size() &&
         (std::isalnum(static_cast<unsigned char>(response[name_end])) ||
          response[name_end] == '_'))
    ++name_end;
  const std::string tool = response.substr(p, name_end - p);
  if (tool.empty()) return ParseError{"missing tool name after 'Action:'", p};
  if (std::find(known_tools.begin(), known_tools.end(), tool) == known_tools.end())
    return ParseError{"unknown tool: " + tool, p};
  if (name_end >= response.size() || response[name_end] != '(')
    return ParseError{"expected '(' after tool name", name_end};

  const std::size_t close = response.rfind(')');
  if (close == std::string::npos || close <= name_end)
    return ParseError{"unterminated tool argument list", name_end};
  if (!detail::only_whitespace_after(response, close + 1))
    return ParseError{"trailing content after action", close + 1};

  json args;
  const std::string arg_text = response.substr(name_end + 1, close - name_end - 1);
  try {
    args = arg_text.empty() || detail::only_whitespace_after(arg_text, 0)
               ? json::object()
               : json::parse(arg_text);
  } catch (const json::parse_error& e) {
    return ParseError{"malformed tool arguments: " + std::string(e.what()),
                      name_end + 1 + e.byte};
  }
  if (!args.is_object())
    return ParseError{"tool arguments must be a JSON object", name_end + 1};
  return AgentAction{std::move(thought), tool, std::move(args)};
}

// --- agent context & tools ----------------------------------------------------

struct ValidatorOptions {
  double lookahead = 600.0;      // s
  double dt = 0.5;               // s
  double min_sep_factor = 0.5;   // fraction of d_safe
  double deepen_step = deg2rad(15.0);
  double max_total_turn = deg2rad(60.0);
  double opposite_turn = deg2rad(30.0);
};

/// Everything a decision cycle needs: the observation plus the configured
/// thresholds, ship model and rule/validator options.
struct AgentContext {
  SceneSnapshot snapshot;
  RiskThresholds thresholds;
  ShipModelParams params;
  RuleOptions rule;
  ValidatorOptions validator;

  std::vector<std::pair<std::string, ShipState>> target_states() const {
    std::vector<std::pair<std::string, ShipState>> out;
    for (const auto& t : snapshot.targets) out.emplace_back(t.id, t.state);
    return out;
  }

  std::vector<EncounterAssessment> assessments() const {
    std::vector<EncounterAssessment> out;
    for (const auto& t : snapshot.targets) {
      EncounterAssessment a;
      a.target_id = t.id;
      a.cpa = t.cpa;
      a.encounter = t.encounter;
      a.risk = t.risk;
      out.push_back(std::move(a));
    }
    return prioritize(std::move(out));
  }
};

DecisionCommand validate_decision(const DecisionCommand& candidate,
                                  const AgentContext& ctx);

/// The un-validated deterministic rule suggestion for a context.
inline DecisionCommand rule_suggestion(const AgentContext& ctx) {
  const auto& snap = ctx.snapshot;
  const LocalPoint goal = snap.goal.value_or(snap.own.pos);
  return rule_decision(snap.own, goal, snap.own_cruise_speed, ctx.assessments(),
                       ctx.target_states(), ctx.rule, snap.clear_cycles);
}

/// Named tools mapping argument objects to deterministic text blocks.
class ToolRegistry {
 public:
  using ToolFn = std::function<std::string(const json&, const AgentContext&)>;

  void add(const std::string& name, ToolFn fn) {
    if (tools_.count(name)) throw std::invalid_argument("duplicate tool: " + name);
    tools_[name] = std::move(fn);
    names_.push_back(name);
  }

  bool contains(const std::string& name) const { return tools_.count(name) > 0; }
  const std::vector<std::string>& names() const { return names_; }
  std::size_t size() const { return tools_.size(); }

  /// Invoke a tool; tool failures become observation text, never exceptions.
  std::string invoke(const std::string& name, const json& args,
                     const AgentContext& ctx) const {
    auto it = tools_.find(name);
    if (it == tools_.end()) return "tool error: unknown tool '" + name + "'";
    try {
      return it->second(args, ctx);
    } catch (const std::exception& e) {
      return "tool error: " + std::string(e.what());
    }
  }

  /// The five standard tools: sensor retrieval, CPA computation, encounter
  /// classification, risk assessment and avoidance proposal.
  static ToolRegistry standard();

 private:
  std::map<std::string, ToolFn> tools_;
  std::vector<std::string> names_;
};

namespace detail {

inline const TargetView* find_target(const SceneSnapshot& snap, const json& args) {
  if (!args.contains("target")) return nullptr;
  const std::string id = args.at("target").get<std::string>();
  for (const auto& t : snap.targets)
    if (t.id == id) return &t;
  return nullptr;
}

inline std::string sensor_line(const std::string& name, const GeoPosition& origin,
                               const ShipState& s) {
  return name + ": position " + fmt_pos(unproject(origin, s.pos)) + ", speed " +
         fmt_kn(s.speed) + " kn, course " + fmt_deg(s.heading) + " deg";
}

}  // namespace detail

inline ToolRegistry ToolRegistry::standard() {
  ToolRegistry r;

  r.add("get_sensor_data", [](const json& args, const AgentContext& ctx) {
    const auto& snap = ctx.snapshot;
    if (args.contains("target")) {
      const TargetView* t = detail::find_target(snap, args);
      if (!t) return std::string("tool error: unknown target id");
      return detail::sensor_line("target " + t->id, snap.origin, t->state);
    }
    std::string out = detail::sensor_line("own ship", snap.origin, snap.own);
    for (const auto& t : snap.targets)
      out += "\n" + detail::sensor_line("target " + t.id, snap.origin, t.state);
    return out;
  });

  r.add("compute_cpa", [](const json& args, const AgentContext& ctx) {
    const TargetView* t = detail::find_target(ctx.snapshot, args);
    if (!t) return std::string("tool error: unknown target id");
    const CpaResult k = cpa(ctx.snapshot.own.pos, velocity_of(ctx.snapshot.own),
                            t->state.pos, velocity_of(t->state));
    return "target " + t->id + ": range " + fmt_nm(k.range) + " nm, bearing " +
           fmt_deg(k.relative_bearing) + " deg, DCPA " + fmt_nm(k.dcpa) +
           " nm, TCPA " + fmt_min(k.tcpa) + " min";
  });

  r.add("classify_encounter", [](const json& args, const AgentContext& ctx) {
    const TargetView* t = detail::find_target(ctx.snapshot, args);
    if (!t) return std::string("tool error: unknown target id");
    const auto& own = ctx.snapshot.own;
    const double beta = relative_bearing(own.heading, own.pos, t->state.pos);
    const double dc = wrap_two_pi(t->state.heading - own.heading);
    return "target " + t->id + ": encounter " +
           encounter_phrase(classify(own, t->state)) + " (relative bearing " +
           fmt_deg(beta) + " deg, course difference " + fmt_deg(dc) + " deg)";
  });

  r.add("assess_risk", [](const json& args, const AgentContext& ctx) {
    const TargetView* t = detail::find_target(ctx.snapshot, args);
    if (!t) return std::string("tool error: unknown target id");
    const CpaResult k = cpa(ctx.snapshot.own.pos, velocity_of(ctx.snapshot.own),
                            t->state.pos, velocity_of(t->state));
    const RiskLevel risk = assess_risk(k, ctx.thresholds);
    return "target " + t->id + ": risk " + risk_word(risk) + " (DCPA " +
           fmt_nm(k.dcpa) + " nm vs bound " + fmt_nm(ctx.thresholds.d_safe) +
           " nm, TCPA " + fmt_min(k.tcpa) + " min vs horizon " +
           fmt_min(ctx.thresholds.t_horizon) + " min, range " + fmt_nm(k.range) +
           " nm)";
  });

  r.add("propose_avoidance", [](const json& args, const AgentContext& ctx) {
    DecisionCommand cand;
    if (args.contains("maneuver")) {
      cand = decision_from_json(args);
    } else {
      cand = rule_suggestion(ctx);
    }
    const DecisionCommand checked = validate_decision(cand, ctx);
    return "suggestion: " + decision_to_json(checked).dump();
  });

  return r;
}

// --- decision cores -----------------------------------------------------------

/// Outcome of one core call. A non-empty error marks a transport failure.
struct CoreResult {
  std::string text;
  std::string error;
  int retries = 0;
  bool ok() const { return error.empty(); }
};

/// A decision core turns a prompt into response text under the action grammar.
class DecisionCore {
 public:
  virtual ~DecisionCore() = default;
  virtual std::string name() const = 0;
  virtual CoreResult complete(const PromptBundle& prompt, const AgentContext& ctx) = 0;
};

/// Deterministic core wrapping the COLREGs rule set. Stateless; the resume
/// hysteresis counter travels inside the snapshot.
class RuleCore final : public DecisionCore {
 public:
  std::string name() const override { return "rule"; }
  CoreResult complete(const PromptBundle&, const AgentContext& ctx) override {
    const DecisionCommand d = rule_suggestion(ctx);
    int at_risk = 0;
    for (const auto& t : ctx.snapshot.targets)
      if (t.risk != RiskLevel::None) ++at_risk;
    std::string text = "Thought: " + std::to_string(at_risk) +
                       " target(s) at risk; applying COLREGs decision rules.\n" +
                       final_answer_line(d);
    return {std::move(text), "", 0};
  }
};

/// Replays canned responses, for tests and offline runs. Returns an empty
/// response (a parse error downstream) once the script is exhausted.
class ScriptedCore final : public DecisionCore {
 public:
  explicit ScriptedCore(std::vector<std::string> responses)
      : responses_(std::move(responses)) {}

  std::string name() const override { return "scripted"; }
  CoreResult complete(const PromptBundle&, const AgentContext&) override {
    if (next_ >= responses_.size()) return {"", "", 0};
    return {responses_[next_++], "", 0};
  }

 private:
  std::vector<std::string> responses_;
  std::size_t next_ = 0;
};

// --- decision validator ---------------------------------------------------------

/// Translate a decision into a helm order against the current own state.
inline HelmCommand helm_for(const DecisionCommand& d, const ShipState& own,
                            double cruise_speed, const SceneSnapshot& snap) {
  HelmCommand h;
  switch (d.maneuver) {
    case Maneuver::StarboardTurn:
    case Maneuver::PortTurn:
      h.course_order = d.course_order.value_or(own.heading);
      h.speed_order = d.speed_order.value_or(own.speed);
      break;
    case Maneuver::SlowDown:
      h.course_order = d.course_order.value_or(own.heading);
      h.speed_order = d.speed_order.value_or(own.speed / 2.0);
      break;
    case Maneuver::Stop:
      h.course_order = d.course_order.value_or(own.heading);
      h.speed_order = 0.0;
      break;
    case Maneuver::StandOn:
      h.course_order = own.heading;
      h.speed_order = d.speed_order.value_or(own.speed);
      break;
    case Maneuver::ResumeCourse:
      h.course_order = d.course_order.value_or(
          snap.goal ? true_bearing(own.pos, *snap.goal) : own.heading);
      h.speed_order = d.speed_order.value_or(cruise_speed);
      break;
  }
  return h;
}

namespace detail {

struct ForwardCheck {
  bool ok = false;
  double min_sep = 0.0;
  bool zone_hit = false;
};

/// Forward-simulate a candidate with constant-velocity targets; a candidate
/// passes when it keeps min separation >= min_sep_factor * d_safe and never
/// enters an active zone.
inline ForwardCheck forward_check(const DecisionCommand& d, const AgentContext& ctx) {
  const auto& snap = ctx.snapshot;
  const double min_sep_bound = ctx.validator.min_sep_factor * ctx.thresholds.d_safe;
  const HelmCommand helm = helm_for(d, snap.own, snap.own_cruise_speed, snap);

  ShipState own = snap.own;
  std::vector<LocalPoint> tpos;
  std::vector<LocalPoint> tvel;
  for (const auto& t : snap.targets) {
    tpos.push_back(t.state.pos);
    tvel.push_back(velocity_components(velocity_of(t.state)));
  }

  ForwardCheck out;
  out.min_sep = std::numeric_limits<double>::infinity();
  const int steps = static_cast<int>(std::ceil(ctx.validator.lookahead / ctx.validator.dt));
  for (int i = 0; i <= steps; ++i) {
    for (std::size_t k = 0; k < tpos.size(); ++k)
      out.min_sep = std::min(out.min_sep, distance(own.pos, tpos[k]));
    for (const auto& z : snap.zones)
      if (point_in_polygon(own.pos, z.polygon)) out.zone_hit = true;
    if (i == steps) break;
    own = step(own, helm, ctx.params, ctx.validator.dt);
    for (std::size_t k = 0; k < tpos.size(); ++k) {
      tpos[k].x += tvel[k].x * ctx.validator.dt;
      tpos[k].y += tvel[k].y * ctx.validator.dt;
    }
  }
  out.ok = !out.zone_hit && out.min_sep >= min_sep_bound;
  return out;
}

}  // namespace detail

/// Forward-simulation safety check of a candidate decision. A passing
/// candidate is returned unchanged. A rejected candidate is replaced by the
/// first safe fallback among: the same-side turn deepened in 15-degree steps
/// up to 60 degrees total, the opposite-side 30-degree turn, slowing to half
/// speed, and stopping (the unconditional terminal fallback).
inline DecisionCommand validate_decision(const DecisionCommand& candidate,
                                         const AgentContext& ctx) {
  const auto check = detail::forward_check(candidate, ctx);
  if (check.ok) return candidate;

  const auto& own = ctx.snapshot.own;
  const auto& v = ctx.validator;

  int side = +1;
  double base_turn = 0.0;
  if (candidate.maneuver == Maneuver::StarboardTurn && candidate.course_order) {
    side = +1;
    base_turn = std::abs(wrap_pi(*candidate.course_order - own.heading));
  } else if (candidate.maneuver == Maneuver::PortTurn && candidate.course_order) {
    side = -1;
    base_turn = std::abs(wrap_pi(*candidate.course_order - own.heading));
  } else {
    side = +1;
    base_turn = v.opposite_turn - v.deepen_step;  // non-turn candidates start at 30 deg
  }

  std::vector<DecisionCommand> alternatives;
  const auto make_turn = [&](int s, double magnitude, const std::string& why) {
    DecisionCommand d;
    d.maneuver = s > 0 ? Maneuver::StarboardTurn : Maneuver::PortTurn;
    d.course_order = wrap_two_pi(own.heading + s * magnitude);
    d.rationale = why;
    return d;
  };

  for (double m = base_turn + v.deepen_step; m <= v.max_total_turn + 1e-9;
       m += v.deepen_step)
    alternatives.push_back(make_turn(
        side, m,
        "validator: candidate track unsafe; deepened " +
            std::string(side > 0 ? "starboard" : "port") + " turn to " +
            fmt_deg(m) + " deg off current heading"));

  alternatives.push_back(make_turn(
      -side, v.opposite_turn,
      "validator: candidate side blocked; trying " +
          std::string(-side > 0 ? "starboard" : "port") + " turn instead"));

  DecisionCommand slow;
  slow.maneuver = Maneuver::SlowDown;
  slow.speed_order = own.speed / 2.0;
  slow.rationale = "validator: both turn directions unsafe; reducing speed";
  alternatives.push_back(slow);

  DecisionCommand stop;
  stop.maneuver = Maneuver::Stop;
  stop.speed_order = 0.0;
  stop.rationale = "validator: no safe maneuver found; stopping";
  alternatives.push_back(stop);

  for (std::size_t i = 0; i + 1 < alternatives.size(); ++i)
    if (detail::forward_check(alternatives[i], ctx).ok) return alternatives[i];
  return alternatives.back();
}

// --- the ReAct loop ----------------------------------------------------------

struct ReactStep {
  std::string thought;
  std::optional<std::pair<std::string, std::string>> action;  // (tool, args dump)
  std::optional<std::string> observation;
  bool is_final = false;

  bool operator==(const ReactStep&) const = default;
};

struct ReactTrace {
  std::vector<ReactStep> steps;
  DecisionCommand final;
  bool truncated = false;     // step budget exhausted, rule fallback used
  bool degraded = false;      // core transport failure, rule fallback used
  int parse_errors = 0;
  int transport_retries = 0;
  std::vector<double> core_latency_ms;  // non-deterministic side channel
  double pipeline_ms = 0.0;             // decision time minus core wait
};

struct ReactOptions {
  int max_steps = 8;
  int parse_retries = 2;  // corrective re-asks per decision cycle
  std::string system_prompt = default_system_prompt();
};

/// Run one decision cycle. Always produces a decision: a well-behaved core's
/// final answer is validated and returned; any failure mode (malformed or
/// silent responses past the step budget, transport failure) falls back to
/// the validated rule decision with the trace flagged accordingly.
inline ReactTrace run_react(const AgentContext& ctx, DecisionCore& core,
                            const ToolRegistry& registry, const ReactOptions& opts) {
  using clock = std::chrono::steady_clock;
  const auto cycle_start = clock::now();
  double core_ms_total = 0.0;

  ReactTrace trace;
  std::vector<std::string> feedback;
  int consecutive_parse_errors = 0;
  bool decided = false;

  const auto rule_fallback = [&]() {
    trace.final = validate_decision(rule_suggestion(ctx), ctx);
    decided = true;
  };

  for (int step_i = 0; step_i < opts.max_steps && !decided; ++step_i) {
    const PromptBundle prompt = build_prompt(opts.system_prompt, ctx.snapshot, feedback);

    const auto t0 = clock::now();
    const CoreResult reply = core.complete(prompt, ctx);
    const double ms =
        std::chrono::duration<double, std::milli>(clock::now() - t0).count();
    trace.core_latency_ms.push_back(ms);
    core_ms_total += ms;
    trace.transport_retries += reply.retries;

    if (!reply.ok()) {
      trace.degraded = true;
      rule_fallback();
      break;
    }

    ParsedResponse parsed = parse_action(reply.text, registry.names());

    if (auto* err = std::get_if<ParseError>(&parsed)) {
      ++trace.parse_errors;
      ReactStep s;
      s.thought = "";
      if (consecutive_parse_errors < opts.parse_retries) {
        ++consecutive_parse_errors;
        std::string note = "Observation (parser): response rejected at byte " +
                           std::to_string(err->position) + ": " + err->message +
                           ". Reply with 'Action: <tool>({...})' or "
                           "'Final Answer: {...}'.";
        s.observation = note;
        feedback.push_back(note);
      }
      trace.steps.push_back(std::move(s));
      continue;
    }
    consecutive_parse_errors = 0;

    if (auto* act = std::get_if<AgentAction>(&parsed)) {
      const std::string obs = registry.invoke(act->tool, act->args, ctx);
      ReactStep s;
      s.thought = act->thought;
      s.action = std::make_pair(act->tool, act->args.dump());
      s.observation = obs;
      trace.steps.push_back(std::move(s));
      feedback.push_back("Observation (" + act->tool + "): " + obs);
      continue;
    }

    auto& fin = std::get<FinalDecision>(parsed);
    ReactStep s;
    s.thought = fin.thought;
    s.is_final = true;
    trace.steps.push_back(std::move(s));
    trace.final = validate_decision(fin.decision, ctx);
    decided = true;
  }

  if (!decided) {
    trace.truncated = true;
    rule_fallback();
  }

  trace.pipeline_ms =
      std::chrono::duration<double, std::milli>(clock::now() - cycle_start).count() -
      core_ms_total;
  return trace;
}

// --- trace (de)serialization ---------------------------------------------------

inline json trace_to_json(const ReactTrace& t, bool include_latency = true) {
  json steps = json::array();
  for (const auto& s : t.steps) {
    json js;
    js["thought"] = s.thought;
    if (s.action) js["action"] = {{"tool", s.action->first}, {"args", s.action->second}};
    if (s.observation) js["observation"] = *s.observation;
    js["final"] = s.is_final;
    steps.push_back(std::move(js));
  }
  json j;
  j["steps"] = std::move(steps);
  j["final"] = decision_to_json(t.final);
  j["truncated"] = t.truncated;
  j["degraded"] = t.degraded;
  j["parse_errors"] = t.parse_errors;
  j["transport_retries"] = t.transport_retries;
  if (include_latency) {
    j["latency_ms"] = {{"core", t.core_latency_ms}, {"pipeline", t.pipeline_ms}};
  }
  return j;
}

inline ReactTrace trace_from_json(const json& j) {
  ReactTrace t;
  for (const auto& js : j.at("steps")) {
    ReactStep s;
    s.thought = js.at("thought").get<std::string>();
    if (js.contains("action"))
      s.action = std::make_pair(js.at("action").at("tool").get<std::string>(),
                                js.at("action").at("args").get<std::string>());
    if (js.contains("observation"))
      s.observation = js.at("observation").get<std::string>();
    s.is_final = js.at("final").get<bool>();
    t.steps.push_back(std::move(s));
  }
  t.final = decision_from_json(j.at("final"));
  t.truncated = j.at("truncated").get<bool>();
  t.degraded = j.at("degraded").get<bool>();
  t.parse_errors = j.at("parse_errors").get<int>();
  t.transport_retries = j.at("transport_retries").get<int>();
  if (j.contains("latency_ms")) {
    t.core_latency_ms = j.at("latency_ms").at("core").get<std::vector<double>>();
    t.pipeline_ms = j.at("latency_ms").at("pipeline").get<double>();
  }
  return t;
}

}  // namespace navsim
