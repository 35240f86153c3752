// SPDX-License-Identifier: Apache-2.0
#include <catch2/catch_amalgamated.hpp>
#include <random>

#include "navsim/agent.hpp"

using namespace navsim;

namespace {

class FailingCore final : public DecisionCore {
 public:
  std::string name() const override { return "failing"; }
  CoreResult complete(const PromptBundle&, const AgentContext&) override {
    return {"", "transport: connection refused", 2};
  }
};

TargetView make_target(const std::string& id, const ShipState& own,
                       const ShipState& ts, const RiskThresholds& th) {
  TargetView tv;
  tv.id = id;
  tv.state = ts;
  tv.cpa = cpa(own.pos, velocity_of(own), ts.pos, velocity_of(ts));
  tv.encounter = classify(own, ts);
  tv.risk = assess_risk(tv.cpa, th);
  return tv;
}

/// OS northbound at 8 kn, goal 6 nm ahead, one starboard crosser at give-way
/// risk. The geometry mirrors the shipped three-ship fixture's target A.
AgentContext crossing_context() {
  AgentContext ctx;
  ctx.snapshot.origin = {122.445374, 31.257936};
  ctx.snapshot.own.heading = 0.0;
  ctx.snapshot.own.speed = knots2mps(8.0);
  ctx.snapshot.own_cruise_speed = knots2mps(8.0);
  ctx.snapshot.goal = LocalPoint{0.0, nm2m(6.0)};

  ShipState ts;
  ts.pos = {3446.0, 3038.0};
  ts.heading = deg2rad(260.0);
  ts.speed = knots2mps(10.0);
  ctx.snapshot.targets.push_back(
      make_target("A", ctx.snapshot.own, ts, ctx.thresholds));
  REQUIRE(ctx.snapshot.targets[0].risk == RiskLevel::GiveWay);
  return ctx;
}

}  // namespace

TEST_CASE("parse_action: tool call exemplar") {
  const auto r = parse_action("Thought: check geometry\nAction: compute_cpa({\"target\":\"A\"})");
  const auto* act = std::get_if<AgentAction>(&r);
  REQUIRE(act != nullptr);
  CHECK(act->thought == "check geometry");
  CHECK(act->tool == "compute_cpa");
  CHECK(act->args.at("target") == "A");
}

TEST_CASE("parse_action: final answer exemplar") {
  const auto r = parse_action(
      "Final Answer: {\"maneuver\":\"StarboardTurn\",\"course_order_deg\":30.0,"
      "\"rationale\":\"head-on, Rule 14\"}");
  const auto* fin = std::get_if<FinalDecision>(&r);
  REQUIRE(fin != nullptr);
  CHECK(fin->decision.maneuver == Maneuver::StarboardTurn);
  REQUIRE(fin->decision.course_order.has_value());
  CHECK_THAT(*fin->decision.course_order,
             Catch::Matchers::WithinAbs(deg2rad(30.0), 1e-12));
  CHECK(fin->decision.rationale == "head-on, Rule 14");
}

TEST_CASE("parse_action: unknown tool is a parse error") {
  const auto r = parse_action("Action: warp_drive({})");
  const auto* err = std::get_if<ParseError>(&r);
  REQUIRE(err != nullptr);
  CHECK(err->message.find("unknown tool") != std::string::npos);
}

TEST_CASE("parse_action: malformed payloads report a position") {
  for (const char* bad :
       {"Action: compute_cpa({\"target\":)", "Final Answer: {\"maneuver\":}",
        "Final Answer: {\"maneuver\":\"FlyAway\",\"rationale\":\"x\"}",
        "Final Answer: [1,2]", "Action: compute_cpa(", "", "   \n  ",
        "no grammar markers here", "Action: ({})",
        "Final Answer: {\"rationale\":\"missing maneuver\"}"}) {
    const auto r = parse_action(bad);
    INFO("input: " << bad);
    CHECK(std::holds_alternative<ParseError>(r));
  }
}

TEST_CASE("parse_action: bare leading text counts as the thought") {
  const auto r = parse_action("let me check\nAction: assess_risk({\"target\":\"A\"})");
  const auto* act = std::get_if<AgentAction>(&r);
  REQUIRE(act != nullptr);
  CHECK(act->thought == "let me check");
}

TEST_CASE("parse_action: empty argument list is an empty object") {
  const auto r = parse_action("Action: get_sensor_data()");
  const auto* act = std::get_if<AgentAction>(&r);
  REQUIRE(act != nullptr);
  CHECK(act->args.is_object());
  CHECK(act->args.empty());
}

TEST_CASE("decision json round-trips through the grammar") {
  DecisionCommand d;
  d.maneuver = Maneuver::PortTurn;
  d.course_order = deg2rad(312.7);
  d.speed_order = knots2mps(6.5);
  d.rationale = "evading an overtaker";
  const std::string line = final_answer_line(d);
  const auto r = parse_action(line);
  const auto* fin = std::get_if<FinalDecision>(&r);
  REQUIRE(fin != nullptr);
  CHECK(final_answer_line(fin->decision) == line);
}

TEST_CASE("standard registry carries exactly the five tools") {
  const ToolRegistry reg = ToolRegistry::standard();
  CHECK(reg.size() == 5);
  for (const auto& name : standard_tool_names()) CHECK(reg.contains(name));
}

TEST_CASE("tools answer deterministically from the snapshot") {
  const AgentContext ctx = crossing_context();
  const ToolRegistry reg = ToolRegistry::standard();

  const std::string cpa_text = reg.invoke("compute_cpa", json{{"target", "A"}}, ctx);
  CHECK(cpa_text.find("target A: range") != std::string::npos);
  CHECK(cpa_text == reg.invoke("compute_cpa", json{{"target", "A"}}, ctx));

  CHECK(reg.invoke("classify_encounter", json{{"target", "A"}}, ctx)
            .find("starboard crossing (small angle)") != std::string::npos);
  CHECK(reg.invoke("assess_risk", json{{"target", "A"}}, ctx).find("give-way") !=
        std::string::npos);
  CHECK(reg.invoke("get_sensor_data", json::object(), ctx).find("own ship") !=
        std::string::npos);
  const std::string prop = reg.invoke("propose_avoidance", json::object(), ctx);
  CHECK(prop.find("suggestion: {") != std::string::npos);

  // bad arguments become observation text, never exceptions
  CHECK(reg.invoke("compute_cpa", json{{"target", "ZZ"}}, ctx).find("tool error") !=
        std::string::npos);
  CHECK(reg.invoke("compute_cpa", json{{"target", 7}}, ctx).find("tool error") !=
        std::string::npos);
}

TEST_CASE("run_react: a single scripted final answer makes a one-step trace") {
  const AgentContext ctx = crossing_context();
  DecisionCommand scripted;
  scripted.maneuver = Maneuver::StarboardTurn;
  scripted.course_order = deg2rad(40.0);
  scripted.rationale = "scripted give-way";
  ScriptedCore core({"Thought: obvious crossing\n" + final_answer_line(scripted)});

  const ReactTrace trace = run_react(ctx, core, ToolRegistry::standard(), {});
  REQUIRE(trace.steps.size() == 1);
  CHECK(trace.steps[0].is_final);
  CHECK(trace.steps[0].thought == "obvious crossing");
  CHECK_FALSE(trace.truncated);
  CHECK_FALSE(trace.degraded);
  CHECK(trace.final.maneuver == Maneuver::StarboardTurn);
  // the scripted candidate is safe here, so the validator passes it through
  CHECK(trace.final.rationale == "scripted give-way");
}

TEST_CASE("run_react: tool call then final answer round-trips the observation") {
  const AgentContext ctx = crossing_context();
  const ToolRegistry reg = ToolRegistry::standard();
  DecisionCommand scripted;
  scripted.maneuver = Maneuver::StarboardTurn;
  scripted.course_order = deg2rad(45.0);
  scripted.rationale = "after checking cpa";
  ScriptedCore core({"Thought: need numbers\nAction: compute_cpa({\"target\":\"A\"})",
                     final_answer_line(scripted)});

  const ReactTrace trace = run_react(ctx, core, reg, {});
  REQUIRE(trace.steps.size() == 2);
  REQUIRE(trace.steps[0].action.has_value());
  CHECK(trace.steps[0].action->first == "compute_cpa");
  CHECK(trace.steps[0].observation ==
        reg.invoke("compute_cpa", json{{"target", "A"}}, ctx));
  CHECK(trace.steps[1].is_final);
  CHECK(trace.final.maneuver == Maneuver::StarboardTurn);
}

TEST_CASE("run_react: garbage forever falls back to the rule core after max_steps") {
  const AgentContext ctx = crossing_context();
  ScriptedCore core(std::vector<std::string>(20, "%%% nonsense %%%"));
  ReactOptions opts;  // max_steps 8, parse_retries 2

  const ReactTrace trace = run_react(ctx, core, ToolRegistry::standard(), opts);
  CHECK(trace.truncated);
  CHECK(static_cast<int>(trace.steps.size()) == opts.max_steps);
  CHECK(trace.parse_errors == opts.max_steps);
  // corrective observations only for the first parse_retries failures
  int corrective = 0;
  for (const auto& s : trace.steps)
    if (s.observation) ++corrective;
  CHECK(corrective == opts.parse_retries);

  const DecisionCommand expected = validate_decision(rule_suggestion(ctx), ctx);
  CHECK(final_answer_line(trace.final) == final_answer_line(expected));
}

TEST_CASE("run_react: a silent core degrades to the rule decision") {
  const AgentContext ctx = crossing_context();
  ScriptedCore core(std::vector<std::string>{""});  // exhausted after one reply
  const ReactTrace trace = run_react(ctx, core, ToolRegistry::standard(), {});
  CHECK(trace.truncated);
  const DecisionCommand expected = validate_decision(rule_suggestion(ctx), ctx);
  CHECK(final_answer_line(trace.final) == final_answer_line(expected));
}

TEST_CASE("run_react: transport failure engages the fallback immediately") {
  const AgentContext ctx = crossing_context();
  FailingCore core;
  const ReactTrace trace = run_react(ctx, core, ToolRegistry::standard(), {});
  CHECK(trace.degraded);
  CHECK(trace.transport_retries == 2);
  const DecisionCommand expected = validate_decision(rule_suggestion(ctx), ctx);
  CHECK(final_answer_line(trace.final) == final_answer_line(expected));
}

TEST_CASE("validator: a safe candidate is returned unchanged") {
  const AgentContext ctx = crossing_context();
  DecisionCommand cand;
  cand.maneuver = Maneuver::StarboardTurn;
  cand.course_order = deg2rad(60.0);
  cand.rationale = "wide starboard berth";
  const DecisionCommand out = validate_decision(cand, ctx);
  CHECK(out.maneuver == cand.maneuver);
  CHECK(out.course_order == cand.course_order);
  CHECK(out.rationale == cand.rationale);
  CHECK(final_answer_line(out) == final_answer_line(cand));
}

TEST_CASE("validator: an unsafe stand-on candidate is replaced by a safe turn") {
  AgentContext ctx = crossing_context();
  // target A is on a near-collision course; standing on violates the
  // separation floor within the lookahead
  DecisionCommand cand;
  cand.maneuver = Maneuver::StandOn;
  cand.rationale = "hold";
  const DecisionCommand out = validate_decision(cand, ctx);
  CHECK(out.maneuver != Maneuver::StandOn);
  CHECK(detail::forward_check(out, ctx).ok);
}

TEST_CASE("validator: starboard blocked by a zone deepens or flips the turn") {
  AgentContext ctx = crossing_context();
  // wall east of the track: any starboard course change enters it
  ZoneState wall;
  wall.id = "Z";
  wall.polygon = {{300, -2000}, {12000, -2000}, {12000, 12000}, {300, 12000}};
  ctx.snapshot.zones.push_back(wall);

  DecisionCommand cand;
  cand.maneuver = Maneuver::StarboardTurn;
  cand.course_order = deg2rad(30.0);
  cand.rationale = "give way";
  const DecisionCommand out = validate_decision(cand, ctx);
  CHECK(detail::forward_check(out, ctx).ok);
  CHECK(out.maneuver != Maneuver::StarboardTurn);
}

TEST_CASE("validator: terminal fallback is stop") {
  AgentContext ctx = crossing_context();
  // box the own ship in completely
  ZoneState north;
  north.id = "N";
  north.polygon = {{-20000, 120}, {20000, 120}, {20000, 20000}, {-20000, 20000}};
  ZoneState south;
  south.id = "S";
  south.polygon = {{-20000, -20000}, {20000, -20000}, {20000, -120}, {-20000, -120}};
  ctx.snapshot.zones.push_back(north);
  ctx.snapshot.zones.push_back(south);
  // and park a target right on top of the stopping position
  ShipState blocker;
  blocker.pos = {0.0, 60.0};
  blocker.heading = 0.0;
  blocker.speed = knots2mps(8.0);
  ctx.snapshot.targets.push_back(make_target("B", ctx.snapshot.own, blocker, ctx.thresholds));

  DecisionCommand cand;
  cand.maneuver = Maneuver::StarboardTurn;
  cand.course_order = deg2rad(30.0);
  cand.rationale = "give way";
  const DecisionCommand out = validate_decision(cand, ctx);
  CHECK(out.maneuver == Maneuver::Stop);
  CHECK(out.speed_order == 0.0);
}

TEST_CASE("trace serialization round-trips exactly") {
  std::mt19937_64 eng(2024);
  auto u = [&](double lo, double hi) {
    return lo + (hi - lo) * (double(eng() >> 11) / 9007199254740992.0);
  };
  const std::vector<std::string> tools = standard_tool_names();
  for (int i = 0; i < 50; ++i) {
    ReactTrace t;
    const int steps = 1 + static_cast<int>(u(0, 4));
    for (int s = 0; s < steps; ++s) {
      ReactStep st;
      st.thought = "thought " + std::to_string(static_cast<int>(u(0, 1e6)));
      if (u(0, 1) < 0.7) {
        st.action = std::make_pair(tools[static_cast<int>(u(0, 5))],
                                   json{{"target", "A"}}.dump());
        st.observation = "obs " + std::to_string(static_cast<int>(u(0, 1e6)));
      }
      st.is_final = s == steps - 1 && u(0, 1) < 0.8;
      t.steps.push_back(std::move(st));
    }
    t.final.maneuver = static_cast<Maneuver>(static_cast<int>(u(0, 6)));
    if (u(0, 1) < 0.8) t.final.course_order = u(0, kTwoPi);
    if (u(0, 1) < 0.5) t.final.speed_order = u(0, 8);
    t.final.rationale = "r" + std::to_string(static_cast<int>(u(0, 1e9)));
    t.truncated = u(0, 1) < 0.2;
    t.degraded = u(0, 1) < 0.2;
    t.parse_errors = static_cast<int>(u(0, 4));
    t.transport_retries = static_cast<int>(u(0, 3));
    t.core_latency_ms = {u(0, 100), u(0, 100)};
    t.pipeline_ms = u(0, 10);

    const std::string once = trace_to_json(t).dump();
    const ReactTrace back = trace_from_json(json::parse(once));
    CHECK(trace_to_json(back).dump() == once);
    CHECK(back.steps == t.steps);
  }
}

TEST_CASE("trace serialization can exclude the latency side channel") {
  ReactTrace t;
  t.final.rationale = "x";
  t.core_latency_ms = {12.5};
  t.pipeline_ms = 0.3;
  const json with = trace_to_json(t, true);
  const json without = trace_to_json(t, false);
  CHECK(with.contains("latency_ms"));
  CHECK_FALSE(without.contains("latency_ms"));
}

TEST_CASE("rule core output obeys the grammar and names the rule") {
  const AgentContext ctx = crossing_context();
  RuleCore core;
  const CoreResult reply = core.complete(build_prompt("S", ctx.snapshot), ctx);
  REQUIRE(reply.ok());
  const auto parsed = parse_action(reply.text);
  const auto* fin = std::get_if<FinalDecision>(&parsed);
  REQUIRE(fin != nullptr);
  CHECK(fin->decision.maneuver == Maneuver::StarboardTurn);
  CHECK(fin->decision.rationale.find("Rule 15") != std::string::npos);
}
