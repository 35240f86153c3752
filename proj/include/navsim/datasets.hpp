// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "navsim/agent.hpp"
#include "navsim/colregs.hpp"
#include "navsim/depiction.hpp"

namespace navsim {

// mt19937_64 is standardized; the uniform mapping is done by hand so output
// bytes are identical across standard libraries.
class DatasetRng {
 public:
  explicit DatasetRng(std::uint64_t seed) : eng_(seed) {}
  double uniform01() {
    return static_cast<double>(eng_() >> 11) * (1.0 / 9007199254740992.0);
  }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

 private:
  std::mt19937_64 eng_;
};

struct SetdRecord {
  std::string scene_text;
  EncounterType label = EncounterType::Clear;
  // underlying geometry, kept for oracle re-checks; not serialized
  ShipState os;
  ShipState ts;
};

struct ScaddRecord {
  std::string instruction;
  std::string response;
  // underlying scene, kept for oracle re-checks; not serialized
  SceneSnapshot snapshot;
};

struct DatasetDefaults {
  GeoPosition origin{122.445374, 31.257936};
  RiskThresholds thresholds;
  RuleOptions rule;
  ValidatorOptions validator;
  ShipModelParams model;
  double min_speed = knots2mps(4.0);
  double max_speed = knots2mps(15.0);
  double min_range = nm2m(0.5);
  double max_range = nm2m(6.0);
  int max_attempts = 500;
  double trajectory_step = 30.0;  // s between per-trajectory instants
};

namespace detail {

inline const EncounterType kSetdClasses[4] = {
    EncounterType::HeadOn, EncounterType::StarboardCrossingSmall,
    EncounterType::StarboardCrossingLarge, EncounterType::PortCrossing};

/// Draw a two-ship geometry whose classification equals `want`.
inline std::pair<ShipState, ShipState> sample_encounter(EncounterType want,
                                                        DatasetRng& rng,
                                                        const DatasetDefaults& d) {
  for (int attempt = 0; attempt < d.max_attempts; ++attempt) {
    const double own_heading = rng.uniform(0.0, kTwoPi);
    const double own_speed = rng.uniform(d.min_speed, d.max_speed);
    const double ts_speed = rng.uniform(d.min_speed, d.max_speed);
    const double range = rng.uniform(d.min_range, d.max_range);

    double beta = 0.0, dc = 0.0;
    switch (want) {
      case EncounterType::HeadOn:
        beta = rng.uniform(-deg2rad(6.0), deg2rad(6.0));
        dc = kPi + rng.uniform(-deg2rad(6.0), deg2rad(6.0));
        break;
      case EncounterType::StarboardCrossingSmall:
        beta = rng.uniform(deg2rad(6.0) + 1e-6, sector::kCrossingSplit);
        dc = rng.uniform(0.0, kTwoPi);
        break;
      case EncounterType::StarboardCrossingLarge:
        beta = rng.uniform(sector::kCrossingSplit + 1e-6, sector::kAbaftBeam);
        dc = rng.uniform(0.0, kTwoPi);
        break;
      case EncounterType::PortCrossing:
        beta = rng.uniform(kTwoPi - sector::kAbaftBeam, deg2rad(354.0) - 1e-6);
        dc = rng.uniform(0.0, kTwoPi);
        break;
      case EncounterType::BeingOvertaken:
        beta = rng.uniform(sector::kAbaftBeam + 1e-6, kTwoPi - sector::kAbaftBeam - 1e-6);
        dc = rng.uniform(-deg2rad(40.0), deg2rad(40.0));
        break;
      default:
        throw std::invalid_argument("unsupported sampled class");
    }

    ShipState os;
    os.heading = wrap_two_pi(own_heading);
    os.speed = own_speed;

    ShipState ts;
    const double bearing = wrap_two_pi(own_heading + beta);
    ts.pos = {range * std::sin(bearing), range * std::cos(bearing)};
    ts.heading = wrap_two_pi(own_heading + dc);
    ts.speed = want == EncounterType::BeingOvertaken
                   ? rng.uniform(std::min(own_speed * 1.2, d.max_speed), d.max_speed)
                   : ts_speed;

    if (classify(os, ts) == want) return {os, ts};
  }
  throw std::runtime_error(std::string("sample_encounter: no ") + to_string(want) +
                           " geometry found within attempt budget");
}

inline SceneSnapshot snapshot_of(const ShipState& os, double cruise,
                                 const std::vector<std::pair<std::string, ShipState>>& targets,
                                 const DatasetDefaults& d) {
  SceneSnapshot snap;
  snap.origin = d.origin;
  snap.own = os;
  snap.own_cruise_speed = cruise;
  for (const auto& [id, ts] : targets) {
    TargetView tv;
    tv.id = id;
    tv.state = ts;
    tv.cpa = cpa(os.pos, velocity_of(os), ts.pos, velocity_of(ts));
    tv.encounter = classify(os, ts);
    tv.risk = assess_risk(tv.cpa, d.thresholds);
    snap.targets.push_back(std::move(tv));
  }
  return snap;
}

inline ShipState advanced(const ShipState& s, double t) {
  ShipState out = s;
  out.pos.x += s.speed * std::sin(s.heading) * t;
  out.pos.y += s.speed * std::cos(s.heading) * t;
  return out;
}

}  // namespace detail

/// Generate n encounter-classification records, balanced across the four
/// encounter classes (record i belongs to class i mod 4). With
/// per_trajectory > 1 each sampled geometry yields that many instants along
/// the constant-velocity track, each labeled by re-classification.
inline std::vector<SetdRecord> gen_setd(int n, std::uint64_t seed,
                                        int per_trajectory = 1,
                                        const DatasetDefaults& d = {}) {
  if (n < 4) throw std::invalid_argument("gen_setd: n must be >= 4");
  if (per_trajectory < 1)
    throw std::invalid_argument("gen_setd: per_trajectory must be >= 1");
  DatasetRng rng(seed);
  std::vector<SetdRecord> out;
  out.reserve(n);
  int geometry_index = 0;
  while (static_cast<int>(out.size()) < n) {
    const EncounterType want = detail::kSetdClasses[geometry_index % 4];
    ++geometry_index;
    const auto [os, ts] = detail::sample_encounter(want, rng, d);
    for (int k = 0; k < per_trajectory && static_cast<int>(out.size()) < n; ++k) {
      const double t = k * d.trajectory_step;
      const ShipState os_t = detail::advanced(os, t);
      const ShipState ts_t = detail::advanced(ts, t);
      SetdRecord rec;
      rec.label = classify(os_t, ts_t);
      rec.scene_text =
          depict(detail::snapshot_of(os_t, os.speed, {{"A", ts_t}}, d));
      rec.os = os_t;
      rec.ts = ts_t;
      out.push_back(std::move(rec));
    }
  }
  return out;
}

/// Generate n three-ship instruction/response pairs. Every scene has at
/// least one at-risk target; the response is the validated rule decision in
/// final-answer form.
inline std::vector<ScaddRecord> gen_scadd(int n, std::uint64_t seed,
                                          const DatasetDefaults& d = {}) {
  if (n < 1) throw std::invalid_argument("gen_scadd: n must be >= 1");
  DatasetRng rng(seed);
  std::vector<ScaddRecord> out;
  out.reserve(n);

  const EncounterType risky_classes[5] = {
      EncounterType::HeadOn, EncounterType::StarboardCrossingSmall,
      EncounterType::StarboardCrossingLarge, EncounterType::PortCrossing,
      EncounterType::BeingOvertaken};

  for (int i = 0; i < n; ++i) {
    bool made = false;
    for (int attempt = 0; attempt < d.max_attempts && !made; ++attempt) {
      const EncounterType c1 =
          risky_classes[static_cast<int>(rng.uniform(0.0, 5.0)) % 5];
      const EncounterType c2 =
          risky_classes[static_cast<int>(rng.uniform(0.0, 5.0)) % 5];
      auto [os, tsa] = detail::sample_encounter(c1, rng, d);
      auto [os2, tsb] = detail::sample_encounter(c2, rng, d);
      // the second geometry was sampled against os2; re-aim it at os
      const double rot = os.heading - os2.heading;
      const double bx = tsb.pos.x - os.pos.x, by = tsb.pos.y - os.pos.y;
      tsb.pos.x = os.pos.x + bx * std::cos(rot) + by * std::sin(rot);
      tsb.pos.y = os.pos.y - bx * std::sin(rot) + by * std::cos(rot);
      tsb.heading = wrap_two_pi(tsb.heading + rot);

      SceneSnapshot snap =
          detail::snapshot_of(os, os.speed, {{"A", tsa}, {"B", tsb}}, d);
      const double goal_dist = nm2m(5.0);
      snap.goal = LocalPoint{os.pos.x + goal_dist * std::sin(os.heading),
                             os.pos.y + goal_dist * std::cos(os.heading)};

      bool at_risk = false;
      for (const auto& t : snap.targets)
        if (t.risk == RiskLevel::GiveWay || t.risk == RiskLevel::Critical)
          at_risk = true;
      if (!at_risk) continue;

      AgentContext ctx{snap, d.thresholds, d.model, d.rule, d.validator};
      const DecisionCommand decision = validate_decision(rule_suggestion(ctx), ctx);

      ScaddRecord rec;
      rec.instruction = build_prompt(default_system_prompt(), snap).to_text();
      rec.response = final_answer_line(decision);
      rec.snapshot = snap;
      out.push_back(std::move(rec));
      made = true;
    }
    if (!made)
      throw std::runtime_error(
          "gen_scadd: could not sample a three-ship scene with an at-risk pair "
          "within the attempt budget");
  }
  return out;
}

// --- line-delimited emission ------------------------------------------------------

inline std::string setd_to_jsonl(const std::vector<SetdRecord>& records,
                                 std::uint64_t seed) {
  std::string out;
  json header{{"schema", "navsim-setd"},
              {"version", 1},
              {"seed", seed},
              {"count", records.size()}};
  out += header.dump() + "\n";
  for (const auto& r : records) {
    json j{{"instruction", r.scene_text},
           {"output", encounter_phrase(r.label)},
           {"provenance", "rule-core"}};
    out += j.dump() + "\n";
  }
  return out;
}

inline std::string scadd_to_jsonl(const std::vector<ScaddRecord>& records,
                                  std::uint64_t seed) {
  std::string out;
  json header{{"schema", "navsim-scadd"},
              {"version", 1},
              {"seed", seed},
              {"count", records.size()}};
  out += header.dump() + "\n";
  for (const auto& r : records) {
    json j{{"instruction", r.instruction},
           {"output", r.response},
           {"provenance", "rule-core"}};
    out += j.dump() + "\n";
  }
  return out;
}

}  // namespace navsim
