// SPDX-License-Identifier: Apache-2.0
#include <catch2/catch_amalgamated.hpp>
#include <filesystem>

#include "navsim/scenario_io.hpp"
#include "navsim/simulator.hpp"

using namespace navsim;

namespace {

const GeoPosition kOrigin{122.445374, 31.257936};

ShipSpec ship(const std::string& id, bool own, const LocalPoint& at,
              double course_deg, double speed_kn,
              std::optional<LocalPoint> goal = std::nullopt) {
  ShipSpec s;
  s.id = id;
  s.is_own = own;
  s.start = unproject(kOrigin, at);
  if (goal) s.goal = unproject(kOrigin, *goal);
  s.course = wrap_two_pi(deg2rad(course_deg));
  s.speed = knots2mps(speed_kn);
  return s;
}

ScenarioConfig base_config() {
  ScenarioConfig cfg;
  cfg.name = "test";
  cfg.origin = kOrigin;
  cfg.duration = 3600.0;
  return cfg;
}

std::string temp_dir() {
  const auto dir = std::filesystem::temp_directory_path() / "navsim_test";
  std::filesystem::create_directories(dir);
  return dir.string();
}

}  // namespace

TEST_CASE("config validation catches structural defects") {
  ScenarioConfig cfg = base_config();
  CHECK_THROWS_AS(validate(cfg), std::invalid_argument);  // no own ship

  cfg.ships.push_back(ship("OS", true, {0, 0}, 0, 8, LocalPoint{0, 3704}));
  CHECK_NOTHROW(validate(cfg));

  SECTION("duplicate id") {
    cfg.ships.push_back(ship("OS", false, {100, 100}, 0, 8));
    CHECK_THROWS_AS(validate(cfg), std::invalid_argument);
  }
  SECTION("two own ships") {
    cfg.ships.push_back(ship("B", true, {100, 100}, 0, 8, LocalPoint{0, 1}));
    CHECK_THROWS_AS(validate(cfg), std::invalid_argument);
  }
  SECTION("own ship without goal") {
    cfg.ships[0].goal.reset();
    CHECK_THROWS_AS(validate(cfg), std::invalid_argument);
  }
  SECTION("duration not a multiple of dt") {
    cfg.duration = 3600.3;
    CHECK_THROWS_AS(validate(cfg), std::invalid_argument);
  }
  SECTION("event outside the horizon") {
    Event e;
    e.at = 9999.0;
    e.kind = Event::Kind::ZoneClears;
    e.zone_id = "Z";
    cfg.events.push_back(e);
    CHECK_THROWS_AS(validate(cfg), std::invalid_argument);
  }
  SECTION("self-intersecting zone polygon") {
    Event e;
    e.at = 0.0;
    e.kind = Event::Kind::ZoneAppears;
    e.zone.id = "Z";
    e.zone.polygon = {{0, 0}, {100, 100}, {100, 0}, {0, 100}};  // bowtie
    cfg.events.push_back(e);
    CHECK_THROWS_AS(validate(cfg), std::invalid_argument);
  }
}

TEST_CASE("no-risk baseline: straight run to the goal, resume-only decisions") {
  ScenarioConfig cfg = base_config();
  cfg.ships.push_back(ship("OS", true, {0, 0}, 0, 8, LocalPoint{0, nm2m(2.0)}));
  RuleCore core;
  const SimulationLog log = run(cfg, core);

  CHECK(log.end_reason == "goal_reached");
  CHECK(log.end_time < 1300.0);
  REQUIRE_FALSE(log.decisions.empty());
  for (const auto& d : log.decisions)
    CHECK(d.applied.maneuver == Maneuver::ResumeCourse);

  // heading stays north the whole way
  for (const auto& sr : log.steps)
    CHECK(std::abs(wrap_pi(sr.ships[0].second.heading)) < deg2rad(0.5));

  const Metrics m = compute_metrics(log);
  CHECK(m.goal_reached);
  CHECK(m.zone_incursions == 0);
}

TEST_CASE("target ships hold course and speed exactly") {
  ScenarioConfig cfg = base_config();
  cfg.duration = 600.0;
  cfg.ships.push_back(ship("OS", true, {0, 0}, 0, 8, LocalPoint{0, nm2m(20)}));
  cfg.ships.push_back(ship("T", false, {nm2m(3), nm2m(3)}, 240, 10));
  RuleCore core;
  const SimulationLog log = run(cfg, core);

  const ShipState first = log.steps.front().ships[1].second;
  for (const auto& sr : log.steps) {
    const ShipState& ts = sr.ships[1].second;
    CHECK(ts.heading == first.heading);
    CHECK(ts.speed == first.speed);
    CHECK(ts.rudder == 0.0);
    CHECK(ts.yaw_rate == 0.0);
  }
}

TEST_CASE("pop-up ships appear only from their event time onward") {
  ScenarioConfig cfg = base_config();
  cfg.duration = 600.0;
  cfg.ships.push_back(ship("OS", true, {0, 0}, 0, 8, LocalPoint{0, nm2m(20)}));
  Event e;
  e.at = 233.0;
  e.kind = Event::Kind::PopUpShip;
  e.ship = ship("C", false, {nm2m(2), nm2m(2)}, 225, 10);
  cfg.events.push_back(e);

  RuleCore core;
  const SimulationLog log = run(cfg, core);

  for (const auto& sr : log.steps) {
    const bool has_c = sr.ships.size() == 2;
    if (sr.t < 233.0) CHECK_FALSE(has_c);
    if (sr.t >= 233.0) CHECK(has_c);
  }
  // with decide_on_event, a decision lands exactly at the event time
  bool decided_at_event = false;
  for (const auto& d : log.decisions)
    if (d.t == 233.0) decided_at_event = true;
  CHECK(decided_at_event);

  REQUIRE(log.events.size() == 1);
  CHECK(log.events[0].t == 233.0);
  CHECK(log.events[0].kind == "popup_ship");
  CHECK(log.events[0].id == "C");
}

TEST_CASE("decide_on_event off defers the pop-up to the next cadence tick") {
  ScenarioConfig cfg = base_config();
  cfg.duration = 600.0;
  cfg.decide_on_event = false;
  cfg.ships.push_back(ship("OS", true, {0, 0}, 0, 8, LocalPoint{0, nm2m(20)}));
  Event e;
  e.at = 233.0;
  e.kind = Event::Kind::PopUpShip;
  e.ship = ship("C", false, {nm2m(2), nm2m(2)}, 225, 10);
  cfg.events.push_back(e);

  RuleCore core;
  const SimulationLog log = run(cfg, core);
  for (const auto& d : log.decisions) CHECK(d.t != 233.0);
  // first decision seeing C is the 240 s cadence tick
  for (const auto& d : log.decisions)
    if (d.t == 240.0) CHECK(d.digest != fnv1a64_hex(""));
}

TEST_CASE("identical config and core give byte-identical logs") {
  ScenarioConfig cfg = base_config();
  cfg.duration = 900.0;
  cfg.ships.push_back(ship("OS", true, {0, 0}, 0, 8, LocalPoint{0, nm2m(6)}));
  cfg.ships.push_back(ship("A", false, {3446, 3038}, 260, 10));
  cfg.ships.push_back(ship("B", false, {2259, 4013}, 240, 6));

  RuleCore core1, core2;
  const std::string run1 = log_to_jsonl(run(cfg, core1));
  const std::string run2 = log_to_jsonl(run(cfg, core2));
  CHECK(run1 == run2);
}

TEST_CASE("log save -> load -> save is byte-identical") {
  ScenarioConfig cfg = base_config();
  cfg.duration = 300.0;
  cfg.ships.push_back(ship("OS", true, {0, 0}, 0, 8, LocalPoint{0, nm2m(6)}));
  cfg.ships.push_back(ship("A", false, {3446, 3038}, 260, 10));
  Event e;
  e.at = 60.0;
  e.kind = Event::Kind::ZoneAppears;
  e.zone.id = "Z1";
  e.zone.polygon = {{500, 0}, {4000, 0}, {4000, 4000}, {500, 4000}};
  cfg.events.push_back(e);

  RuleCore core;
  const SimulationLog log = run(cfg, core);

  const std::string dir = temp_dir();
  const std::string log_path = dir + "/roundtrip_log.jsonl";
  const std::string lat_path = dir + "/roundtrip_latency.jsonl";
  save_log(log, log_path, lat_path);

  const SimulationLog re = load_log(log_path, lat_path);
  CHECK(log_to_jsonl(re) == log_to_jsonl(log));
  CHECK(latency_to_jsonl(re) == latency_to_jsonl(log));

  // and the replayed metrics equal the live metrics byte for byte
  CHECK(metrics_to_json(compute_metrics(re)).dump() ==
        metrics_to_json(compute_metrics(log)).dump());
}

TEST_CASE("truncated and corrupt logs name the offending line") {
  ScenarioConfig cfg = base_config();
  cfg.duration = 120.0;
  cfg.ships.push_back(ship("OS", true, {0, 0}, 0, 8, LocalPoint{0, nm2m(6)}));
  RuleCore core;
  const SimulationLog log = run(cfg, core);
  const std::string text = log_to_jsonl(log);

  const std::string dir = temp_dir();
  const std::string cut_path = dir + "/truncated.jsonl";
  write_file(cut_path, text.substr(0, text.size() - 40));  // drop the end record
  CHECK_THROWS_AS(load_log(cut_path), LoadError);

  const std::string bad_path = dir + "/corrupt.jsonl";
  std::string corrupted = text;
  corrupted.insert(corrupted.find('\n') + 1, "{\"type\":\"mystery\"}\n");
  write_file(bad_path, corrupted);
  try {
    load_log(bad_path);
    FAIL("expected LoadError");
  } catch (const LoadError& err) {
    CHECK(std::string(err.what()).find("line 2") != std::string::npos);
  }
}

TEST_CASE("scenario config save -> load -> save is byte-identical") {
  ScenarioConfig cfg = base_config();
  cfg.ships.push_back(ship("OS", true, {0, 0}, 0, 8, LocalPoint{0, nm2m(6)}));
  cfg.ships.push_back(ship("A", false, {3446, 3038}, 260, 10));
  Event pop;
  pop.at = 233.0;
  pop.kind = Event::Kind::PopUpShip;
  pop.ship = ship("C", false, {nm2m(1), nm2m(1)}, 10, 12);
  cfg.events.push_back(pop);

  const std::string once = config_to_json(cfg).dump();
  const ScenarioConfig back = config_from_json(json::parse(once));
  CHECK(config_to_json(back).dump() == once);
}

TEST_CASE("metrics: stationary pair distance and zone incursions") {
  ScenarioConfig cfg = base_config();
  cfg.duration = 60.0;
  cfg.ships.push_back(ship("OS", true, {0, 0}, 0, 0, LocalPoint{0, nm2m(5)}));
  cfg.ships.push_back(ship("T", false, {0, 1000}, 0, 0));
  RuleCore core;
  const SimulationLog log = run(cfg, core);
  const Metrics m = compute_metrics(log);
  REQUIRE(m.min_distance_m.count("OS-T"));
  CHECK_THAT(m.min_distance_m.at("OS-T"), Catch::Matchers::WithinAbs(1000.0, 1e-9));
  CHECK_FALSE(m.goal_reached);

  // a zone appearing on top of the own ship counts as an incursion on the
  // actual track, whatever the validator decides afterwards
  ScenarioConfig zcfg = base_config();
  zcfg.duration = 600.0;
  zcfg.ships.push_back(ship("OS", true, {0, 0}, 0, 10, LocalPoint{0, nm2m(5)}));
  Event e;
  e.at = 200.0;  // OS is near y = 1029 m by then
  e.kind = Event::Kind::ZoneAppears;
  e.zone.id = "Z";
  e.zone.polygon = {{-500, 800}, {500, 800}, {500, 1600}, {-500, 1600}};
  zcfg.events.push_back(e);
  RuleCore zcore;
  const Metrics zm = compute_metrics(run(zcfg, zcore));
  CHECK(zm.zone_incursions == 1);
}

TEST_CASE("head-on flag is compliant when the first give-way turn is starboard") {
  ScenarioConfig cfg = base_config();
  cfg.ships.push_back(ship("OS", true, {0, 0}, 0, 10, LocalPoint{0, nm2m(6)}));
  cfg.ships.push_back(ship("T", false, {0, nm2m(4)}, 180, 10));
  RuleCore core;
  const SimulationLog log = run(cfg, core);
  const Metrics m = compute_metrics(log);
  REQUIRE(m.colregs_flags.count("head_on_give_way_starboard"));
  CHECK(m.colregs_flags.at("head_on_give_way_starboard") == "compliant");
}

TEST_CASE("track and distance tables are consistent with the log") {
  ScenarioConfig cfg = base_config();
  cfg.duration = 60.0;
  cfg.ships.push_back(ship("OS", true, {0, 0}, 0, 8, LocalPoint{0, nm2m(5)}));
  cfg.ships.push_back(ship("T", false, {0, 1852}, 0, 8));
  RuleCore core;
  const SimulationLog log = run(cfg, core);

  const std::string track = track_csv(log);
  CHECK(track.find("t,ship,x_m,y_m,heading_deg,speed_kn,rudder_deg\n") == 0);
  // one line per ship per step plus header
  const std::size_t lines = std::count(track.begin(), track.end(), '\n');
  CHECK(lines == log.steps.size() * 2 + 1);

  const std::string dist = distances_csv(log);
  CHECK(dist.find("t,OS-T\n") == 0);
  CHECK(std::count(dist.begin(), dist.end(), '\n') == log.steps.size() + 1);
}
