// SPDX-License-Identifier: Apache-2.0
#include <catch2/catch_amalgamated.hpp>
#include <random>

#include "navsim/kinematics.hpp"

using namespace navsim;

namespace {

// independent brute-force CPA search: straight-line extrapolation sampled at
// fixed dt, tcpa from the +-window minimizer, dcpa from the forward window
struct BruteCpa {
  double dcpa;
  double tcpa;
};

BruteCpa brute_force_cpa(const LocalPoint& po, const Velocity& vo,
                         const LocalPoint& pt, const Velocity& vt,
                         double window_s = 7200.0, double dt = 0.1) {
  const double rx = pt.x - po.x, ry = pt.y - po.y;
  const double vx = vt.sog * std::sin(vt.cog) - vo.sog * std::sin(vo.cog);
  const double vy = vt.sog * std::cos(vt.cog) - vo.sog * std::cos(vo.cog);

  double best_t = -window_s, best_d = std::numeric_limits<double>::infinity();
  double best_fwd = std::numeric_limits<double>::infinity();
  for (double t = -window_s; t <= window_s; t += dt) {
    const double d = std::hypot(rx + vx * t, ry + vy * t);
    if (d < best_d) {
      best_d = d;
      best_t = t;
    }
    if (t >= 0.0 && d < best_fwd) best_fwd = d;
  }
  return {best_fwd, best_t};
}

}  // namespace

TEST_CASE("projection maps the origin to (0,0)") {
  const GeoPosition o{122.445374, 31.257936};
  const LocalPoint p = project(o, o);
  CHECK(p.x == 0.0);
  CHECK(p.y == 0.0);
}

TEST_CASE("projection scales latitude at the documented Earth radius") {
  const GeoPosition o{122.445374, 31.257936};
  const LocalPoint p = project(o, {122.445374, 31.307936});
  CHECK_THAT(p.x, Catch::Matchers::WithinAbs(0.0, 1e-9));
  CHECK_THAT(p.y, Catch::Matchers::WithinAbs(5559.75, 0.01));
}

TEST_CASE("projection round-trips within 1e-9 degrees") {
  const GeoPosition o{122.445374, 31.257936};
  std::mt19937_64 eng(7);
  auto u = [&](double lo, double hi) {
    return lo + (hi - lo) * (double(eng() >> 11) / 9007199254740992.0);
  };
  for (int i = 0; i < 200; ++i) {
    const GeoPosition p{o.lon + u(-0.9, 0.9), o.lat + u(-0.9, 0.9)};
    const GeoPosition back = unproject(o, project(o, p));
    CHECK_THAT(back.lon, Catch::Matchers::WithinAbs(p.lon, 1e-9));
    CHECK_THAT(back.lat, Catch::Matchers::WithinAbs(p.lat, 1e-9));
  }
}

TEST_CASE("projection rejects points outside the validity window") {
  const GeoPosition o{122.0, 31.0};
  CHECK_THROWS_AS(project(o, {123.5, 31.0}), std::range_error);
  CHECK_THROWS_AS(project(o, {122.0, 32.5}), std::range_error);
}

TEST_CASE("relative bearing follows the clockwise-from-bow convention") {
  const LocalPoint own{0, 0};
  CHECK_THAT(relative_bearing(0.0, own, {0, 100}),
             Catch::Matchers::WithinAbs(0.0, 1e-12));
  CHECK_THAT(relative_bearing(0.0, own, {100, 0}),
             Catch::Matchers::WithinAbs(kPi / 2, 1e-12));
  // heading east, target due north: three quarters round
  CHECK_THAT(relative_bearing(kPi / 2, own, {0, 100}),
             Catch::Matchers::WithinAbs(3 * kPi / 2, 1e-12));
}

TEST_CASE("relative bearing rejects coincident positions") {
  CHECK_THROWS_AS(relative_bearing(0.0, {5, 5}, {5, 5}), std::domain_error);
}

TEST_CASE("cpa: reciprocal collision course") {
  // closing speed 20 kn, 3704 m apart -> tcpa 360 s, dcpa 0
  const CpaResult r = cpa({0, 0}, {knots2mps(10), 0.0}, {0, 3704}, {knots2mps(10), kPi});
  CHECK_THAT(r.tcpa, Catch::Matchers::WithinAbs(360.0, 0.1));
  CHECK_THAT(r.dcpa, Catch::Matchers::WithinAbs(0.0, 1e-6));
  CHECK_THAT(r.range, Catch::Matchers::WithinAbs(3704.0, 1e-9));
}

TEST_CASE("cpa: co-moving ships use the zero-relative-velocity convention") {
  const CpaResult r = cpa({0, 0}, {5.0, 1.0}, {1000, 0}, {5.0, 1.0});
  CHECK(r.tcpa == 0.0);
  CHECK(r.dcpa == 1000.0);
}

TEST_CASE("cpa matches the brute-force search on random pairs") {
  std::mt19937_64 eng(42);
  auto u = [&](double lo, double hi) {
    return lo + (hi - lo) * (double(eng() >> 11) / 9007199254740992.0);
  };
  int checked = 0;
  while (checked < 100) {
    const LocalPoint po{u(-5000, 5000), u(-5000, 5000)};
    const LocalPoint pt{u(-5000, 5000), u(-5000, 5000)};
    const Velocity vo{u(0, knots2mps(15)), u(0, kTwoPi)};
    const Velocity vt{u(0, knots2mps(15)), u(0, kTwoPi)};
    const CpaResult closed = cpa(po, vo, pt, vt);
    if (std::abs(closed.tcpa) > 7000.0) continue;  // outside the oracle window
    const BruteCpa brute = brute_force_cpa(po, vo, pt, vt);
    CHECK_THAT(closed.dcpa, Catch::Matchers::WithinAbs(brute.dcpa, 1.0));
    CHECK_THAT(closed.tcpa, Catch::Matchers::WithinAbs(brute.tcpa, 0.2));
    ++checked;
  }
}

TEST_CASE("cpa invariants: dcpa <= range, pair symmetry, frame invariance") {
  std::mt19937_64 eng(99);
  auto u = [&](double lo, double hi) {
    return lo + (hi - lo) * (double(eng() >> 11) / 9007199254740992.0);
  };
  for (int i = 0; i < 500; ++i) {
    const LocalPoint po{u(-9000, 9000), u(-9000, 9000)};
    const LocalPoint pt{u(-9000, 9000), u(-9000, 9000)};
    const Velocity vo{u(0, 10), u(0, kTwoPi)};
    const Velocity vt{u(0, 10), u(0, kTwoPi)};

    const CpaResult ab = cpa(po, vo, pt, vt);
    CHECK(ab.dcpa <= ab.range + 1e-9);
    if (ab.tcpa <= 0.0) CHECK(ab.dcpa == ab.range);

    const CpaResult ba = cpa(pt, vt, po, vo);
    CHECK_THAT(ba.dcpa, Catch::Matchers::WithinAbs(ab.dcpa, 1e-6));
    CHECK_THAT(ba.tcpa, Catch::Matchers::WithinAbs(ab.tcpa, 1e-6));

    // translate both ships and rotate the frame
    const double dx = u(-1e4, 1e4), dy = u(-1e4, 1e4), rot = u(0, kTwoPi);
    auto move = [&](LocalPoint p) {
      const LocalPoint q{p.x + dx, p.y + dy};
      return LocalPoint{q.x * std::cos(rot) + q.y * std::sin(rot),
                        -q.x * std::sin(rot) + q.y * std::cos(rot)};
    };
    const CpaResult moved = cpa(move(po), {vo.sog, wrap_two_pi(vo.cog + rot)},
                                move(pt), {vt.sog, wrap_two_pi(vt.cog + rot)});
    const double scale = std::max(1.0, ab.range);
    CHECK_THAT(moved.dcpa, Catch::Matchers::WithinAbs(ab.dcpa, 1e-9 * scale + 1e-7));
    CHECK_THAT(moved.range, Catch::Matchers::WithinAbs(ab.range, 1e-9 * scale + 1e-7));
    if (std::abs(ab.tcpa) < 1e6)
      CHECK_THAT(moved.tcpa,
                 Catch::Matchers::WithinAbs(ab.tcpa, 1e-9 * std::abs(ab.tcpa) + 1e-5));
  }
}

TEST_CASE("point_in_polygon basic containment") {
  const std::vector<LocalPoint> box{{0, 0}, {100, 0}, {100, 100}, {0, 100}};
  CHECK(point_in_polygon({50, 50}, box));
  CHECK_FALSE(point_in_polygon({150, 50}, box));
  CHECK_FALSE(point_in_polygon({-1, 50}, box));
}
