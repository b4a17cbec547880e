#include <doctest.h>

#include "bohm/nodes.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

using namespace bohm;

namespace {

SuperpositionSpec typical_state() {
  SuperpositionSpec s;
  s.modes = {{3, 3}, {3, 4}, {4, 5}};
  s.coefficients = {1.0, 1.0, std::numbers::sqrt2 / 2.0};
  s.params = {1.0, std::numbers::sqrt2 / 2.0};
  return s;
}

const NodeTrack& by_id(const std::vector<NodeTrack>& tracks, int id) {
  for (const auto& tr : tracks)
    if (tr.id == id) return tr;
  REQUIRE(false);
  return tracks.front();
}

}  // namespace

TEST_CASE("classification of the typical state") {
  const auto spec = typical_state();
  const StructureClass sc = classify(spec);
  CHECK(sc.tag == StructureTag::TwoEqualM);
  REQUIRE(sc.fixed_x_roots.size() == 3);   // H_3 roots
  REQUIRE(sc.fixed_y_roots.size() == 5);   // H_3 H_4 sin-combination roots
  // Closed forms: x in {0, +-sqrt(3/2)}; y^2 in {0, (5 -+ sqrt10)/2} / omega2.
  const double w2 = spec.params.omega2;
  CHECK(sc.fixed_x_roots[1] == doctest::Approx(0.0).epsilon(1e-12).scale(1.0));
  CHECK(sc.fixed_x_roots[2] == doctest::Approx(std::sqrt(1.5)).epsilon(1e-12));
  const double y1 = std::sqrt((5 - std::sqrt(10.0)) / 2) / std::sqrt(w2);
  const double y2 = std::sqrt((5 + std::sqrt(10.0)) / 2) / std::sqrt(w2);
  CHECK(sc.fixed_y_roots[0] == doctest::Approx(-y2).epsilon(1e-12));
  CHECK(sc.fixed_y_roots[1] == doctest::Approx(-y1).epsilon(1e-12));
  CHECK(sc.fixed_y_roots[2] == doctest::Approx(0.0).epsilon(1e-12).scale(1.0));
  CHECK(sc.fixed_y_roots[3] == doctest::Approx(y1).epsilon(1e-12));
  CHECK(sc.fixed_y_roots[4] == doctest::Approx(y2).epsilon(1e-12));
  CHECK(fixed_nodes(spec).size() == 15);
}

TEST_CASE("classification handles the swapped-axis structure") {
  SuperpositionSpec s = typical_state();
  for (auto& m : s.modes) std::swap(m.m, m.n);
  std::swap(s.params.omega1, s.params.omega2);
  const StructureClass sc = classify(s);
  CHECK(sc.tag == StructureTag::TwoEqualN);
  CHECK(fixed_nodes(s).size() == 15);
  // Mirror of the TwoEqualM grid.
  const auto ref = classify(typical_state());
  REQUIRE(sc.fixed_y_roots.size() == ref.fixed_x_roots.size());
  for (size_t i = 0; i < sc.fixed_y_roots.size(); ++i)
    CHECK(sc.fixed_y_roots[i] == doctest::Approx(ref.fixed_x_roots[i]).epsilon(1e-12).scale(1.0));
}

TEST_CASE("fixed nodes are genuine zeros at arbitrary times") {
  const auto spec = typical_state();
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> ut(0.05, 3.0);
  for (const auto& n : fixed_nodes(spec))
    for (int k = 0; k < 3; ++k) {
      const double t = ut(rng);
      CHECK(std::abs(eval_field(spec, n.x, n.y, t).psi) < 1e-10);
    }
}

TEST_CASE("moving nodes at t = 0.1: census and reference positions") {
  const auto spec = typical_state();
  const auto moving = solve_moving_nodes(spec, 0.1);
  CHECK(moving.size() == 16);
  // Total census 15 + 16 = 31.
  CHECK(moving.size() + fixed_nodes(spec).size() == 31);
  // Every reported point is a zero of psi.
  for (const auto& n : moving) CHECK(std::abs(eval_field(spec, n.x, n.y, 0.1).psi) < 1e-8);
  // Reference positions: one node near (1.2544, -1.1264), its far partner
  // in the same row near x = -16.28.
  bool found20 = false, found21 = false;
  for (const auto& n : moving) {
    if (std::abs(n.x - 1.2544) < 2e-2 && std::abs(n.y + 1.1264) < 2e-2) found20 = true;
    if (n.x < -16.0 && n.x > -16.5 && std::abs(n.y + 1.1264) < 2e-2) found21 = true;
  }
  CHECK(found20);
  CHECK(found21);
}

TEST_CASE("analytic solver matches the grid-scan oracle") {
  const auto spec = typical_state();
  const Rect box{-5, 5, -5, 5};
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> ut(0.11, 1.4);
  for (int trial = 0; trial < 4; ++trial) {
    const double t = ut(rng);
    const auto scanned = grid_scan_nodes(spec, t, box, 250);
    std::vector<Vec2> analytic;
    for (const auto& n : fixed_nodes(spec)) analytic.push_back(n.pos());
    for (const auto& n : solve_moving_nodes(spec, t)) analytic.push_back(n.pos());
    std::erase_if(analytic, [&](Vec2 p) { return !box.contains(p); });
    REQUIRE(scanned.size() == analytic.size());
    for (const auto& p : scanned) {
      double best = 1e300;
      for (const auto& q : analytic) best = std::min(best, dist(p, q));
      CHECK(best < 1e-6);
    }
  }
}

TEST_CASE("degenerate instants are reported, not silently mis-solved") {
  // At t = 0 both phase differences vanish: the y-equation is an identity.
  CHECK_THROWS_AS(solve_moving_nodes(typical_state(), 0.0), DegenerateTime);
}

TEST_CASE("tracking over [0.1, 2.5] reproduces the event structure") {
  const auto spec = typical_state();
  const double tstar = std::numbers::pi / (1.0 + std::numbers::sqrt2 / 2.0);
  const auto tracks = track_nodes(spec, 0.1, 2.5, 0.01);
  REQUIRE(tracks.size() == 31);
  int fixed = 0;
  for (const auto& tr : tracks) fixed += (tr.kind == NodeKind::Fixed);
  CHECK(fixed == 15);

  // Frame labeling: node 17 is the fixed node at (sqrt(3/2), 0).
  const auto& n17 = by_id(tracks, 17);
  CHECK(n17.kind == NodeKind::Fixed);
  CHECK(n17.samples.front().x == doctest::Approx(std::sqrt(1.5)).epsilon(1e-9));
  CHECK(std::abs(n17.samples.front().y) < 1e-12);

  // Node 20 starts near (1.2544, -1.1264) and collides with fixed node 17
  // at t* = pi / (1 + omega2).
  const auto& n20 = by_id(tracks, 20);
  CHECK(n20.kind == NodeKind::Moving);
  CHECK(n20.samples.front().x == doctest::Approx(1.2544).epsilon(2e-2));
  CHECK(n20.samples.front().y == doctest::Approx(-1.1264).epsilon(2e-2));
  REQUIRE(!n20.events.empty());
  const auto& ev = n20.events.front();
  CHECK(ev.kind == EventKind::CollisionWithFixed);
  CHECK(ev.partner_fixed_id == 17);
  CHECK(ev.t == doctest::Approx(tstar).epsilon(1e-6));

  // The far node of the same row escapes to infinity at the same instant
  // and reappears once the sine factor flips sign.
  const auto& n21 = by_id(tracks, 21);
  bool escaped = false, reappeared = false;
  for (const auto& e : n21.events) {
    if (e.kind == EventKind::EscapeToInfinity &&
        std::abs(e.t - tstar) < 1e-6)
      escaped = true;
    if (e.kind == EventKind::Reappearance && e.t > tstar) reappeared = true;
  }
  CHECK(escaped);
  CHECK(reappeared);

  // Secondary collision: the top row hits fixed nodes 1-3 at t = 1.47551.
  int top_collisions = 0;
  for (int id : {5, 6, 7})
    for (const auto& e : by_id(tracks, id).events)
      if (e.kind == EventKind::CollisionWithFixed && std::abs(e.t - 1.47551) < 2e-2)
        ++top_collisions;
  CHECK(top_collisions == 3);

  // position_at: defined while active, nullopt while escaped.
  CHECK(n21.position_at(0.5).has_value());
  CHECK(!n21.position_at(tstar + 0.02).has_value());
}

TEST_CASE("track samples stay on the nodal set") {
  const auto spec = typical_state();
  const auto tracks = track_nodes(spec, 0.1, 1.0, 0.02);
  for (const auto& tr : tracks)
    for (size_t i = 0; i < tr.samples.size(); i += 17) {
      const auto& s = tr.samples[i];
      if (s.status != NodeStatus::Active) continue;
      CHECK(std::abs(eval_field(spec, s.x, s.y, s.t).psi) < 1e-7);
    }
}
