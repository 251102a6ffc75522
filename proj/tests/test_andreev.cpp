#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "abil/andreev.hpp"
#include "abil/rng.hpp"
#include "support/two_copy.hpp"

using namespace abil;

namespace {

AndreevTableQ andreev_square_q() { return twocopy::square_pair<Rational>().folded; }
AndreevTableD andreev_square_d() { return twocopy::square_pair<double>().folded; }

}  // namespace

TEST_CASE("table construction validates marked sides") {
  auto poly = validate_polygon<Rational>(
      {{Rational(0), Rational(0)}, {Rational(1), Rational(0)}, {Rational(1), Rational(1)},
       {Rational(0), Rational(1)}});
  CHECK_THROWS_AS(make_andreev_table<Rational>(poly, {0}), AndreevValidationError);
  CHECK_THROWS_AS(make_andreev_table<Rational>(poly, {4}), AndreevValidationError);
  CHECK_THROWS_AS(make_andreev_table<Rational>(poly, {}), AndreevValidationError);
  auto t = make_andreev_table<Rational>(poly, {1});
  CHECK(t.mirror_axis_x == Rational(1));
  CHECK(t.is_andreev == std::vector<bool>{false, true, false, false});
}

TEST_CASE("retro reflection reverses the ray and flips parity") {
  auto tq = andreev_square_q();
  AndreevPhasePoint<Rational> p{{Rational(1, 3), Rational(2, 5)},
                                {Rational(3), Rational(1)},
                                +1};
  auto out = andreev_step(tq, p);
  auto* step = std::get_if<AndreevStep<Rational>>(&out);
  REQUIRE(step != nullptr);
  CHECK(step->event.side == 1);
  CHECK(step->event.kind == EventKind::Andreev);
  // Outgoing is exactly the reversed incoming.
  CHECK(step->next.dir.x == Rational(-3));
  CHECK(step->next.dir.y == Rational(-1));
  CHECK(step->next.parity == -1);
  // A second leg: the specular left wall keeps the parity. From (1, 28/45)
  // with direction (-3,-1) the left wall x=0 is reached at (0, 13/45)
  // before the bottom; reflection there negates dx.
  auto out2 = andreev_step(tq, step->next, step->event.side);
  auto* step2 = std::get_if<AndreevStep<Rational>>(&out2);
  REQUIRE(step2 != nullptr);
  CHECK(step2->event.kind == EventKind::Specular);
  CHECK(step2->event.side == 3);
  CHECK(step2->next.pos.x == Rational(0));
  CHECK(step2->next.pos.y == Rational(13, 45));
  CHECK(step2->next.parity == -1);
  CHECK(step2->next.dir.x == Rational(3));
  CHECK(step2->next.dir.y == Rational(-1));
}

TEST_CASE("hand-traced axis chord: parities -1,-1,+1,+1") {
  auto td = andreev_square_d();
  Orbit<double> orbit = andreev_orbit(td, {{0.5, 0.5}, {1.0, 0.0}, +1}, 16);
  REQUIRE(orbit.events.size() == 4);
  CHECK(orbit.termination == Termination::Periodic);
  const int want_parity[4] = {-1, -1, +1, +1};
  const EventKind want_kind[4] = {EventKind::Andreev, EventKind::Specular,
                                  EventKind::Andreev, EventKind::Specular};
  for (int i = 0; i < 4; ++i) {
    CHECK(orbit.events[i].parity_after == want_parity[i]);
    CHECK(orbit.events[i].kind == want_kind[i]);
  }
}

TEST_CASE("parity equals (-1)^(retro events) along random orbits") {
  auto td = andreev_square_d();
  CounterRng rng(2024);
  for (int trial = 0; trial < 50; ++trial) {
    AndreevPhasePoint<double> p{{rng.uniform(0.05, 0.95), rng.uniform(0.05, 0.95)},
                                unit_vec(rng.uniform(0.0, kTwoPi)),
                                +1};
    Orbit<double> orbit = andreev_orbit(td, p, 200);
    int hits = 0;
    for (const auto& e : orbit.events) {
      if (e.kind == EventKind::Andreev) ++hits;
      CHECK(e.parity_after == (hits % 2 ? -1 : +1));
    }
  }
}

TEST_CASE("negative-time flow inverts the dynamics") {
  auto td = andreev_square_d();
  AndreevPhasePoint<double> p{{0.3, 0.4}, unit_vec(0.7), +1};
  auto mid = andreev_flow(td, p, 2.9);
  auto* q = std::get_if<AndreevPhasePoint<double>>(&mid);
  REQUIRE(q != nullptr);
  auto back = andreev_flow(td, *q, -2.9);
  auto* r = std::get_if<AndreevPhasePoint<double>>(&back);
  REQUIRE(r != nullptr);
  CHECK(r->pos.x == doctest::Approx(0.3).epsilon(1e-12));
  CHECK(r->pos.y == doctest::Approx(0.4).epsilon(1e-12));
  CHECK(r->parity == +1);
}

TEST_CASE("two-copy view round-trips") {
  auto td = andreev_square_d();
  AndreevPhasePoint<double> minus{{0.25, 0.7}, unit_vec(2.1), -1};
  TwoCopyPoint<double> view = to_two_copy(td, minus);
  CHECK(view.copy == Copy::Minus);
  CHECK(view.pos.x == doctest::Approx(1.75));
  CHECK(view.dir.x == doctest::Approx(-std::cos(2.1)));
  AndreevPhasePoint<double> back = from_two_copy(td, view);
  CHECK(back.pos.x == doctest::Approx(0.25));
  CHECK(back.parity == -1);
}

TEST_CASE("parity flow matches the hand-rolled glued two-copy flow") {
  SUBCASE("float, square") {
    auto pair = twocopy::square_pair<double>();
    CounterRng rng(7);
    for (int trial = 0; trial < 200; ++trial) {
      AndreevPhasePoint<double> p{{rng.uniform(0.05, 0.95), rng.uniform(0.05, 0.95)},
                                  unit_vec(rng.uniform(0.0, kTwoPi)),
                                  +1};
      double t = rng.uniform(0.1, 6.0);
      auto a = andreev_flow(pair.folded, p, t);
      auto b = twocopy::glued_flow(pair, twocopy::unfold(p, pair.axis), t);
      auto* ap = std::get_if<AndreevPhasePoint<double>>(&a);
      if (!ap || !b) continue;  // rare singular draw: nothing to compare
      AndreevPhasePoint<double> folded = twocopy::fold(*b, pair.axis);
      CHECK(std::fabs(ap->pos.x - folded.pos.x) < 1e-10);
      CHECK(std::fabs(ap->pos.y - folded.pos.y) < 1e-10);
      CHECK(std::fabs(ap->dir.x - folded.dir.x) < 1e-10);
      CHECK(std::fabs(ap->dir.y - folded.dir.y) < 1e-10);
      CHECK(ap->parity == folded.parity);
    }
  }
  SUBCASE("exact, square and triangle") {
    auto sq = twocopy::square_pair<Rational>();
    auto tri = twocopy::triangle_pair<Rational>();
    CounterRng rng(11);
    for (int trial = 0; trial < 40; ++trial) {
      const auto& pair = (trial % 2 == 0) ? sq : tri;
      // Rational position inside both folded tables' common wedge.
      // (Division keeps the values canonical, unlike the 2-arg ctor.)
      Rational x = Rational(1 + rng.next_below(800)) / 1000;  // (0, 0.8]
      Rational y = Rational(1 + rng.next_below(400)) / 1000;  // (0, 0.4]: y < x in the triangle
      if (y > x) std::swap(x, y);
      Rational dx(static_cast<long>(rng.next_below(13)) - 6);
      Rational dy(static_cast<long>(rng.next_below(13)) - 6);
      if (dx == 0 && dy == 0) dx = 1;
      Rational s = Rational(1 + rng.next_below(50)) / 7;
      AndreevPhasePoint<Rational> p{{x, y}, {dx, dy}, +1};
      auto a = andreev_flow_param(pair.folded, p, s);
      auto b = twocopy::glued_flow(pair, twocopy::unfold(p, pair.axis), s);
      auto* ap = std::get_if<AndreevPhasePoint<Rational>>(&a);
      if (!ap || !b) continue;
      if (b->pos.x == pair.axis) continue;  // exact seam instant: fold ambiguous
      AndreevPhasePoint<Rational> folded =
          twocopy::fold<Rational>({b->pos, b->dir}, pair.axis);
      CHECK(ap->pos.x == folded.pos.x);
      CHECK(ap->pos.y == folded.pos.y);
      CHECK(ap->dir.x == folded.dir.x);
      CHECK(ap->dir.y == folded.dir.y);
      CHECK(ap->parity == folded.parity);
    }
  }
}
