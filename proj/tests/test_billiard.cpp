#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "abil/billiard.hpp"
#include "abil/geometry.hpp"

using namespace abil;

namespace {

PolygonTableQ unit_square_q() {
  return validate_polygon<Rational>({{Rational(0), Rational(0)},
                                     {Rational(1), Rational(0)},
                                     {Rational(1), Rational(1)},
                                     {Rational(0), Rational(1)}});
}

PolygonTableD unit_square_d() {
  return validate_polygon<double>({{0.0, 0.0}, {1.0, 0.0}, {1.0, 1.0}, {0.0, 1.0}});
}

}  // namespace

TEST_CASE("single specular step on the square") {
  auto sq = unit_square_d();
  auto out = collision_step<double>(sq, {{0.25, 0.5}, unit_vec(kPi / 4)});
  auto* step = std::get_if<detail::StepResult<double>>(&out);
  REQUIRE(step != nullptr);
  CHECK(step->event.side == 2);  // top wall
  CHECK(step->event.point.x == doctest::Approx(0.75));
  CHECK(step->event.point.y == doctest::Approx(1.0));
  CHECK(step->event.tau == doctest::Approx(0.5 * std::sqrt(2.0)));
  CHECK(step->next.dir.x == doctest::Approx(std::sqrt(0.5)));
  CHECK(step->next.dir.y == doctest::Approx(-std::sqrt(0.5)));
}

TEST_CASE("vertical chord is period two") {
  auto sq = unit_square_d();
  Orbit<double> orbit = abil::orbit(sq, {{0.5, 0.5}, {0.0, 1.0}}, 64);
  CHECK(orbit.termination == Termination::Periodic);
  CHECK(orbit.events.size() == 2);
  CHECK(orbit.events[0].kind == EventKind::Specular);
  CHECK(orbit.events[1].kind == EventKind::Specular);
  CHECK(orbit.period_events == 2);
  CHECK(orbit.period_length == doctest::Approx(2.0));
}

TEST_CASE("45-degree diamond is period four") {
  auto sq = unit_square_q();
  Orbit<Rational> orbit = abil::orbit<Rational>(
      sq, {{Rational(1, 2), Rational(0)}, {Rational(1), Rational(1)}}, 64);
  CHECK(orbit.termination == Termination::Periodic);
  CHECK(orbit.period_events == 4);
  CHECK(orbit.period_param == Rational(2));  // ray parameter; arclength 2*sqrt(2)
}

TEST_CASE("corner shot terminates singular") {
  auto sq = unit_square_d();
  Orbit<double> orbit = abil::orbit(sq, {{0.25, 0.25}, unit_vec(kPi / 4)}, 64);
  // First bounce lands exactly on the (1,1) corner.
  CHECK(orbit.termination == Termination::Singular);
  REQUIRE(orbit.singularity.has_value());
  CHECK(orbit.singularity->kind == SingularKind::CornerHit);
  CHECK(orbit.singularity->where.x == doctest::Approx(1.0));
  CHECK(orbit.singularity->where.y == doctest::Approx(1.0));
}

TEST_CASE("exact slope-3 orbit revisits its start") {
  // From (1/3, 2/5) with direction (1, 3): rational data stays rational
  // and the orbit closes exactly.
  auto sq = unit_square_q();
  Orbit<Rational> orbit = abil::orbit<Rational>(
      sq, {{Rational(1, 3), Rational(2, 5)}, {Rational(1), Rational(3)}}, 4096);
  CHECK(orbit.termination == Termination::Periodic);
  CHECK(orbit.period_param == Rational(2));  // unfolds to (2, 6) in two x-periods
  for (const auto& e : orbit.events) {
    CHECK(e.kind == EventKind::Specular);
    CHECK(e.parity_after == +1);
  }
}

TEST_CASE("flow composes with steps") {
  auto sq = unit_square_d();
  PhasePoint<double> p{{0.3, 0.4}, unit_vec(0.7)};
  auto end = flow(sq, p, 3.7);
  auto* q = std::get_if<PhasePoint<double>>(&end);
  REQUIRE(q != nullptr);
  // Negative time runs the reversed dynamics back to the start.
  auto back = flow(sq, *q, -3.7);
  auto* r = std::get_if<PhasePoint<double>>(&back);
  REQUIRE(r != nullptr);
  CHECK(r->pos.x == doctest::Approx(0.3).epsilon(1e-12));
  CHECK(r->pos.y == doctest::Approx(0.4).epsilon(1e-12));
  CHECK(r->dir.x == doctest::Approx(std::cos(0.7)));
  CHECK(r->dir.y == doctest::Approx(std::sin(0.7)));
}

TEST_CASE("grazing shot along a wall is singular") {
  auto sq = unit_square_d();
  auto out = collision_step<double>(sq, {{0.5, 0.0}, {1.0, 0.0}});
  CHECK(std::get_if<detail::StepResult<double>>(&out) == nullptr);
}

TEST_CASE("orbits are reproducible") {
  auto sq = unit_square_d();
  Orbit<double> a = abil::orbit(sq, {{0.31, 0.17}, unit_vec(1.234)}, 500);
  Orbit<double> b = abil::orbit(sq, {{0.31, 0.17}, unit_vec(1.234)}, 500);
  REQUIRE(a.events.size() == b.events.size());
  for (std::size_t i = 0; i < a.events.size(); ++i) {
    CHECK(a.events[i].side == b.events[i].side);
    CHECK(to_double(a.events[i].point.x) == to_double(b.events[i].point.x));
    CHECK(a.events[i].r == b.events[i].r);
  }
}
