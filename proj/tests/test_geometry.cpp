#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

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

TEST_CASE("polygon validation normalizes and rejects") {
  SUBCASE("collinear junctions merge silently") {
    auto t = validate_polygon<double>(
        {{0.0, 0.0}, {0.5, 0.0}, {1.0, 0.0}, {1.0, 1.0}, {0.0, 1.0}});
    CHECK(t.vertices.size() == 4);
    CHECK(t.sides[0].length == doctest::Approx(1.0));
  }
  SUBCASE("clockwise input comes out counterclockwise") {
    auto t = validate_polygon<double>({{0.0, 0.0}, {0.0, 1.0}, {1.0, 1.0}, {1.0, 0.0}});
    double area2 = 0.0;
    for (std::size_t i = 0; i < t.vertices.size(); ++i) {
      area2 += to_double(cross(t.vertices[i], t.vertices[(i + 1) % t.vertices.size()]));
    }
    CHECK(area2 == doctest::Approx(2.0));
  }
  SUBCASE("spike vertex rejected") {
    CHECK_THROWS_AS(
        validate_polygon<double>({{0.0, 0.0}, {2.0, 0.0}, {1.0, 0.0}, {1.0, 1.0}}),
        ValidationError);
  }
  SUBCASE("self-intersection rejected") {
    CHECK_THROWS_AS(
        validate_polygon<Rational>({{Rational(0), Rational(0)},
                                    {Rational(2), Rational(2)},
                                    {Rational(2), Rational(0)},
                                    {Rational(0), Rational(2)}}),
        ValidationError);
  }
  SUBCASE("too few vertices rejected") {
    CHECK_THROWS_AS(validate_polygon<double>({{0.0, 0.0}, {1.0, 0.0}}), ValidationError);
  }
  SUBCASE("repeated closing vertex tolerated") {
    auto t = validate_polygon<double>(
        {{0.0, 0.0}, {1.0, 0.0}, {1.0, 1.0}, {0.0, 1.0}, {0.0, 0.0}});
    CHECK(t.vertices.size() == 4);
  }
}

TEST_CASE("sides carry tangent, normal, and inclination") {
  auto sq = unit_square_d();
  REQUIRE(sq.sides.size() == 4);
  // Side 0 is the bottom, oriented +x; inward normal +y.
  CHECK(sq.sides[0].u.x == doctest::Approx(1.0));
  CHECK(sq.sides[0].n.y == doctest::Approx(1.0));
  CHECK(sq.sides[0].inclination == doctest::Approx(0.0));
  // Side 1 is the right, vertical.
  CHECK(sq.sides[1].is_vertical(1e-12));
  CHECK(sq.sides[1].inclination == doctest::Approx(kPi / 2));
  CHECK(sq.sides[1].n.x == doctest::Approx(-1.0));
  double perimeter = 0.0;
  for (const auto& side : sq.sides) perimeter += side.length;
  CHECK(perimeter == doctest::Approx(4.0));
}

TEST_CASE("chart angle conventions") {
  auto sq = unit_square_d();
  const auto& bottom = sq.sides[0];
  // Outgoing straight up the inward normal: phi = 0.
  CHECK(phi_of_outgoing(bottom, {0.0, 1.0}) == doctest::Approx(0.0));
  // Tilted toward the tangent (+x): positive phi.
  double phi = phi_of_outgoing(bottom, unit_vec(kPi / 3));
  CHECK(phi == doctest::Approx(kPi / 6));
  // Incoming is charted through its reversal.
  CHECK(phi_of_incoming(bottom, {0.0, -1.0}) == doctest::Approx(0.0));
  CHECK(phi_of_incoming(bottom, unit_vec(-kPi / 3)) == doctest::Approx(-kPi / 6).epsilon(1e-12));
}

TEST_CASE("specular reflection about a side") {
  Vec2d d{1.0, -1.0};
  Vec2d horizontal{1.0, 0.0};
  Vec2d r = reflect_dir(d, horizontal);
  CHECK(r.x == doctest::Approx(1.0));
  CHECK(r.y == doctest::Approx(1.0));

  // Exact mode: reflect (3, -1) off the diagonal x = y.
  Vec2q rq = reflect_dir<Rational>({Rational(3), Rational(-1)}, {Rational(1), Rational(1)});
  CHECK(rq.x == Rational(-1));
  CHECK(rq.y == Rational(3));
}

TEST_CASE("ray casting finds the first wall") {
  auto sq = unit_square_q();
  SUBCASE("interior ray hits the right side") {
    auto out = ray_cast<Rational>(sq, {Rational(1, 2), Rational(1, 2)},
                                  {Rational(2), Rational(1)});
    auto* hit = std::get_if<RayHit<Rational>>(&out);
    REQUIRE(hit != nullptr);
    CHECK(hit->side == 1);
    CHECK(hit->point.x == Rational(1));
    CHECK(hit->point.y == Rational(3, 4));
    CHECK(hit->t == Rational(1, 4));
    CHECK(hit->s_param == Rational(3, 4));
  }
  SUBCASE("corner hit is singular") {
    auto out = ray_cast<Rational>(sq, {Rational(1, 2), Rational(1, 2)},
                                  {Rational(1), Rational(1)});
    CHECK(std::get_if<RayHit<Rational>>(&out) == nullptr);
  }
}

TEST_CASE("containment is closed") {
  auto sq = unit_square_q();
  CHECK(contains(sq, {Rational(1, 2), Rational(1, 2)}));
  CHECK(contains(sq, {Rational(1), Rational(1, 2)}));   // boundary
  CHECK(contains(sq, {Rational(0), Rational(0)}));      // vertex
  CHECK(!contains(sq, {Rational(2), Rational(1, 2)}));
  CHECK(!contains(sq, {Rational(1, 2), Rational(-1, 100)}));

  // A nonconvex table: point in the notch cavity of an L-shape.
  auto ell = validate_polygon<Rational>({{Rational(0), Rational(0)},
                                         {Rational(2), Rational(0)},
                                         {Rational(2), Rational(1)},
                                         {Rational(1), Rational(1)},
                                         {Rational(1), Rational(2)},
                                         {Rational(0), Rational(2)}});
  CHECK(contains(ell, {Rational(1, 2), Rational(3, 2)}));
  CHECK(!contains(ell, {Rational(3, 2), Rational(3, 2)}));
}

TEST_CASE("rational literals round-trip") {
  CHECK(rational_from_string("3/4") == Rational(3, 4));
  CHECK(rational_from_string("-6/8") == Rational(-3, 4));
  CHECK(rational_from_string("7") == Rational(7));
  CHECK(rational_to_string(Rational(3, 4)) == "3/4");
  CHECK(rational_to_string(Rational(5)) == "5");
  CHECK_THROWS_AS(rational_from_string("1/0"), std::invalid_argument);
  CHECK_THROWS_AS(rational_from_string("x"), std::invalid_argument);
}

TEST_CASE("angle differences wrap") {
  CHECK(angle_diff(0.1, kTwoPi - 0.1) == doctest::Approx(0.2));
  CHECK(angle_diff(kTwoPi - 0.1, 0.1) == doctest::Approx(-0.2));
  CHECK(angle_diff(1.0, 1.0) == doctest::Approx(0.0));
}
