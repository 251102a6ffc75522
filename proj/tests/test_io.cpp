#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <string>

#include "abil/render.hpp"
#include "abil/table_io.hpp"

using namespace abil;
using namespace abil::io;

namespace {

TableFile square_file(ScalarMode mode) {
  TableFile tf;
  tf.mode = mode;
  tf.vertices = {{Rational(0), Rational(0)},
                 {Rational(1), Rational(0)},
                 {Rational(1), Rational(1)},
                 {Rational(0), Rational(1)}};
  tf.andreev_sides = {1};
  return tf;
}

TableIoError code_of(const std::string& text) {
  try {
    parse_table_file(text);
  } catch (const TableIoFailure& e) {
    return e.code();
  }
  FAIL("expected TableIoFailure");
  return TableIoError::Parse;
}

}  // namespace

TEST_CASE("serialization is canonical and stable") {
  const std::string want =
      "{\n"
      "  \"andreev_sides\": [\n"
      "    1\n"
      "  ],\n"
      "  \"format_version\": 1,\n"
      "  \"mode\": \"float64\",\n"
      "  \"vertices\": [\n"
      "    [\n"
      "      0.0,\n"
      "      0.0\n"
      "    ],\n"
      "    [\n"
      "      1.0,\n"
      "      0.0\n"
      "    ],\n"
      "    [\n"
      "      1.0,\n"
      "      1.0\n"
      "    ],\n"
      "    [\n"
      "      0.0,\n"
      "      1.0\n"
      "    ]\n"
      "  ]\n"
      "}\n";
  CHECK(serialize_table_file(square_file(ScalarMode::Float64)) == want);
}

TEST_CASE("round trips preserve everything") {
  SUBCASE("float64 mode") {
    TableFile tf = square_file(ScalarMode::Float64);
    TableFile back = parse_table_file(serialize_table_file(tf));
    CHECK(back.vertices == tf.vertices);
    CHECK(back.andreev_sides == tf.andreev_sides);
    CHECK(back.mode == ScalarMode::Float64);
    CHECK(serialize_table_file(back) == serialize_table_file(tf));
  }
  SUBCASE("rational mode with non-binary coordinates") {
    TableFile tf = square_file(ScalarMode::Rational);
    tf.vertices[1].x = Rational(10, 3);
    tf.vertices[2].x = Rational(10, 3);
    TableFile back = parse_table_file(serialize_table_file(tf));
    CHECK(back.vertices[1].x == Rational(10, 3));  // exact through the file
    CHECK(serialize_table_file(back) == serialize_table_file(tf));
  }
  SUBCASE("number and string coordinate encodings are interchangeable") {
    TableFile a = parse_table_file(
        R"({"andreev_sides":[],"format_version":1,"mode":"rational",
            "vertices":[[0,0],["1",0],[1,"1"],[0,1]]})");
    CHECK(a.vertices[1].x == Rational(1));
    CHECK(a.vertices[2].y == Rational(1));
  }
  SUBCASE("files on disk") {
    std::string path = "/tmp/abil_test_table_io.json";
    TableFile tf = square_file(ScalarMode::Rational);
    save_table_file(tf, path);
    TableFile back = load_table_file(path);
    CHECK(serialize_table_file(back) == serialize_table_file(tf));
    std::remove(path.c_str());
  }
}

TEST_CASE("runtime tables come out of the file in both precisions") {
  TableFile tf = square_file(ScalarMode::Rational);
  AndreevTableQ tq = tf.to_table_q();
  CHECK(tq.is_andreev == std::vector<bool>{false, true, false, false});
  CHECK(tq.mirror_axis_x == Rational(1));
  AndreevTableD td = tf.to_table_d();
  CHECK(td.polygon.vertices[2].x == 1.0);
  CHECK(td.andreev_sides == std::vector<std::size_t>{1});
}

TEST_CASE("malformed inputs carry precise error codes") {
  CHECK(code_of("{") == TableIoError::Parse);
  CHECK(code_of("[1,2]") == TableIoError::Parse);
  CHECK(code_of(R"({"format_version":1,"mode":"float64",
                    "vertices":[[0,0],[1,0],[1,1]],"andreev_sides":[],"extra":0})") ==
        TableIoError::Parse);
  CHECK(code_of(R"({"format_version":2,"mode":"float64",
                    "vertices":[[0,0],[1,0],[1,1]],"andreev_sides":[]})") ==
        TableIoError::Version);
  CHECK(code_of(R"({"format_version":1,"mode":"exact",
                    "vertices":[[0,0],[1,0],[1,1]],"andreev_sides":[]})") ==
        TableIoError::Mode);
  CHECK(code_of(R"({"format_version":1,"mode":"rational",
                    "vertices":[[0,0],["1/0",0],[1,1]],"andreev_sides":[]})") ==
        TableIoError::Vertices);
  CHECK(code_of(R"({"format_version":1,"mode":"rational",
                    "vertices":[[0,0],["0.5",0],[1,1]],"andreev_sides":[]})") ==
        TableIoError::Vertices);
  CHECK(code_of(R"({"format_version":1,"mode":"float64",
                    "vertices":[[0,0],[1,1],[1,0],[0,1]],"andreev_sides":[]})") ==
        TableIoError::Vertices);  // self-intersecting bowtie
  CHECK(code_of(R"({"format_version":1,"mode":"float64",
                    "vertices":[[0,0],[0,1],[1,1],[1,0]],"andreev_sides":[]})") ==
        TableIoError::NotCanonical);  // clockwise
  CHECK(code_of(R"({"format_version":1,"mode":"float64",
                    "vertices":[[0,0],[1,0],[2,0],[2,1],[0,1]],"andreev_sides":[]})") ==
        TableIoError::NotCanonical);  // collinear junction
  CHECK(code_of(R"({"format_version":1,"mode":"float64",
                    "vertices":[[0,0],[1,0],[1,1],[0,1]],"andreev_sides":[7]})") ==
        TableIoError::Sides);
  CHECK(code_of(R"({"format_version":1,"mode":"float64",
                    "vertices":[[0,0],[1,0],[1,1],[0,1]],"andreev_sides":[0]})") ==
        TableIoError::Sides);  // horizontal side marked
}

TEST_CASE("csv documents") {
  TableFile tf = square_file(ScalarMode::Float64);
  AndreevTableD td = tf.to_table_d();

  SUBCASE("axis chord, four rows, parities -1,-1,+1,+1") {
    Orbit<double> orbit = andreev_orbit(td, {{0.5, 0.5}, {1.0, 0.0}, +1}, 100);
    const std::string want =
        "event_index,side,hit_x,hit_y,r,phi,tau,kind,parity_after\r\n"
        "0,1,1,0.5,0.5,0,0.5,andreev,-1\r\n"
        "1,3,0,0.5,0.5,0,1,specular,-1\r\n"
        "2,1,1,0.5,0.5,0,1,andreev,1\r\n"
        "3,3,0,0.5,0.5,0,1,specular,1\r\n";
    CHECK(abil::render::csv_document(orbit) == want);
  }
  SUBCASE("corner orbit ends with a singularity row") {
    Orbit<double> orbit =
        andreev_orbit(td, {{0.25, 0.25}, unit_vec(kPi / 4), +1}, 100);
    std::string csv = abil::render::csv_document(orbit);
    CHECK(orbit.termination == Termination::Singular);
    REQUIRE(orbit.singularity.has_value());
    CHECK(orbit.singularity->where.x == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(orbit.singularity->where.y == doctest::Approx(1.0).epsilon(1e-12));
    // Row shape: index, empty side, x, y, empty r/phi/tau, kind, empty parity.
    CHECK(csv.find("\r\n0,,1,") != std::string::npos);
    CHECK(csv.size() >= 18);
    CHECK(csv.substr(csv.size() - 18) == ",,,,singularity,\r\n");
  }
}

TEST_CASE("svg documents") {
  TableFile tf = square_file(ScalarMode::Float64);
  AndreevTableD td = tf.to_table_d();
  Orbit<double> orbit = andreev_orbit(td, {{0.5, 0.5}, {1.0, 0.0}, +1}, 100);
  std::vector<abil::render::Polyline> lines{
      abil::render::orbit_polyline<double>({0.5, 0.5}, orbit)};
  std::string svg = abil::render::svg_document(td, lines);

  CHECK(svg.find("<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" "
                 "viewBox=\"") != std::string::npos);
  // 5% margin around the unit square.
  CHECK(svg.find("viewBox=\"-0.050000000000000003 -0.050000000000000003 "
                 "1.1000000000000001 1.1000000000000001\"") != std::string::npos);
  // Exactly one path per trajectory, one polygon, one marked side.
  auto count = [&svg](const std::string& needle) {
    std::size_t n = 0;
    for (std::size_t at = svg.find(needle); at != std::string::npos;
         at = svg.find(needle, at + needle.size())) {
      ++n;
    }
    return n;
  };
  CHECK(count("<path ") == 1);
  CHECK(count("<polygon ") == 1);
  CHECK(count("<line ") == 1);
  CHECK(count("</svg>") == 1);
}
