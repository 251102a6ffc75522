#include "abil/table_io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace abil::io {

namespace {

using nlohmann::json;

[[noreturn]] void fail(TableIoError code, const std::string& what) {
  throw TableIoFailure(code, what);
}

Rational coord_from_json(const json& j) {
  if (j.is_string()) {
    try {
      return rational_from_string(j.get<std::string>());
    } catch (const std::exception& e) {
      fail(TableIoError::Vertices, std::string("bad rational coordinate: ") + e.what());
    }
  }
  if (j.is_number()) {
    double x = j.get<double>();
    if (!std::isfinite(x)) {
      fail(TableIoError::Vertices, "vertex coordinate is not finite");
    }
    return Rational(x);  // exact: every finite double is a binary rational
  }
  fail(TableIoError::Vertices, "vertex coordinate must be a number or a \"p/q\" string");
}

json coord_to_json(const Rational& v, ScalarMode mode) {
  if (mode == ScalarMode::Rational) return rational_to_string(v);
  return to_double(v);
}

}  // namespace

// Shared invariant check: vertices form a valid polygon, are stored in
// canonical order, and the marked sides build an Andreev table.
void validate_table_file(const TableFile& tf) {
  PolygonTable<Rational> poly;
  try {
    poly = validate_polygon<Rational>(tf.vertices);
  } catch (const ValidationError& e) {
    fail(TableIoError::Vertices, std::string("invalid polygon: ") + e.what());
  }
  if (poly.vertices != tf.vertices) {
    fail(TableIoError::NotCanonical,
         "vertices are not canonical (clockwise, duplicate, or collinear-junction "
         "vertices would be rewritten by validation)");
  }
  try {
    make_andreev_table<Rational>(std::move(poly), tf.andreev_sides, std::nullopt,
                                 Tolerances<Rational>::defaults(), /*allow_empty=*/true);
  } catch (const AndreevValidationError& e) {
    fail(TableIoError::Sides, std::string("invalid andreev_sides: ") + e.what());
  }
}

AndreevTableD TableFile::to_table_d() const {
  std::vector<Vec2<double>> verts;
  verts.reserve(vertices.size());
  for (const auto& v : vertices) verts.push_back({to_double(v.x), to_double(v.y)});
  PolygonTable<double> poly;
  try {
    poly = validate_polygon<double>(std::move(verts));
  } catch (const ValidationError& e) {
    throw TableIoFailure(TableIoError::Vertices,
                         std::string("invalid polygon at double precision: ") + e.what());
  }
  if (poly.vertices.size() != vertices.size()) {
    throw TableIoFailure(TableIoError::NotCanonical,
                         "double rounding merged vertices; side indices would shift");
  }
  try {
    return make_andreev_table<double>(std::move(poly), andreev_sides, std::nullopt,
                                      Tolerances<double>::defaults(), /*allow_empty=*/true);
  } catch (const AndreevValidationError& e) {
    throw TableIoFailure(TableIoError::Sides,
                         std::string("invalid andreev_sides: ") + e.what());
  }
}

AndreevTableQ TableFile::to_table_q() const {
  PolygonTable<Rational> poly;
  try {
    poly = validate_polygon<Rational>(vertices);
  } catch (const ValidationError& e) {
    throw TableIoFailure(TableIoError::Vertices,
                         std::string("invalid polygon: ") + e.what());
  }
  try {
    return make_andreev_table<Rational>(std::move(poly), andreev_sides, std::nullopt,
                                        Tolerances<Rational>::defaults(),
                                        /*allow_empty=*/true);
  } catch (const AndreevValidationError& e) {
    throw TableIoFailure(TableIoError::Sides,
                         std::string("invalid andreev_sides: ") + e.what());
  }
}

TableFile table_file_from(const AndreevTableD& table) {
  TableFile tf;
  tf.mode = ScalarMode::Float64;
  tf.vertices.reserve(table.polygon.vertices.size());
  for (const auto& v : table.polygon.vertices) {
    tf.vertices.push_back({Rational(v.x), Rational(v.y)});
  }
  tf.andreev_sides = table.andreev_sides;
  return tf;
}

TableFile table_file_from(const AndreevTableQ& table) {
  TableFile tf;
  tf.mode = ScalarMode::Rational;
  tf.vertices = table.polygon.vertices;
  tf.andreev_sides = table.andreev_sides;
  return tf;
}

TableFile parse_table_file(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const std::exception& e) {
    fail(TableIoError::Parse, std::string("not valid JSON: ") + e.what());
  }
  if (!j.is_object()) fail(TableIoError::Parse, "table file must be a JSON object");
  for (const auto& item : j.items()) {
    const std::string& key = item.key();
    if (key != "format_version" && key != "mode" && key != "vertices" &&
        key != "andreev_sides") {
      fail(TableIoError::Parse, "unknown key: " + key);
    }
  }

  if (!j.contains("format_version") || !j["format_version"].is_number_integer()) {
    fail(TableIoError::Version, "format_version missing or not an integer");
  }
  TableFile tf;
  tf.format_version = j["format_version"].get<int>();
  if (tf.format_version != 1) {
    fail(TableIoError::Version,
         "unsupported format_version " + std::to_string(tf.format_version));
  }

  if (!j.contains("mode") || !j["mode"].is_string()) {
    fail(TableIoError::Mode, "mode missing or not a string");
  }
  std::string mode = j["mode"].get<std::string>();
  if (mode == "float64") {
    tf.mode = ScalarMode::Float64;
  } else if (mode == "rational") {
    tf.mode = ScalarMode::Rational;
  } else {
    fail(TableIoError::Mode, "mode must be \"float64\" or \"rational\", got \"" + mode + "\"");
  }

  if (!j.contains("vertices") || !j["vertices"].is_array()) {
    fail(TableIoError::Vertices, "vertices missing or not an array");
  }
  for (const auto& jv : j["vertices"]) {
    if (!jv.is_array() || jv.size() != 2) {
      fail(TableIoError::Vertices, "each vertex must be a 2-element array [x, y]");
    }
    tf.vertices.push_back({coord_from_json(jv[0]), coord_from_json(jv[1])});
  }

  if (!j.contains("andreev_sides") || !j["andreev_sides"].is_array()) {
    fail(TableIoError::Sides, "andreev_sides missing or not an array");
  }
  for (const auto& js : j["andreev_sides"]) {
    if (!js.is_number_integer() || js.get<long long>() < 0) {
      fail(TableIoError::Sides, "andreev_sides entries must be non-negative integers");
    }
    tf.andreev_sides.push_back(js.get<std::size_t>());
  }
  std::sort(tf.andreev_sides.begin(), tf.andreev_sides.end());
  tf.andreev_sides.erase(std::unique(tf.andreev_sides.begin(), tf.andreev_sides.end()),
                         tf.andreev_sides.end());

  validate_table_file(tf);
  return tf;
}

std::string serialize_table_file(const TableFile& tf) {
  json j;
  j["format_version"] = tf.format_version;
  j["mode"] = tf.mode == ScalarMode::Rational ? "rational" : "float64";
  json verts = json::array();
  for (const auto& v : tf.vertices) {
    verts.push_back(json::array({coord_to_json(v.x, tf.mode), coord_to_json(v.y, tf.mode)}));
  }
  j["vertices"] = std::move(verts);
  j["andreev_sides"] = tf.andreev_sides;
  return j.dump(2) + "\n";
}

TableFile load_table_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(TableIoError::File, "cannot open for reading: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) fail(TableIoError::File, "read failure: " + path);
  return parse_table_file(buf.str());
}

void save_table_file(const TableFile& tf, const std::string& path) {
  std::string text = serialize_table_file(tf);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(TableIoError::File, "cannot open for writing: " + path);
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) fail(TableIoError::File, "write failure: " + path);
}

}  // namespace abil::io
