#pragma once

// Canonical JSON table files.
//
// A table file (format_version 1) is a single JSON object:
//
//   {
//     "andreev_sides": [1, 3],
//     "format_version": 1,
//     "mode": "float64",
//     "vertices": [[0, 0], [2, 0], [2, 1], [0, 1]]
//   }
//
// Keys serialize in sorted order and the document ends with a newline, so
// identical tables produce byte-identical files. Vertex coordinates are
// JSON numbers in "float64" mode and canonical rational strings ("p/q",
// or plain "p" for integers) in "rational" mode; readers accept either
// encoding regardless of mode. Unknown keys are rejected.
//
// The stored vertex list must already be canonical -- counterclockwise,
// no duplicate or collinear-junction vertices -- so that the side indices
// in andreev_sides are unambiguous. Files whose vertices validate_polygon
// would reorder or merge are rejected rather than silently rewritten.

#include <stdexcept>
#include <string>
#include <vector>

#include "abil/andreev.hpp"
#include "abil/geometry.hpp"
#include "abil/scalar.hpp"

namespace abil::io {

enum class TableIoError {
  Parse,         // not valid JSON / wrong shape / unknown key
  Version,       // format_version missing or unsupported
  Mode,          // mode missing or not "float64" / "rational"
  Vertices,      // vertex list malformed or fails polygon validation
  Sides,         // andreev_sides malformed or fails Andreev validation
  NotCanonical,  // vertices valid but not in canonical stored form
  File,          // filesystem read/write failure
};

class TableIoFailure : public std::runtime_error {
 public:
  TableIoFailure(TableIoError code, const std::string& what)
      : std::runtime_error(what), code_(code) {}
  TableIoError code() const { return code_; }

 private:
  TableIoError code_;
};

enum class ScalarMode { Float64, Rational };

// Parsed table file. Coordinates are held exactly (every finite double is
// a binary rational); `mode` records the intended engine and the output
// encoding of coordinates.
struct TableFile {
  int format_version = 1;
  ScalarMode mode = ScalarMode::Float64;
  std::vector<Vec2<Rational>> vertices;
  std::vector<std::size_t> andreev_sides;  // sorted, unique

  // Builds the runtime table in the requested precision. Throws
  // TableIoFailure(NotCanonical) if double rounding degenerates the
  // polygon (vertices merged or reordered by validation).
  AndreevTableD to_table_d() const;
  AndreevTableQ to_table_q() const;
};

TableFile table_file_from(const AndreevTableD& table);
TableFile table_file_from(const AndreevTableQ& table);

// Checks the TableFile invariant (canonical simple polygon, valid marked
// sides) without building a runtime table. Throws TableIoFailure.
void validate_table_file(const TableFile& tf);

// String-level round trip. parse_table_file validates everything the
// TableFile invariant promises: version, mode, canonical simple polygon,
// vertical retro sides. serialize_table_file is deterministic.
TableFile parse_table_file(const std::string& text);
std::string serialize_table_file(const TableFile& tf);

TableFile load_table_file(const std::string& path);
void save_table_file(const TableFile& tf, const std::string& path);

}  // namespace abil::io
