#pragma once

// CSV and SVG emission for simulated orbits.
//
// CSV: RFC 4180 (CRLF record ends), fixed header
//   event_index,side,hit_x,hit_y,r,phi,tau,kind,parity_after
// Numbers carry 17 significant digits; phi is the outgoing chart angle.
// A singular orbit gains one final termination row whose kind column is
// "singularity": hit_x/hit_y give the singular point, the side and chart
// columns are empty.
//
// SVG 1.1: viewBox fits the table bounding box with a 5% margin. The
// polygon is a <polygon> element, retro-reflecting sides are overdrawn
// as <line> elements in a distinct stroke, and each trajectory is exactly
// one <path>. A group transform flips the y-axis so figures read in
// mathematical orientation.

#include <optional>
#include <string>
#include <vector>

#include "abil/andreev.hpp"
#include "abil/billiard.hpp"
#include "abil/geometry.hpp"

namespace abil::render {

// printf "%.17g": every double round-trips, trailing zeros trimmed.
std::string format_sig17(double v);

const char* kind_name(EventKind kind);

// ------------------------------------------------------------------ CSV

extern const char* const kCsvHeader;  // without line terminator

namespace detail {
void append_csv_event(std::string& out, std::size_t index, std::size_t side, double hit_x,
                      double hit_y, double r, double phi, double tau, EventKind kind,
                      int parity_after);
void append_csv_singularity(std::string& out, std::size_t index, double x, double y);
}  // namespace detail

template <class R>
std::string csv_document(const Orbit<R>& orbit) {
  std::string out(kCsvHeader);
  out += "\r\n";
  for (std::size_t i = 0; i < orbit.events.size(); ++i) {
    const CollisionEvent<R>& e = orbit.events[i];
    detail::append_csv_event(out, i, e.side, to_double(e.point.x), to_double(e.point.y),
                             e.r, e.phi_out, e.tau, e.kind, e.parity_after);
  }
  if (orbit.termination == Termination::Singular && orbit.singularity) {
    detail::append_csv_singularity(out, orbit.events.size(),
                                   to_double(orbit.singularity->where.x),
                                   to_double(orbit.singularity->where.y));
  }
  return out;
}

// ------------------------------------------------------------------ SVG

struct Polyline {
  std::vector<Vec2<double>> points;
};

// Start point, every collision point, then the singular point if the
// orbit ended in a singularity.
template <class R>
Polyline orbit_polyline(const Vec2<R>& start, const Orbit<R>& orbit) {
  Polyline line;
  line.points.reserve(orbit.events.size() + 2);
  line.points.push_back({to_double(start.x), to_double(start.y)});
  for (const CollisionEvent<R>& e : orbit.events) {
    line.points.push_back({to_double(e.point.x), to_double(e.point.y)});
  }
  if (orbit.termination == Termination::Singular && orbit.singularity) {
    line.points.push_back({to_double(orbit.singularity->where.x),
                           to_double(orbit.singularity->where.y)});
  }
  return line;
}

std::string svg_document(const std::vector<Vec2<double>>& polygon,
                         const std::vector<bool>& is_andreev,
                         const std::vector<Polyline>& trajectories);

template <class R>
std::string svg_document(const AndreevTable<R>& table,
                         const std::vector<Polyline>& trajectories) {
  std::vector<Vec2<double>> poly;
  poly.reserve(table.polygon.vertices.size());
  for (const auto& v : table.polygon.vertices) {
    poly.push_back({to_double(v.x), to_double(v.y)});
  }
  return svg_document(poly, table.is_andreev, trajectories);
}

}  // namespace abil::render
