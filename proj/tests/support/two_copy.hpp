#pragma once

// Independent two-copy oracle for retro-reflecting dynamics.
//
// A table whose marked sides all lie on its right supporting line x = a is
// glued to its mirror image across that line. The glued dynamics is the
// classical one inside each copy, but the seam is not transparent: a ray
// that reaches x = a at an interior point of the former marked side
// continues into the other copy with the *vertical* velocity component
// negated (the horizontal one is kept). Folding back across x = a — parity
// +1 states are points left of the axis, parity -1 states are mirrored
// points right of it — must reproduce the parity dynamics exactly.
//
// The pairs below are built from hand-written vertex lists and the seam
// rule is implemented here by hand, so the check does not reuse the
// library's own parity machinery.

#include <optional>

#include "abil/andreev.hpp"
#include "abil/geometry.hpp"

namespace twocopy {

template <class R>
struct UnfoldedPair {
  abil::AndreevTable<R> folded;    // table with marked vertical sides
  abil::AndreevTable<R> unfolded;  // doubled table (seam handled manually)
  R axis;                          // gluing line x = axis
};

// Unit square with the right side marked; doubled: the 2 x 1 rectangle.
template <class R>
UnfoldedPair<R> square_pair() {
  UnfoldedPair<R> pair;
  pair.axis = R(1);
  pair.folded = abil::make_andreev_table<R>(
      abil::validate_polygon<R>(
          {{R(0), R(0)}, {R(1), R(0)}, {R(1), R(1)}, {R(0), R(1)}}),
      {1});
  pair.unfolded = abil::classical_table<R>(abil::validate_polygon<R>(
      {{R(0), R(0)}, {R(2), R(0)}, {R(2), R(1)}, {R(0), R(1)}}));
  return pair;
}

// Right triangle (pi/2, pi/4, pi/4) with the vertical leg marked;
// doubled: the isosceles triangle with apex (1, 1).
template <class R>
UnfoldedPair<R> triangle_pair() {
  UnfoldedPair<R> pair;
  pair.axis = R(1);
  pair.folded = abil::make_andreev_table<R>(
      abil::validate_polygon<R>({{R(0), R(0)}, {R(1), R(0)}, {R(1), R(1)}}), {1});
  pair.unfolded = abil::classical_table<R>(
      abil::validate_polygon<R>({{R(0), R(0)}, {R(2), R(0)}, {R(1), R(1)}}));
  return pair;
}

// Parity representation -> glued state.
template <class R>
abil::PhasePoint<R> unfold(const abil::AndreevPhasePoint<R>& p, const R& axis) {
  if (p.parity >= 0) return {p.pos, p.dir};
  return {{R(2) * axis - p.pos.x, p.pos.y}, {-p.dir.x, p.dir.y}};
}

// Glued state -> parity representation. States on the axis fold with
// parity +1 (the seam is identified).
template <class R>
abil::AndreevPhasePoint<R> fold(const abil::PhasePoint<R>& q, const R& axis) {
  if (q.pos.x <= axis) return {q.pos, q.dir, +1};
  return {{R(2) * axis - q.pos.x, q.pos.y}, {-q.dir.x, q.dir.y}, -1};
}

// One event of the glued dynamics: whichever comes first of (a) a seam
// crossing, after which dir.y is negated, or (b) a specular bounce off the
// doubled table's own boundary. Returns the post-event state and the ray
// parameter spent, or nullopt when the ray runs into a corner / endpoint.
template <class R>
std::optional<std::pair<abil::PhasePoint<R>, R>> glued_step(
    const UnfoldedPair<R>& pair, const abil::PhasePoint<R>& q) {
  const auto cast = abil::ray_cast(pair.unfolded.polygon, q.pos, q.dir);
  const auto* wall = std::get_if<abil::RayHit<R>>(&cast);
  if (!wall) return std::nullopt;

  // First strict crossing of x = axis, if any.
  std::optional<R> t_seam;
  if (q.dir.x != R(0) && q.pos.x != pair.axis) {
    R t = (pair.axis - q.pos.x) / q.dir.x;
    if (t > R(0)) t_seam = t;
  }

  if (t_seam && *t_seam < wall->t) {
    const R t = *t_seam;
    abil::Vec2<R> at{pair.axis, q.pos.y + t * q.dir.y};
    // Seam endpoints coincide with vertices of the doubled table: singular.
    for (const auto& v : pair.unfolded.polygon.vertices) {
      if (at == v) return std::nullopt;
    }
    return std::pair{abil::PhasePoint<R>{at, {q.dir.x, -q.dir.y}}, t};
  }
  if (t_seam && *t_seam == wall->t) return std::nullopt;  // seam meets corner

  const abil::Side<R>& side = pair.unfolded.polygon.sides[wall->side];
  return std::pair{
      abil::PhasePoint<R>{wall->point, abil::reflect_dir(q.dir, side.seg)},
      wall->t};
}

// Glued flow by ray parameter (arclength for unit speed), forward only.
template <class R>
std::optional<abil::PhasePoint<R>> glued_flow(const UnfoldedPair<R>& pair,
                                              abil::PhasePoint<R> q, R t,
                                              int max_events = 100000) {
  for (int i = 0; i < max_events; ++i) {
    auto step = glued_step(pair, q);
    if (!step) return std::nullopt;
    if (step->second > t) {
      return abil::PhasePoint<R>{{q.pos.x + t * q.dir.x, q.pos.y + t * q.dir.y},
                                 q.dir};
    }
    // At an exact event instant, report the post-event state.
    q = step->first;
    t -= step->second;
  }
  return std::nullopt;
}

}  // namespace twocopy
