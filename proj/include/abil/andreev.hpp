#pragma once

// Retro-reflecting (Andreev) dynamics on a polygon table.
//
// Designated boundary sides retro-reflect: the outgoing direction is the
// reversed incoming direction at the same point, and an electron/hole
// parity bit in {+1, -1} flips. All other sides reflect specularly and
// keep the parity. The canonical state is (position, direction, parity)
// on a single copy of the polygon; the equivalent picture of two mirror
// copies glued along the marked sides is available as a view
// (to_two_copy / from_two_copy) for cross-checks and rendering.
//
// Marked sides must be exactly vertical segments, and two adjacent marked
// sides may not meet at a reflex vertex (the shared corner would be a flow
// singularity interior to the glued set).

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <utility>
#include <variant>
#include <vector>

#include "abil/billiard.hpp"
#include "abil/geometry.hpp"

namespace abil {

template <class R>
struct AndreevPhasePoint {
  Vec2<R> pos;
  Vec2<R> dir;
  int parity = +1;
};

enum class AndreevTableError {
  NoAndreevSide,
  SideIndexOutOfRange,
  NotVertical,
  ReflexAdjacency,
  AxisCrossesInterior,
};

class AndreevValidationError : public std::runtime_error {
 public:
  AndreevValidationError(AndreevTableError code, const std::string& what)
      : std::runtime_error(what), code_(code) {}
  AndreevTableError code() const { return code_; }

 private:
  AndreevTableError code_;
};

template <class R>
struct AndreevTable {
  PolygonTable<R> polygon;
  std::vector<bool> is_andreev;            // per side
  std::vector<std::size_t> andreev_sides;  // sorted indices
  R mirror_axis_x{};                       // vertical axis for two-copy views
  Tolerances<R> tol = Tolerances<R>::defaults();

  bool classical() const { return andreev_sides.empty(); }
};

using AndreevTableD = AndreevTable<double>;
using AndreevTableQ = AndreevTable<Rational>;

// Builds the table; `axis_x` defaults to the right supporting line
// max_i x_i, which is parallel to every (vertical) marked side and never
// crosses the interior. Throws AndreevValidationError.
template <class R>
AndreevTable<R> make_andreev_table(PolygonTable<R> polygon,
                                   std::vector<std::size_t> andreev_sides,
                                   std::optional<R> axis_x = std::nullopt,
                                   Tolerances<R> tol = Tolerances<R>::defaults(),
                                   bool allow_empty = false) {
  AndreevTable<R> t;
  std::size_t n = polygon.sides.size();
  t.is_andreev.assign(n, false);
  std::sort(andreev_sides.begin(), andreev_sides.end());
  andreev_sides.erase(std::unique(andreev_sides.begin(), andreev_sides.end()),
                      andreev_sides.end());
  if (andreev_sides.empty() && !allow_empty) {
    throw AndreevValidationError(AndreevTableError::NoAndreevSide,
                                 "no retro-reflecting side designated");
  }
  for (std::size_t idx : andreev_sides) {
    if (idx >= n) {
      throw AndreevValidationError(AndreevTableError::SideIndexOutOfRange,
                                   "marked side index out of range");
    }
    R eps_rel(0);
    if constexpr (!scalar_traits<R>::exact) eps_rel = 1e-12;
    if (!polygon.sides[idx].is_vertical(eps_rel)) {
      throw AndreevValidationError(AndreevTableError::NotVertical,
                                   "marked side is not a vertical segment");
    }
    t.is_andreev[idx] = true;
  }
  // Adjacent marked sides must not meet at a reflex vertex.
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t j = (i + 1) % n;
    if (!andreev_sides.empty() && t.is_andreev[i] && t.is_andreev[j]) {
      if (cross(polygon.sides[i].seg, polygon.sides[j].seg) < 0) {
        throw AndreevValidationError(
            AndreevTableError::ReflexAdjacency,
            "adjacent marked sides meet at a reflex vertex");
      }
    }
  }
  if (axis_x) {
    for (const auto& v : polygon.vertices) {
      if (v.x > *axis_x) {
        // A vertex strictly right of the axis combined with any vertex
        // strictly left would put the axis through the interior; enforce
        // the simple sufficient rule axis >= max x or axis <= min x.
        for (const auto& w : polygon.vertices) {
          if (w.x < *axis_x) {
            throw AndreevValidationError(AndreevTableError::AxisCrossesInterior,
                                         "mirror axis crosses the table");
          }
        }
        break;
      }
    }
    t.mirror_axis_x = *axis_x;
  } else {
    R mx = polygon.vertices.front().x;
    for (const auto& v : polygon.vertices) mx = std::max(mx, v.x);
    t.mirror_axis_x = mx;
  }
  t.andreev_sides = std::move(andreev_sides);
  t.polygon = std::move(polygon);
  t.tol = tol;
  return t;
}

// Classical wrapper: no marked sides, parity is inert.
template <class R>
AndreevTable<R> classical_table(PolygonTable<R> polygon,
                                Tolerances<R> tol = Tolerances<R>::defaults()) {
  return make_andreev_table(std::move(polygon), {}, std::optional<R>{}, tol,
                            /*allow_empty=*/true);
}

// ------------------------------------------------------------ step / flow

template <class R>
struct AndreevStep {
  CollisionEvent<R> event;
  AndreevPhasePoint<R> next;
};

template <class R>
using AndreevOutcome = std::variant<AndreevStep<R>, SingularityReport<R>>;

template <class R>
AndreevOutcome<R> andreev_step(const AndreevTable<R>& table, const AndreevPhasePoint<R>& p,
                               std::ptrdiff_t exclude_side = -1) {
  auto so = detail::step_impl(table.polygon, table.is_andreev, PhasePoint<R>{p.pos, p.dir},
                              p.parity, exclude_side, table.tol);
  if (std::holds_alternative<SingularityReport<R>>(so)) {
    return std::get<SingularityReport<R>>(so);
  }
  auto& sr = std::get<detail::StepResult<R>>(so);
  return AndreevStep<R>{sr.event,
                        AndreevPhasePoint<R>{sr.next.pos, sr.next.dir, sr.parity_next}};
}

// Unit-speed flow for (possibly negative) time t, float mode. Negative
// times run the reversed dynamics: reverse, flow |t|, reverse; parity
// still flips at every retro event.
inline std::variant<AndreevPhasePoint<double>, SingularityReport<double>> andreev_flow(
    const AndreevTableD& table, AndreevPhasePoint<double> p, double t) {
  bool backwards = t < 0.0;
  if (backwards) {
    p.dir = -p.dir;
    t = -t;
  }
  auto out = detail::flow_param_impl<double>(table.polygon, table.is_andreev,
                                             PhasePoint<double>{p.pos, p.dir}, p.parity, t,
                                             table.tol);
  if (std::holds_alternative<SingularityReport<double>>(out)) {
    return std::get<SingularityReport<double>>(out);
  }
  auto [q, parity] = std::get<std::pair<PhasePoint<double>, int>>(out);
  if (backwards) q.dir = -q.dir;
  return AndreevPhasePoint<double>{q.pos, q.dir, parity};
}

// Exact-mode flow by ray parameter s (arclength = s * |dir|; |dir| is
// invariant along an orbit, so s-time is consistent across events).
inline std::variant<AndreevPhasePoint<Rational>, SingularityReport<Rational>>
andreev_flow_param(const AndreevTableQ& table, AndreevPhasePoint<Rational> p, Rational s) {
  bool backwards = s < 0;
  if (backwards) {
    p.dir = -p.dir;
    s = -s;
  }
  auto out = detail::flow_param_impl<Rational>(table.polygon, table.is_andreev,
                                               PhasePoint<Rational>{p.pos, p.dir}, p.parity,
                                               s, table.tol);
  if (std::holds_alternative<SingularityReport<Rational>>(out)) {
    return std::get<SingularityReport<Rational>>(out);
  }
  auto [q, parity] = std::get<std::pair<PhasePoint<Rational>, int>>(out);
  if (backwards) q.dir = -q.dir;
  return AndreevPhasePoint<Rational>{q.pos, q.dir, parity};
}

template <class R>
Orbit<R> andreev_orbit(const AndreevTable<R>& table, const AndreevPhasePoint<R>& initial,
                       std::size_t max_events) {
  return detail::orbit_impl(table.polygon, table.is_andreev,
                            PhasePoint<R>{initial.pos, initial.dir}, initial.parity,
                            max_events, table.tol);
}

// --------------------------------------------------------- two-copy views

enum class Copy { Plus, Minus };

template <class R>
struct TwoCopyPoint {
  Copy copy = Copy::Plus;
  Vec2<R> pos;
  Vec2<R> dir;
};

// Mirror across the vertical line x = axis.
template <class R>
inline Vec2<R> mirror_point(const Vec2<R>& p, const R& axis) {
  return {R(2) * axis - p.x, p.y};
}

template <class R>
inline Vec2<R> mirror_dir(const Vec2<R>& d) {
  return {-d.x, d.y};
}

// Parity representation -> glued two-copy representation: parity -1 states
// live on the mirrored copy (position reflected, direction angle pi-theta).
template <class R>
TwoCopyPoint<R> to_two_copy(const AndreevTable<R>& table, const AndreevPhasePoint<R>& p) {
  if (p.parity >= 0) return {Copy::Plus, p.pos, p.dir};
  return {Copy::Minus, mirror_point(p.pos, table.mirror_axis_x), mirror_dir(p.dir)};
}

template <class R>
AndreevPhasePoint<R> from_two_copy(const AndreevTable<R>& table, const TwoCopyPoint<R>& p) {
  if (p.copy == Copy::Plus) return {p.pos, p.dir, +1};
  return {mirror_point(p.pos, table.mirror_axis_x), mirror_dir(p.dir), -1};
}

}  // namespace abil
