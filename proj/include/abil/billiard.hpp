#pragma once

// Collision map and flow for the classical (all-specular) polygon billiard.
//
// The single stepping engine in detail:: also powers the parity-decorated
// dynamics (andreev.hpp); classical dynamics is the special case with no
// marked sides, where parity never changes. Singular encounters (corner
// hits, tangential impacts, tolerance failures) are normal termination
// values, not exceptions: orbits report them and stop.

#include <cstddef>
#include <optional>
#include <utility>
#include <variant>
#include <vector>

#include "abil/geometry.hpp"

namespace abil {

template <class R>
struct PhasePoint {
  Vec2<R> pos;
  Vec2<R> dir;  // unit in float mode; any nonzero slope pair in exact mode
};

enum class EventKind { Specular, Andreev };

enum class SingularKind { CornerHit, GrazingImpact, NoHit };

template <class R>
struct SingularityReport {
  SingularKind kind = SingularKind::NoHit;
  Vec2<R> where{};
  double path_length = 0.0;  // arclength travelled before the singular event
};

template <class R>
struct CollisionEvent {
  std::size_t side = 0;
  Vec2<R> point{};        // exact hit location in rational mode
  Vec2<R> incoming{};     // direction of travel before the bounce
  Vec2<R> outgoing{};     // direction of travel after the bounce
  R t_param{};            // ray parameter of the free segment
  R s_param{};            // fraction along the side in [0, 1]
  EventKind kind = EventKind::Specular;
  int parity_after = +1;  // +1 in classical dynamics

  // Double-precision chart views (reporting and float-mode checks).
  double r = 0.0;        // arclength from the side's start vertex
  double phi_in = 0.0;   // incoming chart angle
  double phi_out = 0.0;  // outgoing chart angle
  double tau = 0.0;      // Euclidean free-path length
};

enum class Termination { MaxEvents, Periodic, Singular };

template <class R>
struct Orbit {
  std::vector<CollisionEvent<R>> events;
  Termination termination = Termination::MaxEvents;
  std::optional<SingularityReport<R>> singularity;
  double total_length = 0.0;
  // Set when termination == Periodic.
  std::size_t period_events = 0;
  double period_length = 0.0;
  R period_param{};  // exact flow parameter of the period (rational mode)
};

namespace detail {

// Direction canonicalization for exact-mode phase comparisons: the
// primitive integer vector with the same orientation.
inline Vec2q canonical_dir(const Vec2q& d) {
  mpz_class num_x = d.x.get_num() * d.y.get_den();
  mpz_class num_y = d.y.get_num() * d.x.get_den();
  mpz_class g = gcd(num_x, num_y);
  if (g == 0) return {Rational(0), Rational(0)};
  return {Rational(num_x / g), Rational(num_y / g)};
}

inline bool same_direction(const Vec2q& a, const Vec2q& b) {
  return cross(a, b) == 0 && dot(a, b) > 0;
}

inline bool same_direction(const Vec2d& a, const Vec2d& b) {
  double c = std::fabs(cross(a, b));
  return c <= kEpsPeriodic && dot(a, b) > 0.0;
}

template <class R>
struct StepResult {
  CollisionEvent<R> event;
  PhasePoint<R> next;
  int parity_next = +1;
};

template <class R>
using StepOutcome = std::variant<StepResult<R>, SingularityReport<R>>;

// One collision: cast the ray, classify the hit, apply the bounce rule.
// `mask` marks retro-reflecting sides (empty/all-false => classical).
template <class R>
StepOutcome<R> step_impl(const PolygonTable<R>& table, const std::vector<bool>& mask,
                         const PhasePoint<R>& p, int parity, std::ptrdiff_t exclude_side,
                         const Tolerances<R>& tol) {
  RayOutcome<R> rc = ray_cast(table, p.pos, p.dir, exclude_side, tol);
  if (std::holds_alternative<RayFailure<R>>(rc)) {
    const auto& f = std::get<RayFailure<R>>(rc);
    SingularityReport<R> s;
    s.kind = f.kind == RayError::CornerHit ? SingularKind::CornerHit : SingularKind::NoHit;
    s.where = f.near_point;
    return s;
  }
  const RayHit<R>& hit = std::get<RayHit<R>>(rc);
  const Side<R>& side = table.sides[hit.side];

  if constexpr (!scalar_traits<R>::exact) {
    // Tangential impact: angle between direction and side below epsilon.
    double sin_angle = std::fabs(to_double(cross(p.dir, side.seg))) /
                       (std::sqrt(to_double(length2(p.dir))) * side.length);
    if (sin_angle < to_double(tol.grazing)) {
      SingularityReport<R> s;
      s.kind = SingularKind::GrazingImpact;
      s.where = hit.point;
      return s;
    }
  }

  CollisionEvent<R> ev;
  ev.side = hit.side;
  ev.point = hit.point;
  ev.incoming = p.dir;
  ev.t_param = hit.t;
  ev.s_param = hit.s_param;
  bool retro = !mask.empty() && mask[hit.side];
  if (retro) {
    ev.kind = EventKind::Andreev;
    ev.outgoing = -p.dir;
    ev.parity_after = -parity;
  } else {
    ev.kind = EventKind::Specular;
    ev.outgoing = reflect_dir(p.dir, side.seg);
    ev.parity_after = parity;
  }

  Vec2d din = to_vec2d(ev.incoming);
  Vec2d dout = to_vec2d(ev.outgoing);
  if constexpr (!scalar_traits<R>::exact) {
    // Keep float directions unit-norm against drift over long orbits.
    double nin = norm(dout);
    dout = {dout.x / nin, dout.y / nin};
    ev.outgoing = {dout.x, dout.y};
  }
  ev.r = to_double(ev.s_param) * side.length;
  ev.phi_in = phi_of_incoming(side, {din.x / norm(din), din.y / norm(din)});
  ev.phi_out = phi_of_outgoing(side, {dout.x / norm(dout), dout.y / norm(dout)});
  ev.tau = hit.tau;

  StepResult<R> out;
  out.event = ev;
  out.next = PhasePoint<R>{hit.point, ev.outgoing};
  out.parity_next = ev.parity_after;
  return out;
}

template <class R>
bool same_point(const Vec2<R>& a, const Vec2<R>& b) {
  if constexpr (scalar_traits<R>::exact) {
    return a == b;
  } else {
    return norm(to_vec2d(a - b)) <= kEpsPeriodic;
  }
}

// Does q lie on the outgoing segment from `from` with direction d and
// segment ray-parameter length t_next? Returns the ray parameter.
template <class R>
std::optional<R> param_on_segment(const Vec2<R>& from, const Vec2<R>& d, const R& t_next,
                                  const Vec2<R>& q) {
  Vec2<R> rel = q - from;
  if constexpr (scalar_traits<R>::exact) {
    if (cross(d, rel) != 0) return std::nullopt;
    R t = (d.x != 0) ? rel.x / d.x : rel.y / d.y;
    if (t < 0 || t >= t_next) return std::nullopt;
    return t;
  } else {
    double dn = norm(to_vec2d(d));
    if (std::fabs(to_double(cross(d, rel))) > kEpsPeriodic * dn) return std::nullopt;
    double t = to_double(dot(d, rel)) / (dn * dn);
    if (t < -kEpsPeriodic || t >= to_double(t_next)) return std::nullopt;
    return t;
  }
}

// Full orbit driver with recurrence detection. A recurrence candidate is
// the initial phase point reappearing on an outgoing segment (position on
// the segment, direction and parity matching); it is confirmed when the
// event closing that segment reproduces the orbit's first event — two
// consecutive matches. This covers interior and boundary initial
// conditions uniformly.
template <class R>
Orbit<R> orbit_impl(const PolygonTable<R>& table, const std::vector<bool>& mask,
                    PhasePoint<R> state, int parity, std::size_t max_events,
                    const Tolerances<R>& tol) {
  Orbit<R> orbit;
  const PhasePoint<R> start = state;
  const int start_parity = parity;
  std::ptrdiff_t exclude = -1;
  R param_acc(0);

  for (std::size_t k = 0; k < max_events; ++k) {
    StepOutcome<R> so = step_impl(table, mask, state, parity, exclude, tol);
    if (std::holds_alternative<SingularityReport<R>>(so)) {
      orbit.singularity = std::get<SingularityReport<R>>(so);
      orbit.singularity->path_length = orbit.total_length;
      orbit.termination = Termination::Singular;
      return orbit;
    }
    StepResult<R>& sr = std::get<StepResult<R>>(so);

    // Recurrence scan on the segment state.pos -> event.point: the start
    // phase point must sit on it, and the event closing the segment must
    // reproduce the orbit's first event.
    bool dir_ok;
    if constexpr (scalar_traits<R>::exact) {
      dir_ok = same_direction(state.dir, start.dir);
    } else {
      dir_ok = same_direction(to_vec2d(state.dir), to_vec2d(start.dir));
    }
    if (dir_ok && parity == start_parity && k > 0) {
      std::optional<R> tq =
          param_on_segment(state.pos, state.dir, sr.event.t_param, start.pos);
      if (tq) {
        const CollisionEvent<R>& first = orbit.events.front();
        bool confirmed = sr.event.side == first.side &&
                         same_point(sr.event.point, first.point) &&
                         same_direction(to_vec2d(sr.event.outgoing),
                                        to_vec2d(first.outgoing)) &&
                         sr.event.parity_after == first.parity_after;
        if (confirmed) {
          double seg_scale = std::sqrt(to_double(length2(state.dir)));
          orbit.termination = Termination::Periodic;
          orbit.period_events = k;
          orbit.period_length = orbit.total_length + to_double(*tq) * seg_scale;
          orbit.period_param = param_acc + *tq;
          return orbit;
        }
      }
    }

    orbit.total_length += sr.event.tau;
    param_acc += sr.event.t_param;
    orbit.events.push_back(sr.event);
    state = sr.next;
    parity = sr.parity_next;
    exclude = static_cast<std::ptrdiff_t>(sr.event.side);
  }
  orbit.termination = Termination::MaxEvents;
  return orbit;
}

// Advances the state by `span` in ray-parameter units (arclength divided
// by |dir|, which is invariant along an orbit). Returns the final state or
// the singularity that interrupted it; `events_out` collects collisions.
template <class R>
std::variant<std::pair<PhasePoint<R>, int>, SingularityReport<R>> flow_param_impl(
    const PolygonTable<R>& table, const std::vector<bool>& mask, PhasePoint<R> state,
    int parity, R span, const Tolerances<R>& tol,
    std::vector<CollisionEvent<R>>* events_out = nullptr) {
  std::ptrdiff_t exclude = -1;
  double travelled = 0.0;
  while (span > 0) {
    StepOutcome<R> so = step_impl(table, mask, state, parity, exclude, tol);
    if (std::holds_alternative<SingularityReport<R>>(so)) {
      SingularityReport<R> s = std::get<SingularityReport<R>>(so);
      s.path_length = travelled;
      return s;
    }
    StepResult<R>& sr = std::get<StepResult<R>>(so);
    if (sr.event.t_param > span) {
      state.pos = state.pos + Vec2<R>{state.dir.x * span, state.dir.y * span};
      return std::make_pair(state, parity);
    }
    span -= sr.event.t_param;
    travelled += sr.event.tau;
    if (events_out) events_out->push_back(sr.event);
    state = sr.next;
    parity = sr.parity_next;
    exclude = static_cast<std::ptrdiff_t>(sr.event.side);
  }
  return std::make_pair(state, parity);
}

}  // namespace detail

// ------------------------------------------------- classical billiard API

inline const std::vector<bool> kNoMask{};

// One classical collision step from an interior point (or a boundary point
// moving inward). exclude_side is the departure side, or -1.
template <class R>
detail::StepOutcome<R> collision_step(const PolygonTable<R>& table, const PhasePoint<R>& p,
                                      std::ptrdiff_t exclude_side = -1,
                                      const Tolerances<R>& tol = Tolerances<R>::defaults()) {
  return detail::step_impl(table, kNoMask, p, +1, exclude_side, tol);
}

// Unit-speed classical flow for (possibly negative) time t, float mode.
inline std::variant<PhasePoint<double>, SingularityReport<double>> flow(
    const PolygonTable<double>& table, PhasePoint<double> p, double t,
    const Tolerances<double>& tol = Tolerances<double>::defaults()) {
  bool backwards = t < 0.0;
  if (backwards) {
    p.dir = -p.dir;
    t = -t;
  }
  auto out = detail::flow_param_impl<double>(table, kNoMask, p, +1, t, tol);
  if (std::holds_alternative<SingularityReport<double>>(out)) {
    return std::get<SingularityReport<double>>(out);
  }
  PhasePoint<double> q = std::get<std::pair<PhasePoint<double>, int>>(out).first;
  if (backwards) q.dir = -q.dir;
  return q;
}

// Classical orbit with recurrence detection.
template <class R>
Orbit<R> orbit(const PolygonTable<R>& table, const PhasePoint<R>& initial,
               std::size_t max_events,
               const Tolerances<R>& tol = Tolerances<R>::defaults()) {
  return detail::orbit_impl(table, kNoMask, initial, +1, max_events, tol);
}

}  // namespace abil
