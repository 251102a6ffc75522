#pragma once

// Perturbation studies: rectangular defect cells appended to a host
// rectangle, T-fractal prefractal generation, and classification of how an
// orbit that enters a perturbation through its mouth leaves it again
// (anti-parallel return vs. the specular continuation the unperturbed side
// would have produced).
//
// The mouth of a perturbation is an auxiliary *transparent* segment:
// crossings are detected and logged, never reflected. By convention the
// perturbation region lies to the LEFT of the mouth's a -> b direction.

#include <cstddef>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "abil/billiard.hpp"
#include "abil/geometry.hpp"

namespace abil::fractal {

// ------------------------------------------------------------------ errors

enum class FractalError {
  InvalidSpec,
  LevelTooHigh,
  DyadicBasepoint,
  BadDirection,
};

class FractalSpecError : public std::runtime_error {
 public:
  FractalSpecError(FractalError code, const std::string& what)
      : std::runtime_error(what), code_(code) {}
  FractalError code() const { return code_; }

 private:
  FractalError code_;
};

// ------------------------------------------------------------- notch cell

// Axis-aligned rectangular defect cell appended *outward* on one side of a
// W x H host rectangle; the mouth is the shared (open) segment where the
// host side used to be. `offset` is measured from the side's
// minimum-coordinate corner along the side's axis.
template <class R>
struct NotchSpec {
  R host_w{};
  R host_h{};
  std::size_t side = 2;  // 0 bottom, 1 right, 2 top, 3 left
  R offset{};
  R width{};
  R depth{};
};

// Transparent mouth segment; the perturbation lies to the left of a -> b.
template <class R>
struct Mouth {
  Vec2<R> a, b;
};

template <class R>
struct NotchedTable {
  PolygonTable<R> polygon;  // 8-gon: host with the cell bulged outward
  Mouth<R> mouth;
};

template <class R>
NotchedTable<R> build_notched_rect(const NotchSpec<R>& spec) {
  const R W = spec.host_w, H = spec.host_h;
  if (!(W > 0) || !(H > 0) || !(spec.width > 0) || !(spec.depth > 0)) {
    throw FractalSpecError(FractalError::InvalidSpec,
                           "host dimensions, width and depth must be positive");
  }
  if (spec.side > 3) {
    throw FractalSpecError(FractalError::InvalidSpec, "side index must be 0..3");
  }
  const bool horizontal = (spec.side % 2 == 0);
  const R extent = horizontal ? W : H;     // length of the host side
  const R opposing = horizontal ? H : W;   // distance to the opposite side
  if (!(spec.depth < opposing)) {
    throw FractalSpecError(FractalError::InvalidSpec,
                           "depth must be smaller than the opposing extent");
  }
  if (!(spec.offset > 0) || !(spec.offset + spec.width < extent)) {
    throw FractalSpecError(FractalError::InvalidSpec,
                           "cell must lie strictly inside the side (no corner overlap)");
  }

  const R c0 = spec.offset;             // cell start along the side's axis
  const R c1 = spec.offset + spec.width;
  const R d = spec.depth;
  std::vector<Vec2<R>> v;
  v.reserve(8);
  // CCW, replacing the chosen side's straight run with the outward bulge.
  switch (spec.side) {
    case 0:  // bottom y = 0, outward -y, axis +x
      v = {{c0, 0}, {c0, -d}, {c1, -d}, {c1, 0}, {W, 0}, {W, H}, {R(0), H}, {R(0), R(0)}};
      break;
    case 1:  // right x = W, outward +x, axis +y
      v = {{R(0), R(0)}, {W, 0}, {W, c0}, {W + d, c0}, {W + d, c1}, {W, c1}, {W, H}, {R(0), H}};
      break;
    case 2:  // top y = H, outward +y, axis +x
      v = {{R(0), R(0)}, {W, 0}, {W, H}, {c1, H}, {c1, H + d}, {c0, H + d}, {c0, H}, {R(0), H}};
      break;
    default:  // left x = 0, outward -x, axis +y
      v = {{R(0), R(0)}, {W, 0}, {W, H}, {R(0), H}, {R(0), c1}, {-d, c1}, {-d, c0}, {R(0), c0}};
      break;
  }

  NotchedTable<R> out;
  out.polygon = validate_polygon<R>(std::move(v));
  // Mouth oriented so the cell sits on its left.
  switch (spec.side) {
    case 0: out.mouth = {{c1, R(0)}, {c0, R(0)}}; break;
    case 1: out.mouth = {{W, c1}, {W, c0}}; break;
    case 2: out.mouth = {{c0, H}, {c1, H}}; break;
    default: out.mouth = {{R(0), c0}, {R(0), c1}}; break;
  }
  return out;
}

// -------------------------------------------------------------- T-fractal

// Prefractal of the T-fractal: level 0 is the base square; every level
// grows, on each exposed top edge of length l, a T-piece (stem of width
// stem_ratio*l centered, height stem_ratio*l; crossbar of full width l and
// height crossbar_ratio*stem_ratio*l). The crossbar exposes its two arm
// tops (the overhangs beyond the stem) as the next level's edges, so each
// T spawns two children and level n has 4 + 8*(2^n - 1) vertices, all
// dyadic when base_width is.
template <class R>
struct TFractalSpec {
  int level = 0;
  R base_width = R(1);
  R stem_ratio = R(1) / R(2);
  R crossbar_ratio = R(1) / R(2);
};

namespace detail {

template <class R>
void emit_tfractal_top(std::vector<Vec2<R>>& out, const TFractalSpec<R>& spec, const R& x0,
                       const R& y, const R& len, int depth) {
  if (depth == 0) {
    out.push_back({x0, y});  // plain wall: just close at the left endpoint
    return;
  }
  const R arm = (R(1) - spec.stem_ratio) / R(2) * len;  // overhang length
  const R sx0 = x0 + arm;                               // stem left
  const R sx1 = x0 + len - arm;                         // stem right
  const R y1 = y + spec.stem_ratio * len;               // crossbar bottom
  const R y2 = y1 + spec.crossbar_ratio * spec.stem_ratio * len;  // crossbar top

  // Right-to-left along the boundary (interior below).
  out.push_back({sx1, y});
  out.push_back({sx1, y1});
  out.push_back({x0 + len, y1});
  out.push_back({x0 + len, y2});
  emit_tfractal_top(out, spec, sx1, y2, arm, depth - 1);  // right arm top
  emit_tfractal_top(out, spec, x0, y2, arm, depth - 1);   // left arm top
  out.push_back({x0, y1});
  out.push_back({sx0, y1});
  out.push_back({sx0, y});
  out.push_back({x0, y});
}

}  // namespace detail

template <class R>
PolygonTable<R> build_tfractal(const TFractalSpec<R>& spec, int max_level = 6) {
  if (spec.level < 0 || spec.level > max_level) {
    throw FractalSpecError(FractalError::LevelTooHigh,
                           "level must be in [0, " + std::to_string(max_level) + "]");
  }
  if (!(spec.base_width > 0) || !(spec.stem_ratio > 0) || !(spec.stem_ratio < 1) ||
      !(spec.crossbar_ratio > 0) || !(spec.crossbar_ratio < 1)) {
    throw FractalSpecError(FractalError::InvalidSpec,
                           "base_width positive and ratios in (0, 1) required");
  }
  const R w = spec.base_width;
  std::vector<Vec2<R>> v{{R(0), R(0)}, {w, R(0)}, {w, w}};
  detail::emit_tfractal_top(v, spec, R(0), w, w, spec.level);
  return validate_polygon<R>(std::move(v));  // merges the collinear junctions
}

// --------------------------------------------------- orbit classification

enum class VerdictKind { AntiParallelReturn, PassThroughEquivalent, Other };

enum class ClassifyError { NeverEnters, NoExit };

// A transparent crossing of the mouth: where and in which direction.
template <class R>
struct Crossing {
  Vec2<R> point{};
  Vec2<R> dir{};
};

template <class R>
struct PerturbationVerdict {
  VerdictKind kind = VerdictKind::Other;
  Crossing<R> entry, exit;
  double direction_delta = 0.0;   // exit angle minus entry angle, (-pi, pi]
  std::size_t events_inside = 0;  // reflections between entry and exit
};

template <class R>
using ClassifyOutcome = std::variant<PerturbationVerdict<R>, ClassifyError>;

namespace detail {

// Transversal crossing of the open segment (0, t_end] of ray p + t*d with
// the mouth. Returns the crossing parameters or false.
template <class R>
bool mouth_crossing(const Mouth<R>& mouth, const Vec2<R>& p, const Vec2<R>& d,
                    const R& t_end, R& t_out, Vec2<R>& point_out, int& side_sign) {
  Vec2<R> m = mouth.b - mouth.a;
  R denom = cross(d, m);
  if (denom == 0) return false;  // parallel: never a transversal crossing
  Vec2<R> ap = mouth.a - p;
  R t = cross(ap, m) / denom;
  if (!(t > 0) || t > t_end) return false;
  R u = cross(ap, d) / denom;
  if (u < 0 || u > 1) return false;
  t_out = t;
  point_out = {p.x + d.x * t, p.y + d.y * t};
  // Positive when d points to the left of a->b, i.e. into the perturbation.
  R s = cross(m, d);
  side_sign = (s > 0) ? +1 : (s < 0 ? -1 : 0);
  return true;
}

template <class R>
bool anti_parallel(const Vec2<R>& exit_dir, const Vec2<R>& entry_dir) {
  if constexpr (scalar_traits<R>::exact) {
    return cross(exit_dir, entry_dir) == 0 && dot(exit_dir, entry_dir) < 0;
  } else {
    return abil::detail::same_direction(to_vec2d(exit_dir),
                                        Vec2d{-to_vec2d(entry_dir).x, -to_vec2d(entry_dir).y});
  }
}

template <class R>
bool same_dir(const Vec2<R>& a, const Vec2<R>& b) {
  if constexpr (scalar_traits<R>::exact) {
    return cross(a, b) == 0 && dot(a, b) > 0;
  } else {
    return abil::detail::same_direction(to_vec2d(a), to_vec2d(b));
  }
}

}  // namespace detail

// Classical orbit from (x0, dir); the first mouth crossing into the
// perturbation opens the excursion, the next crossing out of it closes it
// and is classified:
//   AntiParallelReturn     exit direction is the reversed entry direction,
//   PassThroughEquivalent  exit direction is the specular continuation the
//                          unperturbed (solid) mouth side would have
//                          produced,
//   Other                  anything else.
// NeverEnters: no entering crossing within max_events (including a
// singular stop before entry, and directions parallel to the mouth).
// NoExit: the orbit stops (max_events or singularity) inside.
template <class R>
ClassifyOutcome<R> classify_perturbation_orbit(
    const PolygonTable<R>& table, const Mouth<R>& mouth, const Vec2<R>& x0,
    const Vec2<R>& dir, std::size_t max_events,
    const Tolerances<R>& tol = Tolerances<R>::defaults()) {
  PhasePoint<R> state{x0, dir};
  std::ptrdiff_t exclude = -1;
  bool inside = false;
  PerturbationVerdict<R> verdict;

  for (std::size_t k = 0; k < max_events; ++k) {
    auto so = abil::detail::step_impl(table, kNoMask, state, +1, exclude, tol);
    if (std::holds_alternative<SingularityReport<R>>(so)) {
      return inside ? ClassifyError::NoExit : ClassifyError::NeverEnters;
    }
    auto& sr = std::get<abil::detail::StepResult<R>>(so);

    R t_cross{};
    Vec2<R> pt{};
    int side_sign = 0;
    if (detail::mouth_crossing(mouth, state.pos, state.dir, sr.event.t_param, t_cross, pt,
                               side_sign)) {
      if (!inside && side_sign > 0) {
        inside = true;
        verdict.entry = Crossing<R>{pt, state.dir};
        verdict.events_inside = 0;
      } else if (inside && side_sign < 0) {
        verdict.exit = Crossing<R>{pt, state.dir};
        Vec2<R> spec_cont = reflect_dir(verdict.entry.dir, mouth.b - mouth.a);
        if (detail::anti_parallel(state.dir, verdict.entry.dir)) {
          verdict.kind = VerdictKind::AntiParallelReturn;
        } else if (detail::same_dir(state.dir, spec_cont)) {
          verdict.kind = VerdictKind::PassThroughEquivalent;
        } else {
          verdict.kind = VerdictKind::Other;
        }
        verdict.direction_delta = angle_diff(angle_of(to_vec2d(verdict.exit.dir)),
                                             angle_of(to_vec2d(verdict.entry.dir)));
        return verdict;
      }
    }
    if (inside) ++verdict.events_inside;
    state = sr.next;
    exclude = static_cast<std::ptrdiff_t>(sr.event.side);
  }
  return inside ? ClassifyError::NoExit : ClassifyError::NeverEnters;
}

// ------------------------------------------------- T-fractal theorem check

struct TheoremReport {
  bool periodic = false;
  bool anti_parallel_exit = true;  // every excursion above the base exits reversed
  std::size_t period_events = 0;
  std::size_t excursions = 0;
  bool singular = false;
  Termination termination = Termination::MaxEvents;
  Rational period_param{};  // exact flow parameter of the period
};

// Exact-rational check of the slope-1/p periodicity property: the orbit
// from (x0, 0) on the base edge with direction (p, 1) must be periodic on
// the level-n prefractal, and every excursion above the base square's top
// line must exit anti-parallel to its entry. x0 must not be a dyadic
// rational (reduced denominator a power of two); p must be odd and > 1.
inline TheoremReport tfractal_theorem_check(const TFractalSpec<Rational>& spec, long p,
                                            const Rational& x0, std::size_t max_events) {
  if (p <= 1 || p % 2 == 0) {
    throw FractalSpecError(FractalError::BadDirection,
                           "direction parameter p must be an odd integer > 1");
  }
  if (!(x0 > 0) || !(x0 < spec.base_width)) {
    throw FractalSpecError(FractalError::InvalidSpec,
                           "basepoint must lie strictly inside the base edge");
  }
  Rational x0c = x0;
  x0c.canonicalize();
  Rational frac = x0c / spec.base_width;  // basepoint as a fraction of the base edge
  frac.canonicalize();
  mpz_class den = frac.get_den();
  if (mpz_popcount(den.get_mpz_t()) == 1) {  // power of two (incl. den = 1)
    throw FractalSpecError(FractalError::DyadicBasepoint,
                           "basepoint is a dyadic rational m/2^l");
  }

  PolygonTableQ table = build_tfractal<Rational>(spec);

  Orbit<Rational> orb =
      orbit<Rational>(table, PhasePoint<Rational>{{x0c, Rational(0)}, {Rational(p), Rational(1)}},
                      max_events);

  TheoremReport rep;
  rep.termination = orb.termination;
  rep.periodic = orb.termination == Termination::Periodic;
  rep.singular = orb.termination == Termination::Singular;
  rep.period_events = orb.period_events;
  rep.period_param = orb.period_param;

  // Walk the flight segments (including the partial segment closing the
  // period) and pair strict crossings of the base top line y = base_width.
  const Rational top = spec.base_width;
  Vec2q pos{x0c, Rational(0)};
  Vec2q dirv{Rational(p), Rational(1)};
  bool in_excursion = false;
  Vec2q entry_dir{};

  auto process_segment = [&](const Vec2q& from, const Vec2q& to, const Vec2q& d) {
    Rational ys = from.y - top;
    Rational ye = to.y - top;
    if (ys < 0 && ye > 0) {
      in_excursion = true;
      entry_dir = d;
    } else if (ys > 0 && ye < 0) {
      if (in_excursion) {
        ++rep.excursions;
        bool anti = cross(d, entry_dir) == 0 && dot(d, entry_dir) < 0;
        if (!anti) rep.anti_parallel_exit = false;
        in_excursion = false;
      }
    }
  };

  for (const auto& ev : orb.events) {
    process_segment(pos, ev.point, dirv);
    pos = ev.point;
    dirv = ev.outgoing;
  }
  if (rep.periodic) {
    process_segment(pos, {x0c, Rational(0)}, dirv);  // closing partial segment
  }
  return rep;
}

}  // namespace abil::fractal
