#pragma once

// Planar polygon geometry shared by both arithmetic modes.
//
// A table is a simple polygon with vertices in counterclockwise order;
// collinear runs are merged at construction so every side is maximal.
// Directions are vectors (exact slopes in rational mode); angles are a
// derived double-precision view. The Birkhoff chart used everywhere is
// pinned here once:
//
//   r   = arclength from the side's start vertex (CCW order),
//   phi = atan2(d.u, d.n) in (-pi/2, pi/2),
//
// with u the unit tangent (start -> end), n the inward normal (u rotated
// +90 degrees) and d the outgoing direction; an incoming direction is
// charted through its reversal w = -d. Jacobian formulas and the angle
// bookkeeping tests depend on this exact convention.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "abil/scalar.hpp"

namespace abil {

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;

// ---------------------------------------------------------------- vectors

template <class R>
struct Vec2 {
  R x{};
  R y{};

  Vec2() = default;
  Vec2(R px, R py) : x(std::move(px)), y(std::move(py)) {}

  Vec2 operator+(const Vec2& o) const { return {x + o.x, y + o.y}; }
  Vec2 operator-(const Vec2& o) const { return {x - o.x, y - o.y}; }
  Vec2 operator-() const { return {-x, -y}; }
  Vec2 operator*(const R& s) const { return {x * s, y * s}; }
  bool operator==(const Vec2& o) const { return x == o.x && y == o.y; }
  bool operator!=(const Vec2& o) const { return !(*this == o); }
};

using Vec2d = Vec2<double>;
using Vec2q = Vec2<Rational>;

template <class R>
inline R dot(const Vec2<R>& a, const Vec2<R>& b) {
  return a.x * b.x + a.y * b.y;
}

template <class R>
inline R cross(const Vec2<R>& a, const Vec2<R>& b) {
  return a.x * b.y - a.y * b.x;
}

template <class R>
inline R length2(const Vec2<R>& v) {
  return dot(v, v);
}

// Rotation by +90 degrees; maps the CCW tangent to the inward normal.
template <class R>
inline Vec2<R> rot90(const Vec2<R>& v) {
  return {-v.y, v.x};
}

template <class R>
inline Vec2d to_vec2d(const Vec2<R>& v) {
  return {to_double(v.x), to_double(v.y)};
}

inline double norm(const Vec2d& v) { return std::hypot(v.x, v.y); }

// ----------------------------------------------------------------- angles

// Canonical angle representative in [0, 2*pi).
inline double canonical_angle(double rad) {
  double a = std::fmod(rad, kTwoPi);
  if (a < 0.0) a += kTwoPi;
  if (a == kTwoPi) a = 0.0;
  return a;
}

// Canonical line inclination in [0, pi).
inline double canonical_inclination(double rad) {
  double a = std::fmod(rad, kPi);
  if (a < 0.0) a += kPi;
  if (a == kPi) a = 0.0;
  return a;
}

inline double angle_of(const Vec2d& v) { return canonical_angle(std::atan2(v.y, v.x)); }

inline Vec2d unit_vec(double angle) { return {std::cos(angle), std::sin(angle)}; }

// Signed distance of two angles on the circle, result in (-pi, pi].
inline double angle_diff(double a, double b) {
  double d = std::fmod(a - b, kTwoPi);
  if (d > kPi) d -= kTwoPi;
  if (d <= -kPi) d += kTwoPi;
  return d;
}

// Specular reflection law in angle form: theta' = 2*gamma - theta (mod 2pi).
inline double specular_reflect(double incoming, double side_inclination) {
  return canonical_angle(2.0 * side_inclination - incoming);
}

// True when the direction is within eps (radians) of the side's line.
inline double grazing_defect(double incoming, double side_inclination) {
  double m = std::fmod(std::fabs(incoming - side_inclination), kPi);
  return std::min(m, kPi - m);
}

inline bool is_grazing(double incoming, double side_inclination, double eps = kEpsGrazing) {
  return grazing_defect(incoming, side_inclination) < eps;
}

// Vector form of the reflection law: reflect d across the side direction e.
// Exact in rational mode (orthogonal map, |d| preserved).
template <class R>
inline Vec2<R> reflect_dir(const Vec2<R>& d, const Vec2<R>& e) {
  R k = R(2) * dot(d, e);
  R ee = length2(e);
  return {(k * e.x - d.x * ee) / ee, (k * e.y - d.y * ee) / ee};
}

// ------------------------------------------------------------------ sides

template <class R>
struct Side {
  Vec2<R> a;       // start vertex (CCW order)
  Vec2<R> b;       // end vertex
  Vec2<R> seg;     // b - a
  Vec2<R> normal;  // rot90(seg): inward, unnormalized (exact sign tests)
  double length = 0.0;
  double inclination = 0.0;  // line angle in [0, pi)
  Vec2d u;                   // unit tangent, double view
  Vec2d n;                   // unit inward normal, double view

  bool is_vertical(const R& eps_rel) const {
    if constexpr (scalar_traits<R>::exact) {
      return seg.x == 0;
    } else {
      return std::fabs(to_double(seg.x)) <= to_double(eps_rel) * length;
    }
  }
};

// ---------------------------------------------------------------- polygon

enum class PolygonError {
  TooFewVertices,
  DegenerateSide,
  SpikeVertex,  // interior angle of 0 or 2*pi
  NonSimplePolygon,
};

class ValidationError : public std::runtime_error {
 public:
  ValidationError(PolygonError code, const std::string& what)
      : std::runtime_error(what), code_(code) {}
  PolygonError code() const { return code_; }

 private:
  PolygonError code_;
};

template <class R>
struct PolygonTable {
  std::vector<Vec2<R>> vertices;  // CCW, collinear runs merged
  std::vector<Side<R>> sides;     // sides[i] = vertices[i] -> vertices[i+1]
  double diameter = 0.0;

  std::size_t size() const { return sides.size(); }
};

using PolygonTableD = PolygonTable<double>;
using PolygonTableQ = PolygonTable<Rational>;

namespace detail {

// Orientation of c relative to the directed line a->b: sign of the cross
// product. Exact in rational mode.
template <class R>
inline int orient(const Vec2<R>& a, const Vec2<R>& b, const Vec2<R>& c) {
  R v = cross(b - a, c - a);
  if (v > 0) return 1;
  if (v < 0) return -1;
  return 0;
}

template <class R>
inline bool bbox_overlap(const Vec2<R>& p1, const Vec2<R>& p2, const Vec2<R>& q1,
                         const Vec2<R>& q2) {
  auto mn = [](const R& s, const R& t) { return s < t ? s : t; };
  auto mx = [](const R& s, const R& t) { return s < t ? t : s; };
  return !(mx(p1.x, p2.x) < mn(q1.x, q2.x) || mx(q1.x, q2.x) < mn(p1.x, p2.x) ||
           mx(p1.y, p2.y) < mn(q1.y, q2.y) || mx(q1.y, q2.y) < mn(p1.y, p2.y));
}

// True when closed segments [p1,p2] and [q1,q2] share at least one point.
template <class R>
inline bool segments_touch(const Vec2<R>& p1, const Vec2<R>& p2, const Vec2<R>& q1,
                           const Vec2<R>& q2) {
  if (!bbox_overlap(p1, p2, q1, q2)) return false;
  int o1 = orient(p1, p2, q1);
  int o2 = orient(p1, p2, q2);
  int o3 = orient(q1, q2, p1);
  int o4 = orient(q1, q2, p2);
  if (o1 * o2 < 0 && o3 * o4 < 0) return true;        // proper crossing
  if (o1 == 0 && o2 == 0) return true;                // collinear + bbox overlap
  if (o1 == 0 || o2 == 0 || o3 == 0 || o4 == 0) return true;  // endpoint touch
  return false;
}

}  // namespace detail

// Validates raw vertices and builds the table: merges collinear adjacent
// runs silently, rejects spikes/degenerate sides/self-contact, normalizes
// to CCW. Throws ValidationError.
template <class R>
PolygonTable<R> validate_polygon(std::vector<Vec2<R>> verts) {
  if (verts.size() >= 2 && verts.front() == verts.back()) verts.pop_back();

  // Drop exact duplicates of consecutive vertices before angle tests.
  {
    std::vector<Vec2<R>> dedup;
    dedup.reserve(verts.size());
    for (const auto& v : verts) {
      if (dedup.empty() || !(dedup.back() == v)) dedup.push_back(v);
    }
    if (dedup.size() >= 2 && dedup.front() == dedup.back()) dedup.pop_back();
    verts = std::move(dedup);
  }
  if (verts.size() < 3) {
    throw ValidationError(PolygonError::TooFewVertices,
                          "polygon needs at least 3 distinct vertices");
  }

  // Merge collinear adjacent sides; reject folded-back spikes.
  for (std::size_t i = 0; i < verts.size();) {
    std::size_t n = verts.size();
    if (n < 3) {
      throw ValidationError(PolygonError::TooFewVertices,
                            "polygon collapsed while merging collinear vertices");
    }
    const Vec2<R>& prev = verts[(i + n - 1) % n];
    const Vec2<R>& cur = verts[i];
    const Vec2<R>& next = verts[(i + 1) % n];
    Vec2<R> e1 = cur - prev;
    Vec2<R> e2 = next - cur;
    bool collinear;
    if constexpr (scalar_traits<R>::exact) {
      collinear = cross(e1, e2) == 0;
    } else {
      collinear = std::fabs(to_double(cross(e1, e2))) <=
                  1e-12 * std::sqrt(to_double(length2(e1)) * to_double(length2(e2)));
    }
    if (collinear) {
      if (dot(e1, e2) < 0) {
        throw ValidationError(PolygonError::SpikeVertex,
                              "interior angle of 0 or 2*pi at a vertex");
      }
      verts.erase(verts.begin() + static_cast<std::ptrdiff_t>(i));
      if (i > 0) --i;  // the merge may make the previous vertex collinear
    } else {
      ++i;
    }
  }
  if (verts.size() < 3) {
    throw ValidationError(PolygonError::TooFewVertices,
                          "polygon needs at least 3 non-collinear vertices");
  }

  // Normalize to counterclockwise orientation (positive signed area).
  R twice_area(0);
  for (std::size_t i = 0; i < verts.size(); ++i) {
    twice_area += cross(verts[i], verts[(i + 1) % verts.size()]);
  }
  if (twice_area == 0) {
    throw ValidationError(PolygonError::DegenerateSide, "polygon has zero area");
  }
  if (twice_area < 0) std::reverse(verts.begin(), verts.end());

  PolygonTable<R> table;
  table.vertices = std::move(verts);
  std::size_t n = table.vertices.size();
  table.sides.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    Side<R> s;
    s.a = table.vertices[i];
    s.b = table.vertices[(i + 1) % n];
    s.seg = s.b - s.a;
    s.normal = rot90(s.seg);
    double len2d = to_double(length2(s.seg));
    s.length = std::sqrt(len2d);
    if (s.length <= 1e-12) {
      throw ValidationError(PolygonError::DegenerateSide, "zero-length side");
    }
    Vec2d segd = to_vec2d(s.seg);
    s.u = {segd.x / s.length, segd.y / s.length};
    s.n = {-s.u.y, s.u.x};
    s.inclination = canonical_inclination(std::atan2(segd.y, segd.x));
    table.sides.push_back(std::move(s));
  }

  // Simplicity: non-adjacent sides must not touch at all. Adjacent sides
  // already meet only at the shared vertex (spikes were rejected above).
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      bool adjacent = (j == i + 1) || (i == 0 && j == n - 1);
      if (adjacent) continue;
      if (detail::segments_touch(table.sides[i].a, table.sides[i].b, table.sides[j].a,
                                 table.sides[j].b)) {
        throw ValidationError(PolygonError::NonSimplePolygon,
                              "non-adjacent sides intersect");
      }
    }
  }

  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      Vec2d d = to_vec2d(table.vertices[i] - table.vertices[j]);
      table.diameter = std::max(table.diameter, norm(d));
    }
  }
  return table;
}

// ---------------------------------------------------------------- ray cast

template <class R>
struct RayHit {
  std::size_t side = 0;
  Vec2<R> point{};
  R t{};        // ray parameter: point = origin + t * dir
  R s_param{};  // position along the side in [0, 1]
  double tau = 0.0;  // Euclidean distance origin -> point
};

enum class RayError {
  NoHit,      // no side ahead (tolerance failure for interior origins)
  CornerHit,  // nearest hit within the corner epsilon of a vertex
};

template <class R>
struct RayFailure {
  RayError kind;
  Vec2<R> near_point{};  // best hit location for diagnostics (CornerHit)
};

template <class R>
using RayOutcome = std::variant<RayHit<R>, RayFailure<R>>;

// Casts origin + t*dir (t > eps_time) against all sides except
// exclude_side and returns the nearest transversal hit. A straight ray
// leaving a side can never re-hit that side's line, so excluding the
// departure side is sound for any simple polygon.
template <class R>
RayOutcome<R> ray_cast(const PolygonTable<R>& table, const Vec2<R>& origin,
                       const Vec2<R>& dir, std::ptrdiff_t exclude_side = -1,
                       const Tolerances<R>& tol = Tolerances<R>::defaults()) {
  bool found = false;
  RayHit<R> best;
  for (std::size_t i = 0; i < table.sides.size(); ++i) {
    if (static_cast<std::ptrdiff_t>(i) == exclude_side) continue;
    const Side<R>& sd = table.sides[i];
    R denom = cross(dir, sd.seg);
    if (denom == 0) continue;  // parallel: no transversal hit
    Vec2<R> ao = sd.a - origin;
    R t = cross(ao, sd.seg) / denom;
    if (!(t > tol.time)) continue;
    R s = cross(ao, dir) / denom;
    R slack(0);
    if constexpr (!scalar_traits<R>::exact) {
      slack = to_double(tol.corner) / sd.length;
    }
    if (s < -slack || s > R(1) + slack) continue;
    if (s < 0) s = R(0);
    if (s > 1) s = R(1);
    if (found && !(t < best.t)) continue;
    best.side = i;
    best.t = t;
    best.s_param = s;
    best.point = sd.a + Vec2<R>{sd.seg.x * s, sd.seg.y * s};
    found = true;
  }
  if (!found) return RayFailure<R>{RayError::NoHit, origin};

  const Side<R>& sd = table.sides[best.side];
  bool corner;
  if constexpr (scalar_traits<R>::exact) {
    corner = best.point == sd.a || best.point == sd.b;
  } else {
    double eps2 = to_double(tol.corner) * to_double(tol.corner);
    corner = to_double(length2(best.point - sd.a)) <= eps2 ||
             to_double(length2(best.point - sd.b)) <= eps2;
  }
  if (corner) return RayFailure<R>{RayError::CornerHit, best.point};

  best.tau = to_double(best.t) * std::sqrt(to_double(length2(dir)));
  return best;
}

// ------------------------------------------------------- containment test

// True when p lies in the closed polygon (boundary within tol counts).
template <class R>
bool contains(const PolygonTable<R>& table, const Vec2<R>& p,
              const Tolerances<R>& tol = Tolerances<R>::defaults()) {
  for (const Side<R>& sd : table.sides) {
    R c = cross(sd.seg, p - sd.a);
    R proj = dot(sd.seg, p - sd.a);
    bool on_line;
    if constexpr (scalar_traits<R>::exact) {
      on_line = (c == 0);
    } else {
      on_line = std::fabs(to_double(c)) <= to_double(tol.on_side) * sd.length;
    }
    if (on_line && proj >= 0 && proj <= length2(sd.seg)) return true;
  }
  // Crossing-number against a horizontal ray to the right.
  bool inside = false;
  std::size_t n = table.vertices.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2<R>& a = table.vertices[i];
    const Vec2<R>& b = table.vertices[(i + 1) % n];
    bool a_above = a.y > p.y;
    bool b_above = b.y > p.y;
    if (a_above == b_above) continue;
    // x-coordinate of the side at height p.y
    R xc = a.x + (b.x - a.x) * ((p.y - a.y) / (b.y - a.y));
    if (xc > p.x) inside = !inside;
  }
  return inside;
}

// ----------------------------------------------------------- chart (r,phi)

struct BoundaryCoords {
  double r = 0.0;    // arclength from the side's start vertex
  double phi = 0.0;  // signed angle from the inward normal, (-pi/2, pi/2)
};

// Chart angle of an outgoing (inward-pointing) direction on a side.
template <class R>
inline double phi_of_outgoing(const Side<R>& side, const Vec2d& d) {
  return std::atan2(d.x * side.u.x + d.y * side.u.y, d.x * side.n.x + d.y * side.n.y);
}

// Chart angle of an incoming (boundary-bound) direction: chart its reversal.
template <class R>
inline double phi_of_incoming(const Side<R>& side, const Vec2d& d) {
  return phi_of_outgoing(side, {-d.x, -d.y});
}

// Boundary coordinates of a hit point with an incoming travel direction.
// Returns nullopt (OffSide) when the point is not on the side within tol.
template <class R>
std::optional<BoundaryCoords> boundary_coords(const Side<R>& side, const Vec2<R>& hit,
                                              double incoming_angle,
                                              const Tolerances<R>& tol =
                                                  Tolerances<R>::defaults()) {
  Vec2<R> rel = hit - side.a;
  R c = cross(side.seg, rel);
  R proj = dot(side.seg, rel);
  if constexpr (scalar_traits<R>::exact) {
    if (c != 0 || proj < 0 || proj > length2(side.seg)) return std::nullopt;
  } else {
    if (std::fabs(to_double(c)) > to_double(tol.on_side) * side.length)
      return std::nullopt;
    double pd = to_double(proj);
    double lim = to_double(tol.on_side) * side.length;
    if (pd < -lim || pd > to_double(length2(side.seg)) + lim) return std::nullopt;
  }
  BoundaryCoords bc;
  bc.r = to_double(proj) / side.length;
  bc.phi = phi_of_incoming(side, unit_vec(incoming_angle));
  return bc;
}

}  // namespace abil
