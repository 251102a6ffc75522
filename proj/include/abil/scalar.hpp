#pragma once

// Scalar seam for the two arithmetic modes of the engine.
//
// Every geometric routine is templated on the scalar type R:
//   * double    -- fast mode; comparisons use the tolerance block below.
//   * Rational  -- exact mode (GMP mpq); every tolerance is exactly zero,
//                  so the same comparison code degenerates to exact
//                  predicates and orbit recurrences become decidable.
//
// Directions in exact mode are slope pairs (dx, dy), never angles; angle
// views are derived on demand in double precision for reporting only.

#include <gmpxx.h>

#include <cmath>
#include <cstdint>
#include <string>

namespace abil {

using Rational = mpq_class;

// Pinned float-mode tolerances. Changing any of these invalidates the
// frozen expected values in the test suite; do not tune casually.
inline constexpr double kEpsCorner = 1e-9;    // vertex proximity => singular hit
inline constexpr double kEpsGrazing = 1e-9;   // rad; tangential impact => singular
inline constexpr double kEpsTime = 1e-12;     // min forward ray parameter
inline constexpr double kEpsOnSide = 1e-9;    // boundary-coordinate membership
inline constexpr double kEpsPeriodic = 1e-9;  // orbit recurrence (pos & dir)
inline constexpr double kFdStep = 1e-6;       // central finite-difference h

template <class R>
struct scalar_traits;

template <>
struct scalar_traits<double> {
  static constexpr bool exact = false;
  static double from_int(long v) { return static_cast<double>(v); }
  static double to_double(double v) { return v; }
  static double abs(double v) { return std::fabs(v); }
};

template <>
struct scalar_traits<Rational> {
  static constexpr bool exact = true;
  static Rational from_int(long v) { return Rational(v); }
  static double to_double(const Rational& v) { return v.get_d(); }
  static Rational abs(const Rational& v) { return ::abs(v); }
};

template <class R>
inline double to_double(const R& v) {
  return scalar_traits<R>::to_double(v);
}

// Mode-dependent tolerances: float mode uses the pinned constants, exact
// mode uses zeros so that "dist <= corner" etc. become exact equalities.
template <class R>
struct Tolerances {
  R corner;
  R grazing;
  R time;
  R on_side;

  static Tolerances defaults() {
    if constexpr (scalar_traits<R>::exact) {
      return {R(0), R(0), R(0), R(0)};
    } else {
      return {kEpsCorner, kEpsGrazing, kEpsTime, kEpsOnSide};
    }
  }
};

// Parses "p/q" or "p" into an exact rational (used by table files and the
// CLI slope syntax). Throws std::invalid_argument on malformed input.
Rational rational_from_string(const std::string& text);
std::string rational_to_string(const Rational& v);

}  // namespace abil
