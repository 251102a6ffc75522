#include "abil/verify.hpp"

#include <cmath>
#include <cstdlib>
#include <limits>
#include <queue>

namespace abil::verify {

namespace {

constexpr double kTangencyCos = 1e-6;  // analytic formula blows up past this
constexpr double kPhiCap = 1.35;       // sampled arrivals stay this far from +-pi/2
constexpr double kPhiHardCap = 1.55;   // pushforward steps beyond this are rejected

}  // namespace

// ------------------------------------------------------------- section map

Mat2 analytic_jacobian(double phi, double phi_prime, double tau, EventKind arrival) {
  double c = std::cos(phi);
  double cp = std::cos(phi_prime);
  if (std::fabs(c) < kTangencyCos || std::fabs(cp) < kTangencyCos) {
    throw NearTangencyError("analytic_jacobian: chart angle within 1e-6 of tangency");
  }
  Mat2 m;
  m.a11 = -c / cp;
  m.a12 = -tau / cp;
  m.a21 = 0.0;
  m.a22 = (arrival == EventKind::Andreev) ? 1.0 : -1.0;
  return m;
}

AndreevPhasePoint<double> section_to_phase(const AndreevTableD& table,
                                           const SectionState& s) {
  const Side<double>& side = table.polygon.sides[s.side];
  Vec2d a = to_vec2d(side.a);
  double cp = std::cos(s.phi), sp = std::sin(s.phi);
  Vec2d pos{a.x + side.u.x * s.r, a.y + side.u.y * s.r};
  Vec2d dir{side.n.x * cp + side.u.x * sp, side.n.y * cp + side.u.y * sp};
  return {pos, dir, +1};
}

std::optional<SectionStep> section_map(const AndreevTableD& table, const SectionState& s) {
  auto so = andreev_step(table, section_to_phase(table, s),
                         static_cast<std::ptrdiff_t>(s.side));
  if (std::holds_alternative<SingularityReport<double>>(so)) return std::nullopt;
  const auto& st = std::get<AndreevStep<double>>(so);
  SectionStep out;
  out.to = SectionState{st.event.side, st.event.r, st.event.phi_out};
  out.kind = st.event.kind;
  out.tau = st.event.tau;
  return out;
}

JacobianSample numeric_jacobian(const AndreevTableD& table, const SectionState& s,
                                double h) {
  JacobianSample out;
  out.from = s;

  auto base = section_map(table, s);
  if (!base) {
    out.chart_break = true;
    return out;
  }
  out.to = base->to;
  out.arrival_kind = base->kind;
  out.tau = base->tau;

  auto stencil = [&](double dr, double dphi) -> std::optional<SectionStep> {
    auto st = section_map(table, SectionState{s.side, s.r + dr, s.phi + dphi});
    if (!st) return std::nullopt;
    if (st->to.side != base->to.side || st->kind != base->kind) return std::nullopt;
    return st;
  };
  auto rp = stencil(+h, 0.0), rm = stencil(-h, 0.0);
  auto fp = stencil(0.0, +h), fm = stencil(0.0, -h);
  if (!rp || !rm || !fp || !fm) {
    out.chart_break = true;
    return out;
  }

  out.numeric.a11 = (rp->to.r - rm->to.r) / (2.0 * h);
  out.numeric.a21 = (rp->to.phi - rm->to.phi) / (2.0 * h);
  out.numeric.a12 = (fp->to.r - fm->to.r) / (2.0 * h);
  out.numeric.a22 = (fp->to.phi - fm->to.phi) / (2.0 * h);

  out.analytic = analytic_jacobian(s.phi, base->to.phi, base->tau, base->kind);

  double c = std::cos(s.phi), cp = std::cos(base->to.phi);
  double det_mag = c / cp;
  out.det_expected = (base->kind == EventKind::Andreev) ? -det_mag : det_mag;

  auto rel = [](double num, double ana) {
    return std::fabs(num - ana) / std::max(1.0, std::fabs(ana));
  };
  out.max_entry_rel_err =
      std::max(std::max(rel(out.numeric.a11, out.analytic.a11),
                        rel(out.numeric.a12, out.analytic.a12)),
               std::max(rel(out.numeric.a21, out.analytic.a21),
                        rel(out.numeric.a22, out.analytic.a22)));
  out.det_rel_err = std::fabs(std::fabs(out.numeric.det()) - det_mag) / det_mag;
  return out;
}

SectionState sample_section_state(const AndreevTableD& table, CounterRng& rng, double h,
                                  std::optional<EventKind> want_kind) {
  const std::size_t n = table.polygon.sides.size();
  for (int attempt = 0; attempt < 100000; ++attempt) {
    std::size_t side = static_cast<std::size_t>(rng.next_below(static_cast<std::uint64_t>(n)));
    double len = table.polygon.sides[side].length;
    SectionState s;
    s.side = side;
    s.r = rng.uniform(0.05, 0.95) * len;
    s.phi = rng.uniform(-1.2, 1.2);

    auto base = section_map(table, s);
    if (!base) continue;
    if (std::fabs(base->to.phi) > kPhiCap) continue;
    if (want_kind && base->kind != *want_kind) continue;
    JacobianSample js = numeric_jacobian(table, s, h);
    if (js.chart_break) continue;
    return s;
  }
  throw std::runtime_error("sample_section_state: no admissible sample found");
}

// --------------------------------------------------------------- measure

namespace {

struct PushResult {
  SectionState final;
  std::vector<std::pair<std::size_t, EventKind>> itinerary;
  bool ok = false;
};

PushResult push_steps(const AndreevTableD& table, SectionState s, int steps) {
  PushResult out;
  out.itinerary.reserve(static_cast<std::size_t>(steps));
  for (int k = 0; k < steps; ++k) {
    auto st = section_map(table, s);
    if (!st) return out;
    if (std::fabs(st->to.phi) > kPhiHardCap) return out;  // FD unreliable there
    out.itinerary.emplace_back(st->to.side, st->kind);
    s = st->to;
  }
  out.final = s;
  out.ok = true;
  return out;
}

}  // namespace

MeasureReport check_measure_preservation(const AndreevTableD& table, const Region& region,
                                         std::size_t n, std::uint64_t seed, int steps,
                                         double h) {
  if (n < 1000) {
    throw std::invalid_argument("check_measure_preservation: n must be >= 1000");
  }
  MeasureReport rep;
  rep.region = region;
  rep.samples = n;
  rep.steps = steps;

  CounterRng rng(seed);
  const double area = (region.r_hi - region.r_lo) * (region.phi_hi - region.phi_lo);
  double sum_before = 0.0, sum_after = 0.0;
  std::size_t accepted = 0;

  for (std::size_t i = 0; i < n; ++i) {
    SectionState s;
    s.side = region.side;
    s.r = rng.uniform(region.r_lo, region.r_hi);
    s.phi = rng.uniform(region.phi_lo, region.phi_hi);

    PushResult base = push_steps(table, s, steps);
    if (!base.ok) {
      ++rep.rejected;
      continue;
    }
    auto pushed = [&](double dr, double dphi) -> std::optional<SectionState> {
      PushResult p = push_steps(table, SectionState{s.side, s.r + dr, s.phi + dphi}, steps);
      if (!p.ok || p.itinerary != base.itinerary) return std::nullopt;
      return p.final;
    };
    auto rp = pushed(+h, 0.0), rm = pushed(-h, 0.0);
    auto fp = pushed(0.0, +h), fm = pushed(0.0, -h);
    if (!rp || !rm || !fp || !fm) {
      ++rep.rejected;
      continue;
    }
    Mat2 j;
    j.a11 = (rp->r - rm->r) / (2.0 * h);
    j.a21 = (rp->phi - rm->phi) / (2.0 * h);
    j.a12 = (fp->r - fm->r) / (2.0 * h);
    j.a22 = (fp->phi - fm->phi) / (2.0 * h);

    sum_before += std::cos(s.phi);
    sum_after += std::cos(base.final.phi) * std::fabs(j.det());
    ++accepted;
  }

  if (accepted > 0) {
    rep.measure_before = area * sum_before / static_cast<double>(accepted);
    rep.measure_after = area * sum_after / static_cast<double>(accepted);
  }
  rep.relative_error = std::fabs(rep.measure_after - rep.measure_before) /
                       std::max(rep.measure_before, 1e-300);
  rep.too_many_singular = rep.rejected * 100 > n;
  return rep;
}

double estimate_total_measure(const AndreevTableD& table, std::size_t n,
                              std::uint64_t seed) {
  double perimeter = 0.0;
  for (const auto& sd : table.polygon.sides) perimeter += sd.length;
  CounterRng rng(seed);
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double u = (static_cast<double>(i) + rng.next_double()) / static_cast<double>(n);
    sum += std::cos(-0.5 * kPi + kPi * u);
  }
  return perimeter * kPi * sum / static_cast<double>(n);
}

Region random_region(const AndreevTableD& table, CounterRng& rng) {
  std::size_t side = static_cast<std::size_t>(
      rng.next_below(static_cast<std::uint64_t>(table.polygon.sides.size())));
  double len = table.polygon.sides[side].length;
  Region d;
  d.side = side;
  double lo = rng.uniform(0.05, 0.45);
  double hi = rng.uniform(lo + 0.1, 0.95);
  d.r_lo = lo * len;
  d.r_hi = hi * len;
  d.phi_lo = rng.uniform(-1.1, 0.5);
  d.phi_hi = rng.uniform(d.phi_lo + 0.2, 1.1);
  return d;
}

// ------------------------------------------------------------ volume sign

FlowSignSample flow_jacobian_sign(const AndreevTableD& table,
                                  const AndreevPhasePoint<double>& p, double t,
                                  double h) {
  FlowSignSample out;
  out.t = t;

  struct EndPoint {
    double x = 0.0, y = 0.0, theta = 0.0;
    std::vector<std::pair<std::size_t, EventKind>> itinerary;
    bool ok = false;
  };
  double base_theta = angle_of(p.dir);

  auto run = [&](double dx, double dy, double dtheta) {
    EndPoint e;
    std::vector<CollisionEvent<double>> events;
    PhasePoint<double> st{{p.pos.x + dx, p.pos.y + dy}, unit_vec(base_theta + dtheta)};
    auto res = detail::flow_param_impl<double>(table.polygon, table.is_andreev, st,
                                               p.parity, t, table.tol, &events);
    if (std::holds_alternative<SingularityReport<double>>(res)) return e;
    const auto& q = std::get<std::pair<PhasePoint<double>, int>>(res).first;
    e.x = q.pos.x;
    e.y = q.pos.y;
    e.theta = angle_of(q.dir);
    e.itinerary.reserve(events.size());
    for (const auto& ev : events) e.itinerary.emplace_back(ev.side, ev.kind);
    e.ok = true;
    return e;
  };

  EndPoint base = run(0.0, 0.0, 0.0);
  if (!base.ok) {
    out.itinerary_mismatch = true;
    return out;
  }
  out.events = base.itinerary.size();
  for (const auto& [side, kind] : base.itinerary) {
    if (kind == EventKind::Andreev) ++out.andreev_hits;
  }
  out.expected_sign = (out.andreev_hits % 2 == 0) ? +1 : -1;

  // Columns of the FD Jacobian; theta is unwrapped against the base value.
  double col[3][3];
  const double dd[3][3] = {{h, 0, 0}, {0, h, 0}, {0, 0, h}};
  for (int j = 0; j < 3; ++j) {
    EndPoint ep = run(dd[j][0], dd[j][1], dd[j][2]);
    EndPoint em = run(-dd[j][0], -dd[j][1], -dd[j][2]);
    if (!ep.ok || !em.ok || ep.itinerary != base.itinerary ||
        em.itinerary != base.itinerary) {
      out.itinerary_mismatch = true;
      return out;
    }
    double tp = base.theta + angle_diff(ep.theta, base.theta);
    double tm = base.theta + angle_diff(em.theta, base.theta);
    col[0][j] = (ep.x - em.x) / (2.0 * h);
    col[1][j] = (ep.y - em.y) / (2.0 * h);
    col[2][j] = (tp - tm) / (2.0 * h);
  }
  out.det = col[0][0] * (col[1][1] * col[2][2] - col[1][2] * col[2][1]) -
            col[0][1] * (col[1][0] * col[2][2] - col[1][2] * col[2][0]) +
            col[0][2] * (col[1][0] * col[2][1] - col[1][1] * col[2][0]);
  return out;
}

// ------------------------------------------------------------ closed flow

namespace {

struct FirstHit {
  ClosedFlowStatus status = ClosedFlowStatus::Ok;
  double time = 0.0;
};

// Classical (all-specular) flight time until the first hit on a marked
// side, capped at `cap` arclength.
FirstHit classical_time_to_marked(const AndreevTableD& table, PhasePoint<double> p,
                                  double cap) {
  FirstHit out;
  std::ptrdiff_t exclude = -1;
  while (out.time <= cap) {
    auto so = detail::step_impl(table.polygon, kNoMask, p, +1, exclude, table.tol);
    if (std::holds_alternative<SingularityReport<double>>(so)) {
      out.status = ClosedFlowStatus::Singular;
      return out;
    }
    auto& sr = std::get<detail::StepResult<double>>(so);
    out.time += sr.event.tau;
    if (table.is_andreev[sr.event.side]) return out;
    p = sr.next;
    exclude = static_cast<std::ptrdiff_t>(sr.event.side);
  }
  out.status = ClosedFlowStatus::NoAHit;
  return out;
}

double phase_residual(const AndreevPhasePoint<double>& got, const Vec2d& x, double theta,
                      int parity) {
  Vec2d dp{got.pos.x - x.x, got.pos.y - x.y};
  double res = norm(dp) + std::fabs(angle_diff(angle_of(got.dir), theta));
  if (got.parity != parity) res += 2.0;
  return res;
}

}  // namespace

ClosedFlowReport closed_flow_check(const AndreevTableD& table, const Vec2d& x,
                                   double theta, double tol, double max_time_factor) {
  ClosedFlowReport rep;
  const double cap = max_time_factor * table.polygon.diameter;
  Vec2d d = unit_vec(theta);

  FirstHit fwd = classical_time_to_marked(table, {x, d}, cap);
  if (fwd.status != ClosedFlowStatus::Ok) {
    rep.status = fwd.status;
    return rep;
  }
  FirstHit bwd = classical_time_to_marked(table, {x, {-d.x, -d.y}}, cap);
  if (bwd.status != ClosedFlowStatus::Ok) {
    rep.status = bwd.status;
    return rep;
  }
  rep.t0 = fwd.time;
  rep.t1 = bwd.time;
  rep.period = 2.0 * (rep.t0 + rep.t1);

  auto at_period = andreev_flow(table, {x, d, +1}, rep.period);
  if (std::holds_alternative<SingularityReport<double>>(at_period)) {
    rep.status = ClosedFlowStatus::Singular;
    rep.residual = std::numeric_limits<double>::infinity();
  } else {
    rep.residual =
        phase_residual(std::get<AndreevPhasePoint<double>>(at_period), x, theta, +1);
    rep.closed = rep.residual < tol;
  }

  auto at_literal = andreev_flow(table, {x, d, +1}, 2.0 * rep.t0 + rep.t1);
  rep.residual_literal =
      std::holds_alternative<SingularityReport<double>>(at_literal)
          ? std::numeric_limits<double>::infinity()
          : phase_residual(std::get<AndreevPhasePoint<double>>(at_literal), x, theta, +1);
  return rep;
}

namespace {

struct FirstHitQ {
  ClosedFlowStatus status = ClosedFlowStatus::Ok;
  Rational s{};
};

FirstHitQ classical_param_to_marked(const AndreevTableQ& table, PhasePoint<Rational> p,
                                    double cap_arclength, double speed) {
  FirstHitQ out;
  std::ptrdiff_t exclude = -1;
  while (to_double(out.s) * speed <= cap_arclength) {
    auto so = detail::step_impl(table.polygon, kNoMask, p, +1, exclude, table.tol);
    if (std::holds_alternative<SingularityReport<Rational>>(so)) {
      out.status = ClosedFlowStatus::Singular;
      return out;
    }
    auto& sr = std::get<detail::StepResult<Rational>>(so);
    out.s += sr.event.t_param;
    if (table.is_andreev[sr.event.side]) return out;
    p = sr.next;
    exclude = static_cast<std::ptrdiff_t>(sr.event.side);
  }
  out.status = ClosedFlowStatus::NoAHit;
  return out;
}

}  // namespace

ClosedFlowReportQ closed_flow_check_exact(const AndreevTableQ& table, const Vec2q& x,
                                          const Vec2q& dir, double max_time_factor) {
  ClosedFlowReportQ rep;
  rep.speed2 = length2(dir);
  const double speed = std::sqrt(to_double(rep.speed2));
  const double cap = max_time_factor * table.polygon.diameter;

  FirstHitQ fwd = classical_param_to_marked(table, {x, dir}, cap, speed);
  if (fwd.status != ClosedFlowStatus::Ok) {
    rep.status = fwd.status;
    return rep;
  }
  FirstHitQ bwd = classical_param_to_marked(table, {x, -dir}, cap, speed);
  if (bwd.status != ClosedFlowStatus::Ok) {
    rep.status = bwd.status;
    return rep;
  }
  rep.s0 = fwd.s;
  rep.s1 = bwd.s;
  rep.period_param = Rational(2) * (rep.s0 + rep.s1);
  rep.t0 = to_double(rep.s0) * speed;
  rep.t1 = to_double(rep.s1) * speed;
  rep.period = to_double(rep.period_param) * speed;

  auto at_period = andreev_flow_param(table, {x, dir, +1}, rep.period_param);
  if (std::holds_alternative<SingularityReport<Rational>>(at_period)) {
    rep.status = ClosedFlowStatus::Singular;
    return rep;
  }
  const auto& q = std::get<AndreevPhasePoint<Rational>>(at_period);
  rep.closed = (q.pos == x) && (q.dir == dir) && (q.parity == +1);
  return rep;
}

// --------------------------------------------------------- direction sets

DirectionOrbit direction_orbit(double theta, const PolygonTableD& table,
                               std::size_t bound, double tol) {
  DirectionOrbit out;
  auto member = [&](double a) {
    for (double b : out.angles) {
      if (std::fabs(angle_diff(a, b)) <= tol) return true;
    }
    return false;
  };

  std::queue<double> pending;
  out.angles.push_back(canonical_angle(theta));
  pending.push(out.angles.back());
  while (!pending.empty()) {
    double a = pending.front();
    pending.pop();
    for (const auto& sd : table.sides) {
      double next = specular_reflect(a, sd.inclination);
      if (member(next)) continue;
      if (out.angles.size() >= bound) {
        out.closed = false;
        std::sort(out.angles.begin(), out.angles.end());
        return out;
      }
      out.angles.push_back(next);
      pending.push(next);
    }
  }
  std::sort(out.angles.begin(), out.angles.end());
  return out;
}

// ------------------------------------------------------- angle rationality

double interior_angle(const PolygonTableD& table, std::size_t vertex) {
  std::size_t n = table.sides.size();
  const Side<double>& in = table.sides[(vertex + n - 1) % n];
  const Side<double>& outs = table.sides[vertex];
  double turn = angle_diff(angle_of(outs.u), angle_of(in.u));
  return kPi - turn;  // in (0, 2*pi) for a simple polygon
}

RationalityReport is_rational(const PolygonTableD& table, long q_max, double eps) {
  RationalityReport rep;
  rep.rational = true;
  std::size_t n = table.vertices.size();
  rep.witnesses.reserve(n);

  for (std::size_t v = 0; v < n; ++v) {
    AngleWitness w;
    w.vertex = v;
    w.angle = interior_angle(table, v);
    double x = w.angle / kPi;  // in (0, 2)

    // Continued-fraction convergents p/q of x; accept the first with
    // |x - p/q| <= eps/q^2.
    long h_prev = 1, k_prev = 0;
    long h_cur = static_cast<long>(std::floor(x)), k_cur = 1;
    double frac = x - std::floor(x);
    for (int it = 0; it < 64; ++it) {
      double err = std::fabs(x - static_cast<double>(h_cur) / static_cast<double>(k_cur));
      if (k_cur <= q_max && err <= eps / (static_cast<double>(k_cur) * static_cast<double>(k_cur))) {
        w.rational = true;
        w.p = h_cur;
        w.q = k_cur;
        break;
      }
      if (frac < 1e-18 || k_cur > q_max) break;
      double inv = 1.0 / frac;
      double af = std::floor(inv);
      // Stop before the convergent recurrence can overflow a long.
      if (af * static_cast<double>(k_cur) + static_cast<double>(k_prev) > 4e18) break;
      long a = static_cast<long>(af);
      long h_next = a * h_cur + h_prev;
      long k_next = a * k_cur + k_prev;
      h_prev = h_cur;
      k_prev = k_cur;
      h_cur = h_next;
      k_cur = k_next;
      frac = inv - af;
    }
    if (!w.rational) rep.rational = false;
    rep.witnesses.push_back(w);
  }
  return rep;
}

}  // namespace abil::verify
