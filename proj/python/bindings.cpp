// Python bindings: table construction and I/O, orbit simulation in both
// precisions, rendering, and the verification entry points.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "abil/andreev.hpp"
#include "abil/fractal.hpp"
#include "abil/render.hpp"
#include "abil/rng.hpp"
#include "abil/table_io.hpp"
#include "abil/verify.hpp"

namespace py = pybind11;
using namespace abil;

namespace {

// Accept ints, floats, or exact strings like "1/3" wherever a coordinate
// or length is expected.
Rational to_rational(const py::handle& v) {
  if (py::isinstance<py::str>(v)) return rational_from_string(v.cast<std::string>());
  if (py::isinstance<py::int_>(v)) return Rational(v.cast<long>());
  double d = v.cast<double>();
  if (!std::isfinite(d)) throw std::invalid_argument("coordinate must be finite");
  return Rational(d);
}

io::TableFile make_polygon_file(std::vector<std::pair<py::object, py::object>> verts,
                                std::vector<std::size_t> andreev,
                                const std::string& mode) {
  io::TableFile tf;
  if (mode == "rational") {
    tf.mode = io::ScalarMode::Rational;
  } else if (mode == "float64") {
    tf.mode = io::ScalarMode::Float64;
  } else {
    throw std::invalid_argument("mode must be 'rational' or 'float64'");
  }
  for (const auto& [x, y] : verts) tf.vertices.push_back({to_rational(x), to_rational(y)});
  tf.andreev_sides = std::move(andreev);
  io::validate_table_file(tf);
  return tf;
}

io::TableFile make_rect_file(const py::object& w, const py::object& h,
                             std::vector<std::size_t> andreev, const std::string& mode) {
  Rational W = to_rational(w), H = to_rational(h);
  io::TableFile tf;
  tf.mode = mode == "float64" ? io::ScalarMode::Float64 : io::ScalarMode::Rational;
  if (mode != "float64" && mode != "rational") {
    throw std::invalid_argument("mode must be 'rational' or 'float64'");
  }
  tf.vertices = {{Rational(0), Rational(0)}, {W, Rational(0)}, {W, H}, {Rational(0), H}};
  tf.andreev_sides = std::move(andreev);
  io::validate_table_file(tf);
  return tf;
}

// "dy/dx" (exact slope, quadrant preserved) or a plain rational slope.
Vec2<Rational> parse_direction(const std::string& text) {
  auto slash = text.find('/');
  if (slash == std::string::npos) {
    return {Rational(1), rational_from_string(text)};
  }
  Rational dy = rational_from_string(text.substr(0, slash));
  Rational dx = rational_from_string(text.substr(slash + 1));
  if (dx == 0 && dy == 0) throw std::invalid_argument("direction must be nonzero");
  return {dx, dy};
}

struct PyEvent {
  std::size_t side;
  double x, y, r, phi, tau;
  std::string kind;
  int parity_after;
};

struct PyOrbit {
  std::vector<PyEvent> events;
  std::string termination;
  std::optional<std::string> singularity;
  double total_length = 0.0;
  std::size_t period_events = 0;
  double period_length = 0.0;
  // Render inputs captured at simulation time.
  io::TableFile table;
  std::string csv;
  render::Polyline polyline;
};

const char* termination_name(Termination t) {
  switch (t) {
    case Termination::Periodic: return "periodic";
    case Termination::Singular: return "singular";
    default: return "max_events";
  }
}

const char* singular_name(SingularKind k) {
  switch (k) {
    case SingularKind::CornerHit: return "corner";
    case SingularKind::GrazingImpact: return "grazing";
    default: return "no_hit";
  }
}

template <class R>
PyOrbit orbit_to_py(const io::TableFile& tf, const Vec2<R>& start, const Orbit<R>& o) {
  PyOrbit out;
  for (const CollisionEvent<R>& e : o.events) {
    out.events.push_back({e.side, to_double(e.point.x), to_double(e.point.y), e.r,
                          e.phi_out, e.tau,
                          e.kind == EventKind::Andreev ? "andreev" : "specular",
                          e.parity_after});
  }
  out.termination = termination_name(o.termination);
  if (o.singularity) out.singularity = singular_name(o.singularity->kind);
  out.total_length = o.total_length;
  out.period_events = o.period_events;
  out.period_length = o.period_length;
  out.table = tf;
  out.csv = render::csv_document(o);
  out.polyline = render::orbit_polyline(start, o);
  return out;
}

PyOrbit simulate(const io::TableFile& tf, std::pair<py::object, py::object> pos,
                 std::optional<double> theta, std::optional<std::string> direction,
                 int parity, std::size_t max_events) {
  if (theta.has_value() == direction.has_value()) {
    throw std::invalid_argument("give exactly one of theta= or direction=");
  }
  if (parity != 1 && parity != -1) throw std::invalid_argument("parity must be +-1");
  Vec2<Rational> p{to_rational(pos.first), to_rational(pos.second)};
  if (direction) {
    AndreevTableQ table = tf.to_table_q();
    if (!contains(table.polygon, p)) throw std::invalid_argument("start point outside table");
    Vec2<Rational> dir = parse_direction(*direction);
    Orbit<Rational> o = andreev_orbit(table, {p, dir, parity}, max_events);
    return orbit_to_py(tf, p, o);
  }
  AndreevTableD table = tf.to_table_d();
  Vec2d pd{to_double(p.x), to_double(p.y)};
  if (!contains(table.polygon, pd)) throw std::invalid_argument("start point outside table");
  Orbit<double> o = andreev_orbit(table, {pd, unit_vec(*theta), parity}, max_events);
  return orbit_to_py(tf, pd, o);
}

py::dict closed_flow(const io::TableFile& tf, std::pair<double, double> pos, double theta,
                     double tol) {
  verify::ClosedFlowReport r =
      verify::closed_flow_check(tf.to_table_d(), {pos.first, pos.second}, theta, tol);
  py::dict d;
  d["status"] = r.status == verify::ClosedFlowStatus::Ok
                    ? "ok"
                    : (r.status == verify::ClosedFlowStatus::NoAHit ? "no_marked_hit"
                                                                    : "singular");
  d["t0"] = r.t0;
  d["t1"] = r.t1;
  d["period"] = r.period;
  d["closed"] = r.closed;
  d["residual"] = r.residual;
  return d;
}

py::dict closed_flow_exact(const io::TableFile& tf, std::pair<py::object, py::object> pos,
                           const std::string& direction) {
  verify::ClosedFlowReportQ r = verify::closed_flow_check_exact(
      tf.to_table_q(), {to_rational(pos.first), to_rational(pos.second)},
      parse_direction(direction));
  py::dict d;
  d["status"] = r.status == verify::ClosedFlowStatus::Ok
                    ? "ok"
                    : (r.status == verify::ClosedFlowStatus::NoAHit ? "no_marked_hit"
                                                                    : "singular");
  d["period_param"] = rational_to_string(r.period_param);
  d["period"] = r.period;
  d["closed"] = r.closed;
  return d;
}

py::dict jacobian_check(const io::TableFile& tf, int samples, std::uint64_t seed) {
  if (samples < 1) throw std::invalid_argument("samples must be positive");
  AndreevTableD table = tf.to_table_d();
  CounterRng rng(seed);
  double max_entry = 0.0, max_det = 0.0;
  for (int i = 0; i < samples; ++i) {
    verify::JacobianSample js =
        verify::numeric_jacobian(table, verify::sample_section_state(table, rng));
    max_entry = std::max(max_entry, js.max_entry_rel_err);
    max_det = std::max(max_det, js.det_rel_err);
  }
  py::dict d;
  d["samples"] = samples;
  d["max_entry_rel_err"] = max_entry;
  d["max_det_rel_err"] = max_det;
  return d;
}

py::dict measure_check(const io::TableFile& tf, int regions, std::size_t samples,
                       std::uint64_t seed) {
  AndreevTableD table = tf.to_table_d();
  CounterRng rng(seed);
  double worst = 0.0;
  for (int k = 0; k < regions; ++k) {
    verify::MeasureReport rep = verify::check_measure_preservation(
        table, verify::random_region(table, rng), samples,
        seed + 1000003 * static_cast<std::uint64_t>(k + 1));
    worst = std::max(worst, rep.relative_error);
  }
  double perimeter = 0.0;
  for (const auto& s : table.polygon.sides) perimeter += to_double(s.length);
  py::dict d;
  d["regions"] = regions;
  d["worst_rel_err"] = worst;
  d["total_estimate"] = verify::estimate_total_measure(table, samples, seed);
  d["total_exact"] = 2.0 * perimeter;
  return d;
}

py::dict tfractal_theorem(int level, long p, const std::string& x0,
                          std::size_t max_events) {
  fractal::TFractalSpec<Rational> spec;
  spec.level = level;
  fractal::TheoremReport r =
      fractal::tfractal_theorem_check(spec, p, rational_from_string(x0), max_events);
  py::dict d;
  d["periodic"] = r.periodic;
  d["anti_parallel_exit"] = r.anti_parallel_exit;
  d["period_events"] = r.period_events;
  d["excursions"] = r.excursions;
  d["period_param"] = rational_to_string(r.period_param);
  return d;
}

std::string classify_notch(std::pair<py::object, py::object> host,
                           std::pair<py::object, py::object> cell_offset_width,
                           const py::object& depth, std::size_t side,
                           std::pair<py::object, py::object> x0, const std::string& direction,
                           std::size_t max_events) {
  fractal::NotchSpec<Rational> spec{to_rational(host.first), to_rational(host.second),
                                    side, to_rational(cell_offset_width.first),
                                    to_rational(cell_offset_width.second),
                                    to_rational(depth)};
  fractal::NotchedTable<Rational> nt = fractal::build_notched_rect(spec);
  auto out = fractal::classify_perturbation_orbit<Rational>(
      nt.polygon, nt.mouth, {to_rational(x0.first), to_rational(x0.second)},
      parse_direction(direction), max_events);
  if (auto* v = std::get_if<fractal::PerturbationVerdict<Rational>>(&out)) {
    switch (v->kind) {
      case fractal::VerdictKind::AntiParallelReturn: return "anti_parallel_return";
      case fractal::VerdictKind::PassThroughEquivalent: return "pass_through_equivalent";
      default: return "other";
    }
  }
  return std::get<fractal::ClassifyError>(out) == fractal::ClassifyError::NeverEnters
             ? "never_enters"
             : "no_exit";
}

std::string table_svg(const io::TableFile& tf, const std::vector<PyOrbit>& orbits) {
  std::vector<render::Polyline> lines;
  for (const PyOrbit& o : orbits) lines.push_back(o.polyline);
  return render::svg_document(tf.to_table_d(), lines);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Polygonal billiards with retro-reflecting (parity-flipping) sides";

  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const io::TableIoFailure& e) {
      PyErr_SetString(PyExc_ValueError, e.what());
    } catch (const ValidationError& e) {
      PyErr_SetString(PyExc_ValueError, e.what());
    } catch (const AndreevValidationError& e) {
      PyErr_SetString(PyExc_ValueError, e.what());
    } catch (const fractal::FractalSpecError& e) {
      PyErr_SetString(PyExc_ValueError, e.what());
    }
  });

  py::class_<io::TableFile>(m, "Table")
      .def_property_readonly("mode",
                             [](const io::TableFile& tf) {
                               return tf.mode == io::ScalarMode::Rational ? "rational"
                                                                          : "float64";
                             })
      .def_property_readonly("vertices",
                             [](const io::TableFile& tf) {
                               std::vector<std::pair<std::string, std::string>> out;
                               for (const auto& v : tf.vertices) {
                                 out.emplace_back(rational_to_string(v.x),
                                                  rational_to_string(v.y));
                               }
                               return out;
                             })
      .def_property_readonly(
          "andreev_sides",
          [](const io::TableFile& tf) { return tf.andreev_sides; })
      .def("to_json", &io::serialize_table_file)
      .def("save", [](const io::TableFile& tf, const std::string& path) {
        io::save_table_file(tf, path);
      })
      .def_static("parse", &io::parse_table_file, py::arg("text"))
      .def_static("load", &io::load_table_file, py::arg("path"))
      .def("__repr__", [](const io::TableFile& tf) {
        return "<Table " + std::to_string(tf.vertices.size()) + " vertices, " +
               std::to_string(tf.andreev_sides.size()) + " marked>";
      });

  py::class_<PyEvent>(m, "Event")
      .def_readonly("side", &PyEvent::side)
      .def_readonly("x", &PyEvent::x)
      .def_readonly("y", &PyEvent::y)
      .def_readonly("r", &PyEvent::r)
      .def_readonly("phi", &PyEvent::phi)
      .def_readonly("tau", &PyEvent::tau)
      .def_readonly("kind", &PyEvent::kind)
      .def_readonly("parity_after", &PyEvent::parity_after)
      .def("__repr__", [](const PyEvent& e) {
        return "<Event side=" + std::to_string(e.side) + " kind=" + e.kind +
               " parity=" + std::to_string(e.parity_after) + ">";
      });

  py::class_<PyOrbit>(m, "Orbit")
      .def_readonly("events", &PyOrbit::events)
      .def_readonly("termination", &PyOrbit::termination)
      .def_readonly("singularity", &PyOrbit::singularity)
      .def_readonly("total_length", &PyOrbit::total_length)
      .def_readonly("period_events", &PyOrbit::period_events)
      .def_readonly("period_length", &PyOrbit::period_length)
      .def_property_readonly("csv", [](const PyOrbit& o) { return o.csv; })
      .def("svg", [](const PyOrbit& o) { return table_svg(o.table, {o}); })
      .def("__len__", [](const PyOrbit& o) { return o.events.size(); });

  m.def("make_polygon", &make_polygon_file, py::arg("vertices"),
        py::arg("andreev_sides") = std::vector<std::size_t>{},
        py::arg("mode") = "rational",
        "Build a table from vertex coordinates (ints, floats, or 'p/q' strings).");
  m.def("make_square",
        [](const py::object& size, std::vector<std::size_t> andreev,
           const std::string& mode) {
          return make_rect_file(size, size, std::move(andreev), mode);
        },
        py::arg("size") = 1, py::arg("andreev_sides") = std::vector<std::size_t>{},
        py::arg("mode") = "rational");
  m.def("make_rect", &make_rect_file, py::arg("width"), py::arg("height"),
        py::arg("andreev_sides") = std::vector<std::size_t>{},
        py::arg("mode") = "rational");
  m.def("make_tfractal",
        [](int level, std::vector<std::size_t> andreev) {
          fractal::TFractalSpec<Rational> spec;
          spec.level = level;
          PolygonTableQ poly = fractal::build_tfractal(spec);
          io::TableFile tf;
          tf.mode = io::ScalarMode::Rational;
          for (const auto& v : poly.vertices) tf.vertices.push_back(v);
          tf.andreev_sides = std::move(andreev);
          io::validate_table_file(tf);
          return tf;
        },
        py::arg("level"), py::arg("andreev_sides") = std::vector<std::size_t>{});
  m.def("make_notch",
        [](const py::object& offset, const py::object& width, const py::object& depth,
           const py::object& host_w, const py::object& host_h, std::size_t side,
           std::vector<std::size_t> andreev) {
          fractal::NotchSpec<Rational> spec{to_rational(host_w), to_rational(host_h),
                                            side,               to_rational(offset),
                                            to_rational(width), to_rational(depth)};
          fractal::NotchedTable<Rational> nt = fractal::build_notched_rect(spec);
          io::TableFile tf;
          tf.mode = io::ScalarMode::Rational;
          for (const auto& v : nt.polygon.vertices) tf.vertices.push_back(v);
          tf.andreev_sides = std::move(andreev);
          io::validate_table_file(tf);
          return tf;
        },
        py::arg("offset"), py::arg("width"), py::arg("depth"),
        py::arg("host_w") = 10, py::arg("host_h") = 1, py::arg("side") = 2,
        py::arg("andreev_sides") = std::vector<std::size_t>{});

  m.def("simulate", &simulate, py::arg("table"), py::arg("pos"),
        py::arg("theta") = py::none(), py::arg("direction") = py::none(),
        py::arg("parity") = 1, py::arg("max_events") = 1000,
        "Run the retro-reflecting dynamics. theta= uses the float engine; "
        "direction='dy/dx' uses exact rational arithmetic.");

  m.def("svg", &table_svg, py::arg("table"), py::arg("orbits"),
        "Render the table plus any number of simulated orbits to SVG.");

  m.def("closed_flow", &closed_flow, py::arg("table"), py::arg("pos"), py::arg("theta"),
        py::arg("tol") = kEpsPeriodic);
  m.def("closed_flow_exact", &closed_flow_exact, py::arg("table"), py::arg("pos"),
        py::arg("direction"));
  m.def("jacobian_check", &jacobian_check, py::arg("table"), py::arg("samples") = 100,
        py::arg("seed") = 1);
  m.def("measure_check", &measure_check, py::arg("table"), py::arg("regions") = 10,
        py::arg("samples") = 100000, py::arg("seed") = 1);
  m.def("tfractal_theorem", &tfractal_theorem, py::arg("level"), py::arg("p"),
        py::arg("x0"), py::arg("max_events") = 200000);
  m.def("classify_notch", &classify_notch, py::arg("host"), py::arg("cell"),
        py::arg("depth"), py::arg("side"), py::arg("x0"), py::arg("direction"),
        py::arg("max_events") = 100000,
        "Classify one perturbation orbit: host=(w,h), cell=(offset,width).");
}
