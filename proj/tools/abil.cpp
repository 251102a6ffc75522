// abil — polygonal billiards with retro-reflecting (Andreev) sides.
//
//   abil table make {square | rect W H | tfractal N | notch ...} --out FILE
//   abil simulate --table FILE --pos X,Y (--theta T | --dir DY/DX) [outputs]
//   abil verify {jacobian | measure | volume-sign | closed-flow | tfractal}
//
// Exit codes: 0 success / all checks pass, 1 verification failure,
// 2 configuration error, 3 singular orbit termination.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "abil/andreev.hpp"
#include "abil/fractal.hpp"
#include "abil/geometry.hpp"
#include "abil/render.hpp"
#include "abil/rng.hpp"
#include "abil/table_io.hpp"
#include "abil/verify.hpp"

namespace {

using abil::AndreevPhasePoint;
using abil::AndreevTable;
using abil::AndreevTableD;
using abil::AndreevTableQ;
using abil::CounterRng;
using abil::Orbit;
using abil::PolygonTable;
using abil::Rational;
using abil::Termination;
using abil::Vec2;
using nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitVerifyFail = 1;
constexpr int kExitConfig = 2;
constexpr int kExitSingular = 3;

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// ------------------------------------------------------------- parsing

// Accepts "p/q", integers, and decimal literals (decimals become their
// exact binary value).
Rational parse_scalar(const std::string& text) {
  try {
    return abil::rational_from_string(text);
  } catch (const std::exception&) {
  }
  try {
    std::size_t pos = 0;
    double v = std::stod(text, &pos);
    if (pos == text.size() && std::isfinite(v)) return Rational(v);
  } catch (const std::exception&) {
  }
  throw ConfigError("cannot parse number: \"" + text + "\"");
}

Vec2<Rational> parse_point(const std::string& text) {
  std::size_t comma = text.find(',');
  if (comma == std::string::npos || text.find(',', comma + 1) != std::string::npos) {
    throw ConfigError("position must be \"X,Y\", got \"" + text + "\"");
  }
  return {parse_scalar(text.substr(0, comma)), parse_scalar(text.substr(comma + 1))};
}

// Slope string "dy/dx" (or plain "s" for slope s with dx = 1). Keeping
// dy and dx separate preserves the quadrant and admits vertical "1/0".
Vec2<Rational> parse_slope_direction(const std::string& text) {
  std::size_t slash = text.find('/');
  Rational dy, dx;
  if (slash == std::string::npos) {
    dy = parse_scalar(text);
    dx = 1;
  } else {
    if (text.find('/', slash + 1) != std::string::npos) {
      throw ConfigError("direction slope must be \"dy/dx\", got \"" + text + "\"");
    }
    dy = parse_scalar(text.substr(0, slash));
    dx = parse_scalar(text.substr(slash + 1));
  }
  if (dx == 0 && dy == 0) throw ConfigError("direction slope 0/0 is not a direction");
  return {dx, dy};
}

// ----------------------------------------------------------- table make

struct MakeCommon {
  std::string out;
  std::string mode = "rational";
  std::vector<std::size_t> andreev;
};

void add_make_common(CLI::App* cmd, MakeCommon& c) {
  cmd->add_option("-o,--out", c.out, "output table file (\"-\" for stdout)")->required();
  cmd->add_option("--mode", c.mode, "coordinate encoding in the file")
      ->check(CLI::IsMember({"rational", "float64"}))
      ->capture_default_str();
  cmd->add_option("--andreev", c.andreev,
                  "indices of retro-reflecting sides (must be vertical)");
}

void emit_table(std::vector<Vec2<Rational>> vertices, const MakeCommon& c) {
  abil::io::TableFile tf;
  tf.mode = c.mode == "float64" ? abil::io::ScalarMode::Float64
                                : abil::io::ScalarMode::Rational;
  tf.vertices = abil::validate_polygon<Rational>(std::move(vertices)).vertices;
  tf.andreev_sides = c.andreev;
  std::sort(tf.andreev_sides.begin(), tf.andreev_sides.end());
  tf.andreev_sides.erase(std::unique(tf.andreev_sides.begin(), tf.andreev_sides.end()),
                         tf.andreev_sides.end());
  tf.to_table_q();  // enforce the invariant (vertical marks, valid indices)
  if (c.out == "-") {
    std::cout << abil::io::serialize_table_file(tf);
  } else {
    abil::io::save_table_file(tf, c.out);
  }
}

// ------------------------------------------------------------- simulate

struct SimulateOpts {
  std::string table_path;
  std::string pos;
  std::optional<double> theta;
  std::optional<std::string> dir;
  int parity = +1;
  std::size_t max_events = 1000;
  std::optional<double> tolerance;
  std::string csv_path;
  std::string svg_path;
};

template <class R>
int run_simulation(const AndreevTable<R>& table, const AndreevPhasePoint<R>& start,
                   const SimulateOpts& opt) {
  if (!abil::contains(table.polygon, start.pos, table.tol)) {
    throw ConfigError("initial position lies outside the table");
  }
  Orbit<R> orbit = abil::andreev_orbit(table, start, opt.max_events);
  std::string csv = abil::render::csv_document(orbit);
  if (opt.csv_path.empty()) {
    std::cout << csv;
  } else {
    std::ofstream out(opt.csv_path, std::ios::binary | std::ios::trunc);
    if (!out) throw ConfigError("cannot open for writing: " + opt.csv_path);
    out << csv;
  }
  if (!opt.svg_path.empty()) {
    std::vector<abil::render::Polyline> lines{
        abil::render::orbit_polyline(start.pos, orbit)};
    std::ofstream out(opt.svg_path, std::ios::binary | std::ios::trunc);
    if (!out) throw ConfigError("cannot open for writing: " + opt.svg_path);
    out << abil::render::svg_document(table, lines);
  }
  return orbit.termination == Termination::Singular ? kExitSingular : kExitOk;
}

int cmd_simulate(const SimulateOpts& opt) {
  if (opt.theta.has_value() == opt.dir.has_value()) {
    throw ConfigError("give exactly one of --theta (radians) or --dir (slope dy/dx)");
  }
  abil::io::TableFile tf = abil::io::load_table_file(opt.table_path);
  Vec2<Rational> pos = parse_point(opt.pos);
  if (opt.parity != 1 && opt.parity != -1) throw ConfigError("parity must be +1 or -1");

  if (opt.dir) {
    // Exact engine: rational position and direction, exact reflections.
    AndreevTableQ tq = tf.to_table_q();
    AndreevPhasePoint<Rational> start{pos, parse_slope_direction(*opt.dir), opt.parity};
    return run_simulation(tq, start, opt);
  }
  AndreevTableD td = tf.to_table_d();
  if (opt.tolerance) {
    if (!(*opt.tolerance > 0)) throw ConfigError("tolerance must be positive");
    td.tol.corner = td.tol.grazing = *opt.tolerance;
  }
  AndreevPhasePoint<double> start{{abil::to_double(pos.x), abil::to_double(pos.y)},
                                  {std::cos(*opt.theta), std::sin(*opt.theta)},
                                  opt.parity};
  return run_simulation(td, start, opt);
}

// -------------------------------------------------------------- verify

struct Report {
  std::vector<std::string> lines;
  std::size_t passed = 0;
  std::size_t failed = 0;

  void add(json j, bool pass) {
    j["pass"] = pass;
    lines.push_back(j.dump());
    (pass ? passed : failed) += 1;
  }

  int finish(const std::string& suite, const std::string& out_path) {
    json summary;
    summary["check"] = "summary";
    summary["suite"] = suite;
    summary["total"] = passed + failed;
    summary["passed"] = passed;
    summary["pass"] = failed == 0;
    lines.push_back(summary.dump());
    std::string text;
    for (const std::string& line : lines) {
      text += line;
      text += '\n';
    }
    std::cout << text;
    if (!out_path.empty()) {
      std::ofstream out(out_path, std::ios::binary | std::ios::trunc);
      if (!out) throw ConfigError("cannot open for writing: " + out_path);
      out << text;
    }
    return failed == 0 ? kExitOk : kExitVerifyFail;
  }
};

AndreevTableD load_table_d(const std::string& path) {
  return abil::io::load_table_file(path).to_table_d();
}

// Uniform interior point by bounding-box rejection.
Vec2<double> sample_interior(const abil::PolygonTableD& poly, CounterRng& rng) {
  double xmin = poly.vertices.front().x, xmax = xmin;
  double ymin = poly.vertices.front().y, ymax = ymin;
  for (const auto& v : poly.vertices) {
    xmin = std::min(xmin, v.x);
    xmax = std::max(xmax, v.x);
    ymin = std::min(ymin, v.y);
    ymax = std::max(ymax, v.y);
  }
  for (int attempt = 0; attempt < 100000; ++attempt) {
    Vec2<double> p{rng.uniform(xmin, xmax), rng.uniform(ymin, ymax)};
    if (abil::contains(poly, p)) return p;
  }
  throw std::runtime_error("interior sampling failed (degenerate table?)");
}

int cmd_verify_jacobian(const std::string& table_path, std::size_t samples,
                        std::uint64_t seed, double tol, const std::string& out_path) {
  AndreevTableD td = load_table_d(table_path);
  CounterRng rng(seed);
  Report report;
  for (std::size_t i = 0; i < samples; ++i) {
    abil::verify::SectionState s = abil::verify::sample_section_state(td, rng);
    abil::verify::JacobianSample js = abil::verify::numeric_jacobian(td, s);
    bool pass = !js.chart_break && js.max_entry_rel_err < tol && js.det_rel_err < tol;
    json j;
    j["check"] = "jacobian";
    j["index"] = i;
    j["side"] = js.from.side;
    j["r"] = js.from.r;
    j["phi"] = js.from.phi;
    j["arrival"] = abil::render::kind_name(js.arrival_kind);
    j["tau"] = js.tau;
    j["max_entry_rel_err"] = js.max_entry_rel_err;
    j["det_rel_err"] = js.det_rel_err;
    j["tolerance"] = tol;
    report.add(std::move(j), pass);
  }
  return report.finish("jacobian", out_path);
}

int cmd_verify_measure(const std::string& table_path, std::size_t regions,
                       std::size_t samples, int steps, std::uint64_t seed, double tol,
                       const std::string& out_path) {
  if (samples < 1000) {
    throw ConfigError("measure suite needs at least 1000 samples per region");
  }
  AndreevTableD td = load_table_d(table_path);
  CounterRng rng(seed);
  Report report;
  for (std::size_t k = 0; k < regions; ++k) {
    abil::verify::Region region = abil::verify::random_region(td, rng);
    abil::verify::MeasureReport mr = abil::verify::check_measure_preservation(
        td, region, samples, seed + 1000003 * (k + 1), steps);
    bool pass = mr.relative_error < tol && !mr.too_many_singular;
    json j;
    j["check"] = "measure";
    j["index"] = k;
    j["region"] = {{"side", region.side},
                   {"r_lo", region.r_lo},
                   {"r_hi", region.r_hi},
                   {"phi_lo", region.phi_lo},
                   {"phi_hi", region.phi_hi}};
    j["samples"] = samples;
    j["steps"] = steps;
    j["measure_before"] = mr.measure_before;
    j["measure_after"] = mr.measure_after;
    j["relative_error"] = mr.relative_error;
    j["rejected"] = mr.rejected;
    j["tolerance"] = tol;
    report.add(std::move(j), pass);
  }
  double perimeter = 0.0;
  for (const auto& side : td.polygon.sides) perimeter += side.length;
  double exact = 2.0 * perimeter;
  double estimate = abil::verify::estimate_total_measure(td, samples, seed);
  json j;
  j["check"] = "measure_total";
  j["samples"] = samples;
  j["estimate"] = estimate;
  j["exact"] = exact;
  j["abs_err"] = std::fabs(estimate - exact);
  j["tolerance"] = tol;
  report.add(std::move(j), std::fabs(estimate - exact) < tol);
  return report.finish("measure", out_path);
}

int cmd_verify_volume_sign(const std::string& table_path, std::size_t segments,
                           std::uint64_t seed, double tol, const std::string& out_path) {
  AndreevTableD td = load_table_d(table_path);
  double scale = 0.0;
  for (const auto& side : td.polygon.sides) scale = std::max(scale, side.length);
  CounterRng rng(seed);
  Report report;
  for (std::size_t i = 0; i < segments; ++i) {
    abil::verify::FlowSignSample fs;
    bool usable = false;
    for (int attempt = 0; attempt < 200 && !usable; ++attempt) {
      Vec2<double> pos = sample_interior(td.polygon, rng);
      double theta = rng.uniform(0.0, 2.0 * abil::kPi);
      double t = rng.uniform(0.1, 2.5) * scale;
      fs = abil::verify::flow_jacobian_sign(td, {pos, {std::cos(theta), std::sin(theta)}, +1},
                                            t);
      usable = !fs.itinerary_mismatch;
    }
    double err = std::fabs(fs.det - fs.expected_sign);
    bool pass = usable && err < tol;
    json j;
    j["check"] = "volume_sign";
    j["index"] = i;
    j["t"] = fs.t;
    j["events"] = fs.events;
    j["andreev_events"] = fs.andreev_hits;
    j["det"] = fs.det;
    j["expected"] = fs.expected_sign;
    j["abs_err"] = err;
    j["tolerance"] = tol;
    report.add(std::move(j), pass);
  }
  return report.finish("volume-sign", out_path);
}

int cmd_verify_closed_flow(const std::string& table_path, std::size_t count,
                           std::uint64_t seed, double tol, const std::string& out_path) {
  AndreevTableD td = load_table_d(table_path);
  CounterRng rng(seed);
  Report report;
  for (std::size_t i = 0; i < count; ++i) {
    Vec2<double> pos = sample_interior(td.polygon, rng);
    double theta = rng.uniform(0.0, 2.0 * abil::kPi);
    abil::verify::ClosedFlowReport cf = abil::verify::closed_flow_check(td, pos, theta, tol);
    const char* status = cf.status == abil::verify::ClosedFlowStatus::Ok      ? "ok"
                         : cf.status == abil::verify::ClosedFlowStatus::NoAHit ? "no_marked_hit"
                                                                               : "singular";
    bool pass = cf.status == abil::verify::ClosedFlowStatus::Ok && cf.closed;
    json j;
    j["check"] = "closed_flow";
    j["index"] = i;
    j["pos"] = {pos.x, pos.y};
    j["theta"] = theta;
    j["status"] = status;
    j["t0"] = cf.t0;
    j["t1"] = cf.t1;
    j["period"] = cf.period;
    j["residual"] = cf.residual;
    j["tolerance"] = tol;
    report.add(std::move(j), pass);
  }
  return report.finish("closed-flow", out_path);
}

int cmd_verify_tfractal(std::vector<int> levels, std::vector<long> ps,
                        std::vector<std::string> x0s, std::size_t max_events,
                        const std::string& base_width, const std::string& stem_ratio,
                        const std::string& crossbar_ratio, const std::string& out_path) {
  Report report;
  for (int level : levels) {
    abil::fractal::TFractalSpec<Rational> spec;
    spec.level = level;
    spec.base_width = parse_scalar(base_width);
    spec.stem_ratio = parse_scalar(stem_ratio);
    spec.crossbar_ratio = parse_scalar(crossbar_ratio);
    for (long p : ps) {
      for (const std::string& x0_text : x0s) {
        Rational x0 = parse_scalar(x0_text);
        abil::fractal::TheoremReport tr =
            abil::fractal::tfractal_theorem_check(spec, p, x0, max_events);
        bool pass = tr.periodic && tr.anti_parallel_exit && !tr.singular;
        json j;
        j["check"] = "tfractal";
        j["level"] = level;
        j["p"] = p;
        j["x0"] = abil::rational_to_string(x0);
        j["periodic"] = tr.periodic;
        j["anti_parallel_exit"] = tr.anti_parallel_exit;
        j["period_events"] = tr.period_events;
        j["excursions"] = tr.excursions;
        j["singular"] = tr.singular;
        report.add(std::move(j), pass);
      }
    }
  }
  return report.finish("tfractal", out_path);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Polygonal billiards with retro-reflecting (Andreev) sides"};
  app.set_version_flag("--version", "abil 1.0.0");
  app.require_subcommand(1);
  int result = kExitOk;

  // ----- table make -----
  CLI::App* table = app.add_subcommand("table", "build and write table files");
  table->require_subcommand(1);
  CLI::App* make = table->add_subcommand("make", "construct a canonical table");
  make->require_subcommand(1);

  auto square = std::make_shared<MakeCommon>();
  auto square_size = std::make_shared<std::string>("1");
  {
    CLI::App* cmd = make->add_subcommand("square", "axis-aligned square");
    cmd->add_option("--size", *square_size, "side length")->capture_default_str();
    add_make_common(cmd, *square);
    cmd->callback([square, square_size] {
      Rational s = parse_scalar(*square_size);
      if (!(s > 0)) throw ConfigError("size must be positive");
      emit_table({{Rational(0), Rational(0)},
                  {s, Rational(0)},
                  {s, s},
                  {Rational(0), s}},
                 *square);
    });
  }

  auto rect = std::make_shared<MakeCommon>();
  auto rect_w = std::make_shared<std::string>();
  auto rect_h = std::make_shared<std::string>();
  {
    CLI::App* cmd = make->add_subcommand("rect", "axis-aligned rectangle");
    cmd->add_option("width", *rect_w, "width")->required();
    cmd->add_option("height", *rect_h, "height")->required();
    add_make_common(cmd, *rect);
    cmd->callback([rect, rect_w, rect_h] {
      Rational w = parse_scalar(*rect_w);
      Rational h = parse_scalar(*rect_h);
      if (!(w > 0) || !(h > 0)) throw ConfigError("width and height must be positive");
      emit_table({{Rational(0), Rational(0)},
                  {w, Rational(0)},
                  {w, h},
                  {Rational(0), h}},
                 *rect);
    });
  }

  auto tfr = std::make_shared<MakeCommon>();
  auto tfr_level = std::make_shared<int>(0);
  auto tfr_base = std::make_shared<std::string>("1");
  auto tfr_stem = std::make_shared<std::string>("1/2");
  auto tfr_cross = std::make_shared<std::string>("1/2");
  {
    CLI::App* cmd = make->add_subcommand("tfractal", "T-fractal prefractal of level N");
    cmd->add_option("level", *tfr_level, "prefractal level")->required();
    cmd->add_option("--base-width", *tfr_base, "base square width")->capture_default_str();
    cmd->add_option("--stem-ratio", *tfr_stem, "stem width / T width")->capture_default_str();
    cmd->add_option("--crossbar-ratio", *tfr_cross, "crossbar height / stem height")
        ->capture_default_str();
    add_make_common(cmd, *tfr);
    cmd->callback([tfr, tfr_level, tfr_base, tfr_stem, tfr_cross] {
      abil::fractal::TFractalSpec<Rational> spec;
      spec.level = *tfr_level;
      spec.base_width = parse_scalar(*tfr_base);
      spec.stem_ratio = parse_scalar(*tfr_stem);
      spec.crossbar_ratio = parse_scalar(*tfr_cross);
      emit_table(abil::fractal::build_tfractal(spec).vertices, *tfr);
    });
  }

  auto notch = std::make_shared<MakeCommon>();
  auto notch_host_w = std::make_shared<std::string>("10");
  auto notch_host_h = std::make_shared<std::string>("1");
  auto notch_side = std::make_shared<std::size_t>(2);
  auto notch_offset = std::make_shared<std::string>();
  auto notch_width = std::make_shared<std::string>();
  auto notch_depth = std::make_shared<std::string>();
  {
    CLI::App* cmd =
        make->add_subcommand("notch", "rectangle with an outward rectangular cell");
    cmd->add_option("--host-w", *notch_host_w, "host rectangle width")->capture_default_str();
    cmd->add_option("--host-h", *notch_host_h, "host rectangle height")
        ->capture_default_str();
    cmd->add_option("--side", *notch_side, "host side: 0 bottom, 1 right, 2 top, 3 left")
        ->capture_default_str();
    cmd->add_option("--offset", *notch_offset,
                    "mouth offset from the side's low corner")
        ->required();
    cmd->add_option("--width", *notch_width, "mouth width")->required();
    cmd->add_option("--depth", *notch_depth, "cell depth")->required();
    add_make_common(cmd, *notch);
    cmd->callback([notch, notch_host_w, notch_host_h, notch_side, notch_offset, notch_width,
                   notch_depth] {
      abil::fractal::NotchSpec<Rational> spec;
      spec.host_w = parse_scalar(*notch_host_w);
      spec.host_h = parse_scalar(*notch_host_h);
      spec.side = *notch_side;
      spec.offset = parse_scalar(*notch_offset);
      spec.width = parse_scalar(*notch_width);
      spec.depth = parse_scalar(*notch_depth);
      emit_table(abil::fractal::build_notched_rect(spec).polygon.vertices, *notch);
    });
  }

  // ----- simulate -----
  auto sim = std::make_shared<SimulateOpts>();
  {
    CLI::App* cmd = app.add_subcommand("simulate", "run one orbit, write CSV and SVG");
    cmd->add_option("--table", sim->table_path, "table file")->required();
    cmd->add_option("--pos", sim->pos, "initial position \"X,Y\"")->required();
    auto* theta_opt =
        cmd->add_option("--theta", "initial direction in radians (float engine)");
    auto* dir_opt =
        cmd->add_option("--dir", "initial direction as slope \"dy/dx\" (exact engine)");
    theta_opt->excludes(dir_opt);
    cmd->add_option("--parity", sim->parity, "initial parity, +1 or -1")
        ->capture_default_str();
    cmd->add_option("--max-events", sim->max_events, "stop after this many collisions")
        ->capture_default_str();
    auto* tol_opt = cmd->add_option(
        "--tolerance", "corner/grazing singularity tolerance (float engine)");
    cmd->add_option("--csv", sim->csv_path, "CSV output path (default: stdout)");
    cmd->add_option("--svg", sim->svg_path, "SVG output path");
    cmd->callback([sim, theta_opt, dir_opt, tol_opt, &result] {
      if (theta_opt->count()) sim->theta = theta_opt->as<double>();
      if (dir_opt->count()) sim->dir = dir_opt->as<std::string>();
      if (tol_opt->count()) sim->tolerance = tol_opt->as<double>();
      result = cmd_simulate(*sim);
    });
  }

  // ----- verify -----
  CLI::App* verify = app.add_subcommand("verify", "run a verification suite");
  verify->require_subcommand(1);

  struct VerifyCommon {
    std::string table_path;
    std::uint64_t seed = 1;
    std::string out_path;
  };

  auto vj = std::make_shared<VerifyCommon>();
  auto vj_samples = std::make_shared<std::size_t>(100);
  auto vj_tol = std::make_shared<double>(1e-5);
  {
    CLI::App* cmd = verify->add_subcommand(
        "jacobian", "collision-map derivative: finite differences vs analytic");
    cmd->add_option("--table", vj->table_path, "table file")->required();
    cmd->add_option("--samples", *vj_samples, "number of section states")
        ->capture_default_str();
    cmd->add_option("--seed", vj->seed, "rng seed")->capture_default_str();
    cmd->add_option("--tolerance", *vj_tol, "relative error bound")->capture_default_str();
    cmd->add_option("--out", vj->out_path, "also write the report here");
    cmd->callback([vj, vj_samples, vj_tol, &result] {
      result = cmd_verify_jacobian(vj->table_path, *vj_samples, vj->seed, *vj_tol,
                                   vj->out_path);
    });
  }

  auto vm = std::make_shared<VerifyCommon>();
  auto vm_regions = std::make_shared<std::size_t>(10);
  auto vm_samples = std::make_shared<std::size_t>(100000);
  auto vm_steps = std::make_shared<int>(1);
  auto vm_tol = std::make_shared<double>(1e-2);
  {
    CLI::App* cmd = verify->add_subcommand(
        "measure", "invariance of the boundary measure cos(phi) dr dphi");
    cmd->add_option("--table", vm->table_path, "table file")->required();
    cmd->add_option("--regions", *vm_regions, "number of random chart rectangles")
        ->capture_default_str();
    cmd->add_option("--samples", *vm_samples, "Monte Carlo samples per region")
        ->capture_default_str();
    cmd->add_option("--steps", *vm_steps, "section-map iterations")->capture_default_str();
    cmd->add_option("--seed", vm->seed, "rng seed")->capture_default_str();
    cmd->add_option("--tolerance", *vm_tol, "relative error bound")->capture_default_str();
    cmd->add_option("--out", vm->out_path, "also write the report here");
    cmd->callback([vm, vm_regions, vm_samples, vm_steps, vm_tol, &result] {
      result = cmd_verify_measure(vm->table_path, *vm_regions, *vm_samples, *vm_steps,
                                  vm->seed, *vm_tol, vm->out_path);
    });
  }

  auto vv = std::make_shared<VerifyCommon>();
  auto vv_segments = std::make_shared<std::size_t>(50);
  auto vv_tol = std::make_shared<double>(1e-5);
  {
    CLI::App* cmd = verify->add_subcommand(
        "volume-sign", "flow volume: det = (-1)^(retro events) along segments");
    cmd->add_option("--table", vv->table_path, "table file")->required();
    cmd->add_option("--segments", *vv_segments, "number of flow segments")
        ->capture_default_str();
    cmd->add_option("--seed", vv->seed, "rng seed")->capture_default_str();
    cmd->add_option("--tolerance", *vv_tol, "absolute error bound")->capture_default_str();
    cmd->add_option("--out", vv->out_path, "also write the report here");
    cmd->callback([vv, vv_segments, vv_tol, &result] {
      result = cmd_verify_volume_sign(vv->table_path, *vv_segments, vv->seed, *vv_tol,
                                      vv->out_path);
    });
  }

  auto vc = std::make_shared<VerifyCommon>();
  auto vc_count = std::make_shared<std::size_t>(100);
  auto vc_tol = std::make_shared<double>(1e-9);
  {
    CLI::App* cmd = verify->add_subcommand(
        "closed-flow", "period 2(t0+t1) closes every non-singular trajectory");
    cmd->add_option("--table", vc->table_path, "table file")->required();
    cmd->add_option("--count", *vc_count, "number of random initial conditions")
        ->capture_default_str();
    cmd->add_option("--seed", vc->seed, "rng seed")->capture_default_str();
    cmd->add_option("--tolerance", *vc_tol, "phase residual bound")->capture_default_str();
    cmd->add_option("--out", vc->out_path, "also write the report here");
    cmd->callback([vc, vc_count, vc_tol, &result] {
      result = cmd_verify_closed_flow(vc->table_path, *vc_count, vc->seed, *vc_tol,
                                      vc->out_path);
    });
  }

  auto vt_levels = std::make_shared<std::vector<int>>(std::vector<int>{1, 2});
  auto vt_ps = std::make_shared<std::vector<long>>(std::vector<long>{3, 5});
  auto vt_x0s = std::make_shared<std::vector<std::string>>(
      std::vector<std::string>{"1/3", "1/5", "2/3"});
  auto vt_max_events = std::make_shared<std::size_t>(200000);
  auto vt_base = std::make_shared<std::string>("1");
  auto vt_stem = std::make_shared<std::string>("1/2");
  auto vt_cross = std::make_shared<std::string>("1/2");
  auto vt_out = std::make_shared<std::string>();
  {
    CLI::App* cmd = verify->add_subcommand(
        "tfractal", "exact periodicity with anti-parallel excursions on prefractals");
    cmd->add_option("--levels", *vt_levels, "prefractal levels")->capture_default_str();
    cmd->add_option("--p", *vt_ps, "direction parameters (odd, > 1)")
        ->capture_default_str();
    cmd->add_option("--x0", *vt_x0s, "base-edge starting abscissae (non-dyadic)")
        ->capture_default_str();
    cmd->add_option("--max-events", *vt_max_events, "collision budget per orbit")
        ->capture_default_str();
    cmd->add_option("--base-width", *vt_base, "base square width")->capture_default_str();
    cmd->add_option("--stem-ratio", *vt_stem, "stem width / T width")->capture_default_str();
    cmd->add_option("--crossbar-ratio", *vt_cross, "crossbar height / stem height")
        ->capture_default_str();
    cmd->add_option("--out", *vt_out, "also write the report here");
    cmd->callback([vt_levels, vt_ps, vt_x0s, vt_max_events, vt_base, vt_stem, vt_cross,
                   vt_out, &result] {
      result = cmd_verify_tfractal(*vt_levels, *vt_ps, *vt_x0s, *vt_max_events, *vt_base,
                                   *vt_stem, *vt_cross, *vt_out);
    });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitConfig;
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const abil::io::TableIoFailure& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const abil::fractal::FractalSpecError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const abil::ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const abil::AndreevValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitVerifyFail;
  }
  return result;
}
