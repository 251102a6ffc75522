#include "abil/render.hpp"

#include <algorithm>
#include <cstdio>

namespace abil::render {

std::string format_sig17(double v) {
  if (v == 0.0) v = 0.0;  // print negative zero as "0"
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

const char* kind_name(EventKind kind) {
  return kind == EventKind::Andreev ? "andreev" : "specular";
}

const char* const kCsvHeader =
    "event_index,side,hit_x,hit_y,r,phi,tau,kind,parity_after";

namespace detail {

void append_csv_event(std::string& out, std::size_t index, std::size_t side, double hit_x,
                      double hit_y, double r, double phi, double tau, EventKind kind,
                      int parity_after) {
  out += std::to_string(index);
  out += ',';
  out += std::to_string(side);
  out += ',';
  out += format_sig17(hit_x);
  out += ',';
  out += format_sig17(hit_y);
  out += ',';
  out += format_sig17(r);
  out += ',';
  out += format_sig17(phi);
  out += ',';
  out += format_sig17(tau);
  out += ',';
  out += kind_name(kind);
  out += ',';
  out += std::to_string(parity_after);
  out += "\r\n";
}

void append_csv_singularity(std::string& out, std::size_t index, double x, double y) {
  out += std::to_string(index);
  out += ",,";
  out += format_sig17(x);
  out += ',';
  out += format_sig17(y);
  out += ",,,,singularity,\r\n";
}

}  // namespace detail

std::string svg_document(const std::vector<Vec2<double>>& polygon,
                         const std::vector<bool>& is_andreev,
                         const std::vector<Polyline>& trajectories) {
  double xmin = 0.0, xmax = 1.0, ymin = 0.0, ymax = 1.0;
  if (!polygon.empty()) {
    xmin = xmax = polygon.front().x;
    ymin = ymax = polygon.front().y;
    for (const auto& v : polygon) {
      xmin = std::min(xmin, v.x);
      xmax = std::max(xmax, v.x);
      ymin = std::min(ymin, v.y);
      ymax = std::max(ymax, v.y);
    }
  }
  double w = xmax - xmin;
  double h = ymax - ymin;
  double margin = 0.05 * std::max(w, h);
  double unit = std::max(w, h);

  std::string out;
  out += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  out += "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" viewBox=\"";
  out += format_sig17(xmin - margin) + " " + format_sig17(ymin - margin) + " " +
         format_sig17(w + 2.0 * margin) + " " + format_sig17(h + 2.0 * margin) + "\">\n";
  // Flip the y-axis: y' = (ymin + ymax) - y keeps the box in place.
  out += "<g transform=\"translate(0 " + format_sig17(ymin + ymax) + ") scale(1 -1)\">\n";

  out += "<polygon fill=\"#f8fafc\" stroke=\"#1f2937\" stroke-width=\"" +
         format_sig17(0.006 * unit) + "\" stroke-linejoin=\"round\" points=\"";
  for (std::size_t i = 0; i < polygon.size(); ++i) {
    if (i) out += ' ';
    out += format_sig17(polygon[i].x) + "," + format_sig17(polygon[i].y);
  }
  out += "\"/>\n";

  for (std::size_t i = 0; i < polygon.size(); ++i) {
    if (i >= is_andreev.size() || !is_andreev[i]) continue;
    const Vec2<double>& a = polygon[i];
    const Vec2<double>& b = polygon[(i + 1) % polygon.size()];
    out += "<line stroke=\"#d97706\" stroke-width=\"" + format_sig17(0.012 * unit) +
           "\" stroke-linecap=\"round\" x1=\"" + format_sig17(a.x) + "\" y1=\"" +
           format_sig17(a.y) + "\" x2=\"" + format_sig17(b.x) + "\" y2=\"" +
           format_sig17(b.y) + "\"/>\n";
  }

  for (const Polyline& traj : trajectories) {
    out += "<path fill=\"none\" stroke=\"#2563eb\" stroke-width=\"" +
           format_sig17(0.004 * unit) + "\" stroke-linejoin=\"round\" d=\"";
    for (std::size_t i = 0; i < traj.points.size(); ++i) {
      out += (i == 0) ? "M " : " L ";
      out += format_sig17(traj.points[i].x) + " " + format_sig17(traj.points[i].y);
    }
    out += "\"/>\n";
  }

  out += "</g>\n</svg>\n";
  return out;
}

}  // namespace abil::render
