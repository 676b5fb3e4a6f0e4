#include "qsafe/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>

#include "qsafe/errors.hpp"

namespace qsafe {
namespace {

constexpr double kCanvas = 900.0;
constexpr double kMargin = 60.0;

struct Mapper {
  double x0, y0, scale;
  // SVG y axis points down; flip so north is up.
  double px(double x) const { return kMargin + (x - x0) * scale; }
  double py(double y) const { return kCanvas - kMargin - (y - y0) * scale; }
};

void polyline(std::ostream& os, const Mapper& m, const CounterexampleTrace& t,
              bool intruder, const char* color) {
  os << "  <polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"2\" points=\"";
  char buf[64];
  for (const TraceRow& r : t.rows) {
    double x = intruder ? r.state.x_int : r.state.x_own;
    double y = intruder ? r.state.y_int : r.state.y_own;
    std::snprintf(buf, sizeof buf, "%.2f,%.2f ", m.px(x), m.py(y));
    os << buf;
  }
  os << "\"/>\n";
}

void markers(std::ostream& os, const Mapper& m, const CounterexampleTrace& t,
             bool intruder, const char* color) {
  char buf[128];
  for (size_t i = 0; i < t.rows.size(); i += 10) {
    const TraceRow& r = t.rows[i];
    double x = intruder ? r.state.x_int : r.state.x_own;
    double y = intruder ? r.state.y_int : r.state.y_own;
    std::snprintf(buf, sizeof buf,
                  "  <circle cx=\"%.2f\" cy=\"%.2f\" r=\"3\" fill=\"%s\"/>\n",
                  m.px(x), m.py(y), color);
    os << buf;
  }
}

}  // namespace

void write_trace_svg(const CounterexampleTrace& t, std::ostream& os) {
  if (t.rows.empty()) fail(ErrorCode::InvalidArgument, "svg: empty trace");

  double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
  for (const TraceRow& r : t.rows) {
    xmin = std::min({xmin, r.state.x_own, r.state.x_int});
    xmax = std::max({xmax, r.state.x_own, r.state.x_int});
    ymin = std::min({ymin, r.state.y_own, r.state.y_int});
    ymax = std::max({ymax, r.state.y_own, r.state.y_int});
  }
  const PlantState& last = t.rows.back().state;
  xmin = std::min(xmin, last.x_int - kCollisionRange);
  xmax = std::max(xmax, last.x_int + kCollisionRange);
  ymin = std::min(ymin, last.y_int - kCollisionRange);
  ymax = std::max(ymax, last.y_int + kCollisionRange);

  double span = std::max({xmax - xmin, ymax - ymin, 1.0});
  Mapper m{xmin, ymin, (kCanvas - 2 * kMargin) / span};

  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kCanvas
     << "\" height=\"" << kCanvas << "\" viewBox=\"0 0 " << kCanvas << " " << kCanvas
     << "\">\n";
  os << "  <rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";

  char buf[160];
  std::snprintf(buf, sizeof buf,
                "  <circle cx=\"%.2f\" cy=\"%.2f\" r=\"%.2f\" fill=\"none\" "
                "stroke=\"#d33\" stroke-dasharray=\"6 4\"/>\n",
                m.px(last.x_int), m.py(last.y_int), kCollisionRange * m.scale);
  os << buf;

  polyline(os, m, t, false, "#1558d6");
  polyline(os, m, t, true, "#c77d00");
  markers(os, m, t, false, "#1558d6");
  markers(os, m, t, true, "#c77d00");

  const PlantState& first = t.rows.front().state;
  std::snprintf(buf, sizeof buf,
                "  <text x=\"%.2f\" y=\"%.2f\" font-size=\"14\" fill=\"#1558d6\">ownship</text>\n",
                m.px(first.x_own) + 6, m.py(first.y_own) - 6);
  os << buf;
  std::snprintf(buf, sizeof buf,
                "  <text x=\"%.2f\" y=\"%.2f\" font-size=\"14\" fill=\"#c77d00\">intruder</text>\n",
                m.px(first.x_int) + 6, m.py(first.y_int) - 6);
  os << buf;
  os << "</svg>\n";
}

}  // namespace qsafe
