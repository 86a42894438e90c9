#include "mppi/report.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <string_view>

#include "json.hpp"
#include "mppi/io.h"

namespace mppi {
namespace {

std::string Format(double v) {
  if (std::isinf(v)) return v > 0.0 ? "inf" : "-inf";
  char buffer[32];
  std::snprintf(buffer, sizeof(buffer), "%.17g", v);
  return buffer;
}

std::string Short(double v) {
  char buffer[32];
  std::snprintf(buffer, sizeof(buffer), "%.6g", v);
  return buffer;
}

double ParseField(const std::string& field, std::size_t line) {
  const char* begin = field.c_str();
  char* end = nullptr;
  const double v = std::strtod(begin, &end);
  if (field.empty() || end != begin + field.size()) {
    throw InputError("trajectory csv line " + std::to_string(line) +
                     ": bad number '" + field + "'");
  }
  return v;
}

struct Series {
  std::string label;
  std::string color;
  std::vector<double> x;
  std::vector<double> y;
};

struct Circle {
  double cx, cy, r;
};

// Minimal line chart: axes box, min/max tick labels, one polyline per
// series, and optional circles in data coordinates.
class Chart {
 public:
  Chart(std::string title, std::string x_label, std::string y_label)
      : title_(std::move(title)),
        x_label_(std::move(x_label)),
        y_label_(std::move(y_label)) {}

  void Add(Series s) { series_.push_back(std::move(s)); }
  void AddCircle(Circle c) { circles_.push_back(c); }
  void EqualAspect() { equal_ = true; }

  std::string Render() const {
    double x0 = kInf, x1 = -kInf, y0 = kInf, y1 = -kInf;
    for (const Series& s : series_) {
      for (double v : s.x) Extend(v, x0, x1);
      for (double v : s.y) Extend(v, y0, y1);
    }
    for (const Circle& c : circles_) {
      Extend(c.cx - c.r, x0, x1);
      Extend(c.cx + c.r, x0, x1);
      Extend(c.cy - c.r, y0, y1);
      Extend(c.cy + c.r, y0, y1);
    }
    if (!(x0 <= x1)) x0 = 0.0, x1 = 1.0;
    if (!(y0 <= y1)) y0 = 0.0, y1 = 1.0;
    if (x1 - x0 < 1e-9) x0 -= 0.5, x1 += 0.5;
    if (y1 - y0 < 1e-9) y0 -= 0.5, y1 += 0.5;
    const double pad_y = 0.05 * (y1 - y0);
    y0 -= pad_y;
    y1 += pad_y;

    double width = kPlotW, height = kPlotH;
    if (equal_) {
      height = std::clamp(kPlotW * (y1 - y0) / (x1 - x0), 120.0, 600.0);
      // Widen the y range so one metre is the same length on both axes.
      const double y_span = (x1 - x0) * height / kPlotW;
      const double mid = 0.5 * (y0 + y1);
      if (y_span > y1 - y0) y0 = mid - 0.5 * y_span, y1 = mid + 0.5 * y_span;
    }
    const auto px = [&](double x) { return kLeft + (x - x0) / (x1 - x0) * width; };
    const auto py = [&](double y) {
      return kTop + (1.0 - (y - y0) / (y1 - y0)) * height;
    };

    std::ostringstream svg;
    const double total_w = kLeft + width + 20.0;
    const double total_h = kTop + height + 60.0;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << total_w
        << "\" height=\"" << total_h << "\" font-family=\"sans-serif\" "
        << "font-size=\"12\">\n";
    svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    svg << "<text x=\"" << kLeft << "\" y=\"20\" font-size=\"14\">" << title_
        << "</text>\n";
    svg << "<rect x=\"" << kLeft << "\" y=\"" << kTop << "\" width=\"" << width
        << "\" height=\"" << height
        << "\" fill=\"none\" stroke=\"black\"/>\n";
    svg << "<text x=\"" << kLeft << "\" y=\"" << kTop + height + 16
        << "\">" << Short(x0) << "</text>\n";
    svg << "<text x=\"" << kLeft + width << "\" y=\"" << kTop + height + 16
        << "\" text-anchor=\"end\">" << Short(x1) << "</text>\n";
    svg << "<text x=\"" << kLeft + width / 2 << "\" y=\""
        << kTop + height + 34 << "\" text-anchor=\"middle\">" << x_label_
        << "</text>\n";
    svg << "<text x=\"" << kLeft - 6 << "\" y=\"" << kTop + height
        << "\" text-anchor=\"end\">" << Short(y0) << "</text>\n";
    svg << "<text x=\"" << kLeft - 6 << "\" y=\"" << kTop + 10
        << "\" text-anchor=\"end\">" << Short(y1) << "</text>\n";
    svg << "<text transform=\"translate(16," << kTop + height / 2
        << ") rotate(-90)\" text-anchor=\"middle\">" << y_label_
        << "</text>\n";

    for (const Circle& c : circles_) {
      svg << "<ellipse cx=\"" << px(c.cx) << "\" cy=\"" << py(c.cy)
          << "\" rx=\"" << c.r / (x1 - x0) * width << "\" ry=\""
          << c.r / (y1 - y0) * height
          << "\" fill=\"#f4a0a0\" stroke=\"#c03030\"/>\n";
    }
    double legend_y = kTop + height + 52;
    double legend_x = kLeft;
    for (const Series& s : series_) {
      svg << "<polyline fill=\"none\" stroke=\"" << s.color
          << "\" stroke-width=\"1.5\" points=\"";
      for (std::size_t i = 0; i < s.x.size(); ++i) {
        if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
        svg << px(s.x[i]) << "," << py(s.y[i]) << " ";
      }
      svg << "\"/>\n";
      svg << "<text x=\"" << legend_x << "\" y=\"" << legend_y
          << "\" fill=\"" << s.color << "\">" << s.label << "</text>\n";
      legend_x += 14.0 + 7.0 * static_cast<double>(s.label.size());
    }
    svg << "</svg>\n";
    return svg.str();
  }

 private:
  static constexpr double kInf = std::numeric_limits<double>::infinity();
  static constexpr double kLeft = 70.0;
  static constexpr double kTop = 30.0;
  static constexpr double kPlotW = 720.0;
  static constexpr double kPlotH = 300.0;

  static void Extend(double v, double& lo, double& hi) {
    if (!std::isfinite(v)) return;
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }

  std::string title_, x_label_, y_label_;
  std::vector<Series> series_;
  std::vector<Circle> circles_;
  bool equal_ = false;
};

void Save(const std::string& file, const std::string& content) {
  std::ofstream out(file, std::ios::binary);
  out << content;
  if (!out) throw InputError("cannot write '" + file + "'");
}

}  // namespace

void WriteTrajectoryCsv(std::ostream& out, const SimulationLog& log) {
  out << kTrajectoryHeader << "\n";
  for (const TickRecord& r : log.records) {
    const VehicleState& s = r.state;
    out << Format(r.t) << ',' << Format(s.x) << ',' << Format(s.y) << ','
        << Format(s.theta) << ',' << Format(s.v) << ',' << Format(s.delta)
        << ',' << Format(r.command.a) << ',' << Format(r.command.omega) << ','
        << Format(r.d_obj) << ',' << Format(r.cycle_ms) << "\n";
  }
}

std::vector<TrajectoryRow> ReadTrajectoryCsv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != kTrajectoryHeader) {
    throw InputError("trajectory csv: unexpected header");
  }
  std::vector<TrajectoryRow> rows;
  std::size_t number = 1;
  while (std::getline(in, line)) {
    ++number;
    if (line.empty()) continue;
    std::vector<double> v;
    std::stringstream fields(line);
    std::string field;
    while (std::getline(fields, field, ',')) v.push_back(ParseField(field, number));
    if (v.size() != 10) {
      throw InputError("trajectory csv line " + std::to_string(number) +
                       ": expected 10 columns");
    }
    rows.push_back({v[0], {v[1], v[2], v[3], v[4], v[5]}, {v[6], v[7]}, v[8],
                    v[9]});
  }
  return rows;
}

std::string MetricsJson(const SimulationSummary& s) {
  nlohmann::ordered_json j;
  j["min_d_obj"] = std::isfinite(s.min_d_obj) ? nlohmann::ordered_json(s.min_d_obj)
                                              : nlohmann::ordered_json(nullptr);
  j["max_speed"] = s.max_speed;
  j["max_abs_accel"] = s.max_abs_accel;
  j["max_abs_steer"] = s.max_abs_steer;
  j["mean_cycle_ms"] = s.mean_cycle_ms;
  j["p95_cycle_ms"] = s.p95_cycle_ms;
  j["collision"] = s.collision;
  j["completed"] = s.completed;
  j["termination"] = std::string(TerminationName(s.termination));
  j["planner_faults"] = s.planner_faults;
  return j.dump(2) + "\n";
}

void WritePlots(const std::string& dir, const Scenario& scenario,
                const SimulationLog& log, const PlannerConfig& config) {
  std::vector<double> t, v, a, delta, x, y;
  for (const TickRecord& r : log.records) {
    t.push_back(r.t);
    v.push_back(r.state.v);
    a.push_back(r.command.a);
    delta.push_back(r.state.delta);
    x.push_back(r.state.x);
    y.push_back(r.state.y);
  }
  const auto flat = [&](double value) {
    return std::vector<double>(t.size(), value);
  };

  Chart speed("Speed", "t [s]", "v [m/s]");
  speed.Add({"v", "#1f4e9c", t, v});
  speed.Add({"v_goal", "#999999", t, flat(config.v_goal)});
  Save(dir + "/speed.svg", speed.Render());

  Chart accel("Commanded acceleration", "t [s]", "a [m/s^2]");
  accel.Add({"a", "#1f4e9c", t, a});
  accel.Add({"a_max", "#999999", t, flat(config.a_max)});
  accel.Add({"a_min", "#999999", t, flat(config.a_min)});
  Save(dir + "/acceleration.svg", accel.Render());

  Chart steer("Steering angle", "t [s]", "delta [rad]");
  steer.Add({"delta", "#1f4e9c", t, delta});
  Save(dir + "/steering.svg", steer.Render());

  Chart path("Path", "x [m]", "y [m]");
  Series reference{"reference", "#999999", {}, {}};
  for (const Waypoint& w : scenario.path.waypoints()) {
    reference.x.push_back(w.x);
    reference.y.push_back(w.y);
  }
  // Clip the reference to the driven stretch so the vehicle stays visible.
  if (!x.empty()) {
    const auto [lo, hi] = std::minmax_element(x.begin(), x.end());
    const double margin = 10.0;
    Series clipped{"reference", "#999999", {}, {}};
    for (std::size_t i = 0; i < reference.x.size(); ++i) {
      if (reference.x[i] >= *lo - margin && reference.x[i] <= *hi + margin) {
        clipped.x.push_back(reference.x[i]);
        clipped.y.push_back(reference.y[i]);
      }
    }
    if (clipped.x.size() >= 2) reference = std::move(clipped);
  }
  path.Add(std::move(reference));
  path.Add({"vehicle", "#1f4e9c", x, y});
  for (const ObstacleTrack& track : log.initial_obstacles) {
    for (const CircleObstacle& c : Decompose(track, config.inflation_margin)) {
      path.AddCircle({c.cx, c.cy, c.radius});
    }
  }
  path.EqualAspect();
  Save(dir + "/path.svg", path.Render());
}

void WritePlanCsv(std::ostream& out, const PlannedTrajectory& plan,
                  double dt) {
  out << "step,t_s,x_m,y_m,theta_rad,v_mps,delta_rad,a_cmd,omega_cmd\n";
  for (std::size_t k = 0; k < plan.inputs.size(); ++k) {
    const VehicleState& s = plan.states[k + 1];
    const ControlInput& u = plan.inputs[k];
    out << k << ',' << Format(static_cast<double>(k + 1) * dt) << ','
        << Format(s.x) << ',' << Format(s.y) << ',' << Format(s.theta) << ','
        << Format(s.v) << ',' << Format(s.delta) << ',' << Format(u.a) << ','
        << Format(u.omega) << "\n";
  }
}

}  // namespace mppi
