#include "stoheat/report_io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>

#include "stoheat/version.hpp"

namespace stoheat {

std::string format_float(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void write_header(std::ostream& out, const ConfigEcho& config) {
  out << "# stoheat " << kVersion << "\n";
  for (const auto& [key, value] : config) out << "# " << key << " = " << value << "\n";
}

void write_convergence_csv(std::ostream& out, const ConvergenceReport& report,
                           const ConfigEcho& config) {
  write_header(out, config);
  out << "scheme,tau,error,stderr\n";
  for (SchemeKind kind : report.schemes) {
    const SchemeSeries& s = report.series.at(kind);
    for (std::size_t i = 0; i < report.tau_values.size(); ++i)
      out << scheme_name(kind) << ',' << format_float(report.tau_values[i]) << ','
          << format_float(s.errors[i]) << ',' << format_float(s.stderrs[i]) << "\n";
  }
}

void write_positivity_csv(std::ostream& out, const PositivityReport& report,
                          const ConfigEcho& config) {
  write_header(out, config);
  out << "scheme,positive,negative,blown_up,total\n";
  for (SchemeKind kind : report.schemes) {
    const SchemeCounters& c = report.counters.at(kind);
    out << scheme_name(kind) << ',' << c.positive << ',' << c.negative << ',' << c.blown_up
        << ',' << c.total << "\n";
  }
}

void write_system_convergence_csv(std::ostream& out, const SystemConvergenceReport& report,
                                  const ConfigEcho& config) {
  write_header(out, config);
  out << "scheme,component,tau,error,stderr\n";
  for (SchemeKind kind : report.schemes) {
    for (int component = 1; component <= 2; ++component) {
      const SchemeSeries& s = component == 1 ? report.series_component1.at(kind)
                                             : report.series_component2.at(kind);
      for (std::size_t i = 0; i < report.tau_values.size(); ++i)
        out << scheme_name(kind) << ',' << component << ','
            << format_float(report.tau_values[i]) << ',' << format_float(s.errors[i]) << ','
            << format_float(s.stderrs[i]) << "\n";
    }
  }
}

void write_system_positivity_csv(std::ostream& out, const SystemPositivityReport& report,
                                 const ConfigEcho& config) {
  write_header(out, config);
  out << "scheme,component,positive,negative,blown_up,total\n";
  for (SchemeKind kind : report.schemes) {
    for (int component = 1; component <= 2; ++component) {
      const SchemeCounters& c = component == 1 ? report.counters_component1.at(kind)
                                               : report.counters_component2.at(kind);
      out << scheme_name(kind) << ',' << component << ',' << c.positive << ',' << c.negative
          << ',' << c.blown_up << ',' << c.total << "\n";
    }
  }
}

void write_trajectory_csv(std::ostream& out, const Trajectory& traj, const ConfigEcho& config) {
  write_header(out, config);
  if (traj.blow_up)
    out << "# blow_up_step = " << traj.blow_up->step << "\n# blow_up_cause = "
        << (traj.blow_up->cause == BlowUpCause::NonFinite ? "non_finite" : "coefficient_domain")
        << "\n";
  out << "m,t,n,x,value\n";
  const Discretization& d = traj.discretization;
  for (const SchemeState& state : traj.snapshots) {
    const double t = d.grid_time(state.time_index);
    for (std::size_t n = 0; n < state.values.size(); ++n)
      out << state.time_index << ',' << format_float(t) << ',' << (n + 1) << ','
          << format_float(d.grid_point(static_cast<int>(n) + 1)) << ','
          << format_float(state.values[n]) << "\n";
  }
}

void write_moment_csv(std::ostream& out, const MomentSummary& summary, const ConfigEcho& config) {
  write_header(out, config);
  out << "key,value\n";
  out << "max_mean_square," << format_float(summary.max_mean_square) << "\n";
  out << "ratio," << format_float(summary.ratio) << "\n";
  out << "arg_m," << summary.arg_m << "\n";
  out << "arg_n," << summary.arg_n << "\n";
  out << "sup_u0_squared," << format_float(summary.sup_u0_squared) << "\n";
}

namespace {

struct Box {
  double x0, x1, y0, y1;
};

double map_x(double lx, const Box& data, const Box& view) {
  return view.x0 + (lx - data.x0) / (data.x1 - data.x0) * (view.x1 - view.x0);
}

double map_y(double ly, const Box& data, const Box& view) {
  // SVG y grows downward.
  return view.y1 - (ly - data.y0) / (data.y1 - data.y0) * (view.y1 - view.y0);
}

const char* series_color(std::size_t i) {
  static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                 "#ff7f0e", "#8c564b", "#17becf"};
  return colors[i % (sizeof(colors) / sizeof(colors[0]))];
}

}  // namespace

void write_loglog_svg(std::ostream& out, const std::string& title,
                      const std::vector<PlotSeries>& series) {
  Box data{0.0, 1.0, 0.0, 1.0};
  bool have_point = false;
  for (const PlotSeries& s : series) {
    for (const auto& [x, y] : s.points) {
      if (!(x > 0.0) || !(y > 0.0) || !std::isfinite(x) || !std::isfinite(y)) continue;
      const double lx = std::log10(x), ly = std::log10(y);
      if (!have_point) {
        data = Box{lx, lx, ly, ly};
        have_point = true;
      } else {
        data.x0 = std::min(data.x0, lx);
        data.x1 = std::max(data.x1, lx);
        data.y0 = std::min(data.y0, ly);
        data.y1 = std::max(data.y1, ly);
      }
    }
  }
  if (!have_point) data = Box{-1.0, 0.0, -1.0, 0.0};
  if (data.x1 - data.x0 < 0.5) data.x1 = data.x0 + 0.5;
  if (data.y1 - data.y0 < 0.5) data.y1 = data.y0 + 0.5;
  const double pad_x = 0.05 * (data.x1 - data.x0);
  const double pad_y = 0.05 * (data.y1 - data.y0);
  data.x0 -= pad_x;
  data.x1 += pad_x;
  data.y0 -= pad_y;
  data.y1 += pad_y;

  const Box view{70.0, 560.0, 40.0, 420.0};
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"640\" height=\"480\" "
         "viewBox=\"0 0 640 480\">\n";
  out << "<rect width=\"640\" height=\"480\" fill=\"white\"/>\n";
  out << "<text x=\"320\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" "
         "font-size=\"15\">" << title << "</text>\n";

  // Decade grid.
  for (int e = static_cast<int>(std::floor(data.x0)); e <= static_cast<int>(std::ceil(data.x1));
       ++e) {
    if (e < data.x0 || e > data.x1) continue;
    const double px = map_x(e, data, view);
    out << "<line x1=\"" << px << "\" y1=\"" << view.y0 << "\" x2=\"" << px << "\" y2=\""
        << view.y1 << "\" stroke=\"#dddddd\"/>\n";
    out << "<text x=\"" << px << "\" y=\"" << view.y1 + 18
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">1e" << e
        << "</text>\n";
  }
  for (int e = static_cast<int>(std::floor(data.y0)); e <= static_cast<int>(std::ceil(data.y1));
       ++e) {
    if (e < data.y0 || e > data.y1) continue;
    const double py = map_y(e, data, view);
    out << "<line x1=\"" << view.x0 << "\" y1=\"" << py << "\" x2=\"" << view.x1 << "\" y2=\""
        << py << "\" stroke=\"#dddddd\"/>\n";
    out << "<text x=\"" << view.x0 - 8 << "\" y=\"" << py + 4
        << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">1e" << e
        << "</text>\n";
  }
  out << "<rect x=\"" << view.x0 << "\" y=\"" << view.y0 << "\" width=\"" << view.x1 - view.x0
      << "\" height=\"" << view.y1 - view.y0 << "\" fill=\"none\" stroke=\"black\"/>\n";

  // Guide lines of slope 1/4 and 1/2 anchored at the lower-right data corner.
  for (const double slope : {0.25, 0.5}) {
    const double x_a = data.x0 + 0.1 * (data.x1 - data.x0);
    const double x_b = data.x1 - 0.1 * (data.x1 - data.x0);
    const double y_b = data.y0 + 0.25 * (data.y1 - data.y0);
    const double y_a = y_b - slope * (x_b - x_a);
    out << "<line x1=\"" << map_x(x_a, data, view) << "\" y1=\"" << map_y(y_a, data, view)
        << "\" x2=\"" << map_x(x_b, data, view) << "\" y2=\"" << map_y(y_b, data, view)
        << "\" stroke=\"#888888\" stroke-dasharray=\"6 4\"/>\n";
    out << "<text x=\"" << map_x(x_b, data, view) + 4 << "\" y=\"" << map_y(y_b, data, view)
        << "\" font-family=\"sans-serif\" font-size=\"11\" fill=\"#666666\">slope " << slope
        << "</text>\n";
  }

  for (std::size_t i = 0; i < series.size(); ++i) {
    const char* color = series_color(i);
    out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
    for (const auto& [x, y] : series[i].points) {
      if (!(x > 0.0) || !(y > 0.0) || !std::isfinite(x) || !std::isfinite(y)) continue;
      out << map_x(std::log10(x), data, view) << ',' << map_y(std::log10(y), data, view) << ' ';
    }
    out << "\"/>\n";
    for (const auto& [x, y] : series[i].points) {
      if (!(x > 0.0) || !(y > 0.0) || !std::isfinite(x) || !std::isfinite(y)) continue;
      out << "<circle cx=\"" << map_x(std::log10(x), data, view) << "\" cy=\""
          << map_y(std::log10(y), data, view) << "\" r=\"3\" fill=\"" << color << "\"/>\n";
    }
    out << "<text x=\"" << view.x0 + 10 << "\" y=\"" << view.y0 + 16 + 16 * i
        << "\" font-family=\"sans-serif\" font-size=\"12\" fill=\"" << color << "\">"
        << series[i].label << "</text>\n";
  }
  out << "</svg>\n";
}

void write_convergence_svg(std::ostream& out, const ConvergenceReport& report) {
  std::vector<PlotSeries> series;
  for (SchemeKind kind : report.schemes) {
    PlotSeries s;
    s.label = scheme_name(kind);
    const SchemeSeries& data = report.series.at(kind);
    for (std::size_t i = 0; i < report.tau_values.size(); ++i)
      s.points.emplace_back(report.tau_values[i], data.errors[i]);
    series.push_back(std::move(s));
  }
  write_loglog_svg(out, "mean-square error vs tau (" + report.coefficient_label + ")", series);
}

void write_system_convergence_svg(std::ostream& out, const SystemConvergenceReport& report) {
  std::vector<PlotSeries> series;
  for (SchemeKind kind : report.schemes) {
    for (int component = 1; component <= 2; ++component) {
      PlotSeries s;
      s.label = std::string(scheme_name(kind)) + (component == 1 ? "1" : "2");
      const SchemeSeries& data = component == 1 ? report.series_component1.at(kind)
                                                : report.series_component2.at(kind);
      for (std::size_t i = 0; i < report.tau_values.size(); ++i)
        s.points.emplace_back(report.tau_values[i], data.errors[i]);
      series.push_back(std::move(s));
    }
  }
  write_loglog_svg(out, "mean-square error vs tau (" + report.coefficient_label + ")", series);
}

}  // namespace stoheat
