#pragma once

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "stoheat/experiments.hpp"
#include "stoheat/integrators.hpp"
#include "stoheat/systems.hpp"

namespace stoheat {

// Resolved configuration echoed at the top of every output file.
using ConfigEcho = std::vector<std::pair<std::string, std::string>>;

// 17 significant digits, locale-independent ("%.17g").
std::string format_float(double v);

// '#'-prefixed key = value lines, preceded by the library version.
void write_header(std::ostream& out, const ConfigEcho& config);

// CSV columns: scheme, tau, error, stderr (one row per scheme and tau).
void write_convergence_csv(std::ostream& out, const ConvergenceReport& report,
                           const ConfigEcho& config);

// CSV columns: scheme, positive, negative, blown_up, total.
void write_positivity_csv(std::ostream& out, const PositivityReport& report,
                          const ConfigEcho& config);

// System variants carry an extra `component` column (1 or 2).
void write_system_convergence_csv(std::ostream& out, const SystemConvergenceReport& report,
                                  const ConfigEcho& config);
void write_system_positivity_csv(std::ostream& out, const SystemPositivityReport& report,
                                 const ConfigEcho& config);

// Long-format trajectory dump: m, t, n, x, value.
void write_trajectory_csv(std::ostream& out, const Trajectory& traj, const ConfigEcho& config);

// CSV columns: key, value.
void write_moment_csv(std::ostream& out, const MomentSummary& summary, const ConfigEcho& config);

struct PlotSeries {
  std::string label;
  std::vector<std::pair<double, double>> points;  // (x, y), positive finite
};

// Self-contained SVG log-log plot with decade grid lines and dashed guide
// lines of slope 1/4 and 1/2. Decorative output; nothing parses it back.
void write_loglog_svg(std::ostream& out, const std::string& title,
                      const std::vector<PlotSeries>& series);

void write_convergence_svg(std::ostream& out, const ConvergenceReport& report);
void write_system_convergence_svg(std::ostream& out, const SystemConvergenceReport& report);

}  // namespace stoheat
