#include "stoheat/grid.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace stoheat {

namespace {

// Snap a scaled coordinate to the nearest integer when it sits within a few
// ulps, otherwise floor. Keeps grid points idempotent under projection even
// though n*h is not exactly representable for general N.
int snapped_floor(double scaled, int upper) {
  const double nearest = std::round(scaled);
  const double fuzz =
      64.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(scaled));
  double cell = (std::abs(scaled - nearest) <= fuzz) ? nearest : std::floor(scaled);
  if (cell < 0.0) cell = 0.0;
  if (cell > static_cast<double>(upper)) cell = static_cast<double>(upper);
  return static_cast<int>(cell);
}

}  // namespace

double Discretization::grid_point(int n) const {
  if (n < 0 || n > N) throw std::out_of_range("grid_point: node index out of range");
  if (n == N) return 1.0;
  return static_cast<double>(n) * h;
}

double Discretization::grid_time(int m) const {
  if (m < 0 || m > M) throw std::out_of_range("grid_time: step index out of range");
  if (m == M) return T;
  return static_cast<double>(m) * tau;
}

Discretization build_discretization(int N, int M, double T) {
  if (N < 2) throw std::invalid_argument("build_discretization: N must be >= 2 (no interior node otherwise)");
  if (M < 1) throw std::invalid_argument("build_discretization: M must be >= 1");
  if (!(T > 0.0) || !std::isfinite(T)) throw std::invalid_argument("build_discretization: T must be positive and finite");
  Discretization d;
  d.N = N;
  d.M = M;
  d.T = T;
  d.h = 1.0 / static_cast<double>(N);
  d.tau = T / static_cast<double>(M);
  d.cfl_h = d.tau / d.h;
  d.cfl_h2 = d.tau / (d.h * d.h);
  return d;
}

int space_cell_index(const Discretization& d, double x) {
  if (!(x >= 0.0 && x <= 1.0)) throw std::domain_error("space_cell_index: x outside [0,1]");
  return snapped_floor(x * static_cast<double>(d.N), d.N);
}

int time_cell_index(const Discretization& d, double t) {
  if (!(t >= 0.0 && t <= d.T)) throw std::domain_error("time_cell_index: t outside [0,T]");
  return snapped_floor(t / d.tau, d.M);
}

double project_space(const Discretization& d, double x) {
  return d.grid_point(space_cell_index(d, x));
}

double project_time(const Discretization& d, double t) {
  return d.grid_time(time_cell_index(d, t));
}

}  // namespace stoheat
