#pragma once

namespace stoheat {

// Uniform space-time grid for the unit interval with homogeneous Dirichlet
// boundaries. Space nodes are x_n = n*h for 0 <= n <= N with h = 1/N; only
// the N-1 interior nodes carry state. Time nodes are t_m = m*tau for
// 0 <= m <= M with tau = T/M.
struct Discretization {
  int N = 0;          // number of space intervals
  int M = 0;          // number of time steps
  double T = 0.0;     // final time
  double h = 0.0;     // 1/N
  double tau = 0.0;   // T/M
  double cfl_h = 0.0;   // tau/h
  double cfl_h2 = 0.0;  // tau/h^2

  int interior_nodes() const { return N - 1; }
  double grid_point(int n) const;  // x_n, 0 <= n <= N; x_N is exactly 1
  double grid_time(int m) const;   // t_m, 0 <= m <= M; t_M is exactly T
};

// Validates N >= 2 (at least one interior node), M >= 1, T > 0.
Discretization build_discretization(int N, int M, double T);

// Cell index n with x in [x_n, x_{n+1}); inputs within a few ulps of a grid
// point are snapped onto it. x = 1 maps to N, t = T maps to M.
int space_cell_index(const Discretization& d, double x);
int time_cell_index(const Discretization& d, double t);

// Floor projections onto the grids (the right endpoint maps to itself).
double project_space(const Discretization& d, double x);
double project_time(const Discretization& d, double t);

}  // namespace stoheat
