#pragma once

#include <span>
#include <vector>

namespace stoheat {

// Symmetric tridiagonal operator: one diagonal vector and one off-diagonal
// vector (shared by both off-diagonals).
class TridiagonalOperator {
 public:
  TridiagonalOperator(std::vector<double> diagonal, std::vector<double> off_diagonal);

  int dimension() const { return static_cast<int>(diagonal_.size()); }
  const std::vector<double>& diagonal() const { return diagonal_; }
  const std::vector<double>& off_diagonal() const { return off_diagonal_; }

  // out = A v
  void apply(std::span<const double> v, std::span<double> out) const;
  std::vector<double> apply(std::span<const double> v) const;

 private:
  std::vector<double> diagonal_;
  std::vector<double> off_diagonal_;
};

// (N-1)x(N-1) finite-difference Laplacian on the unit interval with
// homogeneous Dirichlet boundaries: -2 on the diagonal, 1 off-diagonal.
// Requires N >= 2.
TridiagonalOperator laplacian(int N);

// Solves (I - c*A) x = b for a symmetric tridiagonal A by the Thomas
// algorithm. The forward-elimination factors depend only on (A, c) and are
// computed once, so repeated solves are O(dim). For A the Laplacian and
// c = tau*N^2 > 0 the matrix is strictly diagonally dominant, hence no
// pivoting is needed.
class ShiftedTridiagonalSolver {
 public:
  ShiftedTridiagonalSolver(const TridiagonalOperator& a, double c);

  int dimension() const { return static_cast<int>(inv_pivot_.size()); }
  void solve(std::span<const double> b, std::span<double> x) const;
  std::vector<double> solve(std::span<const double> b) const;

 private:
  std::vector<double> upper_;      // upper band of (I - c*A): -c * off_j
  std::vector<double> ratio_;      // upper_j / pivot_j from forward elimination
  std::vector<double> inv_pivot_;  // 1 / pivot_j
};

}  // namespace stoheat
