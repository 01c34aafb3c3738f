#include "stoheat/tridiagonal.hpp"

#include <cmath>
#include <stdexcept>

namespace stoheat {

TridiagonalOperator::TridiagonalOperator(std::vector<double> diagonal,
                                         std::vector<double> off_diagonal)
    : diagonal_(std::move(diagonal)), off_diagonal_(std::move(off_diagonal)) {
  if (diagonal_.empty()) throw std::invalid_argument("TridiagonalOperator: empty diagonal");
  if (off_diagonal_.size() + 1 != diagonal_.size())
    throw std::invalid_argument("TridiagonalOperator: off-diagonal size must be dimension-1");
}

void TridiagonalOperator::apply(std::span<const double> v, std::span<double> out) const {
  const int n = dimension();
  if (static_cast<int>(v.size()) != n || static_cast<int>(out.size()) != n)
    throw std::invalid_argument("TridiagonalOperator::apply: dimension mismatch");
  for (int i = 0; i < n; ++i) {
    double acc = diagonal_[i] * v[i];
    if (i > 0) acc += off_diagonal_[i - 1] * v[i - 1];
    if (i + 1 < n) acc += off_diagonal_[i] * v[i + 1];
    out[i] = acc;
  }
}

std::vector<double> TridiagonalOperator::apply(std::span<const double> v) const {
  std::vector<double> out(v.size());
  apply(v, out);
  return out;
}

TridiagonalOperator laplacian(int N) {
  if (N < 2) throw std::invalid_argument("laplacian: N must be >= 2");
  std::vector<double> diag(static_cast<std::size_t>(N - 1), -2.0);
  std::vector<double> off(static_cast<std::size_t>(N - 2), 1.0);
  return TridiagonalOperator(std::move(diag), std::move(off));
}

ShiftedTridiagonalSolver::ShiftedTridiagonalSolver(const TridiagonalOperator& a, double c) {
  const int n = a.dimension();
  upper_.resize(static_cast<std::size_t>(n > 0 ? n - 1 : 0));
  ratio_.resize(upper_.size());
  inv_pivot_.resize(static_cast<std::size_t>(n));

  for (int i = 0; i + 1 < n; ++i) upper_[i] = -c * a.off_diagonal()[i];

  double pivot = 1.0 - c * a.diagonal()[0];
  if (pivot == 0.0 || !std::isfinite(pivot))
    throw std::runtime_error("ShiftedTridiagonalSolver: singular pivot");
  inv_pivot_[0] = 1.0 / pivot;
  for (int i = 1; i < n; ++i) {
    ratio_[i - 1] = upper_[i - 1] * inv_pivot_[i - 1];
    pivot = (1.0 - c * a.diagonal()[i]) - upper_[i - 1] * ratio_[i - 1];
    if (pivot == 0.0 || !std::isfinite(pivot))
      throw std::runtime_error("ShiftedTridiagonalSolver: singular pivot");
    inv_pivot_[i] = 1.0 / pivot;
  }
}

void ShiftedTridiagonalSolver::solve(std::span<const double> b, std::span<double> x) const {
  const int n = dimension();
  if (static_cast<int>(b.size()) != n || static_cast<int>(x.size()) != n)
    throw std::invalid_argument("ShiftedTridiagonalSolver::solve: dimension mismatch");
  // Forward sweep reuses x as storage for the transformed right-hand side.
  x[0] = b[0] * inv_pivot_[0];
  for (int i = 1; i < n; ++i) x[i] = (b[i] - upper_[i - 1] * x[i - 1]) * inv_pivot_[i];
  for (int i = n - 2; i >= 0; --i) x[i] -= ratio_[i] * x[i + 1];
}

std::vector<double> ShiftedTridiagonalSolver::solve(std::span<const double> b) const {
  std::vector<double> x(b.size());
  solve(b, x);
  return x;
}

}  // namespace stoheat
