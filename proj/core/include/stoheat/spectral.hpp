#pragma once

#include <memory>
#include <span>
#include <vector>

namespace stoheat {

// Closed-form eigendecomposition of the scaled discrete Laplacian N^2 D^N on
// the interior nodes:
//
//   N^2 D^N = V diag(-lambda_j) V^T,
//   lambda_j = 4 N^2 sin^2(j pi / (2N)),     j = 1..N-1,
//   V(n,j)   = sqrt(2h) sin(j pi x_n),       x_n = n/N.
//
// V stores the sqrt(h)-scaled orthonormal sine modes, so V^T V = I and the
// semigroup action is a plain similarity transform.
class SpectralDecomposition {
 public:
  explicit SpectralDecomposition(int N);

  int space_intervals() const { return N_; }
  int dimension() const { return N_ - 1; }
  const std::vector<double>& eigenvalues() const { return eigenvalues_; }
  // Node index n and mode index j, both 0-based over the interior.
  double eigenvector(int n, int j) const {
    return vectors_[static_cast<std::size_t>(n) * static_cast<std::size_t>(N_ - 1) +
                    static_cast<std::size_t>(j)];
  }

  // w = V^T v (node values to mode coefficients) and v = V w (back).
  void to_modes(std::span<const double> v, std::span<double> w) const;
  void from_modes(std::span<const double> w, std::span<double> v) const;

 private:
  int N_;
  std::vector<double> eigenvalues_;
  std::vector<double> vectors_;  // row-major (N-1)x(N-1), row = node, column = mode
};

// y = exp(t N^2 D^N) v via the mode transform. Convenience form; hot loops
// should hold a HeatPropagator so the exponential factors (and for moderate N
// the whole kernel matrix) are computed once per distinct t.
std::vector<double> apply_heat_kernel(const SpectralDecomposition& s, double t,
                                      std::span<const double> v);

// Action of the discrete heat semigroup exp(t N^2 D^N) at a fixed time.
//
// Up to dense_threshold the kernel matrix is materialized once by spectral
// synthesis and rounding-level negative entries are clamped to zero, so the
// operator maps nonnegative vectors to nonnegative vectors exactly in
// floating point. Above the threshold the factored form V diag(e^{-lambda t}) V^T
// is applied per call; that path is never clamped.
class HeatPropagator {
 public:
  static constexpr int kDefaultDenseThreshold = 1024;

  HeatPropagator(const SpectralDecomposition& s, double t,
                 int dense_threshold = kDefaultDenseThreshold);

  int space_intervals() const { return N_; }
  int dimension() const { return dim_; }
  double time() const { return t_; }
  bool dense() const { return !matrix_.empty(); }

  void apply(std::span<const double> v, std::span<double> out) const;
  std::vector<double> apply(std::span<const double> v) const;

  // Kernel entry G_{nk}(t); only available on the dense path.
  double entry(int n, int k) const;

 private:
  int N_;
  int dim_;
  double t_;
  std::vector<double> matrix_;        // dense path, row-major, entries >= 0
  std::vector<double> mode_factors_;  // factored path: e^{-lambda_j t}
  std::vector<double> vectors_;       // factored path: copy of V
};

}  // namespace stoheat
