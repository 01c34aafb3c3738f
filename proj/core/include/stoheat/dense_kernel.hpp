#pragma once

#include <vector>

namespace stoheat {

// Minimal dense matrix used by the kernel oracle and diagnostics.
struct DenseMatrix {
  int rows = 0;
  int cols = 0;
  std::vector<double> data;  // row-major

  DenseMatrix() = default;
  DenseMatrix(int r, int c) : rows(r), cols(c), data(static_cast<std::size_t>(r) * c, 0.0) {}

  double& at(int i, int j) { return data[static_cast<std::size_t>(i) * cols + j]; }
  double at(int i, int j) const { return data[static_cast<std::size_t>(i) * cols + j]; }
};

DenseMatrix matmul(const DenseMatrix& a, const DenseMatrix& b);

// exp(A) by Taylor scaling-and-squaring: A/2^s with ||A/2^s||_inf <= 1/2,
// a fixed 20-term Horner Taylor evaluation, then s squarings.
DenseMatrix dense_expm(const DenseMatrix& a);

// Dense oracle for the discrete heat kernel G^N(t) = exp(t N^2 D^N),
// independent of the spectral path. Entries are exactly nonnegative in the
// result: rounding negatives of magnitude <= 1e-14 are clamped to zero and
// anything below that window raises. The cap guards against accidental
// O(N^3) use in hot paths.
DenseMatrix dense_heat_kernel(int N, double t, int cap = 64);

}  // namespace stoheat
