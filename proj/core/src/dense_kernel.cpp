#include "stoheat/dense_kernel.hpp"

#include <cmath>
#include <stdexcept>

namespace stoheat {

namespace {

double norm_inf(const DenseMatrix& a) {
  double best = 0.0;
  for (int i = 0; i < a.rows; ++i) {
    double row = 0.0;
    for (int j = 0; j < a.cols; ++j) row += std::abs(a.at(i, j));
    if (row > best) best = row;
  }
  return best;
}

DenseMatrix identity(int n) {
  DenseMatrix id(n, n);
  for (int i = 0; i < n; ++i) id.at(i, i) = 1.0;
  return id;
}

}  // namespace

DenseMatrix matmul(const DenseMatrix& a, const DenseMatrix& b) {
  if (a.cols != b.rows) throw std::invalid_argument("matmul: shape mismatch");
  DenseMatrix c(a.rows, b.cols);
  for (int i = 0; i < a.rows; ++i) {
    for (int k = 0; k < a.cols; ++k) {
      const double aik = a.at(i, k);
      if (aik == 0.0) continue;
      const double* brow = &b.data[static_cast<std::size_t>(k) * b.cols];
      double* crow = &c.data[static_cast<std::size_t>(i) * c.cols];
      for (int j = 0; j < b.cols; ++j) crow[j] += aik * brow[j];
    }
  }
  return c;
}

DenseMatrix dense_expm(const DenseMatrix& a) {
  if (a.rows != a.cols) throw std::invalid_argument("dense_expm: matrix must be square");
  const int n = a.rows;

  int squarings = 0;
  double norm = norm_inf(a);
  while (norm > 0.5 && squarings < 64) {
    norm *= 0.5;
    ++squarings;
  }
  const double scale = std::ldexp(1.0, -squarings);

  DenseMatrix b(n, n);
  for (std::size_t i = 0; i < b.data.size(); ++i) b.data[i] = a.data[i] * scale;

  // Horner form of the order-20 Taylor polynomial; with ||b|| <= 1/2 the
  // truncation error is far below double precision.
  constexpr int kOrder = 20;
  DenseMatrix p = identity(n);
  for (int k = kOrder; k >= 1; --k) {
    DenseMatrix bp = matmul(b, p);
    p = identity(n);
    const double inv_k = 1.0 / static_cast<double>(k);
    for (std::size_t i = 0; i < p.data.size(); ++i) p.data[i] += bp.data[i] * inv_k;
  }

  for (int s = 0; s < squarings; ++s) p = matmul(p, p);
  return p;
}

DenseMatrix dense_heat_kernel(int N, double t, int cap) {
  if (N < 2) throw std::invalid_argument("dense_heat_kernel: N must be >= 2");
  if (N > cap) throw std::invalid_argument("dense_heat_kernel: N exceeds the oracle cap");
  if (!(t >= 0.0)) throw std::domain_error("dense_heat_kernel: t must be nonnegative");

  const int dim = N - 1;
  DenseMatrix a(dim, dim);
  const double scale = t * static_cast<double>(N) * static_cast<double>(N);
  for (int i = 0; i < dim; ++i) {
    a.at(i, i) = -2.0 * scale;
    if (i + 1 < dim) {
      a.at(i, i + 1) = scale;
      a.at(i + 1, i) = scale;
    }
  }

  DenseMatrix g = dense_expm(a);
  for (double& v : g.data) {
    if (v < 0.0) {
      if (v < -1e-14)
        throw std::runtime_error("dense_heat_kernel: negative entry beyond the clamping window");
      v = 0.0;
    }
  }
  return g;
}

}  // namespace stoheat
