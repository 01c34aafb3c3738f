#include "stoheat/spectral.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace stoheat {

namespace {

void require_dim(int expected, std::size_t got, const char* where) {
  if (static_cast<std::size_t>(expected) != got)
    throw std::invalid_argument(std::string(where) + ": dimension mismatch");
}

}  // namespace

SpectralDecomposition::SpectralDecomposition(int N) : N_(N) {
  if (N < 2) throw std::invalid_argument("SpectralDecomposition: N must be >= 2");
  const int dim = N - 1;
  const double pi = std::numbers::pi;
  const double nn = static_cast<double>(N);

  eigenvalues_.resize(static_cast<std::size_t>(dim));
  for (int j = 1; j <= dim; ++j) {
    const double s = std::sin(static_cast<double>(j) * pi / (2.0 * nn));
    eigenvalues_[static_cast<std::size_t>(j - 1)] = 4.0 * nn * nn * s * s;
  }

  const double scale = std::sqrt(2.0 / nn);  // sqrt(2) * sqrt(h)
  vectors_.resize(static_cast<std::size_t>(dim) * static_cast<std::size_t>(dim));
  for (int n = 1; n <= dim; ++n) {
    for (int j = 1; j <= dim; ++j) {
      const double xn = static_cast<double>(n) / nn;
      vectors_[static_cast<std::size_t>(n - 1) * dim + static_cast<std::size_t>(j - 1)] =
          scale * std::sin(static_cast<double>(j) * pi * xn);
    }
  }
}

void SpectralDecomposition::to_modes(std::span<const double> v, std::span<double> w) const {
  const int dim = dimension();
  require_dim(dim, v.size(), "to_modes(v)");
  require_dim(dim, w.size(), "to_modes(w)");
  for (int j = 0; j < dim; ++j) {
    double acc = 0.0;
    for (int n = 0; n < dim; ++n)
      acc += vectors_[static_cast<std::size_t>(n) * dim + static_cast<std::size_t>(j)] * v[n];
    w[j] = acc;
  }
}

void SpectralDecomposition::from_modes(std::span<const double> w, std::span<double> v) const {
  const int dim = dimension();
  require_dim(dim, w.size(), "from_modes(w)");
  require_dim(dim, v.size(), "from_modes(v)");
  for (int n = 0; n < dim; ++n) {
    const double* row = &vectors_[static_cast<std::size_t>(n) * dim];
    double acc = 0.0;
    for (int j = 0; j < dim; ++j) acc += row[j] * w[j];
    v[n] = acc;
  }
}

std::vector<double> apply_heat_kernel(const SpectralDecomposition& s, double t,
                                      std::span<const double> v) {
  if (!(t >= 0.0)) throw std::domain_error("apply_heat_kernel: t must be nonnegative");
  require_dim(s.dimension(), v.size(), "apply_heat_kernel");
  if (t == 0.0) return std::vector<double>(v.begin(), v.end());

  const int dim = s.dimension();
  std::vector<double> modes(static_cast<std::size_t>(dim));
  s.to_modes(v, modes);
  for (int j = 0; j < dim; ++j) modes[j] *= std::exp(-s.eigenvalues()[j] * t);
  std::vector<double> out(static_cast<std::size_t>(dim));
  s.from_modes(modes, out);
  return out;
}

HeatPropagator::HeatPropagator(const SpectralDecomposition& s, double t, int dense_threshold)
    : N_(s.space_intervals()), dim_(s.dimension()), t_(t) {
  if (!(t >= 0.0)) throw std::domain_error("HeatPropagator: t must be nonnegative");

  std::vector<double> factors(static_cast<std::size_t>(dim_));
  for (int j = 0; j < dim_; ++j) factors[j] = std::exp(-s.eigenvalues()[j] * t);

  if (N_ <= dense_threshold) {
    // Materialize V diag(factors) V^T once. The exact kernel is entrywise
    // nonnegative (exponential of a Metzler matrix); synthesis can leave
    // rounding-level negatives which are clamped so nonnegative inputs map to
    // nonnegative outputs without tolerance.
    matrix_.assign(static_cast<std::size_t>(dim_) * static_cast<std::size_t>(dim_), 0.0);
    for (int n = 0; n < dim_; ++n) {
      for (int k = 0; k < dim_; ++k) {
        double acc = 0.0;
        for (int j = 0; j < dim_; ++j)
          acc += s.eigenvector(n, j) * factors[j] * s.eigenvector(k, j);
        if (acc < 0.0) {
          if (acc < -1e-12)
            throw std::runtime_error("HeatPropagator: kernel entry below clamping window");
          acc = 0.0;
        }
        matrix_[static_cast<std::size_t>(n) * dim_ + static_cast<std::size_t>(k)] = acc;
      }
    }
  } else {
    mode_factors_ = std::move(factors);
    vectors_.resize(static_cast<std::size_t>(dim_) * static_cast<std::size_t>(dim_));
    for (int n = 0; n < dim_; ++n)
      for (int j = 0; j < dim_; ++j)
        vectors_[static_cast<std::size_t>(n) * dim_ + static_cast<std::size_t>(j)] =
            s.eigenvector(n, j);
  }
}

void HeatPropagator::apply(std::span<const double> v, std::span<double> out) const {
  require_dim(dim_, v.size(), "HeatPropagator::apply(v)");
  require_dim(dim_, out.size(), "HeatPropagator::apply(out)");
  if (t_ == 0.0) {
    for (int i = 0; i < dim_; ++i) out[i] = v[i];
    return;
  }
  if (dense()) {
    for (int n = 0; n < dim_; ++n) {
      const double* row = &matrix_[static_cast<std::size_t>(n) * dim_];
      double acc = 0.0;
      for (int k = 0; k < dim_; ++k) acc += row[k] * v[k];
      out[n] = acc;
    }
    return;
  }
  std::vector<double> modes(static_cast<std::size_t>(dim_));
  for (int j = 0; j < dim_; ++j) {
    double acc = 0.0;
    for (int n = 0; n < dim_; ++n)
      acc += vectors_[static_cast<std::size_t>(n) * dim_ + static_cast<std::size_t>(j)] * v[n];
    modes[j] = acc * mode_factors_[j];
  }
  for (int n = 0; n < dim_; ++n) {
    const double* row = &vectors_[static_cast<std::size_t>(n) * dim_];
    double acc = 0.0;
    for (int j = 0; j < dim_; ++j) acc += row[j] * modes[j];
    out[n] = acc;
  }
}

std::vector<double> HeatPropagator::apply(std::span<const double> v) const {
  std::vector<double> out(v.size());
  apply(v, out);
  return out;
}

double HeatPropagator::entry(int n, int k) const {
  if (!dense()) throw std::logic_error("HeatPropagator::entry: factored path has no stored matrix");
  if (n < 0 || n >= dim_ || k < 0 || k >= dim_)
    throw std::out_of_range("HeatPropagator::entry: index out of range");
  return matrix_[static_cast<std::size_t>(n) * dim_ + static_cast<std::size_t>(k)];
}

}  // namespace stoheat
