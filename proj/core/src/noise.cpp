#include "stoheat/noise.hpp"

#include <array>
#include <cmath>
#include <cstring>
#include <fstream>
#include <numbers>
#include <ostream>
#include <stdexcept>

#include "stoheat/rng.hpp"

namespace stoheat {

namespace {

void box_muller(double u1, double u2, double& z_cos, double& z_sin) {
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * std::numbers::pi * u2;
  z_cos = r * std::cos(angle);
  z_sin = r * std::sin(angle);
}

// Balanced dyadic-tree sum of count column entries starting at flat index
// `first` with the given stride. Splits at the largest power of two strictly
// below count, so any power-of-two regrouping reproduces identical rounding.
double tree_sum(const std::vector<double>& data, std::size_t first, std::size_t stride,
                int count) {
  if (count == 1) return data[first];
  int split = 1;
  while (split * 2 < count) split *= 2;
  return tree_sum(data, first, stride, split) +
         tree_sum(data, first + stride * static_cast<std::size_t>(split), stride, count - split);
}

void put_u64(std::ostream& out, std::uint64_t v) {
  std::array<unsigned char, 8> b;
  for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>((v >> (8 * i)) & 0xFF);
  out.write(reinterpret_cast<const char*>(b.data()), 8);
}

void put_f64(std::ostream& out, double v) {
  std::uint64_t bits;
  std::memcpy(&bits, &v, 8);
  put_u64(out, bits);
}

std::uint64_t get_u64(std::istream& in) {
  std::array<unsigned char, 8> b;
  in.read(reinterpret_cast<char*>(b.data()), 8);
  if (!in) throw std::runtime_error("NoiseIncrements::load: truncated stream");
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
  return v;
}

double get_f64(std::istream& in) {
  const std::uint64_t bits = get_u64(in);
  double v;
  std::memcpy(&v, &bits, 8);
  return v;
}

void validate_dims(int M, int N, double tau) {
  if (M < 1) throw std::invalid_argument("NoiseIncrements: M must be >= 1");
  if (N < 2) throw std::invalid_argument("NoiseIncrements: N must be >= 2");
  if (!(tau > 0.0) || !std::isfinite(tau))
    throw std::invalid_argument("NoiseIncrements: tau must be positive and finite");
}

}  // namespace

double CounterRng::normal(std::uint64_t counter) const {
  double even, odd;
  normal_pair(counter >> 1, even, odd);
  return (counter & 1ULL) ? odd : even;
}

void CounterRng::normal_pair(std::uint64_t pair_index, double& even, double& odd) const {
  const double u1 = uniform(2 * pair_index);
  const double u2 = uniform(2 * pair_index + 1);
  box_muller(u1, u2, even, odd);
}

NoiseIncrements NoiseIncrements::sample(std::uint64_t seed, std::uint64_t sample_index, int M,
                                        int N, double tau, std::size_t dense_cap) {
  validate_dims(M, N, tau);
  const std::size_t entries = static_cast<std::size_t>(M) * static_cast<std::size_t>(N - 1);
  if (entries > dense_cap)
    throw std::invalid_argument(
        "NoiseIncrements::sample: M*(N-1) exceeds the dense storage cap; "
        "generate rows on demand with sample_increment_row instead");

  NoiseIncrements out;
  out.M_ = M;
  out.N_ = N;
  out.tau_ = tau;
  out.seed_ = seed;
  out.sample_index_ = sample_index;
  out.data_.resize(entries);

  const CounterRng rng(seed, sample_index);
  const double sigma = std::sqrt(tau);
  std::size_t k = 0;
  for (; k + 1 < entries; k += 2) {
    double even, odd;
    rng.normal_pair(k >> 1, even, odd);
    out.data_[k] = sigma * even;
    out.data_[k + 1] = sigma * odd;
  }
  if (k < entries) out.data_[k] = sigma * rng.normal(k);
  return out;
}

std::span<const double> NoiseIncrements::row(int m) const {
  if (m < 0 || m >= M_) throw std::out_of_range("NoiseIncrements::row: index out of range");
  return {&data_[static_cast<std::size_t>(m) * columns()], static_cast<std::size_t>(columns())};
}

NoiseIncrements NoiseIncrements::coarsen(int factor) const {
  if (factor < 1) throw std::invalid_argument("NoiseIncrements::coarsen: factor must be >= 1");
  if (M_ % factor != 0)
    throw std::invalid_argument("NoiseIncrements::coarsen: factor must divide M");

  NoiseIncrements out;
  out.M_ = M_ / factor;
  out.N_ = N_;
  out.tau_ = tau_ * static_cast<double>(factor);
  out.seed_ = seed_;
  out.sample_index_ = sample_index_;
  if (factor == 1) {
    out.data_ = data_;
    return out;
  }

  const std::size_t cols = static_cast<std::size_t>(columns());
  out.data_.resize(static_cast<std::size_t>(out.M_) * cols);
  for (int m = 0; m < out.M_; ++m) {
    const std::size_t first_row = static_cast<std::size_t>(m) * static_cast<std::size_t>(factor);
    for (std::size_t n = 0; n < cols; ++n)
      out.data_[static_cast<std::size_t>(m) * cols + n] =
          tree_sum(data_, first_row * cols + n, cols, factor);
  }
  return out;
}

void NoiseIncrements::save(std::ostream& out) const {
  put_u64(out, static_cast<std::uint64_t>(M_));
  put_u64(out, static_cast<std::uint64_t>(N_));
  put_f64(out, tau_);
  put_u64(out, seed_);
  put_u64(out, sample_index_);
  for (double v : data_) put_f64(out, v);
  if (!out) throw std::runtime_error("NoiseIncrements::save: write failed");
}

void NoiseIncrements::save_file(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("NoiseIncrements::save_file: cannot open " + path);
  save(out);
}

NoiseIncrements NoiseIncrements::load(std::istream& in) {
  NoiseIncrements out;
  const std::uint64_t m = get_u64(in);
  const std::uint64_t n = get_u64(in);
  out.tau_ = get_f64(in);
  out.seed_ = get_u64(in);
  out.sample_index_ = get_u64(in);
  if (m == 0 || n < 2 || m > (1ULL << 40) || n > (1ULL << 40))
    throw std::runtime_error("NoiseIncrements::load: corrupt header");
  out.M_ = static_cast<int>(m);
  out.N_ = static_cast<int>(n);
  validate_dims(out.M_, out.N_, out.tau_);
  out.data_.resize(static_cast<std::size_t>(out.M_) * static_cast<std::size_t>(out.N_ - 1));
  for (double& v : out.data_) v = get_f64(in);
  return out;
}

NoiseIncrements NoiseIncrements::load_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("NoiseIncrements::load_file: cannot open " + path);
  return load(in);
}

std::vector<double> sample_increment_row(std::uint64_t seed, std::uint64_t sample_index, int m,
                                         int N, double tau) {
  validate_dims(m + 1, N, tau);
  if (m < 0) throw std::out_of_range("sample_increment_row: m must be nonnegative");
  const CounterRng rng(seed, sample_index);
  const double sigma = std::sqrt(tau);
  const std::size_t cols = static_cast<std::size_t>(N - 1);
  std::vector<double> row(cols);
  const std::size_t base = static_cast<std::size_t>(m) * cols;
  for (std::size_t n = 0; n < cols; ++n) row[n] = sigma * rng.normal(base + n);
  return row;
}

}  // namespace stoheat
