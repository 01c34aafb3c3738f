#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace stoheat {

// Increments Delta_{m,n} W of the N-1 scaled Wiener processes over a uniform
// time grid: an M x (N-1) matrix whose entries are independent N(0, tau)
// draws. Values are immutable after creation; regenerating with the same
// (seed, sample_index, M, N, tau) reproduces the matrix bit-for-bit.
class NoiseIncrements {
 public:
  static constexpr std::size_t kDefaultDenseCap = 100'000'000;

  static NoiseIncrements sample(std::uint64_t seed, std::uint64_t sample_index, int M, int N,
                                double tau, std::size_t dense_cap = kDefaultDenseCap);

  int time_steps() const { return M_; }
  int space_intervals() const { return N_; }
  int columns() const { return N_ - 1; }
  double tau() const { return tau_; }
  std::uint64_t seed() const { return seed_; }
  std::uint64_t sample_index() const { return sample_index_; }

  std::span<const double> row(int m) const;
  double at(int m, int n) const { return data_[static_cast<std::size_t>(m) * columns() + n]; }
  const std::vector<double>& data() const { return data_; }

  // Groups of `factor` consecutive increments summed per column, so coarse
  // schemes and the fine reference share one Brownian path. Groups are summed
  // with a fixed balanced dyadic tree, which makes power-of-two compositions
  // exact: coarsen(coarsen(x,2),2) == coarsen(x,4) bit-for-bit.
  NoiseIncrements coarsen(int factor) const;

  // Little-endian binary layout: u64 M, u64 N, f64 tau, u64 seed,
  // u64 sample_index, then M*(N-1) f64 entries row-major.
  void save(std::ostream& out) const;
  void save_file(const std::string& path) const;
  static NoiseIncrements load(std::istream& in);
  static NoiseIncrements load_file(const std::string& path);

 private:
  NoiseIncrements() = default;

  int M_ = 0;
  int N_ = 0;
  double tau_ = 0.0;
  std::uint64_t seed_ = 0;
  std::uint64_t sample_index_ = 0;
  std::vector<double> data_;  // row-major M x (N-1)
};

// Row m of sample(seed, sample_index, ..., N, tau), regenerated on demand;
// bitwise equal to the stored row. Building block for streaming drivers that
// stay above the dense cap.
std::vector<double> sample_increment_row(std::uint64_t seed, std::uint64_t sample_index, int m,
                                         int N, double tau);

}  // namespace stoheat
