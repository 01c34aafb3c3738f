// Acceptance suite: end-to-end checks of the library's headline behavior at
// desk scale. Each case prints one pass/fail line so a failed run is
// readable without digging into the test framework output.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <thread>
#include <vector>

#include "stoheat/dense_kernel.hpp"
#include "stoheat/experiments.hpp"
#include "stoheat/report_io.hpp"
#include "stoheat/rng.hpp"

using namespace stoheat;

namespace {

constexpr std::uint64_t kSeed = 20260810;

int worker_threads() {
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

ExperimentOptions run_options() {
  ExperimentOptions options;
  options.threads = worker_threads();
  options.warn_cfl = false;
  return options;
}

void report(int criterion, bool pass, const char* what, const std::string& detail) {
  std::printf("criterion %d: %s  %s (%s)\n", criterion, pass ? "PASS" : "FAIL", what,
              detail.c_str());
  std::fflush(stdout);
}

bool bitwise_equal(const std::vector<double>& a, const std::vector<double>& b) {
  return a.size() == b.size() &&
         std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0;
}

}  // namespace

TEST_CASE("1. positivity census at tau=1e-3, h=1e-2, T=20") {
  const Discretization d = build_discretization(100, 20000, 20.0);
  const Coefficient coeff = builtin_coefficient("linear", 2.5);
  const InitialCondition u0 = builtin_initial_condition("sin_pi");
  const PositivityReport census = positivity_census(
      {SchemeKind::LT, SchemeKind::EM}, d, coeff, u0, 20, kSeed, run_options());
  const long lt = census.counters.at(SchemeKind::LT).positive;
  const long em = census.counters.at(SchemeKind::EM).positive;
  const bool pass = (lt == 20) && (em <= 2);
  report(1, pass, "splitting scheme positive on all samples, explicit Euler on almost none",
         "LT " + std::to_string(lt) + "/20, EM " + std::to_string(em) + "/20");
  CHECK(lt == 20);
  CHECK(em <= 2);
}

TEST_CASE("2. positivity across coefficients at tau=1e-4, h=1e-2") {
  const Discretization d = build_discretization(100, 50000, 5.0);
  const InitialCondition u0 = builtin_initial_condition("sin_pi");
  bool pass = true;
  std::string detail;
  for (const char* name : {"log1p", "linear", "sin_plus"}) {
    const Coefficient coeff = builtin_coefficient(name, 2.5);
    const PositivityReport census =
        positivity_census({SchemeKind::LT}, d, coeff, u0, 20, kSeed, run_options());
    const long lt = census.counters.at(SchemeKind::LT).positive;
    pass = pass && (lt == 20);
    detail += std::string(name) + " " + std::to_string(lt) + "/20 ";
    CHECK(lt == 20);
  }
  report(2, pass, "splitting scheme positive for every tested nonlinearity", detail);
}

TEST_CASE("3. strong convergence slope of the splitting scheme") {
  std::vector<double> taus;
  for (int k = 6; k <= 12; ++k) taus.push_back(std::ldexp(1.0, -k));
  const Coefficient coeff = builtin_coefficient("linear", 1.0);
  const InitialCondition u0 = builtin_initial_condition("sin_pi");
  const ConvergenceReport study =
      convergence_study({SchemeKind::LT}, 64, taus, std::ldexp(1.0, -14), 0.5, coeff, u0, 100,
                        kSeed, run_options());
  const SchemeSeries& s = study.series.at(SchemeKind::LT);
  const bool band = s.fitted_slope >= 0.35 && s.fitted_slope <= 0.65;
  const bool narrow = s.slope_ci_halfwidth < 0.1;
  report(3, band && narrow, "mean-square rate near 1/2 with negligible sampling error",
         "slope " + std::to_string(s.fitted_slope) + ", ci halfwidth " +
             std::to_string(s.slope_ci_halfwidth) + ", " + std::to_string(s.fit_points) +
             " points");
  CHECK(band);
  CHECK(narrow);
}

TEST_CASE("4. fixed-step error grows with spatial resolution") {
  const std::vector<double> tau{std::ldexp(1.0, -8)};
  const Coefficient coeff = builtin_coefficient("linear", 1.5);
  const InitialCondition u0 = builtin_initial_condition("sin_pi");
  std::vector<double> errors;
  for (int N : {16, 64, 256}) {
    const ConvergenceReport study = convergence_study(
        {SchemeKind::LT}, N, tau, std::ldexp(1.0, -14), 0.5, coeff, u0, 100, kSeed,
        run_options());
    errors.push_back(study.series.at(SchemeKind::LT).errors[0]);
  }
  const bool pass = errors[0] < errors[1] && errors[1] < errors[2];
  report(4, pass, "error at fixed tau strictly increases in N",
         "N=16: " + std::to_string(errors[0]) + ", N=64: " + std::to_string(errors[1]) +
             ", N=256: " + std::to_string(errors[2]));
  CHECK(pass);
}

TEST_CASE("5. oracle equivalences") {
  bool pass = true;
  std::string detail;

  {  // spectral vs dense matrix-exponential kernel
    double worst = 0.0;
    for (int N = 2; N <= 16; ++N) {
      const SpectralDecomposition spec(N);
      const CounterRng rng(kSeed, static_cast<std::uint64_t>(N));
      std::vector<double> v(static_cast<std::size_t>(N - 1));
      for (int i = 0; i < N - 1; ++i) v[i] = rng.normal(static_cast<std::uint64_t>(i));
      for (double t : {0.01, 0.1, 1.0}) {
        const DenseMatrix g = dense_heat_kernel(N, t);
        const std::vector<double> spectral = apply_heat_kernel(spec, t, v);
        for (int n = 0; n < N - 1; ++n) {
          double dense = 0.0;
          for (int j = 0; j < N - 1; ++j) dense += g.at(n, j) * v[j];
          worst = std::max(worst, std::abs(dense - spectral[n]));
        }
      }
    }
    pass = pass && worst <= 1e-10;
    detail += "kernel gap " + std::to_string(worst) + "; ";
    CHECK(worst <= 1e-10);
  }

  {  // semigroup composition
    const SpectralDecomposition spec(16);
    const CounterRng rng(kSeed, 99);
    std::vector<double> v(15);
    for (int i = 0; i < 15; ++i) v[i] = rng.normal(static_cast<std::uint64_t>(i));
    double worst = 0.0;
    for (auto [t1, t2] : {std::pair{0.01, 0.04}, std::pair{0.2, 0.3}}) {
      const std::vector<double> a = apply_heat_kernel(spec, t1, apply_heat_kernel(spec, t2, v));
      const std::vector<double> b = apply_heat_kernel(spec, t1 + t2, v);
      for (std::size_t i = 0; i < a.size(); ++i) worst = std::max(worst, std::abs(a[i] - b[i]));
    }
    pass = pass && worst <= 1e-10;
    detail += "semigroup gap " + std::to_string(worst) + "; ";
    CHECK(worst <= 1e-10);
  }

  {  // Thomas solve vs dense LU
    const int N = 16;
    const int dim = N - 1;
    const double c = 0.003 * N * N;
    const TridiagonalOperator lap = laplacian(N);
    const ShiftedTridiagonalSolver solver(lap, c);
    Eigen::MatrixXd m = Eigen::MatrixXd::Identity(dim, dim);
    for (int i = 0; i < dim; ++i) {
      m(i, i) += 2.0 * c;
      if (i + 1 < dim) {
        m(i, i + 1) = -c;
        m(i + 1, i) = -c;
      }
    }
    const CounterRng rng(kSeed, 123);
    double worst = 0.0;
    for (int trial = 0; trial < 8; ++trial) {
      std::vector<double> b(dim);
      for (int i = 0; i < dim; ++i)
        b[i] = rng.normal(static_cast<std::uint64_t>(trial * dim + i));
      const std::vector<double> x = solver.solve(b);
      const Eigen::VectorXd xe =
          m.partialPivLu().solve(Eigen::Map<const Eigen::VectorXd>(b.data(), dim));
      for (int i = 0; i < dim; ++i) worst = std::max(worst, std::abs(x[i] - xe(i)));
    }
    pass = pass && worst <= 1e-11;
    detail += "solve gap " + std::to_string(worst) + "; ";
    CHECK(worst <= 1e-11);
  }

  {  // coarsening telescopes bit-exactly
    const NoiseIncrements fine = NoiseIncrements::sample(kSeed, 0, 256, 9, std::ldexp(1.0, -10));
    const bool compose = bitwise_equal(fine.coarsen(2).coarsen(2).data(), fine.coarsen(4).data());
    const bool totals =
        bitwise_equal(fine.coarsen(256).data(), fine.coarsen(2).coarsen(8).coarsen(16).data());
    pass = pass && compose && totals;
    detail += std::string("coarsening ") + (compose && totals ? "exact" : "NOT exact") + "; ";
    CHECK(compose);
    CHECK(totals);
  }

  {  // LT and SEXP coincide bitwise when g = 0
    const Discretization d = build_discretization(16, 32, 0.5);
    const Coefficient zero = builtin_coefficient("linear", 0.0);
    const InitialCondition u0 = builtin_initial_condition("sin_pi");
    const NoiseIncrements noise = NoiseIncrements::sample(kSeed, 1, d.M, d.N, d.tau);
    const Trajectory a = integrate(SchemeKind::LT, d, zero, u0, noise);
    const Trajectory b = integrate(SchemeKind::SEXP, d, zero, u0, noise);
    bool equal = a.snapshots.size() == b.snapshots.size();
    for (std::size_t i = 0; equal && i < a.snapshots.size(); ++i)
      equal = bitwise_equal(a.snapshots[i].values, b.snapshots[i].values);
    pass = pass && equal;
    detail += std::string("lt=sexp ") + (equal ? "bitwise" : "MISMATCH");
    CHECK(equal);
  }

  report(5, pass, "dual-route checks agree at their stated tolerances", detail);
}

TEST_CASE("6. noise sub-step second moment law") {
  const int N = 8;
  const double tau = 0.05;
  const double f = 0.8;
  const double u = 0.7;
  const int draws = 100000;
  const CounterRng rng(kSeed, 6);
  const double sigma = std::sqrt(tau);
  double mean_sq = 0.0, mean_fourth = 0.0;
  for (int i = 0; i < draws; ++i) {
    const double x =
        noise_substep_exact(u, f, sigma * rng.normal(static_cast<std::uint64_t>(i)), tau, N);
    mean_sq += x * x;
    mean_fourth += x * x * x * x;
  }
  mean_sq /= draws;
  mean_fourth /= draws;
  const double expected = std::exp(N * f * f * tau) * u * u;
  const double se = std::sqrt((mean_fourth - mean_sq * mean_sq) / draws);
  const bool pass = std::abs(mean_sq - expected) <= 3.0 * se;
  report(6, pass, "geometric sub-step second moment matches exp(N f^2 tau) u^2",
         "sample " + std::to_string(mean_sq) + ", expected " + std::to_string(expected) +
             ", 3se " + std::to_string(3.0 * se));
  CHECK(pass);
}

TEST_CASE("7. second-moment ratio is stable between N=32 and N=64") {
  const Coefficient coeff = builtin_coefficient("linear", 1.0);
  const InitialCondition u0 = builtin_initial_condition("sin_pi");
  const MomentSummary m32 =
      moment_diagnostic(build_discretization(32, 32, 1.0), coeff, u0, 200, kSeed, run_options());
  const MomentSummary m64 =
      moment_diagnostic(build_discretization(64, 64, 1.0), coeff, u0, 200, kSeed, run_options());
  const bool finite = std::isfinite(m32.ratio) && std::isfinite(m64.ratio);
  const double change = m64.ratio / m32.ratio;
  const bool stable = change < 2.0 && change > 0.5;
  report(7, finite && stable, "moment bound constant is resolution-stable",
         "ratio N=32: " + std::to_string(m32.ratio) + ", N=64: " + std::to_string(m64.ratio));
  CHECK(finite);
  CHECK(stable);
}

TEST_CASE("8. system positivity census") {
  const Discretization d = build_discretization(64, 20, 5.0);  // tau = 2^-2, h = 2^-6
  const SystemCoefficient sc = builtin_system_coefficient("sincos", 7.0);
  const InitialCondition u0 = builtin_initial_condition("sin_pi");
  const SystemPositivityReport census = system_positivity_census(
      {SchemeKind::LT, SchemeKind::SEXP, SchemeKind::SEM, SchemeKind::EM}, d, sc, u0, u0, 50,
      kSeed, run_options());
  const long lt1 = census.counters_component1.at(SchemeKind::LT).positive;
  const long lt2 = census.counters_component2.at(SchemeKind::LT).positive;
  const long em1 = census.counters_component1.at(SchemeKind::EM).positive;
  const long em2 = census.counters_component2.at(SchemeKind::EM).positive;
  const bool pass = lt1 == 50 && lt2 == 50 && em1 <= 5 && em2 <= 5;
  report(8, pass, "coupled splitting scheme positive in both components",
         "LT " + std::to_string(lt1) + "/" + std::to_string(lt2) + ", EM " +
             std::to_string(em1) + "/" + std::to_string(em2));
  CHECK(lt1 == 50);
  CHECK(lt2 == 50);
  CHECK(em1 <= 5);
  CHECK(em2 <= 5);
}

TEST_CASE("9. system convergence slopes") {
  std::vector<double> taus;
  for (int k = 4; k <= 12; ++k) taus.push_back(std::ldexp(1.0, -k));
  const SystemCoefficient sc = builtin_system_coefficient("sincos", 1.0);
  const InitialCondition u0 = builtin_initial_condition("sin_pi");
  const SystemConvergenceReport study =
      system_convergence_study({SchemeKind::LT}, 64, taus, std::ldexp(1.0, -14), 0.5, sc, u0,
                               u0, 100, kSeed, run_options());
  const double s1 = study.series_component1.at(SchemeKind::LT).fitted_slope;
  const double s2 = study.series_component2.at(SchemeKind::LT).fitted_slope;
  const bool pass = s1 >= 0.35 && s1 <= 0.65 && s2 >= 0.35 && s2 <= 0.65;
  report(9, pass, "both components converge at rate near 1/2",
         "slopes " + std::to_string(s1) + " / " + std::to_string(s2));
  CHECK(pass);
}
