#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <cstring>
#include <vector>

#include "stoheat/integrators.hpp"
#include "stoheat/rng.hpp"

using namespace stoheat;

namespace {

bool bitwise_equal(const std::vector<double>& a, const std::vector<double>& b) {
  return a.size() == b.size() &&
         std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0;
}

SchemeState make_state(std::vector<double> values) {
  SchemeState s;
  s.values = std::move(values);
  return s;
}

}  // namespace

TEST_CASE("scheme names round-trip") {
  for (SchemeKind kind : {SchemeKind::LT, SchemeKind::EM, SchemeKind::SEM, SchemeKind::SEXP})
    CHECK(parse_scheme(scheme_name(kind)) == kind);
  CHECK(!parse_scheme("rk4").has_value());
}

TEST_CASE("noise sub-step closed form") {
  SUBCASE("zero is absorbing for any factor and increment") {
    CHECK(noise_substep_exact(0.0, 1e300, 5.0, 0.1, 64) == 0.0);
    CHECK(noise_substep_exact(0.0, 0.0, 0.0, 0.1, 2) == 0.0);
  }
  SUBCASE("drift-only value") {
    CHECK(noise_substep_exact(3.0, 1.0, 0.0, 2.0, 1) ==
          doctest::Approx(3.0 * std::exp(-1.0)).epsilon(1e-15));
  }
  SUBCASE("sign is preserved") {
    CHECK(noise_substep_exact(2.0, 0.5, 0.3, 0.1, 4) > 0.0);
    CHECK(noise_substep_exact(-2.0, 0.5, 0.3, 0.1, 4) < 0.0);
  }
  SUBCASE("overflow surfaces as infinity rather than trapping") {
    const double out = noise_substep_exact(1.0, 1e6, 1e6, 1e-9, 4);
    CHECK(std::isinf(out));
  }
}

TEST_CASE("noise sub-step second moment matches the lognormal law") {
  const int N = 8;
  const double tau = 0.05;
  const double f = 0.8;
  const double u = 0.7;
  const int draws = 100000;
  const CounterRng rng(31337, 0);
  const double sigma = std::sqrt(tau);
  double mean_sq = 0.0, mean_fourth = 0.0;
  for (int i = 0; i < draws; ++i) {
    const double dw = sigma * rng.normal(static_cast<std::uint64_t>(i));
    const double x = noise_substep_exact(u, f, dw, tau, N);
    mean_sq += x * x;
    mean_fourth += x * x * x * x;
  }
  mean_sq /= draws;
  mean_fourth /= draws;
  const double expected = std::exp(N * f * f * tau) * u * u;
  const double se = std::sqrt((mean_fourth - mean_sq * mean_sq) / draws);
  CHECK(std::abs(mean_sq - expected) <= 3.0 * se);
}

TEST_CASE("splitting step with vanishing nonlinearity is the pure semigroup") {
  const int N = 10;
  const SpectralDecomposition spec(N);
  const HeatPropagator heat(spec, 0.01);
  const Coefficient zero = builtin_coefficient("linear", 0.0);
  const CounterRng rng(5, 5);
  std::vector<double> values(N - 1), dw(N - 1);
  for (int n = 0; n < N - 1; ++n) {
    values[n] = rng.normal(static_cast<std::uint64_t>(n));
    dw[n] = 0.1 * rng.normal(static_cast<std::uint64_t>(100 + n));
  }
  const SchemeState out = lt_step(make_state(values), heat, zero, dw);
  CHECK(out.time_index == 1);
  CHECK(bitwise_equal(out.values, heat.apply(values)));
}

TEST_CASE("splitting step on one interior node matches the hand formula") {
  const int N = 2;
  const double tau = 0.125;
  const SpectralDecomposition spec(N);
  const HeatPropagator heat(spec, tau);
  const Coefficient identity = builtin_coefficient("linear", 1.0);
  for (double dw : {-0.4, 0.0, 0.3}) {
    const std::vector<double> dwv{dw};
    const SchemeState out = lt_step(make_state({1.0}), heat, identity, dwv);
    const double expected = std::exp(-8.0 * tau) * std::exp(std::sqrt(2.0) * dw - tau);
    CHECK(out.values[0] == doctest::Approx(expected).epsilon(1e-12));
  }
}

TEST_CASE("splitting step keeps nonnegative states nonnegative") {
  const int N = 10;
  const SpectralDecomposition spec(N);
  const HeatPropagator heat(spec, 0.02);
  const Coefficient coeff = builtin_coefficient("sin_plus", 5.0);
  const CounterRng rng(88, 1);
  std::uint64_t k = 0;
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> values(N - 1), dw(N - 1);
    for (int n = 0; n < N - 1; ++n) {
      values[n] = std::abs(rng.normal(k++));
      dw[n] = 0.5 * rng.normal(k++);
    }
    const SchemeState out = lt_step(make_state(values), heat, coeff, dw);
    for (double v : out.values) CHECK(v >= 0.0);
  }
}

TEST_CASE("baseline steps") {
  const int N = 3;
  const double tau = 0.01;
  const TridiagonalOperator lap = laplacian(N);
  const SpectralDecomposition spec(N);
  const HeatPropagator heat(spec, tau);
  const Coefficient zero = builtin_coefficient("linear", 0.0);
  const std::vector<double> dw{0.3, -0.2};

  SUBCASE("explicit Euler with g = 0 applies I + tau N^2 D") {
    const SchemeState out =
        baseline_step(SchemeKind::EM, make_state({1.0, 1.0}), lap, heat, zero, dw, tau, N);
    CHECK(out.values[0] == doctest::Approx(1.0 - 9.0 * tau).epsilon(1e-15));
    CHECK(out.values[1] == doctest::Approx(1.0 - 9.0 * tau).epsilon(1e-15));
  }
  SUBCASE("exponential Euler with g = 0 equals the splitting step bitwise") {
    const std::vector<double> u{0.7, 0.4};
    const SchemeState a = baseline_step(SchemeKind::SEXP, make_state(u), lap, heat, zero, dw, tau, N);
    const SchemeState b = lt_step(make_state(u), heat, zero, dw);
    CHECK(bitwise_equal(a.values, b.values));
  }
  SUBCASE("lt_step is not reachable through baseline_step") {
    CHECK_THROWS_AS(
        baseline_step(SchemeKind::LT, make_state({1.0, 1.0}), lap, heat, zero, dw, tau, N),
        std::invalid_argument);
  }
}

TEST_CASE("semi-implicit solve agrees with a dense LU oracle") {
  const CounterRng rng(404, 2);
  std::uint64_t k = 0;
  for (int N : {4, 9, 16}) {
    const int dim = N - 1;
    const double tau = 0.003;
    const TridiagonalOperator lap = laplacian(N);
    const SpectralDecomposition spec(N);
    const HeatPropagator heat(spec, tau);
    const Coefficient coeff = builtin_coefficient("rational", 2.0);

    std::vector<double> u(dim), dw(dim);
    for (int n = 0; n < dim; ++n) {
      u[n] = rng.normal(k++);
      dw[n] = std::sqrt(tau) * rng.normal(k++);
    }
    const SchemeState out =
        baseline_step(SchemeKind::SEM, make_state(u), lap, heat, coeff, dw, tau, N);

    const double c = tau * N * N;
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(dim, dim);
    Eigen::VectorXd rhs(dim);
    for (int i = 0; i < dim; ++i) {
      m(i, i) = 1.0 + 2.0 * c;
      if (i + 1 < dim) {
        m(i, i + 1) = -c;
        m(i + 1, i) = -c;
      }
      rhs(i) = u[i] + std::sqrt(static_cast<double>(N)) * coeff.g(u[i]) * dw[i];
    }
    const Eigen::VectorXd x = m.partialPivLu().solve(rhs);
    for (int i = 0; i < dim; ++i) CHECK(std::abs(out.values[i] - x(i)) <= 1e-11);
  }
}

TEST_CASE("one splitting step is mean-preserving under the semigroup") {
  // For g(v) = v the noise sub-step factor has unit expectation, so
  // E[u_1] = exp(tau N^2 D) u_0. Monte-Carlo check with 1e5 paths.
  const int N = 4;
  const int dim = N - 1;
  const double tau = 0.05;
  const SpectralDecomposition spec(N);
  const HeatPropagator heat(spec, tau);
  const Coefficient identity = builtin_coefficient("linear", 1.0);
  const std::vector<double> u0{0.6, 1.0, 0.8};
  const std::vector<double> expected = heat.apply(u0);

  const int paths = 100000;
  const CounterRng rng(60601, 0);
  const double sigma = std::sqrt(tau);
  std::vector<double> mean(dim, 0.0), mean_sq(dim, 0.0);
  std::vector<double> dw(dim);
  std::uint64_t k = 0;
  for (int p = 0; p < paths; ++p) {
    for (int n = 0; n < dim; ++n) dw[n] = sigma * rng.normal(k++);
    const SchemeState out = lt_step(make_state(u0), heat, identity, dw);
    for (int n = 0; n < dim; ++n) {
      mean[n] += out.values[n];
      mean_sq[n] += out.values[n] * out.values[n];
    }
  }
  for (int n = 0; n < dim; ++n) {
    mean[n] /= paths;
    mean_sq[n] /= paths;
    const double se = std::sqrt((mean_sq[n] - mean[n] * mean[n]) / paths);
    CHECK(std::abs(mean[n] - expected[n]) <= 3.0 * se);
  }
}

TEST_CASE("integrate records snapshots and is deterministic") {
  const Discretization d = build_discretization(8, 32, 0.5);
  const Coefficient coeff = builtin_coefficient("linear", 1.0);
  const InitialCondition u0 = builtin_initial_condition("sin_pi");
  const NoiseIncrements noise = NoiseIncrements::sample(11, 0, d.M, d.N, d.tau);

  IntegrateOptions options;
  options.snapshot_stride = 8;
  const Trajectory a = integrate(SchemeKind::LT, d, coeff, u0, noise, options);
  const Trajectory b = integrate(SchemeKind::LT, d, coeff, u0, noise, options);

  REQUIRE(!a.blow_up);
  REQUIRE(a.snapshots.size() == 5);  // m = 0, 8, 16, 24, 32
  CHECK(a.snapshots.front().time_index == 0);
  CHECK(a.snapshots.back().time_index == 32);
  const std::vector<double> initial = sample_initial_condition(u0, d);
  CHECK(bitwise_equal(a.snapshots.front().values, initial));
  for (std::size_t i = 0; i < a.snapshots.size(); ++i) {
    CHECK(a.snapshots[i].time_index == b.snapshots[i].time_index);
    CHECK(bitwise_equal(a.snapshots[i].values, b.snapshots[i].values));
  }
  for (std::size_t i = 1; i < a.snapshots.size(); ++i)
    CHECK(a.snapshots[i].time_index > a.snapshots[i - 1].time_index);
}

TEST_CASE("integrate keeps the splitting scheme nonnegative along the path") {
  const Discretization d = build_discretization(16, 64, 1.0);
  const Coefficient coeff = builtin_coefficient("linear", 2.5);
  const InitialCondition u0 = builtin_initial_condition("sin_pi");
  const NoiseIncrements noise = NoiseIncrements::sample(7, 3, d.M, d.N, d.tau);
  const Trajectory traj = integrate(SchemeKind::LT, d, coeff, u0, noise);
  REQUIRE(!traj.blow_up);
  for (const SchemeState& s : traj.snapshots)
    for (double v : s.values) CHECK(v >= 0.0);
}

TEST_CASE("integrate validates noise compatibility") {
  const Discretization d = build_discretization(8, 16, 1.0);
  const Coefficient coeff = builtin_coefficient("linear", 1.0);
  const InitialCondition u0 = builtin_initial_condition("sin_pi");
  const NoiseIncrements wrong_m = NoiseIncrements::sample(1, 0, 8, d.N, d.tau);
  CHECK_THROWS_AS(integrate(SchemeKind::LT, d, coeff, u0, wrong_m), std::invalid_argument);
  const NoiseIncrements wrong_n = NoiseIncrements::sample(1, 0, d.M, 4, d.tau);
  CHECK_THROWS_AS(integrate(SchemeKind::LT, d, coeff, u0, wrong_n), std::invalid_argument);
  const NoiseIncrements wrong_tau = NoiseIncrements::sample(1, 0, d.M, d.N, 0.9 * d.tau);
  CHECK_THROWS_AS(integrate(SchemeKind::LT, d, coeff, u0, wrong_tau), std::invalid_argument);
}

TEST_CASE("explicit Euler blow-up is flagged and truncates the trajectory") {
  // tau N^2 = 16 makes the explicit diffusion update wildly unstable; the
  // run is long enough for the ~31x-per-step growth to overflow.
  const Discretization d = build_discretization(8, 256, 64.0);
  const Coefficient coeff = builtin_coefficient("linear", 1.0);
  const InitialCondition u0 = builtin_initial_condition("sin_pi");
  const NoiseIncrements noise = NoiseIncrements::sample(3, 0, d.M, d.N, d.tau);
  IntegrateOptions options;
  options.warn_cfl = false;
  const Trajectory traj = integrate(SchemeKind::EM, d, coeff, u0, noise, options);
  REQUIRE(traj.blow_up.has_value());
  CHECK(traj.blow_up->cause == BlowUpCause::NonFinite);
  for (const SchemeState& s : traj.snapshots) CHECK(s.time_index < traj.blow_up->step);
}

TEST_CASE("domain violations become blow-up records") {
  // The unstable explicit update drives the state below -1 where the
  // logarithmic coefficient is undefined.
  const Discretization d = build_discretization(8, 4, 2.0);
  const Coefficient coeff = builtin_coefficient("log1p", 1.0);
  const InitialCondition u0 = builtin_initial_condition("sin_pi");
  const NoiseIncrements noise = NoiseIncrements::sample(9, 0, d.M, d.N, d.tau);
  IntegrateOptions options;
  options.warn_cfl = false;
  const Trajectory traj = integrate(SchemeKind::EM, d, coeff, u0, noise, options);
  REQUIRE(traj.blow_up.has_value());
  CHECK(traj.blow_up->cause == BlowUpCause::CoefficientDomain);
}

TEST_CASE("observer can stop a run early") {
  const Discretization d = build_discretization(8, 32, 0.5);
  const Coefficient coeff = builtin_coefficient("linear", 1.0);
  const InitialCondition u0 = builtin_initial_condition("sin_pi");
  const NoiseIncrements noise = NoiseIncrements::sample(2, 0, d.M, d.N, d.tau);
  int calls = 0;
  IntegrateOptions options;
  options.observer = [&calls](int, std::span<const double>) { return ++calls < 5; };
  const Trajectory traj = integrate(SchemeKind::LT, d, coeff, u0, noise, options);
  CHECK(calls == 5);
  CHECK(!traj.blow_up);
}
