#include "stoheat/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "stoheat/dense_kernel.hpp"
#include "stoheat/parallel.hpp"

namespace stoheat {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

enum class SampleOutcome { Positive, Negative, BlownUp };

SampleOutcome classify(const Trajectory& traj, bool saw_negative) {
  if (saw_negative) return SampleOutcome::Negative;
  if (traj.blow_up) return SampleOutcome::BlownUp;
  return SampleOutcome::Positive;
}

void tally(SchemeCounters& c, SampleOutcome outcome) {
  switch (outcome) {
    case SampleOutcome::Positive: ++c.positive; break;
    case SampleOutcome::Negative: ++c.negative; break;
    case SampleOutcome::BlownUp: ++c.blown_up; break;
  }
  ++c.total;
}

bool row_nonnegative(std::span<const double> v) {
  for (double x : v)
    if (x < 0.0) return false;
  return true;
}

// Validates the dyadic layout of a convergence study and returns the
// coarsening factor of each tau relative to tau_ref.
struct StudyLayout {
  int M_ref = 0;
  std::vector<int> factors;  // tau_i / tau_ref, descending
  int snapshot_factor = 0;   // smallest factor: reference snapshot stride
};

StudyLayout plan_study(const std::vector<double>& tau_list, double tau_ref, double T) {
  if (tau_list.empty()) throw std::invalid_argument("convergence_study: empty tau list");
  if (!(tau_ref > 0.0)) throw std::invalid_argument("convergence_study: tau_ref must be positive");
  for (std::size_t i = 1; i < tau_list.size(); ++i)
    if (!(tau_list[i] < tau_list[i - 1]))
      throw std::invalid_argument("convergence_study: tau list must be strictly descending");
  if (!(tau_list.back() > tau_ref))
    throw std::invalid_argument("convergence_study: every tau must exceed tau_ref");

  StudyLayout layout;
  const double m_ref = T / tau_ref;
  layout.M_ref = static_cast<int>(std::llround(m_ref));
  if (layout.M_ref < 1 || std::abs(m_ref - layout.M_ref) > 1e-9 * std::abs(m_ref))
    throw std::invalid_argument("convergence_study: T must be an integer multiple of tau_ref");

  for (double tau : tau_list) {
    const double ratio = tau / tau_ref;
    const int factor = static_cast<int>(std::llround(ratio));
    if (factor < 2 || std::abs(ratio - factor) > 1e-9 * ratio ||
        (factor & (factor - 1)) != 0)
      throw std::invalid_argument(
          "convergence_study: tau/tau_ref must be an integral power of two");
    if (layout.M_ref % factor != 0)
      throw std::invalid_argument("convergence_study: tau must divide T");
    layout.factors.push_back(factor);
  }
  layout.snapshot_factor = layout.factors.back();
  return layout;
}

double delta_method_stderr(const std::vector<double>& sup_squares, double error) {
  // error = sqrt(mean X); Var(mean X) = Var(X)/S; stderr via the delta method.
  const std::size_t s = sup_squares.size();
  if (s < 2 || !(error > 0.0) || !std::isfinite(error)) return kInf;
  double mean = 0.0;
  for (double x : sup_squares) mean += x;
  mean /= static_cast<double>(s);
  double var = 0.0;
  for (double x : sup_squares) var += (x - mean) * (x - mean);
  var /= static_cast<double>(s - 1);
  return std::sqrt(var / static_cast<double>(s)) / (2.0 * error);
}

void finalize_series(SchemeSeries& series, const std::vector<double>& tau_values) {
  std::vector<double> fit_x, fit_y, fit_sigma;
  for (std::size_t i = 0; i < tau_values.size(); ++i) {
    const double err = series.errors[i];
    const double se = series.stderrs[i];
    if (std::isfinite(err) && err > 0.0 && std::isfinite(se) && err > 10.0 * se) {
      fit_x.push_back(tau_values[i]);
      fit_y.push_back(err);
      fit_sigma.push_back(se);
    }
  }
  const SlopeFit fit = fit_loglog_slope(fit_x, fit_y, fit_sigma);
  series.fitted_slope = fit.slope;
  series.slope_ci_halfwidth = fit.ci_halfwidth;
  series.fit_points = fit.points;
}

}  // namespace

SlopeFit fit_loglog_slope(const std::vector<double>& x, const std::vector<double>& y,
                          const std::vector<double>& y_stderr) {
  SlopeFit fit;
  const std::size_t n = x.size();
  if (n != y.size() || (!y_stderr.empty() && y_stderr.size() != n))
    throw std::invalid_argument("fit_loglog_slope: length mismatch");
  if (n < 2) {
    fit.ci_halfwidth = kInf;
    return fit;
  }
  std::vector<double> lx(n), ly(n);
  for (std::size_t i = 0; i < n; ++i) {
    lx[i] = std::log(x[i]);
    ly[i] = std::log(y[i]);
  }
  double mean_x = 0.0;
  for (double v : lx) mean_x += v;
  mean_x /= static_cast<double>(n);
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (lx[i] - mean_x) * (lx[i] - mean_x);
    sxy += (lx[i] - mean_x) * ly[i];
  }
  fit.slope = sxy / sxx;
  fit.points = static_cast<int>(n);

  // Two-sigma half-width propagated from the per-point Monte-Carlo errors:
  // slope = sum c_i log(y_i) with c_i = (x_i - mean)/Sxx, and
  // Var(log y_i) ~= (stderr_i / y_i)^2.
  double var = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double c = (lx[i] - mean_x) / sxx;
    const double sigma_log = y_stderr.empty() ? 0.0 : y_stderr[i] / y[i];
    var += c * c * sigma_log * sigma_log;
  }
  fit.ci_halfwidth = 2.0 * std::sqrt(var);
  return fit;
}

PositivityReport positivity_census(const std::vector<SchemeKind>& schemes,
                                   const Discretization& d, const Coefficient& coeff,
                                   const InitialCondition& u0, int samples, std::uint64_t seed,
                                   const ExperimentOptions& options) {
  if (samples < 1) throw std::invalid_argument("positivity_census: samples must be >= 1");
  if (schemes.empty()) throw std::invalid_argument("positivity_census: no schemes");
  sample_initial_condition(u0, d, /*require_nonnegative=*/true);

  std::vector<SchemeStepper> prototypes;
  prototypes.reserve(schemes.size());
  for (SchemeKind kind : schemes)
    prototypes.emplace_back(kind, d, coeff, options.dense_threshold);

  const std::function<std::vector<SampleOutcome>(int)> worker =
      [&](int sample) -> std::vector<SampleOutcome> {
    const NoiseIncrements noise =
        NoiseIncrements::sample(seed, static_cast<std::uint64_t>(sample), d.M, d.N, d.tau);
    std::vector<SampleOutcome> outcomes;
    outcomes.reserve(schemes.size());
    for (std::size_t i = 0; i < schemes.size(); ++i) {
      SchemeStepper stepper = prototypes[i];
      bool saw_negative = false;
      IntegrateOptions run;
      run.snapshot_stride = d.M;
      run.dense_threshold = options.dense_threshold;
      run.cfl_gamma = options.cfl_gamma;
      run.warn_cfl = options.warn_cfl && sample == 0 && i == 0;
      run.observer = [&saw_negative](int, std::span<const double> values) {
        if (!row_nonnegative(values)) {
          saw_negative = true;
          return false;  // classification settled; stop the path
        }
        return true;
      };
      const Trajectory traj = integrate(stepper, d, u0, noise, run);
      outcomes.push_back(classify(traj, saw_negative));
    }
    return outcomes;
  };

  const std::vector<std::vector<SampleOutcome>> results =
      parallel_map_indexed<std::vector<SampleOutcome>>(samples, options.threads, worker);

  PositivityReport report;
  report.schemes = schemes;
  report.discretization = d;
  report.coefficient_label = coeff.label;
  report.initial_label = u0.label;
  report.samples = samples;
  report.seed = seed;
  for (std::size_t i = 0; i < schemes.size(); ++i) {
    SchemeCounters counters;
    for (const auto& sample : results) tally(counters, sample[i]);
    report.counters[schemes[i]] = counters;
  }
  return report;
}

ConvergenceReport convergence_study(const std::vector<SchemeKind>& schemes, int N,
                                    const std::vector<double>& tau_list, double tau_ref, double T,
                                    const Coefficient& coeff, const InitialCondition& u0,
                                    int samples, std::uint64_t seed,
                                    const ExperimentOptions& options) {
  if (samples < 2) throw std::invalid_argument("convergence_study: need at least 2 samples");
  if (schemes.empty()) throw std::invalid_argument("convergence_study: no schemes");
  const StudyLayout layout = plan_study(tau_list, tau_ref, T);

  const Discretization d_ref = build_discretization(N, layout.M_ref, T);
  const int dim = d_ref.interior_nodes();
  const int ref_rows = layout.M_ref / layout.snapshot_factor;  // rows 1..ref_rows stored

  SchemeStepper ref_prototype(SchemeKind::LT, d_ref, coeff, options.dense_threshold);

  std::vector<Discretization> coarse_d;
  std::vector<std::vector<SchemeStepper>> coarse_prototypes;  // [tau][scheme]
  for (std::size_t i = 0; i < tau_list.size(); ++i) {
    coarse_d.push_back(build_discretization(N, layout.M_ref / layout.factors[i], T));
    std::vector<SchemeStepper> row;
    row.reserve(schemes.size());
    for (SchemeKind kind : schemes)
      row.emplace_back(kind, coarse_d.back(), coeff, options.dense_threshold);
    coarse_prototypes.push_back(std::move(row));
  }

  // Per sample: sup over the coarse grid of the squared gap to the reference,
  // flattened as [tau][scheme].
  const std::size_t cells = tau_list.size() * schemes.size();
  const std::function<std::vector<double>(int)> worker = [&](int sample) -> std::vector<double> {
    const NoiseIncrements fine = NoiseIncrements::sample(
        seed, static_cast<std::uint64_t>(sample), layout.M_ref, N, tau_ref);

    // Reference path: splitting scheme at tau_ref, states kept at the finest
    // coarse grid times.
    std::vector<double> ref(static_cast<std::size_t>(ref_rows) * dim, 0.0);
    bool ref_ok = true;
    {
      SchemeStepper stepper = ref_prototype;
      IntegrateOptions run;
      run.snapshot_stride = layout.M_ref;
      run.dense_threshold = options.dense_threshold;
      run.cfl_gamma = options.cfl_gamma;
      run.warn_cfl = options.warn_cfl && sample == 0;
      run.observer = [&](int m, std::span<const double> values) {
        if (m > 0 && m % layout.snapshot_factor == 0) {
          double* row = &ref[static_cast<std::size_t>(m / layout.snapshot_factor - 1) * dim];
          for (int n = 0; n < dim; ++n) row[n] = values[n];
        }
        return true;
      };
      const Trajectory traj = integrate(stepper, d_ref, u0, fine, run);
      ref_ok = !traj.blow_up.has_value();
    }

    std::vector<double> sup_squares(cells, kInf);
    if (!ref_ok) return sup_squares;

    NoiseIncrements current = fine.coarsen(1);
    int current_factor = 1;
    for (std::size_t i = tau_list.size(); i-- > 0;) {  // ascending factor order
      const int factor = layout.factors[i];
      current = current.coarsen(factor / current_factor);
      current_factor = factor;
      const int ref_stride = factor / layout.snapshot_factor;

      for (std::size_t k = 0; k < schemes.size(); ++k) {
        SchemeStepper stepper = coarse_prototypes[i][k];
        double sup2 = 0.0;
        IntegrateOptions run;
        run.snapshot_stride = coarse_d[i].M;
        run.dense_threshold = options.dense_threshold;
        run.cfl_gamma = options.cfl_gamma;
        run.warn_cfl = false;
        run.observer = [&](int m, std::span<const double> values) {
          if (m == 0) return true;
          const double* ref_row =
              &ref[static_cast<std::size_t>(m * ref_stride - 1) * dim];
          for (int n = 0; n < dim; ++n) {
            const double diff = values[n] - ref_row[n];
            const double sq = diff * diff;
            if (sq > sup2) sup2 = sq;
          }
          return true;
        };
        const Trajectory traj = integrate(stepper, coarse_d[i], u0, current, run);
        sup_squares[i * schemes.size() + k] = traj.blow_up ? kInf : sup2;
      }
    }
    return sup_squares;
  };

  const std::vector<std::vector<double>> per_sample =
      parallel_map_indexed<std::vector<double>>(samples, options.threads, worker);

  ConvergenceReport report;
  report.schemes = schemes;
  report.tau_values = tau_list;
  report.tau_ref = tau_ref;
  report.N = N;
  report.T = T;
  report.samples = samples;
  report.seed = seed;
  report.coefficient_label = coeff.label;
  report.initial_label = u0.label;

  for (std::size_t k = 0; k < schemes.size(); ++k) {
    SchemeSeries series;
    series.errors.resize(tau_list.size());
    series.stderrs.resize(tau_list.size());
    series.blowups.resize(tau_list.size());
    for (std::size_t i = 0; i < tau_list.size(); ++i) {
      std::vector<double> sup_squares;
      sup_squares.reserve(per_sample.size());
      long blowups = 0;
      double mean = 0.0;
      for (const auto& sample : per_sample) {
        const double sq = sample[i * schemes.size() + k];
        if (!std::isfinite(sq)) ++blowups;
        sup_squares.push_back(sq);
        mean += sq;
      }
      mean /= static_cast<double>(samples);
      const double error = std::sqrt(mean);
      series.errors[i] = error;
      series.stderrs[i] = delta_method_stderr(sup_squares, error);
      series.blowups[i] = blowups;
    }
    finalize_series(series, tau_list);
    report.series[schemes[k]] = series;
  }
  return report;
}

MomentSummary moment_diagnostic(const Discretization& d, const Coefficient& coeff,
                                const InitialCondition& u0, int samples, std::uint64_t seed,
                                const ExperimentOptions& options) {
  if (samples < 1) throw std::invalid_argument("moment_diagnostic: samples must be >= 1");
  const int dim = d.interior_nodes();
  const std::size_t cells = static_cast<std::size_t>(d.M + 1) * dim;
  if (cells > 50'000'000)
    throw std::invalid_argument("moment_diagnostic: grid too large to accumulate densely");

  SchemeStepper prototype(SchemeKind::LT, d, coeff, options.dense_threshold);

  // Per-sample squared states, accumulated in sample order (chunked so memory
  // stays bounded while runs execute in parallel).
  std::vector<double> acc(cells, 0.0);
  const int chunk = std::max(1, options.threads);
  for (int start = 0; start < samples; start += chunk) {
    const int count = std::min(chunk, samples - start);
    const std::function<std::vector<double>(int)> chunk_worker =
        [&, start](int offset) -> std::vector<double> {
      const int sample = start + offset;
      const NoiseIncrements noise =
          NoiseIncrements::sample(seed, static_cast<std::uint64_t>(sample), d.M, d.N, d.tau);
      std::vector<double> squares(cells, kInf);
      SchemeStepper stepper = prototype;
      IntegrateOptions run;
      run.snapshot_stride = d.M;
      run.dense_threshold = options.dense_threshold;
      run.cfl_gamma = options.cfl_gamma;
      run.warn_cfl = options.warn_cfl && sample == 0;
      run.observer = [&](int m, std::span<const double> values) {
        double* row = &squares[static_cast<std::size_t>(m) * dim];
        for (int n = 0; n < dim; ++n) row[n] = values[n] * values[n];
        return true;
      };
      const Trajectory traj = integrate(stepper, d, u0, noise, run);
      if (traj.blow_up)
        std::fill(squares.begin(), squares.end(), kInf);
      return squares;
    };
    const std::vector<std::vector<double>> block =
        parallel_map_indexed<std::vector<double>>(count, options.threads, chunk_worker);
    for (const auto& squares : block)
      for (std::size_t i = 0; i < cells; ++i) acc[i] += squares[i];
  }

  MomentSummary summary;
  summary.discretization = d;
  summary.coefficient_label = coeff.label;
  summary.samples = samples;
  summary.seed = seed;

  const std::vector<double> initial = sample_initial_condition(u0, d);
  double sup0 = 0.0;
  for (double v : initial) sup0 = std::max(sup0, std::abs(v));
  summary.sup_u0_squared = sup0 * sup0;

  double best = -1.0;
  for (int m = 0; m <= d.M; ++m) {
    for (int n = 0; n < dim; ++n) {
      const double mean = acc[static_cast<std::size_t>(m) * dim + n] / samples;
      if (mean > best) {
        best = mean;
        summary.arg_m = m;
        summary.arg_n = n + 1;
      }
    }
  }
  summary.max_mean_square = best;
  summary.ratio = best / (1.0 + summary.sup_u0_squared);
  return summary;
}

KernelProbeSummary kernel_inequality_probe(int N, int M, double T) {
  if (N < 2 || N > 64)
    throw std::invalid_argument("kernel_inequality_probe: N must be in [2, 64] (dense path)");
  if (M < 1) throw std::invalid_argument("kernel_inequality_probe: M must be >= 1");
  if (!(T > 0.0)) throw std::invalid_argument("kernel_inequality_probe: T must be positive");

  KernelProbeSummary summary;
  summary.N = N;
  summary.M = M;
  summary.T = T;

  const int dim = N - 1;
  const double tau = T / static_cast<double>(M);

  // sup_t sqrt(t) * max_x int_0^1 |G^N(t,x,y)|^2 dy with the integral
  // evaluated exactly from the grid kernel: the integrand is piecewise
  // constant in y with value (N G_nj)^2 on cell j, so the integral is
  // N * sum_j G_nj^2. The max over x is attained at a node because the
  // squared piecewise-linear kernel is convex on each cell.
  for (int k = 1; k <= M; ++k) {
    const double t = static_cast<double>(k) * tau;
    const DenseMatrix g = dense_heat_kernel(N, t);
    double best = 0.0;
    for (int n = 0; n < dim; ++n) {
      double sum = 0.0;
      for (int j = 0; j < dim; ++j) sum += g.at(n, j) * g.at(n, j);
      best = std::max(best, static_cast<double>(N) * sum);
    }
    summary.semigroup_constant = std::max(summary.semigroup_constant, best * std::sqrt(t));
  }

  // Riemann evaluation of the squared kernel-increment integral at t = T.
  // By mode orthogonality the y-integral collapses to
  //   sum_l (e^{-lambda_l (T-s)} - e^{-lambda_l (T-l(s))})^2 * 2 sin^2(l pi x_n).
  const SpectralDecomposition spec(N);
  const int sub = 4;  // midpoint sub-samples per step
  std::vector<double> integral(static_cast<std::size_t>(dim), 0.0);
  std::vector<double> weight(static_cast<std::size_t>(dim) * dim);
  for (int n = 0; n < dim; ++n)
    for (int l = 0; l < dim; ++l)
      weight[static_cast<std::size_t>(n) * dim + l] =
          static_cast<double>(N) * spec.eigenvector(n, l) * spec.eigenvector(n, l);

  std::vector<double> delta_sq(static_cast<std::size_t>(dim));
  for (int k = 0; k < M; ++k) {
    const double tk = static_cast<double>(k) * tau;
    for (int i = 0; i < sub; ++i) {
      const double s = tk + (static_cast<double>(i) + 0.5) * tau / sub;
      for (int l = 0; l < dim; ++l) {
        const double lam = spec.eigenvalues()[l];
        const double diff = std::exp(-lam * (T - s)) - std::exp(-lam * (T - tk));
        delta_sq[l] = diff * diff;
      }
      const double ds = tau / sub;
      for (int n = 0; n < dim; ++n) {
        const double* wrow = &weight[static_cast<std::size_t>(n) * dim];
        double acc = 0.0;
        for (int l = 0; l < dim; ++l) acc += delta_sq[l] * wrow[l];
        integral[n] += acc * ds;
      }
    }
  }
  double best = 0.0;
  for (double v : integral) best = std::max(best, v);
  summary.increment_constant = best / std::sqrt(tau);
  return summary;
}

SystemPositivityReport system_positivity_census(const std::vector<SchemeKind>& schemes,
                                                const Discretization& d,
                                                const SystemCoefficient& sc,
                                                const InitialCondition& u10,
                                                const InitialCondition& u20, int samples,
                                                std::uint64_t seed,
                                                const ExperimentOptions& options) {
  if (samples < 1) throw std::invalid_argument("system_positivity_census: samples must be >= 1");
  if (schemes.empty()) throw std::invalid_argument("system_positivity_census: no schemes");
  sample_initial_condition(u10, d, /*require_nonnegative=*/true);
  sample_initial_condition(u20, d, /*require_nonnegative=*/true);

  std::vector<SystemStepper> prototypes;
  prototypes.reserve(schemes.size());
  for (SchemeKind kind : schemes)
    prototypes.emplace_back(kind, d, sc, options.dense_threshold);

  struct PairOutcome {
    SampleOutcome first = SampleOutcome::Positive;
    SampleOutcome second = SampleOutcome::Positive;
  };

  const std::function<std::vector<PairOutcome>(int)> worker =
      [&](int sample) -> std::vector<PairOutcome> {
    const std::uint64_t base = 2 * static_cast<std::uint64_t>(sample);
    const NoiseIncrements noise1 = NoiseIncrements::sample(seed, base, d.M, d.N, d.tau);
    const NoiseIncrements noise2 = sc.noise_mode == NoiseMode::Equal
                                       ? noise1
                                       : NoiseIncrements::sample(seed, base + 1, d.M, d.N, d.tau);
    std::vector<PairOutcome> outcomes;
    outcomes.reserve(schemes.size());
    for (std::size_t i = 0; i < schemes.size(); ++i) {
      SystemStepper stepper = prototypes[i];
      bool neg1 = false, neg2 = false;
      IntegrateSystemOptions run;
      run.snapshot_stride = d.M;
      run.dense_threshold = options.dense_threshold;
      run.cfl_gamma = options.cfl_gamma;
      run.warn_cfl = options.warn_cfl && sample == 0 && i == 0;
      run.observer = [&](int, std::span<const double> v1, std::span<const double> v2) {
        if (!neg1 && !row_nonnegative(v1)) neg1 = true;
        if (!neg2 && !row_nonnegative(v2)) neg2 = true;
        return !(neg1 && neg2);
      };
      const SystemTrajectory traj = integrate_system(stepper, d, u10, u20, noise1, noise2, run);
      PairOutcome outcome;
      outcome.first = neg1 ? SampleOutcome::Negative
                           : (traj.blow_up ? SampleOutcome::BlownUp : SampleOutcome::Positive);
      outcome.second = neg2 ? SampleOutcome::Negative
                            : (traj.blow_up ? SampleOutcome::BlownUp : SampleOutcome::Positive);
      outcomes.push_back(outcome);
    }
    return outcomes;
  };

  const std::vector<std::vector<PairOutcome>> results =
      parallel_map_indexed<std::vector<PairOutcome>>(samples, options.threads, worker);

  SystemPositivityReport report;
  report.schemes = schemes;
  report.discretization = d;
  report.coefficient_label = sc.label;
  report.noise_mode = sc.noise_mode;
  report.samples = samples;
  report.seed = seed;
  for (std::size_t i = 0; i < schemes.size(); ++i) {
    SchemeCounters c1, c2;
    for (const auto& sample : results) {
      tally(c1, sample[i].first);
      tally(c2, sample[i].second);
    }
    report.counters_component1[schemes[i]] = c1;
    report.counters_component2[schemes[i]] = c2;
  }
  return report;
}

SystemConvergenceReport system_convergence_study(const std::vector<SchemeKind>& schemes, int N,
                                                 const std::vector<double>& tau_list,
                                                 double tau_ref, double T,
                                                 const SystemCoefficient& sc,
                                                 const InitialCondition& u10,
                                                 const InitialCondition& u20, int samples,
                                                 std::uint64_t seed,
                                                 const ExperimentOptions& options) {
  if (samples < 2) throw std::invalid_argument("system_convergence_study: need >= 2 samples");
  if (schemes.empty()) throw std::invalid_argument("system_convergence_study: no schemes");
  const StudyLayout layout = plan_study(tau_list, tau_ref, T);

  const Discretization d_ref = build_discretization(N, layout.M_ref, T);
  const int dim = d_ref.interior_nodes();
  const int ref_rows = layout.M_ref / layout.snapshot_factor;

  SystemStepper ref_prototype(SchemeKind::LT, d_ref, sc, options.dense_threshold);
  std::vector<Discretization> coarse_d;
  std::vector<std::vector<SystemStepper>> coarse_prototypes;
  for (std::size_t i = 0; i < tau_list.size(); ++i) {
    coarse_d.push_back(build_discretization(N, layout.M_ref / layout.factors[i], T));
    std::vector<SystemStepper> row;
    row.reserve(schemes.size());
    for (SchemeKind kind : schemes) row.emplace_back(kind, coarse_d.back(), sc,
                                                     options.dense_threshold);
    coarse_prototypes.push_back(std::move(row));
  }

  const std::size_t cells = tau_list.size() * schemes.size();
  const std::function<std::vector<double>(int)> worker = [&](int sample) -> std::vector<double> {
    const std::uint64_t base = 2 * static_cast<std::uint64_t>(sample);
    const NoiseIncrements fine1 =
        NoiseIncrements::sample(seed, base, layout.M_ref, N, tau_ref);
    const NoiseIncrements fine2 = sc.noise_mode == NoiseMode::Equal
                                      ? fine1
                                      : NoiseIncrements::sample(seed, base + 1, layout.M_ref, N,
                                                                tau_ref);

    std::vector<double> ref1(static_cast<std::size_t>(ref_rows) * dim, 0.0);
    std::vector<double> ref2(static_cast<std::size_t>(ref_rows) * dim, 0.0);
    bool ref_ok = true;
    {
      SystemStepper stepper = ref_prototype;
      IntegrateSystemOptions run;
      run.snapshot_stride = layout.M_ref;
      run.dense_threshold = options.dense_threshold;
      run.cfl_gamma = options.cfl_gamma;
      run.warn_cfl = options.warn_cfl && sample == 0;
      run.observer = [&](int m, std::span<const double> v1, std::span<const double> v2) {
        if (m > 0 && m % layout.snapshot_factor == 0) {
          const std::size_t r = static_cast<std::size_t>(m / layout.snapshot_factor - 1) * dim;
          for (int n = 0; n < dim; ++n) {
            ref1[r + n] = v1[n];
            ref2[r + n] = v2[n];
          }
        }
        return true;
      };
      const SystemTrajectory traj =
          integrate_system(stepper, d_ref, u10, u20, fine1, fine2, run);
      ref_ok = !traj.blow_up.has_value();
    }

    // Two sup-squares per cell, interleaved (component1, component2).
    std::vector<double> sup_squares(2 * cells, kInf);
    if (!ref_ok) return sup_squares;

    NoiseIncrements current1 = fine1.coarsen(1);
    NoiseIncrements current2 = fine2.coarsen(1);
    int current_factor = 1;
    for (std::size_t i = tau_list.size(); i-- > 0;) {
      const int factor = layout.factors[i];
      current1 = current1.coarsen(factor / current_factor);
      current2 = current2.coarsen(factor / current_factor);
      current_factor = factor;
      const int ref_stride = factor / layout.snapshot_factor;

      for (std::size_t k = 0; k < schemes.size(); ++k) {
        SystemStepper stepper = coarse_prototypes[i][k];
        double sup1 = 0.0, sup2 = 0.0;
        IntegrateSystemOptions run;
        run.snapshot_stride = coarse_d[i].M;
        run.dense_threshold = options.dense_threshold;
        run.cfl_gamma = options.cfl_gamma;
        run.warn_cfl = false;
        run.observer = [&](int m, std::span<const double> v1, std::span<const double> v2) {
          if (m == 0) return true;
          const std::size_t r = static_cast<std::size_t>(m * ref_stride - 1) * dim;
          for (int n = 0; n < dim; ++n) {
            const double d1 = v1[n] - ref1[r + n];
            const double d2 = v2[n] - ref2[r + n];
            if (d1 * d1 > sup1) sup1 = d1 * d1;
            if (d2 * d2 > sup2) sup2 = d2 * d2;
          }
          return true;
        };
        const SystemTrajectory traj =
            integrate_system(stepper, coarse_d[i], u10, u20, current1, current2, run);
        const std::size_t cell = i * schemes.size() + k;
        sup_squares[2 * cell] = traj.blow_up ? kInf : sup1;
        sup_squares[2 * cell + 1] = traj.blow_up ? kInf : sup2;
      }
    }
    return sup_squares;
  };

  const std::vector<std::vector<double>> per_sample =
      parallel_map_indexed<std::vector<double>>(samples, options.threads, worker);

  SystemConvergenceReport report;
  report.schemes = schemes;
  report.tau_values = tau_list;
  report.tau_ref = tau_ref;
  report.N = N;
  report.T = T;
  report.samples = samples;
  report.seed = seed;
  report.coefficient_label = sc.label;
  report.noise_mode = sc.noise_mode;

  for (int component = 0; component < 2; ++component) {
    for (std::size_t k = 0; k < schemes.size(); ++k) {
      SchemeSeries series;
      series.errors.resize(tau_list.size());
      series.stderrs.resize(tau_list.size());
      series.blowups.resize(tau_list.size());
      for (std::size_t i = 0; i < tau_list.size(); ++i) {
        std::vector<double> sup_squares;
        sup_squares.reserve(per_sample.size());
        long blowups = 0;
        double mean = 0.0;
        for (const auto& sample : per_sample) {
          const double sq = sample[2 * (i * schemes.size() + k) + component];
          if (!std::isfinite(sq)) ++blowups;
          sup_squares.push_back(sq);
          mean += sq;
        }
        mean /= static_cast<double>(samples);
        const double error = std::sqrt(mean);
        series.errors[i] = error;
        series.stderrs[i] = delta_method_stderr(sup_squares, error);
        series.blowups[i] = blowups;
      }
      finalize_series(series, tau_list);
      if (component == 0)
        report.series_component1[schemes[k]] = series;
      else
        report.series_component2[schemes[k]] = series;
    }
  }
  return report;
}

}  // namespace stoheat
