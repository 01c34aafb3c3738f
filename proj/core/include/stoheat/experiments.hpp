#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "stoheat/coefficients.hpp"
#include "stoheat/grid.hpp"
#include "stoheat/integrators.hpp"
#include "stoheat/systems.hpp"

namespace stoheat {

struct SchemeCounters {
  long positive = 0;
  long negative = 0;
  long blown_up = 0;
  long total = 0;
};

struct PositivityReport {
  std::vector<SchemeKind> schemes;
  std::map<SchemeKind, SchemeCounters> counters;
  Discretization discretization;
  std::string coefficient_label;
  std::string initial_label;
  int samples = 0;
  std::uint64_t seed = 0;
};

struct ExperimentOptions {
  int threads = 1;
  int dense_threshold = HeatPropagator::kDefaultDenseThreshold;
  double cfl_gamma = 1.0;
  bool warn_cfl = true;
};

// One increment matrix per sample index, shared bit-for-bit across all
// schemes. A sample counts positive iff every entry of every step-end state
// is >= 0 (strict comparison, no tolerance) and the path never blew up; the
// first observed failure decides between the negative and blown-up buckets.
PositivityReport positivity_census(const std::vector<SchemeKind>& schemes,
                                   const Discretization& d, const Coefficient& coeff,
                                   const InitialCondition& u0, int samples, std::uint64_t seed,
                                   const ExperimentOptions& options = {});

struct SchemeSeries {
  std::vector<double> errors;   // per tau, same order as tau_values
  std::vector<double> stderrs;  // Monte-Carlo standard error of each estimate
  std::vector<long> blowups;    // samples lost to blow-up per tau
  double fitted_slope = 0.0;
  double slope_ci_halfwidth = 0.0;  // two-sigma, propagated from the stderrs
  int fit_points = 0;
};

struct ConvergenceReport {
  std::vector<SchemeKind> schemes;
  std::vector<double> tau_values;  // descending
  std::map<SchemeKind, SchemeSeries> series;
  double tau_ref = 0.0;
  int N = 0;
  double T = 0.0;
  int samples = 0;
  std::uint64_t seed = 0;
  std::string coefficient_label;
  std::string initial_label;
};

// Strong-error study against a splitting-scheme reference on the same
// Brownian path: fine increments at tau_ref per sample, coarsened dyadically
// for every (scheme, tau) run. The error at (scheme, tau) is
// sqrt(mean over samples of sup over the coarse space-time grid of the
// squared difference), and the slope is the least-squares fit of log error
// against log tau over the taus whose error is finite and at least ten times
// its Monte-Carlo standard error.
ConvergenceReport convergence_study(const std::vector<SchemeKind>& schemes, int N,
                                    const std::vector<double>& tau_list, double tau_ref, double T,
                                    const Coefficient& coeff, const InitialCondition& u0,
                                    int samples, std::uint64_t seed,
                                    const ExperimentOptions& options = {});

struct MomentSummary {
  double max_mean_square = 0.0;  // max over (m,n) of the sample mean of u^2
  double ratio = 0.0;            // max_mean_square / (1 + sup |u0|^2)
  int arg_m = 0;
  int arg_n = 0;  // 1-based interior node of the maximizer
  double sup_u0_squared = 0.0;
  Discretization discretization;
  std::string coefficient_label;
  int samples = 0;
  std::uint64_t seed = 0;
};

// Sample second moment of the splitting scheme over the whole grid.
MomentSummary moment_diagnostic(const Discretization& d, const Coefficient& coeff,
                                const InitialCondition& u0, int samples, std::uint64_t seed,
                                const ExperimentOptions& options = {});

struct KernelProbeSummary {
  // sup over the time grid of sqrt(t) * max_x int |G^N(t,x,y)|^2 dy
  double semigroup_constant = 0.0;
  // max_x int_0^T int |G^N(T-s,x,y) - G^N(T-l(s),x,y)|^2 dy ds / sqrt(tau)
  double increment_constant = 0.0;
  int N = 0;
  int M = 0;
  double T = 0.0;
};

// Numerical boundedness probes for the discrete-kernel integrals that drive
// the error analysis. Diagnostic only; dense path, so N is capped at 64.
KernelProbeSummary kernel_inequality_probe(int N, int M, double T);

struct SystemPositivityReport {
  std::vector<SchemeKind> schemes;
  std::map<SchemeKind, SchemeCounters> counters_component1;
  std::map<SchemeKind, SchemeCounters> counters_component2;
  Discretization discretization;
  std::string coefficient_label;
  NoiseMode noise_mode = NoiseMode::Independent;
  int samples = 0;
  std::uint64_t seed = 0;
};

// Census for the coupled pair; components are classified independently.
// Independent noises use sample indices (2i, 2i+1); equal mode shares one.
SystemPositivityReport system_positivity_census(const std::vector<SchemeKind>& schemes,
                                                const Discretization& d,
                                                const SystemCoefficient& sc,
                                                const InitialCondition& u10,
                                                const InitialCondition& u20, int samples,
                                                std::uint64_t seed,
                                                const ExperimentOptions& options = {});

struct SystemConvergenceReport {
  std::vector<SchemeKind> schemes;
  std::vector<double> tau_values;
  std::map<SchemeKind, SchemeSeries> series_component1;
  std::map<SchemeKind, SchemeSeries> series_component2;
  double tau_ref = 0.0;
  int N = 0;
  double T = 0.0;
  int samples = 0;
  std::uint64_t seed = 0;
  std::string coefficient_label;
  NoiseMode noise_mode = NoiseMode::Independent;
};

SystemConvergenceReport system_convergence_study(const std::vector<SchemeKind>& schemes, int N,
                                                 const std::vector<double>& tau_list,
                                                 double tau_ref, double T,
                                                 const SystemCoefficient& sc,
                                                 const InitialCondition& u10,
                                                 const InitialCondition& u20, int samples,
                                                 std::uint64_t seed,
                                                 const ExperimentOptions& options = {});

// Least-squares slope of log(y) against log(x) with a two-sigma confidence
// half-width propagated from the per-point standard errors. Shared by the
// studies and their tests.
struct SlopeFit {
  double slope = 0.0;
  double ci_halfwidth = 0.0;
  int points = 0;
};
SlopeFit fit_loglog_slope(const std::vector<double>& x, const std::vector<double>& y,
                          const std::vector<double>& y_stderr);

}  // namespace stoheat
