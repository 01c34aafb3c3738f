#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "stoheat/coefficients.hpp"
#include "stoheat/grid.hpp"
#include "stoheat/noise.hpp"
#include "stoheat/spectral.hpp"
#include "stoheat/tridiagonal.hpp"

namespace stoheat {

// Time integrators for the spatially discretized stochastic heat equation
// du = N^2 D^N u dt + sqrt(N) g(u) dW:
//   LT    Lie-Trotter splitting: exact geometric noise sub-step with f frozen
//         at the previous state, then the exact heat semigroup. Preserves
//         nonnegativity of the state.
//   EM    explicit Euler-Maruyama.
//   SEM   semi-implicit Euler-Maruyama (implicit diffusion, tridiagonal solve).
//   SEXP  stochastic exponential Euler.
enum class SchemeKind { LT, EM, SEM, SEXP };

const char* scheme_name(SchemeKind kind);
std::optional<SchemeKind> parse_scheme(std::string_view name);

// Interior-node state; boundary values are identically zero and not stored.
struct SchemeState {
  std::vector<double> values;
  int time_index = 0;
};

enum class BlowUpCause { NonFinite, CoefficientDomain };

struct BlowUpRecord {
  int step = 0;  // time step during which the failure occurred
  BlowUpCause cause = BlowUpCause::NonFinite;
  std::string message;
};

struct Trajectory {
  SchemeKind kind = SchemeKind::LT;
  Discretization discretization;
  std::vector<SchemeState> snapshots;  // strictly increasing time indices
  std::optional<BlowUpRecord> blow_up;
};

// Exact solution of the frozen-coefficient noise sub-step over one step:
// exp(sqrt(N) f_u dW - N f_u^2 tau / 2) * u. Zero is absorbing and the sign
// of u is preserved; overflow surfaces as +-inf for the driver to flag.
double noise_substep_exact(double u, double f_u, double dw, double tau, int N);

// One-step maps in allocating form. `heat` fixes (N, tau); dw_row has length
// N-1. EM ignores `heat`, LT/SEXP ignore `lap`.
SchemeState lt_step(const SchemeState& state, const HeatPropagator& heat, const Coefficient& coeff,
                    std::span<const double> dw_row);
SchemeState baseline_step(SchemeKind kind, const SchemeState& state,
                          const TridiagonalOperator& lap, const HeatPropagator& heat,
                          const Coefficient& coeff, std::span<const double> dw_row, double tau,
                          int N);

// Reusable one-step engine. Construction precomputes the heat kernel factor
// (shared across copies) for the schemes that need it; copies share the
// immutable parts and own their scratch, so one stepper per worker is cheap.
class SchemeStepper {
 public:
  SchemeStepper(SchemeKind kind, const Discretization& d, Coefficient coeff,
                int dense_threshold = HeatPropagator::kDefaultDenseThreshold);

  SchemeKind kind() const { return kind_; }
  const HeatPropagator* propagator() const { return heat_.get(); }

  // Advances `values` in place by one step. Throws CoefficientDomainError on
  // domain violations; never checks finiteness (the driver does).
  void step(std::vector<double>& values, std::span<const double> dw_row);

 private:
  SchemeKind kind_;
  int N_;
  double tau_;
  double sqrt_n_;
  Coefficient coeff_;
  std::shared_ptr<const HeatPropagator> heat_;
  std::shared_ptr<const TridiagonalOperator> lap_;
  std::shared_ptr<const ShiftedTridiagonalSolver> sem_solver_;
  std::vector<double> scratch_;
};

// Called after the initial state and after every completed step with
// (time_index, interior values). Return false to stop the run early.
using StepObserver = std::function<bool(int, std::span<const double>)>;

struct IntegrateOptions {
  int snapshot_stride = 1;      // snapshots at 0, stride, 2*stride, ..., M
  int dense_threshold = HeatPropagator::kDefaultDenseThreshold;
  double cfl_gamma = 1.0;       // warn when tau > gamma * h
  bool warn_cfl = true;
  StepObserver observer;        // optional
};

// Drives the chosen one-step map over all rows of `noise` from the sampled
// initial vector. Requires noise dimensions and step size to match d. On the
// first non-finite value or coefficient domain violation the trajectory is
// marked blown up and the run stops; no snapshot at or after the failed step
// is recorded.
Trajectory integrate(SchemeKind kind, const Discretization& d, const Coefficient& coeff,
                     const InitialCondition& u0, const NoiseIncrements& noise,
                     const IntegrateOptions& options = {});

// Same driver with a caller-owned stepper, so the kernel factor is built once
// and reused across samples.
Trajectory integrate(SchemeStepper& stepper, const Discretization& d, const InitialCondition& u0,
                     const NoiseIncrements& noise, const IntegrateOptions& options = {});

}  // namespace stoheat
