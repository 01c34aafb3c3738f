#include "stoheat/integrators.hpp"

#include <cassert>
#include <cmath>
#include <iostream>
#include <stdexcept>

namespace stoheat {

namespace {

bool all_finite(std::span<const double> v) {
  for (double x : v)
    if (!std::isfinite(x)) return false;
  return true;
}

#ifndef NDEBUG
bool all_nonnegative(std::span<const double> v) {
  for (double x : v)
    if (x < 0.0) return false;
  return true;
}
#endif

void check_noise_matches(const Discretization& d, const NoiseIncrements& noise) {
  if (noise.space_intervals() != d.N || noise.time_steps() != d.M)
    throw std::invalid_argument("integrate: noise dimensions do not match the discretization");
  const double scale = std::max(std::abs(noise.tau()), std::abs(d.tau));
  if (std::abs(noise.tau() - d.tau) > 4e-16 * scale)
    throw std::invalid_argument("integrate: noise step size does not match the discretization");
}

}  // namespace

const char* scheme_name(SchemeKind kind) {
  switch (kind) {
    case SchemeKind::LT: return "lt";
    case SchemeKind::EM: return "em";
    case SchemeKind::SEM: return "sem";
    case SchemeKind::SEXP: return "sexp";
  }
  return "?";
}

std::optional<SchemeKind> parse_scheme(std::string_view name) {
  if (name == "lt" || name == "LT") return SchemeKind::LT;
  if (name == "em" || name == "EM") return SchemeKind::EM;
  if (name == "sem" || name == "SEM") return SchemeKind::SEM;
  if (name == "sexp" || name == "SEXP") return SchemeKind::SEXP;
  return std::nullopt;
}

double noise_substep_exact(double u, double f_u, double dw, double tau, int N) {
  if (u == 0.0) return u;  // g(0) = 0 makes zero absorbing; also avoids inf*0
  const double root_n = std::sqrt(static_cast<double>(N));
  const double exponent = root_n * f_u * dw - static_cast<double>(N) * f_u * f_u * tau * 0.5;
  return std::exp(exponent) * u;
}

SchemeStepper::SchemeStepper(SchemeKind kind, const Discretization& d, Coefficient coeff,
                             int dense_threshold)
    : kind_(kind),
      N_(d.N),
      tau_(d.tau),
      sqrt_n_(std::sqrt(static_cast<double>(d.N))),
      coeff_(std::move(coeff)),
      scratch_(static_cast<std::size_t>(d.interior_nodes())) {
  if (!coeff_.g || !coeff_.f) throw std::invalid_argument("SchemeStepper: coefficient lacks evaluators");
  if (kind_ == SchemeKind::LT || kind_ == SchemeKind::SEXP) {
    const SpectralDecomposition spec(d.N);
    heat_ = std::make_shared<const HeatPropagator>(spec, d.tau, dense_threshold);
  } else if (kind_ == SchemeKind::EM) {
    lap_ = std::make_shared<const TridiagonalOperator>(laplacian(d.N));
  } else {
    sem_solver_ = std::make_shared<const ShiftedTridiagonalSolver>(
        laplacian(d.N), d.tau * static_cast<double>(d.N) * static_cast<double>(d.N));
  }
}

void SchemeStepper::step(std::vector<double>& values, std::span<const double> dw_row) {
  const int dim = N_ - 1;
  if (static_cast<int>(values.size()) != dim || static_cast<int>(dw_row.size()) != dim)
    throw std::invalid_argument("SchemeStepper::step: dimension mismatch");

  switch (kind_) {
    case SchemeKind::LT: {
#ifndef NDEBUG
      const bool input_nonneg = all_nonnegative(values);
#endif
      for (int n = 0; n < dim; ++n)
        scratch_[n] = noise_substep_exact(values[n], coeff_.f(values[n]), dw_row[n], tau_, N_);
      heat_->apply(scratch_, values);
#ifndef NDEBUG
      // Nonnegative kernel entries times nonnegative sub-step outputs cannot
      // produce a negative sum in floating point.
      if (input_nonneg && heat_->dense()) assert(all_nonnegative(values));
#endif
      break;
    }
    case SchemeKind::EM: {
      const double c = tau_ * static_cast<double>(N_) * static_cast<double>(N_);
      lap_->apply(values, scratch_);
      for (int n = 0; n < dim; ++n)
        values[n] += c * scratch_[n] + sqrt_n_ * coeff_.g(values[n]) * dw_row[n];
      break;
    }
    case SchemeKind::SEM: {
      for (int n = 0; n < dim; ++n)
        scratch_[n] = values[n] + sqrt_n_ * coeff_.g(values[n]) * dw_row[n];
      sem_solver_->solve(scratch_, values);
      break;
    }
    case SchemeKind::SEXP: {
      for (int n = 0; n < dim; ++n)
        scratch_[n] = values[n] + sqrt_n_ * coeff_.g(values[n]) * dw_row[n];
      heat_->apply(scratch_, values);
      break;
    }
  }
}

SchemeState lt_step(const SchemeState& state, const HeatPropagator& heat, const Coefficient& coeff,
                    std::span<const double> dw_row) {
  const int dim = heat.dimension();
  if (static_cast<int>(state.values.size()) != dim || static_cast<int>(dw_row.size()) != dim)
    throw std::invalid_argument("lt_step: dimension mismatch");
  SchemeState next;
  next.time_index = state.time_index + 1;
  std::vector<double> staged(static_cast<std::size_t>(dim));
  for (int n = 0; n < dim; ++n)
    staged[n] = noise_substep_exact(state.values[n], coeff.f(state.values[n]), dw_row[n],
                                    heat.time(), heat.space_intervals());
  next.values = heat.apply(staged);
  return next;
}

SchemeState baseline_step(SchemeKind kind, const SchemeState& state,
                          const TridiagonalOperator& lap, const HeatPropagator& heat,
                          const Coefficient& coeff, std::span<const double> dw_row, double tau,
                          int N) {
  const int dim = N - 1;
  if (static_cast<int>(state.values.size()) != dim || static_cast<int>(dw_row.size()) != dim)
    throw std::invalid_argument("baseline_step: dimension mismatch");
  if (kind == SchemeKind::LT)
    throw std::invalid_argument("baseline_step: use lt_step for the splitting scheme");

  const double root_n = std::sqrt(static_cast<double>(N));
  SchemeState next;
  next.time_index = state.time_index + 1;
  std::vector<double> staged(static_cast<std::size_t>(dim));

  if (kind == SchemeKind::EM) {
    const double c = tau * static_cast<double>(N) * static_cast<double>(N);
    std::vector<double> lap_u = lap.apply(state.values);
    next.values.resize(static_cast<std::size_t>(dim));
    for (int n = 0; n < dim; ++n)
      next.values[n] =
          state.values[n] + c * lap_u[n] + root_n * coeff.g(state.values[n]) * dw_row[n];
    return next;
  }

  for (int n = 0; n < dim; ++n)
    staged[n] = state.values[n] + root_n * coeff.g(state.values[n]) * dw_row[n];

  if (kind == SchemeKind::SEM) {
    const ShiftedTridiagonalSolver solver(lap, tau * static_cast<double>(N) * static_cast<double>(N));
    next.values = solver.solve(staged);
  } else {
    next.values = heat.apply(staged);
  }
  return next;
}

Trajectory integrate(SchemeKind kind, const Discretization& d, const Coefficient& coeff,
                     const InitialCondition& u0, const NoiseIncrements& noise,
                     const IntegrateOptions& options) {
  SchemeStepper stepper(kind, d, coeff, options.dense_threshold);
  return integrate(stepper, d, u0, noise, options);
}

Trajectory integrate(SchemeStepper& stepper, const Discretization& d, const InitialCondition& u0,
                     const NoiseIncrements& noise, const IntegrateOptions& options) {
  check_noise_matches(d, noise);
  if (options.snapshot_stride < 1)
    throw std::invalid_argument("integrate: snapshot_stride must be >= 1");
  if (options.warn_cfl && d.cfl_h > options.cfl_gamma)
    std::clog << "stoheat: warning: tau/h = " << d.cfl_h << " exceeds gamma = "
              << options.cfl_gamma << " (mesh ratio restriction violated)\n";

  Trajectory traj;
  traj.kind = stepper.kind();
  traj.discretization = d;

  std::vector<double> values = sample_initial_condition(u0, d);
  traj.snapshots.push_back({values, 0});
  if (options.observer && !options.observer(0, values)) return traj;

  for (int m = 0; m < d.M; ++m) {
    try {
      stepper.step(values, noise.row(m));
    } catch (const CoefficientDomainError& e) {
      traj.blow_up = BlowUpRecord{m + 1, BlowUpCause::CoefficientDomain, e.what()};
      return traj;
    }
    if (!all_finite(values)) {
      traj.blow_up = BlowUpRecord{m + 1, BlowUpCause::NonFinite, "non-finite state entry"};
      return traj;
    }
    const int index = m + 1;
    if (index % options.snapshot_stride == 0 || index == d.M)
      traj.snapshots.push_back({values, index});
    if (options.observer && !options.observer(index, values)) return traj;
  }
  return traj;
}

}  // namespace stoheat
