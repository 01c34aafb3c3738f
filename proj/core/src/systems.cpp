#include "stoheat/systems.hpp"

#include <cmath>
#include <iostream>
#include <stdexcept>

namespace stoheat {

namespace {

double sinc(double v) {
  if (v == 0.0) return 1.0;
  return std::sin(v) / v;
}

bool all_finite2(std::span<const double> a, std::span<const double> b) {
  for (double x : a)
    if (!std::isfinite(x)) return false;
  for (double x : b)
    if (!std::isfinite(x)) return false;
  return true;
}

}  // namespace

SystemCoefficient builtin_system_coefficient(const std::string& name, double lambda) {
  if (name != "sincos")
    throw std::invalid_argument("builtin_system_coefficient: unknown name '" + name + "'");
  SystemCoefficient sc;
  sc.label = "sincos(" + std::to_string(lambda) + ")";
  sc.g1 = [lambda](double v1, double v2) { return lambda * std::sin(v1) * std::cos(v2); };
  sc.g2 = [lambda](double v1, double v2) { return lambda * std::cos(v1) * std::sin(v2); };
  sc.f1 = [lambda](double v1, double v2) { return lambda * sinc(v1) * std::cos(v2); };
  sc.f2 = [lambda](double v1, double v2) { return lambda * std::cos(v1) * sinc(v2); };
  return sc;
}

SystemStepper::SystemStepper(SchemeKind kind, const Discretization& d, SystemCoefficient sc,
                             int dense_threshold)
    : kind_(kind),
      N_(d.N),
      tau_(d.tau),
      sqrt_n_(std::sqrt(static_cast<double>(d.N))),
      sc_(std::move(sc)),
      scratch1_(static_cast<std::size_t>(d.interior_nodes())),
      scratch2_(static_cast<std::size_t>(d.interior_nodes())) {
  if (!sc_.g1 || !sc_.g2 || !sc_.f1 || !sc_.f2)
    throw std::invalid_argument("SystemStepper: coefficient lacks evaluators");
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

void SystemStepper::step(std::vector<double>& u1, std::vector<double>& u2,
                         std::span<const double> dw1_row, std::span<const double> dw2_row) {
  const int dim = N_ - 1;
  if (static_cast<int>(u1.size()) != dim || static_cast<int>(u2.size()) != dim ||
      static_cast<int>(dw1_row.size()) != dim || static_cast<int>(dw2_row.size()) != dim)
    throw std::invalid_argument("SystemStepper::step: dimension mismatch");

  switch (kind_) {
    case SchemeKind::LT: {
      for (int n = 0; n < dim; ++n) {
        const double f1 = sc_.f1(u1[n], u2[n]);
        const double f2 = sc_.f2(u1[n], u2[n]);
        scratch1_[n] = noise_substep_exact(u1[n], f1, dw1_row[n], tau_, N_);
        scratch2_[n] = noise_substep_exact(u2[n], f2, dw2_row[n], tau_, N_);
      }
      heat_->apply(scratch1_, u1);
      heat_->apply(scratch2_, u2);
      break;
    }
    case SchemeKind::EM: {
      const double c = tau_ * static_cast<double>(N_) * static_cast<double>(N_);
      lap_->apply(u1, scratch1_);
      lap_->apply(u2, scratch2_);
      for (int n = 0; n < dim; ++n) {
        const double g1 = sc_.g1(u1[n], u2[n]);
        const double g2 = sc_.g2(u1[n], u2[n]);
        u1[n] += c * scratch1_[n] + sqrt_n_ * g1 * dw1_row[n];
        u2[n] += c * scratch2_[n] + sqrt_n_ * g2 * dw2_row[n];
      }
      break;
    }
    case SchemeKind::SEM: {
      for (int n = 0; n < dim; ++n) {
        const double g1 = sc_.g1(u1[n], u2[n]);
        const double g2 = sc_.g2(u1[n], u2[n]);
        scratch1_[n] = u1[n] + sqrt_n_ * g1 * dw1_row[n];
        scratch2_[n] = u2[n] + sqrt_n_ * g2 * dw2_row[n];
      }
      sem_solver_->solve(scratch1_, u1);
      sem_solver_->solve(scratch2_, u2);
      break;
    }
    case SchemeKind::SEXP: {
      for (int n = 0; n < dim; ++n) {
        const double g1 = sc_.g1(u1[n], u2[n]);
        const double g2 = sc_.g2(u1[n], u2[n]);
        scratch1_[n] = u1[n] + sqrt_n_ * g1 * dw1_row[n];
        scratch2_[n] = u2[n] + sqrt_n_ * g2 * dw2_row[n];
      }
      heat_->apply(scratch1_, u1);
      heat_->apply(scratch2_, u2);
      break;
    }
  }
}

SystemState lt_system_step(const SystemState& state, const HeatPropagator& heat,
                           const SystemCoefficient& sc, std::span<const double> dw1_row,
                           std::span<const double> dw2_row) {
  const int dim = heat.dimension();
  if (static_cast<int>(state.component1.size()) != dim ||
      static_cast<int>(state.component2.size()) != dim ||
      static_cast<int>(dw1_row.size()) != dim || static_cast<int>(dw2_row.size()) != dim)
    throw std::invalid_argument("lt_system_step: dimension mismatch");

  const double tau = heat.time();
  const int N = heat.space_intervals();
  std::vector<double> staged1(static_cast<std::size_t>(dim));
  std::vector<double> staged2(static_cast<std::size_t>(dim));
  for (int n = 0; n < dim; ++n) {
    const double v1 = state.component1[n];
    const double v2 = state.component2[n];
    staged1[n] = noise_substep_exact(v1, sc.f1(v1, v2), dw1_row[n], tau, N);
    staged2[n] = noise_substep_exact(v2, sc.f2(v1, v2), dw2_row[n], tau, N);
  }
  SystemState next;
  next.time_index = state.time_index + 1;
  next.component1 = heat.apply(staged1);
  next.component2 = heat.apply(staged2);
  return next;
}

SystemTrajectory integrate_system(SchemeKind kind, const Discretization& d,
                                  const SystemCoefficient& sc, const InitialCondition& u10,
                                  const InitialCondition& u20, const NoiseIncrements& noise1,
                                  const NoiseIncrements& noise2,
                                  const IntegrateSystemOptions& options) {
  SystemStepper stepper(kind, d, sc, options.dense_threshold);
  return integrate_system(stepper, d, u10, u20, noise1, noise2, options);
}

SystemTrajectory integrate_system(SystemStepper& stepper, const Discretization& d,
                                  const InitialCondition& u10, const InitialCondition& u20,
                                  const NoiseIncrements& noise1, const NoiseIncrements& noise2,
                                  const IntegrateSystemOptions& options) {
  for (const NoiseIncrements* noise : {&noise1, &noise2}) {
    if (noise->space_intervals() != d.N || noise->time_steps() != d.M)
      throw std::invalid_argument("integrate_system: noise dimensions do not match");
    const double scale = std::max(std::abs(noise->tau()), std::abs(d.tau));
    if (std::abs(noise->tau() - d.tau) > 4e-16 * scale)
      throw std::invalid_argument("integrate_system: noise step size does not match");
  }
  if (options.snapshot_stride < 1)
    throw std::invalid_argument("integrate_system: snapshot_stride must be >= 1");
  if (options.warn_cfl && d.cfl_h > options.cfl_gamma)
    std::clog << "stoheat: warning: tau/h = " << d.cfl_h << " exceeds gamma = "
              << options.cfl_gamma << " (mesh ratio restriction violated)\n";

  SystemTrajectory traj;
  traj.kind = stepper.kind();
  traj.discretization = d;

  std::vector<double> u1 = sample_initial_condition(u10, d);
  std::vector<double> u2 = sample_initial_condition(u20, d);
  traj.snapshots.push_back({u1, u2, 0});
  if (options.observer && !options.observer(0, u1, u2)) return traj;

  for (int m = 0; m < d.M; ++m) {
    try {
      stepper.step(u1, u2, noise1.row(m), noise2.row(m));
    } catch (const CoefficientDomainError& e) {
      traj.blow_up = BlowUpRecord{m + 1, BlowUpCause::CoefficientDomain, e.what()};
      return traj;
    }
    if (!all_finite2(u1, u2)) {
      traj.blow_up = BlowUpRecord{m + 1, BlowUpCause::NonFinite, "non-finite state entry"};
      return traj;
    }
    const int index = m + 1;
    if (index % options.snapshot_stride == 0 || index == d.M)
      traj.snapshots.push_back({u1, u2, index});
    if (options.observer && !options.observer(index, u1, u2)) return traj;
  }
  return traj;
}

}  // namespace stoheat
