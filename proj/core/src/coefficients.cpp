#include "stoheat/coefficients.hpp"

#include <cmath>
#include <numbers>

#include "stoheat/grid.hpp"

namespace stoheat {

namespace {

double require_log1p_domain(double v) {
  if (v <= -1.0)
    throw CoefficientDomainError("log1p coefficient evaluated at v <= -1");
  return v;
}

}  // namespace

Coefficient builtin_coefficient(const std::string& name, double lambda) {
  Coefficient c;
  c.label = name + "(" + std::to_string(lambda) + ")";
  if (name == "linear") {
    c.g = [lambda](double v) { return lambda * v; };
    c.f = [lambda](double) { return lambda; };
    c.lipschitz_bound = std::abs(lambda);
  } else if (name == "log1p") {
    c.g = [lambda](double v) { return lambda * std::log1p(require_log1p_domain(v)); };
    c.f = [lambda](double v) {
      require_log1p_domain(v);
      if (v == 0.0) return lambda;
      return lambda * std::log1p(v) / v;
    };
    // ln(1+v)/v <= 1 holds on v >= 0 only; the bound and the theory are
    // restricted to the positive domain.
    c.lipschitz_bound = std::abs(lambda);
    c.positivity_domain_only = true;
  } else if (name == "sin_plus") {
    c.g = [lambda](double v) { return lambda * (v + std::sin(v)); };
    c.f = [lambda](double v) {
      if (v == 0.0) return 2.0 * lambda;
      return lambda * (1.0 + std::sin(v) / v);
    };
    c.lipschitz_bound = 2.0 * std::abs(lambda);
  } else if (name == "rational") {
    c.g = [lambda](double v) { return lambda * v / (1.0 + v * v); };
    c.f = [lambda](double v) { return lambda / (1.0 + v * v); };
    c.lipschitz_bound = std::abs(lambda);
  } else if (name == "gauss_damped") {
    c.g = [lambda](double v) { return lambda * v * std::exp(-v * v); };
    c.f = [lambda](double v) { return lambda * std::exp(-v * v); };
    c.lipschitz_bound = std::abs(lambda);
  } else if (name == "power125") {
    c.g = [lambda](double v) { return lambda * v * std::pow(std::abs(v), 0.25); };
    c.f = [lambda](double v) { return lambda * std::pow(std::abs(v), 0.25); };
    c.positivity_domain_only = true;
  } else {
    throw std::invalid_argument("builtin_coefficient: unknown name '" + name + "'");
  }
  return c;
}

const std::vector<std::string>& builtin_coefficient_names() {
  static const std::vector<std::string> names = {"linear",   "log1p",        "sin_plus",
                                                 "rational", "gauss_damped", "power125"};
  return names;
}

double eval_f(const Coefficient& c, double v) { return c.f(v); }

InitialCondition builtin_initial_condition(const std::string& name) {
  InitialCondition ic;
  ic.label = name;
  if (name == "sin_pi") {
    ic.evaluator = [](double x) { return std::sin(std::numbers::pi * x); };
  } else if (name == "zero") {
    ic.evaluator = [](double) { return 0.0; };
  } else {
    throw std::invalid_argument("builtin_initial_condition: unknown name '" + name + "'");
  }
  return ic;
}

std::vector<double> sample_initial_condition(const InitialCondition& u0, const Discretization& d,
                                             bool require_nonnegative) {
  if (!u0.evaluator) throw std::invalid_argument("sample_initial_condition: empty evaluator");
  if (std::abs(u0.evaluator(0.0)) > 1e-12 || std::abs(u0.evaluator(1.0)) > 1e-12)
    throw std::invalid_argument(
        "sample_initial_condition: initial value must vanish at the boundary");

  std::vector<double> values(static_cast<std::size_t>(d.interior_nodes()));
  for (int n = 1; n < d.N; ++n) {
    const double v = u0.evaluator(d.grid_point(n));
    if (!std::isfinite(v))
      throw std::invalid_argument("sample_initial_condition: non-finite initial value");
    if (require_nonnegative && v < 0.0)
      throw std::invalid_argument(
          "sample_initial_condition: initial value must be nonnegative on the grid");
    values[static_cast<std::size_t>(n - 1)] = v;
  }
  return values;
}

}  // namespace stoheat
