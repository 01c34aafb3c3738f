#pragma once

#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace stoheat {

struct Discretization;

// Raised when a coefficient is evaluated outside its domain (log1p at
// v <= -1). Trajectory drivers convert it into a per-sample blow-up record
// instead of letting NaNs propagate silently.
class CoefficientDomainError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Multiplicative nonlinearity g paired with its companion map f(v) = g(v)/v,
// f(0) = g'(0). Evaluators must be pure and re-entrant; f is the quantity the
// splitting step freezes, g is what the baseline schemes multiply.
struct Coefficient {
  std::function<double(double)> g;
  std::function<double(double)> f;
  std::optional<double> lipschitz_bound;  // sup |f| on the valid domain, when known
  bool positivity_domain_only = false;    // metadata only valid on v >= 0
  std::string label;
};

// Registry entries (lambda is a scalar gain):
//   linear        g = lambda*v                 f = lambda
//   log1p         g = lambda*ln(1+v)           f(0) = lambda, domain v > -1
//   sin_plus      g = lambda*(v + sin v)       f(0) = 2*lambda
//   rational      g = lambda*v/(1+v^2)         f = lambda/(1+v^2)
//   gauss_damped  g = lambda*v*exp(-v^2)       f = lambda*exp(-v^2)
//   power125      g = lambda*v*|v|^(1/4)       f = lambda*|v|^(1/4), no Lipschitz bound
// power125 uses the even extension of f below zero so the explicit baselines
// stay defined; only v >= 0 matches the continuous model.
Coefficient builtin_coefficient(const std::string& name, double lambda);

const std::vector<std::string>& builtin_coefficient_names();

double eval_f(const Coefficient& c, double v);

struct InitialCondition {
  std::function<double(double)> evaluator;  // [0,1] -> R
  std::string label;
};

// Registry: sin_pi (u0(x) = sin(pi x), the default everywhere) and zero.
InitialCondition builtin_initial_condition(const std::string& name);

// Evaluates u0 at the interior nodes. Verifies the boundary compatibility
// u0(0) = u0(1) = 0 (up to 1e-12) and, when requested, nonnegativity on the
// grid.
std::vector<double> sample_initial_condition(const InitialCondition& u0,
                                             const Discretization& d,
                                             bool require_nonnegative = false);

}  // namespace stoheat
