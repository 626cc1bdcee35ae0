#pragma once

#include "hvi/energy.hpp"

#include <cstdint>
#include <optional>
#include <string>

namespace hvi {

enum class InnerMethod {
  // Newton on the smooth part with nodes on kinks held fixed, multipliers
  // checked against the Clarke intervals, exact line search along the
  // piecewise polynomial ray.
  active_set_newton,
  // Steepest descent along the min-norm subgradient with the same exact line
  // search. Slow but simple; kept as a reference method.
  steepest_descent,
};

std::string to_string(InnerMethod m);
InnerMethod inner_method_from_string(const std::string& name);

struct InnerOptions {
  double tol = 1e-9;  // min-norm projected subgradient on Hhat
  int max_iter = 200;
  InnerMethod method = InnerMethod::active_set_newton;
  bool audit = true;  // strong-convexity audit over consecutive iterates
};

struct ReductionResult {
  SpectralVector theta;  // supported on Hhat
  double inner_residual = 0.0;
  int iterations = 0;
  // Smallest audited monotonicity quotient over the accepted steps, absent
  // when no step was long enough to audit.
  std::optional<double> strong_convexity_margin;
  Eigen::VectorXd selection;  // nodal h realizing inner_residual
  double energy = 0.0;        // phi(u + theta)
};

// theta(u) = argmin over Hhat of phi(u + v). Coefficients of u outside Hbar_0
// are ignored. Throws SolverError("reduction", ...) on non-convergence, on a
// Hessian that is not positive definite, or on a failed monotonicity audit.
ReductionResult reduce(const EnergyContext& ctx, const SpectralVector& u,
                       const InnerOptions& opts = {}, const SpectralVector* warm = nullptr);

// <x1* - x2*, v1 - v2> / |grad(v1 - v2)|^2 with midpoint selections at u + v1
// and u + v2, projected on Hhat.
double strong_convexity_audit(const EnergyContext& ctx, const SpectralVector& u,
                              const SpectralVector& v1, const SpectralVector& v2);

struct ReducedEval {
  double psi_value = 0.0;
  SpectralVector reduced_subgradient;  // supported on Hbar_0
  ReductionResult reduction;
};

// psi(u) = -phi(u + theta(u)) and minus the Hbar_0 projection of the
// subgradient at u + theta(u), using the selection the inner solve ended on.
ReducedEval reduced_eval(const EnergyContext& ctx, const SpectralVector& u,
                         const InnerOptions& opts = {}, const SpectralVector* warm = nullptr);

// Largest sampled |theta(u') - theta(u)|_H1 / |u' - u|_H1 over u' on the Hbar_0
// sphere of the given H1 radius around u.
double continuity_probe(const EnergyContext& ctx, const SpectralVector& u, double radius,
                        int n_samples, std::uint64_t seed, const InnerOptions& opts = {});

}  // namespace hvi
