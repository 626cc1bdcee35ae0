#pragma once

#include "hvi/spectral.hpp"

#include <array>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

namespace hvi {

// Polynomial with coefficients in ascending powers.
struct Polynomial {
  std::vector<double> coeffs;

  double value(double x) const;
  double derivative(double x) const;
  double second_derivative(double x) const;
  int degree() const;  // -1 for the zero polynomial
  Polynomial differentiate() const;
  double coeff(std::size_t i) const { return i < coeffs.size() ? coeffs[i] : 0.0; }
};

struct SubgradientInterval {
  double lo = 0.0;
  double hi = 0.0;

  bool singleton() const { return lo == hi; }
  double midpoint() const { return 0.5 * (lo + hi); }
  double distance(double v) const { return v < lo ? lo - v : (v > hi ? v - hi : 0.0); }
  double clamp(double v) const { return v < lo ? lo : (v > hi ? hi : v); }
};

using NamedParams = std::vector<std::pair<std::string, double>>;

// Locally Lipschitz z-independent potential zeta -> j(zeta), polynomial on
// each of breakpoints.size() + 1 intervals. Piece i covers [b_{i-1}, b_i),
// with the two unbounded ends included; at a breakpoint the right piece is
// the active one.
class PiecewisePotential {
 public:
  PiecewisePotential(std::string family, NamedParams params, std::vector<double> breakpoints,
                     std::vector<Polynomial> pieces);

  const std::string& family() const { return family_; }
  const NamedParams& params() const { return params_; }
  double param(const std::string& name) const;
  const std::vector<double>& breakpoints() const { return breakpoints_; }
  const std::vector<Polynomial>& pieces() const { return pieces_; }

  std::size_t piece_index(double zeta) const;
  double value(double zeta) const;
  // Derivative of the active piece (right derivative at breakpoints).
  double derivative(double zeta) const;
  double curvature(double zeta) const;

  SubgradientInterval clarke_interval(double zeta) const;
  // Clarke interval at zeta widened by the one-sided derivatives of any
  // breakpoint within `radius`; the radius is a rounding allowance, so smooth
  // points away from breakpoints keep their singleton.
  SubgradientInterval clarke_hull(double zeta, double radius) const;
  // Breakpoint within `radius` of zeta, or the number of breakpoints if none.
  std::size_t breakpoint_near(double zeta, double radius) const;

  // Jump in value at each breakpoint (right minus left).
  std::vector<double> continuity_defects() const;
  // One-line description: family, params, breakpoints, piece coefficients.
  std::string describe() const;

 private:
  std::string family_;
  NamedParams params_;
  std::vector<double> breakpoints_;
  std::vector<Polynomial> pieces_;
};

// Five-piece example: affine tails with slopes -slope_neg / slope_pos and
// quadratic pieces joining at -4, -1, 1, 4.
PiecewisePotential example_potential(double mu, double slope_neg, double slope_pos);
// max{(xi/2) x^2 + c|x|, (xi/2)|x|}; rejects xi <= 0.
PiecewisePotential max_potential(double xi, double c);
PiecewisePotential zero_potential();
// (epsilon / 2) zeta^2.
PiecewisePotential quadratic_potential(double epsilon);
// Factory used by the config layer: family in {example, max, zero, quadratic}.
PiecewisePotential make_potential(const std::string& family, const NamedParams& params);

enum class Verdict { pass, fail, untestable };
std::string to_string(Verdict v);

struct HypothesisCheck {
  std::string id;  // "i" .. "vii"
  Verdict verdict = Verdict::untestable;
  std::string detail;
  NamedParams constants;          // witnessing constants
  std::vector<double> witnesses;  // zeta values of failures
};

struct HypothesisReport {
  std::array<HypothesisCheck, 7> checks;

  bool all_pass() const;
  const HypothesisCheck& at(const std::string& id) const;
  // First failing or untestable check, or nullptr.
  const HypothesisCheck* first_failure() const;
};

// Checks hypotheses (i)-(vii) for the z-independent potential against the
// eigenvalues of `basis` (k, m are 1-based distinct indices).
HypothesisReport check_hypotheses(const PiecewisePotential& j, const EigenBasis& basis, int k,
                                  int m);

// The constant l of hypothesis (v): sup of the difference quotients of
// subgradients. +inf when some breakpoint has an upward derivative jump or a
// tail has unbounded curvature.
double subgradient_quotient_bound(const PiecewisePotential& j);

}  // namespace hvi
