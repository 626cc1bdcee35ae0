#include "hvi/potential.hpp"

#include "hvi/error.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <sstream>

namespace hvi {

double Polynomial::value(double x) const {
  double s = 0.0;
  for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) s = s * x + *it;
  return s;
}

double Polynomial::derivative(double x) const {
  double s = 0.0;
  for (std::size_t i = coeffs.size(); i-- > 1;) s = s * x + static_cast<double>(i) * coeffs[i];
  return s;
}

double Polynomial::second_derivative(double x) const {
  double s = 0.0;
  for (std::size_t i = coeffs.size(); i-- > 2;)
    s = s * x + static_cast<double>(i * (i - 1)) * coeffs[i];
  return s;
}

int Polynomial::degree() const {
  for (std::size_t i = coeffs.size(); i-- > 0;)
    if (coeffs[i] != 0.0) return static_cast<int>(i);
  return -1;
}

Polynomial Polynomial::differentiate() const {
  Polynomial d;
  for (std::size_t i = 1; i < coeffs.size(); ++i)
    d.coeffs.push_back(static_cast<double>(i) * coeffs[i]);
  return d;
}

PiecewisePotential::PiecewisePotential(std::string family, NamedParams params,
                                       std::vector<double> breakpoints,
                                       std::vector<Polynomial> pieces)
    : family_(std::move(family)),
      params_(std::move(params)),
      breakpoints_(std::move(breakpoints)),
      pieces_(std::move(pieces)) {
  if (pieces_.size() != breakpoints_.size() + 1)
    throw InvalidArgument("piecewise potential needs one more piece than breakpoints");
  for (std::size_t i = 1; i < breakpoints_.size(); ++i)
    if (!(breakpoints_[i - 1] < breakpoints_[i]))
      throw InvalidArgument("breakpoints must be strictly increasing");
}

double PiecewisePotential::param(const std::string& name) const {
  for (const auto& [key, v] : params_)
    if (key == name) return v;
  throw InvalidArgument("potential '" + family_ + "' has no parameter '" + name + "'");
}

std::size_t PiecewisePotential::piece_index(double zeta) const {
  return static_cast<std::size_t>(
      std::upper_bound(breakpoints_.begin(), breakpoints_.end(), zeta) - breakpoints_.begin());
}

double PiecewisePotential::value(double zeta) const { return pieces_[piece_index(zeta)].value(zeta); }

double PiecewisePotential::derivative(double zeta) const {
  return pieces_[piece_index(zeta)].derivative(zeta);
}

double PiecewisePotential::curvature(double zeta) const {
  return pieces_[piece_index(zeta)].second_derivative(zeta);
}

SubgradientInterval PiecewisePotential::clarke_interval(double zeta) const {
  const std::size_t p = piece_index(zeta);
  const double right = pieces_[p].derivative(zeta);
  if (p > 0 && breakpoints_[p - 1] == zeta) {
    const double left = pieces_[p - 1].derivative(zeta);
    return {std::min(left, right), std::max(left, right)};
  }
  return {right, right};
}

SubgradientInterval PiecewisePotential::clarke_hull(double zeta, double radius) const {
  SubgradientInterval out = clarke_interval(zeta);
  if (radius <= 0.0) return out;
  for (std::size_t i = 0; i < breakpoints_.size(); ++i) {
    const double bp = breakpoints_[i];
    if (std::abs(bp - zeta) > radius) continue;
    const double l = pieces_[i].derivative(bp);
    const double r = pieces_[i + 1].derivative(bp);
    out.lo = std::min({out.lo, l, r});
    out.hi = std::max({out.hi, l, r});
  }
  return out;
}

std::size_t PiecewisePotential::breakpoint_near(double zeta, double radius) const {
  for (std::size_t i = 0; i < breakpoints_.size(); ++i)
    if (std::abs(breakpoints_[i] - zeta) <= radius) return i;
  return breakpoints_.size();
}

std::vector<double> PiecewisePotential::continuity_defects() const {
  std::vector<double> out;
  for (std::size_t i = 0; i < breakpoints_.size(); ++i)
    out.push_back(pieces_[i + 1].value(breakpoints_[i]) - pieces_[i].value(breakpoints_[i]));
  return out;
}

std::string PiecewisePotential::describe() const {
  std::ostringstream os;
  os << std::setprecision(17);
  os << "family=" << family_;
  for (const auto& [key, v] : params_) os << ' ' << key << '=' << v;
  os << " breakpoints=[";
  for (std::size_t i = 0; i < breakpoints_.size(); ++i) os << (i ? "," : "") << breakpoints_[i];
  os << "] pieces=[";
  for (std::size_t i = 0; i < pieces_.size(); ++i) {
    os << (i ? ";" : "");
    for (std::size_t c = 0; c < pieces_[i].coeffs.size(); ++c)
      os << (c ? "," : "") << pieces_[i].coeffs[c];
  }
  os << ']';
  return os.str();
}

PiecewisePotential example_potential(double mu, double slope_neg, double slope_pos) {
  std::vector<Polynomial> pieces{
      {{-2.0 * mu - 4.0 * slope_neg, -slope_neg}},
      {{2.0 * mu, 3.0 * mu, 0.5 * mu}},
      {{0.0, 0.0, -0.5 * mu}},
      {{2.0 * mu, -3.0 * mu, 0.5 * mu}},
      {{-2.0 * mu - 4.0 * slope_pos, slope_pos}},
  };
  return PiecewisePotential("example",
                            {{"mu", mu}, {"slope_neg", slope_neg}, {"slope_pos", slope_pos}},
                            {-4.0, -1.0, 1.0, 4.0}, std::move(pieces));
}

PiecewisePotential max_potential(double xi, double c) {
  if (!(xi > 0.0)) throw InvalidArgument("max potential needs xi > 0");
  NamedParams params{{"xi", xi}, {"c", c}};
  const double cross = 1.0 - 2.0 * c / xi;
  if (cross > 0.0) {
    std::vector<Polynomial> pieces{
        {{0.0, -c, 0.5 * xi}},
        {{0.0, -0.5 * xi}},
        {{0.0, 0.5 * xi}},
        {{0.0, c, 0.5 * xi}},
    };
    return PiecewisePotential("max", std::move(params), {-cross, 0.0, cross}, std::move(pieces));
  }
  // Quadratic branch dominates everywhere; only the kink of |x| remains.
  std::vector<Polynomial> pieces{{{0.0, -c, 0.5 * xi}}, {{0.0, c, 0.5 * xi}}};
  return PiecewisePotential("max", std::move(params), {0.0}, std::move(pieces));
}

PiecewisePotential zero_potential() {
  return PiecewisePotential("zero", {}, {}, {Polynomial{{0.0}}});
}

PiecewisePotential quadratic_potential(double epsilon) {
  return PiecewisePotential("quadratic", {{"epsilon", epsilon}}, {},
                            {Polynomial{{0.0, 0.0, 0.5 * epsilon}}});
}

namespace {

double require_param(const NamedParams& params, const std::string& family, const char* name) {
  for (const auto& [key, v] : params)
    if (key == name) return v;
  throw InvalidArgument("potential family '" + family + "' needs parameter '" + name + "'");
}

}  // namespace

PiecewisePotential make_potential(const std::string& family, const NamedParams& params) {
  if (family == "example")
    return example_potential(require_param(params, family, "mu"),
                             require_param(params, family, "slope_neg"),
                             require_param(params, family, "slope_pos"));
  if (family == "max")
    return max_potential(require_param(params, family, "xi"), require_param(params, family, "c"));
  if (family == "zero") return zero_potential();
  if (family == "quadratic") return quadratic_potential(require_param(params, family, "epsilon"));
  throw InvalidArgument("unknown potential family '" + family + "'");
}

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::pass: return "pass";
    case Verdict::fail: return "fail";
    case Verdict::untestable: return "untestable";
  }
  return "untestable";
}

}  // namespace hvi
