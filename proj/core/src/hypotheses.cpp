#include "hvi/potential.hpp"

#include "hvi/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace hvi {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(10);
  os << v;
  return os.str();
}

double max_abs_breakpoint(const PiecewisePotential& j) {
  double b = 0.0;
  for (double x : j.breakpoints()) b = std::max(b, std::abs(x));
  return b;
}

// Sup of p over [lo, hi]; tails pass an infinite endpoint.
double polynomial_sup(const Polynomial& p, double lo, double hi) {
  const int deg = p.degree();
  if (deg <= 0) return p.coeff(0);
  const double lead = p.coeffs[static_cast<std::size_t>(deg)];
  if (std::isinf(hi) && lead > 0.0) return kInf;
  if (std::isinf(lo) && lead * ((deg % 2 == 0) ? 1.0 : -1.0) > 0.0) return kInf;
  const double a = std::isinf(lo) ? hi - 1e3 : lo;
  const double b = std::isinf(hi) ? lo + 1e3 : hi;
  double best = -kInf;
  constexpr int kSamples = 400;
  for (int s = 0; s <= kSamples; ++s) best = std::max(best, p.value(a + (b - a) * s / kSamples));
  return best;
}

HypothesisCheck check_zero_value(const PiecewisePotential& j) {
  HypothesisCheck c;
  c.id = "i";
  const double v = j.value(0.0);
  c.constants = {{"j0", v}};
  if (std::abs(v) <= 1e-12) {
    c.verdict = Verdict::pass;
    c.detail = "j(0) = 0; z-independent, hence measurable";
  } else {
    c.verdict = Verdict::fail;
    c.detail = "j(0) = " + fmt(v) + " != 0";
    c.witnesses = {0.0};
  }
  return c;
}

HypothesisCheck check_lipschitz(const PiecewisePotential& j) {
  HypothesisCheck c;
  c.id = "ii";
  const auto defects = j.continuity_defects();
  double worst = 0.0;
  for (std::size_t i = 0; i < defects.size(); ++i) {
    const double b = j.breakpoints()[i];
    const double scale = 1.0 + std::abs(j.value(b));
    if (std::abs(defects[i]) > 1e-12 * scale) c.witnesses.push_back(b);
    worst = std::max(worst, std::abs(defects[i]));
  }
  c.constants = {{"max_jump", worst}};
  if (c.witnesses.empty()) {
    c.verdict = Verdict::pass;
    c.detail = "continuous piecewise polynomial, locally Lipschitz";
  } else {
    c.verdict = Verdict::fail;
    c.detail = "value jumps at a breakpoint (max jump " + fmt(worst) + ")";
  }
  return c;
}

HypothesisCheck check_growth(const PiecewisePotential& j, int dimension) {
  HypothesisCheck c;
  c.id = "iii";
  const auto& pieces = j.pieces();
  const int p = std::max({pieces.front().degree(), pieces.back().degree(), 0});
  const double r = std::max(1, p);
  double c1 = 1.0;
  if (r > 1.0) {
    double lead = 0.0;
    for (const Polynomial* tail : {&pieces.front(), &pieces.back()})
      lead = std::max(lead, std::abs(tail->differentiate().coeff(static_cast<std::size_t>(r - 1))));
    if (lead > 0.0) c1 = 2.0 * lead;
  }
  const double critical = dimension > 2 ? 2.0 * dimension / (dimension - 2.0) : kInf;

  const double big = std::max(1e3, 2.0 * max_abs_breakpoint(j));
  auto excess = [&](double zeta, double u) { return std::abs(u) - c1 * std::pow(std::abs(zeta), r - 1.0); };
  double a1 = 0.0;
  constexpr int kSamples = 20000;
  for (int s = 0; s <= kSamples; ++s) {
    const double zeta = -big + 2.0 * big * s / kSamples;
    a1 = std::max(a1, excess(zeta, j.derivative(zeta)));
  }
  for (double b : j.breakpoints()) {
    const auto iv = j.clarke_interval(b);
    a1 = std::max({a1, excess(b, iv.lo), excess(b, iv.hi)});
  }
  for (double scale = 2.0; scale <= 64.0; scale *= 2.0) {
    a1 = std::max({a1, excess(big * scale, j.derivative(big * scale)),
                   excess(-big * scale, j.derivative(-big * scale))});
  }
  c.constants = {{"a1", a1}, {"c1", c1}, {"r", r}, {"critical_exponent", critical}};
  if (r < critical) {
    c.verdict = Verdict::pass;
    c.detail = "|u| <= a1 + c1 |zeta|^(r-1) with r < 2*";
  } else {
    c.verdict = Verdict::fail;
    c.detail = "growth exponent r = " + fmt(r) + " is not below 2* = " + fmt(critical);
  }
  return c;
}

// zeta P'(zeta) - 2 P(zeta) has coefficients (i - 2) a_i.
HypothesisCheck check_coercive_tails(const PiecewisePotential& j) {
  HypothesisCheck c;
  c.id = "iv";
  const auto& pieces = j.pieces();
  const double start = std::max(1.0, max_abs_breakpoint(j));
  bool ok = true;
  std::ostringstream detail;
  for (int side : {-1, 1}) {
    const Polynomial& tail = side < 0 ? pieces.front() : pieces.back();
    const char* name = side < 0 ? "left" : "right";
    int lead_power = -1;
    double lead = 0.0;
    for (std::size_t i = tail.coeffs.size(); i-- > 0;) {
      const double t = (static_cast<double>(i) - 2.0) * tail.coeffs[i];
      if (t != 0.0) {
        lead_power = static_cast<int>(i);
        lead = t;
        break;
      }
    }
    const double sign_at_inf = lead * ((side < 0 && lead_power % 2 == 1) ? -1.0 : 1.0);
    const bool symbolic = lead_power >= 1 && sign_at_inf < 0.0;

    // Sampled sweep on |zeta| in [start, 1e3], log-spaced.
    constexpr int kSamples = 200;
    double prev = kInf, last = 0.0;
    bool decreasing_tail = true;
    for (int s = 0; s <= kSamples; ++s) {
      const double zeta = side * start * std::pow(1e3 / start, static_cast<double>(s) / kSamples);
      const auto iv = j.clarke_interval(zeta);
      const double q = std::max(iv.lo * zeta, iv.hi * zeta) - 2.0 * j.value(zeta);
      if (s >= 3 * kSamples / 4 && q > prev + 1e-9 * (1.0 + std::abs(prev))) decreasing_tail = false;
      prev = q;
      last = q;
    }
    c.constants.emplace_back(std::string(name) + "_leading", lead);
    c.constants.emplace_back(std::string(name) + "_value_at_1e3", last);
    if (!symbolic) {
      ok = false;
      c.witnesses.push_back(side * 1e3);
      detail << name << " tail: u*zeta - 2j does not diverge to -inf; ";
    } else if (!decreasing_tail || last >= 0.0) {
      ok = false;
      c.witnesses.push_back(side * 1e3);
      detail << name << " tail: sampled sweep not decreasing to negative values; ";
    }
  }
  c.verdict = ok ? Verdict::pass : Verdict::fail;
  c.detail = ok ? "u*zeta - 2j -> -inf on both affine/polynomial tails" : detail.str();
  return c;
}

}  // namespace

double subgradient_quotient_bound(const PiecewisePotential& j) {
  const auto& bps = j.breakpoints();
  const auto& pieces = j.pieces();
  for (std::size_t i = 0; i < bps.size(); ++i) {
    const double jump = pieces[i + 1].derivative(bps[i]) - pieces[i].derivative(bps[i]);
    if (jump > 1e-12 * (1.0 + std::abs(pieces[i].derivative(bps[i])))) return kInf;
  }
  double l = -kInf;
  for (std::size_t i = 0; i < pieces.size(); ++i) {
    const double lo = i == 0 ? -kInf : bps[i - 1];
    const double hi = i == bps.size() ? kInf : bps[i];
    Polynomial second = pieces[i].differentiate().differentiate();
    if (second.coeffs.empty()) second.coeffs = {0.0};
    l = std::max(l, polynomial_sup(second, lo, hi));
  }
  return l;
}

namespace {

HypothesisCheck check_quotient_bound(const PiecewisePotential& j, double gap, bool gap_known) {
  HypothesisCheck c;
  c.id = "v";
  const double l = subgradient_quotient_bound(j);
  c.constants = {{"l", l}, {"gap", gap}};
  if (!gap_known) {
    c.verdict = Verdict::untestable;
    c.detail = "lambda_{k+1} not available in the basis";
    return c;
  }
  if (std::isinf(l)) {
    c.verdict = Verdict::fail;
    const auto& bps = j.breakpoints();
    for (std::size_t i = 0; i < bps.size(); ++i) {
      const double jump = j.pieces()[i + 1].derivative(bps[i]) - j.pieces()[i].derivative(bps[i]);
      if (jump > 0.0) c.witnesses.push_back(bps[i]);
    }
    c.detail = "derivative jumps upward or curvature unbounded; difference quotients unbounded";
    return c;
  }
  if (l < gap) {
    c.verdict = Verdict::pass;
    c.detail = "l = " + fmt(l) + " < lambda_{k+1} - lambda_k = " + fmt(gap);
  } else {
    c.verdict = Verdict::fail;
    c.detail = "l = " + fmt(l) + " >= lambda_{k+1} - lambda_k = " + fmt(gap);
    // Locate where the curvature attains l.
    const auto& bps = j.breakpoints();
    for (std::size_t i = 0; i < j.pieces().size(); ++i) {
      const double lo = i == 0 ? (bps.empty() ? -1.0 : bps.front() - 1.0) : bps[i - 1];
      const double hi = i == bps.size() ? (bps.empty() ? 1.0 : bps.back() + 1.0) : bps[i];
      const double mid = 0.5 * (lo + hi);
      if (j.pieces()[i].second_derivative(mid) >= gap) {
        c.witnesses.push_back(mid);
        break;
      }
    }
  }
  return c;
}

struct QuotientRange {
  double inf = kInf;
  double sup = -kInf;
  double witness = 0.0;  // zeta of the sup
  bool bounded = true;
};

// 2 j(zeta) / zeta^2 over 0 < |zeta| <= delta.
QuotientRange near_zero_quotient(const PiecewisePotential& j, double delta) {
  QuotientRange r;
  for (int side : {-1, 1}) {
    const std::size_t idx = side > 0 ? j.piece_index(0.0) : j.piece_index(-1e-300);
    const Polynomial& p = j.pieces()[idx];
    if (p.coeff(0) != 0.0 || p.coeff(1) != 0.0) {
      r.bounded = false;
      r.witness = side * delta * 1e-6;
      return r;
    }
    const double limit = 2.0 * p.coeff(2);
    r.inf = std::min(r.inf, limit);
    if (limit > r.sup) {
      r.sup = limit;
      r.witness = side * 1e-300;
    }
    constexpr int kSamples = 400;
    for (int s = 0; s <= kSamples; ++s) {
      const double zeta = side * delta * std::pow(1e-6, 1.0 - static_cast<double>(s) / kSamples);
      const double q = 2.0 * j.value(zeta) / (zeta * zeta);
      r.inf = std::min(r.inf, q);
      if (q > r.sup) {
        r.sup = q;
        r.witness = zeta;
      }
    }
  }
  return r;
}

HypothesisCheck check_near_zero(const PiecewisePotential& j, double lower, double upper, int m) {
  HypothesisCheck c;
  c.id = "vi";
  double delta = 1.0;
  for (double b : j.breakpoints())
    if (b != 0.0) delta = std::min(delta, std::abs(b));

  QuotientRange best;
  double best_delta = delta;
  for (int attempt = 0; attempt < 40; ++attempt, delta *= 0.5) {
    const QuotientRange q = near_zero_quotient(j, delta);
    best = q;
    best_delta = delta;
    if (!q.bounded) break;
    const bool lower_ok = q.inf >= lower - 1e-12 * (1.0 + std::abs(lower));
    if (lower_ok && q.sup < upper && q.sup <= 0.0) break;
  }
  c.constants = {{"beta", best.sup},
                 {"delta0", best_delta},
                 {"m", static_cast<double>(m)},
                 {"lower", lower},
                 {"upper", upper}};
  if (!best.bounded) {
    c.verdict = Verdict::fail;
    c.detail = "2j/zeta^2 is unbounded near 0";
    c.witnesses = {best.witness};
    return c;
  }
  const bool lower_ok = best.inf >= lower - 1e-12 * (1.0 + std::abs(lower));
  if (!lower_ok) {
    c.verdict = Verdict::fail;
    c.detail = "inf 2j/zeta^2 = " + fmt(best.inf) + " < lambda_{m-1} - lambda_k = " + fmt(lower);
    c.witnesses = {best_delta};
  } else if (!(best.sup < upper) || best.sup > 0.0) {
    c.verdict = Verdict::fail;
    c.detail = "beta = sup 2j/zeta^2 = " + fmt(best.sup) +
               " is not strictly below lambda_m - lambda_k = " + fmt(upper) + " (and <= 0)";
    c.witnesses = {best.witness};
  } else {
    c.verdict = Verdict::pass;
    c.detail = "lambda_{m-1} - lambda_k <= 2j/zeta^2 <= beta = " + fmt(best.sup) +
               " < lambda_m - lambda_k on |zeta| <= " + fmt(best_delta);
  }
  return c;
}

HypothesisCheck check_infinity(const PiecewisePotential& j, double gap, bool gap_known) {
  HypothesisCheck c;
  c.id = "vii";
  const auto& pieces = j.pieces();
  double limits[2];
  bool finite = true;
  for (int s = 0; s < 2; ++s) {
    const Polynomial& tail = s == 0 ? pieces.front() : pieces.back();
    const int deg = tail.degree();
    if (deg > 2) {
      finite = false;
      const double lead = tail.coeffs[static_cast<std::size_t>(deg)];
      const double sign = lead * ((s == 0 && deg % 2 == 1) ? -1.0 : 1.0);
      limits[s] = sign > 0.0 ? kInf : -kInf;
    } else {
      limits[s] = 2.0 * tail.coeff(2);
    }
  }
  const double gamma = std::max({limits[0], limits[1], 0.0});
  c.constants = {{"gamma", gamma}, {"gap", gap}, {"limit_left", limits[0]}, {"limit_right", limits[1]}};
  if (!gap_known) {
    c.verdict = Verdict::untestable;
    c.detail = "lambda_{k+1} not available in the basis";
    return c;
  }
  if (!finite || std::min(limits[0], limits[1]) < 0.0) {
    c.verdict = Verdict::fail;
    c.detail = "2j/zeta^2 limits at infinity are not in [0, gamma]";
    c.witnesses = {limits[0] < 0.0 || std::isinf(limits[0]) ? -1e6 : 1e6};
  } else if (!(gamma < gap)) {
    c.verdict = Verdict::fail;
    c.detail = "gamma = " + fmt(gamma) + " is not below lambda_{k+1} - lambda_k = " + fmt(gap);
    c.witnesses = {limits[0] >= limits[1] ? -1e6 : 1e6};
  } else {
    c.verdict = Verdict::pass;
    c.detail = "0 <= lim 2j/zeta^2 <= gamma = " + fmt(gamma) + " < " + fmt(gap);
  }
  return c;
}

}  // namespace

bool HypothesisReport::all_pass() const {
  return std::all_of(checks.begin(), checks.end(),
                     [](const HypothesisCheck& c) { return c.verdict == Verdict::pass; });
}

const HypothesisCheck& HypothesisReport::at(const std::string& id) const {
  for (const auto& c : checks)
    if (c.id == id) return c;
  throw InvalidArgument("no hypothesis '" + id + "'");
}

const HypothesisCheck* HypothesisReport::first_failure() const {
  for (const auto& c : checks)
    if (c.verdict != Verdict::pass) return &c;
  return nullptr;
}

HypothesisReport check_hypotheses(const PiecewisePotential& j, const EigenBasis& basis, int k,
                                  int m) {
  if (m < 1 || m > k) throw InvalidArgument("check_hypotheses: need 1 <= m <= k");
  if (static_cast<std::size_t>(k) > basis.group_count())
    throw InvalidArgument("check_hypotheses: group k not in basis");
  const double lam_k = basis.group_eigenvalue(k);
  const double lam_m = basis.group_eigenvalue(m);
  const double lam_m1 = m > 1 ? basis.group_eigenvalue(m - 1) : -kInf;
  const bool gap_known = static_cast<std::size_t>(k + 1) <= basis.complete_group_count();
  const double gap = gap_known ? basis.group_eigenvalue(k + 1) - lam_k
                               : std::numeric_limits<double>::quiet_NaN();

  HypothesisReport r;
  r.checks[0] = check_zero_value(j);
  r.checks[1] = check_lipschitz(j);
  r.checks[2] = check_growth(j, basis.domain().dimension());
  r.checks[3] = check_coercive_tails(j);
  r.checks[4] = check_quotient_bound(j, gap, gap_known);
  r.checks[5] = check_near_zero(j, lam_m1 - lam_k, lam_m - lam_k, m);
  r.checks[6] = check_infinity(j, gap, gap_known);
  return r;
}

}  // namespace hvi
