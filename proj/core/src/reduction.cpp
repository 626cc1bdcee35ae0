#include "hvi/reduction.hpp"

#include "hvi/error.hpp"

#include "box_lsq.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

namespace hvi {

std::string to_string(InnerMethod m) {
  return m == InnerMethod::active_set_newton ? "active_set_newton" : "steepest_descent";
}

InnerMethod inner_method_from_string(const std::string& name) {
  if (name == "active_set_newton") return InnerMethod::active_set_newton;
  if (name == "steepest_descent") return InnerMethod::steepest_descent;
  throw InvalidArgument("unknown inner method '" + name + "'");
}

namespace {

// Inner problem in Hhat coordinates c:
//   F(c) = 1/2 sum d_n c_n^2 - sum_q w_q j(X_q),  X = Xu + U^T c.
class InnerProblem {
 public:
  InnerProblem(const EnergyContext& ctx, const SpectralVector& u) : ctx_(ctx) {
    const auto& dec = ctx.decomposition();
    d_.resize(static_cast<Eigen::Index>(dec.hhat.size()));
    for (std::size_t r = 0; r < dec.hhat.size(); ++r)
      d_(static_cast<Eigen::Index>(r)) = ctx.shifted_eigenvalues()(static_cast<Eigen::Index>(dec.hhat[r]));
    Eigen::VectorXd ub(static_cast<Eigen::Index>(dec.hbar0.size()));
    for (std::size_t r = 0; r < dec.hbar0.size(); ++r) ub(static_cast<Eigen::Index>(r)) = u[dec.hbar0[r]];
    xu_ = ctx.hbar0_values().transpose() * ub;
  }

  const Eigen::MatrixXd& U() const { return ctx_.hhat_values(); }
  const Eigen::VectorXd& w() const { return ctx_.weights(); }
  const Eigen::VectorXd& d() const { return d_; }
  const PiecewisePotential& j() const { return ctx_.potential(); }
  Eigen::Index dim() const { return d_.size(); }

  Eigen::VectorXd nodal(const Eigen::VectorXd& c) const { return xu_ + U().transpose() * c; }

  // Midpoint selection gradient.
  Eigen::VectorXd selection_gradient(const Eigen::VectorXd& c) const {
    const Eigen::VectorXd x = nodal(c);
    Eigen::VectorXd h(x.size());
    for (Eigen::Index q = 0; q < x.size(); ++q) h(q) = ctx_.node_interval(x(q)).midpoint();
    return d_.cwiseProduct(c) - U() * w().cwiseProduct(h);
  }

  struct State {
    Eigen::VectorXd x;
    Eigen::VectorXd h;      // selection (min-norm on stuck nodes)
    Eigen::VectorXd curv;   // j'' on free nodes
    std::vector<Eigen::Index> stuck;
    std::vector<SubgradientInterval> boxes;
    std::vector<std::size_t> kinks;  // breakpoint index of each stuck node
    Eigen::VectorXd g0;     // gradient with stuck nodes removed
    Eigen::VectorXd g;      // min-norm subgradient
  };

  State state(const Eigen::VectorXd& c) const {
    State s;
    s.x = nodal(c);
    const auto nq = s.x.size();
    s.h.resize(nq);
    s.curv.setZero(nq);
    Eigen::VectorXd free_h = Eigen::VectorXd::Zero(nq);
    for (Eigen::Index q = 0; q < nq; ++q) {
      const auto iv = ctx_.node_interval(s.x(q));
      if (!iv.singleton() && w()(q) > 0.0) {
        s.stuck.push_back(q);
        s.boxes.push_back(iv);
        s.kinks.push_back(j().breakpoint_near(s.x(q), ctx_.kink_radius(s.x(q))));
        s.h(q) = iv.midpoint();
      } else {
        s.h(q) = iv.midpoint();
        free_h(q) = s.h(q);
        s.curv(q) = j().curvature(s.x(q));
      }
    }
    s.g0 = d_.cwiseProduct(c) - U() * w().cwiseProduct(free_h);
    const auto ns = static_cast<Eigen::Index>(s.stuck.size());
    Eigen::MatrixXd cols(dim(), ns);
    Eigen::VectorXd hs(ns);
    for (Eigen::Index a = 0; a < ns; ++a) {
      const Eigen::Index q = s.stuck[static_cast<std::size_t>(a)];
      cols.col(a) = w()(q) * U().col(q);
      hs(a) = s.h(q);
    }
    // g0 - cols * hs, minimized over the boxes: shift to the detail form.
    Eigen::VectorXd start = s.g0 - cols * hs;
    detail::box_least_squares(start, cols, s.boxes, hs, s.g);
    for (Eigen::Index a = 0; a < ns; ++a) s.h(s.stuck[static_cast<std::size_t>(a)]) = hs(a);
    return s;
  }

  // Exact minimization of t -> F(c + t p) for t > 0. Returns 0 when p is not
  // a descent direction.
  double line_search(const Eigen::VectorXd& c, const Eigen::VectorXd& p, const Eigen::VectorXd& x) const {
    const Eigen::VectorXd P = U().transpose() * p;
    const double a0 = p.dot(d_.cwiseProduct(c));
    const double a1 = p.dot(d_.cwiseProduct(p));
    const double pmax = P.cwiseAbs().maxCoeff();
    const double ptiny = 1e-14 * pmax;
    const auto& bps = j().breakpoints();

    std::vector<double> cross;
    for (Eigen::Index q = 0; q < x.size(); ++q) {
      if (std::abs(P(q)) <= ptiny || w()(q) <= 0.0) continue;
      for (double b : bps) {
        if (std::abs(x(q) - b) <= ctx_.kink_radius(b)) continue;
        const double t = (b - x(q)) / P(q);
        if (t > 0.0) cross.push_back(t);
      }
    }
    std::sort(cross.begin(), cross.end());
    cross.erase(std::unique(cross.begin(), cross.end()), cross.end());
    const std::size_t n = cross.size();
    auto seg_lo = [&](std::size_t s) { return s == 0 ? 0.0 : cross[s - 1]; };
    auto seg_hi = [&](std::size_t s) {
      return s == n ? std::numeric_limits<double>::infinity() : cross[s];
    };
    // Piece index of every node on segment s.
    auto pieces = [&](std::size_t s) {
      const double lo = seg_lo(s);
      const double hi = seg_hi(s);
      const double tm = std::isinf(hi) ? lo + std::max(1.0, lo) : 0.5 * (lo + hi);
      std::vector<std::size_t> idx(static_cast<std::size_t>(x.size()));
      for (Eigen::Index q = 0; q < x.size(); ++q)
        idx[static_cast<std::size_t>(q)] = j().piece_index(x(q) + tm * P(q));
      return idx;
    };
    auto dphi = [&](const std::vector<std::size_t>& idx, double t, double* second) {
      double v = a0 + t * a1;
      double s2 = a1;
      for (Eigen::Index q = 0; q < x.size(); ++q) {
        if (std::abs(P(q)) <= ptiny) continue;
        const auto& poly = j().pieces()[idx[static_cast<std::size_t>(q)]];
        const double z = x(q) + t * P(q);
        v -= w()(q) * poly.derivative(z) * P(q);
        s2 -= w()(q) * poly.second_derivative(z) * P(q) * P(q);
      }
      if (second) *second = s2;
      return v;
    };

    const double scale = std::abs(a0) + a1 + 1e-300;
    {
      const auto idx0 = pieces(0);
      if (dphi(idx0, 0.0, nullptr) >= -1e-15 * scale) return 0.0;
    }
    // Smallest segment whose right-end derivative is nonnegative.
    std::size_t lo = 0, hi = n;
    while (lo < hi) {
      const std::size_t mid = (lo + hi) / 2;
      if (dphi(pieces(mid), seg_hi(mid), nullptr) >= 0.0)
        hi = mid;
      else
        lo = mid + 1;
    }
    const std::size_t s = lo;
    const auto idx = pieces(s);
    const double ta = seg_lo(s);
    if (s > 0 && dphi(idx, ta, nullptr) >= 0.0) return ta;  // minimum on a kink

    double a = ta;
    double b = seg_hi(s);
    if (std::isinf(b)) {
      b = std::max(1.0, 2.0 * ta);
      for (int it = 0; it < 200 && dphi(idx, b, nullptr) < 0.0; ++it) b *= 2.0;
    }
    // Safeguarded Newton; exact in one step for quadratic pieces.
    double t = a;
    for (int it = 0; it < 100; ++it) {
      double s2 = 0.0;
      const double f = dphi(idx, t, &s2);
      if (f == 0.0) return t;
      if (f < 0.0) a = t; else b = t;
      double next = s2 > 0.0 ? t - f / s2 : 0.5 * (a + b);
      if (!(next > a && next < b)) next = 0.5 * (a + b);
      if (std::abs(next - t) <= 1e-16 * std::max(1.0, std::abs(t))) return next;
      t = next;
    }
    return t;
  }

 private:
  const EnergyContext& ctx_;
  Eigen::VectorXd d_;
  Eigen::VectorXd xu_;
};

// Active-set Newton step for the piecewise polynomial model at the current
// point. Nodes on a kink, and nodes the step would carry across one, are
// pinned to the kink (equality constraints); a pinned node whose multiplier
// leaves the Clarke interval there is released onto the side whose one-sided
// derivative is the violated bound. Each node is pinned and released at most
// once, so the loop ends.
Eigen::VectorXd newton_direction(const InnerProblem& prob, const InnerProblem::State& s) {
  const Eigen::MatrixXd& U = prob.U();
  const auto& j = prob.j();
  const auto& bps = j.breakpoints();
  const Eigen::VectorXd& w = prob.w();
  Eigen::VectorXd wc = w.cwiseProduct(s.curv);
  Eigen::VectorXd g0 = s.g0;

  struct Pin {
    Eigen::Index q;
    std::size_t kink;
    SubgradientInterval box;
    double target;  // required nodal displacement
  };
  std::vector<Pin> pins;
  std::vector<char> touched(static_cast<std::size_t>(s.x.size()), 0);
  for (std::size_t a = 0; a < s.stuck.size(); ++a) {
    pins.push_back({s.stuck[a], s.kinks[a], s.boxes[a], 0.0});
    touched[static_cast<std::size_t>(s.stuck[a])] = 1;
  }

  for (int round = 0; round < 4 * static_cast<int>(s.x.size()) + 8; ++round) {
    Eigen::MatrixXd H = prob.d().asDiagonal();
    H.noalias() -= U * wc.asDiagonal() * U.transpose();
    Eigen::LLT<Eigen::MatrixXd> llt(H);
    if (llt.info() != Eigen::Success)
      throw SolverError("reduction", "inner Hessian is not positive definite; restricted functional is not strongly convex");
    const Eigen::VectorXd hinv_g = llt.solve(g0);
    Eigen::VectorXd p = -hinv_g;

    if (!pins.empty()) {
      const auto na = static_cast<Eigen::Index>(pins.size());
      Eigen::MatrixXd At(prob.dim(), na);
      Eigen::VectorXd r(na);
      for (Eigen::Index a = 0; a < na; ++a) {
        At.col(a) = U.col(pins[static_cast<std::size_t>(a)].q);
        r(a) = pins[static_cast<std::size_t>(a)].target;
      }
      const Eigen::MatrixXd hinv_At = llt.solve(At);
      const Eigen::MatrixXd M = At.transpose() * hinv_At;
      const Eigen::VectorXd nu = -M.completeOrthogonalDecomposition().solve(r + At.transpose() * hinv_g);
      double worst = 0.0;
      Eigen::Index worst_a = -1;
      double worst_h = 0.0;
      for (Eigen::Index a = 0; a < na; ++a) {
        const Pin& pin = pins[static_cast<std::size_t>(a)];
        const double h = -nu(a) / w(pin.q);
        const double viol = pin.box.distance(h) / (1.0 + std::abs(pin.box.lo) + std::abs(pin.box.hi));
        if (viol > worst) {
          worst = viol;
          worst_a = a;
          worst_h = h;
        }
      }
      if (worst > 1e-12 && worst_a >= 0) {
        const Pin pin = pins[static_cast<std::size_t>(worst_a)];
        pins.erase(pins.begin() + worst_a);
        touched[static_cast<std::size_t>(pin.q)] = 2;
        if (pin.kink < bps.size()) {
          const double b = bps[pin.kink];
          const double bound = pin.box.clamp(worst_h);
          const Polynomial& left = j.pieces()[pin.kink];
          const Polynomial& right = j.pieces()[pin.kink + 1];
          const Polynomial& side =
              std::abs(left.derivative(b) - bound) <= std::abs(right.derivative(b) - bound) ? left : right;
          const double xq = s.x(pin.q);
          g0 -= w(pin.q) * side.derivative(xq) * U.col(pin.q);
          wc(pin.q) = w(pin.q) * side.second_derivative(xq);
        }
        continue;
      }
      p = -(hinv_g + hinv_At * nu);
    }

    // Pin free nodes that the full step carries across a kink.
    const Eigen::VectorXd P = U.transpose() * p;
    bool pinned = false;
    for (Eigen::Index q = 0; q < s.x.size(); ++q) {
      if (touched[static_cast<std::size_t>(q)] || w(q) <= 0.0 || P(q) == 0.0) continue;
      double tbest = 1.0;
      std::size_t kbest = bps.size();
      for (std::size_t k = 0; k < bps.size(); ++k) {
        const double t = (bps[k] - s.x(q)) / P(q);
        if (t > 0.0 && t < tbest) tbest = t, kbest = k;
      }
      if (kbest == bps.size()) continue;
      const double b = bps[kbest];
      pins.push_back({q, kbest, j.clarke_interval(b), b - s.x(q)});
      touched[static_cast<std::size_t>(q)] = 1;
      g0 += w(q) * j.derivative(s.x(q)) * U.col(q);
      wc(q) = 0.0;
      pinned = true;
    }
    if (!pinned) return p;
  }
  return -s.g;
}

}  // namespace

ReductionResult reduce(const EnergyContext& ctx, const SpectralVector& u, const InnerOptions& opts,
                       const SpectralVector* warm) {
  if (!(opts.tol > 0.0)) throw InvalidArgument("inner tolerance must be positive");
  if (u.size() != ctx.n_modes()) throw InvalidArgument("reduce: vector size does not match the basis");
  if (!u.finite()) throw InvalidArgument("reduce: non-finite coefficients");
  const auto& dec = ctx.decomposition();
  InnerProblem prob(ctx, u);
  Eigen::VectorXd c = Eigen::VectorXd::Zero(prob.dim());
  if (warm) {
    if (warm->size() != ctx.n_modes()) throw InvalidArgument("reduce: warm start size mismatch");
    for (std::size_t r = 0; r < dec.hhat.size(); ++r) c(static_cast<Eigen::Index>(r)) = (*warm)[dec.hhat[r]];
  }

  ReductionResult res;
  Eigen::VectorXd lam(prob.dim());
  for (std::size_t r = 0; r < dec.hhat.size(); ++r)
    lam(static_cast<Eigen::Index>(r)) = ctx.basis().eigenvalue(dec.hhat[r]);

  InnerProblem::State s = prob.state(c);
  int it = 0;
  int stalls = 0;
  for (; it < opts.max_iter; ++it) {
    if (s.g.norm() <= opts.tol) break;
    Eigen::VectorXd p;
    double t = 0.0;
    if (opts.method == InnerMethod::active_set_newton) {
      p = newton_direction(prob, s);
      t = prob.line_search(c, p, s.x);
    }
    if (t <= 0.0) {
      p = -s.g;
      t = prob.line_search(c, p, s.x);
    }
    if (t <= 0.0) {
      if (++stalls > 2) break;
      continue;
    }
    const Eigen::VectorXd step = t * p;
    const Eigen::VectorXd c_new = c + step;
    if (opts.audit) {
      const double denom = step.dot(lam.cwiseProduct(step));
      if (std::sqrt(denom) > 1e-8) {
        const double num = (prob.selection_gradient(c_new) - prob.selection_gradient(c)).dot(step);
        const double margin = num / denom;
        if (!res.strong_convexity_margin || margin < *res.strong_convexity_margin)
          res.strong_convexity_margin = margin;
        if (margin < -1e-10) {
          std::ostringstream os;
          os << "strong-convexity audit failed: monotonicity quotient " << margin << " at inner iteration " << it;
          throw SolverError("reduction", os.str());
        }
      }
    }
    c = c_new;
    s = prob.state(c);
  }
  res.inner_residual = s.g.norm();
  res.iterations = it;
  if (!(res.inner_residual <= opts.tol)) {
    std::ostringstream os;
    os << "inner solver did not converge: residual " << res.inner_residual << " after " << it
       << " iterations (tol " << opts.tol << ")";
    throw SolverError("reduction", os.str());
  }
  res.theta = SpectralVector(ctx.n_modes());
  for (std::size_t r = 0; r < dec.hhat.size(); ++r) res.theta[dec.hhat[r]] = c(static_cast<Eigen::Index>(r));
  res.selection = s.h;
  res.energy = energy(ctx, u.restricted(dec.hbar0) + res.theta);
  return res;
}

double strong_convexity_audit(const EnergyContext& ctx, const SpectralVector& u, const SpectralVector& v1,
                              const SpectralVector& v2) {
  const auto& dec = ctx.decomposition();
  const SpectralVector base = u.restricted(dec.hbar0);
  const SpectralVector a = v1.restricted(dec.hhat);
  const SpectralVector b = v2.restricted(dec.hhat);
  const SpectralVector diff = a - b;
  const double denom = diff.h1_seminorm(ctx.basis());
  if (!(denom > 0.0)) throw InvalidArgument("strong_convexity_audit needs v1 != v2 on Hhat");
  const SpectralVector g1 = subgradient_selection(ctx, base + a).restricted(dec.hhat);
  const SpectralVector g2 = subgradient_selection(ctx, base + b).restricted(dec.hhat);
  return (g1 - g2).coeffs().dot(diff.coeffs()) / (denom * denom);
}

ReducedEval reduced_eval(const EnergyContext& ctx, const SpectralVector& u, const InnerOptions& opts,
                         const SpectralVector* warm) {
  const auto& dec = ctx.decomposition();
  ReducedEval out;
  out.reduction = reduce(ctx, u, opts, warm);
  const SpectralVector x = u.restricted(dec.hbar0) + out.reduction.theta;
  out.psi_value = -out.reduction.energy;
  out.reduced_subgradient = -subgradient_with(ctx, x, out.reduction.selection).restricted(dec.hbar0);
  return out;
}

double continuity_probe(const EnergyContext& ctx, const SpectralVector& u, double radius, int n_samples,
                        std::uint64_t seed, const InnerOptions& opts) {
  if (!(radius > 0.0)) throw InvalidArgument("continuity_probe needs radius > 0");
  const auto& dec = ctx.decomposition();
  const SpectralVector base = u.restricted(dec.hbar0);
  const ReductionResult r0 = reduce(ctx, base, opts);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  double worst = 0.0;
  for (int s = 0; s < n_samples; ++s) {
    SpectralVector dir(ctx.n_modes());
    for (std::size_t i : dec.hbar0) dir[i] = normal(rng);
    const double nrm = dir.h1_seminorm(ctx.basis());
    if (!(nrm > 0.0)) continue;
    dir *= radius / nrm;
    const ReductionResult r1 = reduce(ctx, base + dir, opts, &r0.theta);
    worst = std::max(worst, h1_distance(ctx.basis(), r1.theta, r0.theta) / radius);
  }
  return worst;
}

}  // namespace hvi
