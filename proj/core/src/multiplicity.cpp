#include "hvi/multiplicity.hpp"

#include "hvi/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <sstream>

namespace hvi {

std::string to_string(PointKind kind) {
  switch (kind) {
    case PointKind::global_min: return "global_min";
    case PointKind::linking_second: return "linking_second";
    case PointKind::other: return "other";
  }
  return "other";
}

namespace {

// psi in Hbar_0 coordinates, warm-starting each inner solve from the last.
class ReducedProblem {
 public:
  ReducedProblem(const EnergyContext& ctx, const InnerOptions& inner, double scale = 1.0)
      : ctx_(ctx), inner_(inner), scale_(scale) {}

  Eigen::Index dim() const { return static_cast<Eigen::Index>(ctx_.decomposition().hbar0.size()); }

  SpectralVector lift(const Eigen::VectorXd& y) const {
    SpectralVector u(ctx_.n_modes());
    const auto& idx = ctx_.decomposition().hbar0;
    for (std::size_t r = 0; r < idx.size(); ++r) u[idx[r]] = y(static_cast<Eigen::Index>(r));
    return u;
  }

  Eigen::VectorXd coords(const SpectralVector& u) const {
    const auto& idx = ctx_.decomposition().hbar0;
    Eigen::VectorXd y(static_cast<Eigen::Index>(idx.size()));
    for (std::size_t r = 0; r < idx.size(); ++r) y(static_cast<Eigen::Index>(r)) = u[idx[r]];
    return y;
  }

  // H1 seminorm of a coordinate vector.
  double h1(const Eigen::VectorXd& y) const {
    const auto& idx = ctx_.decomposition().hbar0;
    double s = 0.0;
    for (std::size_t r = 0; r < idx.size(); ++r)
      s += ctx_.basis().eigenvalue(idx[r]) * y(static_cast<Eigen::Index>(r)) * y(static_cast<Eigen::Index>(r));
    return std::sqrt(s);
  }

  struct Eval {
    double psi = 0.0;
    Eigen::VectorXd grad;
  };

  Eval eval(const Eigen::VectorXd& y) {
    ReducedEval r = reduced_eval(ctx_, lift(y), inner_, have_warm_ ? &warm_ : nullptr);
    warm_ = r.reduction.theta;
    have_warm_ = true;
    ++evaluations_;
    if (r.reduction.strong_convexity_margin)
      min_margin_ = std::min(min_margin_, *r.reduction.strong_convexity_margin);
    Eval e;
    e.psi = scale_ * r.psi_value;
    e.grad = scale_ * coords(r.reduced_subgradient);
    return e;
  }

  double value(const Eigen::VectorXd& y) { return eval(y).psi; }

  int evaluations() const { return evaluations_; }
  double min_margin() const { return min_margin_; }
  double scale() const { return scale_; }

 private:
  const EnergyContext& ctx_;
  InnerOptions inner_;
  double scale_;
  SpectralVector warm_;
  bool have_warm_ = false;
  int evaluations_ = 0;
  double min_margin_ = std::numeric_limits<double>::infinity();
};

// Euclidean projection onto the probability simplex.
Eigen::VectorXd project_simplex(const Eigen::VectorXd& v) {
  std::vector<double> s(v.data(), v.data() + v.size());
  std::sort(s.begin(), s.end(), std::greater<>());
  double cum = 0.0, theta = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    cum += s[i];
    const double t = (cum - 1.0) / static_cast<double>(i + 1);
    if (s[i] - t > 0.0) theta = t;
  }
  return (v.array() - theta).max(0.0).matrix();
}

// Min-norm point of the convex hull of the columns of G (accelerated
// projected gradient on the simplex).
Eigen::VectorXd min_norm_hull(const Eigen::MatrixXd& G) {
  const Eigen::Index m = G.cols();
  if (m == 1) return G.col(0);
  const Eigen::MatrixXd Q = G.transpose() * G;
  const double L = std::max(Q.diagonal().sum(), 1e-300);
  Eigen::VectorXd lam = Eigen::VectorXd::Constant(m, 1.0 / static_cast<double>(m));
  Eigen::VectorXd z = lam;
  double t = 1.0;
  for (int it = 0; it < 2000; ++it) {
    const Eigen::VectorXd next = project_simplex(z - (Q * z) / L);
    const double tn = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
    z = next + ((t - 1.0) / tn) * (next - lam);
    const double change = (next - lam).cwiseAbs().maxCoeff();
    lam = next;
    t = tn;
    if (change < 1e-14) break;
  }
  return G * lam;
}

struct DescentOutcome {
  Eigen::VectorXd y;
  double psi = 0.0;
  int iterations = 0;
};

// Gradient sampling from y0 until the sampled min-norm subgradient is small
// at a small radius, or the plain gradient is small enough to hand over to
// Newton.
DescentOutcome gradient_sampling(ReducedProblem& prob, Eigen::VectorXd y, const SearchOptions& opts,
                                 std::mt19937_64& rng, double& min_iterate) {
  const Eigen::Index d = prob.dim();
  const int n_grad = opts.n_grad > 0 ? opts.n_grad : static_cast<int>(2 * d);
  const double floor = opts.psi_floor * prob.scale();
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> unif(0.0, 1.0);

  auto guard = [&](double psi, const Eigen::VectorXd& at) {
    min_iterate = std::min(min_iterate, psi / prob.scale());
    if (psi < floor) {
      std::ostringstream os;
      os << "unbounded-descent guard fired: psi = " << psi / prob.scale() << " below floor " << opts.psi_floor
         << " at |u| = " << at.norm();
      throw SolverError("minimize_psi", os.str());
    }
  };

  auto e = prob.eval(y);
  guard(e.psi, y);
  double eps = 0.1 * std::max(1.0, y.norm());
  double step = 1.0;
  const double handover = std::max(1e-3, 10.0 * opts.outer_tol) * prob.scale();
  DescentOutcome out;
  int it = 0;
  for (; it < opts.max_iter; ++it) {
    if (e.grad.norm() <= handover) break;
    Eigen::MatrixXd G(d, n_grad + 1);
    G.col(0) = e.grad;
    for (int s = 1; s <= n_grad; ++s) {
      Eigen::VectorXd dir(d);
      for (Eigen::Index i = 0; i < d; ++i) dir(i) = normal(rng);
      dir *= eps * std::pow(unif(rng), 1.0 / static_cast<double>(d)) / std::max(dir.norm(), 1e-300);
      G.col(s) = prob.eval(y + dir).grad;
    }
    const Eigen::VectorXd gs = min_norm_hull(G);
    const double ng = gs.norm();
    if (ng <= handover) {
      if (eps <= 1e-8) break;
      eps *= 0.1;
      continue;
    }
    const Eigen::VectorXd dir = -gs / ng;
    double t = std::min(4.0 * step, 10.0 * std::max(1.0, y.norm()));
    bool accepted = false;
    ReducedProblem::Eval trial;
    for (int bt = 0; bt < 60; ++bt) {
      trial = prob.eval(y + t * dir);
      if (trial.psi <= e.psi - 1e-6 * t * ng) {
        accepted = true;
        break;
      }
      t *= 0.5;
    }
    if (!accepted) {
      eps *= 0.1;
      if (eps < 1e-12) break;
      continue;
    }
    y += t * dir;
    step = t;
    e = trial;
    guard(e.psi, y);
  }
  out.y = std::move(y);
  out.psi = e.psi;
  out.iterations = it;
  return out;
}

// Newton on the reduced gradient with a central-difference Jacobian.
Eigen::VectorXd polish(ReducedProblem& prob, Eigen::VectorXd y, double tol, int max_iter) {
  const Eigen::Index d = prob.dim();
  auto e = prob.eval(y);
  for (int it = 0; it < max_iter; ++it) {
    const double gn = e.grad.norm();
    if (gn <= 1e-3 * tol) break;
    const double h = 1e-6 * std::max(1.0, y.norm());
    Eigen::MatrixXd J(d, d);
    for (Eigen::Index i = 0; i < d; ++i) {
      Eigen::VectorXd yp = y, ym = y;
      yp(i) += h;
      ym(i) -= h;
      J.col(i) = (prob.eval(yp).grad - prob.eval(ym).grad) / (2.0 * h);
    }
    J = 0.5 * (J + J.transpose()).eval();
    Eigen::VectorXd p = J.completeOrthogonalDecomposition().solve(-e.grad);
    if (!p.allFinite()) break;
    bool accepted = false;
    double t = 1.0;
    for (int bt = 0; bt < 30; ++bt) {
      auto trial = prob.eval(y + t * p);
      if (trial.grad.norm() < (1.0 - 1e-4 * t) * gn) {
        y += t * p;
        e = trial;
        accepted = true;
        break;
      }
      t *= 0.5;
    }
    if (!accepted) break;
  }
  return y;
}

double h1_norm_u(const EnergyContext& ctx, const SpectralVector& u) { return u.h1_seminorm(ctx.basis()); }

std::mt19937_64 stream(std::uint64_t seed, std::uint64_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
  return std::mt19937_64(seq);
}

// Unit (H1) sphere directions in the span of `idx`: the coordinate axes with
// both signs, then seeded Gaussian directions.
std::vector<SpectralVector> sphere_directions(const EnergyContext& ctx, const std::vector<std::size_t>& idx,
                                              int n_samples, std::uint64_t seed) {
  std::vector<SpectralVector> dirs;
  if (idx.empty()) return dirs;
  if (idx.size() == 1) {
    const double s = 1.0 / std::sqrt(ctx.basis().eigenvalue(idx[0]));
    dirs.push_back(SpectralVector::unit(ctx.n_modes(), idx[0], s));
    dirs.push_back(SpectralVector::unit(ctx.n_modes(), idx[0], -s));
    return dirs;
  }
  for (std::size_t i : idx) {
    const double s = 1.0 / std::sqrt(ctx.basis().eigenvalue(i));
    dirs.push_back(SpectralVector::unit(ctx.n_modes(), i, s));
    dirs.push_back(SpectralVector::unit(ctx.n_modes(), i, -s));
  }
  auto rng = stream(seed, 0x51ee);
  std::normal_distribution<double> normal(0.0, 1.0);
  while (static_cast<int>(dirs.size()) < std::max(n_samples, static_cast<int>(2 * idx.size()))) {
    SpectralVector v(ctx.n_modes());
    for (std::size_t i : idx) v[i] = normal(rng);
    const double n = v.h1_seminorm(ctx.basis());
    if (n > 0.0) dirs.push_back((1.0 / n) * v);
  }
  return dirs;
}

}  // namespace

double reduced_residual(const EnergyContext& ctx, const SpectralVector& u, const InnerOptions& inner) {
  const auto& dec = ctx.decomposition();
  const SpectralVector base = u.restricted(dec.hbar0);
  const ReductionResult r = reduce(ctx, base, inner);
  return min_norm_subgradient(ctx, base + r.theta, dec.hbar0);
}

SpectralVector newton_polish(const EnergyContext& ctx, const SpectralVector& u, double tol,
                             const InnerOptions& inner, int max_iter) {
  ReducedProblem prob(ctx, inner);
  return prob.lift(polish(prob, prob.coords(u), tol, max_iter));
}

LinkingReport local_linking_check(const EnergyContext& ctx, double delta_max, int n_samples, std::uint64_t seed,
                                  const InnerOptions& inner, double slack) {
  if (!(delta_max > 0.0)) throw InvalidArgument("local_linking_check needs delta_max > 0");
  const auto& dec = ctx.decomposition();
  LinkingReport rep;
  rep.y_vacuous = dec.y.empty();
  const auto ydirs = sphere_directions(ctx, dec.y, n_samples, seed);
  const auto vdirs = sphere_directions(ctx, dec.v, n_samples, seed + 1);
  constexpr double kShells[] = {0.25, 0.5, 0.75, 1.0};

  struct Probe {
    bool ok = true;
    double min_y = std::numeric_limits<double>::infinity();
    double max_v = -std::numeric_limits<double>::infinity();
    std::vector<SpectralVector> bad;
    std::vector<double> bad_values;
  };
  auto probe = [&](double delta) {
    Probe p;
    for (double f : kShells) {
      for (const auto& d : ydirs) {
        const SpectralVector u = (f * delta) * d;
        const double psi = reduced_eval(ctx, u, inner).psi_value;
        ++rep.evaluations;
        p.min_y = std::min(p.min_y, psi);
        if (psi < -slack) {
          p.ok = false;
          p.bad.push_back(u);
          p.bad_values.push_back(psi);
        }
      }
      for (const auto& d : vdirs) {
        const SpectralVector u = (f * delta) * d;
        const double psi = reduced_eval(ctx, u, inner).psi_value;
        ++rep.evaluations;
        p.max_v = std::max(p.max_v, psi);
        if (psi > slack) {
          p.ok = false;
          p.bad.push_back(u);
          p.bad_values.push_back(psi);
        }
      }
    }
    return p;
  };

  double good = 0.0;
  Probe good_probe;
  double bad = delta_max;
  Probe first = probe(delta_max);
  if (first.ok) {
    good = delta_max;
    good_probe = first;
  } else {
    Probe last_bad = first;
    double d = delta_max;
    for (int i = 0; i < 40; ++i) {
      d *= 0.5;
      Probe p = probe(d);
      if (p.ok) {
        good = d;
        good_probe = p;
        break;
      }
      bad = d;
      last_bad = std::move(p);
    }
    if (good == 0.0) {
      rep.delta = 0.0;
      rep.witnesses = std::move(last_bad.bad);
      rep.witness_values = std::move(last_bad.bad_values);
      rep.min_psi_y = last_bad.min_y;
      rep.max_psi_v = last_bad.max_v;
      return rep;
    }
    for (int i = 0; i < 20; ++i) {
      const double mid = 0.5 * (good + bad);
      Probe p = probe(mid);
      if (p.ok) {
        good = mid;
        good_probe = std::move(p);
      } else {
        bad = mid;
      }
    }
  }
  rep.delta = good;
  rep.min_psi_y = rep.y_vacuous ? 0.0 : good_probe.min_y;
  rep.max_psi_v = good_probe.max_v;
  return rep;
}

MinimizeReport minimize_psi(const EnergyContext& ctx, const SearchOptions& opts, const InnerOptions& inner) {
  const auto& dec = ctx.decomposition();
  if (dec.hbar0.empty()) throw InvalidArgument("minimize_psi needs dim Hbar_0 >= 1");
  if (!(opts.objective_scale > 0.0)) throw InvalidArgument("objective_scale must be positive");
  if (opts.multistart < 1) throw InvalidArgument("multistart must be at least 1");
  ReducedProblem prob(ctx, inner, opts.objective_scale);
  double scale = opts.start_scale;
  if (!(scale > 0.0)) {
    double bmax = 1.0;
    for (double b : ctx.potential().breakpoints()) bmax = std::max(bmax, std::abs(b));
    scale = bmax * std::sqrt(ctx.basis().domain().measure() / 2.0);
  }

  MinimizeReport rep;
  rep.min_iterate_psi = 0.0;
  std::vector<CriticalPoint> pool;
  for (int s = 0; s < opts.multistart; ++s) {
    auto rng = stream(opts.seed, static_cast<std::uint64_t>(s));
    std::normal_distribution<double> normal(0.0, scale);
    Eigen::VectorXd y0(prob.dim());
    for (Eigen::Index i = 0; i < y0.size(); ++i) y0(i) = normal(rng);
    ++rep.starts;
    DescentOutcome d = gradient_sampling(prob, y0, opts, rng, rep.min_iterate_psi);
    rep.iterations += d.iterations;
    Eigen::VectorXd y = polish(prob, d.y, opts.outer_tol * opts.objective_scale, 30);
    const double psi_polished = prob.value(y) / opts.objective_scale;
    rep.min_iterate_psi = std::min(rep.min_iterate_psi, psi_polished);
    if (psi_polished * opts.objective_scale < opts.psi_floor * opts.objective_scale)
      throw SolverError("minimize_psi", "unbounded-descent guard fired after polish");
    CriticalPoint cp;
    cp.u = prob.lift(y);
    cp.psi_value = psi_polished;
    cp.reduced_residual = reduced_residual(ctx, cp.u, inner);
    cp.kind = PointKind::other;
    if (!(cp.reduced_residual <= opts.outer_tol)) continue;
    ++rep.converged_starts;
    bool dup = false;
    for (auto& p : pool) {
      if (h1_distance(ctx.basis(), p.u, cp.u) <= opts.distinctness) {
        dup = true;
        if (cp.psi_value < p.psi_value) p = cp;
        break;
      }
    }
    if (!dup) pool.push_back(cp);
  }
  rep.evaluations = prob.evaluations();
  rep.min_strong_convexity_margin = prob.min_margin();
  if (pool.empty()) {
    std::ostringstream os;
    os << "no start reached reduced residual <= " << opts.outer_tol << " (" << rep.starts << " starts)";
    throw SolverError("minimize_psi", os.str());
  }
  // Stable order: psi, then first coordinate as a tie breaker.
  std::stable_sort(pool.begin(), pool.end(), [](const CriticalPoint& a, const CriticalPoint& b) {
    if (a.psi_value != b.psi_value) return a.psi_value < b.psi_value;
    return a.u.coeffs().sum() < b.u.coeffs().sum();
  });
  pool.front().kind = PointKind::global_min;
  rep.best = pool.front();
  rep.minima = std::move(pool);
  return rep;
}

PathMax path_maximum(const EnergyContext& ctx, const std::vector<SpectralVector>& path, const InnerOptions& inner) {
  PathMax pm;
  pm.value = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < path.size(); ++i) {
    const double v = reduced_eval(ctx, path[i], inner).psi_value;
    if (v > pm.value) {
      pm.value = v;
      pm.index = i;
    }
  }
  return pm;
}

namespace {

// String method between fixed endpoints: gradient steps on interior points,
// equal arc-length reparametrization, then local refinement around the max.
struct PassOutcome {
  Eigen::VectorXd top;
  double top_value = 0.0;
  std::size_t top_index = 0;
  std::size_t n_points = 0;
};

std::vector<Eigen::VectorXd> reparametrize(const std::vector<Eigen::VectorXd>& pts, std::size_t n) {
  std::vector<double> s(pts.size(), 0.0);
  for (std::size_t i = 1; i < pts.size(); ++i) s[i] = s[i - 1] + (pts[i] - pts[i - 1]).norm();
  std::vector<Eigen::VectorXd> out;
  out.reserve(n);
  const double total = s.back();
  std::size_t seg = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double target = total * static_cast<double>(i) / static_cast<double>(n - 1);
    while (seg + 2 < pts.size() && s[seg + 1] < target) ++seg;
    const double len = s[seg + 1] - s[seg];
    const double a = len > 0.0 ? std::clamp((target - s[seg]) / len, 0.0, 1.0) : 0.0;
    out.push_back((1.0 - a) * pts[seg] + a * pts[seg + 1]);
  }
  out.front() = pts.front();
  out.back() = pts.back();
  return out;
}

PassOutcome mountain_pass(ReducedProblem& prob, const Eigen::VectorXd& a, const Eigen::VectorXd& b,
                          const SearchOptions& opts) {
  const std::size_t n = static_cast<std::size_t>(std::max(2, opts.path_segments)) + 1;
  std::vector<Eigen::VectorXd> pts(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) / static_cast<double>(n - 1);
    pts[i] = (1.0 - t) * a + t * b;
  }
  const double len = (b - a).norm();
  double prev_max = std::numeric_limits<double>::infinity();
  std::vector<double> vals(n);
  for (int iter = 0; iter < 200; ++iter) {
    std::vector<Eigen::VectorXd> grads(n);
    double gmax = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      auto e = prob.eval(pts[i]);
      vals[i] = e.psi;
      grads[i] = e.grad;
      if (i > 0 && i + 1 < n) gmax = std::max(gmax, e.grad.norm());
    }
    const double mx = *std::max_element(vals.begin(), vals.end());
    if (std::abs(prev_max - mx) <= 1e-10 * (1.0 + std::abs(mx)) || gmax == 0.0) break;
    prev_max = mx;
    const double h = 0.5 * len / static_cast<double>(n - 1) / gmax;
    for (std::size_t i = 1; i + 1 < n; ++i) pts[i] -= h * grads[i];
    pts = reparametrize(pts, n);
  }
  for (int r = 0; r < opts.path_refinements; ++r) {
    std::size_t im = 0;
    vals.resize(pts.size());
    for (std::size_t i = 0; i < pts.size(); ++i) {
      vals[i] = prob.value(pts[i]);
      if (vals[i] > vals[im]) im = i;
    }
    const std::size_t lo = im > 0 ? im - 1 : 0;
    const std::size_t hi = std::min(im + 1, pts.size() - 1);
    std::vector<Eigen::VectorXd> refined;
    for (std::size_t i = 0; i < pts.size(); ++i) {
      refined.push_back(pts[i]);
      if (i >= lo && i < hi) {
        for (int k = 1; k < 4; ++k) refined.push_back(pts[i] + (static_cast<double>(k) / 4.0) * (pts[i + 1] - pts[i]));
      }
    }
    pts = std::move(refined);
  }
  PassOutcome out;
  out.n_points = pts.size();
  out.top_value = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const double v = prob.value(pts[i]);
    if (v > out.top_value) {
      out.top_value = v;
      out.top_index = i;
      out.top = pts[i];
    }
  }
  return out;
}

}  // namespace

SecondPointReport second_point_search(const EnergyContext& ctx, const CriticalPoint& first, double delta,
                                      const SearchOptions& opts, const InnerOptions& inner) {
  if (!(delta > 0.0)) throw InvalidArgument("second_point_search needs a positive linking radius");
  const auto& dec = ctx.decomposition();
  ReducedProblem prob(ctx, inner);
  SecondPointReport rep;
  std::vector<std::string> rejected;

  auto accept = [&](const SpectralVector& u, double psi, const char* method) -> bool {
    ++rep.attempts;
    const double res = reduced_residual(ctx, u, inner);
    const double norm = h1_norm_u(ctx, u);
    const double dist = h1_distance(ctx.basis(), u, first.u);
    std::ostringstream os;
    os << method << ": psi=" << psi << " residual=" << res << " |u|=" << norm << " dist_first=" << dist;
    if (res <= opts.outer_tol && norm > opts.nontriviality && dist > opts.distinctness) {
      rep.point.u = u;
      rep.point.psi_value = psi;
      rep.point.reduced_residual = res;
      rep.point.kind = PointKind::linking_second;
      rep.method = method;
      return true;
    }
    rejected.push_back(os.str());
    return false;
  };

  // V directions for the sphere-based strategies, the first one opposite to
  // the V component of the first point.
  std::vector<SpectralVector> vdirs;
  {
    SpectralVector pv = first.u.restricted(dec.v);
    const double n = pv.h1_seminorm(ctx.basis());
    if (n > 0.0) vdirs.push_back((-1.0 / n) * pv);
    for (auto& d : sphere_directions(ctx, dec.v, opts.linking_samples, opts.seed + 7)) vdirs.push_back(d);
  }

  if (first.psi_value < -opts.branch_tol) {
    rep.branch = "negative_infimum";
    const Eigen::VectorXd a = Eigen::VectorXd::Zero(prob.dim());
    const Eigen::VectorXd b = prob.coords(first.u);
    PassOutcome pass = mountain_pass(prob, a, b, opts);
    rep.pass_value = pass.top_value;
    rep.path_points = static_cast<int>(pass.n_points);
    rep.degenerate_pass = pass.top_index == 0 || prob.h1(pass.top) <= opts.nontriviality;
    if (!rep.degenerate_pass) {
      Eigen::VectorXd y = polish(prob, pass.top, opts.outer_tol, 30);
      if (accept(prob.lift(y), prob.value(y), "mountain_pass")) return rep;
    }
    // Degenerate pass: descend from V-sphere points inside the linking ball.
    for (const auto& d : vdirs) {
      const Eigen::VectorXd y0 = prob.coords((0.5 * delta) * d);
      auto rng = stream(opts.seed, 0xd00d + static_cast<std::uint64_t>(rep.attempts));
      double min_it = 0.0;
      DescentOutcome out = gradient_sampling(prob, y0, opts, rng, min_it);
      Eigen::VectorXd y = polish(prob, out.y, opts.outer_tol, 30);
      if (accept(prob.lift(y), prob.value(y), "sphere_descent")) return rep;
      if (rep.attempts >= 2 * static_cast<int>(vdirs.size()) + 4) break;
    }
  } else {
    rep.branch = "zero_infimum";
    for (const auto& d : vdirs) {
      const SpectralVector u = (0.5 * delta) * d;
      if (accept(u, prob.value(prob.coords(u)), "sphere_point")) return rep;
    }
  }
  std::ostringstream os;
  os << "no certified second critical point distinct from the first (psi=" << first.psi_value << ")";
  for (const auto& r : rejected) os << "; " << r;
  throw SolverError("second_point", os.str());
}

}  // namespace hvi
