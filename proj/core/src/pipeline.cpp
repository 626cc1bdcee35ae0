#include "hvi/pipeline.hpp"

#include "hvi/error.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <sstream>

namespace hvi {

std::string to_string(Outcome o) {
  switch (o) {
    case Outcome::success: return "success";
    case Outcome::hypotheses_failed: return "hypotheses_failed";
    case Outcome::search_incomplete: return "search_incomplete";
    case Outcome::certification_failed: return "certification_failed";
  }
  return "search_incomplete";
}

int exit_code(Outcome o) {
  switch (o) {
    case Outcome::success: return 0;
    case Outcome::hypotheses_failed: return 2;
    case Outcome::search_incomplete: return 3;
    case Outcome::certification_failed: return 4;
  }
  return 3;
}

Discretization discretize(const SolverConfig& cfg) {
  cfg.validate();
  const DomainSpec& dom = cfg.domain;
  const double gtol = cfg.tol_grouping;
  std::size_t cap = std::numeric_limits<std::size_t>::max();
  if (dom.kind == DomainKind::grid1d) cap = static_cast<std::size_t>(dom.n_grid);

  // Count the modes of groups 1..k with a probe basis large enough to hold
  // group k + 1 completely.
  std::size_t probe_n = std::min<std::size_t>(cap, std::max<std::size_t>(3, 4 * static_cast<std::size_t>(cfg.k) + 8));
  std::size_t through_k = 0;
  for (;;) {
    EigenBasis probe = build_basis(dom, probe_n, gtol);
    if (probe.complete_group_count() >= static_cast<std::size_t>(cfg.k) + 1) {
      for (int g = 1; g <= cfg.k; ++g) through_k += probe.group(g).size();
      break;
    }
    if (probe_n >= cap)
      throw ConfigError("domain resolution too small: group k + 1 is not available", "solver.k");
    probe_n = std::min(cap, 2 * probe_n);
  }
  std::size_t total = through_k + cfg.n_trunc;
  if (total > cap)
    throw ConfigError("solver.n_trunc asks for " + std::to_string(total) + " modes but the grid has only " +
                          std::to_string(cap),
                      "solver.n_trunc");
  EigenBasis wide = build_basis(dom, total, gtol);
  SpaceDecomposition dec = decompose(wide, cfg.k, cfg.m, total);
  // Drop the modes of a trailing incomplete group so every kept mode takes
  // part in the reduction.
  EigenBasis basis = dec.n_modes == wide.size() ? std::move(wide) : build_basis(dom, dec.n_modes, gtol);
  dec = decompose(basis, cfg.k, cfg.m, dec.n_modes);
  Quadrature quad = Quadrature::for_basis(basis, cfg.quadrature_rule, cfg.quadrature_nodes);
  return Discretization{std::move(basis), std::move(dec), std::move(quad)};
}

std::shared_ptr<const EnergyContext> make_context(const SolverConfig& cfg) {
  Discretization d = discretize(cfg);
  return std::make_shared<const EnergyContext>(std::move(d.basis), std::move(d.decomposition), cfg.potential(),
                                               std::move(d.quadrature));
}

namespace {

class StageClock {
 public:
  explicit StageClock(std::vector<StageTiming>& out) : out_(out) {}
  void start(std::string stage) {
    stage_ = std::move(stage);
    t0_ = std::chrono::steady_clock::now();
  }
  void stop() {
    out_.push_back({stage_, std::chrono::duration<double>(std::chrono::steady_clock::now() - t0_).count()});
  }

 private:
  std::vector<StageTiming>& out_;
  std::string stage_;
  std::chrono::steady_clock::time_point t0_;
};

SolutionRecord lift(const EnergyContext& ctx, const CriticalPoint& cp, const SolverConfig& cfg) {
  const InnerOptions inner = cfg.inner_options();
  SolutionRecord s;
  s.point = cp;
  const ReductionResult r = reduce(ctx, cp.u, inner);
  s.x = cp.u.restricted(ctx.decomposition().hbar0) + r.theta;
  s.inner_residual = r.inner_residual;
  s.point.reduced_residual = min_norm_subgradient(ctx, s.x, ctx.decomposition().hbar0);
  s.residual = residual_certificate(ctx, s.x, cfg.tol_residual);
  s.full_min_norm = min_norm_subgradient(ctx, s.x, all_indices(ctx));
  s.lift_bound = cfg.tol_inner + cfg.tol_outer + 1e-8;
  s.h1_norm = s.x.h1_seminorm(ctx.basis());
  const ResidualReport partner = residual_certificate(ctx, -s.x, cfg.tol_residual);
  s.partner_certified = partner.passes();
  s.partner_max_violation = partner.max_violation;

  std::ostringstream why;
  if (!s.residual.passes()) why << "residual certificate: " << s.residual.violating_nodes << " violating nodes; ";
  if (!(s.point.reduced_residual <= cfg.tol_outer)) why << "reduced residual above outer tolerance; ";
  if (!(s.full_min_norm <= s.lift_bound)) why << "full min-norm subgradient above inner + outer tolerance; ";
  if (!(s.h1_norm > cfg.nontriviality)) why << "H1 norm below nontriviality threshold; ";
  s.failure = why.str();
  if (!s.failure.empty()) s.failure.resize(s.failure.size() - 2);
  s.certified = s.failure.empty();
  return s;
}

}  // namespace

PipelineResult solve_hvi(const SolverConfig& cfg, bool check_only) {
  cfg.validate();
  PipelineResult res;
  res.check_only = check_only;
  StageClock clock(res.timings);

  clock.start("basis");
  Discretization disc = discretize(cfg);
  {
    auto& b = res.basis;
    b.n_modes = disc.basis.size();
    b.dim_hbar0 = disc.decomposition.dim_hbar0();
    b.dim_hhat = disc.decomposition.dim_hhat();
    b.n_nodes = disc.quadrature.size();
    b.last_group = disc.decomposition.last_group;
    b.lambda_k = disc.basis.group_eigenvalue(cfg.k);
    for (int g = 1; g <= cfg.k + 1; ++g) {
      b.group_eigenvalues.push_back(disc.basis.group_eigenvalue(g));
      b.group_multiplicities.push_back(disc.basis.group(g).size());
    }
    b.quadrature_rule = to_string(disc.quadrature.rule);
  }
  const PiecewisePotential pot = cfg.potential();
  clock.stop();

  clock.start("hypotheses");
  res.hypotheses = check_hypotheses(pot, disc.basis, cfg.k, cfg.m);
  {
    const auto& v = res.hypotheses->at("v");
    for (const auto& [name, value] : v.constants) {
      if (name == "l") res.diagnostics.l = value;
      if (name == "gap") res.diagnostics.gap = value;
    }
  }
  clock.stop();
  if (!res.hypotheses->all_pass()) {
    if (!cfg.check_override || check_only) {
      const HypothesisCheck* f = res.hypotheses->first_failure();
      res.outcome = Outcome::hypotheses_failed;
      res.failed_stage = "hypotheses";
      res.message = "H(j)(" + f->id + ") " + to_string(f->verdict) + ": " + f->detail;
      return res;
    }
    res.override_used = true;
  }
  if (check_only) {
    res.outcome = Outcome::success;
    return res;
  }

  auto ctx = std::make_shared<const EnergyContext>(std::move(disc.basis), std::move(disc.decomposition), pot,
                                                   std::move(disc.quadrature));
  res.context = ctx;
  const InnerOptions inner = cfg.inner_options();
  const SearchOptions search = cfg.search_options();

  auto fail = [&](Outcome o, const std::string& stage, const std::string& msg) {
    res.outcome = o;
    res.failed_stage = stage;
    res.message = msg;
    return res;
  };

  try {
    clock.start("linking");
    res.linking = local_linking_check(*ctx, cfg.delta_max, cfg.linking_samples, cfg.seed, inner);
    clock.stop();
    if (!(res.linking->delta > 0.0))
      return fail(Outcome::search_incomplete, "linking", "local linking sign conditions fail at every tested radius");

    clock.start("minimize_psi");
    res.minimize = minimize_psi(*ctx, search, inner);
    clock.stop();

    clock.start("second_point");
    res.second = second_point_search(*ctx, res.minimize->best, res.linking->delta, search, inner);
    clock.stop();
  } catch (const SolverError& e) {
    clock.stop();
    return fail(Outcome::search_incomplete, e.stage(), e.what());
  }

  clock.start("lift");
  try {
    res.solutions.push_back(lift(*ctx, res.minimize->best, cfg));
    res.solutions.push_back(lift(*ctx, res.second->point, cfg));
  } catch (const SolverError& e) {
    clock.stop();
    return fail(Outcome::certification_failed, "lift", e.what());
  }
  for (std::size_t a = 0; a < res.solutions.size(); ++a)
    for (std::size_t b = a + 1; b < res.solutions.size(); ++b)
      res.distances.push_back(h1_distance(ctx->basis(), res.solutions[a].x, res.solutions[b].x));
  clock.stop();

  clock.start("diagnostics");
  {
    auto& d = res.diagnostics;
    d.min_strong_convexity_margin = res.minimize->min_strong_convexity_margin;
    if (std::isfinite(d.l)) {
      const double beta = d.l + ctx->lambda_k();
      d.coercivity = coercivity_constant(ctx->basis(), cfg.k, [beta](Point) { return beta; }, ctx->n_modes(),
                                         ctx->quadrature());
      d.margin_respects_coercivity = d.min_strong_convexity_margin >= d.coercivity->xi - 1e-8;
    }
    d.continuity_radius = 1e-2;
    try {
      d.continuity_ratio = continuity_probe(*ctx, res.minimize->best.u, d.continuity_radius, 8, cfg.seed, inner);
    } catch (const SolverError&) {
      d.continuity_ratio = std::numeric_limits<double>::infinity();
    }
  }
  clock.stop();

  for (std::size_t i = 0; i < res.solutions.size(); ++i) {
    if (!res.solutions[i].certified)
      return fail(Outcome::certification_failed, "certification",
                  "solution " + std::to_string(i + 1) + ": " + res.solutions[i].failure);
  }
  for (double dist : res.distances)
    if (!(dist > cfg.distinctness))
      return fail(Outcome::certification_failed, "certification", "solutions are not distinct in H1");
  res.outcome = Outcome::success;
  return res;
}

}  // namespace hvi
