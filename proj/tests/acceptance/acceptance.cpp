// One line per acceptance criterion; exits non-zero if any criterion fails.
#include "hvi/error.hpp"
#include "hvi/report.hpp"

#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>

using namespace hvi;
namespace fs = std::filesystem;

namespace {

struct Check {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      if (!detail.empty()) detail += "; ";
      detail += what;
    }
  }
};

std::string num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

const SolverConfig& default_cfg() {
  static const SolverConfig cfg = [] {
    SolverConfig c;
    c.n_trunc = 64;
    return c;
  }();
  return cfg;
}

const std::shared_ptr<const EnergyContext>& default_ctx() {
  static const auto ctx = make_context(default_cfg());
  return ctx;
}

SpectralVector random_on(const EnergyContext& ctx, const std::vector<std::size_t>& idx, double scale,
                         std::mt19937_64& rng) {
  std::normal_distribution<double> N(0.0, 1.0);
  SpectralVector v = ctx.zero();
  for (std::size_t i : idx) v[i] = scale * N(rng) / std::sqrt(ctx.basis().eigenvalue(i));
  return v;
}

double phi_direct(const EnergyContext& ctx, const Eigen::VectorXd& c) {
  double s = 0.0;
  for (Eigen::Index n = 0; n < c.size(); ++n)
    s += 0.5 * (ctx.basis().eigenvalue(static_cast<std::size_t>(n)) - ctx.lambda_k()) * c(n) * c(n);
  const Eigen::VectorXd xz = ctx.values().transpose() * c;
  for (Eigen::Index q = 0; q < xz.size(); ++q) s -= ctx.weights()(q) * ctx.potential().value(xz(q));
  return s;
}

// Minimizes phi(u + .) over the three Hhat modes by a grid scan and a
// compass refinement with all 26 neighbour directions.
Eigen::VectorXd brute_force_theta(const EnergyContext& ctx, const Eigen::VectorXd& u) {
  const auto& hhat = ctx.decomposition().hhat;
  auto f = [&](const std::array<double, 3>& t) {
    Eigen::VectorXd c = u;
    for (int a = 0; a < 3; ++a) c(static_cast<Eigen::Index>(hhat[a])) = t[a];
    return phi_direct(ctx, c);
  };
  std::array<double, 3> best{0, 0, 0};
  double fb = f(best);
  for (int i = -8; i <= 8; ++i)
    for (int j = -8; j <= 8; ++j)
      for (int k = -8; k <= 8; ++k) {
        const std::array<double, 3> t{0.05 * i, 0.04 * j, 0.03 * k};
        const double v = f(t);
        if (v < fb) fb = v, best = t;
      }
  double step = 0.02;
  while (step > 1e-10) {
    bool moved = false;
    for (int a = -1; a <= 1; ++a)
      for (int b = -1; b <= 1; ++b)
        for (int c = -1; c <= 1; ++c) {
          if (!a && !b && !c) continue;
          const std::array<double, 3> t{best[0] + step * a, best[1] + step * b, best[2] + step * c};
          const double v = f(t);
          if (v < fb) fb = v, best = t, moved = true;
        }
    if (!moved) step *= 0.5;
  }
  Eigen::VectorXd out = Eigen::VectorXd::Zero(u.size());
  for (int a = 0; a < 3; ++a) out(static_cast<Eigen::Index>(hhat[a])) = best[a];
  return out;
}

double h1_of(const EnergyContext& ctx, const Eigen::VectorXd& c) {
  return SpectralVector(c).h1_seminorm(ctx.basis());
}

Check criterion1() {
  Check v;
  const double mu = 1.5, s = 0.5;
  const auto j = example_potential(mu, s, s);
  auto close = [](double a, double b) { return std::abs(a - b) <= 1e-12; };
  v.require(close(j.value(1.0), -mu / 2), "value(1)=" + num(j.value(1.0)));
  v.require(close(j.value(3.0), -5 * mu / 2), "value(3)=" + num(j.value(3.0)));
  v.require(close(j.value(4.0), -2 * mu), "value(4)=" + num(j.value(4.0)));
  const double zc = 4 + 2 * mu / s;
  v.require(close(j.value(zc), 0.0), "value(zero crossing)=" + num(j.value(zc)));
  v.require(j.value(zc - 0.1) < 0.0 && j.value(zc + 0.1) > 0.0, "no sign change at the crossing");
  const auto c1 = j.clarke_interval(1.0), c4 = j.clarke_interval(4.0);
  v.require(close(c1.lo, -2 * mu) && close(c1.hi, -mu), "clarke(1)=[" + num(c1.lo) + "," + num(c1.hi) + "]");
  v.require(close(c4.lo, s) && close(c4.hi, mu), "clarke(4)=[" + num(c4.lo) + "," + num(c4.hi) + "]");
  return v;
}

Check criterion2() {
  Check v;
  const EigenBasis b = build_basis(DomainSpec::interval(kPi), 8);
  for (double mu : {0.5, 1.5, 2.9}) {
    for (double frac : {0.1, 0.5, 0.9}) {
      const auto rep = check_hypotheses(example_potential(mu, frac * mu, frac * mu), b, 2, 2);
      if (!rep.all_pass()) v.require(false, "mu=" + num(mu) + " fails " + rep.first_failure()->id);
    }
  }
  const auto rep = check_hypotheses(example_potential(6.0, 0.5, 0.5), b, 2, 2);
  const auto& c5 = rep.at("v");
  double gap = NAN;
  for (const auto& [n, x] : c5.constants)
    if (n == "gap") gap = x;
  v.require(c5.verdict == hvi::Verdict::fail, "mu=6 passes (v)");
  v.require(std::abs(gap - 5.0) <= 1e-12, "gap witness " + num(gap));
  return v;
}

Check criterion3() {
  Check v;
  const EigenBasis b = build_basis(DomainSpec::interval(kPi), 258);
  const Quadrature q = Quadrature::for_basis(b, QuadratureRule::gauss);
  for (double eps : {0.1, 1.0, 4.0}) {
    double first = NAN;
    for (std::size_t nt : {16u, 64u, 256u}) {
      const auto r = coercivity_constant(b, 2, [&](Point) { return 9.0 - eps; }, nt, q);
      v.require(std::abs(r.xi - eps / 9.0) <= 1e-8, "eps=" + num(eps) + " n=" + std::to_string(nt) + " xi=" + num(r.xi));
      if (std::isnan(first)) first = r.xi;
      v.require(std::abs(r.xi - first) <= 1e-8, "unstable across truncations");
    }
  }
  return v;
}

Check criterion4() {
  Check v;
  const auto& ctx = default_ctx();
  const double mu = 1.5, lk = ctx->lambda_k();
  const auto c = coercivity_constant(ctx->basis(), 2, [&](Point) { return mu + lk; },
                                     ctx->n_modes(), ctx->quadrature());
  std::mt19937_64 rng(2024);
  double lowest = INFINITY;
  const auto& dec = ctx->decomposition();
  for (int s = 0; s < 1000; ++s) {
    // Half the triples are close pairs at large amplitude, where the
    // difference straddles kinks of the potential.
    const bool close = s % 2 == 1;
    const auto u = random_on(*ctx, dec.hbar0, close ? 9.0 : 6.0, rng);
    const auto v1 = random_on(*ctx, dec.hhat, 3.0, rng);
    const auto v2 = close ? v1 + random_on(*ctx, dec.hhat, 0.05, rng) : random_on(*ctx, dec.hhat, 3.0, rng);
    lowest = std::min(lowest, strong_convexity_audit(*ctx, u, v1, v2));
  }
  v.require(c.positive, "coercivity constant not positive");
  v.require(lowest >= c.xi - 1e-8, "min margin " + num(lowest) + " < xi " + num(c.xi));
  v.detail += (v.detail.empty() ? "" : "; ") + std::string("min margin ") + num(lowest) + ", xi " + num(c.xi);
  return v;
}

Check criterion5() {
  Check v;
  const auto& ctx = default_ctx();
  const auto r0 = reduce(*ctx, ctx->zero());
  v.require(r0.theta.h1_seminorm(ctx->basis()) <= 1e-10, "theta(0) != 0");

  SolverConfig small = default_cfg();
  small.n_trunc = 3;
  const auto sctx = make_context(small);
  v.require(sctx->decomposition().dim_hhat() == 3, "Hhat is not three-dimensional");
  std::mt19937_64 rng(5);
  double worst = 0.0;
  for (int s = 0; s < 20; ++s) {
    auto u = random_on(*sctx, sctx->decomposition().hbar0, 1.0, rng);
    const double n = u.h1_seminorm(sctx->basis());
    std::uniform_real_distribution<double> R(0.0, 0.5);
    u *= R(rng) / n;
    const auto r = reduce(*sctx, u);
    worst = std::max(worst, h1_of(*sctx, r.theta.coeffs() - brute_force_theta(*sctx, u.coeffs())));
  }
  v.require(worst <= 1e-4, "oracle distance " + num(worst));

  double warm_gap = 0.0;
  for (int s = 0; s < 20; ++s) {
    const auto u = random_on(*ctx, ctx->decomposition().hbar0, 6.0, rng);
    const auto w = random_on(*ctx, ctx->decomposition().hhat, 3.0, rng);
    const auto a = reduce(*ctx, u);
    const auto b = reduce(*ctx, u, {}, &w);
    warm_gap = std::max(warm_gap, h1_distance(ctx->basis(), a.theta, b.theta));
  }
  v.require(warm_gap <= 1e-6, "cold/warm gap " + num(warm_gap));
  if (v.pass) v.detail = "oracle " + num(worst) + ", cold/warm " + num(warm_gap);
  return v;
}

Check criterion6() {
  Check v;
  const auto& ctx = default_ctx();
  const auto rep = local_linking_check(*ctx, 2.0, 16, 0, {}, 1e-10);
  v.require(rep.delta > 0.0, "delta = 0");
  v.require(rep.min_psi_y >= -1e-10, "Y sample below 0: " + num(rep.min_psi_y));
  v.require(rep.max_psi_v <= 1e-10, "V sample above 0: " + num(rep.max_psi_v));

  SolverConfig zc = default_cfg();
  zc.potential_family = "zero";
  zc.potential_params = {};
  const auto z = make_context(zc);
  const auto zrep = local_linking_check(*z, 2.0, 16, 0, {}, 1e-10);
  v.require(zrep.min_psi_y >= -1e-10, "j=0 Y side " + num(zrep.min_psi_y));
  v.require(zrep.delta == 2.0, "j=0 delta " + num(zrep.delta));
  // Quadratic identity on Y: psi(u) = 1/2 sum (lambda_k - lambda_n) u_n^2.
  std::mt19937_64 rng(6);
  for (double d : {0.25, 0.5, 1.0, 2.0}) {
    auto u = random_on(*z, z->decomposition().y, 1.0, rng);
    u *= d / u.h1_seminorm(z->basis());
    double expect = 0.0;
    for (std::size_t n : z->decomposition().y) expect += 0.5 * (z->lambda_k() - z->basis().eigenvalue(n)) * u[n] * u[n];
    const double psi = reduced_eval(*z, u).psi_value;
    v.require(psi >= -1e-10 && std::abs(psi - expect) <= 1e-10 * (1 + expect), "j=0 identity at delta " + num(d));
  }
  if (v.pass) v.detail = "delta " + num(rep.delta);
  return v;
}

struct PipelineRun {
  PipelineResult res;
  double seconds = 0.0;
};

const PipelineRun& default_run() {
  static const PipelineRun r = [] {
    const auto t0 = std::chrono::steady_clock::now();
    PipelineRun out{solve_hvi(default_cfg()), 0.0};
    out.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return out;
  }();
  return r;
}

Check criterion7() {
  Check v;
  const auto& run = default_run();
  const auto& res = run.res;
  v.require(res.outcome == Outcome::success, "outcome " + to_string(res.outcome) + " " + res.message);
  v.require(res.solutions.size() >= 2, "only " + std::to_string(res.solutions.size()) + " solutions");
  if (res.solutions.size() < 2) return v;
  const auto& ctx = *res.context;
  for (std::size_t i = 0; i < res.solutions.size(); ++i) {
    const auto& s = res.solutions[i];
    const std::string tag = "solution " + std::to_string(i + 1) + ": ";
    const double rr = reduced_residual(ctx, s.point.u);
    const double mn = min_norm_subgradient(ctx, s.x, all_indices(ctx));
    const auto cert = residual_certificate(ctx, s.x, 1e-6);
    v.require(rr <= 1e-6, tag + "reduced residual " + num(rr));
    v.require(mn <= 1e-5, tag + "min-norm " + num(mn));
    v.require(cert.max_violation <= 1e-6, tag + "max violation " + num(cert.max_violation));
    v.require(s.x.h1_seminorm(ctx.basis()) >= 1e-4, tag + "trivial");
    for (std::size_t j = i + 1; j < res.solutions.size(); ++j)
      v.require(h1_distance(ctx.basis(), s.x, res.solutions[j].x) >= 1e-3, "solutions coincide");
  }
  // Regression pins from the first certified run.
  const double psi1 = res.solutions[0].point.psi_value;
  v.require(std::abs(psi1 - (-8.36070126041)) <= 1e-6, "psi* drifted to " + num(psi1));
  v.require(std::abs(res.solutions[0].h1_norm - 9.35174) <= 1e-4, "|x1| drifted to " + num(res.solutions[0].h1_norm));
  v.require(std::abs(res.solutions[1].h1_norm - 9.35174) <= 1e-4, "|x2| drifted to " + num(res.solutions[1].h1_norm));
  if (v.pass) v.detail = "psi* " + num(psi1) + ", |x| " + num(res.solutions[0].h1_norm) + ", " + num(run.seconds) + " s";
  return v;
}

Check criterion8() {
  Check v;
  const auto& res = default_run().res;
  const auto& cfg = default_cfg();
  v.require(!res.solutions.empty(), "no solutions");
  for (const auto& s : res.solutions) {
    const double mn = min_norm_subgradient(*res.context, s.x, all_indices(*res.context));
    v.require(mn <= cfg.tol_inner + cfg.tol_outer + 1e-8, "min-norm " + num(mn));
    v.require(s.full_min_norm <= s.lift_bound, "reported bound exceeded");
  }
  return v;
}

Check criterion9() {
  Check v;
  SearchOptions so = default_cfg().search_options();
  so.multistart = 50;
  so.psi_floor = -1e6;
  try {
    const auto rep = minimize_psi(*default_ctx(), so, default_cfg().inner_options());
    v.require(rep.starts == 50, "starts " + std::to_string(rep.starts));
    v.require(rep.min_iterate_psi >= -1e6, "iterate below the floor");
    if (v.pass) v.detail = "lowest iterate psi " + num(rep.min_iterate_psi);
  } catch (const SolverError& e) {
    v.require(false, e.what());
  }
  return v;
}

Check criterion10(const fs::path& out) {
  Check v;
  SolverConfig cfg = default_cfg();
  cfg.seed = 42;
  auto read = [](const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
  };
  run(cfg, out / "det_a");
  run(cfg, out / "det_b");
  const std::string a = read(out / "det_a" / "report.txt");
  const std::string b = read(out / "det_b" / "report.txt");
  v.require(!a.empty(), "empty report");
  v.require(a == b, "reports differ");
  for (const char* f : {"solution_1.csv", "solution_2.csv"})
    v.require(read(out / "det_a" / f) == read(out / "det_b" / f), std::string(f) + " differs");
  return v;
}

}  // namespace

int main(int argc, char** argv) {
  const fs::path out = argc > 1 ? fs::path(argv[1]) : fs::temp_directory_path() / "hvi_acceptance";
  fs::create_directories(out);
  struct Entry {
    int id;
    const char* name;
    double limit;
    std::function<Check()> fn;
  };
  const std::vector<Entry> entries = {
      {1, "example potential geometry", 1.0, criterion1},
      {2, "hypothesis window", 1.0, criterion2},
      {3, "coercivity constant", 5.0, criterion3},
      {4, "strong monotonicity", 30.0, criterion4},
      {5, "reduction correctness", 60.0, criterion5},
      {6, "local linking", 30.0, criterion6},
      {7, "two certified solutions", 300.0, criterion7},
      {8, "lift consistency", 300.0, criterion8},
      {9, "bounded below", 120.0, criterion9},
      {10, "determinism", 600.0, [&] { return criterion10(out); }},
  };
  int failed = 0;
  const auto suite0 = std::chrono::steady_clock::now();
  for (const auto& e : entries) {
    const auto t0 = std::chrono::steady_clock::now();
    Check v;
    try {
      v = e.fn();
    } catch (const std::exception& ex) {
      v.require(false, std::string("exception: ") + ex.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    v.require(secs < e.limit, "runtime " + num(secs) + " s over " + num(e.limit) + " s");
    std::printf("criterion %2d %-28s %s  (%.2f s)%s%s\n", e.id, e.name, v.pass ? "PASS" : "FAIL", secs,
                v.detail.empty() ? "" : "  ", v.detail.c_str());
    std::fflush(stdout);
    failed += v.pass ? 0 : 1;
  }
  const double total = std::chrono::duration<double>(std::chrono::steady_clock::now() - suite0).count();
  std::printf("total %.2f s, %d of %zu criteria failed\n", total, failed, entries.size());
  return failed == 0 && total < 600.0 ? 0 : 1;
}
