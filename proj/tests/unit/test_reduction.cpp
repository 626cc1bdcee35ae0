#include "fixtures.hpp"

#include "hvi/error.hpp"
#include "hvi/reduction.hpp"

#include <doctest.h>

#include <array>
#include <cmath>
#include <random>

using namespace hvi;
using namespace hvi::test;

namespace {

// phi from nodal values, written independently of the library.
double phi_direct(const EnergyContext& ctx, const Eigen::VectorXd& c) {
  double s = 0.0;
  for (Eigen::Index n = 0; n < c.size(); ++n)
    s += 0.5 * (ctx.basis().eigenvalue(static_cast<std::size_t>(n)) - ctx.lambda_k()) * c(n) * c(n);
  const Eigen::VectorXd xz = ctx.values().transpose() * c;
  for (Eigen::Index q = 0; q < xz.size(); ++q) s -= ctx.weights()(q) * ctx.potential().value(xz(q));
  return s;
}

// Grid scan followed by a compass search over all 26 neighbour directions.
Eigen::VectorXd brute_force_theta(const EnergyContext& ctx, const Eigen::VectorXd& u) {
  const auto& hhat = ctx.decomposition().hhat;
  REQUIRE(hhat.size() == 3);
  auto f = [&](const std::array<double, 3>& t) {
    Eigen::VectorXd c = u;
    for (int a = 0; a < 3; ++a) c(static_cast<Eigen::Index>(hhat[a])) = t[a];
    return phi_direct(ctx, c);
  };
  std::array<double, 3> best{0, 0, 0};
  double fb = f(best);
  for (int i = -10; i <= 10; ++i)
    for (int j = -10; j <= 10; ++j)
      for (int k = -10; k <= 10; ++k) {
        const std::array<double, 3> t{0.2 * i, 0.15 * j, 0.1 * k};
        const double v = f(t);
        if (v < fb) fb = v, best = t;
      }
  double step = 0.1;
  while (step > 1e-9) {
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

double psi_of(const EnergyContext& ctx, const SpectralVector& u) { return reduced_eval(ctx, u).psi_value; }

}  // namespace

TEST_SUITE("reduction") {

TEST_CASE("trivial reductions") {
  const auto ctx = example_ctx();
  const auto r0 = reduce(*ctx, ctx->zero());
  CHECK(r0.theta.l2_norm() == 0.0);
  CHECK(r0.energy == 0.0);
  CHECK(psi_of(*ctx, ctx->zero()) == 0.0);

  const auto z = zero_ctx();
  std::mt19937_64 rng(1);
  for (int s = 0; s < 5; ++s) {
    const auto u = random_on(*z, z->decomposition().hbar0, 4.0, rng);
    CHECK(reduce(*z, u).theta.l2_norm() < 1e-14);
  }
}

TEST_CASE("reduction matches a brute-force minimizer on a three-mode complement") {
  const auto ctx = example_ctx(3);
  REQUIRE(ctx->decomposition().dim_hhat() == 3);
  const auto& h0 = ctx->decomposition().hbar0;
  for (const auto& uc : std::vector<std::array<double, 2>>{{0.0, 2.0}, {1.0, -3.0}, {-2.5, 0.5}, {0.0, -4.67}, {3.0, 3.0}}) {
    SpectralVector u = ctx->zero();
    u[h0[0]] = uc[0];
    u[h0[1]] = uc[1];
    const auto r = reduce(*ctx, u);
    const Eigen::VectorXd oracle = brute_force_theta(*ctx, u.coeffs());
    CAPTURE(uc[0]);
    CAPTURE(uc[1]);
    CHECK((r.theta.coeffs() - oracle).lpNorm<Eigen::Infinity>() < 1e-4);
    CHECK(phi_direct(*ctx, (u + r.theta).coeffs()) <= phi_direct(*ctx, u.coeffs() + oracle) + 1e-10);
    CHECK(r.energy == doctest::Approx(phi_direct(*ctx, (u + r.theta).coeffs())).epsilon(1e-12));
  }
}

TEST_CASE("theta minimizes along random directions of the complement") {
  const auto ctx = example_ctx();
  const auto& hhat = ctx->decomposition().hhat;
  std::mt19937_64 rng(2);
  for (int s = 0; s < 8; ++s) {
    const auto u = random_on(*ctx, ctx->decomposition().hbar0, 6.0, rng);
    const auto r = reduce(*ctx, u);
    CHECK(r.inner_residual <= 1e-9);
    const double e0 = energy(*ctx, u + r.theta);
    for (int d = 0; d < 10; ++d) {
      const auto dir = random_on(*ctx, hhat, 1.0, rng);
      for (double t : {1e-4, 1e-2, 1.0}) {
        CHECK(energy(*ctx, u + r.theta + t * dir) >= e0 - 1e-12);
        CHECK(energy(*ctx, u + r.theta - t * dir) >= e0 - 1e-12);
      }
    }
  }
}

TEST_CASE("supports and uniqueness under warm starts") {
  const auto ctx = example_ctx();
  const auto& dec = ctx->decomposition();
  std::mt19937_64 rng(3);
  for (int s = 0; s < 6; ++s) {
    const auto u = random_on(*ctx, dec.hbar0, 6.0, rng);
    const auto cold = reduce(*ctx, u);
    for (std::size_t i : dec.hbar0) CHECK(cold.theta[i] == 0.0);
    const auto warm_start = random_on(*ctx, dec.hhat, 3.0, rng);
    const auto warm = reduce(*ctx, u, {}, &warm_start);
    CHECK(h1_distance(ctx->basis(), cold.theta, warm.theta) < 1e-7);
    // Components of u outside Hbar_0 are ignored.
    const auto noisy = reduce(*ctx, u + random_on(*ctx, dec.hhat, 2.0, rng));
    CHECK(h1_distance(ctx->basis(), cold.theta, noisy.theta) < 1e-7);
    const auto ev = reduced_eval(*ctx, u);
    for (std::size_t i : dec.hhat) CHECK(ev.reduced_subgradient[i] == 0.0);
  }
}

TEST_CASE("strong convexity audit") {
  SUBCASE("diagonal quotient without potential") {
    const auto z = zero_ctx();
    std::mt19937_64 rng(4);
    for (int s = 0; s < 10; ++s) {
      const auto v1 = random_on(*z, z->decomposition().hhat, 1.0, rng);
      const auto v2 = random_on(*z, z->decomposition().hhat, 1.0, rng);
      double num = 0.0, den = 0.0;
      for (std::size_t n : z->decomposition().hhat) {
        const double w = v1[n] - v2[n];
        num += (z->basis().eigenvalue(n) - 4.0) * w * w;
        den += z->basis().eigenvalue(n) * w * w;
      }
      CHECK(strong_convexity_audit(*z, z->zero(), v1, v2) == doctest::Approx(num / den).epsilon(1e-12));
    }
  }
  SUBCASE("bounded below by the coercivity margin") {
    const auto ctx = example_ctx();
    const double bound = 1.0 - (1.5 + 4.0) / 9.0;
    std::mt19937_64 rng(5);
    double lowest = INFINITY;
    for (int s = 0; s < 200; ++s) {
      const auto u = random_on(*ctx, ctx->decomposition().hbar0, 6.0, rng);
      const auto v1 = random_on(*ctx, ctx->decomposition().hhat, 2.0, rng);
      const auto v2 = random_on(*ctx, ctx->decomposition().hhat, 2.0, rng);
      lowest = std::min(lowest, strong_convexity_audit(*ctx, u, v1, v2));
    }
    CHECK(lowest >= bound - 1e-10);
    const auto r = reduce(*ctx, SpectralVector::unit(ctx->n_modes(), 1, 4.0));
    if (r.strong_convexity_margin) CHECK(*r.strong_convexity_margin >= bound - 1e-10);
  }
}

TEST_CASE("reduced functional without potential") {
  const auto z = zero_ctx();
  std::mt19937_64 rng(6);
  for (int s = 0; s < 5; ++s) {
    const auto u = random_on(*z, z->decomposition().hbar0, 4.0, rng);
    double expect = 0.0;
    for (std::size_t n : z->decomposition().hbar0) expect -= 0.5 * (z->basis().eigenvalue(n) - 4.0) * u[n] * u[n];
    CHECK(psi_of(*z, u) == doctest::Approx(expect).epsilon(1e-12));
  }
}

TEST_CASE("reduced subgradient and the envelope inequality") {
  const auto ctx = example_ctx();
  const auto& dec = ctx->decomposition();
  std::mt19937_64 rng(7);
  int smooth = 0;
  for (int s = 0; s < 30; ++s) {
    const auto u = random_on(*ctx, dec.hbar0, 6.0, rng);
    const auto ev = reduced_eval(*ctx, u);
    const auto u2 = random_on(*ctx, dec.hbar0, 6.0, rng);
    // psi(u2) = -min phi(u2 + .) >= -phi(u2 + theta(u)).
    CHECK(psi_of(*ctx, u2) >= -energy(*ctx, u2 + ev.reduction.theta) - 1e-12);
    if (smooth >= 8) continue;
    const Eigen::VectorXd xz = ctx->nodal(u + ev.reduction.theta);
    bool near = false;
    for (Eigen::Index q = 0; q < xz.size(); ++q)
      for (double b : ctx->potential().breakpoints()) near = near || std::abs(xz(q) - b) < 1e-3;
    if (near) continue;
    const auto d = random_on(*ctx, dec.hbar0, 1.0, rng);
    const double t = 1e-6;
    const double fd = (psi_of(*ctx, u + t * d) - psi_of(*ctx, u - t * d)) / (2 * t);
    CHECK(fd == doctest::Approx(dot(ev.reduced_subgradient, d)).epsilon(1e-5).scale(1.0));
    ++smooth;
  }
  CHECK(smooth >= 3);
}

TEST_CASE("continuity probe") {
  SUBCASE("theta vanishes without potential") {
    const auto z = zero_ctx();
    CHECK(continuity_probe(*z, SpectralVector::unit(z->n_modes(), 1, 2.0), 0.1, 8, 1) == 0.0);
  }
  SUBCASE("quadratic potential keeps theta at zero") {
    const auto q = quadratic_ctx(0.2);
    const double ratio = continuity_probe(*q, SpectralVector::unit(q->n_modes(), 0, 1.0), 0.1, 8, 1);
    CHECK(ratio >= 0.0);
    CHECK(ratio <= 0.2 / (5.0 - 0.2));
  }
  SUBCASE("Lipschitz bound for the example potential") {
    const auto ctx = example_ctx();
    // |j''| <= mu, monotonicity 1 - (mu + lambda_k)/lambda_{k+1}, and the L2
    // pairing costs 1/sqrt(lambda_1 lambda_{k+1}).
    const double alpha = 1.0 - 5.5 / 9.0;
    const double bound = 1.5 / (alpha * std::sqrt(1.0 * 9.0));
    for (double a : {0.5, 2.0, 4.67}) {
      const double ratio = continuity_probe(*ctx, SpectralVector::unit(ctx->n_modes(), 1, a), 1e-2, 8, 3);
      CHECK(ratio >= 0.0);
      CHECK(ratio <= bound);
    }
  }
}

TEST_CASE("steepest descent agrees with the active-set method") {
  const auto ctx = example_ctx();
  InnerOptions sd;
  sd.method = InnerMethod::steepest_descent;
  sd.max_iter = 20000;
  sd.tol = 1e-9;
  std::mt19937_64 rng(8);
  for (int s = 0; s < 3; ++s) {
    const auto u = random_on(*ctx, ctx->decomposition().hbar0, 5.0, rng);
    const auto a = reduce(*ctx, u);
    const auto b = reduce(*ctx, u, sd);
    CHECK(h1_distance(ctx->basis(), a.theta, b.theta) < 1e-6);
    CHECK(a.energy == doctest::Approx(b.energy).epsilon(1e-10));
  }
}

TEST_CASE("method names and failures") {
  CHECK(inner_method_from_string(to_string(InnerMethod::active_set_newton)) == InnerMethod::active_set_newton);
  CHECK(inner_method_from_string(to_string(InnerMethod::steepest_descent)) == InnerMethod::steepest_descent);
  CHECK_THROWS(inner_method_from_string("bfgs"));
  const auto ctx = example_ctx();
  InnerOptions starved;
  starved.method = InnerMethod::steepest_descent;
  starved.max_iter = 1;
  starved.tol = 1e-14;
  try {
    reduce(*ctx, SpectralVector::unit(ctx->n_modes(), 1, 4.5), starved);
    FAIL("expected a SolverError");
  } catch (const SolverError& e) {
    CHECK(e.stage() == "reduction");
  }
}

}  // TEST_SUITE
