#include "hvi/error.hpp"
#include "hvi/potential.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace hvi;

namespace {

constexpr double kMu = 1.5;
constexpr double kSlope = 0.5;

double constant(const HypothesisCheck& c, const std::string& name) {
  for (const auto& [n, v] : c.constants)
    if (n == name) return v;
  FAIL("constant " << name << " missing from check " << c.id);
  return 0.0;
}

bool near_breakpoint(const PiecewisePotential& j, double z, double r) {
  for (double b : j.breakpoints())
    if (std::abs(z - b) < r) return true;
  return false;
}

}  // namespace

TEST_SUITE("potential") {

TEST_CASE("example potential levels") {
  const auto j = example_potential(kMu, kSlope, kSlope);
  CHECK(std::abs(j.value(1.0) - (-kMu / 2)) <= 1e-12);
  CHECK(std::abs(j.value(-1.0) - (-kMu / 2)) <= 1e-12);
  CHECK(std::abs(j.value(3.0) - (-5.0 * kMu / 2)) <= 1e-12);
  CHECK(std::abs(j.value(4.0) - (-2.0 * kMu)) <= 1e-12);
  CHECK(std::abs(j.value(4.0 + 2.0 * kMu / kSlope)) <= 1e-12);
  CHECK(j.value(0.0) == 0.0);
}

TEST_CASE("example potential Clarke intervals") {
  const auto j = example_potential(kMu, kSlope, kSlope);
  const auto at1 = j.clarke_interval(1.0);
  CHECK(std::abs(at1.lo - (-2.0 * kMu)) <= 1e-12);
  CHECK(std::abs(at1.hi - (-kMu)) <= 1e-12);
  const auto at4 = j.clarke_interval(4.0);
  CHECK(std::abs(at4.lo - kSlope) <= 1e-12);
  CHECK(std::abs(at4.hi - kMu) <= 1e-12);
  const auto at0 = j.clarke_interval(0.0);
  CHECK(at0.singleton());
  const double h = 1e-6;
  CHECK(std::abs(at0.lo - (j.value(h) - j.value(-h)) / (2 * h)) < 1e-8);
  // Mirror images for the even potential.
  const auto atm1 = j.clarke_interval(-1.0);
  CHECK(atm1.lo == doctest::Approx(-at1.hi));
  CHECK(atm1.hi == doctest::Approx(-at1.lo));
}

TEST_CASE("max potential") {
  const double xi = 1.0, c = 0.25;
  const auto j = max_potential(xi, c);
  CHECK(j.value(0.0) == 0.0);
  // Oracle: bisection on (xi/2) x^2 + c x - (xi/2) x over (0.01, 10).
  auto f = [&](double x) { return 0.5 * xi * x * x + c * x - 0.5 * xi * x; };
  double lo = 0.01, hi = 10.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (f(lo) * f(mid) <= 0 ? hi : lo) = mid;
  }
  bool found = false;
  for (double b : j.breakpoints())
    if (std::abs(b - lo) < 1e-12) found = true;
  CHECK(found);
  CHECK(lo == doctest::Approx(0.5).epsilon(1e-12));
  for (double x : {20.0, -50.0, 300.0})
    CHECK(j.value(x) == doctest::Approx(0.5 * xi * x * x + c * std::abs(x)));
  CHECK(j.value(0.2) == doctest::Approx(0.5 * xi * 0.2));
  CHECK_THROWS_AS(max_potential(0.0, 0.1), InvalidArgument);
  CHECK_THROWS_AS(max_potential(-1.0, 0.1), InvalidArgument);
}

TEST_CASE("factory") {
  CHECK(make_potential("example", {{"mu", 2.0}, {"slope_neg", 0.1}, {"slope_pos", 0.3}}).param("mu") == 2.0);
  CHECK(make_potential("zero", {}).value(3.0) == 0.0);
  CHECK(make_potential("quadratic", {{"epsilon", 0.2}}).value(2.0) == doctest::Approx(0.4));
  CHECK_THROWS_AS(make_potential("cubic", {}), InvalidArgument);
  CHECK(example_potential(kMu, kSlope, kSlope).describe().find("breakpoints=[-4,-1,1,4]") != std::string::npos);
}

TEST_CASE("continuity at every breakpoint") {
  for (const auto& j : {example_potential(kMu, kSlope, kSlope), example_potential(2.9, 0.1, 2.0),
                        max_potential(1.0, 0.25), max_potential(3.0, 0.7)}) {
    for (double d : j.continuity_defects()) CHECK(std::abs(d) < 1e-12);
    CHECK(j.value(0.0) == 0.0);
  }
}

TEST_CASE("subdifferential matches finite differences away from breakpoints") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> U(-12.0, 12.0);
  for (const auto& j : {example_potential(kMu, 0.3, 0.7), max_potential(2.0, 0.4)}) {
    for (int s = 0; s < 2000; ++s) {
      const double z = U(rng);
      if (near_breakpoint(j, z, 1e-3)) continue;
      const auto iv = j.clarke_interval(z);
      REQUIRE(iv.singleton());
      const double h = 1e-6;
      const double fd = (j.value(z + h) - j.value(z - h)) / (2 * h);
      CHECK(std::abs(iv.lo - fd) <= 1e-6 * (1.0 + std::abs(iv.lo)));
    }
  }
}

TEST_CASE("chain bound: difference quotients of subgradients stay below l") {
  const auto j = example_potential(kMu, kSlope, kSlope);
  const double l = subgradient_quotient_bound(j);
  CHECK(l == doctest::Approx(kMu));
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> U(-8.0, 8.0);
  std::vector<double> pts = {-4.0, -1.0, 1.0, 4.0};
  for (int s = 0; s < 300; ++s) pts.push_back(U(rng));
  for (double a : pts)
    for (double b : pts) {
      if (a == b) continue;
      const auto ia = j.clarke_interval(a), ib = j.clarke_interval(b);
      for (double va : {ia.lo, ia.hi})
        for (double vb : {ib.lo, ib.hi}) CHECK((va - vb) / (a - b) <= l + 1e-10);
    }
}

TEST_CASE("near-zero quotient and growth at infinity") {
  const auto j = example_potential(kMu, kSlope, kSlope);
  for (double z : {1e-6, 0.01, 0.3, 0.99, 1.0, -0.5, -1.0}) CHECK(2.0 * j.value(z) / (z * z) == doctest::Approx(-kMu).epsilon(1e-14));
  double prev = 1.0;
  for (double z : {1e2, 1e4, 1e6}) {
    const double q = std::abs(j.value(z) / (z * z));
    CHECK(q < prev);
    prev = q;
  }
  CHECK(prev < 1e-5);
}

TEST_CASE("hypotheses hold inside the parameter window") {
  const EigenBasis b = build_basis(DomainSpec::interval(kPi), 8);
  for (double mu : {0.5, 1.5, 2.9}) {
    const auto rep = check_hypotheses(example_potential(mu, 0.4 * mu, 0.4 * mu), b, 2, 2);
    CAPTURE(mu);
    for (const auto& c : rep.checks) {
      CAPTURE(c.id);
      CAPTURE(c.detail);
      CHECK(c.verdict == Verdict::pass);
    }
    CHECK(rep.all_pass());
    CHECK(constant(rep.at("v"), "l") == doctest::Approx(mu));
    CHECK(constant(rep.at("v"), "gap") == doctest::Approx(5.0));
    CHECK(constant(rep.at("vi"), "beta") == doctest::Approx(-mu));
    CHECK(constant(rep.at("vii"), "gamma") == doctest::Approx(0.0));
    CHECK(constant(rep.at("iii"), "r") < constant(rep.at("iii"), "critical_exponent"));
  }
}

TEST_CASE("window edges and failures") {
  const EigenBasis b = build_basis(DomainSpec::interval(kPi), 8);
  SUBCASE("mu = 6 violates (v) with gap 5") {
    const auto rep = check_hypotheses(example_potential(6.0, 0.5, 0.5), b, 2, 2);
    const auto& v = rep.at("v");
    CHECK(v.verdict == Verdict::fail);
    CHECK(constant(v, "l") == doctest::Approx(6.0));
    CHECK(constant(v, "gap") == doctest::Approx(5.0));
    CHECK_FALSE(rep.all_pass());
    REQUIRE(rep.first_failure() != nullptr);
  }
  SUBCASE("mu = 3.5 drops below lambda_{m-1} - lambda_k") {
    const auto rep = check_hypotheses(example_potential(3.5, 0.5, 0.5), b, 2, 2);
    CHECK(rep.at("vi").verdict == Verdict::fail);
  }
  SUBCASE("slope above mu breaks the downward kink at 4") {
    const auto rep = check_hypotheses(example_potential(1.5, 0.5, 2.0), b, 2, 2);
    CHECK(rep.at("v").verdict == Verdict::fail);
    CHECK(std::isinf(subgradient_quotient_bound(example_potential(1.5, 0.5, 2.0))));
  }
  SUBCASE("j = 0 is rejected by (vi)") {
    const auto rep = check_hypotheses(zero_potential(), b, 2, 2);
    CHECK(rep.at("vi").verdict == Verdict::fail);
    CHECK(rep.at("i").verdict == Verdict::pass);
  }
  SUBCASE("quadratic potential violates the coercive tails condition") {
    const auto rep = check_hypotheses(quadratic_potential(0.2), b, 2, 2);
    CHECK(rep.at("iv").verdict == Verdict::fail);
    CHECK_FALSE(rep.at("iv").witnesses.empty());
  }
  SUBCASE("max potential has an upward kink at 0") {
    const auto rep = check_hypotheses(max_potential(1.0, 0.25), b, 2, 2);
    CHECK(rep.at("v").verdict == Verdict::fail);
    CHECK(rep.at("vi").verdict == Verdict::fail);
  }
}

TEST_CASE("fail verdicts carry a witness or a violated constant") {
  const EigenBasis b = build_basis(DomainSpec::interval(kPi), 8);
  for (const auto& j : {example_potential(6.0, 0.5, 0.5), zero_potential(), quadratic_potential(0.2), max_potential(1.0, 0.25)}) {
    for (const auto& c : check_hypotheses(j, b, 2, 2).checks) {
      if (c.verdict != Verdict::fail) continue;
      CAPTURE(c.id);
      CHECK((!c.witnesses.empty() || !c.constants.empty()));
    }
  }
}

TEST_CASE("subgradient interval helpers") {
  SubgradientInterval iv{-2.0, 1.0};
  CHECK(iv.distance(0.0) == 0.0);
  CHECK(iv.distance(-3.0) == 1.0);
  CHECK(iv.distance(4.0) == 3.0);
  CHECK(iv.clamp(5.0) == 1.0);
  CHECK(iv.midpoint() == -0.5);
  const auto j = example_potential(kMu, kSlope, kSlope);
  const auto hull = j.clarke_hull(1.0 + 1e-12, 1e-10);
  CHECK(hull.lo == doctest::Approx(-2.0 * kMu));
  CHECK(hull.hi == doctest::Approx(-kMu));
  CHECK(j.clarke_hull(0.5, 1e-10).singleton());
}

}  // TEST_SUITE
