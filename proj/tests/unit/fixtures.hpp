#pragma once

#include "hvi/pipeline.hpp"

#include <memory>
#include <random>
#include <string>

namespace hvi::test {

inline SolverConfig interval_config(const std::string& family, NamedParams params, std::size_t n_trunc,
                                    int k = 2, int m = 2) {
  SolverConfig cfg;
  cfg.potential_family = family;
  cfg.potential_params = std::move(params);
  cfg.n_trunc = n_trunc;
  cfg.k = k;
  cfg.m = m;
  return cfg;
}

inline std::shared_ptr<const EnergyContext> example_ctx(std::size_t n_trunc = 14, double mu = 1.5) {
  return make_context(interval_config("example", {{"mu", mu}, {"slope_neg", 0.5}, {"slope_pos", 0.5}}, n_trunc));
}

inline std::shared_ptr<const EnergyContext> zero_ctx(std::size_t n_trunc = 14) {
  return make_context(interval_config("zero", {}, n_trunc));
}

inline std::shared_ptr<const EnergyContext> quadratic_ctx(double eps, std::size_t n_trunc = 14) {
  return make_context(interval_config("quadratic", {{"epsilon", eps}}, n_trunc));
}

// Random vector supported on `idx` with coefficients ~ N(0, scale^2 / lambda_n).
inline SpectralVector random_on(const EnergyContext& ctx, const std::vector<std::size_t>& idx, double scale,
                                std::mt19937_64& rng) {
  std::normal_distribution<double> N(0.0, 1.0);
  SpectralVector v = ctx.zero();
  for (std::size_t i : idx) v[i] = scale * N(rng) / std::sqrt(ctx.basis().eigenvalue(i));
  return v;
}

inline double dot(const SpectralVector& a, const SpectralVector& b) { return a.coeffs().dot(b.coeffs()); }

}  // namespace hvi::test
