#pragma once

#include "hvi/reduction.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace hvi {

enum class PointKind { global_min, linking_second, other };
std::string to_string(PointKind kind);

struct CriticalPoint {
  SpectralVector u;  // supported on Hbar_0
  double psi_value = 0.0;
  double reduced_residual = 0.0;
  PointKind kind = PointKind::other;
};

struct SearchOptions {
  double outer_tol = 1e-7;
  int multistart = 8;
  std::uint64_t seed = 0;
  double psi_floor = -1e6;
  int n_grad = 0;             // gradient samples per iterate; 0 means 2 dim(Hbar_0)
  double start_scale = 0.0;   // std-dev of start coefficients; 0 means automatic
  int max_iter = 400;         // gradient-sampling iterations per start
  double nontriviality = 1e-4;
  double distinctness = 1e-3;
  int path_segments = 32;
  int path_refinements = 2;
  double branch_tol = 1e-8;   // inf psi = 0 versus < 0
  double delta_max = 2.0;
  int linking_samples = 16;
  double objective_scale = 1.0;  // minimizes objective_scale * psi
};

struct LinkingReport {
  double delta = 0.0;
  bool y_vacuous = false;
  int evaluations = 0;
  double min_psi_y = 0.0;  // over samples at the returned delta
  double max_psi_v = 0.0;
  // Points where a sign condition failed at the smallest tested radius.
  std::vector<SpectralVector> witnesses;
  std::vector<double> witness_values;
};

// Sign conditions psi >= 0 on Y and psi <= 0 on V, sampled on spheres
// (H1 seminorm) at 1/4, 1/2, 3/4 and 1 of the candidate radius. Returns the
// largest radius in (0, delta_max] found by halving then bisection, or 0 with
// witnesses.
LinkingReport local_linking_check(const EnergyContext& ctx, double delta_max, int n_samples,
                                  std::uint64_t seed = 0, const InnerOptions& inner = {},
                                  double slack = 1e-10);

struct MinimizeReport {
  CriticalPoint best;
  std::vector<CriticalPoint> minima;  // distinct converged local minima, by psi
  double min_iterate_psi = 0.0;
  int starts = 0;
  int converged_starts = 0;
  int iterations = 0;
  int evaluations = 0;
  double min_strong_convexity_margin = 0.0;
};

// Multistart gradient sampling on Hbar_0 followed by a finite-difference
// Newton polish of the reduced gradient. Throws SolverError("minimize_psi")
// when an iterate drops below psi_floor or no start converges.
MinimizeReport minimize_psi(const EnergyContext& ctx, const SearchOptions& opts,
                            const InnerOptions& inner = {});

struct SecondPointReport {
  CriticalPoint point;
  std::string branch;     // "negative_infimum" or "zero_infimum"
  std::string method;     // "mountain_pass", "sphere_descent", "sphere_point"
  double pass_value = 0.0;  // max of psi on the optimized path (branch 1)
  int path_points = 0;
  bool degenerate_pass = false;  // path maximum stayed at the trivial point
  int attempts = 0;
};

// Second nontrivial critical point given the first (global minimizer) and the
// local linking radius. Throws SolverError("second_point") listing the
// candidates when none is both certified and distinct.
SecondPointReport second_point_search(const EnergyContext& ctx, const CriticalPoint& first, double delta,
                                      const SearchOptions& opts, const InnerOptions& inner = {});

struct PathMax {
  std::size_t index = 0;
  double value = 0.0;
};
// Largest psi along a sequence of points; ties go to the first occurrence.
PathMax path_maximum(const EnergyContext& ctx, const std::vector<SpectralVector>& path,
                     const InnerOptions& inner = {});

// Reduced residual of u: min-norm subgradient on Hbar_0 at u + theta(u),
// recomputed with a cold inner solve.
double reduced_residual(const EnergyContext& ctx, const SpectralVector& u, const InnerOptions& inner = {});

// Finite-difference Newton on the reduced gradient; returns the polished
// point (or the input when no step helped).
SpectralVector newton_polish(const EnergyContext& ctx, const SpectralVector& u, double tol,
                             const InnerOptions& inner = {}, int max_iter = 30);

}  // namespace hvi
