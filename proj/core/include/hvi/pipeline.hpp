#pragma once

#include "hvi/config.hpp"
#include "hvi/multiplicity.hpp"

#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace hvi {

enum class Outcome { success, hypotheses_failed, search_incomplete, certification_failed };
std::string to_string(Outcome o);
// 0 success, 2 hypotheses failed, 3 search incomplete, 4 certification failed.
int exit_code(Outcome o);

struct SolutionRecord {
  CriticalPoint point;
  SpectralVector x;  // u + theta(u), cold inner solve
  ResidualReport residual;
  double h1_norm = 0.0;
  double full_min_norm = 0.0;     // min-norm subgradient over all modes at x
  double inner_residual = 0.0;
  double lift_bound = 0.0;        // inner tol + outer tol + 1e-8
  bool partner_certified = false;  // -x passes the residual certificate
  double partner_max_violation = 0.0;
  bool certified = false;
  std::string failure;  // empty when certified
};

struct Diagnostics {
  double l = 0.0;              // hypothesis (v) constant, inf if unbounded
  double gap = 0.0;            // lambda_{k+1} - lambda_k
  std::optional<CoercivityResult> coercivity;  // beta = l + lambda_k
  double min_strong_convexity_margin = 0.0;
  bool margin_respects_coercivity = false;
  double continuity_ratio = 0.0;
  double continuity_radius = 0.0;
};

struct StageTiming {
  std::string stage;
  double seconds = 0.0;
};

struct BasisSummary {
  std::size_t n_modes = 0;
  std::size_t dim_hbar0 = 0;
  std::size_t dim_hhat = 0;
  std::size_t n_nodes = 0;
  int last_group = 0;
  double lambda_k = 0.0;
  std::vector<double> group_eigenvalues;     // groups 1..k+1
  std::vector<std::size_t> group_multiplicities;
  std::string quadrature_rule;
};

struct PipelineResult {
  Outcome outcome = Outcome::search_incomplete;
  std::string failed_stage;
  std::string message;
  bool check_only = false;
  bool override_used = false;
  BasisSummary basis;
  std::optional<HypothesisReport> hypotheses;
  std::optional<LinkingReport> linking;
  std::optional<MinimizeReport> minimize;
  std::optional<SecondPointReport> second;
  std::vector<SolutionRecord> solutions;
  std::vector<double> distances;  // pairwise H1 distances, row-major upper triangle
  Diagnostics diagnostics;
  std::vector<StageTiming> timings;
  std::shared_ptr<const EnergyContext> context;  // absent when setup failed
};

// build_basis -> decompose -> check_hypotheses -> local_linking_check ->
// minimize_psi -> second_point_search -> lift -> residual_certificate.
// Stage failures are captured in the result rather than thrown; invalid
// configurations still throw ConfigError.
PipelineResult solve_hvi(const SolverConfig& cfg, bool check_only = false);

// Basis with every mode through group k plus n_trunc more, and the matching
// decomposition, as used by solve_hvi.
struct Discretization {
  EigenBasis basis;
  SpaceDecomposition decomposition;
  Quadrature quadrature;
};
Discretization discretize(const SolverConfig& cfg);
std::shared_ptr<const EnergyContext> make_context(const SolverConfig& cfg);

}  // namespace hvi
