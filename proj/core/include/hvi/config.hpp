#pragma once

#include "hvi/multiplicity.hpp"
#include "hvi/potential.hpp"
#include "hvi/reduction.hpp"
#include "hvi/spectral.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace hvi {

struct SolverConfig {
  DomainSpec domain = DomainSpec::interval(kPi);
  std::string potential_family = "example";
  NamedParams potential_params = {{"mu", 1.5}, {"slope_neg", 0.5}, {"slope_pos", 0.5}};
  int k = 2;
  int m = 2;
  std::size_t n_trunc = 64;  // modes kept past group k
  std::uint64_t seed = 0;
  QuadratureRule quadrature_rule = QuadratureRule::automatic;
  int quadrature_nodes = 0;  // per dimension, 0 = rule default
  InnerMethod inner_method = InnerMethod::active_set_newton;
  int inner_max_iter = 200;
  double tol_inner = 1e-9;
  double tol_outer = 1e-7;
  double tol_residual = 1e-6;
  double tol_grouping = 0.0;  // 0 = default for the domain kind
  double nontriviality = 1e-4;
  double distinctness = 1e-3;
  int multistart = 8;
  double psi_floor = -1e6;
  int n_grad = 0;
  double start_scale = 0.0;
  int search_max_iter = 400;
  int path_segments = 32;
  int path_refinements = 2;
  double branch_tol = 1e-8;
  double delta_max = 2.0;
  int linking_samples = 16;
  std::string output_dir = "hvi_out";
  bool check_override = false;

  void validate() const;
  InnerOptions inner_options() const;
  SearchOptions search_options() const;
  PiecewisePotential potential() const;

  bool operator==(const SolverConfig&) const = default;
};

// Default parameter list (canonical order) for a potential family.
NamedParams default_potential_params(const std::string& family);

// Flat `key = value` lines; `#` starts a comment. Unknown keys, duplicate
// keys and malformed values raise ConfigError with key and line. A config
// file must set domain.kind, solver.k and potential.family; everything else
// has a default (solver.m defaults to solver.k).
SolverConfig parse_config(const std::string& text);
SolverConfig parse_config_file(const std::filesystem::path& path);

// Every key in stable order, values with 17 significant digits; parses back
// to an equal config.
std::string config_text(const SolverConfig& cfg);

// Exact decimal form used in reports and the config echo.
std::string format_double(double v);

}  // namespace hvi
