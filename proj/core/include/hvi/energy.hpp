#pragma once

#include "hvi/potential.hpp"
#include "hvi/spectral.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <span>
#include <vector>

namespace hvi {

// Everything needed to evaluate phi(x) = 1/2 |grad x|^2 - lambda_k/2 |x|^2 -
// int j(x) in spectral coordinates. The gradient bilinear form is diag(lambda_n).
// Basis values at the quadrature nodes are cached.
class EnergyContext {
 public:
  EnergyContext(EigenBasis basis, SpaceDecomposition decomposition, PiecewisePotential potential,
                Quadrature quadrature, double kink_tol = 1e-10);

  const EigenBasis& basis() const { return basis_; }
  const SpaceDecomposition& decomposition() const { return dec_; }
  const PiecewisePotential& potential() const { return potential_; }
  const Quadrature& quadrature() const { return quad_; }
  double lambda_k() const { return lambda_k_; }
  std::size_t n_modes() const { return basis_.size(); }
  std::size_t n_nodes() const { return quad_.size(); }

  // u_n(z_q), modes x nodes.
  const Eigen::MatrixXd& values() const { return values_; }
  const Eigen::VectorXd& weights() const { return weights_; }
  // lambda_n - lambda_k.
  const Eigen::VectorXd& shifted_eigenvalues() const { return shifted_; }
  // Row blocks of values() for the Hhat and Hbar_0 index sets.
  const Eigen::MatrixXd& hhat_values() const { return hhat_values_; }
  const Eigen::MatrixXd& hbar0_values() const { return hbar0_values_; }

  Eigen::VectorXd nodal(const SpectralVector& x) const;
  // Nodes closer than this to a breakpoint b count as sitting on the kink.
  double kink_radius(double zeta) const { return kink_tol_ * (1.0 + std::abs(zeta)); }
  double kink_tolerance() const { return kink_tol_; }
  SubgradientInterval node_interval(double zeta) const {
    return potential_.clarke_hull(zeta, kink_radius(zeta));
  }
  SpectralVector zero() const { return SpectralVector(n_modes()); }

 private:
  EigenBasis basis_;
  SpaceDecomposition dec_;
  PiecewisePotential potential_;
  Quadrature quad_;
  double kink_tol_;
  double lambda_k_;
  Eigen::MatrixXd values_;
  Eigen::VectorXd weights_;
  Eigen::VectorXd shifted_;
  Eigen::MatrixXd hhat_values_;
  Eigen::MatrixXd hbar0_values_;
};

double energy(const EnergyContext& ctx, const SpectralVector& x);

// Components (lambda_n - lambda_k) c_n - int h u_n with h the a.e. derivative
// of j at x(z); nodes on a kink use the midpoint of the Clarke interval.
SpectralVector subgradient_selection(const EnergyContext& ctx, const SpectralVector& x);

// Subgradient with an explicit nodal selection h.
SpectralVector subgradient_with(const EnergyContext& ctx, const SpectralVector& x,
                                const Eigen::VectorXd& h);

struct MinNormSelection {
  double norm = 0.0;
  Eigen::VectorXd h;         // nodal selection from the Clarke intervals
  SpectralVector subgradient;  // full (unrestricted) subgradient for h
  std::vector<std::size_t> kink_nodes;
};

// Smallest Euclidean norm of the restricted components over all nodal
// selections h(z) in the Clarke interval at x(z). Only nodes on a kink have a
// choice; their values solve a box-constrained least squares problem by
// cyclic coordinate descent started from the midpoint (the first sweep is the
// one-pass clipping estimate).
MinNormSelection min_norm_selection(const EnergyContext& ctx, const SpectralVector& x,
                                    std::span<const std::size_t> restriction);
double min_norm_subgradient(const EnergyContext& ctx, const SpectralVector& x,
                            std::span<const std::size_t> restriction);

// All mode indices of the context (restriction helper).
std::vector<std::size_t> all_indices(const EnergyContext& ctx);

struct ResidualReport {
  double max_violation = 0.0;           // max_z dist(r(z), dj(x(z)))
  double max_relative_violation = 0.0;  // max_z dist / (1 + |r(z)|)
  double violating_fraction = 0.0;      // weighted measure fraction
  std::size_t violating_nodes = 0;
  std::vector<double> distances;
  double tol = 0.0;
  std::size_t n_nodes = 0;

  bool passes() const { return violating_nodes == 0; }
};

// r(z) = sum (lambda_n - lambda_k) c_n u_n(z) at the quadrature nodes against
// the Clarke interval of j at x(z). A node violates when its distance exceeds
// tol * (1 + |r(z)|).
ResidualReport residual_certificate(const EnergyContext& ctx, const SpectralVector& x, double tol);

}  // namespace hvi
