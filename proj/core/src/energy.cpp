#include "hvi/energy.hpp"

#include "hvi/error.hpp"

#include "box_lsq.hpp"

#include <algorithm>
#include <cmath>

namespace hvi {

EnergyContext::EnergyContext(EigenBasis basis, SpaceDecomposition decomposition,
                             PiecewisePotential potential, Quadrature quadrature, double kink_tol)
    : basis_(std::move(basis)),
      dec_(std::move(decomposition)),
      potential_(std::move(potential)),
      quad_(std::move(quadrature)),
      kink_tol_(kink_tol) {
  if (dec_.n_modes > basis_.size())
    throw InvalidArgument("decomposition refers to more modes than the basis holds");
  lambda_k_ = basis_.group_eigenvalue(dec_.k);
  values_ = basis_values(basis_, quad_.nodes);
  weights_ = Eigen::Map<const Eigen::VectorXd>(quad_.weights.data(),
                                               static_cast<Eigen::Index>(quad_.weights.size()));
  shifted_ = basis_.eigenvalues().array() - lambda_k_;
  auto rows = [&](const std::vector<std::size_t>& idx) {
    Eigen::MatrixXd out(static_cast<Eigen::Index>(idx.size()), values_.cols());
    for (std::size_t r = 0; r < idx.size(); ++r)
      out.row(static_cast<Eigen::Index>(r)) = values_.row(static_cast<Eigen::Index>(idx[r]));
    return out;
  };
  hhat_values_ = rows(dec_.hhat);
  hbar0_values_ = rows(dec_.hbar0);
}

Eigen::VectorXd EnergyContext::nodal(const SpectralVector& x) const {
  return values_.transpose() * x.coeffs();
}

double energy(const EnergyContext& ctx, const SpectralVector& x) {
  const Eigen::VectorXd& c = x.coeffs();
  double quad = 0.0;
  for (Eigen::Index n = 0; n < c.size(); ++n) quad += ctx.shifted_eigenvalues()(n) * c(n) * c(n);
  const Eigen::VectorXd xv = ctx.nodal(x);
  double pot = 0.0;
  for (Eigen::Index q = 0; q < xv.size(); ++q) pot += ctx.weights()(q) * ctx.potential().value(xv(q));
  return 0.5 * quad - pot;
}

SpectralVector subgradient_with(const EnergyContext& ctx, const SpectralVector& x,
                                const Eigen::VectorXd& h) {
  Eigen::VectorXd g = ctx.shifted_eigenvalues().cwiseProduct(x.coeffs());
  g.noalias() -= ctx.values() * ctx.weights().cwiseProduct(h);
  return SpectralVector(std::move(g));
}

SpectralVector subgradient_selection(const EnergyContext& ctx, const SpectralVector& x) {
  const Eigen::VectorXd xv = ctx.nodal(x);
  Eigen::VectorXd h(xv.size());
  for (Eigen::Index q = 0; q < xv.size(); ++q) h(q) = ctx.node_interval(xv(q)).midpoint();
  return subgradient_with(ctx, x, h);
}

std::vector<std::size_t> all_indices(const EnergyContext& ctx) {
  std::vector<std::size_t> idx(ctx.n_modes());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  return idx;
}

MinNormSelection min_norm_selection(const EnergyContext& ctx, const SpectralVector& x,
                                    std::span<const std::size_t> restriction) {
  const Eigen::VectorXd xv = ctx.nodal(x);
  const auto nq = xv.size();
  MinNormSelection out;
  out.h.resize(nq);
  std::vector<SubgradientInterval> intervals(static_cast<std::size_t>(nq));
  for (Eigen::Index q = 0; q < nq; ++q) {
    const auto iv = ctx.node_interval(xv(q));
    intervals[static_cast<std::size_t>(q)] = iv;
    out.h(q) = iv.midpoint();
    if (!iv.singleton() && ctx.weights()(q) > 0.0) out.kink_nodes.push_back(static_cast<std::size_t>(q));
  }

  Eigen::VectorXd mask = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(ctx.n_modes()));
  for (std::size_t i : restriction) mask(static_cast<Eigen::Index>(i)) = 1.0;

  SpectralVector full = subgradient_with(ctx, x, out.h);
  if (!out.kink_nodes.empty()) {
    const auto nk = static_cast<Eigen::Index>(out.kink_nodes.size());
    Eigen::MatrixXd cols(static_cast<Eigen::Index>(ctx.n_modes()), nk);
    Eigen::VectorXd hk(nk);
    std::vector<SubgradientInterval> boxes;
    for (Eigen::Index a = 0; a < nk; ++a) {
      const auto q = static_cast<Eigen::Index>(out.kink_nodes[static_cast<std::size_t>(a)]);
      cols.col(a) = (ctx.weights()(q) * ctx.values().col(q)).cwiseProduct(mask);
      hk(a) = out.h(q);
      boxes.push_back(intervals[static_cast<std::size_t>(q)]);
    }
    Eigen::VectorXd g;
    detail::box_least_squares(full.coeffs().cwiseProduct(mask), cols, boxes, hk, g);
    for (Eigen::Index a = 0; a < nk; ++a)
      out.h(static_cast<Eigen::Index>(out.kink_nodes[static_cast<std::size_t>(a)])) = hk(a);
    full = subgradient_with(ctx, x, out.h);
  }
  out.norm = full.coeffs().cwiseProduct(mask).norm();
  out.subgradient = std::move(full);
  return out;
}

double min_norm_subgradient(const EnergyContext& ctx, const SpectralVector& x,
                            std::span<const std::size_t> restriction) {
  return min_norm_selection(ctx, x, restriction).norm;
}

ResidualReport residual_certificate(const EnergyContext& ctx, const SpectralVector& x, double tol) {
  if (!(tol > 0.0)) throw InvalidArgument("residual_certificate needs tol > 0");
  const Eigen::VectorXd xv = ctx.nodal(x);
  const Eigen::VectorXd r =
      ctx.values().transpose() * ctx.shifted_eigenvalues().cwiseProduct(x.coeffs());
  ResidualReport rep;
  rep.tol = tol;
  rep.n_nodes = static_cast<std::size_t>(xv.size());
  rep.distances.resize(rep.n_nodes);
  double violating_weight = 0.0;
  double total_weight = 0.0;
  for (Eigen::Index q = 0; q < xv.size(); ++q) {
    const double d = ctx.node_interval(xv(q)).distance(r(q));
    rep.distances[static_cast<std::size_t>(q)] = d;
    rep.max_violation = std::max(rep.max_violation, d);
    rep.max_relative_violation = std::max(rep.max_relative_violation, d / (1.0 + std::abs(r(q))));
    total_weight += ctx.weights()(q);
    if (d > tol * (1.0 + std::abs(r(q)))) {
      ++rep.violating_nodes;
      violating_weight += ctx.weights()(q);
    }
  }
  rep.violating_fraction = total_weight > 0.0 ? violating_weight / total_weight : 0.0;
  return rep;
}

}  // namespace hvi
