#pragma once

#include "hvi/potential.hpp"

#include <Eigen/Dense>

#include <vector>

namespace hvi::detail {

// Minimize |g0 - sum_a cols.col(a) (h_a - h0_a)| over h_a in [lo_a, hi_a] by
// cyclic coordinate descent. `h` holds the start on entry and the result on
// exit; `g` receives the final residual vector.
inline void box_least_squares(const Eigen::VectorXd& g0, const Eigen::MatrixXd& cols,
                              const std::vector<SubgradientInterval>& boxes, Eigen::VectorXd& h,
                              Eigen::VectorXd& g, int max_sweeps = 500) {
  g = g0;
  const Eigen::Index n = cols.cols();
  if (n == 0) return;
  const Eigen::VectorXd sq = cols.colwise().squaredNorm().transpose();
  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    double change = 0.0;
    for (Eigen::Index a = 0; a < n; ++a) {
      if (sq(a) <= 0.0) continue;
      const double old = h(a);
      const double next = boxes[static_cast<std::size_t>(a)].clamp(old + cols.col(a).dot(g) / sq(a));
      if (next != old) {
        g.noalias() -= cols.col(a) * (next - old);
        h(a) = next;
        change = std::max(change, std::abs(next - old));
      }
    }
    if (change <= 1e-15 * (1.0 + h.cwiseAbs().maxCoeff())) break;
  }
  // Coordinate descent is slow on nearly parallel columns; finish with an
  // exact least-squares solve over the coordinates strictly inside their
  // boxes, kept only if it stays feasible and does not increase the residual.
  std::vector<Eigen::Index> free;
  for (Eigen::Index a = 0; a < n; ++a) {
    const auto& b = boxes[static_cast<std::size_t>(a)];
    if (h(a) > b.lo && h(a) < b.hi && sq(a) > 0.0) free.push_back(a);
  }
  if (free.empty()) return;
  Eigen::MatrixXd cf(cols.rows(), static_cast<Eigen::Index>(free.size()));
  for (std::size_t i = 0; i < free.size(); ++i) cf.col(static_cast<Eigen::Index>(i)) = cols.col(free[i]);
  const Eigen::VectorXd delta = cf.completeOrthogonalDecomposition().solve(g);
  Eigen::VectorXd h2 = h;
  for (std::size_t i = 0; i < free.size(); ++i) {
    const Eigen::Index a = free[i];
    h2(a) += delta(static_cast<Eigen::Index>(i));
    if (boxes[static_cast<std::size_t>(a)].distance(h2(a)) > 0.0) return;
  }
  const Eigen::VectorXd g2 = g - cf * delta;
  if (g2.norm() <= g.norm()) {
    h = h2;
    g = g2;
  }
}

}  // namespace hvi::detail
