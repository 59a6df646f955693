#pragma once

// Consistency weights for manifolds sampled with missing parts. A pair is
// kept when its partial-manifold geodesic cannot have been shortened by a
// path through the missing region, judged from distances to the boundary
// of the sampled region.

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <utility>
#include <vector>

#include "fmds/dissimilarity.hpp"
#include "fmds/error.hpp"
#include "fmds/linalg.hpp"
#include "fmds/solver.hpp"

namespace fmds {

class BoundarySet {
 public:
  BoundarySet() = default;
  BoundarySet(std::vector<Index> indices, Index n) : indices_(std::move(indices)) {
    std::sort(indices_.begin(), indices_.end());
    detail::require(std::adjacent_find(indices_.begin(), indices_.end()) == indices_.end(),
                    "BoundarySet: duplicate index");
    for (Index i : indices_) detail::require(i >= 0 && i < n, "BoundarySet: index out of range");
  }

  const std::vector<Index>& indices() const { return indices_; }
  bool empty() const { return indices_.empty(); }
  std::size_t size() const { return indices_.size(); }
  bool contains(Index i) const { return std::binary_search(indices_.begin(), indices_.end(), i); }

 private:
  std::vector<Index> indices_;
};

/// c_f lower-bounds the manifold metric per unit of ambient Euclidean
/// length: F(ds) >= c_f ||ds||. For drift-perturbed metrics with
/// ||alpha_tilde * drift|| <= alpha_max this is 1 - alpha_max.
struct WormholeConfig {
  double c_f = 1.0;
  bool soft = false;

  static WormholeConfig from_alpha_max(double alpha_tilde_max, bool soft = false) {
    detail::require(alpha_tilde_max >= 0.0 && alpha_tilde_max < 1.0,
                    "WormholeConfig: alpha_tilde_max must lie in [0, 1)");
    return {1.0 - alpha_tilde_max, soft};
  }
};

/// (min_b D(i, b), min_b D(b, i)). Both are +inf for an empty boundary.
inline std::pair<double, double> nearest_boundary_distance(const DissimilarityMatrix& d,
                                                           const BoundarySet& boundary, Index i) {
  detail::require(i >= 0 && i < d.size(), "nearest_boundary_distance: node out of range");
  double to = kUnreachable, from = kUnreachable;
  for (Index b : boundary.indices()) {
    to = std::min(to, d(i, b));
    from = std::min(from, d(b, i));
  }
  return {to, from};
}

/// K_ij = min over boundary pairs (b1, b2) of D(i, b1) + c_f ||x_b1 - x_b2|| + D(b2, j).
/// Computed as min_b1 [D(i, b1) + G(b1, j)] with G(b1, j) = min_b2 [c_f ||x_b1 - x_b2|| + D(b2, j)].
inline Matrix threshold_matrix(const DissimilarityMatrix& d, const BoundarySet& boundary,
                               const Matrix& points, const WormholeConfig& config) {
  const Index n = d.size();
  detail::require(points.rows() == n, "threshold_matrix: point count differs from D");
  detail::require(config.c_f >= 0.0, "threshold_matrix: c_f must be nonnegative");
  Matrix k = Matrix::Constant(n, n, kUnreachable);
  if (boundary.empty()) return k;
  for (Index b : boundary.indices()) detail::require(b < n, "threshold_matrix: boundary index out of range");

  const auto& bs = boundary.indices();
  const Index nb = static_cast<Index>(bs.size());
  Matrix exit_cost(nb, n);  // G
  for (Index p = 0; p < nb; ++p) {
    for (Index j = 0; j < n; ++j) {
      double best = kUnreachable;
      for (Index q = 0; q < nb; ++q) {
        const double hop = config.c_f * (points.row(bs[p]) - points.row(bs[q])).norm();
        best = std::min(best, hop + d(bs[q], j));
      }
      exit_cost(p, j) = best;
    }
  }
  for (Index i = 0; i < n; ++i) {
    for (Index p = 0; p < nb; ++p) {
      const double enter = d(i, bs[p]);
      if (!std::isfinite(enter)) continue;
      for (Index j = 0; j < n; ++j) k(i, j) = std::min(k(i, j), enter + exit_cost(p, j));
    }
  }
  return k;
}

namespace detail {

inline double pass_value(double dij, double kij, bool soft) {
  if (dij <= kij) return 1.0;
  if (!soft) return 0.0;
  return std::min(kij / dij, 1.0);
}

}  // namespace detail

/// Finsler wormhole weights symmetrized as w_ij = sqrt(c(i,j) c(j,i)).
/// Binary: c(i,j) = [D_ij <= K_ij]; soft: c(i,j) = min(K_ij / D_ij, 1).
inline WeightMatrix wormhole_weights(const DissimilarityMatrix& d, const BoundarySet& boundary,
                                     const Matrix& points, const WormholeConfig& config) {
  const Index n = d.size();
  const Matrix k = threshold_matrix(d, boundary, points, config);
  Matrix w = Matrix::Zero(n, n);
  for (Index i = 0; i < n; ++i) {
    for (Index j = i + 1; j < n; ++j) {
      const double v = std::sqrt(detail::pass_value(d(i, j), k(i, j), config.soft) *
                                 detail::pass_value(d(j, i), k(j, i), config.soft));
      w(i, j) = v;
      w(j, i) = v;
    }
  }
  return WeightMatrix(std::move(w));
}

/// Intrinsic criterion [D_ij <= D(i, i_B) + D(j, j_B)] with
/// D(i, i_B) = min_b D(i, b), symmetrized by the product.
inline WeightMatrix intrinsic_criterion_weights(const DissimilarityMatrix& d, const BoundarySet& boundary) {
  detail::require(!boundary.empty(), "intrinsic_criterion_weights: boundary is empty");
  const Index n = d.size();
  Vector to(n);
  for (Index i = 0; i < n; ++i) to(i) = nearest_boundary_distance(d, boundary, i).first;
  Matrix w = Matrix::Zero(n, n);
  for (Index i = 0; i < n; ++i) {
    for (Index j = i + 1; j < n; ++j) {
      const double bound = to(i) + to(j);
      const double v = (d(i, j) <= bound && d(j, i) <= bound) ? 1.0 : 0.0;
      w(i, j) = v;
      w(j, i) = v;
    }
  }
  return WeightMatrix(std::move(w));
}

/// Heuristic boundary detection, not part of the criterion itself: a point
/// is on the boundary when the directions to its k nearest neighbours,
/// projected onto the local tangent plane (top-2 PCA of the neighbourhood),
/// leave an angular gap wider than `max_gap` radians.
inline BoundarySet detect_boundary_heuristic(const Matrix& points, Index k, double max_gap = 2.0) {
  const Index n = points.rows();
  detail::require(k >= 2 && k < n, "detect_boundary_heuristic: need 2 <= k < n");
  std::vector<Index> found;
  std::vector<std::pair<double, Index>> cand;
  for (Index i = 0; i < n; ++i) {
    cand.clear();
    for (Index j = 0; j < n; ++j) {
      if (j != i) cand.emplace_back((points.row(j) - points.row(i)).squaredNorm(), j);
    }
    std::partial_sort(cand.begin(), cand.begin() + k, cand.end());
    Matrix local(k, points.cols());
    for (Index c = 0; c < k; ++c) local.row(c) = points.row(cand[c].second) - points.row(i);
    Matrix frame;
    if (points.cols() <= 2) {
      frame = Matrix::Identity(points.cols(), points.cols());
    } else {
      const Matrix cov = local.transpose() * local;
      Eigen::SelfAdjointEigenSolver<Matrix> eig(cov);
      frame = eig.eigenvectors().rightCols(2);
    }
    if (frame.cols() < 2) continue;
    std::vector<double> angles;
    for (Index c = 0; c < k; ++c) {
      const Vector p = frame.transpose() * local.row(c).transpose();
      angles.push_back(std::atan2(p(1), p(0)));
    }
    std::sort(angles.begin(), angles.end());
    double gap = angles.front() + 2.0 * std::numbers::pi - angles.back();
    for (std::size_t a = 1; a < angles.size(); ++a) gap = std::max(gap, angles[a] - angles[a - 1]);
    if (gap > max_gap) found.push_back(i);
  }
  return BoundarySet(std::move(found), n);
}

}  // namespace fmds
