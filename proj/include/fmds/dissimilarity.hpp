#pragma once

// Asymmetric geodesic dissimilarities: directed weighted graphs, the
// drift-weighted kNN graph over a sampled Randers manifold, and all-pairs
// Dijkstra.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <queue>
#include <string>
#include <utility>
#include <vector>

#include "fmds/error.hpp"
#include "fmds/linalg.hpp"

namespace fmds {

inline constexpr double kUnreachable = std::numeric_limits<double>::infinity();

struct Edge {
  Index source = 0;
  Index target = 0;
  double weight = 0.0;
};

/// Directed graph with nonnegative finite weights and no self loops.
/// Parallel edges are allowed; shortest paths use the lightest.
class DirectedWeightedGraph {
 public:
  DirectedWeightedGraph() = default;
  explicit DirectedWeightedGraph(Index n) : out_(static_cast<std::size_t>(n)) {
    detail::require(n >= 0, "DirectedWeightedGraph: negative node count");
  }

  void add_edge(Index source, Index target, double weight) {
    detail::require(source >= 0 && source < size() && target >= 0 && target < size(),
                    "DirectedWeightedGraph: node index out of range");
    detail::require(source != target, "DirectedWeightedGraph: self loops are not allowed");
    detail::require(std::isfinite(weight) && weight >= 0.0,
                    "DirectedWeightedGraph: weights must be finite and nonnegative");
    edges_.push_back({source, target, weight});
    out_[static_cast<std::size_t>(source)].push_back({target, weight});
  }

  Index size() const { return static_cast<Index>(out_.size()); }
  const std::vector<Edge>& edges() const { return edges_; }
  const std::vector<std::pair<Index, double>>& out(Index node) const {
    return out_[static_cast<std::size_t>(node)];
  }

  bool has_edge(Index source, Index target) const {
    for (const auto& [t, w] : out(source)) {
      if (t == target) return true;
    }
    return false;
  }

  /// Lightest weight among source->target edges, or +inf.
  double edge_weight(Index source, Index target) const {
    double best = kUnreachable;
    for (const auto& [t, w] : out(source)) {
      if (t == target) best = std::min(best, w);
    }
    return best;
  }

 private:
  std::vector<Edge> edges_;
  std::vector<std::vector<std::pair<Index, double>>> out_;
};

/// Square matrix of nonnegative dissimilarities with zero diagonal.
/// Entries may be +inf (unreachable); NaN is rejected. Dᵀ ≠ D in general.
class DissimilarityMatrix {
 public:
  DissimilarityMatrix() = default;
  explicit DissimilarityMatrix(Matrix d) : d_(std::move(d)) {
    detail::require(d_.rows() == d_.cols(), "DissimilarityMatrix: matrix must be square");
    for (Index i = 0; i < d_.rows(); ++i) {
      detail::require(d_(i, i) == 0.0, "DissimilarityMatrix: diagonal must be zero");
      for (Index j = 0; j < d_.cols(); ++j) {
        detail::require(!std::isnan(d_(i, j)) && d_(i, j) >= 0.0,
                        "DissimilarityMatrix: entries must be nonnegative");
      }
    }
  }

  Index size() const { return d_.rows(); }
  double operator()(Index i, Index j) const { return d_(i, j); }
  const Matrix& matrix() const { return d_; }
  bool is_finite() const { return d_.allFinite(); }

  bool is_symmetric(double tol = 0.0) const {
    for (Index i = 0; i < size(); ++i) {
      for (Index j = i + 1; j < size(); ++j) {
        const double a = d_(i, j), b = d_(j, i);
        if (a == b) continue;
        if (!(std::abs(a - b) <= tol)) return false;
      }
    }
    return true;
  }

  /// (D + Dᵀ) / 2.
  Matrix symmetrized() const { return 0.5 * (d_ + d_.transpose()); }

 private:
  Matrix d_;
};

/// Samples with an ambient drift direction per point: the manifold metric
/// at x_i is ||u|| + alpha_tilde * drift_i^T u.
class PointCloudWithField {
 public:
  PointCloudWithField() = default;
  PointCloudWithField(Matrix points, Matrix drift, double alpha_tilde)
      : points_(std::move(points)), drift_(std::move(drift)), alpha_tilde_(alpha_tilde) {
    detail::require(points_.rows() == drift_.rows() && points_.cols() == drift_.cols(),
                    "PointCloudWithField: points and drift shapes differ");
    detail::require(points_.allFinite() && drift_.allFinite(),
                    "PointCloudWithField: non-finite coordinates");
    detail::require(alpha_tilde_ >= 0.0 && alpha_tilde_ < 1.0,
                    "PointCloudWithField: alpha_tilde must lie in [0, 1)");
    for (Index i = 0; i < drift_.rows(); ++i) {
      detail::require(drift_.row(i).norm() <= 1.0 + 1e-12,
                      "PointCloudWithField: drift norm exceeds 1");
    }
  }

  Index size() const { return points_.rows(); }
  Index ambient_dim() const { return points_.cols(); }
  const Matrix& points() const { return points_; }
  const Matrix& drift() const { return drift_; }
  double alpha_tilde() const { return alpha_tilde_; }

 private:
  Matrix points_;
  Matrix drift_;
  double alpha_tilde_ = 0.0;
};

/// Symmetric kNN adjacency (union of the per-point k nearest under the
/// ambient Euclidean distance, ties to lower index) with first-order Randers
/// weights w(i->j) = ||x_j - x_i|| + alpha_tilde * drift_i^T (x_j - x_i).
inline DirectedWeightedGraph build_knn_digraph(const PointCloudWithField& cloud, Index k) {
  const Index n = cloud.size();
  detail::require(k >= 1, "build_knn_digraph: k must be at least 1");
  detail::require(k < n, "build_knn_digraph: k must be smaller than the number of points");
  const Matrix& x = cloud.points();

  std::vector<std::vector<char>> adjacent(static_cast<std::size_t>(n),
                                          std::vector<char>(static_cast<std::size_t>(n), 0));
  std::vector<std::pair<double, Index>> candidates;
  candidates.reserve(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) {
    candidates.clear();
    for (Index j = 0; j < n; ++j) {
      if (j != i) candidates.emplace_back((x.row(j) - x.row(i)).squaredNorm(), j);
    }
    std::partial_sort(candidates.begin(), candidates.begin() + k, candidates.end());
    for (Index c = 0; c < k; ++c) {
      const Index j = candidates[static_cast<std::size_t>(c)].second;
      adjacent[i][j] = 1;
      adjacent[j][i] = 1;
    }
  }

  DirectedWeightedGraph graph(n);
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < n; ++j) {
      if (!adjacent[i][j]) continue;
      const auto step = (x.row(j) - x.row(i)).eval();
      const double w = step.norm() + cloud.alpha_tilde() * step.dot(cloud.drift().row(i));
      graph.add_edge(i, j, std::max(w, 0.0));
    }
  }
  return graph;
}

/// Shortest directed-path distances from `source`; unreachable nodes get +inf.
/// Binary heap keyed on (distance, node) so equal distances settle in index order.
inline std::vector<double> dijkstra_single_source(const DirectedWeightedGraph& graph, Index source) {
  detail::require(source >= 0 && source < graph.size(), "dijkstra_single_source: bad source");
  std::vector<double> dist(static_cast<std::size_t>(graph.size()), kUnreachable);
  using Item = std::pair<double, Index>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
  dist[static_cast<std::size_t>(source)] = 0.0;
  heap.emplace(0.0, source);
  while (!heap.empty()) {
    const auto [d, u] = heap.top();
    heap.pop();
    if (d > dist[static_cast<std::size_t>(u)]) continue;
    for (const auto& [v, w] : graph.out(u)) {
      const double candidate = d + w;
      if (candidate < dist[static_cast<std::size_t>(v)]) {
        dist[static_cast<std::size_t>(v)] = candidate;
        heap.emplace(candidate, v);
      }
    }
  }
  return dist;
}

/// Row i holds the distances from node i.
inline DissimilarityMatrix all_pairs_distances(const DirectedWeightedGraph& graph) {
  const Index n = graph.size();
  Matrix d(n, n);
  for (Index i = 0; i < n; ++i) {
    const auto row = dijkstra_single_source(graph, i);
    for (Index j = 0; j < n; ++j) d(i, j) = row[static_cast<std::size_t>(j)];
  }
  return DissimilarityMatrix(std::move(d));
}

/// Complete binary tree of the given depth in heap order (root 0, children
/// 2i+1 and 2i+2) with parent->child weight `down`, child->parent weight
/// `up`, and edges in both directions between every pair of nodes sharing a
/// depth, weight `lateral`. A non-positive `lateral` omits those edges.
inline DirectedWeightedGraph make_tree_graph(int depth, double down, double up, double lateral) {
  detail::require(depth >= 1 && depth <= 24, "make_tree_graph: depth must be in [1, 24]");
  detail::require(down > 0.0 && up > 0.0, "make_tree_graph: weights must be positive");
  const Index n = (Index{1} << (depth + 1)) - 1;
  DirectedWeightedGraph graph(n);
  for (Index child = 1; child < n; ++child) {
    const Index parent = (child - 1) / 2;
    graph.add_edge(parent, child, down);
    graph.add_edge(child, parent, up);
  }
  if (lateral > 0.0) {
    for (int level = 1; level <= depth; ++level) {
      const Index first = (Index{1} << level) - 1;
      const Index last = (Index{1} << (level + 1)) - 1;
      for (Index a = first; a < last; ++a) {
        for (Index b = first; b < last; ++b) {
          if (a != b) graph.add_edge(a, b, lateral);
        }
      }
    }
  }
  return graph;
}

inline int tree_node_depth(Index node) {
  int depth = 0;
  while (((Index{1} << (depth + 1)) - 1) <= node) ++depth;
  return depth;
}

inline DissimilarityMatrix tree_dissimilarity(int depth, double down, double up, double lateral) {
  return all_pairs_distances(make_tree_graph(depth, down, up, lateral));
}

}  // namespace fmds
