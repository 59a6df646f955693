#pragma once

// Embedding evaluation: inverse-distance distortion, mean average precision
// over out-neighbours, the Fermi-Dirac edge decoder, ROC AUC, and link
// prediction (edge existence and edge direction) on a held-out split.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <numeric>
#include <utility>
#include <vector>

#include "fmds/dissimilarity.hpp"
#include "fmds/error.hpp"
#include "fmds/geometry.hpp"
#include "fmds/linalg.hpp"
#include "fmds/random.hpp"
#include "fmds/solver.hpp"

namespace fmds {

/// Stress with w_ij = 1/D_ij over ordered pairs, divided by N(N-1)/2.
/// Pass RandersSpace::euclidean(m) for the Euclidean variant. Infinite
/// dissimilarities get weight zero.
inline double normalized_distortion(const Embedding& x, const DissimilarityMatrix& d, const RandersSpace& space) {
  const Index n = d.size();
  detail::require(x.rows() == n && x.cols() == space.dim(), "normalized_distortion: shape mismatch");
  detail::require(n >= 2, "normalized_distortion: need at least 2 points");
  double total = 0.0;
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < n; ++j) {
      if (i == j) continue;
      const double dij = d(i, j);
      detail::require(dij > 0.0, "normalized_distortion: off-diagonal dissimilarities must be positive");
      if (!std::isfinite(dij)) continue;
      const double r = canonical_distance(space, x.row(i), x.row(j)) - dij;
      total += r * r / dij;
    }
  }
  return total / (0.5 * static_cast<double>(n) * static_cast<double>(n - 1));
}

/// Mean over nodes with at least one out-neighbour of the average precision
/// of retrieving those out-neighbours when all other nodes are ranked by
/// ascending d(x_i, x_j), ties broken by node index.
inline double map_score(const Embedding& x, const DirectedWeightedGraph& graph, const RandersSpace& space) {
  const Index n = graph.size();
  detail::require(x.rows() == n && x.cols() == space.dim(), "map_score: graph and embedding sizes differ");
  std::vector<char> relevant(static_cast<std::size_t>(n));
  std::vector<std::pair<double, Index>> ranked;
  double total = 0.0;
  Index counted = 0;
  for (Index i = 0; i < n; ++i) {
    std::fill(relevant.begin(), relevant.end(), 0);
    Index positives = 0;
    for (const auto& [j, w] : graph.out(i)) {
      if (!relevant[j]) ++positives;
      relevant[j] = 1;
    }
    if (positives == 0) continue;
    ranked.clear();
    for (Index j = 0; j < n; ++j) {
      if (j != i) ranked.emplace_back(canonical_distance(space, x.row(i), x.row(j)), j);
    }
    std::sort(ranked.begin(), ranked.end());
    double ap = 0.0;
    Index hits = 0;
    for (std::size_t r = 0; r < ranked.size(); ++r) {
      if (!relevant[ranked[r].second]) continue;
      ++hits;
      ap += static_cast<double>(hits) / static_cast<double>(r + 1);
    }
    total += ap / static_cast<double>(positives);
    ++counted;
  }
  detail::require(counted > 0, "map_score: no node has an out-neighbour");
  return total / static_cast<double>(counted);
}

struct FermiDiracParams {
  double r = 2.0;
  double t = 1.0;

  void validate() const {
    detail::require(r > 0.0 && t > 0.0, "FermiDiracParams: r and t must be positive");
  }
};

/// 1 / (1 + exp((d² - r) / t)), evaluated without overflow.
inline double fermi_dirac(double distance, const FermiDiracParams& params) {
  params.validate();
  const double z = (distance * distance - params.r) / params.t;
  if (z >= 0.0) {
    const double e = std::exp(-z);
    return e / (1.0 + e);
  }
  return 1.0 / (1.0 + std::exp(z));
}

/// Edge (i -> j) probability from the embedded distance d(x_i, x_j).
inline double fermi_dirac_score(const Embedding& x, Index i, Index j, const RandersSpace& space,
                                const FermiDiracParams& params) {
  detail::require(i >= 0 && i < x.rows() && j >= 0 && j < x.rows(), "fermi_dirac_score: node out of range");
  return fermi_dirac(canonical_distance(space, x.row(i), x.row(j)), params);
}

struct ScoredLabel {
  double score = 0.0;
  bool positive = false;
};

/// Probability that a random positive outscores a random negative, ties
/// counted as one half (Mann-Whitney U via midranks).
inline double roc_auc(std::vector<ScoredLabel> items) {
  std::sort(items.begin(), items.end(), [](const ScoredLabel& a, const ScoredLabel& b) { return a.score < b.score; });
  double rank_sum = 0.0;
  std::size_t positives = 0;
  for (std::size_t lo = 0; lo < items.size();) {
    std::size_t hi = lo;
    while (hi < items.size() && items[hi].score == items[lo].score) ++hi;
    const double midrank = 0.5 * static_cast<double>(lo + 1 + hi);
    for (std::size_t k = lo; k < hi; ++k) {
      if (items[k].positive) {
        rank_sum += midrank;
        ++positives;
      }
    }
    lo = hi;
  }
  const std::size_t negatives = items.size() - positives;
  detail::require(positives > 0 && negatives > 0, "roc_auc: need both positive and negative labels");
  const double p = static_cast<double>(positives), q = static_cast<double>(negatives);
  return (rank_sum - p * (p + 1.0) / 2.0) / (p * q);
}

/// Pearson correlation of two equally long samples.
inline double pearson_correlation(const Vector& a, const Vector& b) {
  detail::require(a.size() == b.size() && a.size() >= 2, "pearson_correlation: need two equal samples");
  const Vector ca = a.array() - a.mean();
  const Vector cb = b.array() - b.mean();
  const double denom = ca.norm() * cb.norm();
  detail::require(denom > 0.0, "pearson_correlation: constant sample");
  return ca.dot(cb) / denom;
}

/// Ranks 1..n with ties sharing their mean rank.
inline Vector average_ranks(const Vector& a) {
  std::vector<Index> order(static_cast<std::size_t>(a.size()));
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Index p, Index q) { return a(p) < a(q); });
  Vector ranks(a.size());
  for (std::size_t lo = 0; lo < order.size();) {
    std::size_t hi = lo;
    while (hi < order.size() && a(order[hi]) == a(order[lo])) ++hi;
    const double mid = 0.5 * static_cast<double>(lo + 1 + hi);
    for (std::size_t k = lo; k < hi; ++k) ranks(order[k]) = mid;
    lo = hi;
  }
  return ranks;
}

inline double spearman_correlation(const Vector& a, const Vector& b) {
  return pearson_correlation(average_ranks(a), average_ranks(b));
}

/// Strong connectivity by forward and backward reachability from node 0.
inline bool is_strongly_connected(const DirectedWeightedGraph& graph) {
  const Index n = graph.size();
  if (n <= 1) return true;
  std::vector<std::vector<Index>> reverse(static_cast<std::size_t>(n));
  for (const Edge& e : graph.edges()) reverse[e.target].push_back(e.source);
  auto reaches_all = [n](auto&& next) {
    std::vector<char> seen(static_cast<std::size_t>(n), 0);
    std::vector<Index> stack{0};
    seen[0] = 1;
    Index count = 1;
    while (!stack.empty()) {
      const Index u = stack.back();
      stack.pop_back();
      for (Index v : next(u)) {
        if (!seen[v]) {
          seen[v] = 1;
          ++count;
          stack.push_back(v);
        }
      }
    }
    return count == n;
  };
  const bool forward = reaches_all([&](Index u) {
    std::vector<Index> t;
    for (const auto& [v, w] : graph.out(u)) t.push_back(v);
    return t;
  });
  return forward && reaches_all([&](Index u) { return reverse[u]; });
}

/// A link is an unordered node pair carrying one or both directed edges.
struct Link {
  Index a = 0;
  Index b = 0;
  std::vector<Edge> edges;
};

struct EdgeSplit {
  DirectedWeightedGraph train;
  std::vector<Link> test;
  std::vector<Link> validation;
  int attempts = 0;
};

struct SplitFractions {
  double test = 0.15;
  double validation = 0.05;
};

inline std::vector<Link> group_links(const DirectedWeightedGraph& graph) {
  std::map<std::pair<Index, Index>, std::size_t> slot;
  std::vector<Link> links;
  for (const Edge& e : graph.edges()) {
    const auto key = std::minmax(e.source, e.target);
    auto [it, inserted] = slot.emplace(key, links.size());
    if (inserted) links.push_back({key.first, key.second, {}});
    links[it->second].edges.push_back(e);
  }
  return links;
}

/// Holds out test and validation links, never touching the links of a
/// random spanning tree of the symmetrized graph. Retries with a new draw
/// up to 20 times if the training digraph loses strong connectivity.
inline EdgeSplit split_edges(const DirectedWeightedGraph& graph, std::uint64_t seed, SplitFractions fractions = {}) {
  detail::require(fractions.test > 0.0 && fractions.validation >= 0.0 && fractions.test + fractions.validation < 1.0,
                  "split_edges: invalid fractions");
  detail::require(is_strongly_connected(graph), "split_edges: graph is not strongly connected");
  const std::vector<Link> links = group_links(graph);
  const Index n = graph.size();
  const std::size_t n_test = static_cast<std::size_t>(std::llround(fractions.test * static_cast<double>(links.size())));
  const std::size_t n_val =
      static_cast<std::size_t>(std::llround(fractions.validation * static_cast<double>(links.size())));
  detail::require(n_test >= 1, "split_edges: graph too small to hold out a test link");

  Rng rng(seed);
  for (int attempt = 1; attempt <= 20; ++attempt) {
    std::vector<std::size_t> order(links.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    rng.shuffle(order);

    // Kruskal over a random order gives a random spanning tree.
    std::vector<Index> parent(static_cast<std::size_t>(n));
    std::iota(parent.begin(), parent.end(), Index{0});
    auto find = [&](Index v) {
      while (parent[v] != v) v = parent[v] = parent[parent[v]];
      return v;
    };
    std::vector<std::size_t> free_links;
    for (std::size_t idx : order) {
      const Index ra = find(links[idx].a), rb = find(links[idx].b);
      if (ra != rb) {
        parent[ra] = rb;
      } else {
        free_links.push_back(idx);
      }
    }
    detail::require(free_links.size() >= n_test + n_val, "split_edges: too few links outside the spanning tree");

    EdgeSplit split;
    split.attempts = attempt;
    std::vector<char> held(links.size(), 0);
    for (std::size_t k = 0; k < n_test; ++k) {
      split.test.push_back(links[free_links[k]]);
      held[free_links[k]] = 1;
    }
    for (std::size_t k = n_test; k < n_test + n_val; ++k) {
      split.validation.push_back(links[free_links[k]]);
      held[free_links[k]] = 1;
    }
    split.train = DirectedWeightedGraph(n);
    for (std::size_t idx = 0; idx < links.size(); ++idx) {
      if (held[idx]) continue;
      for (const Edge& e : links[idx].edges) split.train.add_edge(e.source, e.target, e.weight);
    }
    if (is_strongly_connected(split.train)) return split;
  }
  throw NumericError("split_edges: training graph not strongly connected after 20 attempts");
}

struct LinkPredictionResult {
  double existence_auc = 0.0;
  double direction_auc = 0.0;
  std::size_t existence_pairs = 0;
  std::size_t direction_pairs = 0;
};

/// Existence: held-out directed edges against an equal number of uniformly
/// sampled non-edges of the full graph. Direction: for each held-out link
/// whose two orientations differ (only one exists, or their weights
/// differ), the cheaper or only orientation is positive and its reverse
/// negative. Both are scored with the Fermi-Dirac decoder. direction_auc is
/// NaN when no held-out link is asymmetric.
inline LinkPredictionResult score_link_prediction(const Embedding& x, const DirectedWeightedGraph& graph,
                                                  const std::vector<Link>& held_out, const RandersSpace& space,
                                                  const FermiDiracParams& params, std::uint64_t seed) {
  const Index n = graph.size();
  detail::require(x.rows() == n && x.cols() == space.dim(), "score_link_prediction: shape mismatch");
  params.validate();
  LinkPredictionResult out;

  std::vector<ScoredLabel> existence;
  for (const Link& link : held_out) {
    for (const Edge& e : link.edges) existence.push_back({fermi_dirac_score(x, e.source, e.target, space, params), true});
  }
  const std::size_t wanted = existence.size();
  std::vector<std::pair<Index, Index>> non_edges;
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < n; ++j) {
      if (i != j && !graph.has_edge(i, j)) non_edges.emplace_back(i, j);
    }
  }
  detail::require(!non_edges.empty(), "score_link_prediction: graph is complete, no negatives to sample");
  Rng rng(seed);
  rng.shuffle(non_edges);
  for (std::size_t k = 0; k < wanted; ++k) {
    const auto [i, j] = non_edges[k % non_edges.size()];
    existence.push_back({fermi_dirac_score(x, i, j, space, params), false});
  }
  if (wanted > 0) out.existence_auc = roc_auc(existence);
  out.existence_pairs = wanted;

  std::vector<ScoredLabel> direction;
  for (const Link& link : held_out) {
    const double ab = graph.edge_weight(link.a, link.b);
    const double ba = graph.edge_weight(link.b, link.a);
    if (ab == ba) continue;
    const Index from = ab < ba ? link.a : link.b;
    const Index to = ab < ba ? link.b : link.a;
    direction.push_back({fermi_dirac_score(x, from, to, space, params), true});
    direction.push_back({fermi_dirac_score(x, to, from, space, params), false});
  }
  out.direction_pairs = direction.size() / 2;
  out.direction_auc = direction.empty() ? std::nan("") : roc_auc(direction);
  return out;
}

struct LinkPredictionRun {
  EdgeSplit split;
  SolveOutput fit;
  LinkPredictionResult test;
};

/// Splits the graph, fits run_finsler_smacof to the training graph's
/// shortest-path dissimilarities with uniform weights, and scores the test
/// links.
inline LinkPredictionRun link_prediction_eval(const DirectedWeightedGraph& graph, const RandersSpace& space,
                                              const FermiDiracParams& params, std::uint64_t split_seed,
                                              const SolverConfig& config = {}) {
  LinkPredictionRun run;
  run.split = split_edges(graph, split_seed);
  const DissimilarityMatrix d = all_pairs_distances(run.split.train);
  run.fit = run_finsler_smacof(d, WeightMatrix::uniform(d.size()), space, config);
  run.test = score_link_prediction(run.fit.embedding, graph, run.split.test, space, params, split_seed);
  return run;
}

}  // namespace fmds
