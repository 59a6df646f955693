#pragma once

// Seeded synthetic data: Swiss roll with a drift along its length (with or
// without a rectangular hole), planar current maps, and the directed
// hierarchy tree. Output is a pure function of the spec.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "fmds/dissimilarity.hpp"
#include "fmds/error.hpp"
#include "fmds/linalg.hpp"
#include "fmds/random.hpp"
#include "fmds/wormhole.hpp"

namespace fmds {

enum class DatasetKind { swiss_roll, swiss_roll_hole, current_map, river, tree };

inline std::string to_string(DatasetKind kind) {
  switch (kind) {
    case DatasetKind::swiss_roll: return "swiss_roll";
    case DatasetKind::swiss_roll_hole: return "swiss_roll_hole";
    case DatasetKind::current_map: return "current_map";
    case DatasetKind::river: return "river";
    case DatasetKind::tree: return "tree";
  }
  return "unknown";
}

inline DatasetKind parse_dataset_kind(const std::string& name) {
  for (auto kind : {DatasetKind::swiss_roll, DatasetKind::swiss_roll_hole, DatasetKind::current_map,
                    DatasetKind::river, DatasetKind::tree}) {
    if (to_string(kind) == name) return kind;
  }
  throw std::invalid_argument("unknown dataset kind '" + name + "'");
}

struct GeneratorSpec {
  DatasetKind kind = DatasetKind::swiss_roll;
  Index n_points = 3000;
  double alpha_tilde = 0.3;
  Index k_neighbors = 10;
  std::uint64_t seed = 0;

  // Swiss roll (t cos t, w, t sin t), t in [t_min, t_max], w in [0, width].
  double t_min = 1.5 * std::numbers::pi;
  double t_max = 4.5 * std::numbers::pi;
  double width = 21.0;
  // Centered hole, as fractions of the t and w parameter extents.
  double hole_t_fraction = 0.2;
  double hole_w_fraction = 0.2;

  // Planar domain for current maps.
  double x_min = 0.0, x_max = 10.0, y_min = 0.0, y_max = 10.0;
  double nu = 2.0;

  // Tree.
  int depth = 7;
  double down_weight = 0.5;
  double up_weight = 1.5;
  double lateral_weight = 0.1;

  /// Experiment defaults for each kind.
  static GeneratorSpec defaults(DatasetKind kind) {
    GeneratorSpec s;
    s.kind = kind;
    switch (kind) {
      case DatasetKind::swiss_roll:
        break;
      case DatasetKind::swiss_roll_hole:
        s.n_points = 2000;
        s.alpha_tilde = 0.5;
        s.k_neighbors = 15;
        break;
      case DatasetKind::current_map:
        s.n_points = 2000;
        s.alpha_tilde = 0.5;
        break;
      case DatasetKind::river:
        s.n_points = 1000;
        s.alpha_tilde = 0.2;
        s.y_max = 1.0;
        break;
      case DatasetKind::tree:
        s.n_points = 255;
        s.alpha_tilde = 0.0;
        break;
    }
    return s;
  }

  void validate() const {
    detail::require(alpha_tilde >= 0.0 && alpha_tilde < 1.0, "alpha_tilde must lie in [0, 1)");
    if (kind == DatasetKind::tree) {
      detail::require(depth >= 1 && depth <= 16, "tree depth must lie in [1, 16]");
      detail::require(down_weight > 0.0 && up_weight > 0.0 && lateral_weight >= 0.0,
                      "tree weights must be positive");
      return;
    }
    detail::require(n_points >= 2, "n_points must be at least 2");
    detail::require(k_neighbors >= 1, "k_neighbors must be at least 1");
    detail::require(n_points >= k_neighbors + 1, "n_points must exceed k_neighbors");
    if (kind == DatasetKind::swiss_roll || kind == DatasetKind::swiss_roll_hole) {
      detail::require(t_max > t_min && t_min > 0.0, "need 0 < t_min < t_max");
      detail::require(width > 0.0, "width must be positive");
    }
    if (kind == DatasetKind::swiss_roll_hole) {
      detail::require(hole_t_fraction >= 0.0 && hole_w_fraction >= 0.0, "hole fractions must be nonnegative");
      detail::require(hole_t_fraction < 1.0 || hole_w_fraction < 1.0, "hole covers the whole domain");
      detail::require(hole_t_fraction <= 1.0 && hole_w_fraction <= 1.0, "hole exceeds the domain");
    }
    if (kind == DatasetKind::current_map || kind == DatasetKind::river) {
      detail::require(x_max > x_min && y_max > y_min, "domain bounds must be increasing");
    }
  }
};

struct GeneratedCloud {
  PointCloudWithField cloud;
  /// Intrinsic coordinates: (arc length, width) on the roll, the planar
  /// position for current maps.
  Matrix intrinsic;
  /// Ground-truth boundary of the sampled region (hole kind only).
  BoundarySet boundary;
  /// Hole kind: the sample before removal, and the index of every kept
  /// point within it.
  std::optional<PointCloudWithField> full_cloud;
  Matrix full_intrinsic;
  std::vector<Index> kept;
};

struct GeneratedGraph {
  DirectedWeightedGraph graph;
  std::vector<int> depth;
};

namespace swiss {

inline Vector point(double t, double w) {
  Vector p(3);
  p << t * std::cos(t), w, t * std::sin(t);
  return p;
}

/// Unit tangent along increasing t.
inline Vector length_direction(double t) {
  Vector d(3);
  d << std::cos(t) - t * std::sin(t), 0.0, std::sin(t) + t * std::cos(t);
  return d / std::sqrt(1.0 + t * t);
}

/// Unit surface normal, ∂_t × ∂_w normalized.
inline Vector normal(double t) {
  const Vector dt = length_direction(t);
  Vector n(3);
  n << -dt(2), 0.0, dt(0);
  return n;
}

/// Arc length from 0 to t of the spiral: ½ (t sqrt(1+t²) + asinh t).
inline double arc_length(double t) { return 0.5 * (t * std::sqrt(1.0 + t * t) + std::asinh(t)); }

}  // namespace swiss

namespace detail {

struct RollSample {
  Matrix points, drift, intrinsic, params;
};

inline RollSample sample_roll(const GeneratorSpec& spec, Index n) {
  Rng rng(spec.seed);
  RollSample s{Matrix(n, 3), Matrix(n, 3), Matrix(n, 2), Matrix(n, 2)};
  const double s0 = swiss::arc_length(spec.t_min);
  for (Index i = 0; i < n; ++i) {
    const double t = rng.uniform(spec.t_min, spec.t_max);
    const double w = rng.uniform(0.0, spec.width);
    s.points.row(i) = swiss::point(t, w).transpose();
    s.drift.row(i) = swiss::length_direction(t).transpose();
    s.intrinsic(i, 0) = swiss::arc_length(t) - s0;
    s.intrinsic(i, 1) = w;
    s.params(i, 0) = t;
    s.params(i, 1) = w;
  }
  return s;
}

}  // namespace detail

/// Uniform samples in (t, w) with drift along the roll's length.
inline GeneratedCloud gen_swiss_roll(const GeneratorSpec& spec) {
  detail::require(spec.kind == DatasetKind::swiss_roll, "gen_swiss_roll: wrong kind");
  spec.validate();
  auto s = detail::sample_roll(spec, spec.n_points);
  GeneratedCloud out;
  out.cloud = PointCloudWithField(std::move(s.points), std::move(s.drift), spec.alpha_tilde);
  out.intrinsic = std::move(s.intrinsic);
  return out;
}

struct HoleRectangle {
  double t_lo, t_hi, w_lo, w_hi;
  bool contains(double t, double w) const { return t > t_lo && t < t_hi && w > w_lo && w < w_hi; }
  double area() const { return (t_hi - t_lo) * (w_hi - w_lo); }
};

inline HoleRectangle hole_rectangle(const GeneratorSpec& spec) {
  const double tc = 0.5 * (spec.t_min + spec.t_max);
  const double th = 0.5 * spec.hole_t_fraction * (spec.t_max - spec.t_min);
  const double wc = 0.5 * spec.width;
  const double wh = 0.5 * spec.hole_w_fraction * spec.width;
  return {tc - th, tc + th, wc - wh, wc + wh};
}

/// n_points samples on the full roll, minus those strictly inside the
/// centered hole rectangle. The boundary is every kept point within one
/// mean sample spacing of the hole, measured in intrinsic coordinates.
inline GeneratedCloud gen_swiss_roll_hole(const GeneratorSpec& spec) {
  detail::require(spec.kind == DatasetKind::swiss_roll_hole, "gen_swiss_roll_hole: wrong kind");
  spec.validate();
  auto s = detail::sample_roll(spec, spec.n_points);
  const HoleRectangle hole = hole_rectangle(spec);

  GeneratedCloud out;
  for (Index i = 0; i < spec.n_points; ++i) {
    if (!hole.contains(s.params(i, 0), s.params(i, 1))) out.kept.push_back(i);
  }
  const Index kept = static_cast<Index>(out.kept.size());
  detail::require(kept > spec.k_neighbors, "gen_swiss_roll_hole: too few points left outside the hole");
  Matrix points(kept, 3), drift(kept, 3), intrinsic(kept, 2);
  for (Index r = 0; r < kept; ++r) {
    points.row(r) = s.points.row(out.kept[r]);
    drift.row(r) = s.drift.row(out.kept[r]);
    intrinsic.row(r) = s.intrinsic.row(out.kept[r]);
  }

  std::vector<Index> boundary;
  if (hole.area() > 0.0) {
    const double s0 = swiss::arc_length(spec.t_min);
    const double s_lo = swiss::arc_length(hole.t_lo) - s0, s_hi = swiss::arc_length(hole.t_hi) - s0;
    const double total_area = (swiss::arc_length(spec.t_max) - s0) * spec.width;
    const double spacing = std::sqrt(total_area / static_cast<double>(kept));
    for (Index r = 0; r < kept; ++r) {
      const double ds = std::max({s_lo - intrinsic(r, 0), 0.0, intrinsic(r, 0) - s_hi});
      const double dw = std::max({hole.w_lo - intrinsic(r, 1), 0.0, intrinsic(r, 1) - hole.w_hi});
      if (std::hypot(ds, dw) <= spacing) boundary.push_back(r);
    }
  }

  out.cloud = PointCloudWithField(std::move(points), std::move(drift), spec.alpha_tilde);
  out.intrinsic = std::move(intrinsic);
  out.boundary = BoundarySet(std::move(boundary), kept);
  out.full_cloud = PointCloudWithField(std::move(s.points), std::move(s.drift), spec.alpha_tilde);
  out.full_intrinsic = std::move(s.intrinsic);
  return out;
}

/// Unnormalized sea current (sin νx + cos νy, cos νx - sin νy).
inline Vector sea_current_raw(double x, double y, double nu) {
  Vector v(2);
  v << std::sin(nu * x) + std::cos(nu * y), std::cos(nu * x) - std::sin(nu * y);
  return v;
}

inline double sea_current_divergence(double x, double y, double nu) {
  return nu * (std::cos(nu * x) - std::cos(nu * y));
}

inline double sea_current_curl(double x, double y, double nu) {
  return nu * (std::sin(nu * y) - std::sin(nu * x));
}

/// Unnormalized river profile (1 - |2y - 1|, 0): zero at the banks y = 0, 1.
inline Vector river_current_raw(double /*x*/, double y) {
  Vector v(2);
  v << 1.0 - std::abs(2.0 * y - 1.0), 0.0;
  return v;
}

namespace detail {

template <class Field>
GeneratedCloud sample_current(const GeneratorSpec& spec, Field&& field) {
  spec.validate();
  Rng rng(spec.seed);
  const Index n = spec.n_points;
  Matrix points(n, 2), raw(n, 2);
  for (Index i = 0; i < n; ++i) {
    points(i, 0) = rng.uniform(spec.x_min, spec.x_max);
    points(i, 1) = rng.uniform(spec.y_min, spec.y_max);
    raw.row(i) = field(points(i, 0), points(i, 1)).transpose();
  }
  const double peak = raw.rowwise().norm().maxCoeff();
  // Drift is minus the current, scaled so the strongest sampled current
  // has norm alpha_tilde.
  Matrix drift = peak > 0.0 ? Matrix(-raw / peak) : Matrix(Matrix::Zero(n, 2));
  GeneratedCloud out;
  out.intrinsic = points;
  out.cloud = PointCloudWithField(std::move(points), std::move(drift), spec.alpha_tilde);
  return out;
}

}  // namespace detail

/// Current at each sample, v = -alpha_tilde * drift.
inline Matrix current_vectors(const PointCloudWithField& cloud) { return -cloud.alpha_tilde() * cloud.drift(); }

inline GeneratedCloud gen_current_map(const GeneratorSpec& spec) {
  detail::require(spec.kind == DatasetKind::current_map, "gen_current_map: wrong kind");
  const double nu = spec.nu;
  return detail::sample_current(spec, [nu](double x, double y) { return sea_current_raw(x, y, nu); });
}

inline GeneratedCloud gen_river(const GeneratorSpec& spec) {
  detail::require(spec.kind == DatasetKind::river, "gen_river: wrong kind");
  return detail::sample_current(spec, [](double x, double y) { return river_current_raw(x, y); });
}

inline GeneratedGraph gen_tree(const GeneratorSpec& spec) {
  detail::require(spec.kind == DatasetKind::tree, "gen_tree: wrong kind");
  spec.validate();
  GeneratedGraph out;
  out.graph = make_tree_graph(spec.depth, spec.down_weight, spec.up_weight, spec.lateral_weight);
  out.depth.reserve(static_cast<std::size_t>(out.graph.size()));
  for (Index i = 0; i < out.graph.size(); ++i) out.depth.push_back(tree_node_depth(i));
  return out;
}

/// Dispatch for the point-cloud kinds.
inline GeneratedCloud generate_cloud(const GeneratorSpec& spec) {
  switch (spec.kind) {
    case DatasetKind::swiss_roll: return gen_swiss_roll(spec);
    case DatasetKind::swiss_roll_hole: return gen_swiss_roll_hole(spec);
    case DatasetKind::current_map: return gen_current_map(spec);
    case DatasetKind::river: return gen_river(spec);
    case DatasetKind::tree: break;
  }
  throw std::invalid_argument("generate_cloud: tree is a graph dataset");
}

}  // namespace fmds
