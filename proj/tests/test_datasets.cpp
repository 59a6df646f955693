#include <gtest/gtest.h>

#include <cmath>

#include "fmds/datasets.hpp"

using namespace fmds;

TEST(DatasetKind, NamesRoundTrip) {
  for (auto k : {DatasetKind::swiss_roll, DatasetKind::swiss_roll_hole, DatasetKind::current_map,
                 DatasetKind::river, DatasetKind::tree})
    EXPECT_EQ(parse_dataset_kind(to_string(k)), k);
  EXPECT_THROW(parse_dataset_kind("torus"), std::invalid_argument);
}

TEST(Defaults, ExperimentRecipes) {
  const auto roll = GeneratorSpec::defaults(DatasetKind::swiss_roll);
  EXPECT_EQ(roll.n_points, 3000);
  EXPECT_EQ(roll.k_neighbors, 10);
  const auto hole = GeneratorSpec::defaults(DatasetKind::swiss_roll_hole);
  EXPECT_EQ(hole.n_points, 2000);
  EXPECT_EQ(hole.k_neighbors, 15);
  EXPECT_DOUBLE_EQ(hole.alpha_tilde, 0.5);
  const auto sea = GeneratorSpec::defaults(DatasetKind::current_map);
  EXPECT_EQ(sea.n_points, 2000);
  EXPECT_DOUBLE_EQ(sea.alpha_tilde, 0.5);
  EXPECT_DOUBLE_EQ(sea.x_max, 10.0);
  EXPECT_DOUBLE_EQ(sea.y_max, 10.0);
  EXPECT_DOUBLE_EQ(sea.nu, 2.0);
  const auto river = GeneratorSpec::defaults(DatasetKind::river);
  EXPECT_EQ(river.n_points, 1000);
  EXPECT_DOUBLE_EQ(river.alpha_tilde, 0.2);
  EXPECT_DOUBLE_EQ(river.y_max, 1.0);
  const auto tree = GeneratorSpec::defaults(DatasetKind::tree);
  EXPECT_EQ(tree.depth, 7);
  EXPECT_DOUBLE_EQ(tree.down_weight, 0.5);
  EXPECT_DOUBLE_EQ(tree.up_weight, 1.5);
  EXPECT_DOUBLE_EQ(tree.lateral_weight, 0.1);
}

TEST(Validate, RejectsBadSpecs) {
  auto s = GeneratorSpec::defaults(DatasetKind::swiss_roll);
  s.alpha_tilde = 1.0;
  EXPECT_THROW(s.validate(), std::invalid_argument);
  s = GeneratorSpec::defaults(DatasetKind::swiss_roll);
  s.n_points = 10;
  EXPECT_THROW(s.validate(), std::invalid_argument);
  s = GeneratorSpec::defaults(DatasetKind::swiss_roll_hole);
  s.hole_t_fraction = 1.0;
  s.hole_w_fraction = 1.0;
  EXPECT_THROW(gen_swiss_roll_hole(s), std::invalid_argument);
  s.hole_w_fraction = 1.5;
  s.hole_t_fraction = 0.2;
  EXPECT_THROW(s.validate(), std::invalid_argument);
  s = GeneratorSpec::defaults(DatasetKind::tree);
  s.depth = 0;
  EXPECT_THROW(gen_tree(s), std::invalid_argument);
}

TEST(SwissRoll, DriftIsUnitAndTangent) {
  auto spec = GeneratorSpec::defaults(DatasetKind::swiss_roll);
  spec.n_points = 500;
  spec.seed = 1;
  const auto gen = gen_swiss_roll(spec);
  const Matrix& x = gen.cloud.points();
  const Matrix& drift = gen.cloud.drift();
  ASSERT_EQ(x.rows(), 500);
  for (Index i = 0; i < x.rows(); ++i) {
    const double t = std::hypot(x(i, 0), x(i, 2));
    EXPECT_GE(t, spec.t_min - 1e-12);
    EXPECT_LE(t, spec.t_max + 1e-12);
    EXPECT_GE(x(i, 1), 0.0);
    EXPECT_LE(x(i, 1), spec.width);
    EXPECT_NEAR(drift.row(i).norm(), 1.0, 1e-12);
    // Analytic normal from the parametrization.
    Vector n(3);
    n << std::sin(t) + t * std::cos(t), 0.0, -(std::cos(t) - t * std::sin(t));
    EXPECT_NEAR(drift.row(i).dot(n.normalized()), 0.0, 1e-10);
    // Drift points toward increasing t.
    const Vector ahead = swiss::point(t + 1e-6, x(i, 1)) - swiss::point(t, x(i, 1));
    EXPECT_GT(drift.row(i).dot(ahead), 0.0);
  }
  EXPECT_DOUBLE_EQ(gen.cloud.alpha_tilde(), spec.alpha_tilde);
}

TEST(SwissRoll, IntrinsicCoordinatesAreArcLengthAndWidth) {
  auto spec = GeneratorSpec::defaults(DatasetKind::swiss_roll);
  spec.n_points = 50;
  const auto gen = gen_swiss_roll(spec);
  for (Index i = 0; i < 50; ++i) {
    const double t = std::hypot(gen.cloud.points()(i, 0), gen.cloud.points()(i, 2));
    EXPECT_NEAR(gen.intrinsic(i, 0), swiss::arc_length(t) - swiss::arc_length(spec.t_min), 1e-9);
    EXPECT_EQ(gen.intrinsic(i, 1), gen.cloud.points()(i, 1));
  }
  // Numerical arc length by the midpoint rule.
  double s = 0.0;
  const int steps = 200000;
  const double h = (spec.t_max - spec.t_min) / steps;
  for (int k = 0; k < steps; ++k) {
    const double t = spec.t_min + (k + 0.5) * h;
    s += std::sqrt(1.0 + t * t) * h;
  }
  EXPECT_NEAR(swiss::arc_length(spec.t_max) - swiss::arc_length(spec.t_min), s, 1e-6);
}

TEST(SwissRoll, Deterministic) {
  auto spec = GeneratorSpec::defaults(DatasetKind::swiss_roll);
  spec.n_points = 100;
  spec.seed = 42;
  const auto a = gen_swiss_roll(spec), b = gen_swiss_roll(spec);
  EXPECT_EQ(a.cloud.points(), b.cloud.points());
  spec.seed = 43;
  EXPECT_NE(a.cloud.points(), gen_swiss_roll(spec).cloud.points());
}

TEST(SwissRollHole, ZeroAreaHoleRemovesNothing) {
  auto spec = GeneratorSpec::defaults(DatasetKind::swiss_roll_hole);
  spec.n_points = 300;
  spec.hole_t_fraction = 0.0;
  const auto gen = gen_swiss_roll_hole(spec);
  EXPECT_EQ(gen.cloud.size(), 300);
  EXPECT_TRUE(gen.boundary.empty());
}

TEST(SwissRollHole, RemovedFractionWithinBinomialBounds) {
  const auto spec = GeneratorSpec::defaults(DatasetKind::swiss_roll_hole);
  const auto gen = gen_swiss_roll_hole(spec);
  const double p = spec.hole_t_fraction * spec.hole_w_fraction;
  const double n = static_cast<double>(spec.n_points);
  const double removed = n - static_cast<double>(gen.cloud.size());
  EXPECT_LE(std::abs(removed - n * p), 3.0 * std::sqrt(n * p * (1 - p)));
  EXPECT_EQ(gen.full_cloud->size(), spec.n_points);
  EXPECT_EQ(static_cast<Index>(gen.kept.size()), gen.cloud.size());
  for (std::size_t r = 0; r < gen.kept.size(); ++r)
    EXPECT_EQ(gen.cloud.points().row(static_cast<Index>(r)), gen.full_cloud->points().row(gen.kept[r]));
}

TEST(SwissRollHole, BoundaryLiesInTheBandAndNoPointsInside) {
  const auto spec = GeneratorSpec::defaults(DatasetKind::swiss_roll_hole);
  const auto gen = gen_swiss_roll_hole(spec);
  const auto hole = hole_rectangle(spec);
  const double s0 = swiss::arc_length(spec.t_min);
  const double s_lo = swiss::arc_length(hole.t_lo) - s0, s_hi = swiss::arc_length(hole.t_hi) - s0;
  const double area = (swiss::arc_length(spec.t_max) - s0) * spec.width;
  const double spacing = std::sqrt(area / static_cast<double>(gen.cloud.size()));
  ASSERT_FALSE(gen.boundary.empty());
  for (Index r = 0; r < gen.cloud.size(); ++r) {
    const double s = gen.intrinsic(r, 0), w = gen.intrinsic(r, 1);
    EXPECT_FALSE(s > s_lo + 1e-9 && s < s_hi - 1e-9 && w > hole.w_lo + 1e-9 && w < hole.w_hi - 1e-9);
    const double ds = std::max({s_lo - s, 0.0, s - s_hi});
    const double dw = std::max({hole.w_lo - w, 0.0, w - hole.w_hi});
    EXPECT_EQ(gen.boundary.contains(r), std::hypot(ds, dw) <= spacing);
  }
}

TEST(SeaCurrent, PeakNormEqualsAlphaTilde) {
  const auto spec = GeneratorSpec::defaults(DatasetKind::current_map);
  const auto gen = gen_current_map(spec);
  EXPECT_EQ(gen.cloud.size(), 2000);
  const Matrix v = current_vectors(gen.cloud);
  EXPECT_NEAR(v.rowwise().norm().maxCoeff(), spec.alpha_tilde, 1e-12);
  EXPECT_LE((gen.cloud.drift() + v / spec.alpha_tilde).cwiseAbs().maxCoeff(), 1e-15);
  for (Index i = 0; i < gen.cloud.size(); ++i) {
    EXPECT_GE(gen.cloud.points()(i, 0), 0.0);
    EXPECT_LE(gen.cloud.points()(i, 0), 10.0);
    // Direction follows the raw field.
    const Vector raw = sea_current_raw(gen.cloud.points()(i, 0), gen.cloud.points()(i, 1), spec.nu);
    EXPECT_NEAR(v.row(i).dot(raw), v.row(i).norm() * raw.norm(), 1e-12);
  }
}

TEST(SeaCurrent, ZeroFrequencyIsConstant) {
  auto spec = GeneratorSpec::defaults(DatasetKind::current_map);
  spec.nu = 0.0;
  spec.n_points = 50;
  const auto gen = gen_current_map(spec);
  for (Index i = 0; i < 50; ++i) {
    EXPECT_NEAR(gen.cloud.drift()(i, 0), -1.0 / std::sqrt(2.0), 1e-15);
    EXPECT_NEAR(gen.cloud.drift()(i, 1), -1.0 / std::sqrt(2.0), 1e-15);
  }
}

TEST(SeaCurrent, DivergenceAndCurlMatchFiniteDifferences) {
  const auto spec = GeneratorSpec::defaults(DatasetKind::current_map);
  auto gen_spec = spec;
  gen_spec.n_points = 100;
  const auto gen = gen_current_map(gen_spec);
  const double h = 1e-5;
  for (Index i = 0; i < 100; ++i) {
    const double x = gen.cloud.points()(i, 0), y = gen.cloud.points()(i, 1);
    const Vector dx = (sea_current_raw(x + h, y, spec.nu) - sea_current_raw(x - h, y, spec.nu)) / (2 * h);
    const Vector dy = (sea_current_raw(x, y + h, spec.nu) - sea_current_raw(x, y - h, spec.nu)) / (2 * h);
    EXPECT_NEAR(dx(0) + dy(1), sea_current_divergence(x, y, spec.nu), 1e-6);
    EXPECT_NEAR(dx(1) - dy(0), sea_current_curl(x, y, spec.nu), 1e-6);
  }
}

TEST(River, BanksMidChannelAndSymmetry) {
  EXPECT_EQ(river_current_raw(3.0, 0.0).norm(), 0.0);
  EXPECT_EQ(river_current_raw(3.0, 1.0).norm(), 0.0);
  EXPECT_EQ(river_current_raw(3.0, 0.5)(0), 1.0);
  for (double t : {0.1, 0.25, 0.4}) EXPECT_EQ(river_current_raw(1.0, 0.5 + t), river_current_raw(1.0, 0.5 - t));
  const auto spec = GeneratorSpec::defaults(DatasetKind::river);
  const auto gen = gen_river(spec);
  const Matrix v = current_vectors(gen.cloud);
  EXPECT_NEAR(v.rowwise().norm().maxCoeff(), 0.2, 1e-12);
  EXPECT_EQ(v.col(1).cwiseAbs().maxCoeff(), 0.0);
  EXPECT_GT(v.col(0).minCoeff(), -1e-15);
  double peak = 0.0;
  for (Index i = 0; i < gen.cloud.size(); ++i) peak = std::max(peak, river_current_raw(0, gen.cloud.points()(i, 1))(0));
  for (Index i = 0; i < gen.cloud.size(); ++i) {
    const double y = gen.cloud.points()(i, 1);
    EXPECT_NEAR(v(i, 0), 0.2 * (1 - std::abs(2 * y - 1)) / peak, 1e-12);
  }
}

TEST(Tree, CountsAndDepths) {
  auto spec = GeneratorSpec::defaults(DatasetKind::tree);
  const auto big = gen_tree(spec);
  EXPECT_EQ(big.graph.size(), 255);
  EXPECT_EQ(big.depth.back(), 7);
  spec.depth = 1;
  const auto small = gen_tree(spec);
  ASSERT_EQ(small.graph.size(), 3);
  int down = 0, up = 0, lateral = 0;
  for (const auto& e : small.graph.edges()) {
    if (e.weight == 0.5) ++down;
    if (e.weight == 1.5) ++up;
    if (e.weight == 0.1) ++lateral;
  }
  EXPECT_EQ(down, 2);
  EXPECT_EQ(up, 2);
  EXPECT_EQ(lateral, 2);
}

TEST(Tree, LateralEdgeCountPerLevel) {
  const auto gen = gen_tree(GeneratorSpec::defaults(DatasetKind::tree));
  std::vector<long> per_level(8, 0);
  for (const auto& e : gen.graph.edges())
    if (gen.depth[e.source] == gen.depth[e.target]) ++per_level[gen.depth[e.source]];
  for (int d = 1; d <= 7; ++d) EXPECT_EQ(per_level[d], (1L << d) * ((1L << d) - 1));
  EXPECT_EQ(per_level[0], 0);
}

TEST(GenerateCloud, DispatchesAndRejectsTree) {
  auto spec = GeneratorSpec::defaults(DatasetKind::river);
  spec.n_points = 20;
  EXPECT_EQ(generate_cloud(spec).cloud.size(), 20);
  EXPECT_THROW(generate_cloud(GeneratorSpec::defaults(DatasetKind::tree)), std::invalid_argument);
}
