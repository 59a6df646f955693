// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "fmds/fmds.hpp"
#include "fmds/io.hpp"
#include "fmds_cli.hpp"
#include "oracles.hpp"

using namespace fmds;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* format, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, format, args...);
  return buf;
}

Matrix random_points(Rng& rng, Index n, Index m, double scale = 1.0) {
  Matrix x(n, m);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < m; ++j) x(i, j) = scale * rng.normal();
  return x;
}

Vector random_direction(Rng& rng, Index m) {
  Vector v(m);
  for (Index j = 0; j < m; ++j) v(j) = rng.normal();
  return v / v.norm();
}

/// Randers distances of a random cloud under a random drift, perturbed by
/// multiplicative noise so that no exact fit exists.
DissimilarityMatrix noisy_randers_distances(Rng& rng, Index n, Index m, double alpha) {
  const Matrix p = random_points(rng, n, m);
  const RandersSpace s(alpha * random_direction(rng, m));
  Matrix d = Matrix::Zero(n, n);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j)
      if (i != j) d(i, j) = canonical_distance(s, p.row(i), p.row(j)) * rng.uniform(0.8, 1.25);
  return DissimilarityMatrix(d);
}

WeightMatrix random_weights(Rng& rng, Index n) {
  Matrix w = Matrix::Zero(n, n);
  for (Index i = 0; i < n; ++i)
    for (Index j = i + 1; j < n; ++j) w(i, j) = w(j, i) = rng.uniform(0.2, 2.0);
  return WeightMatrix(w);
}

Matrix euclidean_matrix(const Matrix& p) {
  const Index n = p.rows();
  Matrix d(n, n);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j) d(i, j) = (p.row(i) - p.row(j)).norm();
  return d;
}

double diameter(const Matrix& x) {
  double best = 0.0;
  for (Index i = 0; i < x.rows(); ++i)
    for (Index j = i + 1; j < x.rows(); ++j) best = std::max(best, (x.row(i) - x.row(j)).norm());
  return best;
}

// 1
Outcome majorization_monotonicity() {
  const Index sizes[] = {10, 50, 200};
  const Index dims[] = {2, 3};
  const double alphas[] = {0.0, 0.3, 0.5, 0.9};
  const auto t0 = std::chrono::steady_clock::now();
  Rng rng(101);
  double worst = -1.0;
  int violations = 0;
  for (int t = 0; t < 100; ++t) {
    const Index n = sizes[t % 3], m = dims[(t / 3) % 2];
    const double alpha = alphas[(t / 6) % 4];
    const auto d = noisy_randers_distances(rng, n, m, rng.uniform(0.0, 0.6));
    const auto w = t % 2 ? random_weights(rng, n) : WeightMatrix::uniform(n);
    SolverConfig cfg;
    cfg.max_iters = 60;
    cfg.rel_stress_tol = 1e-300;
    cfg.init = t % 4 < 2 ? Initialization::random : Initialization::classical;
    cfg.seed = static_cast<std::uint64_t>(t);
    const auto space = RandersSpace(alpha * random_direction(rng, m));
    const auto h = run_finsler_smacof(d, w, space, cfg).report.stress_history;
    for (std::size_t k = 1; k < h.size(); ++k) {
      const double rel = (h[k] - h[k - 1]) / h[k - 1];
      worst = std::max(worst, rel);
      violations += rel > 1e-9;
    }
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return {violations == 0 && secs <= 120.0,
          fmt("100 instances, largest relative one-step change %+.2e, %d steps above 1e-9, %.1f s (limit 120 s)",
              worst, violations, secs)};
}

// 2
Outcome classical_reduction() {
  Rng rng(202);
  double worst = 0.0;
  for (int t = 0; t < 20; ++t) {
    const Index n = 10 + static_cast<Index>(rng.below(41)), m = 2 + t % 2;
    Matrix d = euclidean_matrix(random_points(rng, n, m + 1));
    for (Index i = 0; i < n; ++i)
      for (Index j = i + 1; j < n; ++j) d(j, i) = d(i, j) *= rng.uniform(0.9, 1.1);
    const DissimilarityMatrix dm(d);
    const auto w = t % 2 ? random_weights(rng, n) : WeightMatrix::uniform(n);
    SolverConfig cfg;
    cfg.linear_solver = t % 4 < 2 ? LinearSolverKind::direct : LinearSolverKind::iterative;
    const FinslerSmacof solver(dm, w, RandersSpace::euclidean(m), cfg);
    const oracle::ClassicalSmacof reference(d, w.matrix());
    Matrix x = random_points(rng, n, m), y = x;
    for (int k = 0; k < 50; ++k) {
      x = solver.step(x);
      y = reference.step(y);
      worst = std::max(worst, (x - y).cwiseAbs().maxCoeff());
    }
  }
  return {worst <= 1e-8, fmt("20 instances x 50 iterations, max |X - X_classical| = %.2e (limit 1e-8)", worst)};
}

// 3
Outcome stress_identity() {
  Rng rng(303);
  double worst = 0.0;
  for (int t = 0; t < 50; ++t) {
    const Index n = 5 + static_cast<Index>(rng.below(40)), m = 1 + static_cast<Index>(rng.below(4));
    const auto d = noisy_randers_distances(rng, n, m, rng.uniform(0.0, 0.8));
    const auto w = random_weights(rng, n);
    const RandersSpace space(rng.uniform(0.0, 0.95) * random_direction(rng, m));
    const Matrix x = random_points(rng, n, m);
    const double direct = finsler_stress(x, d, w, space), trace = stress_trace_form(x, d, w, space);
    worst = std::max(worst, std::abs(direct - trace) / direct);
  }
  return {worst <= 1e-8, fmt("50 instances, max relative gap %.2e (limit 1e-8)", worst)};
}

// 4
Outcome symmetric_flattening() {
  Rng rng(404);
  double worst_stress = 0.0, worst_spread = 0.0;
  const auto space = RandersSpace::along_last_axis(3, 0.5);
  for (int t = 0; t < 10; ++t) {
    const Index n = 10 + static_cast<Index>(rng.below(91));
    const Matrix p = random_points(rng, n, 2, 2.0);
    const DissimilarityMatrix d(euclidean_matrix(p));
    const auto w = WeightMatrix::uniform(n);
    SolverConfig cfg;
    cfg.max_iters = 5000;
    cfg.rel_stress_tol = 1e-13;
    const auto out = run_finsler_smacof(d, w, space, cfg);
    worst_stress = std::max(worst_stress, normalized_stress(out.embedding, d, w, space));
    const Matrix c = out.embedding.rowwise() - out.embedding.colwise().mean();
    const double spread = (c * space.omega()).cwiseAbs().maxCoeff() / space.alpha();
    worst_spread = std::max(worst_spread, spread / diameter(p));
  }
  return {worst_stress <= 1e-6 && worst_spread <= 1e-4,
          fmt("10 planar sets, max normalized stress %.2e (limit 1e-6), max spread along omega %.2e x diameter "
              "(limit 1e-4)",
              worst_stress, worst_spread)};
}

// 5
Outcome metric_properties() {
  Rng rng(505);
  int bad_hom = 0, bad_tri = 0, bad_asym = 0, bad_poly = 0;
  for (int t = 0; t < 10000; ++t) {
    const Index m = 1 + static_cast<Index>(rng.below(5));
    const RandersSpace s(rng.uniform(0.0, 0.999) * random_direction(rng, m));
    const Vector u = random_points(rng, m, 1), v = random_points(rng, m, 1);
    const double lambda = std::ldexp(1.0, static_cast<int>(rng.below(41)) - 20);
    const Vector scaled = lambda * u;
    bad_hom += canonical_metric(s, scaled) != lambda * canonical_metric(s, u);
    bad_tri += canonical_metric(s, Vector(u + v)) > canonical_metric(s, u) + canonical_metric(s, v) + 1e-12;
    const Vector x = random_points(rng, m, 1), y = random_points(rng, m, 1);
    bad_asym += std::abs(canonical_distance(s, x, y) + canonical_distance(s, y, x) - 2.0 * (y - x).norm()) > 1e-12;
    std::vector<Vector> vertices{x};
    const int inner = 1 + static_cast<int>(rng.below(5));
    for (int k = 0; k < inner; ++k) vertices.push_back(random_points(rng, m, 1));
    vertices.push_back(y);
    bad_poly += polyline_length(s, Polyline(vertices)) < canonical_distance(s, x, y) - 1e-12;
  }
  const int bad = bad_hom + bad_tri + bad_asym + bad_poly;
  return {bad == 0, fmt("10^4 trials each: homogeneity %d, triangle %d, asymmetry identity %d, polyline %d failures",
                        bad_hom, bad_tri, bad_asym, bad_poly)};
}

// 6
Outcome geodesic_oracle() {
  Rng rng(606);
  int mismatched = 0;
  for (int t = 0; t < 200; ++t) {
    const Index n = 1 + static_cast<Index>(rng.below(12));
    const double density = rng.uniform(0.1, 0.7);
    DirectedWeightedGraph g(n);
    Matrix dense = Matrix::Constant(n, n, oracle::kInf);
    for (Index i = 0; i < n; ++i)
      for (Index j = 0; j < n; ++j)
        if (i != j && rng.uniform() < density) {
          // Multiples of 1/8 keep every path sum exact.
          const double w = static_cast<double>(1 + rng.below(80)) / 8.0;
          g.add_edge(i, j, w);
          dense(i, j) = std::min(dense(i, j), w);
        }
    mismatched += all_pairs_distances(g).matrix() != oracle::floyd_warshall(dense);
  }
  return {mismatched == 0, fmt("200 random digraphs (1-12 nodes), %d differ from Floyd-Warshall", mismatched)};
}

struct RollFit {
  double residual, correlation, seconds;
};

RollFit roll_fit(Index n, std::uint64_t seed) {
  const auto t0 = std::chrono::steady_clock::now();
  GeneratorSpec spec = GeneratorSpec::defaults(DatasetKind::swiss_roll);
  spec.n_points = n;
  spec.k_neighbors = 10;
  spec.alpha_tilde = 0.3;
  spec.seed = seed;
  const auto data = gen_swiss_roll(spec);
  const auto d = all_pairs_distances(build_knn_digraph(data.cloud, spec.k_neighbors));
  const auto space = RandersSpace::along_last_axis(3, 0.5);
  const auto out = run_finsler_smacof(d, WeightMatrix::uniform(n), space, SolverConfig{});
  const Matrix c = out.embedding.rowwise() - out.embedding.colwise().mean();
  Eigen::JacobiSVD<Matrix> svd(c);
  const double rms_off_plane = svd.singularValues()(2) / std::sqrt(static_cast<double>(n));
  const double corr = pearson_correlation(out.embedding.col(2), data.intrinsic.col(0));
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return {rms_off_plane / diameter(out.embedding), std::abs(corr), secs};
}

// 7
Outcome roll_flattening() {
  const RollFit fit = roll_fit(500, 0);
  const RollFit large = roll_fit(1500, 0);
  return {fit.residual <= 0.05 && fit.correlation >= 0.95 && fit.seconds <= 300.0,
          fmt("N=500: plane residual %.3f x diameter (limit 0.05), |corr(omega coord, arc length)| %.3f "
              "(limit 0.95), %.1f s; for reference N=1500: residual %.3f, |corr| %.3f",
              fit.residual, fit.correlation, fit.seconds, large.residual, large.correlation)};
}

// 8
Outcome tree_hierarchy() {
  GeneratorSpec spec = GeneratorSpec::defaults(DatasetKind::tree);
  spec.depth = 7;
  const auto tree = gen_tree(spec);
  const auto d = all_pairs_distances(tree.graph);
  const auto space = RandersSpace::along_last_axis(2, 0.5);
  const auto out = run_finsler_smacof(d, WeightMatrix::uniform(d.size()), space, SolverConfig{});
  Vector depth(d.size());
  for (Index i = 0; i < d.size(); ++i) depth(i) = tree.depth[static_cast<std::size_t>(i)];
  const double rho = spearman_correlation(depth, out.embedding.col(1));
  std::vector<double> level_mean(8, 0.0);
  std::vector<int> level_count(8, 0);
  for (Index i = 0; i < d.size(); ++i) {
    level_mean[static_cast<std::size_t>(depth(i))] += out.embedding(i, 1);
    ++level_count[static_cast<std::size_t>(depth(i))];
  }
  bool ordered = true;
  for (std::size_t l = 0; l < 8; ++l) level_mean[l] /= level_count[l];
  for (std::size_t l = 1; l < 8; ++l) ordered = ordered && level_mean[l] < level_mean[l - 1];
  return {rho <= -0.9 && ordered, fmt("depth 7 (%lld nodes): Spearman(depth, omega coord) %.3f (limit -0.9), "
                                      "level means strictly decreasing: %s",
                                      static_cast<long long>(d.size()), rho, ordered ? "yes" : "no")};
}

double roll_intrinsic_distance(const Matrix& intrinsic, Index i, Index j, double alpha_tilde) {
  const double ds = intrinsic(j, 0) - intrinsic(i, 0), dw = intrinsic(j, 1) - intrinsic(i, 1);
  return std::hypot(ds, dw) + alpha_tilde * ds;
}

struct WormholeCheck {
  Index kept, boundary, passed, beyond, beyond_exact;
  double slack, fraction, worst;
};

WormholeCheck wormhole_check(std::uint64_t seed) {
  GeneratorSpec spec = GeneratorSpec::defaults(DatasetKind::swiss_roll_hole);
  spec.n_points = 800;
  spec.seed = seed;
  const auto data = gen_swiss_roll_hole(spec);
  const double at = spec.alpha_tilde;

  const Index nf = data.full_cloud->size();
  const Matrix full = all_pairs_distances(build_knn_digraph(*data.full_cloud, spec.k_neighbors)).matrix();
  std::vector<double> control;
  control.reserve(static_cast<std::size_t>(nf * (nf - 1)));
  for (Index i = 0; i < nf; ++i)
    for (Index j = 0; j < nf; ++j)
      if (i != j) control.push_back(std::abs(full(i, j) - roll_intrinsic_distance(data.full_intrinsic, i, j, at)));
  const auto q = control.begin() + static_cast<std::ptrdiff_t>(0.99 * static_cast<double>(control.size() - 1));
  std::nth_element(control.begin(), q, control.end());

  WormholeCheck c{data.cloud.size(), static_cast<Index>(data.boundary.indices().size()), 0, 0, 0, *q, 0.0, 0.0};
  const Index n = c.kept;
  const auto partial = all_pairs_distances(build_knn_digraph(data.cloud, spec.k_neighbors));
  const auto w = wormhole_weights(partial, data.boundary, data.cloud.points(), WormholeConfig::from_alpha_max(at));
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j) {
      if (i == j || w(i, j) == 0.0) continue;
      ++c.passed;
      const Index fi = data.kept[static_cast<std::size_t>(i)], fj = data.kept[static_cast<std::size_t>(j)];
      const double err = std::abs(partial(i, j) - full(fi, fj));
      c.worst = std::max(c.worst, err);
      c.beyond += err > c.slack;
      c.beyond_exact += std::abs(partial(i, j) - roll_intrinsic_distance(data.intrinsic, i, j, at)) > c.slack;
    }
  c.fraction = static_cast<double>(c.passed) / static_cast<double>(n * (n - 1));
  return c;
}

// 9
Outcome wormhole_no_false_alarm() {
  const WormholeCheck c = wormhole_check(0);
  std::string others;
  for (std::uint64_t seed : {1, 2}) {
    const WormholeCheck o = wormhole_check(seed);
    others += fmt("; for reference seed %llu: slack %.3f, passed %.1f%%, %lld beyond",
                  static_cast<unsigned long long>(seed), o.slack, 100.0 * o.fraction, static_cast<long long>(o.beyond));
  }
  return {c.beyond == 0 && c.fraction >= 0.5,
          fmt("N=800 seed 0 (%lld kept, %lld boundary): slack %.3f, passed %.1f%% of pairs (limit 50%%), %lld "
              "passed pairs differ from the full-sample graph by more than the slack (max %.3f), %lld differ from "
              "the exact roll distance by more than the slack",
              static_cast<long long>(c.kept), static_cast<long long>(c.boundary), c.slack, 100.0 * c.fraction,
              static_cast<long long>(c.beyond), c.worst, static_cast<long long>(c.beyond_exact)) +
              others};
}

// 10
Outcome zermelo_conversion() {
  Rng rng(1010);
  double worst = 0.0;
  bool identity_exact = true;
  for (int t = 0; t < 1000; ++t) {
    const Index m = 1 + static_cast<Index>(rng.below(5));
    const Matrix a = random_points(rng, m, m);
    Matrix tensor = a * a.transpose() + 0.1 * Matrix::Identity(m, m);
    tensor = 0.5 * (tensor + tensor.transpose()).eval();
    Vector v = random_points(rng, m, 1);
    v *= rng.uniform(0.0, 0.95) / std::sqrt(v.dot(tensor * v));
    const ZermeloField field(tensor, v);
    const auto g = zermelo_to_randers(field);
    const Vector u = random_points(rng, m, 1);
    worst = std::max(worst, std::abs(field.background_norm(u / g(u) - v) - 1.0));
    const auto still = zermelo_to_randers(ZermeloField(tensor, Vector::Zero(m)));
    identity_exact = identity_exact && still.tensor() == tensor && still.omega() == Vector::Zero(m);
  }
  return {worst <= 1e-10 && identity_exact, fmt("1000 triples, max |R(u/F(u) - v) - 1| = %.2e (limit 1e-10), "
                                                "zero current returns M exactly: %s",
                                                worst, identity_exact ? "yes" : "no")};
}

// 11
Outcome link_direction() {
  double min_finsler = 1.0, min_euclid = 1.0, max_euclid = 0.0;
  for (int t = 0; t < 20; ++t) {
    GeneratorSpec spec = GeneratorSpec::defaults(DatasetKind::tree);
    spec.depth = t % 2 ? 5 : 4;
    const auto tree = gen_tree(spec);
    const auto seed = static_cast<std::uint64_t>(t);
    const auto finsler =
        link_prediction_eval(tree.graph, RandersSpace::along_last_axis(2, 0.5), FermiDiracParams{}, seed);
    const auto euclid = link_prediction_eval(tree.graph, RandersSpace::euclidean(2), FermiDiracParams{}, seed);
    min_finsler = std::min(min_finsler, finsler.test.direction_auc);
    min_euclid = std::min(min_euclid, euclid.test.direction_auc);
    max_euclid = std::max(max_euclid, euclid.test.direction_auc);
  }
  const bool pass = min_finsler >= 0.8 && min_euclid >= 0.4 && max_euclid <= 0.6;
  return {pass, fmt("20 split seeds on depth 4/5 trees: min Finsler direction AUC %.3f (limit 0.8), Euclidean "
                    "range [%.3f, %.3f] (limit 0.5 +- 0.1)",
                    min_finsler, min_euclid, max_euclid)};
}

// 12
Outcome pipeline_determinism() {
  const fs::path root = fs::temp_directory_path() / "fmds_acceptance_determinism";
  fs::remove_all(root);
  const std::vector<std::vector<std::string>> runs{
      {"--kind", "tree", "--depth", "5"},
      {"--kind", "swiss_roll", "--n-points", "300"},
      {"--kind", "swiss_roll_hole", "--n-points", "400"},
      {"--kind", "current_map", "--n-points", "200", "--init", "random", "--init-seed", "5"},
      {"--kind", "river", "--n-points", "200", "--solver", "iterative"},
  };
  int differing = 0, failed = 0;
  std::size_t files = 0;
  for (std::size_t r = 0; r < runs.size(); ++r) {
    std::vector<fs::path> dirs;
    for (int rep = 0; rep < 2; ++rep) {
      const fs::path dir = root / (std::to_string(r) + "_" + std::to_string(rep));
      std::vector<std::string> args{"pipeline", "--seed", "3", "--max-iters", "100", "--out-dir", dir.string()};
      args.insert(args.end(), runs[r].begin(), runs[r].end());
      std::ostringstream out, err;
      failed += cli::run_cli(args, out, err) != 0;
      dirs.push_back(dir);
    }
    for (const auto& entry : fs::directory_iterator(dirs[0])) {
      ++files;
      const fs::path twin = dirs[1] / entry.path().filename();
      differing += !fs::exists(twin) || io::read_text(entry.path()) != io::read_text(twin);
    }
  }
  fs::remove_all(root);
  return {failed == 0 && differing == 0 && files > 0,
          fmt("5 dataset kinds run twice: %zu files compared, %d differ, %d runs failed", files, differing, failed)};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"majorization monotonicity", majorization_monotonicity},
      {"classical reduction", classical_reduction},
      {"stress identity", stress_identity},
      {"symmetric data flattens orthogonally to omega", symmetric_flattening},
      {"flatness and triangle properties", metric_properties},
      {"geodesic oracle equivalence", geodesic_oracle},
      {"Swiss roll flattening", roll_flattening},
      {"tree hierarchy", tree_hierarchy},
      {"wormhole no false alarm", wormhole_no_false_alarm},
      {"Zermelo conversion", zermelo_conversion},
      {"link prediction direction signal", link_direction},
      {"pipeline determinism", pipeline_determinism},
  };
  int failures = 0;
  for (std::size_t k = 0; k < criteria.size(); ++k) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[k].second();
    } catch (const std::exception& e) {
      o = {false, std::string("threw: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    failures += !o.pass;
    std::printf("%-4s %2zu  %s: %s [%.1f s]\n", o.pass ? "PASS" : "FAIL", k + 1, criteria[k].first.c_str(),
                o.detail.c_str(), secs);
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
