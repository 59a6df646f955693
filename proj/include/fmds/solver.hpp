#pragma once

// Finsler stress minimization in the canonical Randers space.
//
// With ordered-pair sums, Δ_ij = x_j - x_i, symmetric W, and
// d_ij = ||Δ_ij|| + ωᵀΔ_ij, the stress expands to
//
//   σ² = 2 tr(XᵀVX) + 2 tr(XᵀVXωωᵀ) + 2 tr(CXᵀ) - 4 tr(XᵀB(X)X) + Σ w_ij D_ij²
//
// where the cross term Σ w ||Δ|| ωᵀΔ cancels by antisymmetry, B carries the
// symmetrized dissimilarities over Euclidean lengths, and
// C = (W⊙D - Wᵀ⊙Dᵀ) 1 ωᵀ. Majorizing -tr(XᵀB(X)X) by Cauchy-Schwarz gives
// the update
//
//   V X⁺ (I + ωωᵀ) = B(X) X - C / 2,
//
// i.e. vec(X⁺) = K† vec(B(X)X - C/2) with K = (I + ωωᵀ) ⊗ V.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "fmds/dissimilarity.hpp"
#include "fmds/error.hpp"
#include "fmds/geometry.hpp"
#include "fmds/linalg.hpp"
#include "fmds/random.hpp"

namespace fmds {

/// Rows are embedded points.
using Embedding = Matrix;

/// Symmetric nonnegative stress weights with zero diagonal.
class WeightMatrix {
 public:
  WeightMatrix() = default;
  explicit WeightMatrix(Matrix w) : w_(std::move(w)) {
    detail::require(w_.rows() == w_.cols(), "WeightMatrix: matrix must be square");
    for (Index i = 0; i < w_.rows(); ++i) {
      detail::require(w_(i, i) == 0.0, "WeightMatrix: diagonal must be zero");
      for (Index j = 0; j < w_.cols(); ++j) {
        detail::require(std::isfinite(w_(i, j)) && w_(i, j) >= 0.0,
                        "WeightMatrix: weights must be finite and nonnegative");
        detail::require(w_(i, j) == w_(j, i), "WeightMatrix: weights must be symmetric");
      }
    }
  }

  static WeightMatrix uniform(Index n) {
    Matrix w = Matrix::Ones(n, n);
    w.diagonal().setZero();
    return WeightMatrix(std::move(w));
  }

  Index size() const { return w_.rows(); }
  double operator()(Index i, Index j) const { return w_(i, j); }
  const Matrix& matrix() const { return w_; }

 private:
  Matrix w_;
};

enum class LinearSolverKind { automatic, direct, iterative };
enum class Initialization { classical, symmetric_plus_one, random };

struct SolverConfig {
  int max_iters = 500;
  double rel_stress_tol = 1e-7;
  /// Lower bound on pair lengths in B; unset means 1e-9 * max finite D.
  std::optional<double> distance_floor;
  LinearSolverKind linear_solver = LinearSolverKind::automatic;
  /// Solve the Vᵀ-premultiplied system. Unset follows the linear solver
  /// (stabilized exactly when the iterative solver is used).
  std::optional<bool> stabilized_normal_equations;
  Initialization init = Initialization::classical;
  std::uint64_t seed = 0;
  double gmres_tol = 1e-10;
  /// automatic switches to stabilized GMRES above this many points.
  Index direct_max_points = 500;
};

struct SolveReport {
  std::vector<double> stress_history;  // σ² before the first step, then after each
  int iterations_run = 0;
  bool converged = false;
  double final_stress = 0.0;
  int linear_fallbacks = 0;  // iterative solves that fell back to least squares
};

struct SolveOutput {
  Embedding embedding;
  SolveReport report;
};

namespace detail {

inline void check_problem(const DissimilarityMatrix& d, const WeightMatrix& w) {
  require(d.size() == w.size(), "dissimilarity and weight sizes differ");
  for (Index i = 0; i < d.size(); ++i) {
    for (Index j = 0; j < d.size(); ++j) {
      if (w(i, j) > 0.0 && !std::isfinite(d(i, j))) {
        throw std::invalid_argument("infinite dissimilarity (" + std::to_string(i) + "," +
                                    std::to_string(j) + ") carries a nonzero weight");
      }
    }
  }
}

inline void check_embedding(const Embedding& x, const DissimilarityMatrix& d, const RandersSpace& space) {
  require(x.rows() == d.size(), "embedding and dissimilarity sizes differ");
  require(x.cols() == space.dim(), "embedding dimension differs from the Randers space");
  if (!x.allFinite()) throw NumericError("embedding has non-finite coordinates");
}

inline double max_finite(const Matrix& d) {
  double best = 0.0;
  for (Index i = 0; i < d.size(); ++i) {
    const double v = d.data()[i];
    if (std::isfinite(v)) best = std::max(best, v);
  }
  return best;
}

}  // namespace detail

/// Σ_ij w_ij (d_F(x_i, x_j) - D_ij)² over ordered pairs.
inline double finsler_stress(const Embedding& x, const DissimilarityMatrix& d,
                             const WeightMatrix& w, const RandersSpace& space) {
  detail::check_problem(d, w);
  detail::check_embedding(x, d, space);
  double total = 0.0;
  for (Index i = 0; i < x.rows(); ++i) {
    for (Index j = 0; j < x.rows(); ++j) {
      if (i == j || w(i, j) == 0.0) continue;
      const double r = canonical_distance(space, x.row(i), x.row(j)) - d(i, j);
      total += w(i, j) * r * r;
    }
  }
  return total;
}

/// Σ w_ij D_ij², the stress of the all-collapsed configuration.
inline double stress_scale(const DissimilarityMatrix& d, const WeightMatrix& w) {
  double total = 0.0;
  for (Index i = 0; i < d.size(); ++i) {
    for (Index j = 0; j < d.size(); ++j) {
      if (w(i, j) > 0.0) total += w(i, j) * d(i, j) * d(i, j);
    }
  }
  return total;
}

/// V_ij = -w_ij off the diagonal, V_ii = Σ_{k≠i} w_ik.
inline Matrix compute_V(const WeightMatrix& w) {
  Matrix v = -w.matrix();
  for (Index i = 0; i < v.rows(); ++i) {
    v(i, i) = 0.0;
    v(i, i) = w.matrix().row(i).sum();
  }
  return v;
}

/// B_ij = -w_ij (D_ij + D_ji)/2 / max(||x_i - x_j||, floor) off the diagonal,
/// B_ii = -Σ_{k≠i} B_ik. Symmetric with zero row sums.
inline Matrix compute_B(const Embedding& x, const DissimilarityMatrix& d, const WeightMatrix& w,
                        double floor) {
  detail::require(floor > 0.0, "compute_B: distance floor must be positive");
  detail::require(x.rows() == d.size() && d.size() == w.size(), "compute_B: size mismatch");
  const Index n = x.rows();
  Matrix b = Matrix::Zero(n, n);
  for (Index i = 0; i < n; ++i) {
    for (Index j = i + 1; j < n; ++j) {
      if (w(i, j) == 0.0) continue;
      const double len = std::max((x.row(i) - x.row(j)).norm(), floor);
      const double v = -w(i, j) * 0.5 * (d(i, j) + d(j, i)) / len;
      b(i, j) = v;
      b(j, i) = v;
    }
  }
  for (Index i = 0; i < n; ++i) b(i, i) = -b.row(i).sum();
  return b;
}

/// C = (W⊙D - Wᵀ⊙Dᵀ) 1 ωᵀ, an N×m matrix that vanishes for symmetric D.
inline Matrix compute_C(const DissimilarityMatrix& d, const WeightMatrix& w, const RandersSpace& space) {
  detail::require(d.size() == w.size(), "compute_C: size mismatch");
  const Index n = d.size();
  Vector net = Vector::Zero(n);
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < n; ++j) {
      if (w(i, j) == 0.0) continue;
      net(i) += w(i, j) * d(i, j) - w(j, i) * d(j, i);
    }
  }
  return net * space.omega().transpose();
}

/// The trace form of the stress given in the header comment. Agrees with
/// finsler_stress up to rounding.
inline double stress_trace_form(const Embedding& x, const DissimilarityMatrix& d,
                                const WeightMatrix& w, const RandersSpace& space) {
  detail::check_problem(d, w);
  detail::check_embedding(x, d, space);
  const Matrix v = compute_V(w);
  const Matrix b = compute_B(x, d, w, std::numeric_limits<double>::min());
  const Matrix c = compute_C(d, w, space);
  const Matrix vx = v * x;
  const Vector xw = x * space.omega();
  const double t_v = (x.transpose() * vx).trace();
  const double t_drift = xw.dot(v * xw);
  const double t_c = (c * x.transpose()).trace();
  const double t_b = (x.transpose() * b * x).trace();
  return 2.0 * t_v + 2.0 * t_drift + 2.0 * t_c - 4.0 * t_b + stress_scale(d, w);
}

/// Analytic gradient of finsler_stress. Coincident pairs use the zero
/// subgradient of the norm.
inline Matrix stress_gradient(const Embedding& x, const DissimilarityMatrix& d, const WeightMatrix& w,
                              const RandersSpace& space) {
  detail::check_embedding(x, d, space);
  Matrix g = Matrix::Zero(x.rows(), x.cols());
  const Vector& omega = space.omega();
  for (Index i = 0; i < x.rows(); ++i) {
    for (Index j = 0; j < x.rows(); ++j) {
      if (i == j || w(i, j) == 0.0) continue;
      const Vector delta = (x.row(j) - x.row(i)).transpose();
      const double len = delta.norm();
      const double residual = len + omega.dot(delta) - d(i, j);
      Vector dir = omega;
      if (len > 0.0) dir += delta / len;
      const Vector term = 2.0 * w(i, j) * residual * dir;
      g.row(j) += term.transpose();
      g.row(i) -= term.transpose();
    }
  }
  return g;
}

/// Classical scaling of the symmetrized dissimilarities: top-m eigenpairs
/// of -½ J (Dˢ∘Dˢ) J, X = U diag(sqrt(max(λ, 0))). Each eigenvector is
/// signed so its largest-magnitude entry (first on ties) is positive.
inline Embedding classical_mds_init(const DissimilarityMatrix& d, Index m) {
  const Index n = d.size();
  detail::require(m >= 0 && m <= n, "classical_mds_init: target dimension exceeds point count");
  detail::require(d.is_finite(), "classical_mds_init: dissimilarities must be finite");
  const Matrix sym = d.symmetrized();
  Matrix sq = sym.cwiseProduct(sym);
  // Double centering without forming J.
  const Vector row_mean = sq.rowwise().mean();
  const Vector col_mean = sq.colwise().mean().transpose();
  const double grand = sq.mean();
  Matrix gram(n, n);
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < n; ++j) {
      gram(i, j) = -0.5 * (sq(i, j) - row_mean(i) - col_mean(j) + grand);
    }
  }
  gram = 0.5 * (gram + gram.transpose());
  const auto pairs = linalg::top_eigenpairs(gram, m);
  Embedding x(n, m);
  for (Index c = 0; c < m; ++c) {
    Vector u = pairs.vectors.col(c);
    Index pivot = 0;
    for (Index i = 1; i < n; ++i) {
      if (std::abs(u(i)) > std::abs(u(pivot))) pivot = i;
    }
    if (u(pivot) < 0.0) u = -u;
    x.col(c) = u * std::sqrt(std::max(pairs.values(c), 0.0));
  }
  return x;
}

/// Orthonormal basis (columns) of the hyperplane orthogonal to omega; the
/// first dim-1 coordinate axes when omega = 0.
inline Matrix drift_orthogonal_basis(const RandersSpace& space) {
  const Index m = space.dim();
  if (space.alpha() == 0.0) return Matrix::Identity(m, m).leftCols(m - 1);
  Eigen::HouseholderQR<Matrix> qr(Matrix(space.omega()));
  const Matrix q = qr.householderQ() * Matrix::Identity(m, m);
  return q.rightCols(m - 1);
}

/// Starting configuration per config.init. symmetric_plus_one embeds Dˢ
/// classically into dim-1 dimensions inside the hyperplane orthogonal to ω.
inline Embedding initial_embedding(const DissimilarityMatrix& d, const RandersSpace& space,
                                   const SolverConfig& config) {
  const Index m = space.dim();
  switch (config.init) {
    case Initialization::classical:
      return classical_mds_init(d, m);
    case Initialization::symmetric_plus_one: {
      if (m == 1) return Embedding::Zero(d.size(), 1);
      const Embedding low = classical_mds_init(d, m - 1);
      return low * drift_orthogonal_basis(space).transpose();
    }
    case Initialization::random: {
      Rng rng(config.seed);
      double scale = 0.0;
      Index count = 0;
      for (Index i = 0; i < d.size(); ++i) {
        for (Index j = 0; j < d.size(); ++j) {
          if (i != j && std::isfinite(d(i, j))) {
            scale += d(i, j);
            ++count;
          }
        }
      }
      scale = count > 0 ? scale / static_cast<double>(count) : 1.0;
      Embedding x(d.size(), m);
      for (Index i = 0; i < x.rows(); ++i) {
        for (Index c = 0; c < m; ++c) x(i, c) = rng.uniform(-scale, scale);
      }
      return x;
    }
  }
  return classical_mds_init(d, m);
}

/// Majorization iteration bound to one (D, W, space). V and, for direct
/// solves, the pseudo-inverse of the system matrix are computed once.
class FinslerSmacof {
 public:
  FinslerSmacof(DissimilarityMatrix d, WeightMatrix w, RandersSpace space, SolverConfig config = {})
      : d_(std::move(d)), w_(std::move(w)), space_(std::move(space)), config_(std::move(config)) {
    detail::check_problem(d_, w_);
    detail::require(config_.rel_stress_tol > 0.0, "SolverConfig: rel_stress_tol must be positive");
    detail::require(config_.max_iters >= 0, "SolverConfig: max_iters must be nonnegative");
    const double max_d = detail::max_finite(d_.matrix());
    floor_ = config_.distance_floor.value_or(max_d > 0.0 ? 1e-9 * max_d : 1e-12);
    detail::require(floor_ > 0.0, "SolverConfig: distance_floor must be positive");

    iterative_ = config_.linear_solver == LinearSolverKind::iterative ||
                 (config_.linear_solver == LinearSolverKind::automatic &&
                  d_.size() > config_.direct_max_points);
    stabilized_ = config_.stabilized_normal_equations.value_or(iterative_);

    v_ = compute_V(w_);
    system_ = stabilized_ ? Matrix(v_.transpose() * v_) : v_;
    half_c_ = 0.5 * compute_C(d_, w_, space_);
    const Matrix gram = linalg::drift_gram(space_.omega());
    drift_inverse_ = gram.inverse();
    scale_ = stress_scale(d_, w_);
  }

  const DissimilarityMatrix& dissimilarities() const { return d_; }
  const WeightMatrix& weights() const { return w_; }
  const RandersSpace& space() const { return space_; }
  const Matrix& V() const { return v_; }
  double distance_floor() const { return floor_; }
  bool uses_iterative_solver() const { return iterative_; }
  bool uses_stabilized_system() const { return stabilized_; }

  double stress(const Embedding& x) const { return finsler_stress(x, d_, w_, space_); }

  /// Right-hand side B(X)X - C/2, premultiplied by Vᵀ in stabilized mode.
  Matrix right_hand_side(const Embedding& x) const {
    Matrix r = compute_B(x, d_, w_, floor_) * x - half_c_;
    if (stabilized_) r = v_.transpose() * r;
    return r;
  }

  /// Minimum-norm solution of S X (I + ωωᵀ) = R via the cached pseudo-inverse.
  Embedding solve_direct(const Matrix& rhs) const {
    if (!pinv_) pinv_ = linalg::symmetric_pseudo_inverse(system_);
    return (*pinv_) * rhs * drift_inverse_;
  }

  /// Column-wise minimum-norm least squares on S, used when GMRES fails.
  Embedding solve_least_squares(const Matrix& rhs) const {
    const Matrix target = rhs * drift_inverse_;
    Embedding x(target.rows(), target.cols());
    for (Index c = 0; c < target.cols(); ++c) {
      x.col(c) = linalg::solve_least_squares(system_, target.col(c)).x;
    }
    return x;
  }

  /// GMRES on the Kronecker operator; nullopt when it does not converge.
  std::optional<Embedding> solve_iterative(const Matrix& rhs) const {
    const Index n = rhs.rows(), m = rhs.cols();
    const Vector& omega = space_.omega();
    auto apply = [&](const Vector& v) {
      return linalg::vec(linalg::kronecker_apply(system_, omega, linalg::unvec(v, n, m)));
    };
    linalg::IterativeOptions opts;
    opts.tol = config_.gmres_tol;
    opts.max_iter = static_cast<int>(10 * n * m);
    const auto result = linalg::iterative_solve(apply, linalg::vec(rhs), opts);
    if (!result.converged) return std::nullopt;
    return linalg::unvec(result.x, n, m);
  }

  /// One majorization step from x.
  Embedding step(const Embedding& x) const {
    detail::check_embedding(x, d_, space_);
    const Matrix rhs = right_hand_side(x);
    if (!rhs.allFinite()) throw NumericError("smacof_step: NaN in B(X)X - C");
    Embedding next;
    if (iterative_) {
      auto solved = solve_iterative(rhs);
      if (solved) {
        next = std::move(*solved);
        // Majorization guarantees descent only for the exact minimizer.
        if (stress(next) > stress(x) * (1.0 + 1e-9)) solved.reset();
      }
      if (!solved) {
        ++fallbacks_;
        next = solve_least_squares(rhs);
      }
    } else {
      next = solve_direct(rhs);
    }
    if (!next.allFinite()) throw NumericError("smacof_step: NaN in the updated embedding");
    return next;
  }

  /// Iterates from x0 until the relative one-step decrease drops below
  /// rel_stress_tol or max_iters steps have run.
  SolveOutput run(Embedding x0) const {
    detail::check_embedding(x0, d_, space_);
    fallbacks_ = 0;
    SolveOutput out;
    out.embedding = std::move(x0);
    double current = stress(out.embedding);
    out.report.stress_history.push_back(current);
    const double exact_fit = 1e-24 * scale_;
    if (current <= exact_fit) out.report.converged = true;
    while (!out.report.converged && out.report.iterations_run < config_.max_iters) {
      Embedding next = step(out.embedding);
      const double next_stress = stress(next);
      if (!std::isfinite(next_stress)) throw NumericError("smacof: stress became non-finite");
      out.report.stress_history.push_back(next_stress);
      ++out.report.iterations_run;
      const double decrease = (current - next_stress) / current;
      out.embedding = std::move(next);
      current = next_stress;
      if (decrease < config_.rel_stress_tol || current <= exact_fit) out.report.converged = true;
    }
    out.report.final_stress = current;
    out.report.linear_fallbacks = fallbacks_;
    return out;
  }

 private:
  DissimilarityMatrix d_;
  WeightMatrix w_;
  RandersSpace space_;
  SolverConfig config_;
  double floor_ = 0.0;
  double scale_ = 0.0;
  bool iterative_ = false;
  bool stabilized_ = false;
  Matrix v_;
  Matrix system_;
  Matrix half_c_;
  Matrix drift_inverse_;
  mutable std::optional<Matrix> pinv_;
  mutable int fallbacks_ = 0;
};

/// One Finsler SMACOF update from x.
inline Embedding smacof_step(const Embedding& x, const DissimilarityMatrix& d, const WeightMatrix& w,
                             const RandersSpace& space, const SolverConfig& config = {}) {
  return FinslerSmacof(d, w, space, config).step(x);
}

/// Initialization per config.init followed by majorization. The embedding
/// dimension is space.dim().
inline SolveOutput run_finsler_smacof(const DissimilarityMatrix& d, const WeightMatrix& w,
                                      const RandersSpace& space, const SolverConfig& config = {}) {
  FinslerSmacof solver(d, w, space, config);
  return solver.run(initial_embedding(d, space, config));
}

/// Full-batch gradient descent with Armijo backtracking, from the same
/// initialization as run_finsler_smacof. Used to cross-check the
/// majorization solver.
inline SolveOutput gradient_descent_solve(const DissimilarityMatrix& d, const WeightMatrix& w,
                                          const RandersSpace& space, const SolverConfig& config = {}) {
  detail::check_problem(d, w);
  SolveOutput out;
  out.embedding = initial_embedding(d, space, config);
  double current = finsler_stress(out.embedding, d, w, space);
  out.report.stress_history.push_back(current);
  const double scale = stress_scale(d, w);
  double step = 1.0 / std::max(1.0, 4.0 * compute_V(w).diagonal().maxCoeff() * (1.0 + space.alpha()));
  if (current <= 1e-24 * scale) out.report.converged = true;
  while (!out.report.converged && out.report.iterations_run < config.max_iters) {
    const Matrix g = stress_gradient(out.embedding, d, w, space);
    const double g_sq = g.squaredNorm();
    if (!std::isfinite(g_sq)) throw NumericError("gradient_descent_solve: non-finite gradient");
    if (g_sq == 0.0) {
      out.report.converged = true;
      break;
    }
    double t = step * 2.0;
    Embedding trial;
    double trial_stress = 0.0;
    bool accepted = false;
    for (int k = 0; k < 60; ++k) {
      trial = out.embedding - t * g;
      trial_stress = finsler_stress(trial, d, w, space);
      if (trial_stress <= current - 1e-4 * t * g_sq) {
        accepted = true;
        break;
      }
      t *= 0.5;
    }
    if (!accepted) {
      // No descent along -g at any tested step: numerically stationary.
      out.report.converged = true;
      break;
    }
    step = t;
    out.report.stress_history.push_back(trial_stress);
    ++out.report.iterations_run;
    const double decrease = (current - trial_stress) / current;
    out.embedding = std::move(trial);
    current = trial_stress;
    if (decrease < config.rel_stress_tol || current <= 1e-24 * scale) out.report.converged = true;
  }
  out.report.final_stress = current;
  return out;
}

/// σ² / Σ w D², the fraction of the collapsed-configuration stress left.
inline double normalized_stress(const Embedding& x, const DissimilarityMatrix& d, const WeightMatrix& w,
                                const RandersSpace& space) {
  const double scale = stress_scale(d, w);
  return scale > 0.0 ? finsler_stress(x, d, w, space) / scale : 0.0;
}

}  // namespace fmds
