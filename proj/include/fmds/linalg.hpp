#pragma once

// Dense linear algebra used by the embedding solver: symmetric eigenpairs,
// minimum-norm least squares, restarted GMRES, and the Kronecker-structured
// operator (I + w w^T) (x) S applied without materializing it.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "fmds/error.hpp"

namespace fmds {

using Index = Eigen::Index;
using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

namespace linalg {

/// Largest |A_ij - A_ji|; zero for symmetric input.
inline double max_asymmetry(const Matrix& a) {
  if (a.rows() != a.cols()) return std::numeric_limits<double>::infinity();
  return (a - a.transpose()).cwiseAbs().maxCoeff();
}

inline bool all_finite(const Matrix& a) { return a.allFinite(); }

struct EigenPairs {
  Vector values;   // descending
  Matrix vectors;  // one eigenvector per column
};

/// Top-k eigenpairs of a symmetric matrix, eigenvalues in descending order.
inline EigenPairs top_eigenpairs(const Matrix& a, Index k) {
  detail::require(a.rows() == a.cols(), "top_eigenpairs: matrix must be square");
  detail::require(k >= 0 && k <= a.rows(), "top_eigenpairs: k exceeds matrix size");
  detail::require(a.allFinite(), "top_eigenpairs: non-finite entry");
  detail::require(a.rows() == 0 || max_asymmetry(a) <= 1e-8,
                  "top_eigenpairs: matrix is not symmetric within 1e-8");
  EigenPairs out;
  if (a.rows() == 0 || k == 0) {
    out.values.resize(0);
    out.vectors.resize(a.rows(), 0);
    return out;
  }
  Eigen::SelfAdjointEigenSolver<Matrix> solver(a);
  if (solver.info() != Eigen::Success) {
    throw NumericError("top_eigenpairs: no convergence within the QR iteration cap of " +
                       std::to_string(30 * a.rows()) + " sweeps");
  }
  // Eigen returns ascending order.
  const Index n = a.rows();
  out.values.resize(k);
  out.vectors.resize(n, k);
  for (Index c = 0; c < k; ++c) {
    out.values(c) = solver.eigenvalues()(n - 1 - c);
    out.vectors.col(c) = solver.eigenvectors().col(n - 1 - c);
  }
  return out;
}

/// Moore-Penrose pseudo-inverse of a symmetric matrix. Eigenvalues below
/// rel_tol * max|lambda| are treated as zero.
inline Matrix symmetric_pseudo_inverse(const Matrix& a, double rel_tol = 1e-10) {
  detail::require(a.rows() == a.cols(), "symmetric_pseudo_inverse: matrix must be square");
  if (a.rows() == 0) return a;
  Eigen::SelfAdjointEigenSolver<Matrix> solver(a);
  if (solver.info() != Eigen::Success) {
    throw NumericError("symmetric_pseudo_inverse: eigen-decomposition failed");
  }
  const Vector& lambda = solver.eigenvalues();
  const double cutoff = rel_tol * std::max(lambda.cwiseAbs().maxCoeff(), 0.0);
  Vector inv = Vector::Zero(lambda.size());
  for (Index i = 0; i < lambda.size(); ++i) {
    if (std::abs(lambda(i)) > cutoff) inv(i) = 1.0 / lambda(i);
  }
  const Matrix& u = solver.eigenvectors();
  return u * inv.asDiagonal() * u.transpose();
}

struct SolveResult {
  Vector x;
  double residual = 0.0;  // ||A x - b||_2 recomputed from x
  int iterations = 0;
  bool converged = true;
};

/// Minimum-norm minimizer of ||A x - b||_2.
inline SolveResult solve_least_squares(const Matrix& a, const Vector& b) {
  detail::require(a.rows() == b.size(), "solve_least_squares: dimension mismatch");
  detail::require(a.allFinite() && b.allFinite(), "solve_least_squares: non-finite input");
  SolveResult out;
  if (a.cols() == 0) {
    out.x.resize(0);
    out.residual = b.norm();
    return out;
  }
  Eigen::CompleteOrthogonalDecomposition<Matrix> cod(a);
  out.x = cod.solve(b);
  out.residual = (a * out.x - b).norm();
  out.iterations = 1;
  return out;
}

using LinearOperator = std::function<Vector(const Vector&)>;

struct IterativeOptions {
  double tol = 1e-10;
  int max_iter = 0;  // 0 selects 10 * dim(b)
  int restart = 50;
};

/// Restarted GMRES starting from x0 = 0. For a symmetric singular but
/// consistent system the iterates stay in range(A), so the answer is the
/// minimum-norm solution. Non-convergence is reported, not thrown.
inline SolveResult iterative_solve(const LinearOperator& apply, const Vector& b,
                                   const IterativeOptions& options = {}) {
  detail::require(options.tol > 0.0, "iterative_solve: tol must be positive");
  detail::require(options.restart > 0, "iterative_solve: restart must be positive");
  detail::require(b.allFinite(), "iterative_solve: non-finite right-hand side");
  const Index n = b.size();
  const int max_iter = options.max_iter > 0 ? options.max_iter : static_cast<int>(10 * n);
  SolveResult out;
  out.x = Vector::Zero(n);
  const double b_norm = b.norm();
  if (n == 0 || b_norm == 0.0) {
    out.residual = 0.0;
    return out;
  }
  const double target = options.tol * b_norm;
  auto apply_checked = [&](const Vector& v) {
    Vector w = apply(v);
    detail::require(w.size() == n, "iterative_solve: operator changed dimension");
    if (!w.allFinite()) throw NumericError("iterative_solve: NaN or Inf from operator");
    return w;
  };

  Vector r = b;
  double beta = b_norm;
  int total = 0;
  const int restart = static_cast<int>(std::min<Index>(options.restart, n));
  Matrix basis(n, restart + 1);
  Matrix hess = Matrix::Zero(restart + 1, restart);
  Vector cs(restart), sn(restart), g(restart + 1);

  while (total < max_iter) {
    basis.col(0) = r / beta;
    hess.setZero();
    g.setZero();
    g(0) = beta;
    int used = 0;
    bool breakdown = false;
    for (int j = 0; j < restart && total < max_iter; ++j) {
      Vector w = apply_checked(basis.col(j));
      ++total;
      for (int i = 0; i <= j; ++i) {
        hess(i, j) = basis.col(i).dot(w);
        w -= hess(i, j) * basis.col(i);
      }
      const double h_next = w.norm();
      hess(j + 1, j) = h_next;
      for (int i = 0; i < j; ++i) {
        const double t = cs(i) * hess(i, j) + sn(i) * hess(i + 1, j);
        hess(i + 1, j) = -sn(i) * hess(i, j) + cs(i) * hess(i + 1, j);
        hess(i, j) = t;
      }
      const double denom = std::hypot(hess(j, j), hess(j + 1, j));
      if (denom == 0.0) {
        cs(j) = 1.0;
        sn(j) = 0.0;
      } else {
        cs(j) = hess(j, j) / denom;
        sn(j) = hess(j + 1, j) / denom;
      }
      hess(j, j) = cs(j) * hess(j, j) + sn(j) * hess(j + 1, j);
      hess(j + 1, j) = 0.0;
      g(j + 1) = -sn(j) * g(j);
      g(j) = cs(j) * g(j);
      used = j + 1;
      breakdown = h_next <= 1e-14 * b_norm;
      if (!breakdown) basis.col(j + 1) = w / h_next;
      if (std::abs(g(j + 1)) <= target || breakdown) break;
    }
    // Back-substitution on the leading used×used triangle, skipping
    // columns whose pivot vanished (rank-deficient Krylov block).
    Vector y = Vector::Zero(used);
    for (int i = used - 1; i >= 0; --i) {
      double acc = g(i);
      for (int c = i + 1; c < used; ++c) acc -= hess(i, c) * y(c);
      y(i) = std::abs(hess(i, i)) > 1e-300 ? acc / hess(i, i) : 0.0;
    }
    out.x += basis.leftCols(used) * y;
    if (!out.x.allFinite()) throw NumericError("iterative_solve: NaN in iterate");
    r = b - apply_checked(out.x);
    beta = r.norm();
    // A breakdown short of the tolerance means b is outside range(A).
    if (beta <= target || used == 0 || breakdown) break;
  }
  out.iterations = total;
  out.residual = (b - apply(out.x)).norm();
  out.converged = out.residual <= target;
  return out;
}

/// Column-stacking vectorization and its inverse.
inline Vector vec(const Matrix& x) { return Eigen::Map<const Vector>(x.data(), x.size()); }

inline Matrix unvec(const Vector& v, Index rows, Index cols) {
  detail::require(v.size() == rows * cols, "unvec: size mismatch");
  return Eigen::Map<const Matrix>(v.data(), rows, cols);
}

/// (I_m + w w^T) as an m×m matrix.
inline Matrix drift_gram(const Vector& omega) {
  return Matrix::Identity(omega.size(), omega.size()) + omega * omega.transpose();
}

/// Applies K = (I_m + w w^T) (x) S to vec(X) through X -> S X (I_m + w w^T).
inline Matrix kronecker_apply(const Matrix& s, const Vector& omega, const Matrix& x) {
  detail::require(s.cols() == x.rows() && x.cols() == omega.size(),
                  "kronecker_apply: dimension mismatch");
  Matrix sx = s * x;
  return sx + (sx * omega) * omega.transpose();
}

/// Explicit Kronecker product, for small cross-checks only.
inline Matrix kronecker(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Index i = 0; i < a.rows(); ++i) {
    for (Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

}  // namespace linalg
}  // namespace fmds
