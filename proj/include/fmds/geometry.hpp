#pragma once

// Randers metrics. The canonical space is R^m with the position-independent
// metric F(u) = ||u||_2 + w^T u, ||w||_2 < 1, whose geodesics are straight
// segments; the general form sqrt(u^T M u) + w^T u arises from Zermelo
// navigation under a current.

#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "fmds/error.hpp"
#include "fmds/linalg.hpp"

namespace fmds {

namespace detail {

template <class A, class B>
double dot(const Eigen::MatrixBase<A>& a, const Eigen::MatrixBase<B>& b) {
  double s = 0.0;
  for (Index i = 0; i < a.size(); ++i) s += a(i) * b(i);
  return s;
}

}  // namespace detail

/// Drift vector of the canonical Randers space. alpha = ||omega||_2 is
/// cached and must stay below 1 - 1e-12.
class RandersSpace {
 public:
  static constexpr double kAlphaMargin = 1e-12;

  explicit RandersSpace(Vector omega) : omega_(std::move(omega)) {
    detail::require(omega_.size() >= 1, "RandersSpace: dimension must be at least 1");
    detail::require(omega_.allFinite(), "RandersSpace: non-finite drift");
    alpha_ = omega_.norm();
    detail::require(alpha_ < 1.0 - kAlphaMargin,
                    "RandersSpace: ||omega|| must be < 1 (got " + std::to_string(alpha_) + ")");
  }

  /// Drift of norm alpha along the last coordinate axis.
  static RandersSpace along_last_axis(Index dim, double alpha) {
    detail::require(dim >= 1, "RandersSpace: dimension must be at least 1");
    detail::require(alpha >= 0.0, "RandersSpace: alpha must be nonnegative");
    Vector omega = Vector::Zero(dim);
    omega(dim - 1) = alpha;
    return RandersSpace(std::move(omega));
  }

  static RandersSpace euclidean(Index dim) { return along_last_axis(dim, 0.0); }

  const Vector& omega() const { return omega_; }
  double alpha() const { return alpha_; }
  Index dim() const { return omega_.size(); }

 private:
  Vector omega_;
  double alpha_ = 0.0;
};

/// F(u) = ||u||_2 + omega^T u.
template <class Derived>
double canonical_metric(const RandersSpace& space, const Eigen::MatrixBase<Derived>& u) {
  detail::require(u.size() == space.dim(), "canonical_metric: dimension mismatch");
  return u.norm() + detail::dot(space.omega(), u);
}

/// d(x, y) = ||y - x||_2 + omega^T (y - x). Straight segments are geodesics,
/// so this is the exact geodesic distance.
template <class A, class B>
double canonical_distance(const RandersSpace& space, const Eigen::MatrixBase<A>& x,
                          const Eigen::MatrixBase<B>& y) {
  detail::require(x.size() == space.dim() && y.size() == space.dim(),
                  "canonical_distance: dimension mismatch");
  double sq = 0.0;
  double lin = 0.0;
  for (Index i = 0; i < x.size(); ++i) {
    const double d = y(i) - x(i);
    sq += d * d;
    lin += space.omega()(i) * d;
  }
  return std::sqrt(sq) + lin;
}

/// Piecewise-linear curve with at least two vertices and no repeated
/// consecutive vertex.
class Polyline {
 public:
  explicit Polyline(std::vector<Vector> vertices) : vertices_(std::move(vertices)) {
    detail::require(vertices_.size() >= 2, "Polyline: need at least two vertices");
    const Index dim = vertices_.front().size();
    for (std::size_t i = 0; i < vertices_.size(); ++i) {
      detail::require(vertices_[i].size() == dim, "Polyline: inconsistent vertex dimension");
      if (i > 0) {
        detail::require((vertices_[i] - vertices_[i - 1]).norm() > 0.0,
                        "Polyline: zero-length segment");
      }
    }
  }

  const std::vector<Vector>& vertices() const { return vertices_; }
  Index dim() const { return vertices_.front().size(); }

 private:
  std::vector<Vector> vertices_;
};

/// Sum of F over segment displacements. The metric is uniform, so this is the
/// exact length of the curve.
inline double polyline_length(const RandersSpace& space, const Polyline& curve) {
  detail::require(curve.dim() == space.dim(), "polyline_length: dimension mismatch");
  double total = 0.0;
  const auto& v = curve.vertices();
  for (std::size_t i = 1; i < v.size(); ++i) total += canonical_metric(space, v[i] - v[i - 1]);
  return total;
}

/// sqrt(u^T M u) + omega^T u with M symmetric positive definite and
/// omega^T M^{-1} omega < 1.
class GeneralRandersMetric {
 public:
  GeneralRandersMetric(Matrix tensor, Vector omega)
      : tensor_(std::move(tensor)), omega_(std::move(omega)) {
    detail::require(tensor_.rows() == tensor_.cols() && tensor_.rows() == omega_.size(),
                    "GeneralRandersMetric: dimension mismatch");
    detail::require(tensor_.allFinite() && omega_.allFinite(),
                    "GeneralRandersMetric: non-finite entry");
    detail::require(linalg::max_asymmetry(tensor_) <= 1e-10,
                    "GeneralRandersMetric: tensor not symmetric");
    Eigen::LLT<Matrix> llt(tensor_);
    detail::require(llt.info() == Eigen::Success, "GeneralRandersMetric: tensor not positive definite");
    const Eigen::SelfAdjointEigenSolver<Matrix> eig(tensor_, Eigen::EigenvaluesOnly);
    detail::require(eig.eigenvalues().minCoeff() > 0.0,
                    "GeneralRandersMetric: tensor not positive definite");
    dual_norm_sq_ = omega_.dot(llt.solve(omega_));
    detail::require(dual_norm_sq_ < 1.0, "GeneralRandersMetric: ||omega||_{M^-1} must be < 1");
  }

  const Matrix& tensor() const { return tensor_; }
  const Vector& omega() const { return omega_; }
  /// omega^T M^{-1} omega.
  double drift_dual_norm_sq() const { return dual_norm_sq_; }

  double operator()(const Vector& u) const {
    detail::require(u.size() == omega_.size(), "GeneralRandersMetric: dimension mismatch");
    return std::sqrt(std::max(u.dot(tensor_ * u), 0.0)) + omega_.dot(u);
  }

 private:
  Matrix tensor_;
  Vector omega_;
  double dual_norm_sq_ = 0.0;
};

inline double general_randers_eval(const GeneralRandersMetric& metric, const Vector& u) {
  return metric(u);
}

/// Riemannian background R(u) = ||u||_M with a current v, ||v||_M < 1.
class ZermeloField {
 public:
  ZermeloField(Matrix tensor, Vector current) : tensor_(std::move(tensor)), current_(std::move(current)) {
    detail::require(tensor_.rows() == tensor_.cols() && tensor_.rows() == current_.size(),
                    "ZermeloField: dimension mismatch");
    detail::require(linalg::max_asymmetry(tensor_) <= 1e-10, "ZermeloField: tensor not symmetric");
    Eigen::LLT<Matrix> llt(tensor_);
    detail::require(llt.info() == Eigen::Success, "ZermeloField: tensor not positive definite");
    detail::require(current_.allFinite(), "ZermeloField: non-finite current");
    detail::require(current_.dot(tensor_ * current_) < 1.0,
                    "ZermeloField: current too strong (||v||_M >= 1)");
  }

  const Matrix& tensor() const { return tensor_; }
  const Vector& current() const { return current_; }
  double current_norm_sq() const { return current_.dot(tensor_ * current_); }

  /// Riemannian length ||u||_M of the background metric.
  double background_norm(const Vector& u) const { return std::sqrt(u.dot(tensor_ * u)); }

 private:
  Matrix tensor_;
  Vector current_;
};

enum class ZermeloConversion {
  exact,
  /// M_v ~ M and omega_v ~ -M v, valid for ||v||_M^2 << 1.
  small_current,
};

/// Travel-time metric F solving R(u / F(u) - v) = 1, written in Randers form:
///   M_v     = (M v v^T M + lambda M) / lambda^2,   lambda = 1 - ||v||_M^2
///   omega_v = -M v / lambda
inline GeneralRandersMetric zermelo_to_randers(const ZermeloField& field,
                                               ZermeloConversion mode = ZermeloConversion::exact) {
  const Matrix& m = field.tensor();
  const Vector mv = m * field.current();
  if (mode == ZermeloConversion::small_current) return GeneralRandersMetric(m, -mv);
  const double lambda = 1.0 - field.current_norm_sq();
  if (!(lambda > 0.0)) throw std::invalid_argument("zermelo_to_randers: ||v||_M >= 1");
  Matrix tensor = (mv * mv.transpose() + lambda * m) / (lambda * lambda);
  tensor = 0.5 * (tensor + tensor.transpose());
  return GeneralRandersMetric(std::move(tensor), -mv / lambda);
}

}  // namespace fmds
