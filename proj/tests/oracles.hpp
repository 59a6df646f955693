#pragma once

// Reference implementations written from the definitions, without reusing
// library code paths. Slow on purpose.

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace oracle {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;
inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Cyclic Jacobi rotations; eigenvalues sorted descending with vectors.
inline std::pair<Vec, Mat> jacobi_eigen(Mat a, int sweeps = 100) {
  const long n = a.rows();
  Mat v = Mat::Identity(n, n);
  for (int sweep = 0; sweep < sweeps; ++sweep) {
    double off = 0.0;
    for (long p = 0; p < n; ++p)
      for (long q = p + 1; q < n; ++q) off += a(p, q) * a(p, q);
    if (off < 1e-30) break;
    for (long p = 0; p < n; ++p) {
      for (long q = p + 1; q < n; ++q) {
        if (std::abs(a(p, q)) < 1e-300) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * a(p, q));
        const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0), s = t * c;
        for (long k = 0; k < n; ++k) {
          const double akp = a(k, p), akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (long k = 0; k < n; ++k) {
          const double apk = a(p, k), aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
        for (long k = 0; k < n; ++k) {
          const double vkp = v(k, p), vkq = v(k, q);
          v(k, p) = c * vkp - s * vkq;
          v(k, q) = s * vkp + c * vkq;
        }
      }
    }
  }
  std::vector<long> order(n);
  for (long i = 0; i < n; ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](long x, long y) { return a(x, x) > a(y, y); });
  Vec values(n);
  Mat vectors(n, n);
  for (long i = 0; i < n; ++i) {
    values(i) = a(order[i], order[i]);
    vectors.col(i) = v.col(order[i]);
  }
  return {values, vectors};
}

/// Gaussian elimination with partial pivoting.
inline Mat gauss_solve(Mat a, Mat b) {
  const long n = a.rows();
  for (long col = 0; col < n; ++col) {
    long piv = col;
    for (long r = col + 1; r < n; ++r)
      if (std::abs(a(r, col)) > std::abs(a(piv, col))) piv = r;
    a.row(col).swap(a.row(piv));
    b.row(col).swap(b.row(piv));
    for (long r = col + 1; r < n; ++r) {
      const double f = a(r, col) / a(col, col);
      a.row(r) -= f * a.row(col);
      b.row(r) -= f * b.row(col);
    }
  }
  Mat x(n, b.cols());
  for (long r = n - 1; r >= 0; --r) {
    Eigen::RowVectorXd acc = b.row(r);
    for (long c = r + 1; c < n; ++c) acc -= a(r, c) * x.row(c);
    x.row(r) = acc / a(r, r);
  }
  return x;
}

inline Mat inverse(const Mat& a) { return gauss_solve(a, Mat::Identity(a.rows(), a.cols())); }

/// Floyd-Warshall on a dense weight matrix (kInf = no edge).
inline Mat floyd_warshall(Mat d) {
  const long n = d.rows();
  for (long i = 0; i < n; ++i) d(i, i) = std::min(d(i, i), 0.0);
  for (long k = 0; k < n; ++k)
    for (long i = 0; i < n; ++i)
      for (long j = 0; j < n; ++j)
        if (d(i, k) + d(k, j) < d(i, j)) d(i, j) = d(i, k) + d(k, j);
  return d;
}

/// Σ_{i≠j} w_ij (||x_i - x_j|| - D_ij)² with D symmetric.
inline double euclidean_stress(const Mat& x, const Mat& d, const Mat& w) {
  double s = 0.0;
  for (long i = 0; i < x.rows(); ++i)
    for (long j = 0; j < x.rows(); ++j)
      if (i != j) {
        const double r = (x.row(i) - x.row(j)).norm() - d(i, j);
        s += w(i, j) * r * r;
      }
  return s;
}

/// Classical (symmetric) SMACOF: X⁺ = V⁺ B(X) X, with
/// V⁺ = (V + 11ᵀ/n)⁻¹ - 11ᵀ/n for a connected weight graph.
class ClassicalSmacof {
 public:
  ClassicalSmacof(Mat d, Mat w) : d_(std::move(d)), w_(std::move(w)) {
    const long n = d_.rows();
    Mat v = -w_;
    for (long i = 0; i < n; ++i) {
      v(i, i) = 0.0;
      double s = 0.0;
      for (long j = 0; j < n; ++j)
        if (j != i) s += w_(i, j);
      v(i, i) = s;
    }
    const Mat ones = Mat::Constant(n, n, 1.0 / static_cast<double>(n));
    vplus_ = inverse(v + ones) - ones;
  }

  Mat step(const Mat& x) const {
    const long n = x.rows();
    Mat b = Mat::Zero(n, n);
    for (long i = 0; i < n; ++i)
      for (long j = 0; j < n; ++j) {
        if (i == j) continue;
        const double dist = (x.row(i) - x.row(j)).norm();
        if (dist > 0.0) b(i, j) = -w_(i, j) * d_(i, j) / dist;
      }
    for (long i = 0; i < n; ++i) b(i, i) = -b.row(i).sum();
    return vplus_ * b * x;
  }

 private:
  Mat d_, w_, vplus_;
};

/// Average precision from the definition: precision at the rank of each
/// relevant item, averaged over relevant items. `ranked` lists item ids.
inline double average_precision(const std::vector<long>& ranked, const std::vector<bool>& relevant) {
  double total = 0.0;
  long count = 0;
  for (bool r : relevant) count += r;
  for (std::size_t k = 0; k < ranked.size(); ++k) {
    if (!relevant[ranked[k]]) continue;
    long rel_upto = 0;
    for (std::size_t q = 0; q <= k; ++q) rel_upto += relevant[ranked[q]];
    total += static_cast<double>(rel_upto) / static_cast<double>(k + 1);
  }
  return count ? total / static_cast<double>(count) : 0.0;
}

/// AUC by comparing every positive with every negative.
inline double pairwise_auc(const std::vector<double>& pos, const std::vector<double>& neg) {
  double wins = 0.0;
  for (double p : pos)
    for (double q : neg) wins += p > q ? 1.0 : (p == q ? 0.5 : 0.0);
  return wins / (static_cast<double>(pos.size()) * static_cast<double>(neg.size()));
}

/// Central finite-difference gradient.
template <class F>
Mat numeric_gradient(F&& f, Mat x, double h = 1e-6) {
  Mat g(x.rows(), x.cols());
  for (long i = 0; i < x.rows(); ++i)
    for (long j = 0; j < x.cols(); ++j) {
      const double keep = x(i, j);
      x(i, j) = keep + h;
      const double up = f(x);
      x(i, j) = keep - h;
      const double down = f(x);
      x(i, j) = keep;
      g(i, j) = (up - down) / (2.0 * h);
    }
  return g;
}

}  // namespace oracle
