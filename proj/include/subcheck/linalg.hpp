#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

#include <Eigen/Core>

#include "subcheck/dual.hpp"

namespace subcheck {

template <class S>
using Vec = Eigen::Matrix<S, Eigen::Dynamic, 1>;
template <class S>
using Mat = Eigen::Matrix<S, Eigen::Dynamic, Eigen::Dynamic>;

class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Solves A X = B by Gaussian elimination with partial pivoting on the value
/// part. Works for any dual nesting, so derivatives of the solution come out
/// exact.
template <class S>
Mat<S> solve(Mat<S> a, Mat<S> b) {
  const Eigen::Index n = a.rows();
  if (a.cols() != n || b.rows() != n) throw std::invalid_argument("solve: dimension mismatch");
  double scale = 0.0;
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) scale = std::max(scale, std::abs(value_of(a(i, j))));
  for (Eigen::Index col = 0; col < n; ++col) {
    Eigen::Index piv = col;
    double best = std::abs(value_of(a(col, col)));
    for (Eigen::Index r = col + 1; r < n; ++r) {
      const double v = std::abs(value_of(a(r, col)));
      if (v > best) {
        best = v;
        piv = r;
      }
    }
    if (best <= 1e-13 * scale || best == 0.0) throw NumericalError("matrix not invertible");
    if (piv != col) {
      a.row(col).swap(a.row(piv));
      b.row(col).swap(b.row(piv));
    }
    const S inv = S(1.0) / a(col, col);
    for (Eigen::Index r = col + 1; r < n; ++r) {
      const S f = a(r, col) * inv;
      if (value_of(f) == 0.0 && dual_depth_v<S> == 0) continue;
      for (Eigen::Index c = col; c < n; ++c) a(r, c) -= f * a(col, c);
      for (Eigen::Index c = 0; c < b.cols(); ++c) b(r, c) -= f * b(col, c);
    }
  }
  for (Eigen::Index col = n - 1; col >= 0; --col) {
    const S inv = S(1.0) / a(col, col);
    for (Eigen::Index c = 0; c < b.cols(); ++c) {
      S acc = b(col, c);
      for (Eigen::Index k = col + 1; k < n; ++k) acc -= a(col, k) * b(k, c);
      b(col, c) = acc * inv;
    }
  }
  return b;
}

template <class S>
Mat<S> inverse(const Mat<S>& a) {
  return solve<S>(a, Mat<S>::Identity(a.rows(), a.rows()));
}

template <class S>
Mat<S> cast_matrix(const Eigen::MatrixXd& m) {
  return m.unaryExpr([](double x) { return S(x); });
}

template <class S>
Vec<S> cast_vector(const Eigen::VectorXd& v) {
  return v.unaryExpr([](double x) { return S(x); });
}

/// g(u, v) for a metric matrix.
template <class S>
S inner(const Mat<S>& g, const Vec<S>& u, const Vec<S>& v) {
  return u.dot(g * v);
}

/// Max absolute entry; the suite's residual norm for vectors.
inline double max_abs(const Eigen::MatrixXd& m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

/// 2-norm of a vector under metric g.
inline double g_norm(const Eigen::MatrixXd& g, const Eigen::VectorXd& v) {
  return std::sqrt(std::max(0.0, v.dot(g * v)));
}

}  // namespace subcheck
