#pragma once

// Metric and almost complex structure fields on a single global chart,
// together with the Levi-Civita connection, Lie brackets and curvature.
// Everything is templated on the scalar so nested duals flow through.

#include <functional>
#include <optional>
#include <random>
#include <stdexcept>
#include <vector>

#include <Eigen/Core>

#include "subcheck/dual.hpp"
#include "subcheck/expr.hpp"
#include "subcheck/linalg.hpp"

namespace subcheck {

class MetricField {
 public:
  enum class Kind { Euclidean, Product, WarpedProduct };

  static MetricField euclidean(int n);
  static MetricField product(int n1, int n2);
  /// g = g1 (+) f^2 g2 on R^n1 x R^n2, with f an expression over x1..x_n1.
  static MetricField warped_product(int n1, int n2, Expr warp);

  int dim() const { return n1_ + n2_; }
  Kind kind() const { return kind_; }
  int first_dim() const { return n1_; }
  int second_dim() const { return n2_; }
  const std::optional<Expr>& warp() const { return warp_; }

  /// True when the metric is the identity everywhere (Christoffels vanish).
  bool is_constant_identity() const { return kind_ != Kind::WarpedProduct; }

  template <class S>
  Mat<S> at(const Vec<S>& q) const {
    Mat<S> g = Mat<S>::Identity(dim(), dim());
    if (kind_ == Kind::WarpedProduct) {
      const S f = warp_->eval<S>(q);
      if (value_of(f) <= 0.0) throw NumericalError("warp function not positive at sampled point");
      const S f2 = f * f;
      for (int i = n1_; i < dim(); ++i) g(i, i) = f2;
    }
    return g;
  }

  Eigen::MatrixXd at(const Eigen::VectorXd& q) const { return at<double>(q); }

 private:
  MetricField(Kind k, int n1, int n2, std::optional<Expr> warp)
      : kind_(k), n1_(n1), n2_(n2), warp_(std::move(warp)) {}

  Kind kind_;
  int n1_;
  int n2_;
  std::optional<Expr> warp_;
};

/// Constant almost complex structure given by its coordinate matrix.
class ComplexStructureField {
 public:
  enum class Kind { Standard, Product };

  ComplexStructureField(Kind k, Eigen::MatrixXd j, std::vector<int> blocks)
      : kind_(k), j_(std::move(j)), blocks_(std::move(blocks)) {}

  int dim() const { return static_cast<int>(j_.rows()); }
  Kind kind() const { return kind_; }
  const Eigen::MatrixXd& matrix() const { return j_; }
  /// Factor dimensions (one entry for standard, two for a product).
  const std::vector<int>& blocks() const { return blocks_; }

  template <class S>
  Mat<S> at(const Vec<S>&) const { return cast_matrix<S>(j_); }

 private:
  Kind kind_;
  Eigen::MatrixXd j_;
  std::vector<int> blocks_;
};

/// J d_{2i-1} = d_{2i}, J d_{2i} = -d_{2i-1}.
ComplexStructureField standard_J(int n);
/// Block-diagonal J1 x J2.
ComplexStructureField product_J(const ComplexStructureField& j1, const ComplexStructureField& j2);

/// Max-norm of J^2 + I and of g(JX,JY) - g(X,Y) over the metric at q.
double complex_structure_defect(const ComplexStructureField& j, const MetricField& g, const Eigen::VectorXd& q);

/// Smooth vector field, evaluable at every dual nesting level up to kMaxDepth.
class VectorField {
 public:
  static constexpr int kMaxDepth = 3;

  VectorField() = default;

  template <class F>
  VectorField(int dim, F f)
      : dim_(dim),
        f0_([f](const Vec<double>& q) -> Vec<double> { return f(q); }),
        f1_([f](const Vec<D1>& q) -> Vec<D1> { return f(q); }),
        f2_([f](const Vec<D2>& q) -> Vec<D2> { return f(q); }),
        f3_([f](const Vec<D3>& q) -> Vec<D3> { return f(q); }) {}

  /// Field with fixed components.
  static VectorField constant(const Eigen::VectorXd& v);
  /// Field given by one expression per component.
  static VectorField from_exprs(std::vector<Expr> components);

  int dim() const { return dim_; }

  template <class S>
  Vec<S> operator()(const Vec<S>& q) const {
    if constexpr (std::is_same_v<S, double>) return f0_(q);
    else if constexpr (std::is_same_v<S, D1>) return f1_(q);
    else if constexpr (std::is_same_v<S, D2>) return f2_(q);
    else if constexpr (std::is_same_v<S, D3>) return f3_(q);
    else static_assert(dual_depth_v<S> <= kMaxDepth, "vector field nesting too deep");
  }

 private:
  int dim_ = 0;
  std::function<Vec<double>(const Vec<double>&)> f0_;
  std::function<Vec<D1>(const Vec<D1>&)> f1_;
  std::function<Vec<D2>(const Vec<D2>&)> f2_;
  std::function<Vec<D3>(const Vec<D3>&)> f3_;
};

/// Random field with components Σ c·(q−center)^α over monomials of degree
/// ≤ `degree` (0, 1 or 2), coefficients U[−1, 1].
VectorField random_polynomial_field(int dim, const Eigen::VectorXd& center, std::mt19937_64& rng, int degree = 2);

class DepthError : public std::logic_error {
 public:
  DepthError() : std::logic_error("derivative nesting deeper than supported") {}
};

/// D_dir Y at q: exact directional derivative through one dual layer.
template <class S>
Vec<S> directional_derivative(const VectorField& y, const Vec<S>& q, const Vec<S>& dir) {
  if constexpr (dual_depth_v<S> >= VectorField::kMaxDepth) {
    throw DepthError();
  } else {
    return tangent_part(y.template operator()<Dual<S>>(lift(q, dir)));
  }
}

/// Christoffel symbols of the second kind: gamma[k](i, j) = Γ^k_ij.
template <class S>
using Christoffel = std::vector<Mat<S>>;

/// dg[l](i, j) = ∂_l g_ij at q.
template <class S>
std::vector<Mat<S>> metric_derivatives(const MetricField& g, const Vec<S>& q) {
  const int n = g.dim();
  std::vector<Mat<S>> dg(static_cast<std::size_t>(n), Mat<S>::Zero(n, n));
  if (g.is_constant_identity()) return dg;
  for (int l = 0; l < n; ++l) dg[static_cast<std::size_t>(l)] = tangent_part(g.at<Dual<S>>(lift_axis(q, l)));
  return dg;
}

/// Γ^k_ij = ½ g^{kl}(∂_i g_jl + ∂_j g_il − ∂_l g_ij), by the Koszul formula.
template <class S>
Christoffel<S> christoffel(const MetricField& g, const Vec<S>& q) {
  const int n = g.dim();
  Christoffel<S> gamma(static_cast<std::size_t>(n), Mat<S>::Zero(n, n));
  if (g.is_constant_identity()) return gamma;
  const auto dg = metric_derivatives<S>(g, q);
  Mat<S> ginv;
  try {
    ginv = inverse<S>(g.at<S>(q));
  } catch (const NumericalError&) {
    throw NumericalError("metric not invertible at p");
  }
  // first kind: lower(l)(i, j) = ½(∂_i g_jl + ∂_j g_il − ∂_l g_ij)
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      Vec<S> lower(n);
      for (int l = 0; l < n; ++l)
        lower[l] = S(0.5) * (dg[static_cast<std::size_t>(i)](j, l) + dg[static_cast<std::size_t>(j)](i, l) -
                             dg[static_cast<std::size_t>(l)](i, j));
      const Vec<S> upper = ginv * lower;
      for (int k = 0; k < n; ++k) gamma[static_cast<std::size_t>(k)](i, j) = upper[k];
    }
  }
  return gamma;
}

/// Γ(X, Y)^k = Σ Γ^k_ij X^i Y^j.
template <class S>
Vec<S> contract(const Christoffel<S>& gamma, const Vec<S>& x, const Vec<S>& y) {
  Vec<S> out(static_cast<Eigen::Index>(gamma.size()));
  for (std::size_t k = 0; k < gamma.size(); ++k) out[static_cast<Eigen::Index>(k)] = x.dot(gamma[k] * y);
  return out;
}

/// (∇_X Y)(q) for a tangent vector X at q and a field Y.
template <class S>
Vec<S> covariant_derivative(const MetricField& g, const Vec<S>& x, const VectorField& y, const Vec<S>& q) {
  Vec<S> out = directional_derivative<S>(y, q, x);
  if (!g.is_constant_identity()) out += contract(christoffel<S>(g, q), x, y(q));
  return out;
}

template <class S>
Vec<S> covariant_derivative(const MetricField& g, const VectorField& x, const VectorField& y, const Vec<S>& q) {
  return covariant_derivative<S>(g, x(q), y, q);
}

/// [X, Y] = D_X Y − D_Y X.
template <class S>
Vec<S> lie_bracket(const VectorField& x, const VectorField& y, const Vec<S>& q) {
  return directional_derivative<S>(y, q, x(q)) - directional_derivative<S>(x, q, y(q));
}

/// max |(∇_i J)^k_j| at q, where (∇_i J)^k_j = Γ^k_il J^l_j − J^k_l Γ^l_ij.
double kahler_defect(const MetricField& g, const ComplexStructureField& j, const Eigen::VectorXd& q);

/// Riemann tensor r[l](i, j, k) flattened as r[l][i](j, k) = R^l_{ijk}, with
/// R(X,Y)Z = ∇_X∇_Y Z − ∇_Y∇_X Z − ∇_[X,Y] Z.
struct Riemann {
  int n = 0;
  std::vector<double> data;  // index ((l*n + i)*n + j)*n + k
  double operator()(int l, int i, int j, int k) const {
    return data[static_cast<std::size_t>(((l * n + i) * n + j) * n + k)];
  }
  /// R(X, Y)Z as a vector.
  Eigen::VectorXd apply(const Eigen::VectorXd& x, const Eigen::VectorXd& y, const Eigen::VectorXd& z) const;
};

Riemann riemann(const MetricField& g, const Eigen::VectorXd& q);

class DegeneratePlane : public std::runtime_error {
 public:
  DegeneratePlane() : std::runtime_error("degenerate plane: vectors are linearly dependent") {}
};

/// K(X ∧ Y) = g(R(X,Y)Y, X) / (|X|²|Y|² − g(X,Y)²).
double sectional_curvature(const MetricField& g, const Eigen::VectorXd& q, const Eigen::VectorXd& x,
                           const Eigen::VectorXd& y);
double sectional_curvature(const MetricField& g, const Riemann& r, const Eigen::VectorXd& q,
                           const Eigen::VectorXd& x, const Eigen::VectorXd& y);

}  // namespace subcheck
