#include "subcheck/geometry.hpp"

#include <cmath>

namespace subcheck {

MetricField MetricField::euclidean(int n) {
  if (n < 1) throw std::invalid_argument("metric dimension must be positive");
  return MetricField(Kind::Euclidean, n, 0, std::nullopt);
}

MetricField MetricField::product(int n1, int n2) {
  if (n1 < 1 || n2 < 1) throw std::invalid_argument("product factors must be positive-dimensional");
  return MetricField(Kind::Product, n1, n2, std::nullopt);
}

MetricField MetricField::warped_product(int n1, int n2, Expr warp) {
  if (n1 < 1 || n2 < 1) throw std::invalid_argument("warped factors must be positive-dimensional");
  if (warp.max_variable() > n1)
    throw std::invalid_argument("warp function may depend only on the first factor (x1..x" + std::to_string(n1) + ")");
  return MetricField(Kind::WarpedProduct, n1, n2, std::move(warp));
}

ComplexStructureField standard_J(int n) {
  if (n < 2 || n % 2 != 0) throw std::invalid_argument("standard J needs a positive even dimension, got " + std::to_string(n));
  Eigen::MatrixXd j = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; i += 2) {
    j(i + 1, i) = 1.0;   // J d_{2i-1} = d_{2i}
    j(i, i + 1) = -1.0;  // J d_{2i} = -d_{2i-1}
  }
  return {ComplexStructureField::Kind::Standard, j, {n}};
}

ComplexStructureField product_J(const ComplexStructureField& j1, const ComplexStructureField& j2) {
  const int n1 = j1.dim();
  const int n2 = j2.dim();
  if (n1 < 1 || n2 < 1) throw std::invalid_argument("product J: empty factor");
  Eigen::MatrixXd j = Eigen::MatrixXd::Zero(n1 + n2, n1 + n2);
  j.topLeftCorner(n1, n1) = j1.matrix();
  j.bottomRightCorner(n2, n2) = j2.matrix();
  return {ComplexStructureField::Kind::Product, j, {n1, n2}};
}

double complex_structure_defect(const ComplexStructureField& j, const MetricField& g, const Eigen::VectorXd& q) {
  if (j.dim() != g.dim()) throw std::invalid_argument("J and metric dimensions differ");
  const Eigen::MatrixXd& jm = j.matrix();
  const Eigen::MatrixXd gm = g.at(q);
  const auto n = jm.rows();
  const double square = max_abs(jm * jm + Eigen::MatrixXd::Identity(n, n));
  // g(JX, JY) = g(X, Y) for all X, Y  <=>  Jᵀ g J = g
  const double hermitian = max_abs(jm.transpose() * gm * jm - gm);
  return std::max(square, hermitian);
}

VectorField VectorField::constant(const Eigen::VectorXd& v) {
  const int n = static_cast<int>(v.size());
  return VectorField(n, [v](const auto& q) {
    using S = typename std::decay_t<decltype(q)>::Scalar;
    return Vec<S>(cast_vector<S>(v));
  });
}

VectorField VectorField::from_exprs(std::vector<Expr> components) {
  const int n = static_cast<int>(components.size());
  return VectorField(n, [components = std::move(components)](const auto& q) {
    using S = typename std::decay_t<decltype(q)>::Scalar;
    Vec<S> out(static_cast<Eigen::Index>(components.size()));
    for (std::size_t k = 0; k < components.size(); ++k)
      out[static_cast<Eigen::Index>(k)] = components[k].template eval<S>(q);
    return out;
  });
}

VectorField random_polynomial_field(int dim, const Eigen::VectorXd& center, std::mt19937_64& rng, int degree) {
  if (degree < 0 || degree > 2) throw std::invalid_argument("polynomial field degree must be 0, 1 or 2");
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  struct Coeffs {
    Eigen::VectorXd c0;
    Eigen::MatrixXd c1;                // c1(k, i)
    std::vector<Eigen::MatrixXd> c2;   // c2[k](i, j), upper triangle used
  };
  Coeffs c;
  c.c0 = Eigen::VectorXd::NullaryExpr(dim, [&] { return u(rng); });
  c.c1 = Eigen::MatrixXd::Zero(dim, dim);
  if (degree >= 1)
    for (int k = 0; k < dim; ++k)
      for (int i = 0; i < dim; ++i) c.c1(k, i) = u(rng);
  c.c2.assign(static_cast<std::size_t>(dim), Eigen::MatrixXd::Zero(dim, dim));
  if (degree >= 2)
    for (int k = 0; k < dim; ++k)
      for (int i = 0; i < dim; ++i)
        for (int j = i; j < dim; ++j) c.c2[static_cast<std::size_t>(k)](i, j) = u(rng);
  return VectorField(dim, [c, center, degree](const auto& q) {
    using S = typename std::decay_t<decltype(q)>::Scalar;
    const auto n = q.size();
    Vec<S> d(n);
    for (Eigen::Index i = 0; i < n; ++i) d[i] = q[i] - S(center[i]);
    Vec<S> out(n);
    for (Eigen::Index k = 0; k < n; ++k) {
      S acc(c.c0[k]);
      if (degree >= 1)
        for (Eigen::Index i = 0; i < n; ++i) acc += S(c.c1(k, i)) * d[i];
      if (degree >= 2)
        for (Eigen::Index i = 0; i < n; ++i)
          for (Eigen::Index j = i; j < n; ++j) acc += S(c.c2[static_cast<std::size_t>(k)](i, j)) * d[i] * d[j];
      out[k] = acc;
    }
    return out;
  });
}

double kahler_defect(const MetricField& g, const ComplexStructureField& j, const Eigen::VectorXd& q) {
  if (g.is_constant_identity()) return 0.0;
  const Christoffel<double> gamma = christoffel<double>(g, q);
  const Eigen::MatrixXd& jm = j.matrix();
  const int n = g.dim();
  double worst = 0.0;
  for (int i = 0; i < n; ++i) {
    // gi(k, l) = Γ^k_il
    Eigen::MatrixXd gi(n, n);
    for (int k = 0; k < n; ++k) gi.row(k) = gamma[static_cast<std::size_t>(k)].row(i);
    worst = std::max(worst, max_abs(gi * jm - jm * gi));
  }
  return worst;
}

Eigen::VectorXd Riemann::apply(const Eigen::VectorXd& x, const Eigen::VectorXd& y, const Eigen::VectorXd& z) const {
  Eigen::VectorXd out = Eigen::VectorXd::Zero(n);
  for (int l = 0; l < n; ++l) {
    double acc = 0.0;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k) acc += (*this)(l, i, j, k) * x[i] * y[j] * z[k];
    out[l] = acc;
  }
  return out;
}

Riemann riemann(const MetricField& g, const Eigen::VectorXd& q) {
  const int n = g.dim();
  Riemann r;
  r.n = n;
  r.data.assign(static_cast<std::size_t>(n) * n * n * n, 0.0);
  if (g.is_constant_identity()) return r;
  const Christoffel<double> gamma = christoffel<double>(g, q);
  // dgamma[i][l](j, k) = ∂_i Γ^l_jk
  std::vector<Christoffel<double>> dgamma;
  dgamma.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const Christoffel<D1> lifted = christoffel<D1>(g, lift_axis<double>(q, i));
    Christoffel<double> d;
    for (const auto& m : lifted) d.push_back(tangent_part(m));
    dgamma.push_back(std::move(d));
  }
  auto G = [&](int l, int a, int b) { return gamma[static_cast<std::size_t>(l)](a, b); };
  for (int l = 0; l < n; ++l)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k) {
          double v = dgamma[static_cast<std::size_t>(i)][static_cast<std::size_t>(l)](j, k) -
                     dgamma[static_cast<std::size_t>(j)][static_cast<std::size_t>(l)](i, k);
          for (int m = 0; m < n; ++m) v += G(l, i, m) * G(m, j, k) - G(l, j, m) * G(m, i, k);
          r.data[static_cast<std::size_t>(((l * n + i) * n + j) * n + k)] = v;
        }
  return r;
}

double sectional_curvature(const MetricField& g, const Riemann& r, const Eigen::VectorXd& q,
                           const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
  const Eigen::MatrixXd gm = g.at(q);
  const double xx = x.dot(gm * x);
  const double yy = y.dot(gm * y);
  const double xy = 0.5 * (x.dot(gm * y) + y.dot(gm * x));
  const double den = xx * yy - xy * xy;
  if (den < 1e-12 * xx * yy || den <= 0.0) throw DegeneratePlane();
  // averaged over both orderings so that K(X, Y) == K(Y, X) bit for bit
  return 0.5 * (r.apply(x, y, y).dot(gm * x) + r.apply(y, x, x).dot(gm * y)) / den;
}

double sectional_curvature(const MetricField& g, const Eigen::VectorXd& q, const Eigen::VectorXd& x,
                           const Eigen::VectorXd& y) {
  return sectional_curvature(g, riemann(g, q), q, x, y);
}

}  // namespace subcheck
