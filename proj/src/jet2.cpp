#include "subcheck/jet2.hpp"

#include <cmath>

namespace subcheck {

namespace {

Eigen::Index common_size(const Jet2& a, const Jet2& b) {
  return a.size() > 0 ? a.size() : b.size();
}

Eigen::VectorXd grad_or_zero(const Jet2& a, Eigen::Index n) {
  return a.size() > 0 ? a.gradient : Eigen::VectorXd::Zero(n);
}

Eigen::MatrixXd hess_or_zero(const Jet2& a, Eigen::Index n) {
  return a.size() > 0 ? a.hessian : Eigen::MatrixXd::Zero(n, n);
}

}  // namespace

Jet2 Jet2::variable(double v, Eigen::Index index, Eigen::Index n) {
  Eigen::VectorXd g = Eigen::VectorXd::Zero(n);
  g[index] = 1.0;
  return {v, g, Eigen::MatrixXd::Zero(n, n)};
}

Jet2 operator+(const Jet2& a, const Jet2& b) {
  const Eigen::Index n = common_size(a, b);
  if (n == 0) return {a.value + b.value};
  return {a.value + b.value, grad_or_zero(a, n) + grad_or_zero(b, n),
          hess_or_zero(a, n) + hess_or_zero(b, n)};
}

Jet2 operator-(const Jet2& a, const Jet2& b) {
  const Eigen::Index n = common_size(a, b);
  if (n == 0) return {a.value - b.value};
  return {a.value - b.value, grad_or_zero(a, n) - grad_or_zero(b, n),
          hess_or_zero(a, n) - hess_or_zero(b, n)};
}

Jet2 operator-(const Jet2& a) {
  if (a.is_constant()) return {-a.value};
  return {-a.value, -a.gradient, -a.hessian};
}

Jet2 operator*(const Jet2& a, const Jet2& b) {
  const Eigen::Index n = common_size(a, b);
  if (n == 0) return {a.value * b.value};
  const Eigen::VectorXd ga = grad_or_zero(a, n);
  const Eigen::VectorXd gb = grad_or_zero(b, n);
  Eigen::MatrixXd h = a.value * hess_or_zero(b, n) + b.value * hess_or_zero(a, n) +
                      ga * gb.transpose() + gb * ga.transpose();
  return {a.value * b.value, a.value * gb + b.value * ga, std::move(h)};
}

Jet2 chain(const Jet2& a, double f, double df, double d2f) {
  if (a.is_constant()) return {f};
  Eigen::MatrixXd h = df * a.hessian + d2f * a.gradient * a.gradient.transpose();
  return {f, df * a.gradient, std::move(h)};
}

Jet2 operator/(const Jet2& a, const Jet2& b) {
  const double x = b.value;
  return a * chain(b, 1.0 / x, -1.0 / (x * x), 2.0 / (x * x * x));
}

Jet2 sin(const Jet2& a) {
  const double s = std::sin(a.value);
  return chain(a, s, std::cos(a.value), -s);
}

Jet2 cos(const Jet2& a) {
  const double c = std::cos(a.value);
  return chain(a, c, -std::sin(a.value), -c);
}

Jet2 tan(const Jet2& a) {
  const double t = std::tan(a.value);
  const double sec2 = 1.0 + t * t;
  return chain(a, t, sec2, 2.0 * t * sec2);
}

Jet2 exp(const Jet2& a) {
  const double e = std::exp(a.value);
  return chain(a, e, e, e);
}

Jet2 log(const Jet2& a) {
  const double x = a.value;
  return chain(a, std::log(x), 1.0 / x, -1.0 / (x * x));
}

Jet2 sqrt(const Jet2& a) {
  const double s = std::sqrt(a.value);
  return chain(a, s, 0.5 / s, -0.25 / (s * a.value));
}

Jet2 abs(const Jet2& a) {
  return a.value < 0.0 ? -a : a;
}

}  // namespace subcheck
