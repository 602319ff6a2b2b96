#pragma once

#include <Eigen/Core>

namespace subcheck {

/// Second-order multivariate jet: value, gradient and Hessian propagated
/// together. An empty gradient stands for an all-zero one, so literals can be
/// built without knowing the variable count.
struct Jet2 {
  double value = 0.0;
  Eigen::VectorXd gradient;
  Eigen::MatrixXd hessian;

  Jet2() = default;
  Jet2(double v) : value(v) {}  // NOLINT: implicit lift of constants
  Jet2(double v, Eigen::VectorXd g, Eigen::MatrixXd h)
      : value(v), gradient(std::move(g)), hessian(std::move(h)) {}

  /// Independent variable `index` out of `n`.
  static Jet2 variable(double v, Eigen::Index index, Eigen::Index n);

  bool is_constant() const { return gradient.size() == 0; }
  Eigen::Index size() const { return gradient.size(); }
};

Jet2 operator+(const Jet2& a, const Jet2& b);
Jet2 operator-(const Jet2& a, const Jet2& b);
Jet2 operator-(const Jet2& a);
Jet2 operator*(const Jet2& a, const Jet2& b);
Jet2 operator/(const Jet2& a, const Jet2& b);

/// Applies a scalar function given its value and first two derivatives at a.value.
Jet2 chain(const Jet2& a, double f, double df, double d2f);

Jet2 sin(const Jet2& a);
Jet2 cos(const Jet2& a);
Jet2 tan(const Jet2& a);
Jet2 exp(const Jet2& a);
Jet2 log(const Jet2& a);
Jet2 sqrt(const Jet2& a);
Jet2 abs(const Jet2& a);

inline double value_of(const Jet2& j) { return j.value; }

}  // namespace subcheck

namespace Eigen {
template <>
struct NumTraits<subcheck::Jet2> : NumTraits<double> {
  using Real = subcheck::Jet2;
  using NonInteger = subcheck::Jet2;
  using Nested = subcheck::Jet2;
  using Literal = subcheck::Jet2;
  enum { IsComplex = 0, IsInteger = 0, IsSigned = 1, RequireInitialization = 1, ReadCost = 8, AddCost = 16, MulCost = 32 };
};
}  // namespace Eigen
