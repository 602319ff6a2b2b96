#pragma once

// Forward-mode dual numbers. Nesting Dual<Dual<double>> gives exact mixed
// second derivatives; the geometry layer nests up to four levels deep.

#include <cmath>
#include <type_traits>

#include <Eigen/Core>

namespace subcheck {

template <class T>
struct Dual {
  T v{};
  T d{};

  Dual() = default;
  template <class U>
    requires std::is_arithmetic_v<U>
  Dual(U x) : v(static_cast<double>(x)), d(0.0) {}  // NOLINT: implicit lift
  Dual(T value, T deriv) : v(std::move(value)), d(std::move(deriv)) {}

  Dual& operator+=(const Dual& o) { v += o.v; d += o.d; return *this; }
  Dual& operator-=(const Dual& o) { v -= o.v; d -= o.d; return *this; }
  Dual& operator*=(const Dual& o) { *this = *this * o; return *this; }
  Dual& operator/=(const Dual& o) { *this = *this / o; return *this; }

  friend Dual operator+(const Dual& a, const Dual& b) { return {a.v + b.v, a.d + b.d}; }
  friend Dual operator-(const Dual& a, const Dual& b) { return {a.v - b.v, a.d - b.d}; }
  friend Dual operator-(const Dual& a) { return {-a.v, -a.d}; }
  friend Dual operator+(const Dual& a) { return a; }
  friend Dual operator*(const Dual& a, const Dual& b) { return {a.v * b.v, a.v * b.d + a.d * b.v}; }
  friend Dual operator/(const Dual& a, const Dual& b) {
    T inv = T(1.0) / b.v;
    return {a.v * inv, (a.d * b.v - a.v * b.d) * inv * inv};
  }

  // Comparisons look at the value only; Eigen needs them for BLAS-style checks.
  friend bool operator==(const Dual& a, const Dual& b) { return a.v == b.v; }
  friend bool operator!=(const Dual& a, const Dual& b) { return !(a.v == b.v); }
  friend bool operator<(const Dual& a, const Dual& b) { return a.v < b.v; }
  friend bool operator>(const Dual& a, const Dual& b) { return b.v < a.v; }
  friend bool operator<=(const Dual& a, const Dual& b) { return !(b.v < a.v); }
  friend bool operator>=(const Dual& a, const Dual& b) { return !(a.v < b.v); }
};

namespace detail {
template <class T> struct dual_depth : std::integral_constant<int, 0> {};
template <class T> struct dual_depth<Dual<T>> : std::integral_constant<int, 1 + dual_depth<T>::value> {};
}  // namespace detail

/// Nesting level of a scalar type: double is 0, Dual<double> is 1, and so on.
template <class T>
inline constexpr int dual_depth_v = detail::dual_depth<T>::value;

using D1 = Dual<double>;
using D2 = Dual<D1>;
using D3 = Dual<D2>;

inline double value_of(double x) { return x; }
template <class T>
double value_of(const Dual<T>& x) { return value_of(x.v); }

// Elementary functions. Each applies the chain rule one level down, so
// nesting composes automatically.
template <class T>
Dual<T> sin(const Dual<T>& a) {
  using std::cos;
  using std::sin;
  return {sin(a.v), cos(a.v) * a.d};
}
template <class T>
Dual<T> cos(const Dual<T>& a) {
  using std::cos;
  using std::sin;
  return {cos(a.v), -(sin(a.v) * a.d)};
}
template <class T>
Dual<T> tan(const Dual<T>& a) {
  using std::tan;
  T t = tan(a.v);
  return {t, (T(1.0) + t * t) * a.d};
}
template <class T>
Dual<T> exp(const Dual<T>& a) {
  using std::exp;
  T e = exp(a.v);
  return {e, e * a.d};
}
template <class T>
Dual<T> log(const Dual<T>& a) {
  using std::log;
  return {log(a.v), a.d / a.v};
}
template <class T>
Dual<T> sqrt(const Dual<T>& a) {
  using std::sqrt;
  T s = sqrt(a.v);
  return {s, a.d / (T(2.0) * s)};
}
template <class T>
Dual<T> abs(const Dual<T>& a) {
  return value_of(a) < 0.0 ? -a : a;
}
template <class T>
Dual<T> abs2(const Dual<T>& a) { return a * a; }

/// Integer power by repeated squaring; negative exponents invert.
template <class T>
T ipow(const T& base, int k) {
  if (k < 0) return T(1.0) / ipow(base, -k);
  T result(1.0);
  T b = base;
  while (k > 0) {
    if (k & 1) result = result * b;
    b = b * b;
    k >>= 1;
  }
  return result;
}

/// Lifts a point into Dual<S> with tangent `dir`.
template <class S>
Eigen::Matrix<Dual<S>, Eigen::Dynamic, 1> lift(const Eigen::Matrix<S, Eigen::Dynamic, 1>& q,
                                               const Eigen::Matrix<S, Eigen::Dynamic, 1>& dir) {
  Eigen::Matrix<Dual<S>, Eigen::Dynamic, 1> out(q.size());
  for (Eigen::Index i = 0; i < q.size(); ++i) out[i] = Dual<S>(q[i], dir[i]);
  return out;
}

/// Lifts a point into Dual<S> seeded along coordinate axis `axis`.
template <class S>
Eigen::Matrix<Dual<S>, Eigen::Dynamic, 1> lift_axis(const Eigen::Matrix<S, Eigen::Dynamic, 1>& q,
                                                    Eigen::Index axis) {
  Eigen::Matrix<Dual<S>, Eigen::Dynamic, 1> out(q.size());
  for (Eigen::Index i = 0; i < q.size(); ++i) out[i] = Dual<S>(q[i], S(i == axis ? 1.0 : 0.0));
  return out;
}

template <class S, int R, int C>
Eigen::Matrix<S, R, C> value_part(const Eigen::Matrix<Dual<S>, R, C>& m) {
  return m.unaryExpr([](const Dual<S>& x) { return x.v; });
}
template <class S, int R, int C>
Eigen::Matrix<S, R, C> tangent_part(const Eigen::Matrix<Dual<S>, R, C>& m) {
  return m.unaryExpr([](const Dual<S>& x) { return x.d; });
}

/// Drops all derivative layers.
template <class S, int R, int C>
Eigen::Matrix<double, R, C> values(const Eigen::Matrix<S, R, C>& m) {
  return m.unaryExpr([](const S& x) { return value_of(x); });
}

}  // namespace subcheck

namespace Eigen {
template <class T>
struct NumTraits<subcheck::Dual<T>> : NumTraits<double> {
  using Real = subcheck::Dual<T>;
  using NonInteger = subcheck::Dual<T>;
  using Nested = subcheck::Dual<T>;
  using Literal = subcheck::Dual<T>;
  enum {
    IsComplex = 0,
    IsInteger = 0,
    IsSigned = 1,
    RequireInitialization = 1,
    ReadCost = 2 * NumTraits<T>::ReadCost,
    AddCost = 2 * NumTraits<T>::AddCost,
    MulCost = 3 * NumTraits<T>::MulCost
  };
};
}  // namespace Eigen
