#pragma once

// Maps shared by the test binaries.

#include <cmath>
#include <numbers>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "subcheck/submersion.hpp"

namespace fixtures {

using namespace subcheck;

constexpr double kPi = std::numbers::pi;

inline SubmersionMap flat_map(const std::vector<std::string>& comps, int dim, const ParamMap& params = {}) {
  std::set<std::string> names;
  for (const auto& [k, v] : params) names.insert(k);
  std::vector<Expr> exprs;
  for (const auto& c : comps) exprs.push_back(parse(c, dim, names).bind(params));
  return SubmersionMap(std::move(exprs), MetricField::euclidean(dim), standard_J(dim));
}

inline SubmersionMap example5(double a) { return flat_map({"x3*sin(a) - x5*cos(a)", "x6"}, 6, {{"a", a}}); }
inline SubmersionMap example6() { return flat_map({"(x5-x8)/sqrt(2)", "x6"}, 8); }
inline SubmersionMap example7() {
  return flat_map({"x2", "x1", "(x5+x6)/sqrt(2)", "(x7+x9)/sqrt(2)", "(x8+x10)/sqrt(2)"}, 10);
}
inline SubmersionMap example8() { return flat_map({"(x3-x5)/sqrt(2)", "x6", "(x7-x9)/sqrt(2)", "x8"}, 10); }
inline SubmersionMap example9(double a, double b) {
  return flat_map({"x1", "x2", "x3*cos(a) - x5*sin(a)", "x4*sin(b) - x6*cos(b)"}, 8, {{"a", a}, {"b", b}});
}

// R^4 x_f R^2 with metric g1 + f^2 g2, F(x, y) = (x1 sin a - x3 cos a, x4).
// The base map is slant with angle a; D1 = TM2.
inline SubmersionMap warped_map(const std::string& warp, double a) {
  const ParamMap params{{"a", a}};
  std::vector<Expr> exprs{parse("x1*sin(a) - x3*cos(a)", 6, {"a"}).bind(params), parse("x4", 6)};
  return SubmersionMap(std::move(exprs), MetricField::warped_product(4, 2, parse(warp, 6)),
                       product_J(standard_J(4), standard_J(2)));
}

// (sqrt(x1^2 + x2^2), x3) on R^4: anti-invariant, circle fibres, not umbilical.
inline SubmersionMap radial_map() { return flat_map({"sqrt(x1^2 + x2^2)", "x3"}, 4); }

inline Eigen::VectorXd unit(int n, int slot1) { return Eigen::VectorXd::Unit(n, slot1 - 1); }

inline Eigen::VectorXd random_point(std::mt19937_64& rng, int n, double lo = -1.0, double hi = 1.0) {
  std::uniform_real_distribution<double> u(lo, hi);
  return Eigen::VectorXd::NullaryExpr(n, [&] { return u(rng); });
}

// Point with x1 in [-0.5, 0.5] and the rest in [-1, 1].
inline Eigen::VectorXd warped_point(std::mt19937_64& rng) {
  Eigen::VectorXd p = random_point(rng, 6);
  p[0] *= 0.5;
  return p;
}

// Point with x1 in [1, 2] and the rest in [-1, 1].
inline Eigen::VectorXd radial_point(std::mt19937_64& rng) {
  Eigen::VectorXd p = random_point(rng, 4);
  p[0] = 1.5 + 0.5 * p[0];
  return p;
}

}  // namespace fixtures
