#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>

#include <Eigen/LU>

#include "subcheck/geometry.hpp"

using namespace subcheck;

namespace {

MetricField warped_exp_1x1() { return MetricField::warped_product(1, 1, parse("exp(x1)", 2)); }

// A warped metric with a nontrivial warp on a 2-dimensional base.
MetricField warped_2x2() { return MetricField::warped_product(2, 2, parse("exp(0.3*x1 - 0.2*x2^2)", 4)); }

// Koszul formula with metric derivatives taken by central differences.
Christoffel<double> fd_christoffel(const MetricField& g, const Eigen::VectorXd& q, double h) {
  const int n = g.dim();
  std::vector<Eigen::MatrixXd> dg;
  for (int l = 0; l < n; ++l) {
    Eigen::VectorXd qp = q, qm = q;
    qp[l] += h;
    qm[l] -= h;
    dg.push_back((g.at(qp) - g.at(qm)) / (2.0 * h));
  }
  const Eigen::MatrixXd ginv = g.at(q).inverse();
  Christoffel<double> gamma(static_cast<std::size_t>(n), Eigen::MatrixXd::Zero(n, n));
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        double acc = 0.0;
        for (int l = 0; l < n; ++l)
          acc += 0.5 * ginv(k, l) * (dg[static_cast<std::size_t>(i)](j, l) + dg[static_cast<std::size_t>(j)](i, l) - dg[static_cast<std::size_t>(l)](i, j));
        gamma[static_cast<std::size_t>(k)](i, j) = acc;
      }
  return gamma;
}

Eigen::VectorXd random_point(std::mt19937_64& rng, int n, double lo = -1.0, double hi = 1.0) {
  std::uniform_real_distribution<double> u(lo, hi);
  return Eigen::VectorXd::NullaryExpr(n, [&] { return u(rng); });
}

double inner_at(const MetricField& g, const Eigen::VectorXd& q, const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  return a.dot(g.at(q) * b);
}

}  // namespace

TEST_CASE("euclidean christoffels vanish") {
  const auto g = MetricField::euclidean(4);
  for (const auto& m : christoffel<double>(g, Eigen::VectorXd::Constant(4, 0.3))) CHECK(m.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("warped christoffels match the finite-difference Koszul oracle") {
  const auto g = warped_exp_1x1();
  std::mt19937_64 rng(11);
  for (int t = 0; t < 20; ++t) {
    const Eigen::VectorXd q = random_point(rng, 2, -0.5, 0.5);
    const auto exact = christoffel<double>(g, q);
    const auto fd = fd_christoffel(g, q, 1e-5);
    for (std::size_t k = 0; k < 2; ++k) CHECK((exact[k] - fd[k]).cwiseAbs().maxCoeff() < 1e-6);
    // closed form: Γ^1_22 = −f f', Γ^2_12 = f'/f
    const double e2 = std::exp(2.0 * q[0]);
    CHECK(exact[0](1, 1) == doctest::Approx(-e2).epsilon(1e-13));
    CHECK(exact[1](0, 1) == doctest::Approx(1.0).epsilon(1e-13));
    CHECK(exact[1](1, 0) == doctest::Approx(1.0).epsilon(1e-13));
  }
}

TEST_CASE("constant warp gives vanishing christoffels") {
  const auto g = MetricField::warped_product(2, 2, parse("2", 4));
  for (const auto& m : christoffel<double>(g, Eigen::VectorXd::Constant(4, -0.2))) CHECK(m.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("christoffels are symmetric in the lower indices") {
  const auto g = warped_2x2();
  std::mt19937_64 rng(3);
  for (int t = 0; t < 20; ++t) {
    for (const auto& m : christoffel<double>(g, random_point(rng, 4))) CHECK((m - m.transpose()).cwiseAbs().maxCoeff() == 0.0);
  }
}

TEST_CASE("warp may only depend on the first factor") {
  CHECK_THROWS_AS(MetricField::warped_product(1, 1, parse("exp(x2)", 2)), std::invalid_argument);
  const auto g = MetricField::warped_product(1, 1, parse("x1", 2));
  CHECK_THROWS_AS(g.at(Eigen::Vector2d(-1.0, 0.0)), NumericalError);
}

TEST_CASE("covariant derivative in flat space is the directional derivative") {
  const auto g = MetricField::euclidean(3);
  const auto y = VectorField::from_exprs({parse("x1^2", 3), parse("0", 3), parse("0", 3)});
  const Eigen::VectorXd q(Eigen::Vector3d(1.5, 0.2, -0.4));
  const Eigen::VectorXd r = covariant_derivative<double>(g, Eigen::VectorXd(Eigen::Vector3d(1, 0, 0)), y, q);
  CHECK(r[0] == 3.0);
  CHECK(r[1] == 0.0);
  CHECK(r[2] == 0.0);
}

TEST_CASE("connection is torsion free on random polynomial fields") {
  const auto g = warped_2x2();
  std::mt19937_64 rng(5);
  for (int t = 0; t < 50; ++t) {
    const Eigen::VectorXd q = random_point(rng, 4);
    const auto x = random_polynomial_field(4, q, rng);
    const auto y = random_polynomial_field(4, q, rng);
    const Eigen::VectorXd torsion =
        covariant_derivative<double>(g, x, y, q) - covariant_derivative<double>(g, y, x, q) - lie_bracket<double>(x, y, q);
    CHECK(torsion.cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("connection is metric on the warped product") {
  const auto g = warped_2x2();
  std::mt19937_64 rng(6);
  for (int t = 0; t < 100; ++t) {
    const Eigen::VectorXd q = random_point(rng, 4);
    const Eigen::VectorXd x = random_point(rng, 4);
    const auto y = random_polynomial_field(4, q, rng);
    const auto z = random_polynomial_field(4, q, rng);
    // ∂_X g(Y, Z) through one dual layer
    const Vec<D1> ql = lift<double>(q, x);
    const Mat<D1> gl = g.at<D1>(ql);
    const D1 gyz = y(ql).dot(gl * z(ql));
    const double lhs = gyz.d;
    const double rhs = inner_at(g, q, covariant_derivative<double>(g, x, y, q), z(q)) +
                       inner_at(g, q, y(q), covariant_derivative<double>(g, x, z, q));
    CHECK(std::abs(lhs - rhs) < 1e-8);
  }
}

TEST_CASE("lie bracket of coordinate fields") {
  const auto e1 = VectorField::constant(Eigen::Vector2d(1, 0));
  const auto e2 = VectorField::constant(Eigen::Vector2d(0, 1));
  const Eigen::VectorXd q(Eigen::Vector2d(0.3, 0.7));
  CHECK(lie_bracket<double>(e1, e2, q).cwiseAbs().maxCoeff() == 0.0);
  const auto x = VectorField::from_exprs({parse("x2", 2), parse("0", 2)});
  const Eigen::VectorXd b = lie_bracket<double>(x, e2, q);
  CHECK(b[0] == -1.0);
  CHECK(b[1] == 0.0);
}

TEST_CASE("jacobi identity on random polynomial fields") {
  std::mt19937_64 rng(8);
  auto bracket_field = [](const VectorField& a, const VectorField& b) {
    return VectorField(a.dim(), [a, b](const auto& q) {
      using S = typename std::decay_t<decltype(q)>::Scalar;
      return lie_bracket<S>(a, b, q);
    });
  };
  for (int t = 0; t < 30; ++t) {
    const Eigen::VectorXd q = random_point(rng, 4);
    const auto x = random_polynomial_field(4, q, rng);
    const auto y = random_polynomial_field(4, q, rng);
    const auto z = random_polynomial_field(4, q, rng);
    const Eigen::VectorXd r = lie_bracket<double>(x, bracket_field(y, z), q) +
                              lie_bracket<double>(y, bracket_field(z, x), q) +
                              lie_bracket<double>(z, bracket_field(x, y), q);
    CHECK(r.cwiseAbs().maxCoeff() < 1e-9);
  }
}

TEST_CASE("sectional curvature") {
  SUBCASE("flat") {
    const auto g = MetricField::euclidean(4);
    CHECK(sectional_curvature(g, Eigen::VectorXd::Zero(4), Eigen::Vector4d(1, 2, 0, 0), Eigen::Vector4d(0, 1, 3, 1)) == 0.0);
  }
  SUBCASE("warped exp has curvature -1") {
    const auto g = warped_exp_1x1();
    std::mt19937_64 rng(9);
    for (int t = 0; t < 20; ++t) {
      const Eigen::VectorXd q = random_point(rng, 2, -0.5, 0.5);
      const Eigen::VectorXd x = random_point(rng, 2);
      const Eigen::VectorXd y = random_point(rng, 2);
      const double k = sectional_curvature(g, q, x, y);
      CHECK(std::abs(k + 1.0) < 1e-5);
      CHECK(sectional_curvature(g, q, y, x) == k);
    }
  }
  SUBCASE("degenerate plane") {
    const auto g = warped_exp_1x1();
    CHECK_THROWS_AS(sectional_curvature(g, Eigen::Vector2d(0, 0), Eigen::Vector2d(1, 2), Eigen::Vector2d(2, 4)), DegeneratePlane);
  }
}

TEST_CASE("riemann antisymmetry and first bianchi identity") {
  const auto g = warped_2x2();
  std::mt19937_64 rng(10);
  for (int t = 0; t < 20; ++t) {
    const Eigen::VectorXd q = random_point(rng, 4);
    const Riemann r = riemann(g, q);
    const Eigen::VectorXd x = random_point(rng, 4), y = random_point(rng, 4), z = random_point(rng, 4);
    CHECK((r.apply(x, y, z) + r.apply(y, x, z)).cwiseAbs().maxCoeff() < 1e-8);
    CHECK((r.apply(x, y, z) + r.apply(y, z, x) + r.apply(z, x, y)).cwiseAbs().maxCoeff() < 1e-8);
    // g(R(X,Y)Z, W) = −g(R(X,Y)W, Z)
    const Eigen::VectorXd w = random_point(rng, 4);
    CHECK(std::abs(inner_at(g, q, r.apply(x, y, z), w) + inner_at(g, q, r.apply(x, y, w), z)) < 1e-8);
  }
}

TEST_CASE("standard J") {
  const auto j2 = standard_J(2);
  CHECK(j2.matrix()(1, 0) == 1.0);
  CHECK(j2.matrix()(0, 1) == -1.0);
  CHECK((j2.matrix() * j2.matrix() + Eigen::Matrix2d::Identity()).cwiseAbs().maxCoeff() == 0.0);
  CHECK_THROWS_AS(standard_J(5), std::invalid_argument);

  const auto j6 = standard_J(6);
  const Eigen::VectorXd e1 = Eigen::VectorXd::Unit(6, 0);
  CHECK(j6.matrix() * e1 == Eigen::VectorXd::Unit(6, 1));

  const auto j8 = standard_J(8);
  const Eigen::VectorXd v = Eigen::VectorXd::Unit(8, 4) + Eigen::VectorXd::Unit(8, 7);
  const Eigen::VectorXd expected = Eigen::VectorXd::Unit(8, 5) - Eigen::VectorXd::Unit(8, 6);
  CHECK(j8.matrix() * v == expected);
}

TEST_CASE("product J") {
  const auto j = product_J(standard_J(4), standard_J(2));
  CHECK(j.matrix() == standard_J(6).matrix());
  CHECK((j.matrix() * j.matrix() + Eigen::MatrixXd::Identity(6, 6)).cwiseAbs().maxCoeff() == 0.0);
  const auto g = MetricField::warped_product(4, 2, parse("exp(x1)", 6));
  std::mt19937_64 rng(12);
  for (int t = 0; t < 20; ++t) CHECK(complex_structure_defect(j, g, random_point(rng, 6, -0.5, 0.5)) < 1e-10);
}
