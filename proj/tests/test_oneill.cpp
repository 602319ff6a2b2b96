#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>

#include <Eigen/Cholesky>
#include <Eigen/QR>

#include "fixtures.hpp"
#include "subcheck/oneill.hpp"

using namespace subcheck;
using namespace fixtures;

namespace {

constexpr double kAlpha = kPi / 3;

struct Setup {
  SemiSlantAnalysis a;
  FieldCalculus fc;
};

Setup setup(const SubmersionMap& f, const Eigen::VectorXd& p) {
  SemiSlantAnalysis a = split_d1_d2(f, p);
  FieldCalculus fc(f, a.model);
  return {std::move(a), std::move(fc)};
}

Eigen::MatrixXd random_orthogonal(std::mt19937_64& rng, int n) {
  std::normal_distribution<double> nd;
  const Eigen::MatrixXd m = Eigen::MatrixXd::NullaryExpr(n, n, [&] { return nd(rng); });
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(m);
  return qr.householderQ() * Eigen::MatrixXd::Identity(n, n);
}

// Unit horizontal direction of the warped fixture along which grad f lifts.
Eigen::VectorXd warped_h1() {
  Eigen::VectorXd h = Eigen::VectorXd::Zero(6);
  h[0] = std::sin(kAlpha);
  h[2] = -std::cos(kAlpha);
  return h;
}

}  // namespace

TEST_CASE("T and A vanish for linear maps on a flat source") {
  std::mt19937_64 rng(3);
  for (const auto& f : {example5(0.7), example7(), example8()}) {
    const int n = f.source_dim();
    const Eigen::VectorXd p = random_point(rng, n);
    const auto [a, fc] = setup(f, p);
    for (int k = 0; k < 5; ++k) {
      const VectorField y = random_polynomial_field(n, p, rng);
      const Eigen::VectorXd e = random_point(rng, n);
      CHECK(fc.tensor_t<double>(e, y, p).norm() < 1e-12);
      CHECK(fc.tensor_a<double>(e, y, p).norm() < 1e-12);
      CHECK(fc.second_fundamental_form<double>(e, y, p).norm() < 1e-12);
    }
    CHECK(mean_curvature(fc, a.vertical).norm() < 1e-12);
    CHECK(umbilical_residual(fc, a.vertical, mean_curvature(fc, a.vertical), rng) < 1e-12);
  }
}

TEST_CASE("warped fixture is a semi-slant Riemannian submersion") {
  const auto f = warped_map("exp(x1)", kAlpha);
  std::mt19937_64 rng(4);
  for (int t = 0; t < 10; ++t) {
    const auto a = split_d1_d2(f, warped_point(rng));
    CHECK(a.submersion_residual < 1e-12);
    CHECK(a.verdict == Verdict::SemiSlant);
    CHECK(std::abs(*a.theta - kAlpha) < 1e-8);
    const Eigen::MatrixXd pd1 = a.d1_projector();
    CHECK((pd1 * unit(6, 5) - unit(6, 5)).norm() < 1e-10);
    CHECK((pd1 * unit(6, 6) - unit(6, 6)).norm() < 1e-10);
  }
}

TEST_CASE("fibre shape operator of the warped fixture") {
  const auto f = warped_map("exp(x1)", kAlpha);
  std::mt19937_64 rng(5);
  for (int t = 0; t < 20; ++t) {
    const Eigen::VectorXd p = warped_point(rng);
    const auto [a, fc] = setup(f, p);
    const double fv = std::exp(p[0]);
    // coordinate field: T_{∂5}∂5 = −f ℋ grad f, grad f = f ∂1 on the base
    const Eigen::VectorXd e5 = unit(6, 5);
    const Eigen::VectorXd t55 = fc.tensor_t<double>(e5, VectorField::constant(e5), p);
    const Eigen::VectorXd oracle = -fv * fv * std::sin(kAlpha) * warped_h1();
    CHECK((t55 - oracle).norm() < 1e-6 * (1.0 + oracle.norm()));
    // unit field: T_X X = −ℋ grad f / f
    const Eigen::VectorXd x = unit(6, 6) / fv;
    const Eigen::VectorXd txx = fc.tensor_t<double>(x, fc.extend(Op::Vertical, x), p);
    CHECK((txx + std::sin(kAlpha) * warped_h1()).norm() < 1e-6);
    // mean curvature: two flat kernel directions, two warped ones
    const Eigen::VectorXd h = mean_curvature(fc, a.vertical);
    CHECK((h + 0.5 * std::sin(kAlpha) * warped_h1()).norm() < 1e-6);
  }
}

TEST_CASE("tensoriality of T and A") {
  const auto f = warped_map("exp(x1)", kAlpha);
  std::mt19937_64 rng(6);
  for (int t = 0; t < 10; ++t) {
    const Eigen::VectorXd p = warped_point(rng);
    const auto [a, fc] = setup(f, p);
    const Eigen::VectorXd e = random_point(rng, 6);
    const Eigen::VectorXd v = random_point(rng, 6);
    const VectorField bump = random_polynomial_field(6, p, rng);
    const Eigen::VectorXd bp = bump(p);
    const VectorField other(6, [bump, bp, v](const auto& q) {
      using S = typename std::decay_t<decltype(q)>::Scalar;
      return Vec<S>(bump(q) - cast_vector<S>(bp) + cast_vector<S>(v));
    });
    const VectorField flat = VectorField::constant(v);
    CHECK((fc.tensor_t<double>(e, flat, p) - fc.tensor_t<double>(e, other, p)).norm() < 1e-9);
    CHECK((fc.tensor_a<double>(e, flat, p) - fc.tensor_a<double>(e, other, p)).norm() < 1e-9);
    // projected extension of a vertical vector
    const Eigen::VectorXd w = a.ops.vertical * v;
    CHECK((fc.tensor_t<double>(e, VectorField::constant(w), p) - fc.tensor_t<double>(e, fc.extend(Op::Vertical, w), p))
              .norm() < 1e-9);
  }
}

TEST_CASE("T is symmetric on vertical pairs and A is half the vertical bracket") {
  const auto f = warped_map("exp(x1)", kAlpha);
  std::mt19937_64 rng(7);
  for (int t = 0; t < 10; ++t) {
    const Eigen::VectorXd p = warped_point(rng);
    const auto [a, fc] = setup(f, p);
    const Eigen::VectorXd x = a.ops.vertical * random_point(rng, 6);
    const Eigen::VectorXd y = a.ops.vertical * random_point(rng, 6);
    CHECK((fc.tensor_t<double>(x, VectorField::constant(y), p) - fc.tensor_t<double>(y, VectorField::constant(x), p))
              .norm() < 1e-9);
    const VectorField Z = fc.random_field(Op::Horizontal, p, rng);
    const VectorField W = fc.random_field(Op::Horizontal, p, rng);
    const Eigen::VectorXd half = 0.5 * a.ops.vertical * lie_bracket<double>(Z, W, p);
    CHECK(g_norm(a.metric, fc.tensor_a<double>(Z(p), W, p) - half) < 1e-8);
    // g(A_Z V, W) = −g(V, A_Z W)
    const Eigen::VectorXd z = Z(p);
    const Eigen::VectorXd vv = x;
    const Eigen::VectorXd ww = W(p);
    const double lhs = fc.tensor_a<double>(z, fc.extend(Op::Vertical, vv), p).dot(a.metric * ww);
    const double rhs = vv.dot(a.metric * fc.tensor_a<double>(z, fc.extend(Op::Horizontal, ww), p));
    CHECK(std::abs(lhs + rhs) < 1e-8);
  }
}

TEST_CASE("fibre connection") {
  const auto f = warped_map("exp(x1)", kAlpha);
  std::mt19937_64 rng(8);
  for (int t = 0; t < 10; ++t) {
    const Eigen::VectorXd p = warped_point(rng);
    const auto [a, fc] = setup(f, p);
    const VectorField X = fc.random_field(Op::Vertical, p, rng);
    const VectorField Y = fc.random_field(Op::Vertical, p, rng);
    const VectorField Z = fc.random_field(Op::Vertical, p, rng);
    const Eigen::VectorXd x = X(p);
    SUBCASE("metric on fibres") {
      const auto q = lift(p, x);
      const D1 gyz = Y(q).dot(f.metric().at<D1>(q) * Z(q));
      const double rhs = fc.hat_nabla<double>(x, Y, p).dot(a.metric * Z(p)) +
                         Y(p).dot(a.metric * fc.hat_nabla<double>(x, Z, p));
      CHECK(std::abs(gyz.d - rhs) < 1e-8);
    }
    SUBCASE("Gauss splitting") {
      const Eigen::VectorXd d = fc.nabla<double>(x, Y, p) - fc.hat_nabla<double>(x, Y, p) - fc.tensor_t<double>(x, Y, p);
      CHECK(d.norm() < 1e-10);
    }
  }
  SUBCASE("constant vertical frame on a flat source") {
    const auto g = example6();
    const Eigen::VectorXd p = random_point(rng, 8);
    const auto [a, fc] = setup(g, p);
    for (int i = 0; i < a.vertical.size(); ++i) {
      const Eigen::VectorXd e = a.vertical.vectors.col(i);
      CHECK(fc.hat_nabla<double>(e, VectorField::constant(e), p).norm() < 1e-14);
    }
  }
}

TEST_CASE("covariant derivatives of phi and omega against a product-rule oracle") {
  // (∇_X φ)Y = P_V[(D_X Φ)Y + Φ D_X Y + Γ(X, ΦY)] − Φ P_V[D_X Y + Γ(X, Y)] with D_X Φ by central differences.
  auto oracle = [](const SubmersionMap& f, const Eigen::VectorXd& x, const VectorField& y, const Eigen::VectorXd& p,
                   bool omega) {
    const double h = 1e-5;
    auto op_at = [&](const Eigen::VectorXd& q) {
      const auto o = split_operators<double>(f, q);
      return Eigen::MatrixXd(omega ? o.omega : o.phi);
    };
    const auto o = split_operators<double>(f, p);
    const Eigen::MatrixXd m = omega ? o.omega : o.phi;
    const Eigen::MatrixXd target = omega ? o.horizontal : o.vertical;
    const Eigen::MatrixXd dm = (op_at(p + h * x) - op_at(p - h * x)) / (2 * h);
    const auto gamma = christoffel<double>(f.metric(), p);
    const Eigen::VectorXd yp = y(p);
    const Eigen::VectorXd dy = directional_derivative<double>(y, p, x);
    const Eigen::VectorXd first = target * (dm * yp + m * dy + contract(gamma, x, Eigen::VectorXd(m * yp)));
    return Eigen::VectorXd(first - m * o.vertical * (dy + contract(gamma, x, yp)));
  };
  std::mt19937_64 rng(9);
  SUBCASE("example 5") {
    const auto f = example5(0.4);
    for (int t = 0; t < 10; ++t) {
      const Eigen::VectorXd p = random_point(rng, 6);
      const auto [a, fc] = setup(f, p);
      const VectorField X = fc.random_field(Op::Vertical, p, rng);
      const VectorField Y = fc.random_field(Op::Vertical, p, rng);
      const Eigen::VectorXd x = X(p);
      CHECK((fc.nabla_phi<double>(x, Y, p) - oracle(f, x, Y, p, false)).norm() < 1e-8);
      CHECK((fc.nabla_omega<double>(x, Y, p) - oracle(f, x, Y, p, true)).norm() < 1e-8);
      // constant operators and constant field
      const Eigen::VectorXd y0 = a.ops.vertical * random_point(rng, 6);
      CHECK(fc.nabla_phi<double>(x, VectorField::constant(y0), p).norm() < 1e-12);
      CHECK(fc.nabla_omega<double>(x, VectorField::constant(y0), p).norm() < 1e-12);
    }
  }
  SUBCASE("warped fixture") {
    const auto f = warped_map("exp(x1)", kAlpha);
    for (int t = 0; t < 10; ++t) {
      const Eigen::VectorXd p = warped_point(rng);
      const auto [a, fc] = setup(f, p);
      const VectorField Y = fc.random_field(Op::Vertical, p, rng);
      const Eigen::VectorXd x = a.ops.vertical * random_point(rng, 6);
      CHECK((fc.nabla_phi<double>(x, Y, p) - oracle(f, x, Y, p, false)).norm() < 1e-7);
      CHECK((fc.nabla_omega<double>(x, Y, p) - oracle(f, x, Y, p, true)).norm() < 1e-7);
    }
  }
}

TEST_CASE("second fundamental form") {
  const auto f = warped_map("exp(x1)", kAlpha);
  std::mt19937_64 rng(10);
  for (int t = 0; t < 10; ++t) {
    const Eigen::VectorXd p = warped_point(rng);
    const auto [a, fc] = setup(f, p);
    const VectorField X = random_polynomial_field(6, p, rng);
    const VectorField Z = random_polynomial_field(6, p, rng);
    const Eigen::VectorXd d =
        fc.second_fundamental_form<double>(X(p), Z, p) - fc.second_fundamental_form<double>(Z(p), X, p);
    CHECK(d.norm() < 1e-9);
    const VectorField H1 = fc.random_field(Op::Horizontal, p, rng);
    const VectorField H2 = fc.random_field(Op::Horizontal, p, rng);
    CHECK(fc.second_fundamental_form<double>(H1(p), H2, p).norm() < 1e-9);
  }
}

TEST_CASE("mean curvature is frame independent") {
  const auto f = warped_map("exp(x1)", kAlpha);
  std::mt19937_64 rng(11);
  for (int t = 0; t < 10; ++t) {
    const Eigen::VectorXd p = warped_point(rng);
    const auto [a, fc] = setup(f, p);
    Frame rotated = a.vertical;
    rotated.vectors = a.vertical.vectors * random_orthogonal(rng, a.vertical.size());
    CHECK((mean_curvature(fc, a.vertical) - mean_curvature(fc, rotated)).norm() < 1e-10);
  }
}

TEST_CASE("umbilicity") {
  std::mt19937_64 rng(12);
  SUBCASE("warped fixture is umbilical along D1 only") {
    const auto f = warped_map("exp(x1)", kAlpha);
    for (int t = 0; t < 10; ++t) {
      const Eigen::VectorXd p = warped_point(rng);
      const auto [a, fc] = setup(f, p);
      CHECK(umbilical_residual(fc, a.d1, mean_curvature(fc, a.d1), rng) < 1e-8);
      CHECK(umbilical_residual(fc, a.vertical, mean_curvature(fc, a.vertical), rng) > 1e-3);
    }
  }
  SUBCASE("constant warp") {
    const auto f = warped_map("2", kAlpha);
    const Eigen::VectorXd p = warped_point(rng);
    const auto [a, fc] = setup(f, p);
    const Eigen::VectorXd h = mean_curvature(fc, a.vertical);
    CHECK(h.norm() < 1e-12);
    CHECK(umbilical_residual(fc, a.vertical, h, rng) < 1e-8);
  }
  SUBCASE("radial map bends its fibres") {
    const auto f = radial_map();
    for (int t = 0; t < 10; ++t) {
      const Eigen::VectorXd p = radial_point(rng);
      const auto [a, fc] = setup(f, p);
      CHECK(a.verdict == Verdict::AntiInvariant);
      const double r = std::hypot(p[0], p[1]);
      Eigen::VectorXd radial = Eigen::VectorXd::Zero(4);
      radial << p[0] / r, p[1] / r, 0.0, 0.0;
      const Eigen::VectorXd h = mean_curvature(fc, a.vertical);
      CHECK((h + radial / (2 * r)).norm() < 1e-8);
      CHECK(umbilical_residual(fc, a.vertical, h, rng) > 1e-3);
    }
  }
}

TEST_CASE("Fhat") {
  std::mt19937_64 rng(13);
  const auto f = example5(0.9);
  for (int t = 0; t < 10; ++t) {
    const Eigen::VectorXd p = random_point(rng, 6);
    const auto [a, fc] = setup(f, p);
    const VectorField X = fc.random_field(Op::Vertical, p, rng);
    const VectorField Y = fc.random_field(Op::Vertical, p, rng);
    const Eigen::VectorXd x = X(p);
    CHECK((fc.nabla_fhat<double>(x, Y, p) - fc.nabla_fhat_expanded<double>(x, Y, p)).norm() < 1e-8);
    const Eigen::MatrixXd fhat = fc.op<double>(Op::Fhat, p);
    for (int i = 0; i < a.d1.size(); ++i) {
      const Eigen::VectorXd e = a.d1.vectors.col(i);
      CHECK((fhat * e - a.ops.j * e).norm() < 1e-10);
    }
    for (int i = 0; i < a.d2.size(); ++i) {
      const Eigen::VectorXd e = a.d2.vectors.col(i);
      CHECK((fhat * e - a.ops.phi * e).norm() < 1e-10);
    }
  }
}

TEST_CASE("harmonic trace") {
  std::mt19937_64 rng(14);
  SUBCASE("linear maps") {
    for (const auto& f : {example5(0.3), example9(0.2, 0.5)}) {
      const Eigen::VectorXd p = random_point(rng, f.source_dim());
      const auto [a, fc] = setup(f, p);
      const HarmonicTrace h = harmonic_trace(fc, a);
      CHECK(h.full.norm() < 1e-12);
      CHECK(h.d2.norm() < 1e-12);
      CHECK(h.pairing < 1e-8);
    }
  }
  SUBCASE("full trace is frame independent on the warped fixture") {
    const auto f = warped_map("exp(x1)", kAlpha);
    for (int t = 0; t < 5; ++t) {
      const Eigen::VectorXd p = warped_point(rng);
      const auto [a, fc] = setup(f, p);
      const Eigen::MatrixXd l = a.metric.llt().matrixL();
      const Eigen::MatrixXd frame = l.transpose().triangularView<Eigen::Upper>().solve(random_orthogonal(rng, 6));
      Eigen::VectorXd direct = Eigen::VectorXd::Zero(2);
      for (int i = 0; i < 6; ++i) {
        const Eigen::VectorXd e = frame.col(i);
        direct += fc.second_fundamental_form<double>(e, VectorField::constant(e), p);
      }
      CHECK((harmonic_trace(fc, a).full - direct).norm() < 1e-8);
    }
  }
  SUBCASE("radial map is not harmonic") {
    const auto f = radial_map();
    const Eigen::VectorXd p = radial_point(rng);
    const auto [a, fc] = setup(f, p);
    const HarmonicTrace h = harmonic_trace(fc, a);
    // F1 = r has Laplacian 1/r
    CHECK(std::abs(h.full[0] - 1.0 / std::hypot(p[0], p[1])) < 1e-8);
    CHECK(h.d2.norm() > 1e-3);
  }
}

TEST_CASE("fibre curvature of the warped fixture through the Gauss equation") {
  // Fibre = ker G x R^2 with warp exp(x1) restricted to the fibre: K^ = −cos^2(a).
  const auto f = warped_map("exp(x1)", kAlpha);
  std::mt19937_64 rng(15);
  for (int t = 0; t < 5; ++t) {
    const Eigen::VectorXd p = warped_point(rng);
    const auto [a, fc] = setup(f, p);
    const double fv = std::exp(p[0]);
    const Eigen::VectorXd x = unit(6, 5) / fv, y = unit(6, 6) / fv;
    const double k = sectional_curvature(f.metric(), p, x, y);
    CHECK(std::abs(k + 1.0) < 1e-5);
    const Eigen::VectorXd txx = fc.tensor_t<double>(x, VectorField::constant(x), p);
    const Eigen::VectorXd tyy = fc.tensor_t<double>(y, VectorField::constant(y), p);
    const Eigen::VectorXd txy = fc.tensor_t<double>(x, VectorField::constant(y), p);
    const double k_fibre = k + txx.dot(a.metric * tyy) - txy.dot(a.metric * txy);
    CHECK(std::abs(k_fibre + std::pow(std::cos(kAlpha), 2)) < 1e-5);
  }
}

TEST_CASE("Kahler defect") {
  std::mt19937_64 rng(16);
  const Eigen::VectorXd p = warped_point(rng);
  const auto j = product_J(standard_J(4), standard_J(2));
  CHECK(kahler_defect(MetricField::warped_product(4, 2, parse("exp(x1)", 6)), j, p) > 1e-3);
  CHECK(kahler_defect(MetricField::warped_product(4, 2, parse("2", 6)), j, p) < 1e-10);
  CHECK(kahler_defect(MetricField::euclidean(6), standard_J(6), p) == 0.0);
}

TEST_CASE("bracket leakage") {
  const Eigen::MatrixXd g = Eigen::MatrixXd::Identity(3, 3);
  // contact distribution spanned by ∂x + y∂z and ∂y
  const VectorField X(3, [](const auto& q) {
    using S = typename std::decay_t<decltype(q)>::Scalar;
    Vec<S> v(3);
    v << S(1.0), S(0.0), q[1];
    return v;
  });
  const VectorField Y = VectorField::constant(Eigen::Vector3d(0.0, 1.0, 0.0));
  auto span_projector = [](const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
    Eigen::MatrixXd m(3, 2);
    m << a, b;
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(m);
    const Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(3, 2);
    return Eigen::MatrixXd(q * q.transpose());
  };
  std::mt19937_64 rng(17);
  for (int t = 0; t < 10; ++t) {
    const Eigen::VectorXd p = random_point(rng, 3);
    const double leak = bracket_leakage(g, span_projector(X(p), Y(p)), X, Y, p);
    CHECK(leak == doctest::Approx(1.0 / std::sqrt(1.0 + p[1] * p[1])).epsilon(1e-12));
    CHECK(leak > 1e-2);
  }
  // ∂x and x∂y span an integrable distribution away from x = 0
  const VectorField U = VectorField::constant(Eigen::Vector3d(1.0, 0.0, 0.0));
  const VectorField V(3, [](const auto& q) {
    using S = typename std::decay_t<decltype(q)>::Scalar;
    Vec<S> v(3);
    v << S(0.0), q[0], S(0.0);
    return v;
  });
  const Eigen::VectorXd p = Eigen::Vector3d(0.5, 0.2, -0.3);
  CHECK(bracket_leakage(g, span_projector(U(p), V(p)), U, V, p) < 1e-14);
}
