#include "subcheck/theorems.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <functional>
#include <limits>
#include <map>
#include <mutex>
#include <numbers>
#include <thread>

namespace subcheck {

const char* to_string(CheckVerdict v) {
  switch (v) {
    case CheckVerdict::Pass: return "pass";
    case CheckVerdict::Fail: return "fail";
    case CheckVerdict::Vacuous: return "vacuous";
    case CheckVerdict::Skipped: return "skipped";
  }
  return "?";
}

const char* to_string(CheckKind k) {
  switch (k) {
    case CheckKind::Identity: return "identity";
    case CheckKind::Biconditional: return "biconditional";
    case CheckKind::Property: return "property";
  }
  return "?";
}

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct Draw {
  double condition = 0.0;
  double direct = kNaN;
};

// Shared, read-only inputs of one entry's run.
struct EntryState {
  std::vector<SemiSlantAnalysis> analyses;
  std::vector<FieldCalculus> calculi;
  double theta_hat = kNaN;
};

struct Ctx {
  const SemiSlantAnalysis& a;
  const FieldCalculus& fc;
  const EntryState& entry;
  std::mt19937_64& rng;
  int draws;

  const Eigen::VectorXd& q() const { return a.point; }
  double norm(const Eigen::VectorXd& v) const { return g_norm(a.metric, v); }
  Eigen::MatrixXd op(Op o) const { return op_matrix(o, a.ops, fc.model()); }
  VectorField field(Op o) const { return fc.random_field(o, a.point, rng); }

  Eigen::VectorXd nabla(const Eigen::VectorXd& x, const VectorField& y) const { return fc.nabla<double>(x, y, q()); }
  Eigen::VectorXd hat(const Eigen::VectorXd& x, const VectorField& y) const { return fc.hat_nabla<double>(x, y, q()); }
  Eigen::VectorXd hnab(const Eigen::VectorXd& x, const VectorField& y) const { return fc.h_nabla<double>(x, y, q()); }
  Eigen::VectorXd t(const Eigen::VectorXd& x, const VectorField& y) const { return fc.tensor_t<double>(x, y, q()); }
  Eigen::VectorXd A(const Eigen::VectorXd& x, const VectorField& y) const { return fc.tensor_a<double>(x, y, q()); }
  VectorField apply(Op o, const VectorField& y) const { return fc.apply(o, y); }

  Eigen::VectorXd target_vector() const {
    std::normal_distribution<double> nd;
    Eigen::VectorXd w(fc.map().target_dim());
    for (auto& x : w) x = nd(rng);
    return w;
  }

  Eigen::VectorXd unit_in(const Frame& fr) const {
    std::normal_distribution<double> nd;
    Eigen::VectorXd c(fr.size());
    for (auto& x : c) x = nd(rng);
    return fr.vectors * c.normalized();
  }
};

// Vertical and horizontal parts of ∇_X JY for a vertical field Y:
// a = ∇̂_X φY + 𝒯_X ωY, b = 𝒯_X φY + ℋ∇_X ωY.
struct JSplit {
  Eigen::VectorXd a;
  Eigen::VectorXd b;
};

JSplit j_split_vertical(const Ctx& c, const Eigen::VectorXd& x, const VectorField& y) {
  const VectorField phi_y = c.apply(Op::Phi, y);
  const VectorField omega_y = c.apply(Op::Omega, y);
  return {c.hat(x, phi_y) + c.t(x, omega_y), c.t(x, phi_y) + c.hnab(x, omega_y)};
}

// Same for a horizontal field Z: a = ∇̂_X BZ + 𝒯_X CZ, b = 𝒯_X BZ + ℋ∇_X CZ.
JSplit j_split_horizontal(const Ctx& c, const Eigen::VectorXd& x, const VectorField& z) {
  const VectorField bz = c.apply(Op::B, z);
  const VectorField cz = c.apply(Op::C, z);
  return {c.hat(x, bz) + c.t(x, cz), c.t(x, bz) + c.hnab(x, cz)};
}

using Evaluator = std::function<std::vector<Draw>(Ctx&)>;

template <class F>
std::vector<Draw> repeat(Ctx& c, F f) {
  std::vector<Draw> out;
  for (int k = 0; k < c.draws; ++k) out.push_back(f());
  return out;
}

std::vector<Draw> one(double condition, double direct = kNaN) { return {Draw{condition, direct}}; }

// ---- evaluators --------------------------------------------------------------

std::vector<Draw> eval_riemannian(Ctx& c) { return one(c.a.submersion_residual); }
std::vector<Draw> eval_algebraic(Ctx& c) { return one(algebraic_identities(c.a).max()); }
std::vector<Draw> eval_distributions(Ctx& c) { return one(distribution_relations(c.a).max()); }

std::vector<Draw> eval_slant_converse(Ctx& c) {
  if (c.a.d2.size() == 0) return one(0.0);
  const double c2 = std::pow(std::cos(*c.a.theta), 2);
  const Eigen::MatrixXd m = (-(c.a.ops.phi * c.a.ops.phi) - c2 * c.a.ops.vertical) * c.a.d2_projector();
  return one(operator_norm(c.a.metric, m));
}

std::vector<Draw> eval_constancy(Ctx& c) {
  const auto cos2 = [](double t) { return std::pow(std::cos(t), 2); };
  std::vector<Draw> out{Draw{std::abs(cos2(*c.a.theta) - cos2(c.entry.theta_hat))}};
  if (c.a.d2.size() == 0) return out;
  for (int k = 0; k < 4 * c.draws; ++k)
    out.push_back(Draw{std::abs(cos2(direct_angle(c.a, c.unit_in(c.a.d2))) - cos2(*c.a.theta))});
  return out;
}

std::vector<Draw> eval_j_hat(Ctx& c) { return one(j_hat_square_residual(c.a)); }

std::vector<Draw> eval_even(Ctx& c) {
  const auto e = even_dimension_check(c.fc.map(), c.a);
  return one(e.holds ? 0.0 : 1.0);
}

std::vector<Draw> eval_kahler_vertical(Ctx& c) {
  return repeat(c, [&] {
    const VectorField X = c.field(Op::Vertical), Y = c.field(Op::Vertical);
    const Eigen::VectorXd x = X(c.q());
    const JSplit s = j_split_vertical(c, x, Y);
    const Eigen::VectorXd hy = c.hat(x, Y);
    const Eigen::VectorXd ty = c.t(x, Y);
    const Eigen::VectorXd r1 = s.a - c.op(Op::Phi) * hy - c.op(Op::B) * ty;
    const Eigen::VectorXd r2 = s.b - c.op(Op::Omega) * hy - c.op(Op::C) * ty;
    return Draw{std::max(c.norm(r1), c.norm(r2))};
  });
}

std::vector<Draw> eval_kahler_horizontal(Ctx& c) {
  return repeat(c, [&] {
    const VectorField Z = c.field(Op::Horizontal), W = c.field(Op::Horizontal);
    const Eigen::VectorXd z = Z(c.q());
    const VectorField bw = c.apply(Op::B, W);
    const VectorField cw = c.apply(Op::C, W);
    const Eigen::VectorXd aw = c.A(z, W);
    const Eigen::VectorXd hw = c.hnab(z, W);
    const Eigen::VectorXd r1 = c.op(Op::Vertical) * c.nabla(z, bw) + c.A(z, cw) - c.op(Op::Phi) * aw - c.op(Op::B) * hw;
    const Eigen::VectorXd r2 = c.A(z, bw) + c.hnab(z, cw) - c.op(Op::Omega) * aw - c.op(Op::C) * hw;
    return Draw{std::max(c.norm(r1), c.norm(r2))};
  });
}

std::vector<Draw> eval_kahler_mixed(Ctx& c) {
  return repeat(c, [&] {
    const VectorField X = c.field(Op::Vertical), Z = c.field(Op::Horizontal);
    const Eigen::VectorXd x = X(c.q());
    const JSplit s = j_split_horizontal(c, x, Z);
    const Eigen::VectorXd tz = c.t(x, Z);
    const Eigen::VectorXd hz = c.hnab(x, Z);
    const Eigen::VectorXd r1 = s.a - c.op(Op::Phi) * tz - c.op(Op::B) * hz;
    const Eigen::VectorXd r2 = s.b - c.op(Op::Omega) * tz - c.op(Op::C) * hz;
    return Draw{std::max(c.norm(r1), c.norm(r2))};
  });
}

std::vector<Draw> eval_d1_integrability(Ctx& c) {
  return repeat(c, [&] {
    const VectorField X = c.field(Op::P), Y = c.field(Op::P);
    const Eigen::VectorXd x = X(c.q()), y = Y(c.q());
    const Eigen::VectorXd cond =
        c.op(Op::Omega) * (c.hat(x, Y) - c.hat(y, X)) + c.op(Op::C) * (c.t(x, Y) - c.t(y, X));
    return Draw{c.norm(cond), c.fc.bracket_leakage(Op::P, X, Y, c.q())};
  });
}

std::vector<Draw> eval_d2_integrability(Ctx& c) {
  return repeat(c, [&] {
    const VectorField X = c.field(Op::Q), Y = c.field(Op::Q);
    const Eigen::VectorXd x = X(c.q()), y = Y(c.q());
    const Eigen::VectorXd cond =
        c.op(Op::P) * (c.op(Op::Phi) * (c.hat(x, Y) - c.hat(y, X)) + c.op(Op::B) * (c.t(x, Y) - c.t(y, X)));
    return Draw{c.norm(cond), c.fc.bracket_leakage(Op::Q, X, Y, c.q())};
  });
}

std::vector<Draw> eval_d2_integrability_kahler(Ctx& c) {
  return repeat(c, [&] {
    const VectorField X = c.field(Op::Q), Y = c.field(Op::Q);
    const Eigen::VectorXd x = X(c.q()), y = Y(c.q());
    const Eigen::VectorXd cond =
        c.op(Op::P) * (c.hat(x, c.apply(Op::Phi, Y)) - c.hat(y, c.apply(Op::Phi, X)) +
                       c.t(x, c.apply(Op::Omega, Y)) - c.t(y, c.apply(Op::Omega, X)));
    return Draw{c.norm(cond), c.fc.bracket_leakage(Op::Q, X, Y, c.q())};
  });
}

std::vector<Draw> eval_d1_integrability_kahler(Ctx& c) {
  return repeat(c, [&] {
    const VectorField X = c.field(Op::P), Y = c.field(Op::P);
    const Eigen::VectorXd x = X(c.q()), y = Y(c.q());
    const VectorField phi_x = c.apply(Op::Phi, X), phi_y = c.apply(Op::Phi, Y);
    const double c1 = c.norm(c.op(Op::Q) * (c.hat(x, phi_y) - c.hat(y, phi_x)));
    const double c2 = c.norm(c.t(x, phi_y) - c.t(y, phi_x));
    return Draw{std::max(c1, c2), c.fc.bracket_leakage(Op::P, X, Y, c.q())};
  });
}

std::vector<Draw> eval_ker_geodesic(Ctx& c) {
  return repeat(c, [&] {
    const VectorField X = c.field(Op::Vertical), Y = c.field(Op::Vertical);
    const Eigen::VectorXd x = X(c.q());
    const JSplit s = j_split_vertical(c, x, Y);
    const Eigen::VectorXd cond = c.op(Op::Omega) * s.a + c.op(Op::C) * s.b;
    return Draw{c.norm(cond), c.norm(c.hnab(x, Y))};
  });
}

std::vector<Draw> eval_horizontal_geodesic(Ctx& c) {
  return repeat(c, [&] {
    const VectorField Z = c.field(Op::Horizontal), W = c.field(Op::Horizontal);
    const Eigen::VectorXd z = Z(c.q());
    const VectorField bw = c.apply(Op::B, W);
    const VectorField cw = c.apply(Op::C, W);
    const Eigen::VectorXd cond = c.op(Op::Phi) * (c.op(Op::Vertical) * c.nabla(z, bw) + c.A(z, cw)) +
                                 c.op(Op::B) * (c.A(z, bw) + c.hnab(z, cw));
    return Draw{c.norm(cond), c.norm(c.op(Op::Vertical) * c.nabla(z, W))};
  });
}

std::vector<Draw> eval_d1_geodesic(Ctx& c) {
  return repeat(c, [&] {
    const VectorField X = c.field(Op::P), Y = c.field(Op::P);
    const Eigen::VectorXd x = X(c.q());
    const VectorField phi_y = c.apply(Op::Phi, Y);
    const Eigen::VectorXd hp = c.hat(x, phi_y);
    const Eigen::VectorXd tp = c.t(x, phi_y);
    const double c1 = c.norm(c.op(Op::Q) * (c.op(Op::Phi) * hp + c.op(Op::B) * tp));
    const double c2 = c.norm(c.op(Op::Omega) * hp + c.op(Op::C) * tp);
    const Eigen::VectorXd nxy = c.nabla(x, Y);
    return Draw{std::max(c1, c2), c.norm(nxy - c.op(Op::P) * nxy)};
  });
}

std::vector<Draw> eval_d2_geodesic(Ctx& c) {
  return repeat(c, [&] {
    const VectorField X = c.field(Op::Q), Y = c.field(Op::Q);
    const Eigen::VectorXd x = X(c.q());
    const JSplit s = j_split_vertical(c, x, Y);
    const double c1 = c.norm(c.op(Op::P) * (c.op(Op::Phi) * s.a + c.op(Op::B) * s.b));
    const double c2 = c.norm(c.op(Op::Omega) * s.a + c.op(Op::C) * s.b);
    const Eigen::VectorXd nxy = c.nabla(x, Y);
    return Draw{std::max(c1, c2), c.norm(nxy - c.op(Op::Q) * nxy)};
  });
}

std::vector<Draw> eval_geodesic_map(Ctx& c) {
  return repeat(c, [&] {
    const VectorField X = c.field(Op::Vertical), Y = c.field(Op::Vertical);
    // the mixed-pair condition equals −F*∇_X Z only for basic Z
    const VectorField Z = c.fc.horizontal_lift(c.target_vector());
    const Eigen::VectorXd x = X(c.q());
    const JSplit sv = j_split_vertical(c, x, Y);
    const JSplit sh = j_split_horizontal(c, x, Z);
    const double c1 = c.norm(c.op(Op::Omega) * sv.a + c.op(Op::C) * sv.b);
    const double c2 = c.norm(c.op(Op::Omega) * sh.a + c.op(Op::C) * sh.b);
    const double d1 = c.fc.second_fundamental_form<double>(x, Y, c.q()).norm();
    const double d2 = c.fc.second_fundamental_form<double>(x, Z, c.q()).norm();
    return Draw{std::max(c1, c2), std::max(d1, d2)};
  });
}

std::vector<Draw> eval_harmonic(Ctx& c) {
  const HarmonicTrace h = harmonic_trace(c.fc, c.a);
  return one(h.d2.norm(), h.full.norm());
}

std::vector<Draw> eval_harmonic_pairing(Ctx& c) { return one(harmonic_trace(c.fc, c.a).pairing); }

std::vector<Draw> eval_fhat(Ctx& c) {
  return repeat(c, [&] {
    const VectorField X = c.field(Op::Vertical), Y = c.field(Op::Vertical);
    const Eigen::VectorXd x = X(c.q());
    return Draw{c.norm(c.fc.nabla_fhat<double>(x, Y, c.q()) - c.fc.nabla_fhat_expanded<double>(x, Y, c.q()))};
  });
}

std::vector<Draw> eval_umbilical_h(Ctx& c) {
  const Eigen::VectorXd h = mean_curvature(c.fc, c.a.vertical);
  return one(c.norm(c.op(Op::Mu) * h));
}

std::vector<Draw> eval_curvature1(Ctx& c) {
  const Riemann r = riemann(c.fc.metric(), c.q());
  const Eigen::MatrixXd& jm = c.a.ops.j;
  return repeat(c, [&] {
    const Eigen::VectorXd x = c.unit_in(c.a.d1);
    const Eigen::VectorXd jx = jm * x;
    const VectorField X = c.fc.extend(Op::P, x);
    const VectorField JX = c.apply(Op::J, X);
    const double k = sectional_curvature(c.fc.metric(), r, c.q(), x, jx);
    const Eigen::VectorXd txx = c.t(x, X);
    const Eigen::VectorXd tyy = c.t(jx, JX);
    const Eigen::VectorXd txy = c.t(x, JX);
    const Eigen::MatrixXd& g = c.a.metric;
    const double k_fibre = k + txx.dot(g * tyy) - txy.dot(g * txy);  // Gauss equation
    const Eigen::VectorXd bracket = lie_bracket<double>(JX, X, c.q());
    const double rhs = k_fibre + txx.dot(g * txx) - txy.dot(g * txy) - txx.dot(g * (jm * bracket));
    return Draw{std::abs(k - rhs)};
  });
}

std::vector<Draw> eval_curvature2(Ctx& c) {
  const Riemann r = riemann(c.fc.metric(), c.q());
  const Eigen::MatrixXd& g = c.a.metric;
  const double c2 = std::pow(std::cos(*c.a.theta), 2);
  const double s2 = 1.0 - c2;
  auto k_or_zero = [&](const Eigen::VectorXd& u, const Eigen::VectorXd& v) {
    if (g_norm(g, v) < 1e-12) return 0.0;
    return sectional_curvature(c.fc.metric(), r, c.q(), u, v);
  };
  return repeat(c, [&] {
    const Eigen::VectorXd x = c.unit_in(c.a.d2);
    const Eigen::VectorXd phix = c.a.ops.phi * x;
    const Eigen::VectorXd omegax = c.a.ops.omega * x;
    const VectorField X = c.fc.extend(Op::Q, x);
    const VectorField PhiX = c.apply(Op::Phi, X);
    const double k = sectional_curvature(c.fc.metric(), r, c.q(), x, c.a.ops.j * x);
    const Eigen::VectorXd dt = nabla_t(c.fc, phix, X, X, c.q()) - nabla_t(c.fc, x, PhiX, X, c.q());
    const double rhs = c2 * k_or_zero(x, phix) + 2.0 * dt.dot(g * omegax) + s2 * k_or_zero(x, omegax);
    return Draw{std::abs(k - rhs)};
  });
}

std::vector<Draw> eval_curvature3(Ctx& c) {
  const Riemann r = riemann(c.fc.metric(), c.q());
  return repeat(c, [&] {
    const Eigen::VectorXd x = c.unit_in(c.a.mu);
    const VectorField X = c.fc.extend(Op::Mu, x);
    const double k = sectional_curvature(c.fc.metric(), r, c.q(), x, c.a.ops.j * x);
    const Eigen::VectorXd vjn = c.op(Op::Vertical) * (c.a.ops.j * c.nabla(x, X));
    const double k_target = 0.0;  // flat target
    return Draw{std::abs(k - (k_target - 3.0 * std::pow(c.norm(vjn), 2)))};
  });
}

std::vector<Draw> eval_sff_symmetry(Ctx& c) {
  return repeat(c, [&] {
    const VectorField X = random_polynomial_field(c.fc.dim(), c.q(), c.rng);
    const VectorField Z = random_polynomial_field(c.fc.dim(), c.q(), c.rng);
    const Eigen::VectorXd d = c.fc.second_fundamental_form<double>(X(c.q()), Z, c.q()) -
                              c.fc.second_fundamental_form<double>(Z(c.q()), X, c.q());
    return Draw{d.norm()};
  });
}

std::vector<Draw> eval_sff_horizontal(Ctx& c) {
  return repeat(c, [&] {
    const VectorField Z = c.field(Op::Horizontal), W = c.field(Op::Horizontal);
    return Draw{c.fc.second_fundamental_form<double>(Z(c.q()), W, c.q()).norm()};
  });
}

std::vector<Draw> eval_t_symmetry(Ctx& c) {
  return repeat(c, [&] {
    const Eigen::VectorXd x = c.unit_in(c.a.vertical), y = c.unit_in(c.a.vertical);
    return Draw{c.norm(c.t(x, VectorField::constant(y)) - c.t(y, VectorField::constant(x)))};
  });
}

std::vector<Draw> eval_a_bracket(Ctx& c) {
  return repeat(c, [&] {
    const VectorField Z = c.field(Op::Horizontal), W = c.field(Op::Horizontal);
    const Eigen::VectorXd half = 0.5 * (c.op(Op::Vertical) * lie_bracket<double>(Z, W, c.q()));
    return Draw{c.norm(c.A(Z(c.q()), W) - half)};
  });
}

std::vector<Draw> eval_tensoriality(Ctx& c) {
  return repeat(c, [&] {
    std::normal_distribution<double> nd;
    Eigen::VectorXd e(c.fc.dim()), v(c.fc.dim());
    for (auto& x : e) x = nd(c.rng);
    for (auto& x : v) x = nd(c.rng);
    const VectorField bump = random_polynomial_field(c.fc.dim(), c.q(), c.rng);
    const Eigen::VectorXd at_p = bump(c.q());
    // equals v at p, differs from the constant extension elsewhere
    const VectorField other(c.fc.dim(), [bump, v, at_p](const auto& q) {
      using S = typename std::decay_t<decltype(q)>::Scalar;
      return Vec<S>(bump(q) - cast_vector<S>(at_p) + cast_vector<S>(v));
    });
    const VectorField flat = VectorField::constant(v);
    const double dt = c.norm(c.t(e, flat) - c.t(e, other));
    const double da = c.norm(c.A(e, flat) - c.A(e, other));
    return Draw{std::max(dt, da)};
  });
}

// ---- catalog -------------------------------------------------------------------

enum class Gate { None, SemiSlant, ThetaBelowRight, D1, D2, Mu, D1Pair, Umbilical, Harmonic };

struct Entry {
  CheckSpec spec;
  Gate gate;
  Evaluator eval;
};

std::vector<Entry> build_catalog() {
  using K = CheckKind;
  auto spec = [](std::string id, std::string statement, std::string hyp, K kind, double tol, bool kahler = false,
                 bool curvature = false, bool exploratory = false) {
    return CheckSpec{std::move(id), std::move(statement), std::move(hyp), kind, tol, kahler, curvature, exploratory};
  };
  return {
      {spec("riemannian_submersion", "|g_N(F*Z_a, F*Z_b) - delta_ab| = 0 on an orthonormal horizontal frame", "none",
            K::Identity, 1e-10),
       Gate::None, eval_riemannian},
      {spec("algebraic_identities", "phi^2 + B omega = -id, C^2 + omega B = -id, omega phi + C omega = 0, B C + phi B = 0",
            "none", K::Identity, 1e-9),
       Gate::None, eval_algebraic},
      {spec("distribution_relations", "phi D1 = D1, omega D1 = 0, phi D2 in D2, B(H) = D2, J mu = mu",
            "semi-slant family", K::Identity, 1e-9),
       Gate::SemiSlant, eval_distributions},
      {spec("slant_converse", "-phi^2 = cos^2(theta) id on D2", "semi-slant family", K::Identity, 1e-7),
       Gate::SemiSlant, eval_slant_converse},
      {spec("slant_angle_constancy", "cos^2 theta(X) constant over nonzero X in D2 and over sampled points",
            "semi-slant family", K::Property, 1e-8),
       Gate::SemiSlant, eval_constancy},
      {spec("J_hat_squared", "J^2 = -id on ker F* for J^ = JP + (1/cos theta) phi Q", "theta < pi/2",
            K::Identity, 1e-8),
       Gate::ThetaBelowRight, eval_j_hat},
      {spec("even_dimension", "dim N and dim ker F* are even", "theta < pi/2", K::Property, 0.5),
       Gate::ThetaBelowRight, eval_even},
      {spec("kahler_vertical",
            "hat_nabla_X phi Y + T_X omega Y = phi hat_nabla_X Y + B T_X Y; "
            "T_X phi Y + H nabla_X omega Y = omega hat_nabla_X Y + C T_X Y (X, Y vertical)",
            "Kahler source", K::Identity, 1e-8, true),
       Gate::None, eval_kahler_vertical},
      {spec("kahler_horizontal",
            "V nabla_Z B W + A_Z C W = phi A_Z W + B H nabla_Z W; "
            "A_Z B W + H nabla_Z C W = omega A_Z W + C H nabla_Z W (Z, W horizontal)",
            "Kahler source", K::Identity, 1e-8, true),
       Gate::None, eval_kahler_horizontal},
      {spec("kahler_mixed",
            "hat_nabla_X B Z + T_X C Z = phi T_X Z + B H nabla_X Z; "
            "T_X B Z + H nabla_X C Z = omega T_X Z + C H nabla_X Z (X vertical, Z horizontal)",
            "Kahler source", K::Identity, 1e-8, true),
       Gate::None, eval_kahler_mixed},
      {spec("D1_integrability",
            "D1 integrable <=> omega(hat_nabla_X Y - hat_nabla_Y X) = C(T_Y X - T_X Y) for X, Y in D1",
            "semi-slant family, D1 nonzero", K::Biconditional, 1e-8),
       Gate::D1, eval_d1_integrability},
      {spec("D2_integrability",
            "D2 integrable <=> P(phi(hat_nabla_X Y - hat_nabla_Y X) + B(T_X Y - T_Y X)) = 0 for X, Y in D2",
            "semi-slant family, D2 nonzero", K::Biconditional, 1e-8),
       Gate::D2, eval_d2_integrability},
      {spec("D2_integrability_kahler",
            "D2 integrable <=> P(hat_nabla_X phi Y - hat_nabla_Y phi X + T_X omega Y - T_Y omega X) = 0",
            "Kahler source, semi-slant family, D2 nonzero", K::Biconditional, 1e-8, true),
       Gate::D2, eval_d2_integrability_kahler},
      {spec("D1_integrability_kahler",
            "D1 integrable <=> Q(hat_nabla_X phi Y - hat_nabla_Y phi X) = 0 and T_X phi Y = T_Y phi X",
            "Kahler source, semi-slant family, D1 nonzero", K::Biconditional, 1e-8, true),
       Gate::D1, eval_d1_integrability_kahler},
      {spec("kerF_totally_geodesic",
            "ker F* totally geodesic <=> omega(hat_nabla_X phi Y + T_X omega Y) + C(T_X phi Y + H nabla_X omega Y) = 0",
            "Kahler source", K::Biconditional, 1e-8, true),
       Gate::None, eval_ker_geodesic},
      {spec("horizontal_totally_geodesic",
            "(ker F*)^perp totally geodesic <=> phi(V nabla_X B Y + A_X C Y) + B(A_X B Y + H nabla_X C Y) = 0",
            "Kahler source", K::Biconditional, 1e-8, true),
       Gate::None, eval_horizontal_geodesic},
      {spec("D1_totally_geodesic",
            "D1 totally geodesic <=> Q(phi hat_nabla_X phi Y + B T_X phi Y) = 0 and "
            "omega hat_nabla_X phi Y + C T_X phi Y = 0",
            "Kahler source, semi-slant family, D1 nonzero", K::Biconditional, 1e-8, true),
       Gate::D1, eval_d1_geodesic},
      {spec("D2_totally_geodesic",
            "D2 totally geodesic <=> P(phi(hat_nabla_X phi Y + T_X omega Y) + B(T_X phi Y + H nabla_X omega Y)) = 0 "
            "and omega(hat_nabla_X phi Y + T_X omega Y) + C(T_X phi Y + H nabla_X omega Y) = 0",
            "Kahler source, semi-slant family, D2 nonzero", K::Biconditional, 1e-8, true),
       Gate::D2, eval_d2_geodesic},
      {spec("totally_geodesic_map",
            "nabla F* = 0 <=> omega(hat_nabla_X phi Y + T_X omega Y) + C(T_X phi Y + H nabla_X omega Y) = 0 and "
            "omega(hat_nabla_X B Z + T_X C Z) + C(T_X B Z + H nabla_X C Z) = 0",
            "Kahler source", K::Biconditional, 1e-8, true),
       Gate::None, eval_geodesic_map},
      {spec("harmonic", "trace(nabla F*) = 0 <=> sum_j F*(nabla_{v_j} v_j) = 0 over an orthonormal frame of D2",
            "Kahler source, D1 integrable", K::Biconditional, 1e-8, true),
       Gate::Harmonic, eval_harmonic},
      {spec("harmonic_D1_pairing", "F*(nabla_{Je} Je) = -F*(nabla_e e) for e in D1",
            "Kahler source, D1 integrable, D1 nonzero", K::Identity, 1e-8, true),
       Gate::D1Pair, eval_harmonic_pairing},
      {spec("Fhat_identity",
            "(nabla_X F^)Y = phi(hat_nabla_X P Y - hat_nabla_X Y) + B T_X P Y + hat_nabla_X phi Q Y, F^ = JP + phi Q",
            "Kahler source, semi-slant family", K::Identity, 1e-8, true),
       Gate::SemiSlant, eval_fhat},
      {spec("umbilical_H_in_omegaD2", "T_X Y = g(X, Y) H implies H in omega D2",
            "Kahler source, totally umbilical fibres, semi-slant family", K::Identity, 1e-8, true),
       Gate::Umbilical, eval_umbilical_h},
      {spec("curvature_item1", "K(P) = K^(P) + |T_X X|^2 - |T_X JX|^2 - g(T_X X, J[JX, X]) for P = span{X, JX} in D1",
            "Kahler source, D1 nonzero", K::Identity, 1e-5, true, true),
       Gate::D1, eval_curvature1},
      {spec("curvature_item2",
            "K(P) = cos^2(theta) K(X ^ phi X) + 2 g((nabla_{phi X} T)(X, X) - (nabla_X T)(phi X, X), omega X) "
            "+ sin^2(theta) K(X ^ omega X) for X in D2",
            "Kahler source, D2 nonzero", K::Identity, 1e-5, true, true, true),
       Gate::D2, eval_curvature2},
      {spec("curvature_item3", "K(P) = K_*(P) - 3 |V J nabla_X X|^2 for P = span{X, JX} in mu",
            "Kahler source, mu nonzero", K::Identity, 1e-5, true, true),
       Gate::Mu, eval_curvature3},
      {spec("sff_symmetry", "(nabla F*)(X, Z) = (nabla F*)(Z, X)", "none", K::Identity, 1e-8),
       Gate::None, eval_sff_symmetry},
      {spec("sff_horizontal", "(nabla F*)(Z1, Z2) = 0 for horizontal Z1, Z2", "none", K::Identity, 1e-8),
       Gate::None, eval_sff_horizontal},
      {spec("T_vertical_symmetry", "T_X Y = T_Y X for vertical X, Y", "none", K::Identity, 1e-8),
       Gate::None, eval_t_symmetry},
      {spec("A_horizontal_bracket", "A_Z W = 1/2 V[Z, W] for horizontal Z, W", "none", K::Identity, 1e-8),
       Gate::None, eval_a_bracket},
      {spec("tensoriality", "T_E F and A_E F depend only on F at the point", "none", K::Identity, 1e-9),
       Gate::None, eval_tensoriality},
  };
}

const std::vector<Entry>& catalog_entries() {
  static const std::vector<Entry> entries = build_catalog();
  return entries;
}

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char ch : s) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  return h;
}

std::uint64_t mix(std::uint64_t x) {
  // splitmix64 finaliser
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

// Runs fn(i) for i in [0, n) on up to `threads` workers. The first exception
// (by index) is rethrown after all workers finish.
void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& fn) {
  std::vector<std::exception_ptr> errors(n);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        fn(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const int t = std::max(1, std::min<int>(threads, static_cast<int>(n)));
  if (t == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int k = 0; k < t; ++k) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace

const std::vector<CheckSpec>& check_catalog() {
  static const std::vector<CheckSpec> specs = [] {
    std::vector<CheckSpec> out;
    for (const auto& e : catalog_entries()) out.push_back(e.spec);
    return out;
  }();
  return specs;
}

const CheckSpec* find_check(const std::string& id) {
  for (const auto& s : check_catalog())
    if (s.id == id) return &s;
  return nullptr;
}

BiconditionalTally tally_biconditional(const std::vector<std::pair<double, double>>& draws, double tol) {
  BiconditionalTally out;
  for (const auto& [condition, direct] : draws) {
    if ((condition < tol) == (direct < tol)) continue;
    ++out.disagreements;
    if (std::max(condition, direct) >= kNoiseFloor) out.consistency_failure = true;
  }
  return out;
}

std::uint64_t draw_seed(std::uint64_t seed, const std::string& id, std::size_t point, std::uint64_t salt) {
  return mix(mix(mix(seed) ^ fnv1a(id)) ^ (static_cast<std::uint64_t>(point) * 0x100000001b3ull) ^ mix(salt));
}

int default_thread_count() {
  if (const char* env = std::getenv("SUBCHECK_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v >= 1) return static_cast<int>(std::min<long>(v, 256));
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

SuiteReport run_suite(const SubmersionMap& f, const SuitePlan& plan) {
  if (plan.points.empty()) throw std::invalid_argument("suite needs at least one sample point");
  if (plan.draws < 1) throw std::invalid_argument("suite needs at least one draw per point");
  for (const auto& id : plan.only)
    if (!find_check(id)) throw std::invalid_argument("unknown check id '" + id + "'");
  const std::size_t np = plan.points.size();

  EntryState entry;
  entry.analyses.resize(np);
  parallel_for(np, plan.threads, [&](std::size_t i) { entry.analyses[i] = split_d1_d2(f, plan.points[i], plan.split); });
  for (const auto& a : entry.analyses) entry.calculi.emplace_back(f, a.model);

  SuiteReport report;
  SuiteGates& gates = report.gates;
  {
    std::vector<double> defects(np);
    parallel_for(np, plan.threads, [&](std::size_t i) {
      defects[i] = kahler_defect(f.metric(), f.complex_structure(), plan.points[i]);
    });
    gates.kahler_defect = *std::max_element(defects.begin(), defects.end());
    gates.kahler = gates.kahler_defect < 1e-10;
  }
  const Verdict v0 = entry.analyses.front().verdict;
  for (const auto& a : entry.analyses) {
    if (a.verdict != v0 || a.d1.size() != entry.analyses.front().d1.size()) gates.consistent_verdict = false;
  }
  gates.semi_slant_family = gates.consistent_verdict && v0 != Verdict::Generic;
  if (gates.semi_slant_family) {
    double sum = 0.0;
    for (const auto& a : entry.analyses) sum += *a.theta;
    entry.theta_hat = sum / static_cast<double>(np);
  }
  const bool theta_below_right = gates.semi_slant_family && !entry.analyses.front().theta_is_right_angle(plan.split) &&
                                 std::all_of(entry.analyses.begin(), entry.analyses.end(), [&](const auto& a) {
                                   return !a.theta_is_right_angle(plan.split);
                                 });

  const auto& entries = catalog_entries();
  auto wanted = [&](const std::string& id) { return plan.only.empty() || plan.only.count(id) > 0; };
  auto tol_of = [&](const CheckSpec& s) { return plan.tolerance.value_or(s.tolerance); };
  const auto& first = entry.analyses.front();
  // Hypothesis gates never tighten below rounding noise.
  auto gate_tol = [&](const CheckSpec& s) { return std::max(tol_of(s), kNoiseFloor); };

  // Umbilicity gate: needed only when the H check runs.
  if (wanted("umbilical_H_in_omegaD2")) {
    std::vector<double> u(np);
    parallel_for(np, plan.threads, [&](std::size_t i) {
      std::mt19937_64 rng(draw_seed(plan.seed, "umbilical_gate", i));
      const Eigen::VectorXd h = mean_curvature(entry.calculi[i], entry.analyses[i].vertical);
      u[i] = umbilical_residual(entry.calculi[i], entry.analyses[i].vertical, h, rng, 2 * plan.draws);
    });
    gates.umbilical = *std::max_element(u.begin(), u.end());
    gates.umbilical_met = gates.umbilical < gate_tol(*find_check("umbilical_H_in_omegaD2"));
  }

  // Gate status per check: empty string = open; otherwise the reason.
  auto gate_reason = [&](Gate g) -> std::string {
    switch (g) {
      case Gate::None: return "";
      case Gate::SemiSlant: return gates.semi_slant_family ? "" : "not a semi-slant map on the sample";
      case Gate::ThetaBelowRight: return theta_below_right ? "" : "semi-slant angle is not below pi/2";
      case Gate::D1:
        if (!gates.semi_slant_family) return "not a semi-slant map on the sample";
        return first.d1.size() > 0 ? "" : "D1 = 0";
      case Gate::D2:
        if (!gates.semi_slant_family) return "not a semi-slant map on the sample";
        return first.d2.size() > 0 ? "" : "D2 = 0";
      case Gate::Mu:
        if (!gates.semi_slant_family) return "not a semi-slant map on the sample";
        return first.mu.size() >= 2 ? "" : "mu = 0";
      case Gate::D1Pair:
        if (!gates.semi_slant_family) return "not a semi-slant map on the sample";
        if (first.d1.size() == 0) return "D1 = 0";
        return gates.d1_integrable.value_or(true) ? "" : "D1 not integrable";
      case Gate::Umbilical:
        if (!gates.semi_slant_family) return "not a semi-slant map on the sample";
        return gates.umbilical_met ? "" : "fibres not totally umbilical";
      case Gate::Harmonic:
        if (!gates.semi_slant_family) return "not a semi-slant map on the sample";
        return gates.d1_integrable.value_or(true) ? "" : "D1 not integrable";
    }
    return "";
  };

  std::vector<CheckResult> results(entries.size());
  std::vector<std::vector<std::vector<Draw>>> draws(entries.size());

  auto run_checks = [&](const std::vector<std::size_t>& which) {
    std::vector<std::pair<std::size_t, std::size_t>> tasks;
    for (std::size_t ci : which) {
      draws[ci].assign(np, {});
      for (std::size_t pi = 0; pi < np; ++pi) tasks.emplace_back(ci, pi);
    }
    parallel_for(tasks.size(), plan.threads, [&](std::size_t t) {
      const auto [ci, pi] = tasks[t];
      std::mt19937_64 rng(draw_seed(plan.seed, entries[ci].spec.id, pi));
      Ctx ctx{entry.analyses[pi], entry.calculi[pi], entry, rng, plan.draws};
      draws[ci][pi] = entries[ci].eval(ctx);
    });
  };

  auto finish = [&](std::size_t ci) {
    const Entry& e = entries[ci];
    CheckResult& r = results[ci];
    r.id = e.spec.id;
    r.kind = e.spec.kind;
    r.tolerance = tol_of(e.spec);
    r.exploratory = e.spec.exploratory;
    const std::string reason = gate_reason(e.gate);
    if (!reason.empty()) {
      r.verdict = CheckVerdict::Vacuous;
      r.hypothesis_met = false;
      r.note = reason;
      return;
    }
    double worst_c = 0.0;
    double worst_d = 0.0;
    bool has_direct = false;
    std::vector<std::pair<double, double>> pairs;
    for (std::size_t pi = 0; pi < np; ++pi) {
      double pc = 0.0, pd = 0.0;
      for (const Draw& d : draws[ci][pi]) {
        pc = std::max(pc, d.condition);
        if (!std::isnan(d.direct)) {
          has_direct = true;
          pd = std::max(pd, d.direct);
          pairs.emplace_back(d.condition, d.direct);
        }
      }
      r.per_point.push_back(pc);
      worst_c = std::max(worst_c, pc);
      if (has_direct) {
        r.per_point_direct.push_back(pd);
        worst_d = std::max(worst_d, pd);
      }
    }
    const BiconditionalTally tally = tally_biconditional(pairs, r.tolerance);
    r.disagreements = tally.disagreements;
    r.consistency_failure = tally.consistency_failure;
    r.max_residual = worst_c;
    if (has_direct) {
      r.max_direct = worst_d;
      r.property_holds = worst_d < r.tolerance;
    }
    bool ok = e.spec.kind == CheckKind::Biconditional ? r.disagreements == 0 : worst_c < r.tolerance;
    r.verdict = ok ? CheckVerdict::Pass : CheckVerdict::Fail;
    if (!ok && std::max(worst_c, worst_d) < kNoiseFloor) r.noise_limited = true;
    if (r.consistency_failure) r.note = "geometric side and tensor condition disagree";
    if (e.spec.kahler && !gates.kahler) {
      r.verdict = CheckVerdict::Skipped;
      r.hypothesis_met = false;
      r.consistency_failure = false;
      r.note = "source is not Kahler (max |nabla J| = " + std::to_string(gates.kahler_defect) + ")";
    }
  };

  // Phase 1: everything not depending on another check's outcome.
  std::map<std::string, std::size_t> index;
  for (std::size_t ci = 0; ci < entries.size(); ++ci) index[entries[ci].spec.id] = ci;
  const bool need_d1_gate = wanted("harmonic") || wanted("harmonic_D1_pairing");
  std::vector<std::size_t> phase1, phase2;
  for (std::size_t ci = 0; ci < entries.size(); ++ci) {
    const auto& id = entries[ci].spec.id;
    const bool dependent = entries[ci].gate == Gate::Harmonic || entries[ci].gate == Gate::D1Pair;
    const bool needed = wanted(id) || (need_d1_gate && id == "D1_integrability");
    if (!needed) continue;
    if (!gate_reason(entries[ci].gate).empty()) continue;
    (dependent ? phase2 : phase1).push_back(ci);
  }
  run_checks(phase1);
  for (std::size_t ci : phase1) finish(ci);
  if (need_d1_gate) {
    if (first.d1.size() == 0 || !gates.semi_slant_family) {
      gates.d1_integrable = true;
    } else {
      const CheckResult& d1 = results[index.at("D1_integrability")];
      gates.d1_integrable = d1.max_direct.value_or(0.0) < gate_tol(entries[index.at("D1_integrability")].spec);
    }
  }
  std::vector<std::size_t> phase2_open;
  for (std::size_t ci : phase2)
    if (gate_reason(entries[ci].gate).empty()) phase2_open.push_back(ci);
  run_checks(phase2_open);

  for (std::size_t ci = 0; ci < entries.size(); ++ci) {
    if (!wanted(entries[ci].spec.id)) continue;
    if (draws[ci].empty() || std::find(phase2.begin(), phase2.end(), ci) != phase2.end()) finish(ci);
    report.checks.push_back(results[ci]);
  }
  return report;
}

}  // namespace subcheck
