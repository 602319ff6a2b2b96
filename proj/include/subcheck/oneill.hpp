#pragma once

// O'Neill tensors T and A, the fibre connection, derived operators and the
// second fundamental form of the map. Operator fields (P_V, φ, ω, ...) are
// rebuilt from the smooth closed-form projectors at every evaluation point, so
// their derivatives come out of the dual-number machinery.

#include <memory>
#include <random>
#include <vector>

#include "subcheck/geometry.hpp"
#include "subcheck/submersion.hpp"

namespace subcheck {

enum class Op { Vertical, Horizontal, J, Phi, Omega, B, C, P, Q, OmegaD2, Mu, Fhat };

const char* op_name(Op o);

template <class S>
Mat<S> op_matrix(Op o, const SplitOperators<S>& ops, const DistributionModel& model) {
  switch (o) {
    case Op::Vertical: return ops.vertical;
    case Op::Horizontal: return ops.horizontal;
    case Op::J: return ops.j;
    case Op::Phi: return ops.phi;
    case Op::Omega: return ops.omega;
    case Op::B: return ops.b;
    case Op::C: return ops.c;
    case Op::P: return model.d1_projector(ops);
    case Op::Q: return model.d2_projector(ops);
    case Op::OmegaD2: return model.omega_d2_projector(ops);
    case Op::Mu: return model.mu_projector(ops);
    case Op::Fhat: {
      const Mat<S> p = model.d1_projector(ops);
      return Mat<S>(ops.j * p + ops.phi * (ops.vertical - p));
    }
  }
  throw std::logic_error("unknown operator");
}

class FieldCalculus {
 public:
  FieldCalculus(SubmersionMap f, DistributionModel model);

  const SubmersionMap& map() const { return state_->f; }
  const MetricField& metric() const { return state_->f.metric(); }
  const DistributionModel& model() const { return state_->model; }
  int dim() const { return state_->f.source_dim(); }

  template <class S>
  SplitOperators<S> ops(const Vec<S>& q) const {
    return split_operators<S>(state_->f, q);
  }

  template <class S>
  Mat<S> op(Op o, const Vec<S>& q) const {
    if (o == Op::J) return state_->f.complex_structure().at<S>(q);
    return op_matrix(o, ops<S>(q), state_->model);
  }

  /// Field q ↦ O(q) Y(q).
  VectorField apply(Op o, const VectorField& y) const;
  /// Field q ↦ O(q) v: the projected extension of a vector at a point.
  VectorField extend(Op o, const Eigen::VectorXd& v) const { return apply(o, VectorField::constant(v)); }
  /// Basic field q ↦ G⁻¹dFᵀ(dF G⁻¹dFᵀ)⁻¹ w: the horizontal lift of a constant target vector.
  VectorField horizontal_lift(const Eigen::VectorXd& w) const;
  /// Field q ↦ O(q) (p(q)) where p is a random polynomial field centred at `center`.
  VectorField random_field(Op o, const Eigen::VectorXd& center, std::mt19937_64& rng, int degree = 2) const;

  template <class S>
  Vec<S> nabla(const Vec<S>& x, const VectorField& y, const Vec<S>& q) const {
    return covariant_derivative<S>(metric(), x, y, q);
  }

  /// ∇̂_X Y = 𝒱∇_X Y.
  template <class S>
  Vec<S> hat_nabla(const Vec<S>& x, const VectorField& y, const Vec<S>& q) const {
    return op<S>(Op::Vertical, q) * nabla<S>(x, y, q);
  }

  /// ℋ∇_X Y.
  template <class S>
  Vec<S> h_nabla(const Vec<S>& x, const VectorField& y, const Vec<S>& q) const {
    return op<S>(Op::Horizontal, q) * nabla<S>(x, y, q);
  }

  /// 𝒯_E F = ℋ∇_{𝒱E}𝒱F + 𝒱∇_{𝒱E}ℋF.
  template <class S>
  Vec<S> tensor_t(const Vec<S>& e, const VectorField& f, const Vec<S>& q) const {
    const SplitOperators<S> o = ops<S>(q);
    const Vec<S> ve = o.vertical * e;
    return o.horizontal * nabla<S>(ve, apply(Op::Vertical, f), q) + o.vertical * nabla<S>(ve, apply(Op::Horizontal, f), q);
  }

  /// 𝒜_E F = ℋ∇_{ℋE}𝒱F + 𝒱∇_{ℋE}ℋF.
  template <class S>
  Vec<S> tensor_a(const Vec<S>& e, const VectorField& f, const Vec<S>& q) const {
    const SplitOperators<S> o = ops<S>(q);
    const Vec<S> he = o.horizontal * e;
    return o.horizontal * nabla<S>(he, apply(Op::Vertical, f), q) + o.vertical * nabla<S>(he, apply(Op::Horizontal, f), q);
  }

  /// (∇_X φ)Y = ∇̂_X φY − φ∇̂_X Y.
  template <class S>
  Vec<S> nabla_phi(const Vec<S>& x, const VectorField& y, const Vec<S>& q) const {
    return hat_nabla<S>(x, apply(Op::Phi, y), q) - op<S>(Op::Phi, q) * hat_nabla<S>(x, y, q);
  }

  /// (∇_X ω)Y = ℋ∇_X ωY − ω∇̂_X Y.
  template <class S>
  Vec<S> nabla_omega(const Vec<S>& x, const VectorField& y, const Vec<S>& q) const {
    return h_nabla<S>(x, apply(Op::Omega, y), q) - op<S>(Op::Omega, q) * hat_nabla<S>(x, y, q);
  }

  /// (∇_X F̂)Y = ∇̂_X F̂Y − F̂∇̂_X Y with F̂ = JP + φQ.
  template <class S>
  Vec<S> nabla_fhat(const Vec<S>& x, const VectorField& y, const Vec<S>& q) const {
    return hat_nabla<S>(x, apply(Op::Fhat, y), q) - op<S>(Op::Fhat, q) * hat_nabla<S>(x, y, q);
  }

  /// φ(∇̂_X PY − ∇̂_X Y) + B𝒯_X PY + ∇̂_X φQY.
  template <class S>
  Vec<S> nabla_fhat_expanded(const Vec<S>& x, const VectorField& y, const Vec<S>& q) const {
    const SplitOperators<S> o = ops<S>(q);
    const VectorField py = apply(Op::P, y);
    return o.phi * (hat_nabla<S>(x, py, q) - hat_nabla<S>(x, y, q)) + o.b * tensor_t<S>(x, py, q) +
           hat_nabla<S>(x, apply(Op::Phi, apply(Op::Q, y)), q);
  }

  /// Second fundamental form (∇F*)(X, Y) = D_X(dF·Y) − dF·∇_X Y on a flat target.
  template <class S>
  Vec<S> second_fundamental_form(const Vec<S>& x, const VectorField& y, const Vec<S>& q) const {
    return directional_derivative<S>(pushforward(y), q, x) - map().jacobian<S>(q) * nabla<S>(x, y, q);
  }

  /// Field q ↦ dF(q) Y(q) (target-valued).
  VectorField pushforward(const VectorField& y) const;

  /// |(I − P_D)[X, Y]| with D given by the projector field `o`.
  double bracket_leakage(Op o, const VectorField& x, const VectorField& y, const Eigen::VectorXd& q) const;

 private:
  struct State {
    SubmersionMap f;
    DistributionModel model;
  };
  std::shared_ptr<const State> state_;
};

/// |(I − Π)[X, Y]| under g for a projector Π at q.
double bracket_leakage(const Eigen::MatrixXd& g, const Eigen::MatrixXd& projector, const VectorField& x,
                       const VectorField& y, const Eigen::VectorXd& q);

/// H = (1/dim V) Σ 𝒯_{e_i} e_i over the orthonormal frame `vertical`.
Eigen::VectorXd mean_curvature(const FieldCalculus& fc, const Frame& vertical);

/// max over random vertical X, Y (unit, independent draws) of |𝒯_X Y − g(X,Y)H|.
double umbilical_residual(const FieldCalculus& fc, const Frame& vertical, const Eigen::VectorXd& h,
                          std::mt19937_64& rng, int draws = 8);

struct HarmonicTrace {
  Eigen::VectorXd full;      // Σ_a (∇F*)(E_a, E_a) over an orthonormal frame of TM
  Eigen::VectorXd d2;        // Σ_j F*(∇_{v_j} v_j) over D2 with projected extensions
  double pairing = 0.0;      // max_i |F*(∇_{Je} Je) + F*(∇_e e)| over the D1 frame
};
HarmonicTrace harmonic_trace(const FieldCalculus& fc, const SemiSlantAnalysis& a);

/// (∇_E 𝒯)(X, Y) = ∇_E(𝒯_X Y) − 𝒯_{∇_E X}Y − 𝒯_X ∇_E Y.
Eigen::VectorXd nabla_t(const FieldCalculus& fc, const Eigen::VectorXd& e, const VectorField& x, const VectorField& y,
                        const Eigen::VectorXd& q);

}  // namespace subcheck
