#include "subcheck/oneill.hpp"

#include <cmath>

namespace subcheck {

const char* op_name(Op o) {
  switch (o) {
    case Op::Vertical: return "V";
    case Op::Horizontal: return "H";
    case Op::J: return "J";
    case Op::Phi: return "phi";
    case Op::Omega: return "omega";
    case Op::B: return "B";
    case Op::C: return "C";
    case Op::P: return "P";
    case Op::Q: return "Q";
    case Op::OmegaD2: return "omegaD2";
    case Op::Mu: return "mu";
    case Op::Fhat: return "Fhat";
  }
  return "?";
}

FieldCalculus::FieldCalculus(SubmersionMap f, DistributionModel model)
    : state_(std::make_shared<const State>(State{std::move(f), std::move(model)})) {}

VectorField FieldCalculus::apply(Op o, const VectorField& y) const {
  const FieldCalculus self = *this;
  return VectorField(dim(), [self, o, y](const auto& q) {
    using S = typename std::decay_t<decltype(q)>::Scalar;
    return Vec<S>(self.op<S>(o, q) * y(q));
  });
}

VectorField FieldCalculus::random_field(Op o, const Eigen::VectorXd& center, std::mt19937_64& rng, int degree) const {
  return apply(o, random_polynomial_field(dim(), center, rng, degree));
}

VectorField FieldCalculus::horizontal_lift(const Eigen::VectorXd& w) const {
  const FieldCalculus self = *this;
  return VectorField(dim(), [self, w](const auto& q) {
    using S = typename std::decay_t<decltype(q)>::Scalar;
    const Mat<S> g = self.metric().template at<S>(q);
    const Mat<S> df = self.map().template jacobian<S>(q);
    const Mat<S> ginv_dft = solve<S>(g, df.transpose());
    const Mat<S> coeff = solve<S>(Mat<S>(df * ginv_dft), Mat<S>(cast_vector<S>(w)));
    return Vec<S>(ginv_dft * coeff);
  });
}

VectorField FieldCalculus::pushforward(const VectorField& y) const {
  const FieldCalculus self = *this;
  return VectorField(map().target_dim(), [self, y](const auto& q) {
    using S = typename std::decay_t<decltype(q)>::Scalar;
    return Vec<S>(self.map().template jacobian<S>(q) * y(q));
  });
}

double FieldCalculus::bracket_leakage(Op o, const VectorField& x, const VectorField& y, const Eigen::VectorXd& q) const {
  return subcheck::bracket_leakage(metric().at(q), op<double>(o, q), x, y, q);
}

double bracket_leakage(const Eigen::MatrixXd& g, const Eigen::MatrixXd& projector, const VectorField& x,
                       const VectorField& y, const Eigen::VectorXd& q) {
  const Eigen::VectorXd b = lie_bracket<double>(x, y, q);
  return g_norm(g, b - projector * b);
}

Eigen::VectorXd mean_curvature(const FieldCalculus& fc, const Frame& vertical) {
  const Eigen::VectorXd& q = vertical.point;
  Eigen::VectorXd h = Eigen::VectorXd::Zero(fc.dim());
  if (vertical.size() == 0) return h;
  for (int i = 0; i < vertical.size(); ++i) {
    const Eigen::VectorXd e = vertical.vectors.col(i);
    h += fc.tensor_t<double>(e, VectorField::constant(e), q);
  }
  return h / static_cast<double>(vertical.size());
}

double umbilical_residual(const FieldCalculus& fc, const Frame& vertical, const Eigen::VectorXd& h,
                          std::mt19937_64& rng, int draws) {
  if (vertical.size() == 0) return 0.0;
  const Eigen::VectorXd& q = vertical.point;
  const Eigen::MatrixXd g = fc.metric().at(q);
  std::normal_distribution<double> nd;
  auto unit_vertical = [&] {
    Eigen::VectorXd c(vertical.size());
    for (auto& x : c) x = nd(rng);
    return Eigen::VectorXd(vertical.vectors * c.normalized());
  };
  double worst = 0.0;
  for (int k = 0; k < draws; ++k) {
    const Eigen::VectorXd x = unit_vertical();
    const Eigen::VectorXd y = k == 0 ? x : unit_vertical();
    const Eigen::VectorXd t = fc.tensor_t<double>(x, VectorField::constant(y), q);
    worst = std::max(worst, g_norm(g, t - x.dot(g * y) * h));
  }
  return worst;
}

HarmonicTrace harmonic_trace(const FieldCalculus& fc, const SemiSlantAnalysis& a) {
  const Eigen::VectorXd& q = a.point;
  HarmonicTrace out;
  out.full = Eigen::VectorXd::Zero(fc.map().target_dim());
  out.d2 = Eigen::VectorXd::Zero(fc.map().target_dim());
  for (const Frame* fr : {&a.vertical, &a.horizontal}) {
    for (int i = 0; i < fr->size(); ++i) {
      const Eigen::VectorXd e = fr->vectors.col(i);
      out.full += fc.second_fundamental_form<double>(e, VectorField::constant(e), q);
    }
  }
  const Eigen::MatrixXd df = a.differential;
  for (int j = 0; j < a.d2.size(); ++j) {
    const Eigen::VectorXd v = a.d2.vectors.col(j);
    out.d2 += df * fc.nabla<double>(v, fc.extend(Op::Q, v), q);
  }
  const Eigen::MatrixXd& jm = fc.map().complex_structure().matrix();
  for (int i = 0; i < a.d1.size(); ++i) {
    const Eigen::VectorXd e = a.d1.vectors.col(i);
    const Eigen::VectorXd je = jm * e;
    const VectorField ef = fc.extend(Op::P, e);
    const VectorField jef = fc.apply(Op::J, ef);
    const Eigen::VectorXd s = df * (fc.nabla<double>(je, jef, q) + fc.nabla<double>(e, ef, q));
    out.pairing = std::max(out.pairing, s.norm());
  }
  return out;
}

Eigen::VectorXd nabla_t(const FieldCalculus& fc, const Eigen::VectorXd& e, const VectorField& x, const VectorField& y,
                        const Eigen::VectorXd& q) {
  const VectorField txy(fc.dim(), [fc, x, y](const auto& p) {
    using S = typename std::decay_t<decltype(p)>::Scalar;
    return fc.tensor_t<S>(x(p), y, p);
  });
  const Eigen::VectorXd nex = fc.nabla<double>(e, x, q);
  return fc.nabla<double>(e, txy, q) - fc.tensor_t<double>(nex, y, q) -
         fc.tensor_t<double>(x(q), VectorField::constant(fc.nabla<double>(e, y, q)), q);
}

}  // namespace subcheck
