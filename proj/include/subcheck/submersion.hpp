#pragma once

// Vertical/horizontal splitting of a map's differential, the operators
// φ, ω, B, C induced by J, and the spectral D1/D2 decomposition.

#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "subcheck/expr.hpp"
#include "subcheck/geometry.hpp"
#include "subcheck/linalg.hpp"

namespace subcheck {

/// Tolerances of the classifier.
struct SplitTolerances {
  double rank = 1e-9;     // singular values below rank * σ_max count as zero
  double cluster = 1e-7;  // |λ − 1| for D1, and width of an angle cluster
};

class NotSubmersion : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Internal-consistency failure (a bug in the pipeline, not in the input).
class ConsistencyError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class SubmersionMap {
 public:
  /// `components` must be free of unbound parameters.
  SubmersionMap(std::vector<Expr> components, MetricField metric, ComplexStructureField j);

  int source_dim() const { return metric_.dim(); }
  int target_dim() const { return static_cast<int>(components_.size()); }
  const std::vector<Expr>& components() const { return components_; }
  const MetricField& metric() const { return metric_; }
  const ComplexStructureField& complex_structure() const { return j_; }

  template <class S>
  Vec<S> value(const Vec<S>& q) const {
    Vec<S> out(target_dim());
    for (int i = 0; i < target_dim(); ++i) out[i] = components_[static_cast<std::size_t>(i)].eval<S>(q);
    return out;
  }

  /// n × 2m Jacobian at q, exact through one more dual layer.
  template <class S>
  Mat<S> jacobian(const Vec<S>& q) const {
    const int n = target_dim();
    const int m = source_dim();
    Mat<S> d(n, m);
    for (int j = 0; j < m; ++j) {
      const Vec<Dual<S>> lifted = lift_axis(q, j);
      for (int i = 0; i < n; ++i) d(i, j) = components_[static_cast<std::size_t>(i)].eval<Dual<S>>(lifted).d;
    }
    return d;
  }

 private:
  std::vector<Expr> components_;
  MetricField metric_;
  ComplexStructureField j_;
};

/// J-induced operators at a point, as ambient matrices (zero off their domain).
template <class S>
struct SplitOperators {
  Mat<S> g;
  Mat<S> vertical;    // P_V, g-orthogonal projector onto ker F*
  Mat<S> horizontal;  // P_H = I − P_V
  Mat<S> j;
  Mat<S> phi;    // P_V J P_V
  Mat<S> omega;  // P_H J P_V
  Mat<S> b;      // P_V J P_H
  Mat<S> c;      // P_H J P_H
};

/// Smooth closed form P_H = G⁻¹dFᵀ(dF G⁻¹ dFᵀ)⁻¹dF. Throws NotSubmersion at a rank drop.
template <class S>
SplitOperators<S> split_operators(const SubmersionMap& f, const Vec<S>& q) {
  SplitOperators<S> ops;
  const int m = f.source_dim();
  ops.g = f.metric().at<S>(q);
  const Mat<S> df = f.jacobian<S>(q);
  Mat<S> ginv_dft;
  try {
    ginv_dft = solve<S>(ops.g, df.transpose());
  } catch (const NumericalError&) {
    throw NumericalError("metric not invertible at p");
  }
  Mat<S> gram_inv_df;
  try {
    gram_inv_df = solve<S>(df * ginv_dft, df);
  } catch (const NumericalError&) {
    throw NotSubmersion("rank transition: differential loses rank near sampled point");
  }
  ops.horizontal = ginv_dft * gram_inv_df;
  ops.vertical = Mat<S>::Identity(m, m) - ops.horizontal;
  ops.j = f.complex_structure().at<S>(q);
  const Mat<S> jv = ops.j * ops.vertical;
  const Mat<S> jh = ops.j * ops.horizontal;
  ops.phi = ops.vertical * jv;
  ops.omega = ops.horizontal * jv;
  ops.b = ops.vertical * jh;
  ops.c = ops.horizontal * jh;
  return ops;
}

enum class Verdict { Invariant, AntiInvariant, Slant, SemiInvariant, SemiSlant, Generic };

const char* to_string(Verdict v);
std::optional<Verdict> verdict_from_string(const std::string& s);

/// Basis vectors (columns) at a base point.
struct Frame {
  Eigen::VectorXd point;
  Eigen::MatrixXd vectors;
  bool orthonormal = false;

  int size() const { return static_cast<int>(vectors.cols()); }
  /// g-orthogonal projector onto the span (requires orthonormal).
  Eigen::MatrixXd projector(const Eigen::MatrixXd& g) const;
  /// max |Gram − I| under g.
  double orthonormality_defect(const Eigen::MatrixXd& g) const;
};

/// What the smooth projector fields need to know about the D1/D2 split.
/// With constant angle, P = (−φ² − cos²θ P_V) / (1 − cos²θ) is a polynomial in
/// smooth operators, so its derivatives come out exact.
struct DistributionModel {
  int d1 = 0;
  int d2 = 0;
  std::vector<double> clusters;  // cos² values of the D2 angle clusters
  double cos2 = 0.0;             // single-cluster value (0 when d2 = 0)

  template <class S>
  Mat<S> d1_projector(const SplitOperators<S>& ops) const {
    const Eigen::Index m = ops.g.rows();
    if (d2 == 0) return ops.vertical;
    if (d1 == 0) return Mat<S>::Zero(m, m);
    const Mat<S> a = -(ops.phi * ops.phi);
    // Π_k (A − c_k P_V)/(1 − c_k) kills every D2 cluster and fixes D1.
    Mat<S> p = ops.vertical;
    for (double ck : clusters) p = p * (a - S(ck) * ops.vertical) * S(1.0 / (1.0 - ck));
    return p;
  }

  template <class S>
  Mat<S> d2_projector(const SplitOperators<S>& ops) const {
    return ops.vertical - d1_projector(ops);
  }

  /// Projector onto ωD2 ⊂ H: ωω*/sin²θ with ω* = −B, i.e. (P_H + C²)/sin²θ.
  template <class S>
  Mat<S> omega_d2_projector(const SplitOperators<S>& ops) const {
    const Eigen::Index m = ops.g.rows();
    if (d2 == 0) return Mat<S>::Zero(m, m);
    const Mat<S> w = ops.horizontal + ops.c * ops.c;  // = −ωB
    if (clusters.size() == 1) return w * S(1.0 / (1.0 - cos2));
    // −ωB has eigenvalue 1 − c_k on ω(cluster k) and 0 on μ.
    Mat<S> p = Mat<S>::Zero(m, m);
    for (std::size_t k = 0; k < clusters.size(); ++k) {
      Mat<S> term = w * S(1.0 / (1.0 - clusters[k]));
      for (std::size_t l = 0; l < clusters.size(); ++l)
        if (l != k) term = term * (w - S(1.0 - clusters[l]) * ops.horizontal) * S(1.0 / (clusters[l] - clusters[k]));
      p += term;
    }
    return p;
  }

  template <class S>
  Mat<S> mu_projector(const SplitOperators<S>& ops) const {
    return ops.horizontal - omega_d2_projector(ops);
  }
};

struct SemiSlantAnalysis {
  Eigen::VectorXd point;
  Eigen::MatrixXd differential;
  Eigen::MatrixXd metric;
  Frame vertical;
  Frame horizontal;
  Frame d1;
  Frame d2;
  Frame omega_d2;
  Frame mu;

  // Operators in the vertical/horizontal frames.
  Eigen::MatrixXd phi;    // dim V × dim V, skew
  Eigen::MatrixXd omega;  // dim H × dim V
  Eigen::MatrixXd b;      // dim V × dim H
  Eigen::MatrixXd c;      // dim H × dim H

  SplitOperators<double> ops;  // ambient matrices at the point

  std::vector<double> spectrum;   // eigenvalues of −φ² on ker F*, ascending
  std::vector<double> angle_cos2; // D2 cluster means, ascending
  Verdict verdict = Verdict::Generic;
  std::optional<double> theta;    // radians; 0 when D2 = 0, unset when generic
  double submersion_residual = 0.0;

  DistributionModel model;

  int kernel_dim() const { return vertical.size(); }
  bool theta_is_right_angle(const SplitTolerances& tol = {}) const;

  Eigen::MatrixXd d1_projector() const { return d1.projector(metric); }
  Eigen::MatrixXd d2_projector() const { return d2.projector(metric); }
  Eigen::MatrixXd omega_d2_projector() const { return omega_d2.projector(metric); }
  Eigen::MatrixXd mu_projector() const { return mu.projector(metric); }
};

Eigen::MatrixXd differential(const SubmersionMap& f, const Eigen::VectorXd& p);

/// g-orthonormal basis of ker dF via SVD in g-orthonormal coordinates.
Frame vertical_space(const SubmersionMap& f, const Eigen::VectorXd& p, const SplitTolerances& tol = {});
Frame horizontal_space(const SubmersionMap& f, const Eigen::VectorXd& p, const SplitTolerances& tol = {});

/// max_ab |g_N(F*Z_a, F*Z_b) − δ_ab| over an orthonormal horizontal frame.
double riemannian_submersion_residual(const SubmersionMap& f, const Eigen::VectorXd& p,
                                      const SplitTolerances& tol = {});

struct PhiOmega {
  Eigen::MatrixXd phi;    // ambient P_V J P_V
  Eigen::MatrixXd omega;  // ambient P_H J P_V
};
struct BC {
  Eigen::MatrixXd b;  // ambient P_V J P_H
  Eigen::MatrixXd c;  // ambient P_H J P_H
};
PhiOmega phi_omega(const SubmersionMap& f, const Eigen::VectorXd& p);
BC b_c(const SubmersionMap& f, const Eigen::VectorXd& p);

/// Full analysis at p: frames, operators, spectrum of −φ², D1/D2, verdict, θ.
SemiSlantAnalysis split_d1_d2(const SubmersionMap& f, const Eigen::VectorXd& p, const SplitTolerances& tol = {});

/// g-operator norm (largest singular value in g-orthonormal coordinates).
double operator_norm(const Eigen::MatrixXd& g, const Eigen::MatrixXd& op);

/// Residuals of φ²+Bω+id, C²+ωB+id, ωφ+Cω, BC+φB at the analysis point.
struct AlgebraicResiduals {
  double phi2_b_omega = 0.0;
  double c2_omega_b = 0.0;
  double omega_phi_c_omega = 0.0;
  double b_c_phi_b = 0.0;
  double max() const;
};
AlgebraicResiduals algebraic_identities(const SemiSlantAnalysis& a);

/// Subspace relations φD1 = D1, ωD1 = 0, φD2 ⊂ D2, B(H) = D2, Jμ = μ.
struct DistributionResiduals {
  double phi_d1 = 0.0;
  double omega_d1 = 0.0;
  double phi_d2 = 0.0;
  double b_range = 0.0;
  double mu_invariant = 0.0;
  double max() const;
};
DistributionResiduals distribution_relations(const SemiSlantAnalysis& a);

/// Ĵ = JP + φQ / cos θ; returns max-norm of Ĵ² + id on ker F*. Requires θ < π/2.
double j_hat_square_residual(const SemiSlantAnalysis& a);

/// cos θ(X) = |φX| / |JX| for X ∈ D2 (π/2 when φX = 0).
double direct_angle(const SemiSlantAnalysis& a, const Eigen::VectorXd& x);

struct AngleConstancy {
  double theta_hat = 0.0;
  double max_deviation = 0.0;  // max |cos^2 theta(X) - cos^2 theta_hat|
  Verdict verdict = Verdict::Generic;
};

class NotGloballySemiSlant : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Aggregates θ over points and random unit X ∈ D2 per point.
AngleConstancy slant_angle_constancy(const SubmersionMap& f, const std::vector<Eigen::VectorXd>& points,
                                     std::mt19937_64& rng, int directions_per_point = 8,
                                     const SplitTolerances& tol = {});

struct EvenDimensionCheck {
  bool applicable = false;  // verdict in the semi-slant family with θ < π/2
  bool holds = true;        // target dim and kernel dim both even
};
EvenDimensionCheck even_dimension_check(const SubmersionMap& f, const SemiSlantAnalysis& a);

/// Largest principal angle (radians) between two subspaces given by frames.
double subspace_angle(const Eigen::MatrixXd& g, const Eigen::MatrixXd& a, const Eigen::MatrixXd& b);

}  // namespace subcheck
