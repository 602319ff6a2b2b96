#include "subcheck/submersion.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

namespace subcheck {

SubmersionMap::SubmersionMap(std::vector<Expr> components, MetricField metric, ComplexStructureField j)
    : components_(std::move(components)), metric_(std::move(metric)), j_(std::move(j)) {
  if (components_.empty()) throw std::invalid_argument("map needs at least one component");
  if (j_.dim() != metric_.dim()) throw std::invalid_argument("J and metric dimensions differ");
  if (metric_.dim() % 2 != 0) throw std::invalid_argument("source of an almost complex structure must be even-dimensional");
  if (target_dim() > source_dim()) throw std::invalid_argument("target dimension exceeds source dimension");
  for (const auto& c : components_) {
    if (!c.params().empty()) throw std::invalid_argument("map component has unbound parameter '" + *c.params().begin() + "'");
    if (c.max_variable() > source_dim()) throw std::invalid_argument("map component references a variable beyond the source dimension");
  }
}

const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::Invariant: return "invariant";
    case Verdict::AntiInvariant: return "anti-invariant";
    case Verdict::Slant: return "slant";
    case Verdict::SemiInvariant: return "semi-invariant";
    case Verdict::SemiSlant: return "semi-slant";
    case Verdict::Generic: return "generic";
  }
  return "?";
}

std::optional<Verdict> verdict_from_string(const std::string& s) {
  for (Verdict v : {Verdict::Invariant, Verdict::AntiInvariant, Verdict::Slant, Verdict::SemiInvariant,
                    Verdict::SemiSlant, Verdict::Generic})
    if (s == to_string(v)) return v;
  return std::nullopt;
}

Eigen::MatrixXd Frame::projector(const Eigen::MatrixXd& g) const {
  const auto n = vectors.rows();
  if (vectors.cols() == 0) return Eigen::MatrixXd::Zero(n, n);
  return vectors * vectors.transpose() * g;
}

double Frame::orthonormality_defect(const Eigen::MatrixXd& g) const {
  if (vectors.cols() == 0) return 0.0;
  const Eigen::MatrixXd gram = vectors.transpose() * g * vectors;
  return max_abs(gram - Eigen::MatrixXd::Identity(gram.rows(), gram.cols()));
}

namespace {

// Coordinates in which g becomes the identity: x = T y with Tᵀ G T = I.
struct OrthoChart {
  Eigen::MatrixXd to_ambient;    // T = L⁻ᵀ
  Eigen::MatrixXd from_ambient;  // T⁻¹ = Lᵀ
};

OrthoChart ortho_chart(const Eigen::MatrixXd& g) {
  Eigen::LLT<Eigen::MatrixXd> llt(g);
  if (llt.info() != Eigen::Success) throw NumericalError("metric not positive definite at p");
  const Eigen::MatrixXd l = llt.matrixL();
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(l);
  const auto& s = svd.singularValues();
  if (s[s.size() - 1] <= 0.0 || s[0] / s[s.size() - 1] > 1e6)  // cond(G) = cond(L)² > 1e12
    throw NumericalError("metric not invertible at p");
  OrthoChart c;
  c.from_ambient = l.transpose();
  c.to_ambient = l.transpose().triangularView<Eigen::Upper>().solve(Eigen::MatrixXd::Identity(g.rows(), g.cols()));
  return c;
}

struct KernelSplit {
  Eigen::MatrixXd vertical;    // g-orthonormal columns
  Eigen::MatrixXd horizontal;  // g-orthonormal columns
};

KernelSplit kernel_split(const Eigen::MatrixXd& df, const Eigen::MatrixXd& g, const SplitTolerances& tol) {
  const auto n = df.rows();
  const auto m = df.cols();
  const OrthoChart chart = ortho_chart(g);
  const Eigen::MatrixXd a = df * chart.to_ambient;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeFullV);
  const auto& s = svd.singularValues();
  const double smax = s.size() > 0 ? s[0] : 0.0;
  Eigen::Index rank = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i)
    if (s[i] > tol.rank * smax) ++rank;
  if (rank < n)
    throw NotSubmersion("not a submersion at p: differential rank " + std::to_string(rank) + " < " + std::to_string(n));
  const Eigen::MatrixXd& v = svd.matrixV();
  return {chart.to_ambient * v.rightCols(m - n), chart.to_ambient * v.leftCols(n)};
}

// Orthonormal basis (columns, in frame coordinates) of the range of `cols`.
Eigen::MatrixXd range_basis(const Eigen::MatrixXd& cols, double rel_tol) {
  if (cols.cols() == 0 || cols.rows() == 0) return Eigen::MatrixXd(cols.rows(), 0);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(cols, Eigen::ComputeFullU);
  const auto& s = svd.singularValues();
  Eigen::Index rank = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i)
    if (s[i] > rel_tol * std::max(1.0, s[0])) ++rank;
  return svd.matrixU().leftCols(rank);
}

// Orthonormal complement (columns) of an orthonormal set inside R^k.
Eigen::MatrixXd complement_basis(const Eigen::MatrixXd& basis, Eigen::Index k) {
  if (basis.cols() == 0) return Eigen::MatrixXd::Identity(k, k);
  if (basis.cols() == k) return Eigen::MatrixXd(k, 0);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(basis, Eigen::ComputeFullU);
  return svd.matrixU().rightCols(k - basis.cols());
}

}  // namespace

Eigen::MatrixXd differential(const SubmersionMap& f, const Eigen::VectorXd& p) {
  if (p.size() != f.source_dim()) throw std::invalid_argument("point dimension does not match the source");
  return f.jacobian<double>(p);
}

Frame vertical_space(const SubmersionMap& f, const Eigen::VectorXd& p, const SplitTolerances& tol) {
  const KernelSplit ks = kernel_split(differential(f, p), f.metric().at(p), tol);
  return {p, ks.vertical, true};
}

Frame horizontal_space(const SubmersionMap& f, const Eigen::VectorXd& p, const SplitTolerances& tol) {
  const KernelSplit ks = kernel_split(differential(f, p), f.metric().at(p), tol);
  return {p, ks.horizontal, true};
}

double riemannian_submersion_residual(const SubmersionMap& f, const Eigen::VectorXd& p, const SplitTolerances& tol) {
  const Eigen::MatrixXd df = differential(f, p);
  const KernelSplit ks = kernel_split(df, f.metric().at(p), tol);
  const Eigen::MatrixXd pushed = df * ks.horizontal;  // target metric is Euclidean
  const Eigen::MatrixXd gram = pushed.transpose() * pushed;
  return max_abs(gram - Eigen::MatrixXd::Identity(gram.rows(), gram.cols()));
}

PhiOmega phi_omega(const SubmersionMap& f, const Eigen::VectorXd& p) {
  const auto ops = split_operators<double>(f, p);
  return {ops.phi, ops.omega};
}

BC b_c(const SubmersionMap& f, const Eigen::VectorXd& p) {
  const auto ops = split_operators<double>(f, p);
  return {ops.b, ops.c};
}

bool SemiSlantAnalysis::theta_is_right_angle(const SplitTolerances& tol) const {
  return theta.has_value() && std::cos(*theta) < std::sqrt(tol.cluster);
}

SemiSlantAnalysis split_d1_d2(const SubmersionMap& f, const Eigen::VectorXd& p, const SplitTolerances& tol) {
  SemiSlantAnalysis a;
  a.point = p;
  a.differential = differential(f, p);
  a.metric = f.metric().at(p);
  const KernelSplit ks = kernel_split(a.differential, a.metric, tol);
  a.vertical = {p, ks.vertical, true};
  a.horizontal = {p, ks.horizontal, true};
  {
    const Eigen::MatrixXd pushed = a.differential * ks.horizontal;
    a.submersion_residual = max_abs(pushed.transpose() * pushed - Eigen::MatrixXd::Identity(pushed.cols(), pushed.cols()));
  }
  a.ops = split_operators<double>(f, p);

  const Eigen::MatrixXd& g = a.metric;
  const Eigen::MatrixXd& j = f.complex_structure().matrix();
  const Eigen::MatrixXd& ev = ks.vertical;
  const Eigen::MatrixXd& eh = ks.horizontal;
  a.phi = ev.transpose() * g * j * ev;
  a.omega = eh.transpose() * g * j * ev;
  a.b = ev.transpose() * g * j * eh;
  a.c = eh.transpose() * g * j * eh;

  const Eigen::Index dv = ev.cols();
  Eigen::MatrixXd d1_coords(dv, 0);
  Eigen::MatrixXd d2_coords(dv, 0);
  std::vector<double> d2_values;
  if (dv > 0) {
    Eigen::MatrixXd minus_phi2 = -(a.phi * a.phi);
    minus_phi2 = 0.5 * (minus_phi2 + minus_phi2.transpose()).eval();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(minus_phi2);
    const Eigen::VectorXd& lam = es.eigenvalues();
    for (Eigen::Index i = 0; i < dv; ++i) {
      if (lam[i] < -tol.cluster || lam[i] > 1.0 + tol.cluster)
        throw ConsistencyError("eigenvalue " + std::to_string(lam[i]) + " of -phi^2 outside [0, 1]");
      a.spectrum.push_back(lam[i]);
    }
    std::vector<Eigen::Index> in_d1;
    std::vector<Eigen::Index> in_d2;
    for (Eigen::Index i = 0; i < dv; ++i) {
      if (std::abs(lam[i] - 1.0) < tol.cluster) in_d1.push_back(i);
      else in_d2.push_back(i);
    }
    d1_coords.resize(dv, static_cast<Eigen::Index>(in_d1.size()));
    d2_coords.resize(dv, static_cast<Eigen::Index>(in_d2.size()));
    for (std::size_t k = 0; k < in_d1.size(); ++k) d1_coords.col(static_cast<Eigen::Index>(k)) = es.eigenvectors().col(in_d1[k]);
    for (std::size_t k = 0; k < in_d2.size(); ++k) {
      d2_coords.col(static_cast<Eigen::Index>(k)) = es.eigenvectors().col(in_d2[k]);
      d2_values.push_back(std::max(0.0, lam[in_d2[k]]));
    }
  }

  // Cluster the D2 spectrum (ascending) by width.
  std::vector<std::vector<double>> clusters;
  for (double v : d2_values) {
    if (clusters.empty() || v - clusters.back().front() >= tol.cluster) clusters.push_back({v});
    else clusters.back().push_back(v);
  }
  for (const auto& c : clusters) {
    double s = 0.0;
    for (double v : c) s += v;
    a.angle_cos2.push_back(s / static_cast<double>(c.size()));
  }

  const int d1 = static_cast<int>(d1_coords.cols());
  const int d2 = static_cast<int>(d2_coords.cols());
  const double right_angle_cos = std::sqrt(tol.cluster);
  if (d2 == 0) {
    a.verdict = Verdict::Invariant;
    a.theta = 0.0;
  } else if (clusters.size() > 1) {
    a.verdict = Verdict::Generic;
  } else {
    const double cos_theta = std::sqrt(std::min(1.0, a.angle_cos2.front()));
    a.theta = std::acos(cos_theta);
    const bool right = cos_theta < right_angle_cos;
    if (d1 == 0) a.verdict = right ? Verdict::AntiInvariant : Verdict::Slant;
    else a.verdict = right ? Verdict::SemiInvariant : Verdict::SemiSlant;
  }

  a.d1 = {p, ev * d1_coords, true};
  a.d2 = {p, ev * d2_coords, true};

  // ωD2 and its complement μ inside H, in horizontal-frame coordinates.
  const Eigen::MatrixXd omega_d2 = range_basis(a.omega * d2_coords, 1e-9);
  const Eigen::MatrixXd mu = complement_basis(omega_d2, eh.cols());
  a.omega_d2 = {p, eh * omega_d2, true};
  a.mu = {p, eh * mu, true};

  a.model.d1 = d1;
  a.model.d2 = d2;
  a.model.clusters = a.angle_cos2;
  a.model.cos2 = a.angle_cos2.size() == 1 ? a.angle_cos2.front() : 0.0;
  return a;
}

double operator_norm(const Eigen::MatrixXd& g, const Eigen::MatrixXd& op) {
  if (op.size() == 0) return 0.0;
  Eigen::LLT<Eigen::MatrixXd> llt(g);
  const Eigen::MatrixXd lt = llt.matrixU();  // Lᵀ
  const Eigen::MatrixXd lt_inv = lt.triangularView<Eigen::Upper>().solve(Eigen::MatrixXd::Identity(g.rows(), g.cols()));
  const Eigen::MatrixXd m = lt * op * lt_inv;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
  return svd.singularValues()[0];
}

double AlgebraicResiduals::max() const {
  return std::max({phi2_b_omega, c2_omega_b, omega_phi_c_omega, b_c_phi_b});
}

AlgebraicResiduals algebraic_identities(const SemiSlantAnalysis& a) {
  const auto& o = a.ops;
  AlgebraicResiduals r;
  r.phi2_b_omega = operator_norm(a.metric, o.phi * o.phi + o.b * o.omega + o.vertical);
  r.c2_omega_b = operator_norm(a.metric, o.c * o.c + o.omega * o.b + o.horizontal);
  r.omega_phi_c_omega = operator_norm(a.metric, o.omega * o.phi + o.c * o.omega);
  r.b_c_phi_b = operator_norm(a.metric, o.b * o.c + o.phi * o.b);
  return r;
}

double DistributionResiduals::max() const {
  return std::max({phi_d1, omega_d1, phi_d2, b_range, mu_invariant});
}

DistributionResiduals distribution_relations(const SemiSlantAnalysis& a) {
  const auto& o = a.ops;
  const Eigen::MatrixXd& g = a.metric;
  const Eigen::MatrixXd p = a.d1_projector();
  const Eigen::MatrixXd q = a.d2_projector();
  const Eigen::MatrixXd pm = a.mu_projector();
  const auto m = g.rows();
  const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(m, m);
  DistributionResiduals r;
  r.phi_d1 = operator_norm(g, (id - p) * o.phi * p);
  if (a.d1.size() > 0) {
    // φ restricted to D1 must be onto D1: its smallest singular value is 1 (φ = J there).
    const Eigen::MatrixXd phi_d1 = a.d1.vectors.transpose() * g * o.phi * a.d1.vectors;
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(phi_d1);
    r.phi_d1 = std::max(r.phi_d1, std::abs(1.0 - svd.singularValues().minCoeff()));
  }
  r.omega_d1 = operator_norm(g, o.omega * p);
  r.phi_d2 = operator_norm(g, (id - q) * o.phi * q);
  // B(H) = D2: range inside D2 and of full dimension.
  r.b_range = operator_norm(g, (id - q) * o.b);
  if (a.d2.size() > 0) {
    const Eigen::MatrixXd bh = a.d2.vectors.transpose() * g * o.b * a.horizontal.vectors;
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(bh);
    const auto& sv = svd.singularValues();
    const double smin = sv.size() >= a.d2.size() ? sv[a.d2.size() - 1] : 0.0;
    if (smin < 1e-9) r.b_range = std::max(r.b_range, 1.0);
  }
  r.mu_invariant = operator_norm(g, (id - pm) * o.j * pm);
  return r;
}

double j_hat_square_residual(const SemiSlantAnalysis& a) {
  const auto& o = a.ops;
  if (!a.theta || a.verdict == Verdict::Generic) throw std::logic_error("J-hat needs a single semi-slant angle");
  const double ct = std::cos(*a.theta);
  const Eigen::MatrixXd p = a.d1_projector();
  const Eigen::MatrixXd q = a.d2_projector();
  Eigen::MatrixXd jhat = o.j * p;
  if (a.d2.size() > 0) jhat += (1.0 / ct) * o.phi * q;
  return operator_norm(a.metric, jhat * jhat * o.vertical + o.vertical);
}

double direct_angle(const SemiSlantAnalysis& a, const Eigen::VectorXd& x) {
  const Eigen::MatrixXd& g = a.metric;
  const double jx = g_norm(g, a.ops.j * x);
  const double phix = g_norm(g, a.ops.phi * x);
  if (jx == 0.0) throw std::invalid_argument("direct_angle: zero vector");
  if (phix == 0.0) return std::numbers::pi / 2;
  return std::acos(std::min(1.0, phix / jx));
}

AngleConstancy slant_angle_constancy(const SubmersionMap& f, const std::vector<Eigen::VectorXd>& points,
                                     std::mt19937_64& rng, int directions_per_point, const SplitTolerances& tol) {
  if (points.empty()) throw std::invalid_argument("no sample points");
  std::normal_distribution<double> normal(0.0, 1.0);
  AngleConstancy out;
  std::vector<double> spectral;
  std::vector<double> direct;
  for (std::size_t i = 0; i < points.size(); ++i) {
    const SemiSlantAnalysis a = split_d1_d2(f, points[i], tol);
    if (i == 0) out.verdict = a.verdict;
    else if (a.verdict != out.verdict)
      throw NotGloballySemiSlant(std::string("not globally semi-slant: verdict ") + to_string(a.verdict) +
                                 " differs from " + to_string(out.verdict));
    if (!a.theta) continue;
    spectral.push_back(*a.theta);
    if (a.d2.size() == 0) continue;
    for (int k = 0; k < directions_per_point; ++k) {
      Eigen::VectorXd w(a.d2.size());
      for (auto& wi : w) wi = normal(rng);
      direct.push_back(direct_angle(a, a.d2.vectors * w.normalized()));
    }
  }
  if (spectral.empty()) {
    out.theta_hat = std::numeric_limits<double>::quiet_NaN();
    return out;
  }
  double sum = 0.0;
  for (double t : spectral) sum += t;
  out.theta_hat = sum / static_cast<double>(spectral.size());
  const double c2 = std::pow(std::cos(out.theta_hat), 2);
  for (double t : spectral) out.max_deviation = std::max(out.max_deviation, std::abs(std::pow(std::cos(t), 2) - c2));
  for (double t : direct) out.max_deviation = std::max(out.max_deviation, std::abs(std::pow(std::cos(t), 2) - c2));
  return out;
}

EvenDimensionCheck even_dimension_check(const SubmersionMap& f, const SemiSlantAnalysis& a) {
  EvenDimensionCheck c;
  c.applicable = a.verdict != Verdict::Generic && a.theta && !a.theta_is_right_angle();
  if (c.applicable) c.holds = f.target_dim() % 2 == 0 && a.kernel_dim() % 2 == 0;
  return c;
}

double subspace_angle(const Eigen::MatrixXd& g, const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  if (a.cols() != b.cols()) return std::numbers::pi / 2;
  if (a.cols() == 0) return 0.0;
  const OrthoChart chart = ortho_chart(g);
  auto orth = [&](const Eigen::MatrixXd& m) {
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(chart.from_ambient * m);
    return Eigen::MatrixXd(qr.householderQ() * Eigen::MatrixXd::Identity(m.rows(), m.cols()));
  };
  const Eigen::MatrixXd qa = orth(a);
  const Eigen::MatrixXd qb = orth(b);
  // sine of the largest principal angle: ‖(I − Q_B Q_Bᵀ) Q_A‖
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(qa - qb * (qb.transpose() * qa));
  return std::asin(std::min(1.0, svd.singularValues()[0]));
}

}  // namespace subcheck
