#pragma once

#include <functional>
#include <string>
#include <vector>

#include "convpot/geometry.hpp"
#include "convpot/quadrature.hpp"

namespace convpot {

/// Area weight h(z) = c * dist(z, L)^m; m = 0 is the plain area measure.
struct Weight {
  double m = 0.0;
  double c = 1.0;

  static Weight unit() { return {}; }
  static Weight dist_power(double m, double c = 1.0) { return {m, c}; }
  bool is_unit() const { return m == 0.0; }
};

/// Positive-weight planar quadrature for <f, g> = int_G f conj(g) h dm.
class InnerProductEngine {
 public:
  /// Exact for polynomial products up to degree 2 n_max (unit weight and
  /// the polynomial-weight cases); otherwise adaptive to 1e-10 relative.
  /// `extra_degree` raises the base exactness (used for independent checks).
  static InnerProductEngine build(const ConvexDomain& domain, Weight weight, int n_max, int extra_degree = 0);

  const ConvexDomain& domain() const { return domain_; }
  const Weight& weight() const { return weight_; }
  int n_max() const { return n_max_; }
  int degree() const { return degree_; }
  const std::vector<PlanarNode>& nodes() const { return nodes_; }

  /// Sum of w_i f_i conj(g_i) over the nodes.
  cplx inner(const std::vector<cplx>& f, const std::vector<cplx>& g) const;
  double norm2(const std::vector<cplx>& f) const;
  /// Weighted mass int_G h dm.
  double mass() const;

 private:
  InnerProductEngine(const ConvexDomain& domain, Weight weight, int n_max, int degree)
      : domain_(domain), weight_(weight), n_max_(n_max), degree_(degree) {}

  ConvexDomain domain_;
  Weight weight_;
  int n_max_;
  int degree_;
  std::vector<PlanarNode> nodes_;  // weights already include h
};

/// Orthonormal sequence Q_0..Q_N in recurrence form:
/// z Q_k = sum_{j <= k+1} H[j][k] Q_j with H[k+1][k] > 0.
class OrthoSequence {
 public:
  int degree() const { return static_cast<int>(log_lambda_.size()) - 1; }

  /// Column k holds H[0..k+1][k].
  const std::vector<std::vector<cplx>>& hessenberg() const { return hess_; }
  double lambda(int n) const;
  double log_lambda(int n) const { return log_lambda_.at(n); }

  /// Q_0(z) .. Q_n(z) by the recurrence.
  std::vector<cplx> eval_all(int n, cplx z) const;
  cplx eval(int n, cplx z) const { return eval_all(n, z).back(); }

  /// max |Q_n| over the closed domain (boundary search, maximum principle).
  double sup_norm(int n, const ConvexDomain& domain) const;

  /// lambda_n cap^n, formed in log space.
  double leading_product(int n, double cap) const;

  /// Coefficients of Q_n in powers of z (low to high), diagnostic only.
  std::vector<cplx> monomial_coeffs(int n) const;

  /// max |<Q_j, Q_k> - delta_jk| for j, k <= n, measured with `engine`.
  double gram_residual(const InnerProductEngine& engine, int n) const;

  const std::string& domain_hash() const { return domain_hash_; }
  const Weight& weight() const { return weight_; }
  int quadrature_degree() const { return quad_degree_; }

  std::string to_json() const;
  static OrthoSequence from_json(const std::string& text);

 private:
  friend OrthoSequence orthonormalize(const InnerProductEngine&, int);

  std::vector<std::vector<cplx>> hess_;
  std::vector<double> log_lambda_;
  std::string domain_hash_;
  Weight weight_;
  int quad_degree_ = 0;
};

/// Arnoldi with one full reorthogonalization pass. Throws BreakdownError when
/// the normalization pivot falls below 1e-13 relative to |z Q_k|.
OrthoSequence orthonormalize(const InnerProductEngine& engine, int n);

/// Boundary sample: `per_side` uniform arc-length points per polygon side
/// (per_side * 4 on smooth boundaries), vertices included.
std::vector<BoundaryPoint> boundary_sample(const ConvexDomain& domain, int per_side = 512);

/// max of f over L: sampled, then the best local maxima are polished by
/// golden-section search in the arc-length parameter.
double boundary_sup(const ConvexDomain& domain, const std::function<double(cplx)>& f, int per_side = 512);

}  // namespace convpot
