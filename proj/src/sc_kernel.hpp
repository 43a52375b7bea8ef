#pragma once

// Schwarz-Christoffel integrand and the singular-endpoint quadratures used by
// both the exterior and the interior polygon maps.

#include <complex>
#include <functional>
#include <vector>

#include "convpot/geometry.hpp"

namespace convpot::detail {

/// Exterior flavor: f(z) = prod_j (1 - w_j / z)^{e_j},   |z| >= 1.
/// Interior flavor: f(z) = prod_j (1 - z / w_j)^{e_j},   |z| <= 1.
/// w_j = exp(i theta_j) are the prevertices; theta must be strictly increasing
/// within one period.
class ScKernel {
 public:
  enum class Flavor { Exterior, Interior };

  ScKernel() = default;
  ScKernel(Flavor flavor, std::vector<double> theta, std::vector<double> exponents);

  Flavor flavor() const { return flavor_; }
  std::size_t size() const { return theta_.size(); }
  const std::vector<double>& theta() const { return theta_; }
  const std::vector<double>& exponents() const { return exps_; }
  const std::vector<cplx>& prevertices() const { return w_; }

  cplx integrand(cplx z) const;

  /// Integral of f along the straight segment a -> b. sing_a / sing_b name the
  /// prevertex sitting at that endpoint (or -1).
  cplx segment(cplx a, cplx b, int sing_a, int sing_b) const;

  /// |f(e^{it})| on the unit circle.
  double abs_on_circle(double t) const;

  /// Integral of |f(e^{it})| over [t0, t1]; sing0 / sing1 as in segment().
  double arc_length(double t0, double t1, int sing0, int sing1) const;

  /// Index of the prevertex closest in angle to arg(z).
  int nearest_prevertex(cplx z) const;

 private:
  cplx factor(std::size_t j, cplx z) const;
  double dist_to_singularities(cplx z, int skip) const;
  double angular_dist(double t, int skip) const;
  cplx segment_from_singular(cplx a, cplx b, int sing_a) const;
  double arc_from(double origin, double dir, double extent, int sing) const;

  Flavor flavor_ = Flavor::Exterior;
  std::vector<double> theta_;
  std::vector<double> exps_;
  std::vector<cplx> w_;
};

/// Monotone boundary correspondence s <-> theta for a polygon side map,
/// obtained by integrating |f| along the circle between prevertices.
struct BoundaryTable {
  std::vector<double> s;
  std::vector<double> theta;  // unwrapped, theta[0] at s = 0, total increase 2 pi
};

class PolygonCorrespondence {
 public:
  PolygonCorrespondence() = default;
  /// `scale` is |C|; side k runs from prevertex k to k+1 and has length
  /// vertex_s[k+1] - vertex_s[k] (cyclically, with `perimeter`).
  PolygonCorrespondence(ScKernel kernel, double scale, std::vector<double> vertex_s, double perimeter);

  double theta_of_s(double s) const;  // s in [0, perimeter)
  double s_of_theta(double theta) const;
  const BoundaryTable& table() const { return table_; }

 private:
  int side_of_theta(double theta) const;
  double s_in_cell(std::size_t i, int k, double t) const;

  ScKernel kernel_;
  double scale_ = 1.0;
  std::vector<double> vertex_s_;
  double perimeter_ = 0.0;
  std::vector<double> side_fix_;         // per-side length correction factor
  std::vector<std::size_t> side_begin_;  // table index of each vertex
  BoundaryTable table_;
};

struct LmResult {
  std::vector<double> x;
  double residual = 0.0;
  int iterations = 0;
  bool converged = false;
};

/// Levenberg-Marquardt with forward-difference Jacobian.
LmResult levenberg_marquardt(const std::function<std::vector<double>(const std::vector<double>&)>& fn,
                             std::vector<double> x0, double tol, int max_iter);

}  // namespace convpot::detail
