#pragma once

#include <memory>
#include <string>
#include <vector>

#include "convpot/geometry.hpp"

namespace convpot {

namespace detail {
class ScKernel;
class PolygonCorrespondence;
struct BoundaryTable;
}  // namespace detail

/// Monotone boundary correspondence s -> theta sampled on a refinement grid.
/// theta is unwrapped: theta.front() belongs to s = 0 and the last entry
/// (s = perimeter) is exactly theta.front() + 2 pi.
struct CorrespondenceTable {
  std::vector<double> s;
  std::vector<double> theta;
};

/// Exterior conformal map Phi of the complement of the closed domain onto
/// |w| > 1, normalized by Phi(inf) = inf, Phi'(inf) > 0. Psi = Phi^{-1}.
class ExteriorMap {
 public:
  /// Throws Error(ParameterSolveFailed) when the SC parameter problem fails.
  static ExteriorMap build(const ConvexDomain& domain);

  ExteriorMap(const ExteriorMap&);
  ExteriorMap& operator=(const ExteriorMap&);
  ExteriorMap(ExteriorMap&&) noexcept;
  ExteriorMap& operator=(ExteriorMap&&) noexcept;
  ~ExteriorMap();

  const ConvexDomain& domain() const { return domain_; }
  double capacity() const { return capacity_; }

  /// Phi(z) for z outside the open domain.
  cplx eval(cplx z) const;
  /// Psi(w) for |w| >= 1.
  cplx eval_inverse(cplx w) const;
  /// Psi'(w) for |w| > 1.
  cplx inverse_derivative(cplx w) const;

  /// Unwrapped arg Phi(boundary_point(s)); theta_of_s(0) = table().theta[0].
  double theta_of_s(double s) const;
  double s_of_theta(double theta) const;
  const CorrespondenceTable& table() const { return table_; }

  /// mu(J) = |Phi(J)| / 2 pi.
  double equilibrium_measure(const BoundaryArc& arc) const;

  /// b_0 .. b_{count-1} of Psi(w) = cap w + b_0 + b_1/w + ...
  std::vector<cplx> laurent_coefficients(int count) const;

  /// SC data (polygons only): prevertex angles and turning exponents.
  const std::vector<double>& prevertex_angles() const { return prevertex_theta_; }
  const std::vector<double>& turning_exponents() const { return exponents_; }

  /// JSON text with exact round-trip of every parameter.
  std::string to_json() const;
  static ExteriorMap from_json(const std::string& text);

 private:
  explicit ExteriorMap(const ConvexDomain& domain);
  void finish_polygon();

  ConvexDomain domain_;
  double capacity_ = 1.0;
  cplx b0_{0.0, 0.0};
  std::vector<double> prevertex_theta_;
  std::vector<double> exponents_;
  std::unique_ptr<detail::ScKernel> kernel_;
  std::unique_ptr<detail::PolygonCorrespondence> corr_;
  CorrespondenceTable table_;
};

/// Interior conformal map phi of the domain onto the unit disk with
/// phi(anchor) = 0 and phi'(anchor) > 0. Polygons and disks only.
class InteriorMap {
 public:
  /// The anchor defaults to the centroid.
  static InteriorMap build(const ConvexDomain& domain);
  static InteriorMap build(const ConvexDomain& domain, cplx anchor);

  InteriorMap(const InteriorMap&);
  InteriorMap& operator=(const InteriorMap&);
  InteriorMap(InteriorMap&&) noexcept;
  InteriorMap& operator=(InteriorMap&&) noexcept;
  ~InteriorMap();

  const ConvexDomain& domain() const { return domain_; }
  cplx anchor() const { return anchor_; }
  /// psi'(0) = 1 / phi'(anchor).
  double scale() const { return scale_; }

  /// phi(z) for z in the closed domain.
  cplx eval(cplx z) const;
  /// psi(u) for |u| <= 1.
  cplx eval_inverse(cplx u) const;
  cplx inverse_derivative(cplx u) const;

  double theta_of_s(double s) const;
  double s_of_theta(double theta) const;
  const CorrespondenceTable& table() const { return table_; }

  /// omega(z, arc, G). For z on the boundary (|dist| <= rel_tol diam L) the
  /// value is 1 when z lies on the arc and 0 otherwise.
  double harmonic_measure(cplx z, const BoundaryArc& arc, double rel_tol = 1e-10) const;
  /// Same, with the disk image u = phi(z) supplied by the caller.
  double harmonic_measure_at_image(cplx u, const BoundaryArc& arc) const;

  const std::vector<double>& prevertex_angles() const { return prevertex_theta_; }

  std::string to_json() const;
  static InteriorMap from_json(const std::string& text);

 private:
  InteriorMap(const ConvexDomain& domain, cplx anchor);
  void finish_polygon();

  ConvexDomain domain_;
  cplx anchor_;
  double scale_ = 1.0;
  std::vector<double> prevertex_theta_;
  std::vector<double> exponents_;
  std::unique_ptr<detail::ScKernel> kernel_;
  std::unique_ptr<detail::PolygonCorrespondence> corr_;
  CorrespondenceTable table_;
};

/// Convenience accessor: logarithmic capacity of the closed domain.
double capacity(const ConvexDomain& domain);

/// Harmonic measure of the counter-clockwise arc {e^{it}: a <= t <= a + len}
/// at u in the open unit disk (closed form, 0 <= len <= 2 pi).
double disk_harmonic_measure(cplx u, double a, double len);

}  // namespace convpot
