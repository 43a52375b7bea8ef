#pragma once

#include <vector>

#include "convpot/conformal.hpp"
#include "convpot/measures.hpp"

namespace convpot {

/// Faber polynomials F_0..F_N of the closed domain, F_n = cap^{-n} z^n + ...
struct FaberSequence {
  double capacity = 1.0;
  std::vector<cplx> laurent;                // b_0 .. b_N
  std::vector<std::vector<cplx>> coeffs;    // row n: F_n in powers of z

  int degree() const { return static_cast<int>(coeffs.size()) - 1; }
  /// F_0(z) .. F_n(z) by the recurrence (no monomial form involved).
  std::vector<cplx> eval_all(int n, cplx z) const;
  /// F'_0(z) .. F'_n(z).
  std::vector<cplx> eval_derivatives(int n, cplx z) const;
};

/// From Psi(w)' / (Psi(w) - z) = sum F_n(z) w^{-n-1}:
/// cap F_{n+1} = (z - b_0) F_n - sum_{k=1}^{n} b_k F_{n-k} - n b_n.
FaberSequence faber(const ExteriorMap& emap, int N);

/// Polynomial part of Phi(z)^n in powers of z, from trapezoid samples of
/// Phi^n on a circle enclosing the domain. Independent of the recurrence.
std::vector<cplx> faber_contour_oracle(const ExteriorMap& emap, int n, int samples = 512);

/// sup_L |F_n|, n = 0..N.
std::vector<double> faber_norms(const FaberSequence& fs, const ConvexDomain& domain);
/// sup_L |F'_{n+1}|, n = 0..N-1.
std::vector<double> faber_derivative_norms(const FaberSequence& fs, const ConvexDomain& domain);

struct ChebyshevResult {
  int degree = 0;
  std::vector<cplx> coeffs;  // monic, powers of z
  double norm = 0.0;         // sup over L (refined)
  double grid_norm = 0.0;    // max over the Lawson grid
  double lower_bound = 0.0;  // Lawson weighted-L2 bound for the grid minimax
  int iterations = 0;
  bool converged = false;    // false: LawsonStall, best iterate kept
  std::vector<double> history;  // grid sup norm per iteration
};

/// Monic minimizer of the sup norm on L via Lawson iteration in the Faber
/// basis, stopped once (grid_norm - lower_bound) / grid_norm < rel_spread.
ChebyshevResult chebyshev(const ExteriorMap& emap, const FaberSequence& fs, int n, int grid = 2048,
                          double rel_spread = 1e-6, int max_iter = 4000);

/// V_delta = closed unit disk with the segment [1, 1 + delta] attached.
struct SharpnessInstance {
  double delta = 0.0;
  double capacity = 0.0;      // 1 + delta^2 / (4 (1 + delta))
  double capacity_alt = 0.0;  // (3 + delta + 1 / (1 + delta)) / 4
  double interval_mass = 0.0; // mu_delta([1, 1 + delta])
  BoundaryMeasure mu;         // equilibrium measure of the disk
  BoundaryMeasure tau;        // radial projection of mu_delta onto the circle

  /// mu_delta of the circle arc {e^{it}: 0 <= t <= theta}, theta in [0, 2 pi].
  double circle_cumulative(double theta) const;
  /// Density of mu_delta on the circle with respect to dt.
  double circle_density(double t) const;
  /// Density of mu_delta on the segment at x in (1, 1 + delta).
  double segment_density(double x) const;
};

/// mu_delta is the pull-back of the arcsine measure of [-1, J(1 + delta)]
/// under J(z) = (z + 1/z) / 2.
SharpnessInstance sharpness_instance(double delta, int grid = 4096);

struct SharpnessRecord {
  double D = 0.0;
  double epsilon_bound = 0.0;  // delta^2 / 4
  double log_capacity = 0.0;   // log cap V_delta
  double ratio = 0.0;          // D / sqrt(epsilon_bound)
  double interval_mass = 0.0;
};

SharpnessRecord sharpness_check(const SharpnessInstance& inst);

}  // namespace convpot
