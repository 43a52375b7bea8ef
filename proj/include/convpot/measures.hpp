#pragma once

#include <string>
#include <vector>

#include "convpot/conformal.hpp"
#include "convpot/orthopoly.hpp"
#include "convpot/zeros.hpp"

namespace convpot {

struct BoundaryAtom {
  double s;
  double mass;
};

/// Measure on L: continuous cumulative C(s) from the anchor on an increasing
/// grid (grid.front() = 0, grid.back() = perimeter, C(0) = 0) plus atoms.
struct BoundaryMeasure {
  std::vector<double> grid;
  std::vector<double> cumulative;
  std::vector<BoundaryAtom> atoms;
  double total = 0.0;

  /// Mass of the closed arc, continuous part by monotone cubic interpolation in s.
  double arc_mass(const BoundaryArc& arc) const;
  double atom_mass() const;
};

struct DiscrepancyReport {
  double D = 0.0;
  /// An arc realizing D (endpoints at grid or atom sites).
  BoundaryArc argmax;
  std::size_t grid_size = 0;
  std::size_t atom_sites = 0;
  std::string note;
};

struct PotentialGapReport {
  double epsilon = 0.0;
  double theta_argmax = 0.0;
  cplx z_argmax;
  std::size_t grid_size = 0;
  // ingredients at the argmax point
  double log_abs_phi = 0.0;
  double log_abs_q = 0.0;
  double log_lambda = 0.0;
  double n_log_cap = 0.0;
};

/// Discrepancy grid: boundary tables of both maps, boundary-zero sites and 32
/// points around the image of every interior zero.
std::vector<double> measure_grid(const ExteriorMap& emap, const InteriorMap* imap = nullptr,
                                 const ZeroSet* zeros = nullptr);

/// C(s) = (theta(s) - theta(0)) / 2 pi.
BoundaryMeasure equilibrium_boundary_measure(const ExteriorMap& emap, const std::vector<double>& grid);

/// tau_n(J) = (1/n) sum omega(z_j, J, G); boundary zeros become atoms.
/// Throws Error(ExteriorZero) if a zero is flagged exterior.
BoundaryMeasure balayage_measure(const InteriorMap& imap, const ZeroSet& zs, const std::vector<double>& grid);

/// sup over arcs |(a - b)(J)| = max - min of the two-sided cumulative
/// difference. Throws Error(GridMismatch) unless both grids agree.
DiscrepancyReport discrepancy(const BoundaryMeasure& a, const BoundaryMeasure& b);

/// Evaluation points Psi(rho e^{i theta}) just outside L, rho = 1 + offset.
struct BoundaryProbe {
  double rho = 1.0;
  std::vector<double> theta;
  std::vector<cplx> z;

  static BoundaryProbe build(const ExteriorMap& emap, double offset = 1e-6);
};

/// eps = max(0, max over the probe of U(mu - tau_n, z)).
PotentialGapReport potential_gap(const OrthoSequence& seq, int n, const ExteriorMap& emap, const BoundaryProbe& probe);

/// U(m, z) = -int log|z - zeta| dm by the midpoint rule on the grid plus the
/// atoms. Independent oracle only. Throws Error(SingularEvaluation) for z on L.
double potential_of_measure(const BoundaryMeasure& m, const ConvexDomain& domain, cplx z);

/// U(nu_{Q_n}, z) summed directly over the zeros.
double zero_potential(const ZeroSet& zs, cplx z);

}  // namespace convpot
