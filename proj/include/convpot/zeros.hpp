#pragma once

#include <vector>

#include "convpot/geometry.hpp"
#include "convpot/orthopoly.hpp"

namespace convpot {

/// Zeros of Q_n with multiplicity, each flagged against the closed domain.
struct ZeroSet {
  int degree = 0;
  std::vector<cplx> zeros;
  std::vector<Location> flags;
  /// max over eigenpairs of |(M - z) v| / (|M| |v|) for the matrix solved.
  double backward_error = 0.0;
  /// |Q_n(z_j)| / |(Q_0, .., Q_n)(z_j)|.
  std::vector<double> residuals;
  /// Order p of the rotational symmetry used to deflate (1: none, 0: disk).
  int symmetry_order = 1;

  std::size_t count(Location loc) const;
};

/// Largest p such that the domain is invariant under rotation by 2 pi / p
/// about `center`; 0 when every rotation works (disk, circle).
int rotational_symmetry(const ConvexDomain& domain, cplx* center);

/// Zeros as eigenvalues of the n x n comrade matrix (leading block of the
/// recurrence). With p-fold symmetry about c, Q_n(z) = (z-c)^r P((z-c)^p),
/// r = n mod p, and only the residue-class block of (H_n - c)^p is solved.
/// Location band: |dist| <= 1e-8 diam L counts as boundary.
ZeroSet zeros_of(const OrthoSequence& seq, int n, const ConvexDomain& domain);

struct Atom {
  cplx z;
  double mass;
};

/// Mass 1/n at every zero; exactly coincident zeros merge.
std::vector<Atom> zero_counting_measure(const ZeroSet& zs);

}  // namespace convpot
