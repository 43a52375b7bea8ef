#include "convpot/measures.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace convpot {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

std::vector<double> tidy_grid(std::vector<double> g, double perimeter, const std::vector<double>& corners = {}) {
  for (auto& s : g) s = std::clamp(s, 0.0, perimeter);
  g.push_back(0.0);
  g.push_back(perimeter);
  std::sort(g.begin(), g.end());
  std::vector<double> out;
  const double tol = 1e-13 * perimeter;
  for (double s : g)
    if (out.empty() || s - out.back() > tol) out.push_back(s);
  out.front() = 0.0;
  if (perimeter - out.back() <= tol) out.back() = perimeter;
  // merging may have kept a neighbour of a corner instead of the corner
  for (const double c : corners) {
    auto it = std::lower_bound(out.begin(), out.end(), c);
    if (it != out.end() && *it - c <= tol) {
      *it = c;
    } else if (it != out.begin() && c - it[-1] <= tol) {
      it[-1] = c;
    }
  }
  return out;
}

// Node slope for the cubic Hermite interpolant: the three-point parabolic
// derivative (second order on uneven grids), limited so the interpolant stays
// monotone; one-sided at the ends.
double hermite_slope(const std::vector<double>& x, const std::vector<double>& y, std::size_t i) {
  const std::size_t n = x.size();
  if (i == 0) return (y[1] - y[0]) / (x[1] - x[0]);
  if (i == n - 1) return (y[n - 1] - y[n - 2]) / (x[n - 1] - x[n - 2]);
  const double h0 = x[i] - x[i - 1], h1 = x[i + 1] - x[i];
  const double d0 = (y[i] - y[i - 1]) / h0, d1 = (y[i + 1] - y[i]) / h1;
  if (d0 * d1 <= 0.0) return 0.0;
  const double m = (h1 * d0 + h0 * d1) / (h0 + h1);
  const double cap = 3.0 * std::min(std::abs(d0), std::abs(d1));
  return std::abs(m) > cap ? std::copysign(cap, m) : m;
}

double interp(const std::vector<double>& x, const std::vector<double>& y, double s) {
  if (s <= x.front()) return y.front();
  if (s >= x.back()) return y.back();
  const auto it = std::upper_bound(x.begin(), x.end(), s);
  const std::size_t i = static_cast<std::size_t>(it - x.begin());
  const double h = x[i] - x[i - 1];
  const double t = (s - x[i - 1]) / h;
  if (x.size() < 3) return y[i - 1] + t * (y[i] - y[i - 1]);
  const double m0 = hermite_slope(x, y, i - 1) * h, m1 = hermite_slope(x, y, i) * h;
  const double t2 = t * t, t3 = t2 * t;
  return (2 * t3 - 3 * t2 + 1) * y[i - 1] + (t3 - 2 * t2 + t) * m0 + (-2 * t3 + 3 * t2) * y[i] + (t3 - t2) * m1;
}

}  // namespace

double BoundaryMeasure::atom_mass() const {
  double m = 0.0;
  for (const auto& a : atoms) m += a.mass;
  return m;
}

double BoundaryMeasure::arc_mass(const BoundaryArc& arc) const {
  const double per = grid.back();
  if (arc.length >= per) return total;
  auto cum = [&](double s) { return interp(grid, cumulative, s); };
  // continuous part of [start, end] plus atoms inside the closed arc
  double m;
  const double e = arc.start + arc.length;
  if (e <= per) {
    m = cum(e) - cum(arc.start);
  } else {
    m = (cumulative.back() - cum(arc.start)) + cum(e - per);
  }
  for (const auto& a : atoms)
    if (arc.contains(a.s, per)) m += a.mass;
  return m;
}

std::vector<double> measure_grid(const ExteriorMap& emap, const InteriorMap* imap, const ZeroSet* zeros) {
  const ConvexDomain& d = emap.domain();
  std::vector<double> g = emap.table().s;
  if (imap) g.insert(g.end(), imap->table().s.begin(), imap->table().s.end());
  if (imap && zeros) {
    for (std::size_t j = 0; j < zeros->zeros.size(); ++j) {
      const cplx z = zeros->zeros[j];
      if (zeros->flags[j] == Location::Boundary) {
        g.push_back(d.nearest_boundary_point(z).s);
        continue;
      }
      if (zeros->flags[j] != Location::Interior) continue;
      const cplx u = imap->eval(z);
      const double w = std::max(1.0 - std::abs(u), 1e-12);
      const double th = std::arg(u);
      for (int k = -16; k < 16; ++k) {
        const double t = w * std::sinh(k / 3.0);
        if (std::abs(t) < std::numbers::pi) g.push_back(imap->s_of_theta(th + t));
      }
    }
  }
  return tidy_grid(std::move(g), d.perimeter(), d.vertex_s());
}

BoundaryMeasure equilibrium_boundary_measure(const ExteriorMap& emap, const std::vector<double>& grid) {
  BoundaryMeasure m;
  m.grid = grid;
  m.total = 1.0;
  const double t0 = emap.theta_of_s(0.0);
  const double per = emap.domain().perimeter();
  m.cumulative.resize(grid.size());
  double prev = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    double c = (grid[i] >= per) ? 1.0 : (emap.theta_of_s(grid[i]) - t0) / kTwoPi;
    c = std::clamp(c, prev, 1.0);
    m.cumulative[i] = prev = c;
  }
  m.cumulative.front() = 0.0;
  return m;
}

BoundaryMeasure balayage_measure(const InteriorMap& imap, const ZeroSet& zs, const std::vector<double>& grid) {
  const ConvexDomain& d = imap.domain();
  const double n = static_cast<double>(zs.zeros.size());
  BoundaryMeasure m;
  m.grid = grid;
  m.total = 1.0;
  std::vector<cplx> images;
  for (std::size_t j = 0; j < zs.zeros.size(); ++j) {
    switch (zs.flags[j]) {
      case Location::Exterior:
        throw Error(ErrorCode::ExteriorZero, "zero (" + std::to_string(zs.zeros[j].real()) + ", " +
                                                 std::to_string(zs.zeros[j].imag()) + ") of degree " +
                                                 std::to_string(zs.degree) + " lies outside the closed domain");
      case Location::Boundary: {
        const double s = d.nearest_boundary_point(zs.zeros[j]).s;
        auto it = std::find_if(m.atoms.begin(), m.atoms.end(), [&](const BoundaryAtom& a) { return a.s == s; });
        if (it != m.atoms.end()) {
          it->mass += 1.0 / n;
        } else {
          m.atoms.push_back({s, 1.0 / n});
        }
        break;
      }
      case Location::Interior: images.push_back(imap.eval(zs.zeros[j])); break;
    }
  }
  std::sort(m.atoms.begin(), m.atoms.end(), [](const BoundaryAtom& a, const BoundaryAtom& b) { return a.s < b.s; });
  const double t0 = imap.theta_of_s(0.0);
  const double per = d.perimeter();
  m.cumulative.resize(grid.size());
  double prev = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double len = (grid[i] >= per) ? kTwoPi : imap.theta_of_s(grid[i]) - t0;
    double c = 0.0;
    for (const cplx u : images) c += disk_harmonic_measure(u, t0, len);
    c /= n;
    m.cumulative[i] = prev = std::max(c, prev);
  }
  m.cumulative.front() = 0.0;
  return m;
}

DiscrepancyReport discrepancy(const BoundaryMeasure& a, const BoundaryMeasure& b) {
  if (a.grid != b.grid) throw Error(ErrorCode::GridMismatch, "discrepancy needs measures on one common grid");
  const auto& g = a.grid;
  std::vector<BoundaryAtom> atoms = a.atoms;
  for (const auto& x : b.atoms) atoms.push_back({x.s, -x.mass});
  std::stable_sort(atoms.begin(), atoms.end(), [](const BoundaryAtom& x, const BoundaryAtom& y) { return x.s < y.s; });

  double hi = 0.0, lo = 0.0, s_hi = 0.0, s_lo = 0.0;
  auto record = [&](double v, double s) {
    if (v > hi) hi = v, s_hi = s;
    if (v < lo) lo = v, s_lo = s;
  };
  double acc = 0.0;
  std::size_t p = 0;
  std::size_t sites = 0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    // atoms strictly inside (g[i-1], g[i])
    while (p < atoms.size() && atoms[p].s < g[i]) {
      const double s = atoms[p].s;
      const double t = (i == 0) ? 0.0 : (s - g[i - 1]) / (g[i] - g[i - 1]);
      const double cont = (i == 0) ? 0.0
                                   : (1 - t) * (a.cumulative[i - 1] - b.cumulative[i - 1]) +
                                         t * (a.cumulative[i] - b.cumulative[i]);
      record(cont + acc, s);
      while (p < atoms.size() && atoms[p].s == s) acc += atoms[p++].mass;
      record(cont + acc, s);
      ++sites;
    }
    const double cont = a.cumulative[i] - b.cumulative[i];
    record(cont + acc, g[i]);
    if (p < atoms.size() && atoms[p].s == g[i]) {
      while (p < atoms.size() && atoms[p].s == g[i]) acc += atoms[p++].mass;
      record(cont + acc, g[i]);
      ++sites;
    }
  }
  DiscrepancyReport r;
  r.D = hi - lo;
  const double s0 = std::min(s_lo, s_hi), s1 = std::max(s_lo, s_hi);
  r.argmax = {s0, s1 - s0};
  r.grid_size = g.size();
  r.atom_sites = sites;
  r.note = sites ? "atoms evaluated from both sides" : "no atoms";
  if (std::abs((a.total) - (b.total)) > 1e-12) r.note += "; totals differ, arcs through the anchor not covered";
  return r;
}

BoundaryProbe BoundaryProbe::build(const ExteriorMap& emap, double offset) {
  BoundaryProbe p;
  p.rho = 1.0 + offset;
  const auto& th = emap.table().theta;
  p.theta.assign(th.begin(), th.end() - 1);
  p.z.reserve(p.theta.size());
  for (double t : p.theta) p.z.push_back(emap.eval_inverse(std::polar(p.rho, t)));
  return p;
}

PotentialGapReport potential_gap(const OrthoSequence& seq, int n, const ExteriorMap& emap, const BoundaryProbe& probe) {
  if (n < 1 || n > seq.degree()) throw Error(ErrorCode::InvalidArgument, "potential_gap: degree out of range");
  PotentialGapReport r;
  r.grid_size = probe.z.size();
  const double log_lambda = seq.log_lambda(n);
  const double n_log_cap = n * std::log(emap.capacity());
  const double log_phi = std::log(probe.rho);
  double best = -INFINITY;
  for (std::size_t i = 0; i < probe.z.size(); ++i) {
    const double lq = std::log(std::abs(seq.eval(n, probe.z[i])));
    const double u = (lq - log_lambda - n_log_cap - n * log_phi) / n;
    if (u > best) {
      best = u;
      r.theta_argmax = probe.theta[i];
      r.z_argmax = probe.z[i];
      r.log_abs_q = lq;
    }
  }
  r.epsilon = std::max(0.0, best);
  r.log_abs_phi = log_phi;
  r.log_lambda = log_lambda;
  r.n_log_cap = n_log_cap;
  return r;
}

double potential_of_measure(const BoundaryMeasure& m, const ConvexDomain& domain, cplx z) {
  if (domain.contains(z) == Location::Boundary)
    throw Error(ErrorCode::SingularEvaluation, "potential evaluated on the boundary");
  double u = 0.0;
  for (std::size_t i = 1; i < m.grid.size(); ++i) {
    const double dm = m.cumulative[i] - m.cumulative[i - 1];
    if (dm == 0.0) continue;
    const cplx zeta = domain.boundary_point(0.5 * (m.grid[i - 1] + m.grid[i])).z;
    u -= dm * std::log(std::abs(z - zeta));
  }
  for (const auto& a : m.atoms) {
    const double dist = std::abs(z - domain.boundary_point(a.s).z);
    if (dist == 0.0) throw Error(ErrorCode::SingularEvaluation, "potential evaluated at an atom");
    u -= a.mass * std::log(dist);
  }
  return u;
}

double zero_potential(const ZeroSet& zs, cplx z) {
  double u = 0.0;
  for (const cplx zj : zs.zeros) {
    const double dist = std::abs(z - zj);
    if (dist == 0.0) throw Error(ErrorCode::SingularEvaluation, "potential evaluated at a zero");
    u -= std::log(dist);
  }
  return u / static_cast<double>(zs.zeros.size());
}

}  // namespace convpot
