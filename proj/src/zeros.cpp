#include "convpot/zeros.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numbers>

namespace convpot {

namespace {

using CMat = Eigen::MatrixXcd;

/// Parlett-Reinsch diagonal balancing (powers of two), in place.
void balance(CMat& a) {
  const Eigen::Index n = a.rows();
  bool done = false;
  while (!done) {
    done = true;
    for (Eigen::Index i = 0; i < n; ++i) {
      double c = 0.0, r = 0.0;
      for (Eigen::Index j = 0; j < n; ++j) {
        if (j == i) continue;
        c += std::abs(a(j, i));
        r += std::abs(a(i, j));
      }
      if (c == 0.0 || r == 0.0) continue;
      double f = 1.0;
      const double s = c + r;
      while (c < r / 2.0) {
        c *= 2.0;
        r /= 2.0;
        f *= 2.0;
      }
      while (c >= r * 2.0) {
        c /= 2.0;
        r *= 2.0;
        f /= 2.0;
      }
      if ((c + r) < 0.95 * s) {
        done = false;
        a.row(i) /= f;
        a.col(i) *= f;
      }
    }
  }
}

}  // namespace

std::size_t ZeroSet::count(Location loc) const {
  return static_cast<std::size_t>(std::count(flags.begin(), flags.end(), loc));
}

int rotational_symmetry(const ConvexDomain& domain, cplx* center) {
  const auto& spec = domain.spec();
  switch (domain.kind()) {
    case DomainKind::Disk:
      *center = spec.center;
      return 0;
    case DomainKind::Ellipse:
      *center = spec.center;
      return spec.semi_major == spec.semi_minor ? 0 : 2;
    case DomainKind::Polygon: break;
  }
  const auto& v = domain.vertices();
  const int n = static_cast<int>(v.size());
  const cplx c = domain.centroid();
  *center = c;
  const double tol = 1e-12 * domain.diameter();
  for (int p = n; p >= 2; --p) {
    if (n % p != 0) continue;
    const cplx rot = std::polar(1.0, 2.0 * std::numbers::pi / p);
    bool ok = true;
    for (int k = 0; k < n && ok; ++k) ok = std::abs((v[(k + n / p) % n] - c) - rot * (v[k] - c)) <= tol;
    if (ok) return p;
  }
  return 1;
}

ZeroSet zeros_of(const OrthoSequence& seq, int n, const ConvexDomain& domain) {
  if (n < 1 || n > seq.degree()) throw Error(ErrorCode::InvalidArgument, "zeros_of: degree out of range");
  ZeroSet zs;
  zs.degree = n;
  cplx c;
  const int p = rotational_symmetry(domain, &c);
  zs.symmetry_order = p;
  const auto& hs = seq.hessenberg();

  if (p == 0) {
    zs.zeros.assign(n, c);
  } else {
    CMat h = CMat::Zero(n, n);
    for (int k = 0; k < n; ++k)
      for (int j = 0; j <= std::min(k + 1, n - 1); ++j) h(j, k) = hs[k][j];
    const double hnorm = h.norm();
    h -= c * CMat::Identity(n, n);
    const int r = n % p;
    const int d = (n - r) / p;
    for (int i = 0; i < r; ++i) zs.zeros.push_back(c);
    if (d > 0) {
      CMat m;
      if (p == 1) {
        m = h;
      } else {
        CMat hp = h;
        for (int i = 1; i < p; ++i) hp = (hp * h).eval();
        m.resize(d, d);
        for (int a = 0; a < d; ++a)
          for (int b = 0; b < d; ++b) m(a, b) = hp(r + a * p, r + b * p);
      }
      CMat mb = m;
      balance(mb);
      Eigen::ComplexEigenSolver<CMat> es(mb, true);
      if (es.info() != Eigen::Success)
        throw Error(ErrorCode::EigenFailure, "comrade eigenvalue iteration failed at degree " + std::to_string(n));
      const double mnorm = std::max(mb.norm(), 1e-300);
      for (int i = 0; i < d; ++i) {
        const auto v = es.eigenvectors().col(i);
        const double be = (mb * v - es.eigenvalues()(i) * v).norm() / (mnorm * v.norm());
        zs.backward_error = std::max(zs.backward_error, be * mnorm / std::max(hnorm, 1e-300));
      }
      const cplx w = std::polar(1.0, 2.0 * std::numbers::pi / p);
      for (int i = 0; i < d; ++i) {
        const cplx zeta = es.eigenvalues()(i);
        const cplx root = (p == 1) ? zeta : std::pow(zeta, 1.0 / p);
        cplx rk = root;
        for (int k = 0; k < p; ++k, rk *= w) zs.zeros.push_back(c + rk);
      }
    }
  }
  std::sort(zs.zeros.begin(), zs.zeros.end(), [](cplx a, cplx b) {
    return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag();
  });
  for (const cplx z : zs.zeros) {
    zs.flags.push_back(domain.contains(z, 1e-8));
    const auto q = seq.eval_all(n, z);
    double s = 0.0;
    for (const auto& x : q) s += std::norm(x);
    zs.residuals.push_back(std::abs(q.back()) / std::sqrt(s));
  }
  return zs;
}

std::vector<Atom> zero_counting_measure(const ZeroSet& zs) {
  if (zs.zeros.empty()) throw Error(ErrorCode::InvalidArgument, "empty zero set");
  const double w = 1.0 / static_cast<double>(zs.zeros.size());
  std::vector<Atom> atoms;
  for (const cplx z : zs.zeros) {
    auto it = std::find_if(atoms.begin(), atoms.end(), [&](const Atom& a) { return a.z == z; });
    if (it != atoms.end()) {
      it->mass += w;
    } else {
      atoms.push_back({z, w});
    }
  }
  return atoms;
}

}  // namespace convpot
