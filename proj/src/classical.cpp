#include "convpot/classical.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numbers>

#include "convpot/orthopoly.hpp"

namespace convpot {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * kPi;

}  // namespace

FaberSequence faber(const ExteriorMap& emap, int N) {
  if (N < 0) throw Error(ErrorCode::InvalidArgument, "faber: N must be >= 0");
  FaberSequence fs;
  fs.capacity = emap.capacity();
  fs.laurent = emap.laurent_coefficients(N + 1);
  const auto& b = fs.laurent;
  const double cap = fs.capacity;
  fs.coeffs.push_back({cplx{1.0, 0.0}});
  for (int n = 0; n < N; ++n) {
    std::vector<cplx> next(n + 2, cplx{0.0, 0.0});
    const auto& fn = fs.coeffs[n];
    for (int i = 0; i <= n; ++i) {
      next[i + 1] += fn[i];
      next[i] -= b[0] * fn[i];
    }
    for (int k = 1; k <= n; ++k)
      for (std::size_t i = 0; i < fs.coeffs[n - k].size(); ++i) next[i] -= b[k] * fs.coeffs[n - k][i];
    next[0] -= static_cast<double>(n) * b[n];
    for (auto& x : next) x /= cap;
    fs.coeffs.push_back(std::move(next));
  }
  return fs;
}

std::vector<cplx> FaberSequence::eval_all(int n, cplx z) const {
  std::vector<cplx> f(n + 1);
  f[0] = 1.0;
  for (int m = 0; m < n; ++m) {
    cplx acc = (z - laurent[0]) * f[m] - static_cast<double>(m) * laurent[m];
    for (int k = 1; k <= m; ++k) acc -= laurent[k] * f[m - k];
    f[m + 1] = acc / capacity;
  }
  return f;
}

std::vector<cplx> FaberSequence::eval_derivatives(int n, cplx z) const {
  const auto f = eval_all(n, z);
  std::vector<cplx> d(n + 1);
  d[0] = 0.0;
  for (int m = 0; m < n; ++m) {
    cplx acc = f[m] + (z - laurent[0]) * d[m];
    for (int k = 1; k <= m; ++k) acc -= laurent[k] * d[m - k];
    d[m + 1] = acc / capacity;
  }
  return d;
}

std::vector<cplx> faber_contour_oracle(const ExteriorMap& emap, int n, int samples) {
  const ConvexDomain& d = emap.domain();
  const cplx c = d.centroid();
  double r = 0.0;
  for (const auto& p : boundary_sample(d, 64)) r = std::max(r, std::abs(p.z - c));
  const double R = 1.5 * r;
  std::vector<cplx> vals(samples);
  for (int m = 0; m < samples; ++m) vals[m] = std::pow(emap.eval(c + std::polar(R, kTwoPi * m / samples)), n);
  // coefficients in powers of (z - c)
  std::vector<cplx> a(n + 1);
  for (int k = 0; k <= n; ++k) {
    cplx acc{0.0, 0.0};
    for (int m = 0; m < samples; ++m) {
      const long idx = (static_cast<long>(k) * m) % samples;
      acc += vals[m] * std::polar(1.0, -kTwoPi * static_cast<double>(idx) / samples);
    }
    a[k] = acc / static_cast<double>(samples) / std::pow(R, k);
  }
  // expand sum a_k (z - c)^k in powers of z
  std::vector<cplx> out(n + 1, cplx{0.0, 0.0});
  for (int k = 0; k <= n; ++k) {
    double binom = 1.0;
    for (int j = 0; j <= k; ++j) {
      out[j] += a[k] * binom * std::pow(-c, k - j);
      binom = binom * (k - j) / (j + 1);
    }
  }
  return out;
}

std::vector<double> faber_norms(const FaberSequence& fs, const ConvexDomain& domain) {
  std::vector<double> out;
  for (int n = 0; n <= fs.degree(); ++n)
    out.push_back(boundary_sup(domain, [&](cplx z) { return std::abs(fs.eval_all(n, z).back()); }));
  return out;
}

std::vector<double> faber_derivative_norms(const FaberSequence& fs, const ConvexDomain& domain) {
  std::vector<double> out;
  for (int n = 0; n < fs.degree(); ++n)
    out.push_back(boundary_sup(domain, [&](cplx z) { return std::abs(fs.eval_derivatives(n + 1, z).back()); }));
  return out;
}

namespace {

struct LawsonRun {
  Eigen::VectorXcd c;
  double sup = 0.0;    // max residual on the rows used
  double lower = 0.0;  // best dual bound seen
  int iterations = 0;
  std::vector<double> history;
};

/// Lawson iteration on the rows in `rows`; weights start uniform.
LawsonRun lawson(const Eigen::MatrixXcd& B, const Eigen::VectorXcd& f, const std::vector<Eigen::Index>& rows,
                 int max_iter, double rel_spread) {
  const Eigen::Index m = static_cast<Eigen::Index>(rows.size());
  Eigen::MatrixXcd Bs(m, B.cols());
  Eigen::VectorXcd fs(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    Bs.row(i) = B.row(rows[i]);
    fs(i) = f(rows[i]);
  }
  LawsonRun out;
  out.sup = INFINITY;
  Eigen::VectorXd w = Eigen::VectorXd::Constant(m, 1.0 / static_cast<double>(m));
  for (int it = 0; it < max_iter; ++it) {
    const Eigen::VectorXd sw = w.cwiseSqrt();
    const Eigen::VectorXcd c = (sw.asDiagonal() * Bs).colPivHouseholderQr().solve(sw.asDiagonal() * fs);
    const Eigen::VectorXd r = (fs - Bs * c).cwiseAbs();
    const double sup = r.maxCoeff();
    // nu_j = w_j conj(r_j) annihilates the basis (normal equations), so
    // |sum nu_j f_j| / sum |nu_j| = sum w r^2 / sum w r bounds the minimax.
    const double wr = w.dot(r);
    if (wr > 0.0) out.lower = std::max(out.lower, w.dot(r.cwiseAbs2()) / wr);
    out.history.push_back(sup);
    out.iterations = it + 1;
    if (sup < out.sup) {
      out.sup = sup;
      out.c = c;
    }
    if (out.sup - out.lower <= rel_spread * out.sup) break;
    w = w.cwiseProduct(r);
    const double tot = w.sum();
    if (!(tot > 0.0)) break;
    w /= tot;
  }
  return out;
}

}  // namespace

ChebyshevResult chebyshev(const ExteriorMap& emap, const FaberSequence& fs, int n, int grid, double rel_spread,
                          int max_iter) {
  if (n < 1 || n > fs.degree()) throw Error(ErrorCode::InvalidArgument, "chebyshev: degree out of range");
  if (grid < 512) throw Error(ErrorCode::InvalidArgument, "chebyshev: grid needs at least 512 points");
  const ConvexDomain& d = emap.domain();
  std::vector<cplx> pts;
  const double t0 = emap.theta_of_s(0.0);
  for (int i = 0; i < grid; ++i) pts.push_back(d.boundary_point(emap.s_of_theta(t0 + kTwoPi * i / grid)).z);
  for (const auto& v : d.vertices()) pts.push_back(v);
  const Eigen::Index m = static_cast<Eigen::Index>(pts.size());

  // target cap^n F_n (monic), basis F_0 .. F_{n-1}
  const double scale = std::pow(fs.capacity, n);
  Eigen::MatrixXcd B(m, n);
  Eigen::VectorXcd f(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    const auto v = fs.eval_all(n, pts[i]);
    for (int k = 0; k < n; ++k) B(i, k) = v[k];
    f(i) = scale * v[n];
  }
  std::vector<Eigen::Index> all(m);
  for (Eigen::Index i = 0; i < m; ++i) all[i] = i;

  ChebyshevResult res;
  res.degree = n;
  // Plain Lawson on the whole grid. Its lower bound creeps up slowly once the
  // weights sit on a few near-extremal clusters, so it is followed by Lawson
  // on an exchanged set of local maxima. Any weights give a lower bound for
  // the grid minimax, so the reduced runs certify the spread.
  LawsonRun full = lawson(B, f, all, std::min(max_iter, 200), rel_spread);
  res.history = full.history;
  res.iterations = full.iterations;
  Eigen::VectorXcd best_c = full.c;
  double best = full.sup;
  double lower = full.lower;

  std::vector<Eigen::Index> active;
  auto add_peaks = [&](const Eigen::VectorXcd& c) {
    const Eigen::VectorXd r = (f - B * c).cwiseAbs();
    const double top = r.maxCoeff();
    for (Eigen::Index i = 0; i < m; ++i) {
      if (r(i) < 0.5 * top) continue;
      if (i < grid) {
        const Eigen::Index prev = (i + grid - 1) % grid, next = (i + 1) % grid;
        if (r(i) < r(prev) || r(i) < r(next)) continue;
      }
      if (std::find(active.begin(), active.end(), i) == active.end()) active.push_back(i);
    }
    std::sort(active.begin(), active.end());
  };
  add_peaks(best_c);
  for (int round = 0; round < 32 && res.iterations < max_iter; ++round) {
    if (best - lower <= rel_spread * best) break;
    LawsonRun red = lawson(B, f, active, max_iter - res.iterations, 0.5 * rel_spread);
    res.iterations += red.iterations;
    lower = std::max(lower, red.lower);
    const double sup = (f - B * red.c).cwiseAbs().maxCoeff();
    if (sup < best) {
      best = sup;
      best_c = red.c;
    }
    const std::size_t before = active.size();
    add_peaks(red.c);
    if (active.size() == before && red.sup - red.lower <= 0.5 * rel_spread * red.sup) break;
  }
  res.grid_norm = best;
  res.lower_bound = lower;
  res.converged = (best - lower) <= rel_spread * best;

  // monic coefficients: cap^n F_n - sum c_k F_k
  res.coeffs.assign(n + 1, cplx{0.0, 0.0});
  for (std::size_t i = 0; i < fs.coeffs[n].size(); ++i) res.coeffs[i] += scale * fs.coeffs[n][i];
  for (int k = 0; k < n; ++k)
    for (std::size_t i = 0; i < fs.coeffs[k].size(); ++i) res.coeffs[i] -= best_c(k) * fs.coeffs[k][i];
  res.norm = boundary_sup(d, [&](cplx z) {
    const auto v = fs.eval_all(n, z);
    cplx t = scale * v[n];
    for (int k = 0; k < n; ++k) t -= best_c(k) * v[k];
    return std::abs(t);
  });
  return res;
}

// ---------------------------------------------------------------- Example 1

namespace {

/// Arcsine (equilibrium) distribution of [-1, b]: mass of [x, b].
double arcsine_upper(double x, double b) {
  const double mid = 0.5 * (b - 1.0), half = 0.5 * (b + 1.0);
  return std::acos(std::clamp((x - mid) / half, -1.0, 1.0)) / kPi;
}

double joukowski(double x) { return 0.5 * (x + 1.0 / x); }

}  // namespace

double SharpnessInstance::circle_cumulative(double theta) const {
  const double b = joukowski(1.0 + delta);
  const double top = arcsine_upper(1.0, b);
  auto upper = [&](double t) { return 0.5 * (arcsine_upper(std::cos(t), b) - top); };
  theta = std::clamp(theta, 0.0, kTwoPi);
  if (theta <= kPi) return upper(theta);
  return 2.0 * upper(kPi) - upper(kTwoPi - theta);
}

double SharpnessInstance::circle_density(double t) const {
  const double b = joukowski(1.0 + delta);
  const double x = std::cos(t);
  return 0.5 * std::abs(std::sin(t)) / (kPi * std::sqrt((x + 1.0) * (b - x)));
}

double SharpnessInstance::segment_density(double x) const {
  const double b = joukowski(1.0 + delta);
  const double y = joukowski(x);
  return 0.5 * (1.0 - 1.0 / (x * x)) / (kPi * std::sqrt((y + 1.0) * (b - y)));
}

SharpnessInstance sharpness_instance(double delta, int grid) {
  if (!(delta > 0.0 && delta <= 1.0)) throw Error(ErrorCode::InvalidArgument, "delta must lie in (0, 1]");
  SharpnessInstance inst;
  inst.delta = delta;
  inst.capacity = 1.0 + delta * delta / (4.0 * (1.0 + delta));
  inst.capacity_alt = 0.25 * (3.0 + delta + 1.0 / (1.0 + delta));
  const double b = joukowski(1.0 + delta);
  inst.interval_mass = arcsine_upper(1.0, b);

  std::vector<double> g(grid + 1);
  for (int i = 0; i <= grid; ++i) g[i] = kTwoPi * i / grid;
  g.back() = kTwoPi;
  inst.mu.grid = inst.tau.grid = g;
  inst.mu.total = inst.tau.total = 1.0;
  inst.mu.cumulative.resize(g.size());
  inst.tau.cumulative.resize(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) {
    inst.mu.cumulative[i] = g[i] / kTwoPi;
    inst.tau.cumulative[i] = inst.circle_cumulative(g[i]);
  }
  inst.mu.cumulative.back() = 1.0;
  // the segment projects radially onto the point 1 (s = 0)
  inst.tau.atoms.push_back({0.0, inst.interval_mass});
  return inst;
}

SharpnessRecord sharpness_check(const SharpnessInstance& inst) {
  SharpnessRecord r;
  r.D = discrepancy(inst.mu, inst.tau).D;
  r.epsilon_bound = 0.25 * inst.delta * inst.delta;
  r.log_capacity = std::log(inst.capacity);
  r.ratio = r.D / std::sqrt(r.epsilon_bound);
  r.interval_mass = inst.interval_mass;
  return r;
}

}  // namespace convpot
