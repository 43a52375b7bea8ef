#include "sc_kernel.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "convpot/error.hpp"
#include "convpot/quadrature.hpp"

namespace convpot::detail {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr int kNodes = 16;
constexpr int kMaxPanels = 20000;

double wrap_pi(double x) {
  x = std::fmod(x, kTwoPi);
  if (x > std::numbers::pi) x -= kTwoPi;
  if (x <= -std::numbers::pi) x += kTwoPi;
  return x;
}

}  // namespace

ScKernel::ScKernel(Flavor flavor, std::vector<double> theta, std::vector<double> exponents)
    : flavor_(flavor), theta_(std::move(theta)), exps_(std::move(exponents)) {
  w_.reserve(theta_.size());
  for (double t : theta_) w_.push_back(std::polar(1.0, t));
}

cplx ScKernel::factor(std::size_t j, cplx z) const {
  const cplx base = (flavor_ == Flavor::Exterior) ? 1.0 - w_[j] / z : 1.0 - z / w_[j];
  return std::pow(base, exps_[j]);
}

cplx ScKernel::integrand(cplx z) const {
  cplx p{1.0, 0.0};
  for (std::size_t j = 0; j < w_.size(); ++j) p *= factor(j, z);
  return p;
}

double ScKernel::dist_to_singularities(cplx z, int skip) const {
  double d = (flavor_ == Flavor::Exterior) ? std::abs(z) : INFINITY;
  for (std::size_t j = 0; j < w_.size(); ++j)
    if (static_cast<int>(j) != skip) d = std::min(d, std::abs(z - w_[j]));
  return d;
}

double ScKernel::angular_dist(double t, int skip) const {
  double d = INFINITY;
  for (std::size_t j = 0; j < theta_.size(); ++j)
    if (static_cast<int>(j) != skip) d = std::min(d, std::abs(wrap_pi(t - theta_[j])));
  return d;
}

int ScKernel::nearest_prevertex(cplx z) const {
  const double t = std::arg(z);
  int best = 0;
  double bd = INFINITY;
  for (std::size_t j = 0; j < theta_.size(); ++j) {
    const double d = std::abs(wrap_pi(t - theta_[j]));
    if (d < bd) bd = d, best = static_cast<int>(j);
  }
  return best;
}

cplx ScKernel::segment_from_singular(cplx a, cplx b, int k) const {
  const cplx d = b - a;
  const double len = std::abs(d);
  if (len == 0.0) return {0.0, 0.0};
  cplx acc{0.0, 0.0};
  double t = 0.0;
  if (k >= 0) {
    const double h = std::min(1.0, 0.5 * dist_to_singularities(a, k) / len);
    const Rule1D r = left_singular_rule(kNodes, exps_[k], h);
    const cplx rem_const = std::pow(-d / w_[k], exps_[k]);  // interior flavor
    for (int i = 0; i < kNodes; ++i) {
      const cplx z = a + r.x[i] * d;
      cplx p = (flavor_ == Flavor::Exterior) ? std::pow(d / z, exps_[k]) : rem_const;
      for (std::size_t j = 0; j < w_.size(); ++j)
        if (static_cast<int>(j) != k) p *= factor(j, z);
      acc += r.w[i] * p;
    }
    t = h;
  }
  const Rule1D& g = gauss_legendre(kNodes);
  for (int panel = 0; t < 1.0; ++panel) {
    if (panel > kMaxPanels) throw Error(ErrorCode::NoConvergence, "SC segment panel budget");
    const cplx zt = a + t * d;
    const double h = std::min(1.0 - t, 0.5 * dist_to_singularities(zt, -1) / len);
    if (!(h > 0.0)) throw Error(ErrorCode::SingularEvaluation, "SC segment hits a prevertex");
    const double m = t + 0.5 * h;
    cplx part{0.0, 0.0};
    for (int i = 0; i < kNodes; ++i) part += g.w[i] * integrand(a + (m + 0.5 * h * g.x[i]) * d);
    acc += 0.5 * h * part;
    t = (1.0 - t - h <= 1e-15) ? 1.0 : t + h;
  }
  return acc * d;
}

cplx ScKernel::segment(cplx a, cplx b, int sing_a, int sing_b) const {
  if (sing_b < 0) return segment_from_singular(a, b, sing_a);
  if (sing_a < 0) return -segment_from_singular(b, a, sing_b);
  const cplx m = 0.5 * (a + b);
  return segment_from_singular(a, m, sing_a) - segment_from_singular(b, m, sing_b);
}

double ScKernel::abs_on_circle(double t) const {
  double p = 1.0;
  for (std::size_t j = 0; j < theta_.size(); ++j)
    p *= std::pow(2.0 * std::abs(std::sin(0.5 * (t - theta_[j]))), exps_[j]);
  return p;
}

double ScKernel::arc_from(double origin, double dir, double extent, int k) const {
  if (extent <= 0.0) return 0.0;
  double acc = 0.0, x = 0.0;
  if (k >= 0) {
    const double h = std::min(extent, 0.5 * angular_dist(origin, k));
    const Rule1D r = left_singular_rule(kNodes, exps_[k], h);
    for (int i = 0; i < kNodes; ++i) {
      const double xi = r.x[i];
      const double t = origin + dir * xi;
      double p = std::pow(2.0 * std::sin(0.5 * xi) / xi, exps_[k]);
      for (std::size_t j = 0; j < theta_.size(); ++j)
        if (static_cast<int>(j) != k) p *= std::pow(2.0 * std::abs(std::sin(0.5 * (t - theta_[j]))), exps_[j]);
      acc += r.w[i] * p;
    }
    x = h;
  }
  const Rule1D& g = gauss_legendre(kNodes);
  for (int panel = 0; x < extent; ++panel) {
    if (panel > kMaxPanels) throw Error(ErrorCode::NoConvergence, "SC arc panel budget");
    const double h = std::min(extent - x, 0.5 * angular_dist(origin + dir * x, -1));
    if (!(h > 0.0)) throw Error(ErrorCode::SingularEvaluation, "SC arc hits a prevertex");
    const double m = x + 0.5 * h;
    double part = 0.0;
    for (int i = 0; i < kNodes; ++i) part += g.w[i] * abs_on_circle(origin + dir * (m + 0.5 * h * g.x[i]));
    acc += 0.5 * h * part;
    x = (extent - x - h <= 1e-15 * extent) ? extent : x + h;
  }
  return acc;
}

double ScKernel::arc_length(double t0, double t1, int sing0, int sing1) const {
  const double ext = t1 - t0;
  if (sing1 < 0) return arc_from(t0, 1.0, ext, sing0);
  if (sing0 < 0) return arc_from(t1, -1.0, ext, sing1);
  return arc_from(t0, 1.0, 0.5 * ext, sing0) + arc_from(t1, -1.0, 0.5 * ext, sing1);
}

PolygonCorrespondence::PolygonCorrespondence(ScKernel kernel, double scale, std::vector<double> vertex_s,
                                             double perimeter)
    : kernel_(std::move(kernel)), scale_(scale), vertex_s_(std::move(vertex_s)), perimeter_(perimeter) {
  const auto& th = kernel_.theta();
  const std::size_t n = th.size();
  side_fix_.resize(n);
  side_begin_.resize(n + 1);
  for (std::size_t k = 0; k < n; ++k) {
    const double t0 = th[k];
    const double t1 = (k + 1 < n) ? th[k + 1] : th[0] + kTwoPi;
    const int next = static_cast<int>((k + 1) % n);
    const double gap = t1 - t0;
    // theta - theta_k ~ s^beta with beta < 1 at a corner: within h / rho of a
    // prevertex the cells shrink in proportion to their distance from it, so
    // interpolating s -> theta stays accurate there
    constexpr double kRho = 0.02;
    const int skip = static_cast<int>(std::floor(1.0 / kRho)) + 1;
    // the two graded ends must not meet on short sides
    const int cells = std::max(2 * skip + 64, static_cast<int>(std::ceil(gap / (kTwoPi * 1e-4))));
    const double h = gap / cells;
    std::vector<double> near;  // distances from the prevertex, decreasing
    for (double dist = h / kRho; dist > 1e-9 * h; dist /= 1.0 + kRho) near.push_back(dist);
    std::vector<double> ts{t0};
    for (auto it = near.rbegin(); it != near.rend(); ++it) ts.push_back(t0 + *it);
    for (int i = skip; i <= cells - skip; ++i) ts.push_back(t0 + gap * i / cells);
    for (const double dist : near) ts.push_back(t1 - dist);
    ts.push_back(t1);
    const int m = static_cast<int>(ts.size()) - 1;
    std::vector<double> cum(m + 1, 0.0);
    for (int i = 0; i < m; ++i) {
      cum[i + 1] = cum[i] + scale_ * kernel_.arc_length(ts[i], ts[i + 1], i == 0 ? static_cast<int>(k) : -1,
                                                         i == m - 1 ? next : -1);
    }
    const double s0 = vertex_s_[k];
    const double s1 = (k + 1 < n) ? vertex_s_[k + 1] : perimeter_;
    side_fix_[k] = (s1 - s0) / cum[m];
    side_begin_[k] = table_.s.size();
    for (int i = 0; i < m; ++i) {
      table_.s.push_back(s0 + cum[i] * side_fix_[k]);
      table_.theta.push_back(ts[i]);
    }
  }
  side_begin_[n] = table_.s.size();
  table_.s.push_back(perimeter_);
  table_.theta.push_back(th[0] + kTwoPi);
}

int PolygonCorrespondence::side_of_theta(double theta) const {
  const auto& th = kernel_.theta();
  auto it = std::upper_bound(th.begin(), th.end(), theta);
  return std::max(0, static_cast<int>(it - th.begin()) - 1);
}

double PolygonCorrespondence::s_in_cell(std::size_t i, int k, double t) const {
  const double lo = table_.theta[i], hi = table_.theta[i + 1];
  if (t <= lo) return table_.s[i];
  if (t >= hi) return table_.s[i + 1];
  const double fac = side_fix_[k] * scale_;
  // integrate from the nearer table point so no path ends on a prevertex
  if (t - lo <= hi - t) {
    const int sing = (i == side_begin_[k]) ? k : -1;
    return table_.s[i] + fac * kernel_.arc_length(lo, t, sing, -1);
  }
  const int sing = (i + 1 == side_begin_[k + 1]) ? static_cast<int>((k + 1) % kernel_.size()) : -1;
  return table_.s[i + 1] - fac * kernel_.arc_length(t, hi, -1, sing);
}

double PolygonCorrespondence::s_of_theta(double theta) const {
  const auto& th = kernel_.theta();
  double rel = std::fmod(theta - th[0], kTwoPi);
  if (rel < 0.0) rel += kTwoPi;
  theta = th[0] + rel;
  const int k = side_of_theta(theta);
  const auto b = table_.theta.begin() + static_cast<std::ptrdiff_t>(side_begin_[k]);
  const auto e = table_.theta.begin() + static_cast<std::ptrdiff_t>(side_begin_[k + 1]);
  const std::size_t i = static_cast<std::size_t>(std::upper_bound(b, e, theta) - table_.theta.begin()) - 1;
  const double s = s_in_cell(i, k, theta);
  return s >= perimeter_ ? 0.0 : s;
}

double PolygonCorrespondence::theta_of_s(double s) const {
  const auto& th = kernel_.theta();
  if (s <= 0.0) return th[0];
  if (s >= perimeter_) return th[0] + kTwoPi;
  auto vit = std::upper_bound(vertex_s_.begin(), vertex_s_.end(), s);
  const int k = static_cast<int>(vit - vertex_s_.begin()) - 1;
  if (s == vertex_s_[k]) return th[k];
  const auto b = table_.s.begin() + static_cast<std::ptrdiff_t>(side_begin_[k]);
  const auto e = table_.s.begin() + static_cast<std::ptrdiff_t>(side_begin_[k + 1]);
  const std::size_t i = static_cast<std::size_t>(std::upper_bound(b, e, s) - table_.s.begin()) - 1;
  double lo = table_.theta[i], hi = table_.theta[i + 1];
  const double s_lo = table_.s[i], s_hi = table_.s[i + 1];
  if (s == s_lo) return lo;
  const double fac = side_fix_[k] * scale_;
  double t = lo + (hi - lo) * (s - s_lo) / (s_hi - s_lo);
  for (int it = 0; it < 60; ++it) {
    const double f = s_in_cell(i, k, t) - s;
    if (f > 0.0) hi = t; else lo = t;
    const double df = fac * kernel_.abs_on_circle(t);
    double tn = (df > 0.0 && std::isfinite(df)) ? t - f / df : 0.5 * (lo + hi);
    if (!(tn > lo && tn < hi)) tn = 0.5 * (lo + hi);
    if (std::abs(tn - t) <= 1e-15 * std::max(1.0, std::abs(t)) || hi - lo <= 1e-15 * std::max(1.0, std::abs(t))) {
      return tn;
    }
    t = tn;
  }
  return t;
}

LmResult levenberg_marquardt(const std::function<std::vector<double>(const std::vector<double>&)>& fn,
                             std::vector<double> x0, double tol, int max_iter) {
  const std::size_t n = x0.size();
  LmResult res;
  res.x = std::move(x0);
  std::vector<double> r = fn(res.x);
  const std::size_t m = r.size();
  auto norm2 = [](const std::vector<double>& v) {
    double s = 0.0;
    for (double e : v) s += e * e;
    return s;
  };
  auto norm_inf = [](const std::vector<double>& v) {
    double s = 0.0;
    for (double e : v) s = std::max(s, std::abs(e));
    return s;
  };
  double cost = norm2(r);
  double lambda = 1e-3;
  for (int it = 0; it < max_iter; ++it) {
    res.iterations = it;
    if (norm_inf(r) < tol) {
      res.converged = true;
      break;
    }
    Eigen::MatrixXd J(m, n);
    for (std::size_t j = 0; j < n; ++j) {
      std::vector<double> xp = res.x;
      const double h = 1e-7 * std::max(1.0, std::abs(xp[j]));
      xp[j] += h;
      const std::vector<double> rp = fn(xp);
      for (std::size_t i = 0; i < m; ++i) J(i, j) = (rp[i] - r[i]) / h;
    }
    Eigen::VectorXd rv = Eigen::Map<const Eigen::VectorXd>(r.data(), static_cast<Eigen::Index>(m));
    const Eigen::MatrixXd JtJ = J.transpose() * J;
    const Eigen::VectorXd g = J.transpose() * rv;
    bool accepted = false;
    for (int inner = 0; inner < 30 && !accepted; ++inner) {
      Eigen::MatrixXd A = JtJ;
      for (std::size_t j = 0; j < n; ++j) A(j, j) += lambda * std::max(JtJ(j, j), 1e-12);
      const Eigen::VectorXd step = A.ldlt().solve(-g);
      std::vector<double> xn = res.x;
      for (std::size_t j = 0; j < n; ++j) xn[j] += step(static_cast<Eigen::Index>(j));
      std::vector<double> rn;
      try {
        rn = fn(xn);
      } catch (const Error&) {
        lambda *= 10.0;
        continue;
      }
      const double cn = norm2(rn);
      if (std::isfinite(cn) && cn < cost) {
        res.x = std::move(xn);
        r = std::move(rn);
        cost = cn;
        lambda = std::max(lambda / 5.0, 1e-12);
        accepted = true;
      } else {
        lambda *= 4.0;
      }
    }
    if (!accepted) break;
  }
  res.residual = norm_inf(r);
  if (res.residual < tol) res.converged = true;
  return res;
}

}  // namespace convpot::detail
