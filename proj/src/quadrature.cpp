#include "convpot/quadrature.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <tuple>

#include "convpot/error.hpp"

namespace convpot {

namespace {

Rule1D compute_gauss_legendre(int n) {
  Rule1D r;
  r.x.resize(n);
  r.w.resize(n);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    // refresh derivative at the converged node
    double p0 = 1.0, p1 = x;
    for (int k = 2; k <= n; ++k) {
      const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    dp = n * (x * p1 - p0) / (x * x - 1.0);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    r.x[i] = -x;
    r.x[n - 1 - i] = x;
    r.w[i] = w;
    r.w[n - 1 - i] = w;
  }
  if (n % 2 == 1) r.x[n / 2] = 0.0;
  return r;
}

Rule1D compute_gauss_jacobi(int n, double a, double b) {
  // Golub-Welsch on the symmetric Jacobi matrix of the monic recurrence.
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(n, n);
  for (int k = 0; k < n; ++k) {
    const double s = 2.0 * k + a + b;
    double diag;
    if (k == 0) {
      diag = (b - a) / (a + b + 2.0);
    } else {
      diag = (b * b - a * a) / (s * (s + 2.0));
    }
    J(k, k) = diag;
    if (k + 1 < n) {
      const double kk = k + 1.0;
      const double t = 2.0 * kk + a + b;
      double off = 4.0 * kk * (kk + a) * (kk + b) * (kk + a + b) / (t * t * (t + 1.0) * (t - 1.0));
      J(k, k + 1) = J(k + 1, k) = std::sqrt(off);
    }
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J);
  const double mu0 = std::exp((a + b + 1.0) * std::log(2.0) + std::lgamma(a + 1.0) +
                              std::lgamma(b + 1.0) - std::lgamma(a + b + 2.0));
  Rule1D r;
  r.x.resize(n);
  r.w.resize(n);
  for (int i = 0; i < n; ++i) {
    r.x[i] = es.eigenvalues()(i);
    const double v0 = es.eigenvectors()(0, i);
    r.w[i] = mu0 * v0 * v0;
  }
  return r;
}

std::mutex g_cache_mutex;

}  // namespace

const Rule1D& gauss_legendre(int n) {
  if (n < 1) throw Error(ErrorCode::InvalidArgument, "gauss_legendre: n < 1");
  static std::map<int, Rule1D> cache;
  std::lock_guard lock(g_cache_mutex);
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, compute_gauss_legendre(n)).first;
  return it->second;
}

const Rule1D& gauss_jacobi(int n, double alpha, double beta) {
  if (n < 1 || alpha <= -1.0 || beta <= -1.0)
    throw Error(ErrorCode::InvalidArgument, "gauss_jacobi: bad parameters");
  static std::map<std::tuple<int, double, double>, Rule1D> cache;
  std::lock_guard lock(g_cache_mutex);
  const auto key = std::make_tuple(n, alpha, beta);
  auto it = cache.find(key);
  if (it == cache.end()) it = cache.emplace(key, compute_gauss_jacobi(n, alpha, beta)).first;
  return it->second;
}

Rule1D left_singular_rule(int n, double gamma, double h) {
  const Rule1D& gj = gauss_jacobi(n, 0.0, gamma);
  Rule1D r;
  r.x.resize(n);
  r.w.resize(n);
  const double scale = std::pow(0.5 * h, gamma + 1.0);
  for (int i = 0; i < n; ++i) {
    r.x[i] = 0.5 * h * (1.0 + gj.x[i]);
    r.w[i] = scale * gj.w[i];
  }
  return r;
}

std::vector<PlanarNode> triangle_rule(std::complex<double> a, std::complex<double> b,
                                      std::complex<double> c, int degree) {
  const int k = std::max(1, (degree + 2) / 2);
  // u in [0,1] carries the Jacobian factor u: Gauss-Jacobi (0,1) on [-1,1].
  const Rule1D& ru = gauss_jacobi(k, 0.0, 1.0);
  const Rule1D& rv = gauss_legendre(k);
  const double area2 = std::abs(((b - a) * std::conj(c - a)).imag());
  std::vector<PlanarNode> out;
  out.reserve(static_cast<std::size_t>(k) * k);
  for (int i = 0; i < k; ++i) {
    const double u = 0.5 * (1.0 + ru.x[i]);
    const double wu = ru.w[i] / 4.0;  // dx -> du and (1+x)/2 = u
    for (int j = 0; j < k; ++j) {
      const double v = 0.5 * (1.0 + rv.x[j]);
      const double wv = 0.5 * rv.w[j];
      const std::complex<double> z = (1.0 - u) * a + u * ((1.0 - v) * b + v * c);
      out.push_back({z, area2 * wu * wv});
    }
  }
  return out;
}

std::vector<PlanarNode> ellipse_rule(std::complex<double> center, double a, double b,
                                     double rotation, int degree) {
  const int kr = std::max(1, (degree + 3) / 2);
  const int kt = degree + 1;
  const Rule1D& rr = gauss_jacobi(kr, 0.0, 1.0);
  const std::complex<double> rot = std::polar(1.0, rotation);
  std::vector<PlanarNode> out;
  out.reserve(static_cast<std::size_t>(kr) * kt);
  for (int i = 0; i < kr; ++i) {
    const double r = 0.5 * (1.0 + rr.x[i]);
    const double wr = rr.w[i] / 4.0;
    for (int j = 0; j < kt; ++j) {
      const double t = 2.0 * std::numbers::pi * j / kt;
      const std::complex<double> z = center + rot * std::complex<double>(a * r * std::cos(t), b * r * std::sin(t));
      out.push_back({z, a * b * wr * 2.0 * std::numbers::pi / kt});
    }
  }
  return out;
}

}  // namespace convpot
