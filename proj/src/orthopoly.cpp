#include "convpot/orthopoly.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "json_io.hpp"

namespace convpot {

namespace {

constexpr double kPi = std::numbers::pi;

bool is_integer(double m) { return std::abs(m - std::round(m)) == 0.0; }

/// Region of G where edge k is the nearest edge. For a convex polygon
/// dist(z, L) = min_j d_j(z) with d_j the affine distance to edge line j, so
/// the region is G clipped by the half-planes d_k <= d_j.
std::vector<cplx> nearest_edge_region(const std::vector<cplx>& v, std::size_t k) {
  const std::size_t n = v.size();
  auto line = [&](std::size_t j, cplx z) {
    const cplx t = (v[(j + 1) % n] - v[j]) / std::abs(v[(j + 1) % n] - v[j]);
    return (std::conj(t) * (z - v[j])).imag();
  };
  std::vector<cplx> poly = v;
  for (std::size_t j = 0; j < n && poly.size() >= 3; ++j) {
    if (j == k) continue;
    auto f = [&](cplx z) { return line(k, z) - line(j, z); };
    std::vector<cplx> out;
    for (std::size_t i = 0; i < poly.size(); ++i) {
      const cplx p = poly[i], q = poly[(i + 1) % poly.size()];
      const double fp = f(p), fq = f(q);
      if (fp <= 0.0) out.push_back(p);
      if ((fp < 0.0 && fq > 0.0) || (fp > 0.0 && fq < 0.0)) out.push_back(p + (q - p) * (fp / (fp - fq)));
    }
    poly = std::move(out);
  }
  return poly;
}

/// Collapsed rule on the triangle (a, b, c) for f * dist^m where dist is
/// affine with dist(a) = 0: dist = u ((1-v) db + v dc). The factor u^m is
/// absorbed into the Jacobi rule in u, and v^m (db = 0) or (1-v)^m (dc = 0)
/// into the rule in v.
std::vector<PlanarNode> weighted_triangle_rule(cplx a, cplx b, cplx c, double db, double dc, double m, int degree) {
  const int k = std::max(1, (degree + 2) / 2);
  const Rule1D& ru = gauss_jacobi(k, 0.0, 1.0 + m);
  const double av = (dc == 0.0) ? m : 0.0;
  const double bv = (db == 0.0) ? m : 0.0;
  const Rule1D& rv = (av == 0.0 && bv == 0.0) ? gauss_legendre(k) : gauss_jacobi(k, av, bv);
  const double area2 = std::abs(((b - a) * std::conj(c - a)).imag());
  const double su = std::pow(2.0, -(2.0 + m));
  const double sv = std::pow(2.0, -(1.0 + av + bv));
  std::vector<PlanarNode> out;
  out.reserve(static_cast<std::size_t>(k) * k);
  for (int i = 0; i < k; ++i) {
    const double u = 0.5 * (1.0 + ru.x[i]);
    for (int j = 0; j < k; ++j) {
      const double v = 0.5 * (1.0 + rv.x[j]);
      double g;
      if (db == 0.0) {
        g = std::pow(dc, m);
      } else if (dc == 0.0) {
        g = std::pow(db, m);
      } else {
        g = std::pow((1.0 - v) * db + v * dc, m);
      }
      out.push_back({(1.0 - u) * a + u * ((1.0 - v) * b + v * c), area2 * su * ru.w[i] * sv * rv.w[j] * g});
    }
  }
  return out;
}

std::vector<PlanarNode> polygon_weighted_rule(const ConvexDomain& d, double m, int degree) {
  const auto& v = d.vertices();
  const std::size_t n = v.size();
  std::vector<PlanarNode> nodes;
  for (std::size_t k = 0; k < n; ++k) {
    const auto region = nearest_edge_region(v, k);
    if (region.size() < 3) continue;
    const cplx t = (v[(k + 1) % n] - v[k]) / std::abs(v[(k + 1) % n] - v[k]);
    auto dk = [&](cplx z) { return std::max(0.0, (std::conj(t) * (z - v[k])).imag()); };
    // rotate the region so that it starts at v_k, v_{k+1}
    std::size_t i0 = 0;
    double best = INFINITY;
    for (std::size_t i = 0; i < region.size(); ++i)
      if (std::abs(region[i] - v[k]) < best) best = std::abs(region[i] - v[k]), i0 = i;
    std::vector<cplx> r;
    for (std::size_t i = 0; i < region.size(); ++i) r.push_back(region[(i0 + i) % region.size()]);
    r[0] = v[k];
    r[1] = v[(k + 1) % n];
    for (std::size_t i = 1; i + 1 < r.size(); ++i) {
      const double db = (i == 1) ? 0.0 : dk(r[i]);
      const double dc = dk(r[i + 1]);
      if (std::abs(((r[i] - r[0]) * std::conj(r[i + 1] - r[0])).imag()) <= 1e-15 * d.area()) continue;
      auto tri = weighted_triangle_rule(r[0], r[i], r[i + 1], db, dc, m, degree);
      nodes.insert(nodes.end(), tri.begin(), tri.end());
    }
  }
  return nodes;
}

std::vector<PlanarNode> disk_weighted_rule(cplx center, double r, double m, int degree) {
  const int kr = std::max(1, (degree + 3) / 2 + static_cast<int>(std::ceil(m)));
  const int kt = degree + 1;
  const Rule1D& rr = gauss_jacobi(kr, m, 1.0);
  std::vector<PlanarNode> out;
  out.reserve(static_cast<std::size_t>(kr) * kt);
  const double scale = std::pow(r, m + 2.0) / std::pow(2.0, m + 2.0) * 2.0 * kPi / kt;
  for (int i = 0; i < kr; ++i) {
    const double rho = 0.5 * (1.0 + rr.x[i]);
    for (int j = 0; j < kt; ++j) {
      const double t = 2.0 * kPi * j / kt;
      out.push_back({center + std::polar(r * rho, t), rr.w[i] * scale});
    }
  }
  return out;
}

}  // namespace

InnerProductEngine InnerProductEngine::build(const ConvexDomain& domain, Weight weight, int n_max,
                                             int extra_degree) {
  if (n_max < 0) throw Error(ErrorCode::InvalidArgument, "n_max must be >= 0");
  if (weight.m < 0.0 || !(weight.c > 0.0))
    throw Error(ErrorCode::InvalidArgument, "weight needs m >= 0 and c > 0");
  const int degree = 2 * n_max + 2 + extra_degree;
  InnerProductEngine e(domain, weight, n_max, degree);
  const auto& spec = domain.spec();
  switch (domain.kind()) {
    case DomainKind::Disk:
      if (weight.is_unit()) {
        e.nodes_ = ellipse_rule(spec.center, spec.radius, spec.radius, 0.0, degree);
      } else {
        e.nodes_ = disk_weighted_rule(spec.center, spec.radius, weight.m, degree);
        for (auto& nd : e.nodes_) nd.w *= weight.c;
      }
      return e;
    case DomainKind::Ellipse:
      if (!weight.is_unit())
        throw Error(ErrorCode::InvalidArgument, "dist-power weights are supported on polygons and disks");
      e.nodes_ = ellipse_rule(spec.center, spec.semi_major, spec.semi_minor, spec.rotation, degree);
      return e;
    case DomainKind::Polygon: break;
  }
  const auto& v = domain.vertices();
  const std::size_t n = v.size();
  const cplx c = domain.centroid();
  if (weight.is_unit()) {
    for (std::size_t k = 0; k < n; ++k) {
      auto r = triangle_rule(c, v[k], v[(k + 1) % n], degree);
      e.nodes_.insert(e.nodes_.end(), r.begin(), r.end());
    }
    return e;
  }
  // Integer m: the rule is exact. Otherwise the remaining factor is smooth;
  // raise the order until the weighted mass settles.
  e.nodes_ = polygon_weighted_rule(domain, weight.m, degree);
  if (!is_integer(weight.m)) {
    auto mass = [](const std::vector<PlanarNode>& r) {
      double s = 0.0;
      for (const auto& nd : r) s += nd.w;
      return s;
    };
    int extra = 8;
    for (;; extra *= 2) {
      auto finer = polygon_weighted_rule(domain, weight.m, degree + extra);
      if (std::abs(mass(finer) - mass(e.nodes_)) <= 1e-12 * mass(finer)) break;
      if (extra > 256)
        throw Error(ErrorCode::QuadratureBudgetExceeded,
                    "dist-power weight m = " + std::to_string(weight.m) + " did not settle");
      e.nodes_ = std::move(finer);
    }
  }
  for (auto& nd : e.nodes_) nd.w *= weight.c;
  return e;
}

cplx InnerProductEngine::inner(const std::vector<cplx>& f, const std::vector<cplx>& g) const {
  cplx acc{0.0, 0.0};
  for (std::size_t i = 0; i < nodes_.size(); ++i) acc += nodes_[i].w * f[i] * std::conj(g[i]);
  return acc;
}

double InnerProductEngine::norm2(const std::vector<cplx>& f) const {
  double acc = 0.0;
  for (std::size_t i = 0; i < nodes_.size(); ++i) acc += nodes_[i].w * std::norm(f[i]);
  return acc;
}

double InnerProductEngine::mass() const {
  double acc = 0.0;
  for (const auto& nd : nodes_) acc += nd.w;
  return acc;
}

OrthoSequence orthonormalize(const InnerProductEngine& engine, int n) {
  if (n < 0) throw Error(ErrorCode::InvalidArgument, "degree must be >= 0");
  if (n > engine.n_max())
    throw Error(ErrorCode::InvalidArgument,
                "degree " + std::to_string(n) + " exceeds engine exactness n_max " + std::to_string(engine.n_max()));
  const auto& nodes = engine.nodes();
  const std::size_t m = nodes.size();
  OrthoSequence seq;
  seq.domain_hash_ = engine.domain().hash();
  seq.weight_ = engine.weight();
  seq.quad_degree_ = engine.degree();

  std::vector<std::vector<cplx>> q;
  q.emplace_back(m, cplx{1.0, 0.0});
  const double n0 = std::sqrt(engine.norm2(q[0]));
  for (auto& x : q[0]) x /= n0;
  seq.log_lambda_.push_back(-std::log(n0));

  for (int k = 0; k < n; ++k) {
    std::vector<cplx> w(m);
    for (std::size_t i = 0; i < m; ++i) w[i] = nodes[i].z * q[k][i];
    const double wn = std::sqrt(engine.norm2(w));
    std::vector<cplx> h(k + 2, cplx{0.0, 0.0});
    for (int pass = 0; pass < 2; ++pass) {
      for (int j = 0; j <= k; ++j) {
        const cplx c = engine.inner(w, q[j]);
        h[j] += c;
        for (std::size_t i = 0; i < m; ++i) w[i] -= c * q[j][i];
      }
    }
    const double piv = std::sqrt(engine.norm2(w));
    if (!(piv >= 1e-13 * wn)) throw BreakdownError(k + 1, piv / wn);
    h[k + 1] = piv;
    for (auto& x : w) x /= piv;
    q.push_back(std::move(w));
    seq.hess_.push_back(std::move(h));
    seq.log_lambda_.push_back(seq.log_lambda_.back() - std::log(piv));
  }
  return seq;
}

double OrthoSequence::lambda(int n) const { return std::exp(log_lambda_.at(n)); }

std::vector<cplx> OrthoSequence::eval_all(int n, cplx z) const {
  if (n < 0 || n > degree()) throw Error(ErrorCode::InvalidArgument, "degree out of range");
  std::vector<cplx> q(n + 1);
  q[0] = std::exp(log_lambda_[0]);
  for (int k = 0; k < n; ++k) {
    cplx acc = z * q[k];
    const auto& h = hess_[k];
    for (int j = 0; j <= k; ++j) acc -= h[j] * q[j];
    q[k + 1] = acc / h[k + 1].real();
  }
  return q;
}

double OrthoSequence::sup_norm(int n, const ConvexDomain& domain) const {
  return boundary_sup(domain, [&](cplx z) { return std::abs(eval(n, z)); });
}

double OrthoSequence::leading_product(int n, double cap) const {
  return std::exp(log_lambda_.at(n) + n * std::log(cap));
}

std::vector<cplx> OrthoSequence::monomial_coeffs(int n) const {
  if (n < 0 || n > degree()) throw Error(ErrorCode::InvalidArgument, "degree out of range");
  std::vector<std::vector<cplx>> c;
  c.push_back({std::exp(log_lambda_[0])});
  for (int k = 0; k < n; ++k) {
    std::vector<cplx> next(k + 2, cplx{0.0, 0.0});
    for (int i = 0; i <= k; ++i) next[i + 1] += c[k][i];
    for (int j = 0; j <= k; ++j)
      for (std::size_t i = 0; i < c[j].size(); ++i) next[i] -= hess_[k][j] * c[j][i];
    for (auto& x : next) x /= hess_[k][k + 1].real();
    c.push_back(std::move(next));
  }
  return c[n];
}

double OrthoSequence::gram_residual(const InnerProductEngine& engine, int n) const {
  if (n > degree()) throw Error(ErrorCode::InvalidArgument, "degree out of range");
  const auto& nodes = engine.nodes();
  std::vector<std::vector<cplx>> vals(n + 1, std::vector<cplx>(nodes.size()));
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const auto q = eval_all(n, nodes[i].z);
    for (int k = 0; k <= n; ++k) vals[k][i] = q[k];
  }
  double worst = 0.0;
  for (int j = 0; j <= n; ++j)
    for (int k = 0; k <= j; ++k) {
      const cplx g = engine.inner(vals[j], vals[k]) - (j == k ? 1.0 : 0.0);
      worst = std::max(worst, std::abs(g));
    }
  return worst;
}

std::string OrthoSequence::to_json() const {
  io::json j;
  j["type"] = "ortho_sequence";
  j["degree"] = degree();
  j["domain_hash"] = domain_hash_;
  j["weight"] = {{"m", weight_.m}, {"c", weight_.c}};
  j["quadrature_degree"] = quad_degree_;
  j["log_lambda"] = log_lambda_;
  io::json cols = io::json::array();
  for (const auto& col : hess_) cols.push_back(io::points(col));
  j["hessenberg"] = cols;
  return j.dump();
}

OrthoSequence OrthoSequence::from_json(const std::string& text) {
  OrthoSequence s;
  try {
    const auto j = io::json::parse(text);
    s.domain_hash_ = j.at("domain_hash").get<std::string>();
    s.weight_ = {j.at("weight").at("m").get<double>(), j.at("weight").at("c").get<double>()};
    s.quad_degree_ = j.at("quadrature_degree").get<int>();
    s.log_lambda_ = j.at("log_lambda").get<std::vector<double>>();
    for (const auto& col : j.at("hessenberg")) s.hess_.push_back(io::to_points(col));
  } catch (const io::json::exception& e) {
    throw Error(ErrorCode::ConfigError, std::string("ortho sequence JSON: ") + e.what());
  }
  if (s.hess_.size() + 1 != s.log_lambda_.size())
    throw Error(ErrorCode::ConfigError, "ortho sequence JSON: inconsistent sizes");
  return s;
}

std::vector<BoundaryPoint> boundary_sample(const ConvexDomain& domain, int per_side) {
  std::vector<BoundaryPoint> out;
  if (domain.kind() == DomainKind::Polygon) {
    const auto& vs = domain.vertex_s();
    const std::size_t n = vs.size();
    for (std::size_t k = 0; k < n; ++k) {
      const double s0 = vs[k];
      const double s1 = (k + 1 < n) ? vs[k + 1] : domain.perimeter();
      for (int i = 0; i < per_side; ++i) {
        const double s = s0 + (s1 - s0) * i / per_side;
        out.push_back(i == 0 ? BoundaryPoint{s0, domain.vertices()[k]} : domain.boundary_point(s));
      }
    }
    return out;
  }
  const int m = 4 * per_side;
  for (int i = 0; i < m; ++i) out.push_back(domain.boundary_point(domain.perimeter() * i / m));
  return out;
}

double boundary_sup(const ConvexDomain& domain, const std::function<double(cplx)>& f, int per_side) {
  const auto pts = boundary_sample(domain, per_side);
  const std::size_t m = pts.size();
  std::vector<double> val(m);
  for (std::size_t i = 0; i < m; ++i) val[i] = f(pts[i].z);
  double best = *std::max_element(val.begin(), val.end());
  // polish the largest discrete local maxima
  std::vector<std::size_t> peaks;
  for (std::size_t i = 0; i < m; ++i) {
    const double l = val[(i + m - 1) % m], r = val[(i + 1) % m];
    if (val[i] >= l && val[i] >= r) peaks.push_back(i);
  }
  std::sort(peaks.begin(), peaks.end(), [&](std::size_t a, std::size_t b) { return val[a] > val[b]; });
  if (peaks.size() > 8) peaks.resize(8);
  const double per = domain.perimeter();
  const double g = 0.5 * (std::sqrt(5.0) - 1.0);
  for (std::size_t i : peaks) {
    double a = (i == 0) ? pts[m - 1].s - per : pts[i - 1].s;
    double b = (i + 1 == m) ? pts[0].s + per : pts[i + 1].s;
    auto fs = [&](double s) { return f(domain.boundary_point(domain.wrap(s)).z); };
    double x1 = b - g * (b - a), x2 = a + g * (b - a);
    double f1 = fs(x1), f2 = fs(x2);
    for (int it = 0; it < 60 && b - a > 1e-14 * per; ++it) {
      if (f1 < f2) {
        a = x1, x1 = x2, f1 = f2, x2 = a + g * (b - a), f2 = fs(x2);
      } else {
        b = x2, x2 = x1, f2 = f1, x1 = b - g * (b - a), f1 = fs(x1);
      }
    }
    best = std::max({best, f1, f2});
  }
  return best;
}

}  // namespace convpot
