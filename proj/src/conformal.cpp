#include "convpot/conformal.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "json_io.hpp"
#include "sc_kernel.hpp"

namespace convpot {

namespace {

using detail::PolygonCorrespondence;
using detail::ScKernel;

constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * kPi;
constexpr int kSmoothTable = 4096;
constexpr int kLaurentSamples = 512;
constexpr double kLaurentRadius = 1.5;

/// beta_k = (exterior turning angle at vertex k) / pi; sums to 2.
std::vector<double> vertex_turning(const std::vector<cplx>& v) {
  const std::size_t n = v.size();
  std::vector<double> beta(n);
  for (std::size_t k = 0; k < n; ++k) {
    const cplx in = v[k] - v[(k + n - 1) % n];
    const cplx out = v[(k + 1) % n] - v[k];
    beta[k] = std::arg(out / in) / kPi;
  }
  return beta;
}

/// Regular polygon about its centroid: returns true and fills the unit
/// directions of the vertices.
bool regular_directions(const ConvexDomain& d, std::vector<double>* angles) {
  const auto& v = d.vertices();
  const std::size_t n = v.size();
  const cplx c = d.centroid();
  const double r0 = std::abs(v[0] - c);
  const double a0 = std::arg(v[0] - c);
  angles->assign(n, 0.0);
  for (std::size_t k = 0; k < n; ++k) {
    if (std::abs(std::abs(v[k] - c) - r0) > 1e-12 * r0) return false;
    const double expect = a0 + kTwoPi * k / n;
    const cplx rel = (v[k] - c) * std::polar(1.0, -expect);
    if (std::abs(std::arg(rel)) > 1e-12) return false;
    (*angles)[k] = expect;
  }
  return true;
}

/// Gaps from softmax logits (last logit pinned to zero), total 2 pi.
std::vector<double> gaps_from_logits(const double* y, std::size_t n) {
  std::vector<double> g(n);
  double mx = 0.0;
  for (std::size_t i = 0; i + 1 < n; ++i) mx = std::max(mx, y[i]);
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    g[i] = std::exp(((i + 1 < n) ? y[i] : 0.0) - mx);
    sum += g[i];
  }
  for (auto& e : g) e *= kTwoPi / sum;
  return g;
}

std::vector<double> logits_from_gaps(const std::vector<double>& g) {
  std::vector<double> y(g.size() - 1);
  for (std::size_t i = 0; i + 1 < g.size(); ++i) y[i] = std::log(g[i] / g.back());
  return y;
}

std::vector<double> thetas_from(double theta0, const std::vector<double>& gaps) {
  std::vector<double> th(gaps.size());
  th[0] = theta0;
  for (std::size_t i = 1; i < gaps.size(); ++i) th[i] = th[i - 1] + gaps[i - 1];
  return th;
}

CorrespondenceTable copy_table(const detail::BoundaryTable& t) { return {t.s, t.theta}; }

double unwrap_into(double theta, double base) {
  double rel = std::fmod(theta - base, kTwoPi);
  if (rel < 0.0) rel += kTwoPi;
  return base + rel;
}

/// theta span of the arc under a monotone correspondence.
template <class ThetaOfS>
double theta_span(const ThetaOfS& theta_of_s, const BoundaryArc& arc, double perimeter) {
  if (arc.length <= 0.0) return 0.0;
  if (arc.length >= perimeter) return kTwoPi;
  const double t0 = theta_of_s(arc.start);
  const double e = arc.start + arc.length;
  const double t1 = (e <= perimeter) ? theta_of_s(e) : theta_of_s(e - perimeter) + kTwoPi;
  return std::clamp(t1 - t0, 0.0, kTwoPi);
}

}  // namespace

double disk_harmonic_measure(cplx u, double a, double len) {
  if (len <= 0.0) return 0.0;
  if (len >= kTwoPi) return 1.0;
  const cplx p = std::polar(1.0, a) - u;
  const cplx q = std::polar(1.0, a + len) - u;
  // angle subtended at u, known to lie in [len/2, pi + len/2]
  double phi = std::atan2((q * std::conj(p)).imag(), (q * std::conj(p)).real());
  const double mid = 0.5 * len + 0.5 * kPi;
  if (std::abs(phi + kTwoPi - mid) < std::abs(phi - mid)) phi += kTwoPi;
  return std::clamp(phi / kPi - len / kTwoPi, 0.0, 1.0);
}

// ---------------------------------------------------------------- exterior

ExteriorMap::ExteriorMap(const ConvexDomain& domain) : domain_(domain) {}
ExteriorMap::ExteriorMap(const ExteriorMap& o)
    : domain_(o.domain_),
      capacity_(o.capacity_),
      b0_(o.b0_),
      prevertex_theta_(o.prevertex_theta_),
      exponents_(o.exponents_),
      kernel_(o.kernel_ ? std::make_unique<ScKernel>(*o.kernel_) : nullptr),
      corr_(o.corr_ ? std::make_unique<PolygonCorrespondence>(*o.corr_) : nullptr),
      table_(o.table_) {}
ExteriorMap& ExteriorMap::operator=(const ExteriorMap& o) {
  if (this != &o) *this = ExteriorMap(o);
  return *this;
}
ExteriorMap::ExteriorMap(ExteriorMap&&) noexcept = default;
ExteriorMap& ExteriorMap::operator=(ExteriorMap&&) noexcept = default;
ExteriorMap::~ExteriorMap() = default;

ExteriorMap ExteriorMap::build(const ConvexDomain& domain) {
  ExteriorMap m(domain);
  const auto& spec = domain.spec();
  switch (domain.kind()) {
    case DomainKind::Disk: {
      m.capacity_ = spec.radius;
      m.b0_ = spec.center;
      for (int i = 0; i <= kSmoothTable; ++i) {
        const double s = domain.perimeter() * i / kSmoothTable;
        m.table_.s.push_back(s);
        m.table_.theta.push_back(s / spec.radius);
      }
      return m;
    }
    case DomainKind::Ellipse: {
      m.capacity_ = 0.5 * (spec.semi_major + spec.semi_minor);
      m.b0_ = spec.center;
      const double t0 = domain.ellipse_anchor_param();
      for (int i = 0; i <= kSmoothTable; ++i) {
        const double t = t0 + kTwoPi * i / kSmoothTable;
        m.table_.s.push_back(i == kSmoothTable ? domain.perimeter() : domain.ellipse_s_of_param(t));
        m.table_.theta.push_back(t);
      }
      return m;
    }
    case DomainKind::Polygon: break;
  }

  const auto& v = domain.vertices();
  const std::size_t n = v.size();
  m.exponents_ = vertex_turning(v);
  std::vector<double> reg;
  if (regular_directions(domain, &reg)) {
    m.prevertex_theta_ = reg;
  } else {
    // Unknowns: softmax logits of the prevertex gaps, first prevertex at 0.
    // Residuals: log side-length ratios against the target polygon.
    std::vector<double> target(n);
    for (std::size_t k = 0; k < n; ++k) target[k] = std::abs(v[(k + 1) % n] - v[k]);
    auto residual = [&](const std::vector<double>& y) {
      const auto th = thetas_from(0.0, gaps_from_logits(y.data(), n));
      ScKernel ker(ScKernel::Flavor::Exterior, th, m.exponents_);
      std::vector<double> len(n);
      for (std::size_t k = 0; k < n; ++k) {
        const double t1 = (k + 1 < n) ? th[k + 1] : th[0] + kTwoPi;
        len[k] = ker.arc_length(th[k], t1, static_cast<int>(k), static_cast<int>((k + 1) % n));
      }
      std::vector<double> r(n - 1);
      for (std::size_t k = 1; k < n; ++k) r[k - 1] = std::log(len[k] / len[0]) - std::log(target[k] / target[0]);
      return r;
    };
    std::vector<double> g0(n);
    for (std::size_t k = 0; k < n; ++k) g0[k] = 0.5 * (m.exponents_[k] + m.exponents_[(k + 1) % n]);
    const auto lm = detail::levenberg_marquardt(residual, logits_from_gaps(g0), 1e-13, 200);
    if (!lm.converged && lm.residual > 1e-10)
      throw Error(ErrorCode::ParameterSolveFailed,
                  "exterior SC prevertices: residual " + std::to_string(lm.residual) + " after " +
                      std::to_string(lm.iterations) + " iterations");
    m.prevertex_theta_ = thetas_from(0.0, gaps_from_logits(lm.x.data(), n));
  }
  // Fix the rotation so that Psi'(inf) = C is real and positive.
  {
    ScKernel ker(ScKernel::Flavor::Exterior, m.prevertex_theta_, m.exponents_);
    const double t1 = m.prevertex_theta_[1];
    const double len = ker.arc_length(m.prevertex_theta_[0], t1, 0, 1);
    const double tm = 0.5 * (m.prevertex_theta_[0] + t1);
    const cplx dir = ker.integrand(std::polar(1.0, tm)) * cplx(0.0, 1.0) * std::polar(1.0, tm);
    const cplx side = dir / std::abs(dir) * len;
    const cplx c = (v[1] - v[0]) / side;
    const double rot = std::arg(c);
    for (auto& t : m.prevertex_theta_) t += rot;
    m.capacity_ = std::abs(c);
  }
  m.finish_polygon();
  m.b0_ = m.laurent_coefficients(1)[0];
  return m;
}

void ExteriorMap::finish_polygon() {
  kernel_ = std::make_unique<ScKernel>(ScKernel::Flavor::Exterior, prevertex_theta_, exponents_);
  corr_ = std::make_unique<PolygonCorrespondence>(*kernel_, capacity_, domain_.vertex_s(), domain_.perimeter());
  table_ = copy_table(corr_->table());
}

cplx ExteriorMap::eval_inverse(cplx w) const {
  if (std::abs(w) < 1.0 - 1e-13) throw Error(ErrorCode::OutsideDomainOfDefinition, "Psi needs |w| >= 1");
  const auto& spec = domain_.spec();
  switch (domain_.kind()) {
    case DomainKind::Disk: return spec.center + spec.radius * w;
    case DomainKind::Ellipse:
      return spec.center + std::polar(1.0, spec.rotation) *
                               (0.5 * ((spec.semi_major + spec.semi_minor) * w + (spec.semi_major - spec.semi_minor) / w));
    case DomainKind::Polygon: break;
  }
  const int k = kernel_->nearest_prevertex(w);
  const cplx wk = kernel_->prevertices()[k];
  if (w == wk) return domain_.vertices()[k];
  return domain_.vertices()[k] + capacity_ * kernel_->segment(wk, w, k, -1);
}

cplx ExteriorMap::inverse_derivative(cplx w) const {
  const auto& spec = domain_.spec();
  switch (domain_.kind()) {
    case DomainKind::Disk: return spec.radius;
    case DomainKind::Ellipse:
      return std::polar(1.0, spec.rotation) *
             (0.5 * ((spec.semi_major + spec.semi_minor) - (spec.semi_major - spec.semi_minor) / (w * w)));
    case DomainKind::Polygon: break;
  }
  return capacity_ * kernel_->integrand(w);
}

cplx ExteriorMap::eval(cplx z) const {
  const auto& spec = domain_.spec();
  switch (domain_.kind()) {
    case DomainKind::Disk: {
      const cplx w = (z - spec.center) / spec.radius;
      if (std::abs(w) < 1.0 - 1e-12) throw Error(ErrorCode::OutsideDomainOfDefinition, "Phi needs z outside G");
      return w;
    }
    case DomainKind::Ellipse: {
      const double a = spec.semi_major, b = spec.semi_minor;
      const cplx zeta = (z - spec.center) * std::polar(1.0, -spec.rotation);
      const cplx root = std::sqrt(zeta * zeta - (a * a - b * b));
      cplx w1 = (zeta + root) / (a + b), w2 = (zeta - root) / (a + b);
      const cplx w = (std::abs(w1) >= std::abs(w2)) ? w1 : w2;
      if (std::abs(w) < 1.0 - 1e-12) throw Error(ErrorCode::OutsideDomainOfDefinition, "Phi needs z outside G");
      return w;
    }
    case DomainKind::Polygon: break;
  }
  const Location loc = domain_.contains(z, 1e-13);
  if (loc == Location::Interior) throw Error(ErrorCode::OutsideDomainOfDefinition, "Phi needs z outside G");
  if (loc == Location::Boundary) return std::polar(1.0, theta_of_s(domain_.nearest_boundary_point(z).s));

  const double diam = domain_.diameter();
  const cplx c = domain_.centroid();
  const cplx dir = (z - c) / std::abs(z - c);
  const cplx zf = c + (std::abs(z - c) + 2.0 * diam) * dir;
  auto newton = [&](cplx w, cplx target, int iters) {
    for (int it = 0; it < iters; ++it) {
      const cplx f = eval_inverse(w) - target;
      if (std::abs(f) <= 1e-14 * diam) break;
      cplx step = f / inverse_derivative(w);
      cplx wn = w - step;
      for (int h = 0; h < 40 && std::abs(wn) < 1.0; ++h) {
        step *= 0.5;
        wn = w - step;
      }
      w = wn;
    }
    return w;
  };
  cplx w = newton((zf - b0_) / capacity_, zf, 60);
  // continuation zf -> z along the outward ray, which stays in the exterior
  constexpr int kSteps = 16;
  const cplx dz = (z - zf) / static_cast<double>(kSteps);
  for (int i = 0; i < kSteps; ++i) {
    const cplx k1 = dz / inverse_derivative(w);
    const cplx k2 = dz / inverse_derivative(w + 0.5 * k1);
    const cplx k3 = dz / inverse_derivative(w + 0.5 * k2);
    const cplx k4 = dz / inverse_derivative(w + k3);
    w += (k1 + 2.0 * k2 + 2.0 * k3 + k4) / 6.0;
    if (std::abs(w) < 1.0) w /= std::abs(w);
  }
  w = newton(w, z, 60);
  if (std::abs(eval_inverse(w) - z) > 1e-10 * diam)
    throw Error(ErrorCode::NoConvergence, "exterior map inversion did not converge");
  return w;
}

double ExteriorMap::theta_of_s(double s) const {
  s = (s == domain_.perimeter()) ? s : domain_.wrap(s);
  switch (domain_.kind()) {
    case DomainKind::Disk: return s / domain_.spec().radius;
    case DomainKind::Ellipse:
      if (s >= domain_.perimeter()) return domain_.ellipse_anchor_param() + kTwoPi;
      return unwrap_into(domain_.ellipse_param_of_s(s), domain_.ellipse_anchor_param());
    case DomainKind::Polygon: break;
  }
  return corr_->theta_of_s(s);
}

double ExteriorMap::s_of_theta(double theta) const {
  switch (domain_.kind()) {
    case DomainKind::Disk:
      return domain_.wrap(theta * domain_.spec().radius);
    case DomainKind::Ellipse:
      return domain_.ellipse_s_of_param(theta);
    case DomainKind::Polygon: break;
  }
  return corr_->s_of_theta(theta);
}

double ExteriorMap::equilibrium_measure(const BoundaryArc& arc) const {
  const double span = theta_span([this](double s) { return theta_of_s(s); }, arc, domain_.perimeter());
  return span / kTwoPi;
}

std::vector<cplx> ExteriorMap::laurent_coefficients(int count) const {
  std::vector<cplx> samples(kLaurentSamples);
  for (int m = 0; m < kLaurentSamples; ++m)
    samples[m] = eval_inverse(std::polar(kLaurentRadius, kTwoPi * m / kLaurentSamples));
  std::vector<cplx> b(std::max(count, 0));
  for (int k = 0; k < count; ++k) {
    cplx acc{0.0, 0.0};
    for (int m = 0; m < kLaurentSamples; ++m) {
      // w^k with w on the sampling circle; angle reduced exactly via integer arithmetic
      const long idx = (static_cast<long>(k) * m) % kLaurentSamples;
      acc += samples[m] * std::polar(1.0, kTwoPi * static_cast<double>(idx) / kLaurentSamples);
    }
    b[k] = acc / static_cast<double>(kLaurentSamples) * std::pow(kLaurentRadius, k);
  }
  if (domain_.kind() != DomainKind::Polygon) {
    // closed forms are exact; keep the contour values only as a consistency path
    const auto& spec = domain_.spec();
    std::fill(b.begin(), b.end(), cplx{0.0, 0.0});
    if (count > 0) b[0] = spec.center;
    if (domain_.kind() == DomainKind::Ellipse && count > 1)
      b[1] = std::polar(1.0, spec.rotation) * (0.5 * (spec.semi_major - spec.semi_minor)) *
             std::polar(1.0, spec.rotation);
  }
  return b;
}

std::string ExteriorMap::to_json() const {
  io::json j;
  j["type"] = "exterior_map";
  j["domain"] = io::domain_to_json(domain_.spec());
  j["capacity"] = capacity_;
  j["b0"] = io::point(b0_);
  j["prevertex_theta"] = prevertex_theta_;
  j["exponents"] = exponents_;
  j["table"] = {{"s", table_.s}, {"theta", table_.theta}};
  return j.dump();
}

ExteriorMap ExteriorMap::from_json(const std::string& text) {
  io::json j;
  try {
    j = io::json::parse(text);
  } catch (const io::json::exception& e) {
    throw Error(ErrorCode::ConfigError, e.what());
  }
  ExteriorMap m(ConvexDomain(io::domain_from_json(j.at("domain"))));
  m.capacity_ = j.at("capacity").get<double>();
  m.b0_ = io::to_point(j.at("b0"));
  m.prevertex_theta_ = j.at("prevertex_theta").get<std::vector<double>>();
  m.exponents_ = j.at("exponents").get<std::vector<double>>();
  if (m.domain_.kind() == DomainKind::Polygon) {
    m.finish_polygon();
  } else {
    m.table_.s = j.at("table").at("s").get<std::vector<double>>();
    m.table_.theta = j.at("table").at("theta").get<std::vector<double>>();
  }
  return m;
}

double capacity(const ConvexDomain& domain) { return ExteriorMap::build(domain).capacity(); }

// ---------------------------------------------------------------- interior

InteriorMap::InteriorMap(const ConvexDomain& domain, cplx anchor) : domain_(domain), anchor_(anchor) {}
InteriorMap::InteriorMap(const InteriorMap& o)
    : domain_(o.domain_),
      anchor_(o.anchor_),
      scale_(o.scale_),
      prevertex_theta_(o.prevertex_theta_),
      exponents_(o.exponents_),
      kernel_(o.kernel_ ? std::make_unique<ScKernel>(*o.kernel_) : nullptr),
      corr_(o.corr_ ? std::make_unique<PolygonCorrespondence>(*o.corr_) : nullptr),
      table_(o.table_) {}
InteriorMap& InteriorMap::operator=(const InteriorMap& o) {
  if (this != &o) *this = InteriorMap(o);
  return *this;
}
InteriorMap::InteriorMap(InteriorMap&&) noexcept = default;
InteriorMap& InteriorMap::operator=(InteriorMap&&) noexcept = default;
InteriorMap::~InteriorMap() = default;

InteriorMap InteriorMap::build(const ConvexDomain& domain) { return build(domain, domain.centroid()); }

InteriorMap InteriorMap::build(const ConvexDomain& domain, cplx anchor) {
  if (domain.kind() == DomainKind::Ellipse)
    throw Error(ErrorCode::InvalidArgument, "interior maps are provided for polygons and disks only");
  if (domain.contains(anchor) != Location::Interior)
    throw Error(ErrorCode::InvalidArgument, "interior map anchor must lie inside the domain");
  InteriorMap m(domain, anchor);
  if (domain.kind() == DomainKind::Disk) {
    const auto& spec = domain.spec();
    const cplx alpha = (anchor - spec.center) / spec.radius;
    m.scale_ = spec.radius * (1.0 - std::norm(alpha));
    for (int i = 0; i <= kSmoothTable; ++i) {
      const double s = domain.perimeter() * i / kSmoothTable;
      m.table_.s.push_back(s);
      m.table_.theta.push_back(m.theta_of_s(s));
    }
    return m;
  }

  const auto& v = domain.vertices();
  const std::size_t n = v.size();
  m.exponents_ = vertex_turning(v);
  for (auto& e : m.exponents_) e = -e;  // interior angle exponent alpha_k - 1
  const double diam = domain.diameter();
  std::vector<double> reg;
  if (regular_directions(domain, &reg) && std::abs(anchor - domain.centroid()) <= 1e-14 * diam) {
    m.prevertex_theta_ = reg;
    ScKernel ker(ScKernel::Flavor::Interior, reg, m.exponents_);
    const cplx seg = ker.segment(0.0, ker.prevertices()[0], -1, 0);
    m.scale_ = std::abs(v[0] - anchor) / std::abs(seg);
  } else {
    // Unknowns: theta_0, gap logits, log C. Residuals: psi(u_k) - v_k.
    auto unpack = [n](const std::vector<double>& x) {
      return thetas_from(x[0], gaps_from_logits(x.data() + 1, n));
    };
    auto residual = [&](const std::vector<double>& x) {
      const auto th = unpack(x);
      ScKernel ker(ScKernel::Flavor::Interior, th, m.exponents_);
      const double c = std::exp(x[n]);
      std::vector<double> r(2 * n);
      for (std::size_t k = 0; k < n; ++k) {
        const cplx p = anchor + c * ker.segment(0.0, ker.prevertices()[k], -1, static_cast<int>(k)) - v[k];
        r[2 * k] = p.real() / diam;
        r[2 * k + 1] = p.imag() / diam;
      }
      return r;
    };
    std::vector<double> th0(n);
    th0[0] = std::arg(v[0] - anchor);
    for (std::size_t k = 1; k < n; ++k) th0[k] = unwrap_into(std::arg(v[k] - anchor), th0[k - 1]);
    std::vector<double> g0(n);
    for (std::size_t k = 0; k < n; ++k) g0[k] = ((k + 1 < n) ? th0[k + 1] : th0[0] + kTwoPi) - th0[k];
    std::vector<double> x0{th0[0]};
    for (double y : logits_from_gaps(g0)) x0.push_back(y);
    x0.push_back(std::log(std::sqrt(domain.area() / kPi)));
    const auto lm = detail::levenberg_marquardt(residual, x0, 1e-13, 300);
    if (!lm.converged && lm.residual > 1e-10)
      throw Error(ErrorCode::ParameterSolveFailed,
                  "interior SC prevertices: residual " + std::to_string(lm.residual) + " after " +
                      std::to_string(lm.iterations) + " iterations");
    m.prevertex_theta_ = unpack(lm.x);
    m.scale_ = std::exp(lm.x[n]);
  }
  m.finish_polygon();
  return m;
}

void InteriorMap::finish_polygon() {
  kernel_ = std::make_unique<ScKernel>(ScKernel::Flavor::Interior, prevertex_theta_, exponents_);
  corr_ = std::make_unique<PolygonCorrespondence>(*kernel_, scale_, domain_.vertex_s(), domain_.perimeter());
  table_ = copy_table(corr_->table());
}

cplx InteriorMap::eval_inverse(cplx u) const {
  if (std::abs(u) > 1.0 + 1e-13) throw Error(ErrorCode::OutsideDomainOfDefinition, "psi needs |u| <= 1");
  if (domain_.kind() == DomainKind::Disk) {
    const auto& spec = domain_.spec();
    const cplx alpha = (anchor_ - spec.center) / spec.radius;
    return spec.center + spec.radius * (u + alpha) / (1.0 + std::conj(alpha) * u);
  }
  if (std::abs(u) <= 0.5) return anchor_ + scale_ * kernel_->segment(0.0, u, -1, -1);
  const int k = kernel_->nearest_prevertex(u);
  const cplx uk = kernel_->prevertices()[k];
  if (u == uk) return domain_.vertices()[k];
  return domain_.vertices()[k] + scale_ * kernel_->segment(uk, u, k, -1);
}

cplx InteriorMap::inverse_derivative(cplx u) const {
  if (domain_.kind() == DomainKind::Disk) {
    const auto& spec = domain_.spec();
    const cplx alpha = (anchor_ - spec.center) / spec.radius;
    const cplx den = 1.0 + std::conj(alpha) * u;
    return spec.radius * (1.0 - std::norm(alpha)) / (den * den);
  }
  return scale_ * kernel_->integrand(u);
}

cplx InteriorMap::eval(cplx z) const {
  if (domain_.kind() == DomainKind::Disk) {
    const auto& spec = domain_.spec();
    const cplx alpha = (anchor_ - spec.center) / spec.radius;
    const cplx zeta = (z - spec.center) / spec.radius;
    if (std::abs(zeta) > 1.0 + 1e-12) throw Error(ErrorCode::OutsideDomainOfDefinition, "phi needs z in G");
    return (zeta - alpha) / (1.0 - std::conj(alpha) * zeta);
  }
  const Location loc = domain_.contains(z, 1e-13);
  if (loc == Location::Exterior) throw Error(ErrorCode::OutsideDomainOfDefinition, "phi needs z in G");
  if (loc == Location::Boundary) return std::polar(1.0, theta_of_s(domain_.nearest_boundary_point(z).s));
  const double diam = domain_.diameter();
  cplx u{0.0, 0.0};
  constexpr int kSteps = 16;
  const cplx dz = (z - anchor_) / static_cast<double>(kSteps);
  auto clamp_disk = [](cplx w) { return std::abs(w) >= 1.0 ? w / std::abs(w) * (1.0 - 1e-14) : w; };
  for (int i = 0; i < kSteps; ++i) {
    const cplx k1 = dz / inverse_derivative(u);
    const cplx k2 = dz / inverse_derivative(clamp_disk(u + 0.5 * k1));
    const cplx k3 = dz / inverse_derivative(clamp_disk(u + 0.5 * k2));
    const cplx k4 = dz / inverse_derivative(clamp_disk(u + k3));
    u = clamp_disk(u + (k1 + 2.0 * k2 + 2.0 * k3 + k4) / 6.0);
  }
  double res = INFINITY;
  for (int it = 0; it < 80; ++it) {
    const cplx f = eval_inverse(u) - z;
    res = std::abs(f);
    if (res <= 1e-14 * diam) break;
    cplx step = f / inverse_derivative(u);
    cplx un = u - step;
    for (int h = 0; h < 60 && std::abs(un) >= 1.0; ++h) {
      step *= 0.5;
      un = u - step;
    }
    if (std::abs(eval_inverse(un) - z) > res) {
      // damp until the residual decreases
      int h = 0;
      while (h++ < 30 && std::abs(eval_inverse(un) - z) > res) {
        step *= 0.5;
        un = u - step;
      }
    }
    u = un;
  }
  if (res > 1e-10 * diam) throw Error(ErrorCode::NoConvergence, "interior map inversion did not converge");
  return u;
}

double InteriorMap::theta_of_s(double s) const {
  s = (s == domain_.perimeter()) ? s : domain_.wrap(s);
  if (domain_.kind() == DomainKind::Disk) {
    const auto& spec = domain_.spec();
    const double base = std::arg(eval((spec.center + spec.radius) ));
    if (s <= 0.0) return base;
    if (s >= domain_.perimeter()) return base + kTwoPi;
    // Moebius images of boundary points advance monotonically.
    const double th = std::arg(eval(spec.center + std::polar(spec.radius, s / spec.radius)));
    double rel = std::fmod(th - base, kTwoPi);
    if (rel < 0.0) rel += kTwoPi;
    return base + rel;
  }
  return corr_->theta_of_s(s);
}

double InteriorMap::s_of_theta(double theta) const {
  if (domain_.kind() == DomainKind::Disk) {
    const auto& spec = domain_.spec();
    const cplx z = eval_inverse(std::polar(1.0, theta));
    double a = std::arg(z - spec.center);
    if (a < 0.0) a += kTwoPi;
    return domain_.wrap(a * spec.radius);
  }
  return corr_->s_of_theta(theta);
}

double InteriorMap::harmonic_measure_at_image(cplx u, const BoundaryArc& arc) const {
  const double span = theta_span([this](double s) { return theta_of_s(s); }, arc, domain_.perimeter());
  if (span >= kTwoPi) return 1.0;
  return disk_harmonic_measure(u, theta_of_s(arc.start), span);
}

double InteriorMap::harmonic_measure(cplx z, const BoundaryArc& arc, double rel_tol) const {
  const Location loc = domain_.contains(z, rel_tol);
  if (loc == Location::Exterior) throw Error(ErrorCode::OutsideDomainOfDefinition, "harmonic measure needs z in closed G");
  if (loc == Location::Boundary) return arc.contains(domain_.nearest_boundary_point(z).s, domain_.perimeter()) ? 1.0 : 0.0;
  return harmonic_measure_at_image(eval(z), arc);
}

std::string InteriorMap::to_json() const {
  io::json j;
  j["type"] = "interior_map";
  j["domain"] = io::domain_to_json(domain_.spec());
  j["anchor"] = io::point(anchor_);
  j["scale"] = scale_;
  j["prevertex_theta"] = prevertex_theta_;
  j["exponents"] = exponents_;
  return j.dump();
}

InteriorMap InteriorMap::from_json(const std::string& text) {
  io::json j;
  try {
    j = io::json::parse(text);
  } catch (const io::json::exception& e) {
    throw Error(ErrorCode::ConfigError, e.what());
  }
  const ConvexDomain d(io::domain_from_json(j.at("domain")));
  if (d.kind() == DomainKind::Disk) return build(d, io::to_point(j.at("anchor")));
  InteriorMap m(d, io::to_point(j.at("anchor")));
  m.scale_ = j.at("scale").get<double>();
  m.prevertex_theta_ = j.at("prevertex_theta").get<std::vector<double>>();
  m.exponents_ = j.at("exponents").get<std::vector<double>>();
  m.finish_polygon();
  return m;
}

}  // namespace convpot
