#include "convpot/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <numbers>
#include <string>

#include "convpot/quadrature.hpp"

namespace convpot {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr int kEllipseTable = 512;

double cross(cplx a, cplx b) { return a.real() * b.imag() - a.imag() * b.real(); }

double seg_dist(cplx z, cplx a, cplx b, double* param = nullptr) {
  const cplx d = b - a;
  double t = ((z - a) * std::conj(d)).real() / std::norm(d);
  t = std::clamp(t, 0.0, 1.0);
  if (param) *param = t;
  return std::abs(z - (a + t * d));
}

double poly_diameter(const std::vector<cplx>& v) {
  double d = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i)
    for (std::size_t j = i + 1; j < v.size(); ++j) d = std::max(d, std::abs(v[i] - v[j]));
  return d;
}

}  // namespace

const char* to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::Ok: return "Ok";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::NonConvex: return "NonConvex";
    case ErrorCode::Degenerate: return "Degenerate";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::ParameterSolveFailed: return "ParameterSolveFailed";
    case ErrorCode::OutsideDomainOfDefinition: return "OutsideDomainOfDefinition";
    case ErrorCode::QuadratureBudgetExceeded: return "QuadratureBudgetExceeded";
    case ErrorCode::BreakdownAtDegree: return "BreakdownAtDegree";
    case ErrorCode::EigenFailure: return "EigenFailure";
    case ErrorCode::ExteriorZero: return "ExteriorZero";
    case ErrorCode::GridMismatch: return "GridMismatch";
    case ErrorCode::SingularEvaluation: return "SingularEvaluation";
    case ErrorCode::LawsonStall: return "LawsonStall";
    case ErrorCode::InsufficientData: return "InsufficientData";
    case ErrorCode::ConfigError: return "ConfigError";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

const char* to_string(Location loc) noexcept {
  switch (loc) {
    case Location::Interior: return "interior";
    case Location::Boundary: return "boundary";
    case Location::Exterior: return "exterior";
  }
  return "unknown";
}

DomainSpec DomainSpec::polygon(std::vector<cplx> vertices) {
  DomainSpec s;
  s.kind = DomainKind::Polygon;
  s.vertices = std::move(vertices);
  return s;
}

DomainSpec DomainSpec::ellipse(cplx center, double a, double b, double rotation) {
  DomainSpec s;
  s.kind = DomainKind::Ellipse;
  s.center = center;
  s.semi_major = a;
  s.semi_minor = b;
  s.rotation = rotation;
  return s;
}

DomainSpec DomainSpec::disk(cplx center, double radius) {
  DomainSpec s;
  s.kind = DomainKind::Disk;
  s.center = center;
  s.radius = radius;
  return s;
}

DomainSpec DomainSpec::regular_polygon(int n) {
  std::vector<cplx> v;
  for (int k = 0; k < n; ++k) v.push_back(std::polar(1.0, kTwoPi * k / n));
  // exact values on the axes keep symmetric configurations bit-symmetric
  for (auto& z : v) {
    if (std::abs(z.real()) < 1e-15) z.real(0.0);
    if (std::abs(z.imag()) < 1e-15) z.imag(0.0);
  }
  return polygon(std::move(v));
}

void validate(const DomainSpec& spec) {
  switch (spec.kind) {
    case DomainKind::Disk:
      if (!(spec.radius > 0.0) || !std::isfinite(spec.radius))
        throw Error(ErrorCode::Degenerate, "disk radius must be positive");
      return;
    case DomainKind::Ellipse:
      if (!(spec.semi_minor > 0.0) || !std::isfinite(spec.semi_major))
        throw Error(ErrorCode::Degenerate, "ellipse semi-axes must be positive");
      if (spec.semi_major < spec.semi_minor)
        throw Error(ErrorCode::Degenerate, "ellipse requires a >= b");
      return;
    case DomainKind::Polygon: break;
  }
  const auto& v = spec.vertices;
  const std::size_t n = v.size();
  if (n < 3) throw Error(ErrorCode::Degenerate, "polygon needs at least 3 vertices");
  for (const auto& z : v)
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
      throw Error(ErrorCode::Degenerate, "non-finite vertex");
  const double diam = poly_diameter(v);
  if (!(diam > 0.0)) throw Error(ErrorCode::Degenerate, "all vertices coincide");
  for (std::size_t i = 0; i < n; ++i)
    if (std::abs(v[(i + 1) % n] - v[i]) <= 1e-12 * diam)
      throw Error(ErrorCode::Degenerate, "repeated vertex at index " + std::to_string(i));
  // Collinearity first: a straight angle is degenerate, not a convexity failure.
  for (std::size_t i = 0; i < n; ++i) {
    const cplx a = v[(i + n - 1) % n], b = v[i], c = v[(i + 1) % n];
    const double cr = cross(b - a, c - b);
    if (std::abs(cr) <= 1e-12 * std::abs(b - a) * std::abs(c - b))
      throw Error(ErrorCode::Degenerate, "collinear vertices around index " + std::to_string(i));
  }
  double turning = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const cplx a = v[(i + n - 1) % n], b = v[i], c = v[(i + 1) % n];
    if (cross(b - a, c - b) < 0.0)
      throw Error(ErrorCode::NonConvex, "reflex or clockwise turn at vertex " + std::to_string(i));
    turning += std::arg((c - b) / (b - a));
  }
  if (std::abs(turning - kTwoPi) > 1e-9)
    throw Error(ErrorCode::NonConvex, "vertex chain winds more than once");
}

double BoundaryArc::end(double perimeter) const {
  double e = start + length;
  if (e >= perimeter) e -= perimeter;
  return e;
}

BoundaryArc BoundaryArc::complement(double perimeter) const {
  return BoundaryArc{end(perimeter), perimeter - length};
}

bool BoundaryArc::contains(double s, double perimeter) const {
  double rel = s - start;
  if (rel < 0.0) rel += perimeter;
  if (rel >= perimeter) rel -= perimeter;
  return rel <= length;
}

ConvexDomain::ConvexDomain(DomainSpec spec) : spec_(std::move(spec)) {
  validate(spec_);
  switch (spec_.kind) {
    case DomainKind::Disk: {
      const double r = spec_.radius;
      perimeter_ = kTwoPi * r;
      diameter_ = 2.0 * r;
      area_ = std::numbers::pi * r * r;
      centroid_ = spec_.center;
      break;
    }
    case DomainKind::Ellipse: {
      const double a = spec_.semi_major, b = spec_.semi_minor;
      diameter_ = 2.0 * a;
      area_ = std::numbers::pi * a * b;
      centroid_ = spec_.center;
      // anchor: boundary point on the ray from the center in the +x direction
      ellipse_t0_ = std::atan2(a * std::sin(-spec_.rotation), b * std::cos(-spec_.rotation));
      ellipse_table_s_.resize(kEllipseTable + 1);
      ellipse_table_s_[0] = 0.0;
      for (int i = 0; i < kEllipseTable; ++i) {
        const double t0 = ellipse_t0_ + kTwoPi * i / kEllipseTable;
        const double t1 = ellipse_t0_ + kTwoPi * (i + 1) / kEllipseTable;
        ellipse_table_s_[i + 1] = ellipse_table_s_[i] + ellipse_arc(t0, t1);
      }
      perimeter_ = ellipse_table_s_.back();
      break;
    }
    case DomainKind::Polygon: {
      const auto& v = spec_.vertices;
      const std::size_t n = v.size();
      vertex_s_.resize(n);
      double s = 0.0, a2 = 0.0;
      cplx c6{0.0, 0.0};
      for (std::size_t i = 0; i < n; ++i) {
        vertex_s_[i] = s;
        const cplx p = v[i], q = v[(i + 1) % n];
        s += std::abs(q - p);
        const double cr = cross(p, q);
        a2 += cr;
        c6 += (p + q) * cr;
      }
      perimeter_ = s;
      area_ = 0.5 * a2;
      centroid_ = c6 / (3.0 * a2);
      diameter_ = poly_diameter(v);
      break;
    }
  }
}

double ConvexDomain::ellipse_arc(double t0, double t1) const {
  const double a = spec_.semi_major, b = spec_.semi_minor;
  const Rule1D& g = gauss_legendre(16);
  const double h = 0.5 * (t1 - t0), m = 0.5 * (t1 + t0);
  double acc = 0.0;
  for (std::size_t i = 0; i < g.x.size(); ++i) {
    const double t = m + h * g.x[i];
    const double st = std::sin(t), ct = std::cos(t);
    acc += g.w[i] * std::sqrt(a * a * st * st + b * b * ct * ct);
  }
  return acc * h;
}

double ConvexDomain::wrap(double s) const {
  double r = std::fmod(s, perimeter_);
  if (r < 0.0) r += perimeter_;
  if (r >= perimeter_) r = 0.0;
  return r;
}

double ConvexDomain::ellipse_s_of_param(double t) const {
  double rel = std::fmod(t - ellipse_t0_, kTwoPi);
  if (rel < 0.0) rel += kTwoPi;
  const double step = kTwoPi / kEllipseTable;
  int i = std::min(kEllipseTable - 1, static_cast<int>(rel / step));
  const double ti = ellipse_t0_ + i * step;
  return ellipse_table_s_[i] + ellipse_arc(ti, ellipse_t0_ + rel);
}

double ConvexDomain::ellipse_param_of_s(double s) const {
  s = wrap(s);
  auto it = std::upper_bound(ellipse_table_s_.begin(), ellipse_table_s_.end(), s);
  int i = std::clamp(static_cast<int>(it - ellipse_table_s_.begin()) - 1, 0, kEllipseTable - 1);
  const double step = kTwoPi / kEllipseTable;
  const double base = ellipse_t0_ + i * step;
  double lo = base, hi = base + step;
  const double s_lo = ellipse_table_s_[i];
  const double a = spec_.semi_major, b = spec_.semi_minor;
  double t = lo + step * (s - s_lo) / (ellipse_table_s_[i + 1] - s_lo);
  for (int it_n = 0; it_n < 50; ++it_n) {
    const double f = s_lo + ellipse_arc(base, t) - s;
    if (f > 0) hi = t; else lo = std::max(lo, t);
    const double st = std::sin(t), ct = std::cos(t);
    const double dt = f / std::sqrt(a * a * st * st + b * b * ct * ct);
    double tn = t - dt;
    if (tn <= lo || tn >= hi) tn = 0.5 * (lo + hi);
    if (std::abs(tn - t) < 1e-15 * (1.0 + std::abs(t))) {
      t = tn;
      break;
    }
    t = tn;
  }
  return t;
}

BoundaryPoint ConvexDomain::boundary_point(double s) const {
  s = wrap(s);
  switch (spec_.kind) {
    case DomainKind::Disk:
      return {s, spec_.center + std::polar(spec_.radius, s / spec_.radius)};
    case DomainKind::Ellipse: {
      const double t = ellipse_param_of_s(s);
      const cplx local(spec_.semi_major * std::cos(t), spec_.semi_minor * std::sin(t));
      return {s, spec_.center + std::polar(1.0, spec_.rotation) * local};
    }
    case DomainKind::Polygon: {
      const auto& v = spec_.vertices;
      const std::size_t n = v.size();
      auto it = std::upper_bound(vertex_s_.begin(), vertex_s_.end(), s);
      const std::size_t k = static_cast<std::size_t>(it - vertex_s_.begin()) - 1;
      const cplx a = v[k], b = v[(k + 1) % n];
      const double len = std::abs(b - a);
      return {s, a + (b - a) * ((s - vertex_s_[k]) / len)};
    }
  }
  return {s, {}};
}

cplx ConvexDomain::tangent(double s) const {
  s = wrap(s);
  switch (spec_.kind) {
    case DomainKind::Disk:
      return cplx(0.0, 1.0) * std::polar(1.0, s / spec_.radius);
    case DomainKind::Ellipse: {
      const double t = ellipse_param_of_s(s);
      const cplx d(-spec_.semi_major * std::sin(t), spec_.semi_minor * std::cos(t));
      return std::polar(1.0, spec_.rotation) * d / std::abs(d);
    }
    case DomainKind::Polygon: {
      const auto& v = spec_.vertices;
      auto it = std::upper_bound(vertex_s_.begin(), vertex_s_.end(), s);
      const std::size_t k = static_cast<std::size_t>(it - vertex_s_.begin()) - 1;
      const cplx d = v[(k + 1) % v.size()] - v[k];
      return d / std::abs(d);
    }
  }
  return {};
}

BoundaryPoint ConvexDomain::nearest_boundary_point(cplx z) const {
  switch (spec_.kind) {
    case DomainKind::Disk: {
      const cplx d = z - spec_.center;
      double ang = std::abs(d) > 0.0 ? std::arg(d) : 0.0;
      if (ang < 0.0) ang += kTwoPi;
      return boundary_point(ang * spec_.radius);
    }
    case DomainKind::Polygon: {
      const auto& v = spec_.vertices;
      const std::size_t n = v.size();
      double best = INFINITY, best_s = 0.0;
      for (std::size_t k = 0; k < n; ++k) {
        double t;
        const double d = seg_dist(z, v[k], v[(k + 1) % n], &t);
        if (d < best) {
          best = d;
          best_s = vertex_s_[k] + t * std::abs(v[(k + 1) % n] - v[k]);
        }
      }
      return boundary_point(best_s);
    }
    case DomainKind::Ellipse: {
      // Foot point in the ellipse frame; reduce to the first quadrant.
      const double a = spec_.semi_major, b = spec_.semi_minor;
      const cplx p = (z - spec_.center) * std::polar(1.0, -spec_.rotation);
      const double x = std::abs(p.real()), y = std::abs(p.imag());
      auto d2 = [&](double t) {
        const double dx = x - a * std::cos(t), dy = y - b * std::sin(t);
        return dx * dx + dy * dy;
      };
      // f(t) = derivative of d2/2 up to sign
      auto f = [&](double t) {
        return (a * a - b * b) * std::sin(t) * std::cos(t) - x * a * std::sin(t) + y * b * std::cos(t);
      };
      auto df = [&](double t) {
        return (a * a - b * b) * std::cos(2.0 * t) - x * a * std::cos(t) - y * b * std::sin(t);
      };
      constexpr int kSamples = 64;
      double t_best = 0.0, v_best = INFINITY;
      for (int i = 0; i <= kSamples; ++i) {
        const double t = 0.5 * std::numbers::pi * i / kSamples;
        if (d2(t) < v_best) v_best = d2(t), t_best = t;
      }
      const double h = 0.5 * std::numbers::pi / kSamples;
      double lo = std::max(0.0, t_best - h), hi = std::min(0.5 * std::numbers::pi, t_best + h);
      double t = t_best;
      // d2' = -2 f: a stationary point is bracketed when f changes sign on [lo, hi]
      if (f(lo) * f(hi) < 0.0) {
        bool converged = false;
        for (int it = 0; it < 100; ++it) {
          const double fv = f(t);
          if (fv == 0.0) {
            converged = true;
            break;
          }
          if (f(lo) * fv < 0.0) hi = t; else lo = t;
          const double dfv = df(t);
          double tn = (dfv != 0.0) ? t - fv / dfv : 0.5 * (lo + hi);
          if (!(tn > lo && tn < hi)) tn = 0.5 * (lo + hi);
          if (std::abs(tn - t) < 1e-15 || hi - lo < 1e-15) {
            t = tn;
            converged = true;
            break;
          }
          t = tn;
        }
        if (!converged) throw Error(ErrorCode::NoConvergence, "ellipse foot-point iteration cap");
      }
      const double tx = (p.real() >= 0.0) ? t : std::numbers::pi - t;
      const double tt = (p.imag() >= 0.0) ? tx : -tx;
      const cplx local(a * std::cos(tt), b * std::sin(tt));
      return {ellipse_s_of_param(tt), spec_.center + std::polar(1.0, spec_.rotation) * local};
    }
  }
  return {};
}

double ConvexDomain::dist_to_boundary(cplx z) const {
  switch (spec_.kind) {
    case DomainKind::Disk:
      return std::abs(spec_.radius - std::abs(z - spec_.center));
    case DomainKind::Polygon: {
      const auto& v = spec_.vertices;
      double best = INFINITY;
      for (std::size_t k = 0; k < v.size(); ++k)
        best = std::min(best, seg_dist(z, v[k], v[(k + 1) % v.size()]));
      return best;
    }
    case DomainKind::Ellipse:
      return std::abs(z - nearest_boundary_point(z).z);
  }
  return 0.0;
}

bool ConvexDomain::inside_open(cplx z) const {
  switch (spec_.kind) {
    case DomainKind::Disk:
      return std::abs(z - spec_.center) < spec_.radius;
    case DomainKind::Ellipse: {
      const cplx p = (z - spec_.center) * std::polar(1.0, -spec_.rotation);
      const double u = p.real() / spec_.semi_major, v = p.imag() / spec_.semi_minor;
      return u * u + v * v < 1.0;
    }
    case DomainKind::Polygon: {
      const auto& v = spec_.vertices;
      for (std::size_t k = 0; k < v.size(); ++k)
        if (cross(v[(k + 1) % v.size()] - v[k], z - v[k]) <= 0.0) return false;
      return true;
    }
  }
  return false;
}

Location ConvexDomain::contains(cplx z, double rel_tol) const {
  if (dist_to_boundary(z) <= rel_tol * diameter_) return Location::Boundary;
  return inside_open(z) ? Location::Interior : Location::Exterior;
}

std::string ConvexDomain::hash() const {
  // FNV-1a over the bit patterns of the description
  std::uint64_t h = 1469598103934665603ULL;
  auto mix = [&](double d) {
    unsigned char bytes[sizeof(double)];
    std::memcpy(bytes, &d, sizeof(double));
    for (unsigned char c : bytes) {
      h ^= c;
      h *= 1099511628211ULL;
    }
  };
  mix(static_cast<double>(spec_.kind));
  for (const auto& z : spec_.vertices) mix(z.real()), mix(z.imag());
  mix(spec_.center.real());
  mix(spec_.center.imag());
  mix(spec_.semi_major);
  mix(spec_.semi_minor);
  mix(spec_.rotation);
  mix(spec_.radius);
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace convpot
