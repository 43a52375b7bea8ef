#pragma once

#include <complex>
#include <span>
#include <vector>

#include "convpot/error.hpp"

namespace convpot {

using cplx = std::complex<double>;

enum class DomainKind { Polygon, Ellipse, Disk };

/// Raw description of a candidate domain, before validation.
struct DomainSpec {
  DomainKind kind = DomainKind::Disk;
  std::vector<cplx> vertices;  // polygon, counter-clockwise
  cplx center{0.0, 0.0};       // ellipse / disk
  double semi_major = 1.0;     // ellipse a
  double semi_minor = 1.0;     // ellipse b
  double rotation = 0.0;       // ellipse, radians
  double radius = 1.0;         // disk

  static DomainSpec polygon(std::vector<cplx> vertices);
  static DomainSpec ellipse(cplx center, double a, double b, double rotation = 0.0);
  static DomainSpec disk(cplx center, double radius);
  /// Vertices at the N-th roots of unity.
  static DomainSpec regular_polygon(int n);
};

/// Throws Error(NonConvex | Degenerate) when the description is unusable.
void validate(const DomainSpec& spec);

struct BoundaryPoint {
  double s = 0.0;
  cplx z;
};

/// Counter-clockwise arc starting at arc-length parameter `start` and running
/// for `length` (0 <= length <= perimeter).
struct BoundaryArc {
  double start = 0.0;
  double length = 0.0;

  double end(double perimeter) const;
  bool wraps(double perimeter) const { return start + length > perimeter; }
  BoundaryArc complement(double perimeter) const;
  bool contains(double s, double perimeter) const;
};

enum class Location { Interior, Boundary, Exterior };

const char* to_string(Location loc) noexcept;

/// A validated bounded convex domain with an arc-length parameterization of
/// its boundary. Immutable after construction.
class ConvexDomain {
 public:
  explicit ConvexDomain(DomainSpec spec);

  const DomainSpec& spec() const { return spec_; }
  DomainKind kind() const { return spec_.kind; }
  const std::vector<cplx>& vertices() const { return spec_.vertices; }

  double perimeter() const { return perimeter_; }
  double diameter() const { return diameter_; }
  double area() const { return area_; }
  cplx centroid() const { return centroid_; }

  /// Arc-length positions of the polygon vertices (vertex k sits at
  /// vertex_s()[k]); empty for smooth domains.
  const std::vector<double>& vertex_s() const { return vertex_s_; }

  /// Reduces s modulo the perimeter into [0, perimeter).
  double wrap(double s) const;

  BoundaryPoint boundary_point(double s) const;
  /// Unit tangent at s (right-sided at polygon vertices).
  cplx tangent(double s) const;
  double dist_to_boundary(cplx z) const;
  /// Nearest boundary point to z.
  BoundaryPoint nearest_boundary_point(cplx z) const;
  /// Boundary band is |dist| <= rel_tol * diam L.
  Location contains(cplx z, double rel_tol = 1e-10) const;

  /// Ellipse eccentric-anomaly <-> arc-length conversions (ellipse only).
  double ellipse_param_of_s(double s) const;
  double ellipse_s_of_param(double t) const;
  double ellipse_anchor_param() const { return ellipse_t0_; }

  /// Stable identifier of the geometric description (for caching).
  std::string hash() const;

 private:
  double ellipse_arc(double t0, double t1) const;
  bool inside_open(cplx z) const;

  DomainSpec spec_;
  double perimeter_ = 0.0;
  double diameter_ = 0.0;
  double area_ = 0.0;
  cplx centroid_;
  std::vector<double> vertex_s_;
  // ellipse arc-length table on a uniform eccentric-anomaly grid from t0
  double ellipse_t0_ = 0.0;
  std::vector<double> ellipse_table_s_;
};

}  // namespace convpot
