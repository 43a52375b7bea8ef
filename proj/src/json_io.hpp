#pragma once

#include <complex>
#include <vector>

#include "json.hpp"

#include "convpot/geometry.hpp"

namespace convpot::io {

using nlohmann::json;

inline json point(cplx z) { return json::array({z.real(), z.imag()}); }

inline cplx to_point(const json& j) {
  if (!j.is_array() || j.size() != 2) throw Error(ErrorCode::ConfigError, "expected [x, y] point");
  return {j.at(0).get<double>(), j.at(1).get<double>()};
}

inline json points(const std::vector<cplx>& v) {
  json a = json::array();
  for (const auto& z : v) a.push_back(point(z));
  return a;
}

inline std::vector<cplx> to_points(const json& j) {
  std::vector<cplx> v;
  for (const auto& e : j) v.push_back(to_point(e));
  return v;
}

/// Domain literal: {"kind":"polygon","vertices":[[x,y],...]},
/// {"kind":"regular_polygon","n":N}, {"kind":"ellipse","center":[x,y],
/// "a":..,"b":..,"rotation":..} or {"kind":"disk","center":[x,y],"radius":r}.
inline DomainSpec domain_from_json(const json& j) {
  try {
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "polygon") return DomainSpec::polygon(to_points(j.at("vertices")));
    if (kind == "regular_polygon") {
      const int n = j.at("n").get<int>();
      if (n < 3) throw Error(ErrorCode::Degenerate, "regular_polygon needs n >= 3");
      return DomainSpec::regular_polygon(n);
    }
    const cplx c = j.contains("center") ? to_point(j.at("center")) : cplx{0.0, 0.0};
    if (kind == "ellipse")
      return DomainSpec::ellipse(c, j.at("a").get<double>(), j.at("b").get<double>(), j.value("rotation", 0.0));
    if (kind == "disk") return DomainSpec::disk(c, j.value("radius", 1.0));
    throw Error(ErrorCode::ConfigError, "unknown domain kind '" + kind + "'");
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ConfigError, std::string("domain literal: ") + e.what());
  }
}

inline json domain_to_json(const DomainSpec& s) {
  switch (s.kind) {
    case DomainKind::Polygon: return {{"kind", "polygon"}, {"vertices", points(s.vertices)}};
    case DomainKind::Ellipse:
      return {{"kind", "ellipse"}, {"center", point(s.center)}, {"a", s.semi_major},
              {"b", s.semi_minor}, {"rotation", s.rotation}};
    case DomainKind::Disk: return {{"kind", "disk"}, {"center", point(s.center)}, {"radius", s.radius}};
  }
  return {};
}

}  // namespace convpot::io
