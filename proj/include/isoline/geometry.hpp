#pragma once

#include <cmath>
#include <numbers>
#include <span>
#include <utility>

namespace isoline::geo {

using Point = std::pair<double, double>;  // (lon, lat) or planar (x, y)

inline constexpr double kEarthRadiusM = 6371008.8;
inline constexpr double kMetersPerDegree = kEarthRadiusM * std::numbers::pi / 180.0;

/// Equirectangular length in meters, scaled by cos of the segment's mean
/// latitude.
inline double segment_length_m(const Point& a, const Point& b) {
  const double mean_lat = 0.5 * (a.second + b.second) * std::numbers::pi / 180.0;
  const double dx = (b.first - a.first) * kMetersPerDegree * std::cos(mean_lat);
  const double dy = (b.second - a.second) * kMetersPerDegree;
  return std::hypot(dx, dy);
}

inline double polyline_length_m(std::span<const Point> pts) {
  double len = 0.0;
  for (std::size_t i = 1; i < pts.size(); ++i) len += segment_length_m(pts[i - 1], pts[i]);
  return len;
}

/// Projects lon/lat to local planar meters around a reference latitude.
struct LocalFrame {
  double ref_lat_deg = 0.0;

  Point to_meters(const Point& p) const {
    const double k = kMetersPerDegree * std::cos(ref_lat_deg * std::numbers::pi / 180.0);
    return {p.first * k, p.second * kMetersPerDegree};
  }
};

/// Shoelace area of a closed ring in square meters (positive for CCW in
/// lon/lat), using a frame at the ring's mean latitude.
double signed_ring_area_m2(std::span<const Point> ring);

double point_segment_distance(const Point& p, const Point& a, const Point& b);

/// Twice the signed area of (a, b, c).
inline double orient(const Point& a, const Point& b, const Point& c) {
  return (b.first - a.first) * (c.second - a.second) - (b.second - a.second) * (c.first - a.first);
}

/// True when segments ab and cd share any point other than a common
/// endpoint.
bool segments_intersect(const Point& a, const Point& b, const Point& c, const Point& d);

}  // namespace isoline::geo
