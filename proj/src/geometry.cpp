#include "isoline/geometry.hpp"

#include <algorithm>

namespace isoline::geo {

double signed_ring_area_m2(std::span<const Point> ring) {
  if (ring.size() < 3) return 0.0;
  double mean_lat = 0.0;
  for (const auto& p : ring) mean_lat += p.second;
  mean_lat /= static_cast<double>(ring.size());
  const LocalFrame frame{mean_lat};
  // Offsets from the first vertex keep the products small.
  const Point o = frame.to_meters(ring[0]);
  double twice = 0.0;
  for (std::size_t i = 0; i + 1 < ring.size(); ++i) {
    const Point a = frame.to_meters(ring[i]);
    const Point b = frame.to_meters(ring[i + 1]);
    twice += (a.first - o.first) * (b.second - o.second) - (b.first - o.first) * (a.second - o.second);
  }
  return 0.5 * twice;
}

double point_segment_distance(const Point& p, const Point& a, const Point& b) {
  const double dx = b.first - a.first;
  const double dy = b.second - a.second;
  const double len2 = dx * dx + dy * dy;
  double t = 0.0;
  if (len2 > 0.0) {
    t = std::clamp(((p.first - a.first) * dx + (p.second - a.second) * dy) / len2, 0.0, 1.0);
  }
  return std::hypot(p.first - (a.first + t * dx), p.second - (a.second + t * dy));
}

namespace {

bool on_segment(const Point& a, const Point& b, const Point& p) {
  return std::min(a.first, b.first) <= p.first && p.first <= std::max(a.first, b.first) &&
         std::min(a.second, b.second) <= p.second && p.second <= std::max(a.second, b.second);
}

int sign(double v) { return (v > 0.0) - (v < 0.0); }

}  // namespace

bool segments_intersect(const Point& a, const Point& b, const Point& c, const Point& d) {
  const bool shares = a == c || a == d || b == c || b == d;
  const int o1 = sign(orient(a, b, c));
  const int o2 = sign(orient(a, b, d));
  const int o3 = sign(orient(c, d, a));
  const int o4 = sign(orient(c, d, b));
  if (shares) {
    // Only collinear overlap beyond the shared endpoint counts.
    if (o1 != 0 || o2 != 0) return false;
    const Point s = (a == c || a == d) ? a : b;
    const Point other_ab = s == a ? b : a;
    const Point other_cd = s == c ? d : c;
    const double dot = (other_ab.first - s.first) * (other_cd.first - s.first) +
                       (other_ab.second - s.second) * (other_cd.second - s.second);
    return dot > 0.0;
  }
  if (o1 != o2 && o3 != o4) return true;
  if (o1 == 0 && on_segment(a, b, c)) return true;
  if (o2 == 0 && on_segment(a, b, d)) return true;
  if (o3 == 0 && on_segment(c, d, a)) return true;
  if (o4 == 0 && on_segment(c, d, b)) return true;
  return false;
}

}  // namespace isoline::geo
