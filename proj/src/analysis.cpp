#include "isoline/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <unordered_map>

#include "isoline/error.hpp"
#include "isoline/geometry.hpp"

namespace isoline {

using geo::Point;

double infer_interval(double elev_a, double elev_b, int lines_crossed) {
  if (lines_crossed < 1) throw Error(ErrorCode::ZeroLines, "at least one line must be crossed");
  if (elev_a == elev_b) throw Error(ErrorCode::EqualElevations, "elevations must differ");
  return std::abs(elev_b - elev_a) / lines_crossed;
}

const char* estimate_kind_name(EstimateKind kind) {
  switch (kind) {
    case EstimateKind::OnContour:
      return "OnContour";
    case EstimateKind::Bracketed:
      return "Bracketed";
    case EstimateKind::Extrapolated:
      return "Extrapolated";
  }
  return "?";
}

namespace {

// Exported coordinates carry 9 fractional digits, so a vertex read back from
// a file may sit up to half a unit in that digit off the grid lines.
constexpr double kCoordinateSlackDeg = 1e-9;

struct Segment {
  Point a;
  Point b;
  // Endpoint of an open line: a ray through it does not cross cleanly.
  bool a_end = false;
  bool b_end = false;
};

std::vector<Segment> segments_at(const ContourSet& cs, double level) {
  std::vector<Segment> out;
  for (const auto& line : cs.lines) {
    if (line.level != level) continue;
    const std::size_t first = out.size();
    for (std::size_t i = 1; i < line.vertices.size(); ++i) {
      if (line.vertices[i - 1] != line.vertices[i]) out.push_back({line.vertices[i - 1], line.vertices[i]});
    }
    if (!line.closed && out.size() > first) {
      out[first].a_end = true;
      out.back().b_end = true;
    }
  }
  return out;
}

// Rotations taking each axis ray direction onto +x. They keep orientation,
// so left/right tests survive the change of frame.
Point rotate(const Point& p, int dir) {
  switch (dir) {
    case 0:
      return p;
    case 1:
      return {-p.first, -p.second};
    case 2:
      return {p.second, -p.first};
    default:
      return {-p.second, p.first};
  }
}

std::optional<bool> above_by_ray(const Point& p, const std::vector<Segment>& segs, int dir) {
  const Point q = rotate(p, dir);
  int count = 0;
  double outer_x = -std::numeric_limits<double>::infinity();
  double outer_dy = 0.0;
  for (const auto& s : segs) {
    const Point a = rotate(s.a, dir);
    const Point b = rotate(s.b, dir);
    if ((s.a_end && a.second == q.second && a.first >= q.first) ||
        (s.b_end && b.second == q.second && b.first >= q.first)) {
      return std::nullopt;
    }
    if ((a.second > q.second) == (b.second > q.second)) continue;
    const double x = a.first + (q.second - a.second) * (b.first - a.first) / (b.second - a.second);
    if (!(x > q.first)) continue;
    ++count;
    if (x > outer_x) {
      outer_x = x;
      outer_dy = b.second - a.second;
    }
  }
  if (count == 0) return std::nullopt;
  // Just past the outermost crossing the ray is on the segment's left when
  // the segment runs downward in the rotated frame. Each crossing back
  // toward the point flips the side.
  const bool boundary_left = outer_dy < 0.0;
  return (count % 2 == 0) ? boundary_left : !boundary_left;
}

// Walks from p to the midpoint of a nearby segment: the side just before
// the midpoint comes from that segment, and every crossing on the way flips
// it. Candidates whose path touches a vertex are skipped.
std::optional<bool> above_by_midpoint_path(const Point& p, const std::vector<Segment>& segs, std::size_t target) {
  const auto& t = segs[target];
  const double side = geo::orient(t.a, t.b, p);
  if (side == 0.0) return std::nullopt;
  const Point m{0.5 * (t.a.first + t.b.first), 0.5 * (t.a.second + t.b.second)};
  int count = 0;
  for (std::size_t i = 0; i < segs.size(); ++i) {
    if (i == target) continue;
    const auto& s = segs[i];
    const double o1 = geo::orient(p, m, s.a);
    const double o2 = geo::orient(p, m, s.b);
    const double o3 = geo::orient(s.a, s.b, p);
    const double o4 = geo::orient(s.a, s.b, m);
    if ((o1 > 0) == (o2 > 0) && o1 != 0 && o2 != 0) continue;
    if ((o3 > 0) == (o4 > 0) && o3 != 0 && o4 != 0) continue;
    if (o1 == 0 || o2 == 0 || o3 == 0 || o4 == 0) return std::nullopt;
    ++count;
  }
  return (side > 0.0) != (count % 2 == 1);
}

bool above_by_nearest(const Point& p, const std::vector<Segment>& segs) {
  std::vector<std::pair<double, std::size_t>> order;
  for (std::size_t i = 0; i < segs.size(); ++i) {
    order.emplace_back(geo::point_segment_distance(p, segs[i].a, segs[i].b), i);
  }
  std::sort(order.begin(), order.end());
  for (const auto& [d, i] : order) {
    if (auto r = above_by_midpoint_path(p, segs, i)) return *r;
  }
  return geo::orient(segs[order[0].second].a, segs[order[0].second].b, p) > 0.0;
}

}  // namespace

bool above_level(std::pair<double, double> point, const ContourSet& contours, double level) {
  const auto segs = segments_at(contours, level);
  if (segs.empty()) throw Error(ErrorCode::NoContours, "no contour at the requested level");
  for (int dir = 0; dir < 4; ++dir) {
    if (auto r = above_by_ray(point, segs, dir)) return *r;
  }
  return above_by_nearest(point, segs);
}

PointEstimate estimate_point_elevation(std::pair<double, double> point, const ContourSet& contours, double interval,
                                       double snap_tolerance_deg) {
  if (contours.lines.empty()) throw Error(ErrorCode::NoContours, "contour set is empty");
  if (!contours.bounds.contains(point.first, point.second)) {
    throw Error(ErrorCode::OutsideBounds, "point lies outside the dataset bounds");
  }
  if (!(interval > 0.0)) throw Error(ErrorCode::NonPositiveInterval, "interval must be positive");

  double nearest = std::numeric_limits<double>::infinity();
  double nearest_level = 0.0;
  std::vector<double> levels;
  for (const auto& line : contours.lines) {
    levels.push_back(line.level);
    const auto& v = line.vertices;
    for (std::size_t i = 0; i < v.size(); ++i) {
      const double d = i == 0 ? std::hypot(point.first - v[0].first, point.second - v[0].second)
                              : geo::point_segment_distance(point, v[i - 1], v[i]);
      if (d < nearest) {
        nearest = d;
        nearest_level = line.level;
      }
    }
  }
  if (nearest <= snap_tolerance_deg) return {nearest_level, EstimateKind::OnContour};

  std::sort(levels.begin(), levels.end());
  levels.erase(std::unique(levels.begin(), levels.end()), levels.end());
  std::optional<std::size_t> highest_above;
  for (std::size_t i = 0; i < levels.size(); ++i) {
    if (above_level(point, contours, levels[i])) highest_above = i;
  }
  if (!highest_above) return {levels.front() - interval, EstimateKind::Extrapolated};
  if (*highest_above + 1 == levels.size()) return {levels.back() + interval, EstimateKind::Extrapolated};
  const double lo = levels[*highest_above];
  const double hi = levels[*highest_above + 1];
  return {lo + 0.5 * (hi - lo), EstimateKind::Bracketed};
}

namespace {

// Uniform bucket grid over segments in a local metric frame.
class SegmentIndex {
 public:
  SegmentIndex(std::vector<Segment> segs, double cell) : segs_(std::move(segs)), cell_(cell) {
    for (std::size_t i = 0; i < segs_.size(); ++i) {
      const auto& s = segs_[i];
      const auto [x0, x1] = std::minmax(s.a.first, s.b.first);
      const auto [y0, y1] = std::minmax(s.a.second, s.b.second);
      for (auto ix = bucket(x0); ix <= bucket(x1); ++ix) {
        for (auto iy = bucket(y0); iy <= bucket(y1); ++iy) buckets_[key(ix, iy)].push_back(i);
      }
      bx0_ = std::min(bx0_, bucket(x0));
      bx1_ = std::max(bx1_, bucket(x1));
      by0_ = std::min(by0_, bucket(y0));
      by1_ = std::max(by1_, bucket(y1));
    }
  }

  bool empty() const { return segs_.empty(); }
  const std::vector<Segment>& segments() const { return segs_; }

  double nearest(const Point& p) const {
    const auto cx = bucket(p.first);
    const auto cy = bucket(p.second);
    double best = std::numeric_limits<double>::infinity();
    if (segs_.empty()) return best;
    for (std::int64_t r = 0;; ++r) {
      for (auto ix = std::max(cx - r, bx0_); ix <= std::min(cx + r, bx1_); ++ix) {
        const bool edge_column = std::abs(ix - cx) == r;
        for (auto iy = std::max(cy - r, by0_); iy <= std::min(cy + r, by1_);
             iy = (edge_column || iy == cy + r) ? iy + 1 : std::max(iy + 1, cy + r)) {
          if (!edge_column && std::abs(iy - cy) != r) continue;
          const auto it = buckets_.find(key(ix, iy));
          if (it == buckets_.end()) continue;
          for (std::size_t i : it->second) {
            best = std::min(best, geo::point_segment_distance(p, segs_[i].a, segs_[i].b));
          }
        }
      }
      // Everything within r cells of p has been seen.
      if (best <= static_cast<double>(r) * cell_) return best;
      if (cx - r <= bx0_ && cx + r >= bx1_ && cy - r <= by0_ && cy + r >= by1_) return best;
    }
  }

  template <typename F>
  void for_each_bucket(F&& f) const {
    for (const auto& [k, list] : buckets_) f(list);
  }

 private:
  std::int64_t bucket(double v) const { return static_cast<std::int64_t>(std::floor(v / cell_)); }
  static std::int64_t key(std::int64_t ix, std::int64_t iy) { return ix * 4000037LL + iy; }

  std::vector<Segment> segs_;
  double cell_;
  std::int64_t bx0_ = std::numeric_limits<std::int64_t>::max();
  std::int64_t bx1_ = std::numeric_limits<std::int64_t>::min();
  std::int64_t by0_ = std::numeric_limits<std::int64_t>::max();
  std::int64_t by1_ = std::numeric_limits<std::int64_t>::min();
  std::unordered_map<std::int64_t, std::vector<std::size_t>> buckets_;
};

double cell_size_for(const std::vector<Segment>& segs) {
  if (segs.empty()) return 1.0;
  double total = 0.0;
  double minx = std::numeric_limits<double>::infinity();
  double maxx = -minx;
  double miny = minx;
  double maxy = -minx;
  for (const auto& s : segs) {
    total += std::hypot(s.b.first - s.a.first, s.b.second - s.a.second);
    for (const Point* p : {&s.a, &s.b}) {
      minx = std::min(minx, p->first);
      maxx = std::max(maxx, p->first);
      miny = std::min(miny, p->second);
      maxy = std::max(maxy, p->second);
    }
  }
  const double mean = total / static_cast<double>(segs.size());
  const double extent = std::max({maxx - minx, maxy - miny, 1e-9});
  // Keep the bucket count bounded for very short segments.
  return std::max({mean * 2.0, extent / 128.0, 1e-9});
}

std::vector<Segment> metric_segments(const ContourSet& cs, std::optional<double> level, const geo::LocalFrame& frame,
                                     std::vector<Point>* vertices = nullptr) {
  std::vector<Segment> out;
  for (const auto& line : cs.lines) {
    if (level && line.level != *level) continue;
    const auto& v = line.vertices;
    for (std::size_t i = 0; i < v.size(); ++i) {
      const Point m = frame.to_meters(v[i]);
      if (vertices) vertices->push_back(m);
      if (i > 0) out.push_back({frame.to_meters(v[i - 1]), m});
    }
    if (v.size() == 1) out.push_back({frame.to_meters(v[0]), frame.to_meters(v[0])});
  }
  return out;
}

double total_length(const ContourSet& cs, double level) {
  double len = 0.0;
  for (const auto& line : cs.lines) {
    if (line.level == level) len += geo::polyline_length_m(line.vertices);
  }
  return len;
}

std::vector<double> line_levels(const ContourSet& cs) {
  std::vector<double> out;
  for (const auto& l : cs.lines) out.push_back(l.level);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

}  // namespace

int count_intersections(const ContourSet& set) {
  double lat_sum = 0.0;
  std::size_t n = 0;
  for (const auto& l : set.lines) {
    for (const auto& v : l.vertices) {
      lat_sum += v.second;
      ++n;
    }
  }
  const geo::LocalFrame frame{n ? lat_sum / static_cast<double>(n) : 0.0};
  auto segs = metric_segments(set, std::nullopt, frame);
  std::erase_if(segs, [](const Segment& s) { return s.a == s.b; });
  const SegmentIndex index(segs, cell_size_for(segs));
  std::vector<std::pair<std::size_t, std::size_t>> hits;
  index.for_each_bucket([&](const std::vector<std::size_t>& list) {
    for (std::size_t x = 0; x < list.size(); ++x) {
      for (std::size_t y = x + 1; y < list.size(); ++y) {
        const auto& s = segs[list[x]];
        const auto& t = segs[list[y]];
        if (geo::segments_intersect(s.a, s.b, t.a, t.b)) {
          hits.emplace_back(std::min(list[x], list[y]), std::max(list[x], list[y]));
        }
      }
    }
  });
  // A pair sharing several buckets is found once per bucket.
  std::sort(hits.begin(), hits.end());
  hits.erase(std::unique(hits.begin(), hits.end()), hits.end());
  return static_cast<int>(hits.size());
}

ComparisonReport compare_contour_sets(const ContourSet& a, const ContourSet& b) {
  const auto la = line_levels(a);
  const auto lb = line_levels(b);
  std::vector<double> shared;
  std::set_intersection(la.begin(), la.end(), lb.begin(), lb.end(), std::back_inserter(shared));
  if (shared.empty()) throw Error(ErrorCode::NoSharedLevels, "contour sets share no level");

  const geo::LocalFrame frame{0.5 * (a.bounds.min_lat + a.bounds.max_lat)};
  ComparisonReport report;
  for (double level : shared) {
    std::vector<Point> va;
    std::vector<Point> vb;
    const auto sa = metric_segments(a, level, frame, &va);
    const auto sb = metric_segments(b, level, frame, &vb);
    const SegmentIndex ia(sa, cell_size_for(sa));
    const SegmentIndex ib(sb, cell_size_for(sb));
    double sum = 0.0;
    double worst = 0.0;
    for (const auto& p : va) {
      const double d = ib.nearest(p);
      sum += d;
      worst = std::max(worst, d);
    }
    for (const auto& p : vb) {
      const double d = ia.nearest(p);
      sum += d;
      worst = std::max(worst, d);
    }
    report.levels_compared.push_back(level);
    report.mean_symmetric_distance.push_back(sum / static_cast<double>(va.size() + vb.size()));
    report.max_symmetric_distance.push_back(worst);
    report.length_ratio.push_back(total_length(a, level) / total_length(b, level));
  }
  const ContourSet* sets[2] = {&a, &b};
  for (int i = 0; i < 2; ++i) {
    report.open_line_count[i] = static_cast<int>(
        std::count_if(sets[i]->lines.begin(), sets[i]->lines.end(), [](const ContourLine& l) { return !l.closed; }));
    report.intersection_count[i] = count_intersections(*sets[i]);
  }
  return report;
}

AgreementReport check_against_dtm(const ContourSet& contours, const ElevationGrid& grid, int samples_per_arc) {
  if (samples_per_arc < 2) throw Error(ErrorCode::InvalidArgument, "samples_per_arc must be at least 2");
  const Bounds fp = grid.footprint();
  const double tol = std::max(kCoordinateSlackDeg, 1e-9 * std::max(grid.georef().lat_step, grid.georef().lon_step));
  const auto inside = [&](const Point& p) { return fp.contains(p.first, p.second, tol); };
  AgreementReport report;
  report.samples_per_arc = samples_per_arc;
  double sum = 0.0;
  std::size_t count = 0;
  for (const auto& line : contours.lines) {
    const auto& v = line.vertices;
    if (v.empty()) continue;
    const std::size_t n = v.size();
    const std::size_t s = static_cast<std::size_t>(samples_per_arc);
    std::vector<std::size_t> picks;
    if (n <= s) {
      for (std::size_t i = 0; i < n; ++i) picks.push_back(i);
    } else {
      for (std::size_t i = 0; i < s; ++i) {
        picks.push_back(static_cast<std::size_t>(
            std::llround(static_cast<double>(i) * static_cast<double>(n - 1) / static_cast<double>(s - 1))));
      }
    }
    ++report.arcs_checked;
    for (std::size_t k : picks) {
      const Point& p = v[k];
      if (!inside(p)) {
        throw Error(ErrorCode::FootprintMismatch, "contour vertex lies outside the grid footprint");
      }
      const auto z = sample_bilinear(grid, std::clamp(p.second, fp.min_lat, fp.max_lat),
                                     std::clamp(p.first, fp.min_lon, fp.max_lon));
      if (!z) continue;
      const bool is_node = !line.closed ? (k == 0 || k == n - 1) : k == 0;
      if (is_node) ++report.nodes_checked;
      const double err = std::abs(*z - line.level);
      sum += err;
      report.max_abs_error = std::max(report.max_abs_error, err);
      ++count;
    }
  }
  report.mean_abs_error = count ? sum / static_cast<double>(count) : 0.0;
  return report;
}

SeamReport seam_continuity_check(const std::vector<ContourSet>& tile_contours, const MosaicLayout& layout) {
  SeamReport report;
  const GridGeoref& g = layout.georef;
  struct End {
    double level;
    double along;
    Point at;
  };
  for (std::size_t si = 0; si < layout.seams.size(); ++si) {
    const Seam& seam = layout.seams[si];
    if (seam.tile_a >= tile_contours.size() || seam.tile_b >= tile_contours.size()) continue;
    const bool column = seam.axis == SeamAxis::Column;
    const double step = column ? g.lon_step : g.lat_step;
    const double along_step = column ? g.lat_step : g.lon_step;
    const double line_pos = column ? g.col_lon(static_cast<double>(seam.line)) : g.row_lat(static_cast<double>(seam.line));
    const double tol = std::max(kCoordinateSlackDeg, 1e-9 * std::max(step, along_step));
    const double lo = column ? g.row_lat(static_cast<double>(seam.end)) : g.col_lon(static_cast<double>(seam.begin));
    const double hi = column ? g.row_lat(static_cast<double>(seam.begin)) : g.col_lon(static_cast<double>(seam.end));
    const auto ends_of = [&](const ContourSet& cs) {
      std::vector<End> out;
      for (const auto& line : cs.lines) {
        if (line.closed || line.vertices.empty()) continue;
        for (const Point* p : {&line.vertices.front(), &line.vertices.back()}) {
          const double across = column ? p->first : p->second;
          const double along = column ? p->second : p->first;
          if (std::abs(across - line_pos) <= tol && along >= lo - tol && along <= hi + tol) {
            out.push_back({line.level, along, *p});
          }
        }
      }
      std::sort(out.begin(), out.end(), [](const End& x, const End& y) {
        return x.level != y.level ? x.level < y.level : x.along < y.along;
      });
      return out;
    };
    const auto ea = ends_of(tile_contours[seam.tile_a]);
    const auto eb = ends_of(tile_contours[seam.tile_b]);
    const auto add_break = [&](const End& e) {
      report.breaks.push_back({si, e.level, e.at});
    };
    // Merge the two sorted lists, pairing ends of equal level within half a
    // sample of each other.
    std::size_t i = 0;
    std::size_t j = 0;
    const double match_tol = 0.5 * along_step;
    while (i < ea.size() || j < eb.size()) {
      if (j == eb.size()) {
        add_break(ea[i++]);
      } else if (i == ea.size()) {
        add_break(eb[j++]);
      } else if (ea[i].level == eb[j].level && std::abs(ea[i].along - eb[j].along) <= match_tol) {
        if (ea[i].at != eb[j].at) add_break(ea[i]);
        ++i;
        ++j;
      } else if (ea[i].level < eb[j].level || (ea[i].level == eb[j].level && ea[i].along < eb[j].along)) {
        add_break(ea[i++]);
      } else {
        add_break(eb[j++]);
      }
    }
  }
  report.seam_break_count = static_cast<int>(report.breaks.size());
  return report;
}

SeamReport seam_continuity_check(const std::vector<ContourSet>& tile_contours, const TileMosaic& mosaic) {
  return seam_continuity_check(tile_contours, mosaic.layout());
}

}  // namespace isoline
