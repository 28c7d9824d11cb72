#include "isoline/contour.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <unordered_map>
#include <unordered_set>

#include "isoline/error.hpp"

namespace isoline {

namespace {

std::uint64_t encode(const EdgeKey& k) {
  return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(k.row)) << 33) |
         (static_cast<std::uint64_t>(static_cast<std::uint32_t>(k.col)) << 1) |
         static_cast<std::uint64_t>(k.axis);
}

EdgeKey decode(std::uint64_t v) {
  EdgeKey k;
  k.row = static_cast<std::int32_t>(v >> 33);
  k.col = static_cast<std::int32_t>((v >> 1) & 0xFFFFFFFFULL);
  k.axis = static_cast<EdgeAxis>(v & 1U);
  return k;
}

EdgeKey cell_edge_key(std::size_t r, std::size_t c, CellEdge e) {
  const auto row = static_cast<std::int32_t>(r);
  const auto col = static_cast<std::int32_t>(c);
  switch (e) {
    case CellEdge::North:
      return {row, col, EdgeAxis::Horizontal};
    case CellEdge::South:
      return {row + 1, col, EdgeAxis::Horizontal};
    case CellEdge::West:
      return {row, col, EdgeAxis::Vertical};
    case CellEdge::East:
      return {row, col + 1, EdgeAxis::Vertical};
  }
  return {};
}

void validate_spec(const LevelSpec& spec) {
  if (spec.index_every < 1) throw Error(ErrorCode::InvalidLevels, "index_every must be at least 1");
  if (spec.explicit_levels) {
    const auto& lv = *spec.explicit_levels;
    for (std::size_t i = 0; i < lv.size(); ++i) {
      if (!std::isfinite(lv[i]) || (i > 0 && !(lv[i] > lv[i - 1]))) {
        throw Error(ErrorCode::InvalidLevels, "explicit levels must be finite and strictly increasing");
      }
    }
  } else if (!(spec.interval > 0.0) || !std::isfinite(spec.interval)) {
    throw Error(ErrorCode::NonPositiveInterval, "contour interval must be positive");
  } else if (!std::isfinite(spec.base)) {
    throw Error(ErrorCode::InvalidLevels, "base contour must be finite");
  }
}

using Vertex = std::pair<double, double>;

// Builds a line from its crossing keys: vertices from the shared georef,
// consecutive duplicates collapsed.
ContourLine make_line(std::vector<EdgeKey> keys, double level, bool closed, const ElevationGrid& grid,
                      const LevelSpec& spec) {
  ContourLine line;
  line.level = level;
  line.closed = closed;
  line.boundary_terminated = !closed;
  line.is_index = is_index_level(level, spec);
  line.vertices.reserve(keys.size());
  for (const EdgeKey& k : keys) {
    const Vertex v = crossing_to_geo(k, crossing_t(grid, k, level), grid.georef(), grid.rows(), grid.cols());
    if (line.vertices.empty() || line.vertices.back() != v) line.vertices.push_back(v);
  }
  line.source_keys = std::move(keys);
  return line;
}

bool is_degenerate(const ContourLine& line) {
  if (line.closed) return line.vertices.size() < 4;
  return line.vertices.size() < 2;
}

EdgeKey min_key(const ContourLine& line) {
  return *std::min_element(line.source_keys.begin(), line.source_keys.end());
}

void sort_canonical(std::vector<ContourLine>& lines) {
  std::stable_sort(lines.begin(), lines.end(), [](const ContourLine& a, const ContourLine& b) {
    if (a.level != b.level) return a.level < b.level;
    return min_key(a) < min_key(b);
  });
}

// Chains oriented segments of one level into maximal polylines. Open lines
// start where a crossing has no incoming segment; the rest are rings, each
// started at its smallest key.
std::vector<ContourLine> chain_level(const std::vector<KeyedSegment>& segs, double level, const ElevationGrid& grid,
                                     const LevelSpec& spec, bool drop_degenerate) {
  std::unordered_map<std::uint64_t, std::uint64_t> next;
  std::unordered_set<std::uint64_t> has_incoming;
  next.reserve(segs.size() * 2);
  has_incoming.reserve(segs.size() * 2);
  for (const KeyedSegment& s : segs) {
    const auto from = encode(s.from);
    const auto to = encode(s.to);
    if (!next.emplace(from, to).second || !has_incoming.insert(to).second) {
      throw Error(ErrorCode::InvalidArgument, "crossing used by more than two segments");
    }
  }
  std::vector<std::uint64_t> froms;
  froms.reserve(next.size());
  for (const auto& [from, to] : next) froms.push_back(from);
  std::sort(froms.begin(), froms.end());

  std::unordered_set<std::uint64_t> visited;
  visited.reserve(next.size() * 2);
  std::vector<ContourLine> lines;

  for (const std::uint64_t start : froms) {
    if (has_incoming.count(start) != 0) continue;
    std::vector<EdgeKey> keys;
    std::uint64_t cur = start;
    keys.push_back(decode(cur));
    for (auto it = next.find(cur); it != next.end(); it = next.find(cur)) {
      visited.insert(cur);
      cur = it->second;
      keys.push_back(decode(cur));
    }
    lines.push_back(make_line(std::move(keys), level, false, grid, spec));
  }
  for (const std::uint64_t start : froms) {
    if (visited.count(start) != 0) continue;
    std::vector<EdgeKey> keys;
    std::uint64_t cur = start;
    do {
      visited.insert(cur);
      keys.push_back(decode(cur));
      cur = next.at(cur);
    } while (cur != start);
    keys.push_back(decode(start));
    lines.push_back(make_line(std::move(keys), level, true, grid, spec));
  }
  if (drop_degenerate) {
    std::erase_if(lines, is_degenerate);
  }
  sort_canonical(lines);
  return lines;
}

Bounds range_bounds(const ElevationGrid& grid, const CellRange& range) {
  const auto& g = grid.georef();
  return Bounds{g.col_lon(static_cast<double>(range.col0)), g.row_lat(static_cast<double>(range.row1)),
                g.col_lon(static_cast<double>(range.col1)), g.row_lat(static_cast<double>(range.row0))};
}

template <typename Fn>
void for_each_parallel(std::size_t n, unsigned threads, Fn&& fn) {
  if (threads <= 1 || n <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> cursor{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  const unsigned count = std::min<unsigned>(threads, static_cast<unsigned>(n));
  for (unsigned w = 0; w < count; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = cursor++; i < n; i = cursor++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

}  // namespace

std::vector<double> enumerate_levels(double min_elev, double max_elev, const LevelSpec& spec) {
  if (min_elev > max_elev) throw Error(ErrorCode::InvalidArgument, "min elevation above max elevation");
  validate_spec(spec);
  std::vector<double> out;
  if (spec.explicit_levels) {
    for (double v : *spec.explicit_levels) {
      if (v >= min_elev && v <= max_elev) out.push_back(v);
    }
    return out;
  }
  const auto level_at = [&](double k) { return spec.base + k * spec.interval; };
  double k = std::max(0.0, std::ceil((min_elev - spec.base) / spec.interval));
  while (level_at(k) < min_elev) k += 1.0;
  while (k > 0.0 && level_at(k - 1.0) >= min_elev) k -= 1.0;
  for (; level_at(k) <= max_elev; k += 1.0) out.push_back(level_at(k));
  return out;
}

bool is_index_level(double level, const LevelSpec& spec) {
  if (spec.index_every < 1) return false;
  long ordinal = 0;
  if (spec.explicit_levels) {
    const auto& lv = *spec.explicit_levels;
    const auto it = std::find(lv.begin(), lv.end(), level);
    if (it == lv.end()) return false;
    ordinal = static_cast<long>(it - lv.begin());
  } else {
    ordinal = std::lround((level - spec.base) / spec.interval);
  }
  return ordinal >= 0 && ordinal % spec.index_every == 0;
}

EdgeKey EdgeCrossing::key() const {
  return cell_edge_key(static_cast<std::size_t>(cell_row), static_cast<std::size_t>(cell_col), edge);
}

CellSegments march_cell(double z_nw, double z_ne, double z_se, double z_sw, double level) {
  if (!std::isfinite(z_nw) || !std::isfinite(z_ne) || !std::isfinite(z_se) || !std::isfinite(z_sw)) {
    throw Error(ErrorCode::VoidCorner, "cell has a void corner");
  }
  const int nw = z_nw >= level ? 8 : 0;
  const int ne = z_ne >= level ? 4 : 0;
  const int se = z_se >= level ? 2 : 0;
  const int sw = z_sw >= level ? 1 : 0;
  const int index = nw | ne | se | sw;

  // Fractions follow the global edge direction: west->east, north->south.
  const CellCrossing n{CellEdge::North, (level - z_nw) / (z_ne - z_nw)};
  const CellCrossing s{CellEdge::South, (level - z_sw) / (z_se - z_sw)};
  const CellCrossing w{CellEdge::West, (level - z_nw) / (z_sw - z_nw)};
  const CellCrossing e{CellEdge::East, (level - z_ne) / (z_se - z_ne)};

  CellSegments out;
  const auto add = [&](const CellCrossing& a, const CellCrossing& b) { out.segments[out.count++] = {a, b}; };
  const bool center_inside = (z_nw + z_ne + z_se + z_sw) / 4.0 >= level;
  switch (index) {
    case 0:
    case 15:
      break;
    case 8: add(w, n); break;
    case 4: add(n, e); break;
    case 2: add(e, s); break;
    case 1: add(s, w); break;
    case 7: add(n, w); break;
    case 11: add(e, n); break;
    case 13: add(s, e); break;
    case 14: add(w, s); break;
    case 12: add(w, e); break;
    case 3: add(e, w); break;
    case 6: add(n, s); break;
    case 9: add(s, n); break;
    case 10:  // NW + SE inside
      if (center_inside) {
        add(e, n);
        add(w, s);
      } else {
        add(w, n);
        add(e, s);
      }
      break;
    case 5:  // NE + SW inside
      if (center_inside) {
        add(n, w);
        add(s, e);
      } else {
        add(n, e);
        add(s, w);
      }
      break;
    default:
      break;
  }
  return out;
}

double crossing_t(const ElevationGrid& grid, const EdgeKey& key, double level) {
  const auto r = static_cast<std::size_t>(key.row);
  const auto c = static_cast<std::size_t>(key.col);
  const double a = grid.at(r, c);
  const double b = key.axis == EdgeAxis::Horizontal ? grid.at(r, c + 1) : grid.at(r + 1, c);
  return (level - a) / (b - a);
}

std::pair<double, double> crossing_to_geo(const EdgeKey& key, double t, const GridGeoref& georef, std::size_t rows,
                                          std::size_t cols) {
  const bool horizontal = key.axis == EdgeAxis::Horizontal;
  const long r = key.row;
  const long c = key.col;
  const long max_r = static_cast<long>(rows) - (horizontal ? 1 : 2);
  const long max_c = static_cast<long>(cols) - (horizontal ? 2 : 1);
  if (r < 0 || c < 0 || r > max_r || c > max_c) {
    throw Error(ErrorCode::IndexOutOfGrid, "crossing edge (" + std::to_string(r) + ", " + std::to_string(c) +
                                               ") outside a " + std::to_string(rows) + "x" + std::to_string(cols) +
                                               " grid");
  }
  const auto rd = static_cast<double>(r);
  const auto cd = static_cast<double>(c);
  if (horizontal) {
    const double lon0 = georef.col_lon(cd);
    const double lon1 = georef.col_lon(cd + 1.0);
    return {lon0 + t * (lon1 - lon0), georef.row_lat(rd)};
  }
  const double lat0 = georef.row_lat(rd);
  const double lat1 = georef.row_lat(rd + 1.0);
  return {georef.col_lon(cd), lat0 + t * (lat1 - lat0)};
}

std::vector<KeyedSegment> level_segments(const ElevationGrid& grid, double level, const CellRange& range) {
  std::vector<KeyedSegment> out;
  for (std::size_t r = range.row0; r < range.row1; ++r) {
    for (std::size_t c = range.col0; c < range.col1; ++c) {
      if (grid.is_void(r, c) || grid.is_void(r, c + 1) || grid.is_void(r + 1, c + 1) || grid.is_void(r + 1, c)) {
        continue;
      }
      const double nw = grid.at(r, c);
      const double ne = grid.at(r, c + 1);
      const double se = grid.at(r + 1, c + 1);
      const double sw = grid.at(r + 1, c);
      // Fast reject: the level is outside this cell's range.
      const double lo = std::min({nw, ne, se, sw});
      const double hi = std::max({nw, ne, se, sw});
      if (level > hi || level <= lo) continue;
      const CellSegments cs = march_cell(nw, ne, se, sw, level);
      for (int i = 0; i < cs.count; ++i) {
        out.push_back({cell_edge_key(r, c, cs.segments[i].from.edge), cell_edge_key(r, c, cs.segments[i].to.edge)});
      }
    }
  }
  return out;
}

ContourSet trace_region(const ElevationGrid& grid, const LevelSpec& spec, const std::vector<double>& levels,
                        const CellRange& range, const TraceOptions& opts) {
  validate_spec(spec);
  if (range.row1 > grid.rows() - 1 || range.col1 > grid.cols() - 1 || range.row0 > range.row1 ||
      range.col0 > range.col1) {
    throw Error(ErrorCode::IndexOutOfGrid, "cell range outside grid");
  }
  std::vector<std::vector<ContourLine>> per_level(levels.size());
  for_each_parallel(levels.size(), opts.threads, [&](std::size_t i) {
    per_level[i] = chain_level(level_segments(grid, levels[i], range), levels[i], grid, spec, opts.drop_degenerate);
  });
  ContourSet set;
  set.levels = spec;
  set.level_values = levels;
  set.grid_fingerprint = grid.fingerprint();
  set.bounds = range_bounds(grid, range);
  for (auto& lv : per_level) {
    for (auto& line : lv) set.lines.push_back(std::move(line));
  }
  return set;
}

ContourSet trace_contours(const ElevationGrid& grid, const LevelSpec& spec, const TraceOptions& opts) {
  if (grid.rows() < 2 || grid.cols() < 2) {
    throw Error(ErrorCode::InvalidArgument, "contouring needs at least 2 rows and 2 columns");
  }
  const auto [lo, hi] = min_max(grid);
  const auto levels = enumerate_levels(lo, hi, spec);
  return trace_region(grid, spec, levels, CellRange{0, grid.rows() - 1, 0, grid.cols() - 1}, opts);
}

std::vector<ContourSet> trace_mosaic(const TileMosaic& mosaic, const LevelSpec& spec, const TraceOptions& opts) {
  const ElevationGrid& view = mosaic.view();
  if (view.rows() < 2 || view.cols() < 2) {
    throw Error(ErrorCode::InvalidArgument, "contouring needs at least 2 rows and 2 columns");
  }
  const auto [lo, hi] = min_max(view);
  const auto levels = enumerate_levels(lo, hi, spec);
  TraceOptions tile_opts = opts;
  tile_opts.drop_degenerate = false;
  std::vector<ContourSet> out;
  for (std::size_t i = 0; i < mosaic.tiles().size(); ++i) {
    const TilePlacement& p = mosaic.layout().placements[i];
    const CellRange range{p.row_offset, p.last_row(), p.col_offset, p.last_col()};
    ContourSet set = trace_region(view, spec, levels, range, tile_opts);
    set.grid_fingerprint = mosaic.tiles()[i].fingerprint();
    out.push_back(std::move(set));
  }
  return out;
}

ContourSet stitch_tiles(const std::vector<ContourSet>& tiles, const ElevationGrid& view, const LevelSpec& spec) {
  ContourSet out;
  out.levels = spec;
  out.grid_fingerprint = view.fingerprint();
  out.bounds = view.footprint();

  std::vector<double> levels;
  for (const auto& t : tiles) {
    levels.insert(levels.end(), t.level_values.begin(), t.level_values.end());
  }
  std::sort(levels.begin(), levels.end());
  levels.erase(std::unique(levels.begin(), levels.end()), levels.end());
  out.level_values = levels;

  for (double level : levels) {
    std::vector<const ContourLine*> pieces;
    for (const auto& t : tiles) {
      for (const auto& l : t.lines) {
        if (l.level == level) pieces.push_back(&l);
      }
    }
    std::vector<ContourLine> lines;
    std::unordered_map<std::uint64_t, std::size_t> by_first;
    std::unordered_set<std::uint64_t> lasts;
    std::vector<std::size_t> open;
    for (std::size_t i = 0; i < pieces.size(); ++i) {
      const ContourLine& p = *pieces[i];
      if (p.source_keys.empty()) throw Error(ErrorCode::InvalidArgument, "tile piece without source keys");
      if (p.closed) {
        lines.push_back(make_line(p.source_keys, level, true, view, spec));
        continue;
      }
      by_first.emplace(encode(p.source_keys.front()), i);
      lasts.insert(encode(p.source_keys.back()));
      open.push_back(i);
    }
    std::sort(open.begin(), open.end(), [&](std::size_t a, std::size_t b) {
      return pieces[a]->source_keys.front() < pieces[b]->source_keys.front();
    });
    std::vector<bool> used(pieces.size(), false);
    const auto follow = [&](std::size_t first) {
      std::vector<EdgeKey> keys = pieces[first]->source_keys;
      used[first] = true;
      for (;;) {
        const auto it = by_first.find(encode(keys.back()));
        if (it == by_first.end()) return std::make_pair(std::move(keys), false);
        if (it->second == first) return std::make_pair(std::move(keys), true);
        if (used[it->second]) throw Error(ErrorCode::InvalidArgument, "tile pieces join more than once");
        used[it->second] = true;
        const auto& more = pieces[it->second]->source_keys;
        keys.insert(keys.end(), more.begin() + 1, more.end());
      }
    };
    for (std::size_t i : open) {
      if (used[i] || lasts.count(encode(pieces[i]->source_keys.front())) != 0) continue;
      auto [keys, ring] = follow(i);
      lines.push_back(make_line(std::move(keys), level, ring, view, spec));
    }
    for (std::size_t i : open) {
      if (used[i]) continue;
      auto [keys, ring] = follow(i);
      if (!ring) throw Error(ErrorCode::InvalidArgument, "inconsistent tile pieces");
      keys.pop_back();
      const auto m = std::min_element(keys.begin(), keys.end());
      std::rotate(keys.begin(), m, keys.end());
      keys.push_back(keys.front());
      lines.push_back(make_line(std::move(keys), level, true, view, spec));
    }
    std::erase_if(lines, is_degenerate);
    sort_canonical(lines);
    for (auto& l : lines) out.lines.push_back(std::move(l));
  }
  return out;
}

}  // namespace isoline
