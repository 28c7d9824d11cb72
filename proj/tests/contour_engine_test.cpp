#include <gtest/gtest.h>

#include <cmath>
#include <map>
#include <random>
#include <set>

#include "isoline/contour.hpp"
#include "isoline/error.hpp"
#include "isoline/geometry.hpp"
#include "test_support.hpp"

using namespace isoline;
using isoline::testing::make_grid;
using isoline::testing::tile_georef;

namespace {

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "expected an isoline::Error";
  return ErrorCode::InvalidArgument;
}

std::set<EdgeKey> straddling_edges(const ElevationGrid& g, double level) {
  std::set<EdgeKey> out;
  const auto straddles = [&](double a, double b) { return (a < level) != (b < level); };
  for (std::size_t r = 0; r < g.rows(); ++r) {
    for (std::size_t c = 0; c < g.cols(); ++c) {
      if (c + 1 < g.cols() && straddles(g.at(r, c), g.at(r, c + 1))) {
        out.insert({static_cast<int>(r), static_cast<int>(c), EdgeAxis::Horizontal});
      }
      if (r + 1 < g.rows() && straddles(g.at(r, c), g.at(r + 1, c))) {
        out.insert({static_cast<int>(r), static_cast<int>(c), EdgeAxis::Vertical});
      }
    }
  }
  return out;
}

// Segments per cell from the sign pattern alone.
int expected_segments(double nw, double ne, double se, double sw, double level) {
  const int n = (nw >= level) + (ne >= level) + (se >= level) + (sw >= level);
  if (n == 0 || n == 4) return 0;
  const bool saddle = n == 2 && (nw >= level) == (se >= level);
  return saddle ? 2 : 1;
}

double bilinear_index(const ElevationGrid& g, double row, double col) {
  const auto r0 = static_cast<std::size_t>(std::min(std::floor(row), static_cast<double>(g.rows() - 2)));
  const auto c0 = static_cast<std::size_t>(std::min(std::floor(col), static_cast<double>(g.cols() - 2)));
  const double fr = row - static_cast<double>(r0);
  const double fc = col - static_cast<double>(c0);
  return g.at(r0, c0) * (1 - fr) * (1 - fc) + g.at(r0, c0 + 1) * (1 - fr) * fc + g.at(r0 + 1, c0) * fr * (1 - fc) +
         g.at(r0 + 1, c0 + 1) * fr * fc;
}

double surface_at(const ElevationGrid& g, const std::pair<double, double>& v) {
  const auto& geo = g.georef();
  return bilinear_index(g, (geo.origin_lat - v.second) / geo.lat_step, (v.first - geo.origin_lon) / geo.lon_step);
}

ElevationGrid cone(std::size_t n) {
  const double mid = static_cast<double>(n - 1) / 2.0;
  return make_grid(n, n, [mid](std::size_t r, std::size_t c) {
    return 1000.0 - 10.0 * std::hypot(static_cast<double>(r) - mid, static_cast<double>(c) - mid);
  });
}

bool same_geometry(const ContourLine& a, const ContourLine& b) {
  return a.level == b.level && a.vertices == b.vertices && a.closed == b.closed &&
         a.boundary_terminated == b.boundary_terminated && a.source_keys == b.source_keys;
}

}  // namespace

TEST(EnumerateLevels, Examples) {
  LevelSpec s;
  s.base = 400;
  s.interval = 100;
  EXPECT_EQ(enumerate_levels(362, 750, s), (std::vector<double>{400, 500, 600, 700}));
  s.interval = 50;
  EXPECT_EQ(enumerate_levels(362, 750, s), (std::vector<double>{400, 450, 500, 550, 600, 650, 700, 750}));
  LevelSpec t;
  t.base = 0;
  t.interval = 10;
  EXPECT_EQ(enumerate_levels(100, 100, t), (std::vector<double>{100}));
  s.base = 800;
  EXPECT_TRUE(enumerate_levels(362, 750, s).empty());
  s.interval = 0;
  EXPECT_EQ(code_of([&] { enumerate_levels(0, 1, s); }), ErrorCode::NonPositiveInterval);
  LevelSpec e;
  e.explicit_levels = std::vector<double>{300, 450, 900};
  EXPECT_EQ(enumerate_levels(362, 750, e), (std::vector<double>{450}));
  e.explicit_levels = std::vector<double>{450, 450};
  EXPECT_EQ(code_of([&] { enumerate_levels(0, 1000, e); }), ErrorCode::InvalidLevels);
}

TEST(EnumerateLevels, NestedIntervalsShareExactValues) {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> u(-500, 500);
  for (int i = 0; i < 200; ++i) {
    LevelSpec fine;
    fine.base = std::round(u(rng) * 10) / 10;
    fine.interval = 0.1 * (1 + std::floor(std::abs(u(rng))));
    LevelSpec coarse = fine;
    coarse.interval = 2 * fine.interval;
    const auto a = enumerate_levels(-2000, 2000, fine);
    const auto b = enumerate_levels(-2000, 2000, coarse);
    for (std::size_t k = 0; k < b.size(); ++k) EXPECT_EQ(b[k], a[2 * k]);
  }
}

TEST(IndexLevels, EveryFifthFromBase) {
  LevelSpec s;
  s.base = 700;
  s.interval = 20;
  EXPECT_TRUE(is_index_level(700, s));
  EXPECT_FALSE(is_index_level(720, s));
  EXPECT_TRUE(is_index_level(800, s));
  s.index_every = 2;
  EXPECT_TRUE(is_index_level(740, s));
}

TEST(MarchCell, Examples) {
  EXPECT_EQ(march_cell(0, 0, 0, 0, 5).count, 0);

  // North row low, south row high: a west-east crossing at mid-edge.
  const auto mid = march_cell(0, 0, 10, 10, 5);
  ASSERT_EQ(mid.count, 1);
  std::set<CellEdge> edges{mid.segments[0].from.edge, mid.segments[0].to.edge};
  EXPECT_EQ(edges, (std::set<CellEdge>{CellEdge::West, CellEdge::East}));
  EXPECT_EQ(mid.segments[0].from.t, 0.5);
  EXPECT_EQ(mid.segments[0].to.t, 0.5);
  // High ground (south) on the left means walking east to west.
  EXPECT_EQ(mid.segments[0].from.edge, CellEdge::East);

  const auto fifth = march_cell(0, 0, 10, 10, 2);
  EXPECT_DOUBLE_EQ(fifth.segments[0].from.t, 0.2);
  EXPECT_DOUBLE_EQ(fifth.segments[0].to.t, 0.2);

  EXPECT_EQ(code_of([] { march_cell(std::nan(""), 0, 0, 0, 1); }), ErrorCode::VoidCorner);
}

TEST(MarchCell, SaddleMatchesDenseBilinearConnectivity) {
  // Checks which corners the inside region joins, using a flood fill over
  // a dense lattice of the bilinear surface.
  const auto connected_nw_se = [](double nw, double ne, double se, double sw, double level) {
    constexpr int n = 201;
    std::vector<char> inside(n * n);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        const double y = i / double(n - 1);
        const double x = j / double(n - 1);
        const double z = nw * (1 - x) * (1 - y) + ne * x * (1 - y) + se * x * y + sw * (1 - x) * y;
        inside[i * n + j] = z >= level;
      }
    }
    std::vector<char> seen(n * n, 0);
    std::vector<int> stack{0};
    seen[0] = 1;
    while (!stack.empty()) {
      const int p = stack.back();
      stack.pop_back();
      const int i = p / n;
      const int j = p % n;
      for (int di = -1; di <= 1; ++di) {
        for (int dj = -1; dj <= 1; ++dj) {
          const int a = i + di;
          const int b = j + dj;
          if (a < 0 || b < 0 || a >= n || b >= n) continue;
          const int q = a * n + b;
          if (!seen[q] && inside[q]) {
            seen[q] = 1;
            stack.push_back(q);
          }
        }
      }
    }
    return seen[n * n - 1] != 0;
  };
  const auto cut_corners = [](const CellSegments& s) {
    std::set<std::set<CellEdge>> out;
    for (int i = 0; i < s.count; ++i) out.insert({s.segments[i].from.edge, s.segments[i].to.edge});
    return out;
  };
  const std::set<std::set<CellEdge>> cuts_ne_sw{{CellEdge::North, CellEdge::East}, {CellEdge::South, CellEdge::West}};
  const std::set<std::set<CellEdge>> cuts_nw_se{{CellEdge::North, CellEdge::West}, {CellEdge::South, CellEdge::East}};

  // The worked saddle: center mean equals the level, inside corners join.
  ASSERT_TRUE(connected_nw_se(10, 0, 10, 0, 5));
  EXPECT_EQ(cut_corners(march_cell(10, 0, 10, 0, 5)), cuts_ne_sw);

  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> hi(6, 20);
  std::uniform_real_distribution<double> lo(-10, 4);
  int checked = 0;
  for (int trial = 0; trial < 300; ++trial) {
    const double nw = hi(rng), se = hi(rng), ne = lo(rng), sw = lo(rng);
    const double level = 5;
    const double mean = (nw + ne + se + sw) / 4;
    // Bilinear saddle value; the center-mean rule agrees with the true
    // surface topology whenever both sit on the same side of the level.
    const double a = nw, b = ne - nw, c = sw - nw, d = nw - ne + se - sw;
    const double saddle = a - b * c / d;
    if ((mean >= level) != (saddle >= level)) continue;
    ++checked;
    const bool joined = connected_nw_se(nw, ne, se, sw, level);
    EXPECT_EQ(cut_corners(march_cell(nw, ne, se, sw, level)), joined ? cuts_ne_sw : cuts_nw_se);
    // Mirror image: NE/SW inside, same connectivity, opposite corners cut.
    EXPECT_EQ(cut_corners(march_cell(ne, nw, sw, se, level)), joined ? cuts_nw_se : cuts_ne_sw);
  }
  EXPECT_GT(checked, 150);
}

TEST(CrossingToGeo, LinearPlacement) {
  const auto geo = tile_georef(19.0, 76.0, 1.0 / 1200.0);
  const auto h = crossing_to_geo({0, 0, EdgeAxis::Horizontal}, 0.5, geo, 1201, 1201);
  EXPECT_NEAR(h.first, 76.0004165, 1e-6);
  EXPECT_EQ(h.second, 19.0);
  const auto v = crossing_to_geo({0, 0, EdgeAxis::Vertical}, 0.25, geo, 1201, 1201);
  EXPECT_NEAR(v.second, 18.99979175, 1e-7);
  EXPECT_EQ(v.first, 76.0);
  EXPECT_EQ(code_of([&] { crossing_to_geo({0, 1200, EdgeAxis::Horizontal}, 0.5, geo, 1201, 1201); }),
            ErrorCode::IndexOutOfGrid);
  EXPECT_EQ(code_of([&] { crossing_to_geo({1200, 0, EdgeAxis::Vertical}, 0.5, geo, 1201, 1201); }),
            ErrorCode::IndexOutOfGrid);
}

TEST(TraceContours, ConeGivesNestedRings) {
  const auto g = cone(41);
  LevelSpec s;
  s.base = 850;
  s.interval = 25;
  const auto cs = trace_contours(g, s);
  ASSERT_EQ(cs.lines.size(), 6u);  // 850 .. 975
  for (std::size_t i = 0; i < cs.lines.size(); ++i) {
    EXPECT_TRUE(cs.lines[i].closed);
    EXPECT_EQ(cs.lines[i].vertices.front(), cs.lines[i].vertices.back());
    EXPECT_EQ(cs.lines[i].level, 850 + 25.0 * static_cast<double>(i));
    // Higher ground on the left: counter-clockwise around the peak.
    EXPECT_GT(geo::signed_ring_area_m2(cs.lines[i].vertices), 0.0);
    if (i > 0) {
      EXPECT_LT(geo::signed_ring_area_m2(cs.lines[i].vertices), geo::signed_ring_area_m2(cs.lines[i - 1].vertices));
    }
  }
}

TEST(TraceContours, RampGivesBoundaryLines) {
  const auto g = make_grid(10, 12, [](std::size_t, std::size_t c) { return 10.0 * static_cast<double>(c) + 0.5; });
  LevelSpec s;
  s.base = 0;
  s.interval = 20;
  const auto cs = trace_contours(g, s);
  ASSERT_EQ(cs.lines.size(), 5u);
  for (const auto& l : cs.lines) {
    EXPECT_FALSE(l.closed);
    EXPECT_TRUE(l.boundary_terminated);
    EXPECT_EQ(l.vertices.size(), 10u);
    for (const auto& v : l.vertices) EXPECT_EQ(v.first, l.vertices.front().first);
  }
}

TEST(TraceContours, VoidBlockTerminatesLines) {
  const auto g = make_grid(20, 20, [](std::size_t r, std::size_t c) {
    if (r >= 8 && r <= 11 && c >= 8 && c <= 11) return std::nan("");
    return static_cast<double>(c) * 5.0 + 0.25;
  });
  LevelSpec s;
  s.base = 50;
  s.interval = 1000;
  const auto cs = trace_contours(g, s);
  // Column 9.95 runs through the void: one line above it, one below.
  ASSERT_EQ(cs.lines.size(), 2u);
  for (const auto& l : cs.lines) {
    EXPECT_TRUE(l.boundary_terminated);
    const auto in_void_band = [](const EdgeKey& k) { return k.row >= 7 && k.row <= 12; };
    EXPECT_TRUE(in_void_band(l.source_keys.front()) || in_void_band(l.source_keys.back()));
  }
}

TEST(TraceContours, OracleEquivalenceOnSmallIntegerGrids) {
  std::mt19937_64 rng(1234);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t rows = 2 + static_cast<std::size_t>(rng() % 5);
    const std::size_t cols = 2 + static_cast<std::size_t>(rng() % 5);
    const auto g = isoline::testing::random_int_grid(rng, rows, cols, 0, 4);
    for (double level : {0.5, 1.0, 1.5, 2.0, 2.5, 3.0, 3.5, 4.0}) {
      const auto segs = level_segments(g, level, CellRange{0, rows - 1, 0, cols - 1});
      std::multiset<EdgeKey> used;
      for (const auto& s : segs) {
        used.insert(s.from);
        used.insert(s.to);
      }
      const auto expected = straddling_edges(g, level);
      EXPECT_EQ(std::set<EdgeKey>(used.begin(), used.end()), expected);
      for (const auto& k : expected) {
        const bool boundary = k.axis == EdgeAxis::Horizontal
                                  ? (k.row == 0 || k.row == static_cast<int>(rows) - 1)
                                  : (k.col == 0 || k.col == static_cast<int>(cols) - 1);
        EXPECT_EQ(used.count(k), boundary ? 1u : 2u);
      }
      std::map<std::pair<int, int>, int> per_cell;
      for (std::size_t r = 0; r + 1 < rows; ++r) {
        for (std::size_t c = 0; c + 1 < cols; ++c) {
          const int want = expected_segments(g.at(r, c), g.at(r, c + 1), g.at(r + 1, c + 1), g.at(r + 1, c), level);
          const auto got = march_cell(g.at(r, c), g.at(r, c + 1), g.at(r + 1, c + 1), g.at(r + 1, c), level).count;
          EXPECT_EQ(got, want);
        }
      }
    }
  }
}

TEST(TraceContours, LevelSetStraddleAndClosureProperties) {
  std::mt19937_64 rng(77);
  for (int trial = 0; trial < 40; ++trial) {
    const auto g = isoline::testing::smooth_random_grid(rng, 30, 25);
    LevelSpec s;
    s.base = 0;
    s.interval = 10;
    const auto cs = trace_contours(g, s);
    for (const auto& l : cs.lines) {
      ASSERT_GE(l.vertices.size(), 2u);
      for (const auto& v : l.vertices) EXPECT_NEAR(surface_at(g, v), l.level, 1e-9);
      for (const auto& k : l.source_keys) {
        const double a = g.at(k.row, k.col);
        const double b = k.axis == EdgeAxis::Horizontal ? g.at(k.row, k.col + 1) : g.at(k.row + 1, k.col);
        EXPECT_TRUE((a < l.level) != (b < l.level));
      }
      if (l.closed) {
        EXPECT_EQ(l.vertices.front(), l.vertices.back());
        EXPECT_FALSE(l.boundary_terminated);
      } else {
        EXPECT_TRUE(l.boundary_terminated);
        for (const auto& k : {l.source_keys.front(), l.source_keys.back()}) {
          const bool on_edge = k.axis == EdgeAxis::Horizontal ? (k.row == 0 || k.row == 29) : (k.col == 0 || k.col == 24);
          EXPECT_TRUE(on_edge);
        }
      }
    }
  }
}

TEST(TraceContours, DistinctLevelsNeverIntersect) {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 60; ++trial) {
    // Integer samples with half-integer levels: no sample equals a level.
    const auto g = isoline::testing::random_int_grid(rng, 8, 8, 0, 9);
    LevelSpec s;
    s.base = 0.5;
    s.interval = 1;
    const auto cs = trace_contours(g, s);
    for (std::size_t i = 0; i < cs.lines.size(); ++i) {
      for (std::size_t j = i + 1; j < cs.lines.size(); ++j) {
        const auto& a = cs.lines[i];
        const auto& b = cs.lines[j];
        if (a.level == b.level) continue;
        for (std::size_t p = 1; p < a.vertices.size(); ++p) {
          for (std::size_t q = 1; q < b.vertices.size(); ++q) {
            EXPECT_FALSE(geo::segments_intersect(a.vertices[p - 1], a.vertices[p], b.vertices[q - 1], b.vertices[q]));
          }
        }
      }
    }
  }
}

TEST(TraceContours, ParallelTracingIsBitIdentical) {
  std::mt19937_64 rng(8);
  const auto g = isoline::testing::smooth_random_grid(rng, 120, 90);
  LevelSpec s;
  s.interval = 5;
  TraceOptions serial;
  TraceOptions parallel;
  parallel.threads = 4;
  const auto a = trace_contours(g, s, serial);
  EXPECT_EQ(a, trace_contours(g, s, parallel));
  EXPECT_EQ(a, trace_contours(g, s, serial));
  for (std::size_t i = 1; i < a.lines.size(); ++i) {
    const auto& p = a.lines[i - 1];
    const auto& q = a.lines[i];
    EXPECT_TRUE(p.level < q.level ||
                (p.level == q.level && *std::min_element(p.source_keys.begin(), p.source_keys.end()) <
                                           *std::min_element(q.source_keys.begin(), q.source_keys.end())));
  }
}

TEST(TraceContours, IntervalNesting) {
  std::mt19937_64 rng(55);
  for (int trial = 0; trial < 20; ++trial) {
    const auto g = isoline::testing::smooth_random_grid(rng, 40, 40);
    LevelSpec fine;
    fine.base = 100;
    fine.interval = 5;
    LevelSpec coarse = fine;
    coarse.interval = 15;
    const auto a = trace_contours(g, fine);
    const auto b = trace_contours(g, coarse);
    std::vector<const ContourLine*> subset;
    for (const auto& l : a.lines) {
      if (std::find(b.level_values.begin(), b.level_values.end(), l.level) != b.level_values.end()) {
        subset.push_back(&l);
      }
    }
    ASSERT_EQ(subset.size(), b.lines.size());
    for (std::size_t i = 0; i < subset.size(); ++i) EXPECT_TRUE(same_geometry(*subset[i], b.lines[i]));
  }
}

TEST(TraceContours, TiesStayOnTheGrid) {
  // Plateau at exactly the level: vertices land on samples and duplicates
  // collapse; every line keeps at least two distinct vertices.
  const auto g = make_grid(6, 6, [](std::size_t r, std::size_t c) {
    return (r >= 2 && r <= 3 && c >= 2 && c <= 3) ? 10.0 : 0.0;
  });
  LevelSpec s;
  s.base = 10;
  s.interval = 10;
  const auto cs = trace_contours(g, s);
  ASSERT_EQ(cs.lines.size(), 1u);
  EXPECT_TRUE(cs.lines[0].closed);
  EXPECT_EQ(cs.lines[0].vertices.size(), 5u);
  for (std::size_t i = 1; i < cs.lines[0].vertices.size(); ++i) {
    EXPECT_NE(cs.lines[0].vertices[i - 1], cs.lines[0].vertices[i]);
  }
}

TEST(MosaicTracing, StitchedTilesEqualGlobalTrace) {
  std::mt19937_64 rng(4);
  const auto g = isoline::testing::smooth_random_grid(rng, 60, 70);
  const auto tile = [&](std::size_t r0, std::size_t c0, std::size_t rows, std::size_t cols) {
    GridGeoref geo = g.georef();
    geo.origin_lat = g.georef().row_lat(static_cast<double>(r0));
    geo.origin_lon = g.georef().col_lon(static_cast<double>(c0));
    return make_grid(rows, cols, [&](std::size_t r, std::size_t c) { return g.at(r0 + r, c0 + c); }, geo);
  };
  const auto mosaic = mosaic_assemble({tile(0, 0, 31, 41), tile(0, 40, 31, 30), tile(30, 0, 30, 41), tile(30, 40, 30, 30)});
  LevelSpec s;
  s.interval = 10;
  const auto pieces = trace_mosaic(mosaic, s);
  ASSERT_EQ(pieces.size(), 4u);
  const auto joined = stitch_tiles(pieces, mosaic.view(), s);
  EXPECT_EQ(joined, trace_contours(g, s));
}
