#include <gtest/gtest.h>

#include <algorithm>
#include <random>
#include <set>
#include <sstream>

#include "isoline/contour.hpp"
#include "isoline/error.hpp"
#include "isoline/topology.hpp"
#include "test_support.hpp"

using namespace isoline;

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

Topology from_soup(const std::string& text) {
  const auto soup = parse_polyline_soup("bounds: 0 0 10 10\n" + text);
  return build_topology(soup.lines, soup.bounds);
}

const TopoNode& node_at(const Topology& t, double x, double y) {
  for (const auto& n : t.nodes) {
    if (n.position == Point{x, y}) return n;
  }
  throw std::runtime_error("no node at position");
}

int count_class(const Topology& t, ArcClass c) {
  return static_cast<int>(std::count_if(t.arcs.begin(), t.arcs.end(), [c](const TopoArc& a) { return a.classes.has(c); }));
}

std::vector<std::string> csv_rows(const std::string& csv) {
  std::vector<std::string> rows;
  std::istringstream in(csv);
  for (std::string line; std::getline(in, line);) rows.push_back(line);
  return rows;
}

// Spur hanging off a through-contour that runs boundary to boundary.
const char* kSpur =
    "500; 0 5, 5 5\n"
    "500; 5 5, 10 5\n"
    "500; 5 5, 5 6\n";

// Two rings joined through a hub by connectors; a third arc leaves the hub
// for the dataset boundary.
const char* kConnectorCascade =
    "500; 3 3, 2 2, 3 2, 3 3\n"
    "500; 7 3, 8 2, 8 3, 7 3\n"
    "500; 3 3, 5 4\n"
    "500; 5 4, 7 3\n"
    "500; 5 4, 5 10\n";

// Lens between (2,5) and (5,5): straight arc of 3 units, detour of 10 units.
// The through-contour continues from both lens nodes to the boundary.
const char* kPseudoIsland =
    "500; 0 5, 2 5\n"
    "500; 2 5, 5 5\n"
    "500; 2 5, 2 8.5, 5 8.5, 5 5\n"
    "500; 5 5, 10 5\n";

// Two polygons of equal elevation sharing the chord between (2,3) and (4,3).
const char* kTheta =
    "500; 2 3, 2 4, 4 4, 4 3\n"
    "500; 2 3, 2 2, 4 2, 4 3\n"
    "500; 2 3, 4 3\n";

// Lens whose node (5,5) also anchors a separate ring.
const char* kTouching =
    "500; 3 5, 5 5\n"
    "500; 3 5, 3 7, 5 7, 5 5\n"
    "500; 5 5, 6 4, 7 5, 5 5\n";

}  // namespace

TEST(BuildTopology, Examples) {
  const auto ring = from_soup("500; 1 1, 2 1, 2 2, 1 2, 1 1\n");
  ASSERT_EQ(ring.nodes.size(), 1u);
  ASSERT_EQ(ring.arcs.size(), 1u);
  ASSERT_EQ(ring.polygons.size(), 1u);
  EXPECT_TRUE(ring.nodes[0].status.has(NodeClass::CIA));
  EXPECT_EQ(ring.nodes[0].arc_per_node, 2);
  EXPECT_TRUE(ring.arcs[0].closed());
  EXPECT_EQ(ring.polygons[0].elevation, 500.0);
  EXPECT_GT(ring.polygons[0].area, 0.0);

  const auto shared = from_soup("500; 1 1, 2 1\n500; 2 1, 3 2\n");
  EXPECT_EQ(shared.nodes.size(), 3u);
  EXPECT_EQ(shared.arcs.size(), 2u);
  EXPECT_EQ(node_at(shared, 2, 1).arc_per_node, 2);

  const auto star = from_soup("500; 5 5, 6 5\n500; 5 5, 4 6\n500; 5 5, 4 4\n");
  EXPECT_EQ(node_at(star, 5, 5).arc_per_node, 3);
  EXPECT_TRUE(node_at(star, 5, 5).status.has(NodeClass::MAC));

  EXPECT_EQ(code_of([] { from_soup("500; 1 1, 1 1\n"); }), ErrorCode::ZeroLengthArc);
  EXPECT_NO_THROW(check_integrity(ring));
  EXPECT_NO_THROW(check_integrity(star));
}

TEST(Classify, DanglesInsideAndOnBoundary) {
  const auto inside = from_soup("500; 3 3, 4 4\n");
  for (const auto& n : inside.nodes) {
    EXPECT_TRUE(n.status.has(NodeClass::DE));
    EXPECT_TRUE(n.status.has(NodeClass::DNG));
  }
  EXPECT_TRUE(inside.arcs[0].classes.has(ArcClass::DNG));
  EXPECT_TRUE(inside.arcs[0].classes.has(ArcClass::DE));

  const auto edge = from_soup("500; 0 5, 3 5\n");
  const auto& b = node_at(edge, 0, 5);
  EXPECT_TRUE(b.on_boundary);
  EXPECT_TRUE(b.status.has(NodeClass::DNG));
  EXPECT_FALSE(b.status.has(NodeClass::DE));
  EXPECT_TRUE(node_at(edge, 3, 5).status.has(NodeClass::DE));

  const auto through = from_soup("500; 0 5, 10 5\n");
  EXPECT_FALSE(through.arcs[0].classes.has(ArcClass::DE));
  EXPECT_TRUE(through.arcs[0].classes.has(ArcClass::DNG));
  EXPECT_FALSE(has_deletable(through));
}

TEST(Classify, PseudoIslandLongerArc) {
  const auto t = from_soup(kPseudoIsland);
  ASSERT_EQ(t.arcs.size(), 4u);
  ASSERT_EQ(t.polygons.size(), 1u);
  EXPECT_EQ(count_class(t, ArcClass::PIC), 1);
  for (const auto& a : t.arcs) {
    if (a.classes.has(ArcClass::PIC)) {
      EXPECT_EQ(a.vertices.size(), 4u);
      EXPECT_NEAR(a.length / 10.0, 111195.0 * 0.99, 1500.0);
    }
  }
  EXPECT_TRUE(node_at(t, 2, 5).status.has(NodeClass::MAC));
}

TEST(Classify, SharedArcBetweenEqualPolygons) {
  const auto t = from_soup(kTheta);
  ASSERT_EQ(t.polygons.size(), 2u);
  EXPECT_EQ(count_class(t, ArcClass::AS2P), 1);
  for (const auto& a : t.arcs) {
    EXPECT_EQ(a.classes.has(ArcClass::AS2P), a.vertices.size() == 2u);
  }
  // Different elevations on either side: not AS2P.
  const auto mixed = from_soup("500; 2 3, 2 4, 4 4, 4 3\n510; 2 3, 2 2, 4 2, 4 3\n500; 2 3, 4 3\n");
  EXPECT_EQ(count_class(mixed, ArcClass::AS2P), 0);
}

TEST(Classify, ConnectorsAndTouchingPolygons) {
  const auto c = from_soup(kConnectorCascade);
  EXPECT_EQ(count_class(c, ArcClass::CoA), 2);
  EXPECT_EQ(count_class(c, ArcClass::DE), 0);
  const auto p = from_soup(kTouching);
  ASSERT_EQ(p.polygons.size(), 2u);
  EXPECT_EQ(count_class(p, ArcClass::PTP), 1);
  for (const auto& a : p.arcs) {
    if (a.classes.has(ArcClass::PTP)) EXPECT_EQ(a.vertices.size(), 4u);
  }
}

TEST(Clean, AlreadyCleanIsFixedPoint) {
  const auto ring = from_soup("500; 1 1, 2 1, 2 2, 1 2, 1 1\n510; 0 5, 10 5\n");
  const auto r = clean(ring);
  EXPECT_EQ(r.report.passes, 1);
  EXPECT_EQ(r.report.total_deleted(), 0);
  EXPECT_EQ(r.topology, ring);
}

TEST(Clean, SpurRemovedAndJunctionDissolved) {
  const auto r = clean(from_soup(kSpur));
  EXPECT_EQ(r.report.passes, 1);
  EXPECT_EQ(r.report.deleted.at(ArcClass::DE), 1);
  EXPECT_EQ(r.report.dissolved, 1);
  ASSERT_EQ(r.topology.arcs.size(), 1u);
  const auto& v = r.topology.arcs[0].vertices;
  const std::vector<Point> joined{{0, 5}, {5, 5}, {10, 5}};
  EXPECT_TRUE(v == joined || v == std::vector<Point>(joined.rbegin(), joined.rend()));
  EXPECT_EQ(r.topology.nodes.size(), 2u);
  check_integrity(r.topology);
}

TEST(Clean, ConnectorCascadeTakesTwoPasses) {
  const auto r = clean(from_soup(kConnectorCascade));
  EXPECT_EQ(r.report.passes, 2);
  EXPECT_EQ(r.report.deleted.at(ArcClass::CoA), 2);
  EXPECT_EQ(r.report.deleted.at(ArcClass::DE), 1);
  EXPECT_EQ(r.topology.arcs.size(), 2u);
  EXPECT_EQ(r.topology.polygons.size(), 2u);
  for (const auto& a : r.topology.arcs) EXPECT_TRUE(a.closed());
  check_integrity(r.topology);
}

TEST(Clean, EqualPolygonsMerge) {
  const auto r = clean(from_soup(kTheta));
  EXPECT_EQ(r.report.deleted.at(ArcClass::AS2P), 1);
  ASSERT_EQ(r.topology.arcs.size(), 1u);
  ASSERT_EQ(r.topology.polygons.size(), 1u);
  EXPECT_TRUE(r.topology.arcs[0].closed());
  EXPECT_TRUE(r.topology.nodes[0].status.has(NodeClass::CIA));
  check_integrity(r.topology);
}

TEST(Clean, PseudoIslandKeepsShorterArc) {
  const auto r = clean(from_soup(kPseudoIsland));
  EXPECT_EQ(r.report.deleted.at(ArcClass::PIC), 1);
  ASSERT_EQ(r.topology.arcs.size(), 1u);
  const auto& v = r.topology.arcs[0].vertices;
  const std::vector<Point> through{{0, 5}, {2, 5}, {5, 5}, {10, 5}};
  EXPECT_TRUE(v == through || v == std::vector<Point>(through.rbegin(), through.rend()));
}

TEST(Clean, TouchingPolygonCascade) {
  const auto t = from_soup(kTouching);
  const auto r = clean(t);
  EXPECT_EQ(r.report.passes, 2);
  EXPECT_EQ(r.report.deleted.at(ArcClass::PTP), 1);
  EXPECT_EQ(r.report.deleted.at(ArcClass::DE), 1);
  ASSERT_EQ(r.topology.arcs.size(), 1u);
  EXPECT_EQ(r.topology.arcs[0].vertices.size(), 4u);
  EXPECT_EQ(code_of([&] { clean(t, 1); }), ErrorCode::NotConverged);
  EXPECT_EQ(code_of([&] { clean(t, 0); }), ErrorCode::InvalidArgument);
}

TEST(Dissolve, Examples) {
  const auto pair = from_soup("500; 0 5, 5 5\n500; 5 5, 10 5\n");
  const auto d = dissolve_degree2(pair);
  EXPECT_EQ(d.dissolved, 1);
  ASSERT_EQ(d.topology.arcs.size(), 1u);
  EXPECT_DOUBLE_EQ(d.topology.arcs[0].length, pair.arcs[0].length + pair.arcs[1].length);
  EXPECT_EQ(d.topology.arcs[0].vertices, (std::vector<Point>{{0, 5}, {5, 5}, {10, 5}}));

  const auto mismatch = dissolve_degree2(from_soup("400; 0 5, 5 5\n450; 5 5, 10 5\n"));
  EXPECT_EQ(mismatch.dissolved, 0);
  EXPECT_EQ(mismatch.topology.arcs.size(), 2u);
  EXPECT_EQ(mismatch.elevation_mismatches, (std::vector<Point>{{5, 5}}));

  const auto ring = dissolve_degree2(from_soup("500; 2 2, 4 2, 4 4\n500; 4 4, 2 4, 2 2\n"));
  ASSERT_EQ(ring.topology.arcs.size(), 1u);
  EXPECT_TRUE(ring.topology.arcs[0].closed());
  ASSERT_EQ(ring.topology.nodes.size(), 1u);
  EXPECT_TRUE(ring.topology.nodes[0].status.has(NodeClass::CIA));
  EXPECT_EQ(ring.topology.arcs[0].vertices.size(), 5u);
  EXPECT_EQ(ring.topology.polygons.size(), 1u);

  // Boundary nodes are never dissolved.
  const auto edge = dissolve_degree2(from_soup("500; 0 5, 3 5\n500; 0 5, 3 6\n"));
  EXPECT_EQ(edge.dissolved, 0);
}

TEST(Tables, CsvShapeAndReferences) {
  const auto t = from_soup(kTheta);
  const auto tables = to_tables(t);
  const auto nat = csv_rows(tables.nat);
  const auto aat = csv_rows(tables.aat);
  const auto pat = csv_rows(tables.pat);
  const auto pal = csv_rows(tables.pal);
  EXPECT_EQ(nat.at(0), "id,x,y,arc_per_node,status");
  EXPECT_EQ(aat.at(0), "id,FNODE#,TNODE#,length,elevation,LPOLY#,RPOLY#");
  EXPECT_EQ(pat.at(0), "id,elevation,area");
  EXPECT_EQ(pal.at(0), "polygon_id,seq,arc_id");
  EXPECT_EQ(nat.size(), t.nodes.size() + 1);
  EXPECT_EQ(aat.size(), t.arcs.size() + 1);
  EXPECT_EQ(pat.size(), t.polygons.size() + 1);
  std::size_t pal_rows = 0;
  for (const auto& p : t.polygons) pal_rows += p.arc_list.size();
  EXPECT_EQ(pal.size(), pal_rows + 1);
  EXPECT_EQ(nat.at(1).substr(nat.at(1).rfind(',') + 1), "MAC");

  std::set<int> node_ids;
  for (std::size_t i = 1; i < nat.size(); ++i) node_ids.insert(std::stoi(nat[i]));
  for (std::size_t i = 1; i < aat.size(); ++i) {
    std::istringstream row(aat[i]);
    std::string id, from, to;
    std::getline(row, id, ',');
    std::getline(row, from, ',');
    std::getline(row, to, ',');
    EXPECT_TRUE(node_ids.count(std::stoi(from)));
    EXPECT_TRUE(node_ids.count(std::stoi(to)));
  }
}

TEST(PolylineSoup, ParsingAndErrors) {
  const auto s = parse_polyline_soup("# comment\n500; 1 1, 2 2\n\n  450.5 ; 3 3,4 4 , 5 5\n");
  ASSERT_EQ(s.lines.size(), 2u);
  EXPECT_EQ(s.lines[1].elevation, 450.5);
  EXPECT_EQ(s.lines[1].vertices.size(), 3u);
  EXPECT_EQ(s.bounds.min_lon, 1.0);
  EXPECT_EQ(s.bounds.max_lat, 5.0);
  for (const char* bad : {"abc\n", "500 1 1, 2 2\n", "x; 1 1, 2 2\n", "500; 1 1, 2\n", "bounds: 1 2 3\n", "500; 1 1, 2 2 2\n"}) {
    EXPECT_EQ(code_of([&] { parse_polyline_soup(bad); }), ErrorCode::MalformedVector) << bad;
  }
}

TEST(Clean, TracedContoursAreAlreadyClean) {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 15; ++trial) {
    const auto g = isoline::testing::smooth_random_grid(rng, 50, 40);
    LevelSpec s;
    s.base = 0.5;
    s.interval = 7;
    const auto cs = trace_contours(g, s);
    const auto t = build_topology(cs);
    check_integrity(t);
    const auto r = clean(t);
    EXPECT_EQ(r.report.total_deleted(), 0);
    EXPECT_EQ(r.report.dissolved, 0);
    EXPECT_EQ(r.topology.arcs.size(), cs.lines.size());
    const auto back = to_contour_set(r.topology, cs);
    EXPECT_EQ(back.lines, cs.lines);
  }
}

TEST(Clean, RandomLatticeDefectsConvergeToRegularState) {
  std::mt19937_64 rng(2024);
  int converged = 0;
  for (int trial = 0; trial < 200; ++trial) {
    // Unit edges of a 6x6 lattice placed in the middle of the bounds, so
    // lines can only meet at shared endpoints.
    std::ostringstream soup;
    std::set<Point> input_vertices;
    const int n = 6;
    for (int y = 0; y < n; ++y) {
      for (int x = 0; x < n; ++x) {
        for (int dir = 0; dir < 2; ++dir) {
          const int x2 = x + (dir == 0);
          const int y2 = y + (dir == 1);
          if (x2 >= n || y2 >= n || rng() % 100 >= 45) continue;
          const double elev = rng() % 4 == 0 ? 510 : 500;
          soup << elev << "; " << 2 + x << ' ' << 2 + y << ", " << 2 + x2 << ' ' << 2 + y2 << '\n';
          input_vertices.insert({2.0 + x, 2.0 + y});
          input_vertices.insert({2.0 + x2, 2.0 + y2});
        }
      }
    }
    const auto t = from_soup(soup.str());
    CleanResult r;
    try {
      r = clean(t, 64);
    } catch (const Error& e) {
      ADD_FAILURE() << "trial " << trial << ": " << e.what() << "\n" << soup.str();
      continue;
    }
    ++converged;
    check_integrity(r.topology);
    EXPECT_FALSE(has_deletable(r.topology));
    EXPECT_LE(r.topology.arcs.size(), t.arcs.size());
    for (const auto& node : r.topology.nodes) EXPECT_FALSE(node.status.has(NodeClass::DE));
    for (const auto& a : r.topology.arcs) {
      for (const auto& v : a.vertices) EXPECT_TRUE(input_vertices.count(v));
    }
    const auto again = clean(r.topology, 64);
    EXPECT_EQ(again.report.total_deleted(), 0);
    EXPECT_EQ(again.topology, r.topology);
  }
  EXPECT_EQ(converged, 200);
}
