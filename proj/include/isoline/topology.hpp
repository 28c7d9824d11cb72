#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "isoline/contour.hpp"
#include "isoline/grid.hpp"

namespace isoline {

using Point = std::pair<double, double>;

enum class NodeClass : std::uint8_t { DNG = 1, DE = 2, MAC = 4, CIA = 8 };
enum class ArcClass : std::uint8_t { DNG = 1, DE = 2, AS2P = 4, PIC = 8, PTP = 16, CoA = 32 };

/// Small bit set over one of the class enums above.
template <typename E>
struct ClassSet {
  std::uint8_t bits = 0;

  bool has(E e) const { return (bits & static_cast<std::uint8_t>(e)) != 0; }
  void add(E e) { bits = static_cast<std::uint8_t>(bits | static_cast<std::uint8_t>(e)); }
  bool empty() const { return bits == 0; }
  bool operator==(const ClassSet&) const = default;
};

std::string_view class_name(NodeClass c);
std::string_view class_name(ArcClass c);
/// "Regular" for an empty set, otherwise names joined with '|'.
std::string to_string(ClassSet<NodeClass> s);
std::string to_string(ClassSet<ArcClass> s);

struct TopoNode {
  int id = 0;
  Point position;
  int arc_per_node = 0;
  ClassSet<NodeClass> status;
  /// On the dataset boundary or at a void-adjacent line end.
  bool on_boundary = false;

  bool operator==(const TopoNode&) const = default;
};

struct TopoArc {
  int id = 0;
  int from_node = 0;
  int to_node = 0;
  std::vector<Point> vertices;
  double length = 0.0;  // meters
  double elevation = 0.0;
  ClassSet<ArcClass> classes;
  int left_polygon = 0;  // 0 = not a polygon
  int right_polygon = 0;
  /// Same face on both sides: removing the arc disconnects its component.
  bool bridge = false;
  /// Index of the contour line this arc was built from, while unmodified.
  std::optional<std::size_t> source_line;

  bool closed() const { return from_node == to_node; }
  bool operator==(const TopoArc&) const = default;
};

struct TopoPolygon {
  int id = 0;
  /// Directed arc references: +id along the arc, -id against it.
  std::vector<int> arc_list;
  double elevation = 0.0;
  bool uniform_elevation = true;
  double area = 0.0;  // square meters

  bool operator==(const TopoPolygon&) const = default;
};

struct Topology {
  std::vector<TopoNode> nodes;  // nodes[i].id == i + 1
  std::vector<TopoArc> arcs;    // arcs[i].id == i + 1
  std::vector<TopoPolygon> polygons;
  Bounds bounds;

  const TopoNode& node(int id) const { return nodes[static_cast<std::size_t>(id - 1)]; }
  const TopoArc& arc(int id) const { return arcs[static_cast<std::size_t>(id - 1)]; }
  bool operator==(const Topology&) const = default;
};

/// Input polyline for topology building.
struct Polyline {
  double elevation = 0.0;
  std::vector<Point> vertices;
  bool boundary_terminated = false;
};

/// Exact-coordinate endpoint merging; closed rings get a CIA anchor node.
/// Result is classified. Throws ZeroLengthArc.
Topology build_topology(std::span<const Polyline> lines, const Bounds& dataset_bounds);
Topology build_topology(const ContourSet& contours);

/// Recomputes node statuses and arc classes.
Topology classify(Topology topology);

struct DissolveResult {
  Topology topology;
  int dissolved = 0;
  /// Degree-2 nodes kept because the two arcs differ in elevation.
  std::vector<Point> elevation_mismatches;
};

DissolveResult dissolve_degree2(Topology topology);

struct CleanReport {
  int passes = 0;
  std::map<ArcClass, int> deleted;
  int dissolved = 0;
  std::vector<Point> elevation_mismatches;

  int total_deleted() const;
};

struct CleanResult {
  Topology topology;
  CleanReport report;
};

/// Deletes DE, CoA, AS2P, PIC and PTP arcs pass by pass, dissolving interior
/// degree-2 nodes after each pass, until no deletable arc remains. Throws
/// NotConverged when max_passes is exhausted.
CleanResult clean(Topology topology, int max_passes = 16);

/// True when any arc carries a class that clean deletes.
bool has_deletable(const Topology& topology);

/// Throws InvalidArgument describing the first broken table invariant.
void check_integrity(const Topology& topology);

struct TopoTables {
  std::string nat;
  std::string aat;
  std::string pat;
  std::string pal;
};

/// CSV dumps of the NAT, AAT, PAT and PAL tables.
TopoTables to_tables(const Topology& topology);

struct PolylineSoup {
  std::vector<Polyline> lines;
  Bounds bounds;
};

/// Line format: `elevation; x1 y1, x2 y2, ...`. Optional directive
/// `bounds: minx miny maxx maxy`; `#` starts a comment line. Without a bounds
/// directive the bounding box of all vertices is used.
PolylineSoup parse_polyline_soup(std::string_view text);

/// Lines for the surviving arcs. Unmodified arcs reuse their source line from
/// `original`; merged arcs become new lines.
ContourSet to_contour_set(const Topology& topology, const ContourSet& original);

}  // namespace isoline
