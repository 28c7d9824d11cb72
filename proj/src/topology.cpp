#include "isoline/topology.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <limits>
#include <numbers>
#include <set>
#include <sstream>

#include "isoline/error.hpp"
#include "isoline/geometry.hpp"

namespace isoline {

namespace {

constexpr std::array<NodeClass, 4> kNodeClasses{NodeClass::DNG, NodeClass::DE, NodeClass::MAC, NodeClass::CIA};
constexpr std::array<ArcClass, 6> kArcClasses{ArcClass::DNG, ArcClass::DE,  ArcClass::AS2P,
                                              ArcClass::PIC, ArcClass::PTP, ArcClass::CoA};
// Deletion order within one cleaning pass.
constexpr std::array<ArcClass, 5> kDeletable{ArcClass::DE, ArcClass::CoA, ArcClass::AS2P, ArcClass::PIC,
                                             ArcClass::PTP};

std::string fmt(double v) {
  std::array<char, 64> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), res.ptr);
}

bool strictly_inside(const Bounds& b, const Point& p) {
  return p.first > b.min_lon && p.first < b.max_lon && p.second > b.min_lat && p.second < b.max_lat;
}

// Direction leaving the arc's start (forward) or end (backward).
double departure_angle(const TopoArc& a, bool forward) {
  const auto& v = a.vertices;
  if (forward) {
    for (std::size_t i = 1; i < v.size(); ++i) {
      if (v[i] != v[0]) return std::atan2(v[i].second - v[0].second, v[i].first - v[0].first);
    }
  } else {
    const Point& e = v.back();
    for (std::size_t i = v.size() - 1; i-- > 0;) {
      if (v[i] != e) return std::atan2(v[i].second - e.second, v[i].first - e.first);
    }
  }
  return 0.0;
}

struct FaceArea {
  double area = 0.0;
  double scale = 0.0;
};

FaceArea face_area(const std::vector<Point>& ring) {
  FaceArea out;
  if (ring.size() < 3) return out;
  double mean_lat = 0.0;
  for (const auto& p : ring) mean_lat += p.second;
  mean_lat /= static_cast<double>(ring.size());
  const geo::LocalFrame frame{mean_lat};
  const Point o = frame.to_meters(ring[0]);
  double twice = 0.0;
  for (std::size_t i = 0; i + 1 < ring.size(); ++i) {
    const Point a = frame.to_meters(ring[i]);
    const Point b = frame.to_meters(ring[i + 1]);
    const double term = (a.first - o.first) * (b.second - o.second) - (b.first - o.first) * (a.second - o.second);
    twice += term;
    out.scale += std::abs(term);
  }
  out.area = 0.5 * twice;
  return out;
}

// Drops arc-less nodes, renumbers ids densely, recomputes arc_per_node and
// rebuilds faces, polygons and left/right references. Classes are cleared.
void recompute(Topology& t) {
  std::vector<int> count(t.nodes.size() + 1, 0);
  for (const auto& a : t.arcs) {
    ++count[static_cast<std::size_t>(a.from_node)];
    ++count[static_cast<std::size_t>(a.to_node)];
  }
  std::vector<int> remap(t.nodes.size() + 1, 0);
  std::vector<TopoNode> nodes;
  for (std::size_t i = 0; i < t.nodes.size(); ++i) {
    if (count[i + 1] == 0) continue;
    TopoNode n = t.nodes[i];
    n.id = static_cast<int>(nodes.size()) + 1;
    n.arc_per_node = count[i + 1];
    n.status = {};
    remap[i + 1] = n.id;
    nodes.push_back(n);
  }
  t.nodes = std::move(nodes);
  for (std::size_t i = 0; i < t.arcs.size(); ++i) {
    auto& a = t.arcs[i];
    a.id = static_cast<int>(i) + 1;
    a.from_node = remap[static_cast<std::size_t>(a.from_node)];
    a.to_node = remap[static_cast<std::size_t>(a.to_node)];
    a.classes = {};
    a.left_polygon = 0;
    a.right_polygon = 0;
  }

  // Half-edge 2*i runs along arc i, 2*i+1 against it.
  const std::size_t he_count = 2 * t.arcs.size();
  const auto origin = [&](std::size_t h) {
    const auto& a = t.arcs[h / 2];
    return h % 2 == 0 ? a.from_node : a.to_node;
  };
  std::vector<std::vector<std::size_t>> outgoing(t.nodes.size() + 1);
  std::vector<double> angle(he_count);
  for (std::size_t h = 0; h < he_count; ++h) {
    angle[h] = departure_angle(t.arcs[h / 2], h % 2 == 0);
    outgoing[static_cast<std::size_t>(origin(h))].push_back(h);
  }
  std::vector<std::size_t> slot(he_count);
  for (auto& list : outgoing) {
    std::sort(list.begin(), list.end(), [&](std::size_t a, std::size_t b) {
      return angle[a] != angle[b] ? angle[a] < angle[b] : a < b;
    });
    for (std::size_t i = 0; i < list.size(); ++i) slot[list[i]] = i;
  }
  // Turning to the clockwise neighbour of the twin keeps the face on the left.
  const auto next = [&](std::size_t h) {
    const std::size_t twin = h ^ 1U;
    const auto& list = outgoing[static_cast<std::size_t>(origin(twin))];
    return list[(slot[twin] + list.size() - 1) % list.size()];
  };

  t.polygons.clear();
  std::vector<int> face_of(he_count, -1);
  std::vector<int> polygon_of_face;
  int face_id = 0;
  for (std::size_t start = 0; start < he_count; ++start) {
    if (face_of[start] != -1) continue;
    std::vector<std::size_t> cycle;
    std::size_t h = start;
    do {
      face_of[h] = face_id;
      cycle.push_back(h);
      h = next(h);
    } while (h != start);

    std::vector<Point> ring;
    for (std::size_t e : cycle) {
      const auto& v = t.arcs[e / 2].vertices;
      if (e % 2 == 0) {
        ring.insert(ring.end(), v.begin(), v.end() - 1);
      } else {
        ring.insert(ring.end(), v.rbegin(), v.rend() - 1);
      }
    }
    ring.push_back(ring.front());
    const FaceArea fa = face_area(ring);
    if (fa.area > 1e-9 * fa.scale && fa.area > 0.0) {
      TopoPolygon poly;
      poly.id = static_cast<int>(t.polygons.size()) + 1;
      poly.area = fa.area;
      std::set<std::size_t> arcs_here;
      std::multiset<std::size_t> seen;
      for (std::size_t e : cycle) {
        poly.arc_list.push_back(e % 2 == 0 ? static_cast<int>(e / 2) + 1 : -(static_cast<int>(e / 2) + 1));
        seen.insert(e / 2);
      }
      // Elevation from arcs that separate this face from another one.
      bool first = true;
      for (std::size_t e : cycle) {
        if (seen.count(e / 2) > 1) continue;
        const double z = t.arcs[e / 2].elevation;
        if (first) {
          poly.elevation = z;
          first = false;
        } else if (z != poly.elevation) {
          poly.uniform_elevation = false;
        }
      }
      if (first) poly.elevation = t.arcs[cycle.front() / 2].elevation;
      polygon_of_face.push_back(poly.id);
      t.polygons.push_back(std::move(poly));
    } else {
      polygon_of_face.push_back(0);
    }
    ++face_id;
  }
  for (std::size_t i = 0; i < t.arcs.size(); ++i) {
    auto& a = t.arcs[i];
    const int lf = face_of[2 * i];
    const int rf = face_of[2 * i + 1];
    a.left_polygon = polygon_of_face[static_cast<std::size_t>(lf)];
    a.right_polygon = polygon_of_face[static_cast<std::size_t>(rf)];
    a.bridge = lf == rf;
  }
}

std::vector<std::vector<int>> incidence(const Topology& t) {
  std::vector<std::vector<int>> inc(t.nodes.size() + 1);
  for (const auto& a : t.arcs) {
    inc[static_cast<std::size_t>(a.from_node)].push_back(a.id);
    inc[static_cast<std::size_t>(a.to_node)].push_back(a.id);
  }
  return inc;
}

std::vector<Point> reversed(const std::vector<Point>& v) { return {v.rbegin(), v.rend()}; }

}  // namespace

std::string_view class_name(NodeClass c) {
  switch (c) {
    case NodeClass::DNG:
      return "DNG";
    case NodeClass::DE:
      return "DE";
    case NodeClass::MAC:
      return "MAC";
    case NodeClass::CIA:
      return "CIA";
  }
  return "?";
}

std::string_view class_name(ArcClass c) {
  switch (c) {
    case ArcClass::DNG:
      return "DNG";
    case ArcClass::DE:
      return "DE";
    case ArcClass::AS2P:
      return "AS2P";
    case ArcClass::PIC:
      return "PIC";
    case ArcClass::PTP:
      return "PTP";
    case ArcClass::CoA:
      return "CoA";
  }
  return "?";
}

std::string to_string(ClassSet<NodeClass> s) {
  std::string out;
  for (NodeClass c : kNodeClasses) {
    if (!s.has(c)) continue;
    if (!out.empty()) out += '|';
    out += class_name(c);
  }
  return out.empty() ? "Regular" : out;
}

std::string to_string(ClassSet<ArcClass> s) {
  std::string out;
  for (ArcClass c : kArcClasses) {
    if (!s.has(c)) continue;
    if (!out.empty()) out += '|';
    out += class_name(c);
  }
  return out.empty() ? "Regular" : out;
}

int CleanReport::total_deleted() const {
  int n = 0;
  for (const auto& [cls, count] : deleted) n += count;
  return n;
}

Topology build_topology(std::span<const Polyline> lines, const Bounds& dataset_bounds) {
  Topology t;
  t.bounds = dataset_bounds;
  std::map<Point, int> node_at;
  const auto node_for = [&](const Point& p) {
    const auto [it, inserted] = node_at.emplace(p, static_cast<int>(t.nodes.size()) + 1);
    if (inserted) {
      TopoNode n;
      n.id = it->second;
      n.position = p;
      n.on_boundary = !strictly_inside(dataset_bounds, p);
      t.nodes.push_back(n);
    }
    return it->second;
  };
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const Polyline& pl = lines[i];
    if (pl.vertices.size() < 2) {
      throw Error(ErrorCode::InvalidArgument, "polyline " + std::to_string(i) + " has fewer than 2 vertices");
    }
    TopoArc a;
    a.vertices = pl.vertices;
    a.elevation = pl.elevation;
    a.length = geo::polyline_length_m(a.vertices);
    if (!(a.length > 0.0)) {
      throw Error(ErrorCode::ZeroLengthArc, "polyline " + std::to_string(i) + " collapses to a point");
    }
    a.from_node = node_for(pl.vertices.front());
    a.to_node = node_for(pl.vertices.back());
    if (pl.boundary_terminated) {
      t.nodes[static_cast<std::size_t>(a.from_node - 1)].on_boundary = true;
      t.nodes[static_cast<std::size_t>(a.to_node - 1)].on_boundary = true;
    }
    a.source_line = i;
    t.arcs.push_back(std::move(a));
  }
  recompute(t);
  return classify(std::move(t));
}

Topology build_topology(const ContourSet& contours) {
  std::vector<Polyline> lines;
  lines.reserve(contours.lines.size());
  for (const auto& l : contours.lines) {
    lines.push_back(Polyline{l.level, l.vertices, l.boundary_terminated});
  }
  return build_topology(lines, contours.bounds);
}

Topology classify(Topology t) {
  const auto inc = incidence(t);
  for (auto& n : t.nodes) {
    n.status = {};
    if (n.arc_per_node == 1) {
      n.status.add(NodeClass::DNG);
      if (!n.on_boundary) n.status.add(NodeClass::DE);
    }
    if (n.arc_per_node > 2) n.status.add(NodeClass::MAC);
  }
  for (const auto& a : t.arcs) {
    if (a.closed()) t.nodes[static_cast<std::size_t>(a.from_node - 1)].status.add(NodeClass::CIA);
  }
  const auto node = [&](int id) -> const TopoNode& { return t.nodes[static_cast<std::size_t>(id - 1)]; };
  const auto arc = [&](int id) -> TopoArc& { return t.arcs[static_cast<std::size_t>(id - 1)]; };
  const auto poly = [&](int id) -> const TopoPolygon& { return t.polygons[static_cast<std::size_t>(id - 1)]; };

  for (auto& a : t.arcs) {
    a.classes = {};
    const auto& f = node(a.from_node);
    const auto& to = node(a.to_node);
    if (f.status.has(NodeClass::DNG) || to.status.has(NodeClass::DNG)) a.classes.add(ArcClass::DNG);
    if (f.status.has(NodeClass::DE) || to.status.has(NodeClass::DE)) a.classes.add(ArcClass::DE);
    if (a.left_polygon != 0 && a.right_polygon != 0 && a.left_polygon != a.right_polygon) {
      const auto& l = poly(a.left_polygon);
      const auto& r = poly(a.right_polygon);
      if (l.uniform_elevation && r.uniform_elevation && l.elevation == r.elevation) a.classes.add(ArcClass::AS2P);
    }
    if (!a.closed() && a.bridge && f.status.has(NodeClass::MAC) && to.status.has(NodeClass::MAC)) {
      const auto touches_polygon = [&](int node_id) {
        for (int other : inc[static_cast<std::size_t>(node_id)]) {
          if (other != a.id && !arc(other).bridge) return true;
        }
        return false;
      };
      if (touches_polygon(a.from_node) || touches_polygon(a.to_node)) a.classes.add(ArcClass::CoA);
    }
  }

  std::vector<std::set<int>> poly_nodes(t.polygons.size());
  std::vector<std::set<int>> poly_arcs(t.polygons.size());
  for (std::size_t i = 0; i < t.polygons.size(); ++i) {
    for (int ref : t.polygons[i].arc_list) {
      const auto& a = arc(std::abs(ref));
      poly_arcs[i].insert(a.id);
      poly_nodes[i].insert(a.from_node);
      poly_nodes[i].insert(a.to_node);
    }
  }
  for (std::size_t i = 0; i < t.polygons.size(); ++i) {
    const auto& p = t.polygons[i];
    if (p.arc_list.size() != 2 || poly_arcs[i].size() != 2) continue;
    TopoArc& a1 = arc(std::abs(p.arc_list[0]));
    TopoArc& a2 = arc(std::abs(p.arc_list[1]));
    if (a1.closed() || a2.closed()) continue;
    TopoArc& longer = a1.length > a2.length ? a1 : a2.length > a1.length ? a2 : (a1.id > a2.id ? a1 : a2);
    bool in_open_contour = false;
    for (int n : poly_nodes[i]) {
      for (int other : inc[static_cast<std::size_t>(n)]) {
        if (other != a1.id && other != a2.id && arc(other).bridge) in_open_contour = true;
      }
    }
    if (in_open_contour) longer.classes.add(ArcClass::PIC);
    for (std::size_t j = 0; j < t.polygons.size(); ++j) {
      if (j == i) continue;
      std::vector<int> shared_nodes;
      std::set_intersection(poly_nodes[i].begin(), poly_nodes[i].end(), poly_nodes[j].begin(), poly_nodes[j].end(),
                            std::back_inserter(shared_nodes));
      std::vector<int> shared_arcs;
      std::set_intersection(poly_arcs[i].begin(), poly_arcs[i].end(), poly_arcs[j].begin(), poly_arcs[j].end(),
                            std::back_inserter(shared_arcs));
      if (shared_nodes.size() == 1 && shared_arcs.empty()) {
        longer.classes.add(ArcClass::PTP);
        break;
      }
    }
  }
  return t;
}

bool has_deletable(const Topology& t) {
  return std::any_of(t.arcs.begin(), t.arcs.end(), [](const TopoArc& a) {
    return std::any_of(kDeletable.begin(), kDeletable.end(), [&](ArcClass c) { return a.classes.has(c); });
  });
}

DissolveResult dissolve_degree2(Topology t) {
  DissolveResult out;
  std::vector<std::vector<std::size_t>> inc(t.nodes.size() + 1);
  for (std::size_t i = 0; i < t.arcs.size(); ++i) {
    inc[static_cast<std::size_t>(t.arcs[i].from_node)].push_back(i);
    inc[static_cast<std::size_t>(t.arcs[i].to_node)].push_back(i);
  }
  std::vector<bool> dead(t.arcs.size(), false);
  for (const auto& n : t.nodes) {
    const auto& list = inc[static_cast<std::size_t>(n.id)];
    if (n.on_boundary || list.size() != 2 || list[0] == list[1]) continue;
    const std::size_t x = std::min(list[0], list[1]);
    const std::size_t y = std::max(list[0], list[1]);
    TopoArc& a = t.arcs[x];
    const TopoArc& b = t.arcs[y];
    if (a.elevation != b.elevation) {
      out.elevation_mismatches.push_back(n.position);
      continue;
    }
    const int b_other = b.from_node == n.id ? b.to_node : b.from_node;
    std::vector<Point> merged;
    if (a.to_node == n.id) {
      // a keeps its direction and continues into b.
      merged = a.vertices;
      const auto tail = b.from_node == n.id ? b.vertices : reversed(b.vertices);
      merged.insert(merged.end(), tail.begin() + 1, tail.end());
      a.to_node = b_other;
    } else {
      merged = b.to_node == n.id ? b.vertices : reversed(b.vertices);
      merged.insert(merged.end(), a.vertices.begin() + 1, a.vertices.end());
      a.from_node = b_other;
    }
    a.vertices = std::move(merged);
    a.length += b.length;
    a.source_line.reset();
    dead[y] = true;
    auto& other_list = inc[static_cast<std::size_t>(b_other)];
    std::replace(other_list.begin(), other_list.end(), y, x);
    inc[static_cast<std::size_t>(n.id)].clear();
    ++out.dissolved;
  }
  std::vector<TopoArc> arcs;
  for (std::size_t i = 0; i < t.arcs.size(); ++i) {
    if (!dead[i]) arcs.push_back(std::move(t.arcs[i]));
  }
  t.arcs = std::move(arcs);
  recompute(t);
  out.topology = classify(std::move(t));
  return out;
}

CleanResult clean(Topology t, int max_passes) {
  if (max_passes < 1) throw Error(ErrorCode::InvalidArgument, "max_passes must be at least 1");
  CleanResult result;
  for (ArcClass c : kDeletable) result.report.deleted[c] = 0;
  t = classify(std::move(t));
  do {
    ++result.report.passes;
    std::vector<bool> doomed(t.arcs.size(), false);
    for (ArcClass c : kDeletable) {
      for (std::size_t i = 0; i < t.arcs.size(); ++i) {
        if (!doomed[i] && t.arcs[i].classes.has(c)) {
          doomed[i] = true;
          ++result.report.deleted[c];
        }
      }
    }
    std::vector<TopoArc> kept;
    for (std::size_t i = 0; i < t.arcs.size(); ++i) {
      if (!doomed[i]) kept.push_back(std::move(t.arcs[i]));
    }
    t.arcs = std::move(kept);
    recompute(t);
    DissolveResult d = dissolve_degree2(std::move(t));
    result.report.dissolved += d.dissolved;
    result.report.elevation_mismatches = d.elevation_mismatches;
    t = std::move(d.topology);
  } while (has_deletable(t) && result.report.passes < max_passes);
  if (has_deletable(t)) {
    throw Error(ErrorCode::NotConverged,
                "topology still has deletable arcs after " + std::to_string(max_passes) + " passes");
  }
  result.topology = std::move(t);
  return result;
}

void check_integrity(const Topology& t) {
  const auto fail = [](const std::string& what) { throw Error(ErrorCode::InvalidArgument, what); };
  std::vector<int> count(t.nodes.size() + 1, 0);
  for (std::size_t i = 0; i < t.nodes.size(); ++i) {
    if (t.nodes[i].id != static_cast<int>(i) + 1) fail("NAT ids are not dense");
  }
  const auto valid_node = [&](int id) { return id >= 1 && id <= static_cast<int>(t.nodes.size()); };
  const auto valid_poly = [&](int id) { return id >= 0 && id <= static_cast<int>(t.polygons.size()); };
  for (std::size_t i = 0; i < t.arcs.size(); ++i) {
    const auto& a = t.arcs[i];
    if (a.id != static_cast<int>(i) + 1) fail("AAT ids are not dense");
    if (!valid_node(a.from_node) || !valid_node(a.to_node)) fail("AAT node reference missing from NAT");
    if (!valid_poly(a.left_polygon) || !valid_poly(a.right_polygon)) fail("AAT polygon reference missing from PAT");
    if (!(a.length > 0.0)) fail("arc with non-positive length");
    if (a.vertices.front() != t.node(a.from_node).position || a.vertices.back() != t.node(a.to_node).position) {
      fail("arc endpoints do not sit on their nodes");
    }
    if (a.classes.has(ArcClass::DE) && !a.classes.has(ArcClass::DNG)) fail("DE arc that is not DNG");
    ++count[static_cast<std::size_t>(a.from_node)];
    ++count[static_cast<std::size_t>(a.to_node)];
  }
  for (const auto& n : t.nodes) {
    if (n.arc_per_node != count[static_cast<std::size_t>(n.id)]) fail("arc_per_node disagrees with AAT");
    if (n.status.has(NodeClass::DE) && (n.arc_per_node != 1 || n.on_boundary)) fail("DE node invariant broken");
    if (n.status.has(NodeClass::MAC) && n.arc_per_node <= 2) fail("MAC node with two or fewer arcs");
  }
  for (std::size_t i = 0; i < t.polygons.size(); ++i) {
    const auto& p = t.polygons[i];
    if (p.id != static_cast<int>(i) + 1) fail("PAT ids are not dense");
    if (!(p.area > 0.0)) fail("polygon with non-positive area");
    if (p.arc_list.empty()) fail("polygon with empty PAL entry");
    for (std::size_t k = 0; k < p.arc_list.size(); ++k) {
      const int ref = p.arc_list[k];
      const int nref = p.arc_list[(k + 1) % p.arc_list.size()];
      if (ref == 0 || std::abs(ref) > static_cast<int>(t.arcs.size()) || nref == 0 ||
          std::abs(nref) > static_cast<int>(t.arcs.size())) {
        fail("PAL arc reference missing from AAT");
      }
      const auto& a = t.arc(std::abs(ref));
      const auto& b = t.arc(std::abs(nref));
      const int end = ref > 0 ? a.to_node : a.from_node;
      const int start = nref > 0 ? b.from_node : b.to_node;
      if (end != start) fail("PAL entry does not form a closed ring");
      const int side = ref > 0 ? a.left_polygon : a.right_polygon;
      if (side != p.id) fail("PAL and AAT disagree on polygon side");
    }
  }
}

TopoTables to_tables(const Topology& t) {
  TopoTables out;
  std::ostringstream nat;
  nat << "id,x,y,arc_per_node,status\n";
  for (const auto& n : t.nodes) {
    nat << n.id << ',' << fmt(n.position.first) << ',' << fmt(n.position.second) << ',' << n.arc_per_node << ','
        << to_string(n.status) << '\n';
  }
  std::ostringstream aat;
  aat << "id,FNODE#,TNODE#,length,elevation,LPOLY#,RPOLY#\n";
  for (const auto& a : t.arcs) {
    aat << a.id << ',' << a.from_node << ',' << a.to_node << ',' << fmt(a.length) << ',' << fmt(a.elevation) << ','
        << a.left_polygon << ',' << a.right_polygon << '\n';
  }
  std::ostringstream pat;
  pat << "id,elevation,area\n";
  for (const auto& p : t.polygons) pat << p.id << ',' << fmt(p.elevation) << ',' << fmt(p.area) << '\n';
  std::ostringstream pal;
  pal << "polygon_id,seq,arc_id\n";
  for (const auto& p : t.polygons) {
    for (std::size_t k = 0; k < p.arc_list.size(); ++k) pal << p.id << ',' << k + 1 << ',' << p.arc_list[k] << '\n';
  }
  out.nat = nat.str();
  out.aat = aat.str();
  out.pat = pat.str();
  out.pal = pal.str();
  return out;
}

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::vector<double> numbers(std::string_view s, std::size_t line_no) {
  std::vector<double> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
    if (i >= s.size()) break;
    std::size_t j = i;
    while (j < s.size() && !std::isspace(static_cast<unsigned char>(s[j]))) ++j;
    std::string_view tok = s.substr(i, j - i);
    if (!tok.empty() && tok.front() == '+') tok.remove_prefix(1);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (ec != std::errc() || ptr != tok.data() + tok.size() || !std::isfinite(v)) {
      throw Error(ErrorCode::MalformedVector, "line " + std::to_string(line_no) + ": bad number '" +
                                                  std::string(s.substr(i, j - i)) + "'");
    }
    out.push_back(v);
    i = j;
  }
  return out;
}

}  // namespace

PolylineSoup parse_polyline_soup(std::string_view text) {
  PolylineSoup soup;
  std::optional<Bounds> declared;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    const std::string_view line = trim(text.substr(pos, end - pos));
    ++line_no;
    pos = end + 1;
    if (line.empty() || line.front() == '#') {
      if (end == text.size()) break;
      continue;
    }
    if (line.rfind("bounds:", 0) == 0) {
      const auto v = numbers(line.substr(7), line_no);
      if (v.size() != 4 || !(v[0] < v[2]) || !(v[1] < v[3])) {
        throw Error(ErrorCode::MalformedVector, "line " + std::to_string(line_no) + ": bounds needs minx miny maxx maxy");
      }
      declared = Bounds{v[0], v[1], v[2], v[3]};
    } else {
      const auto semi = line.find(';');
      if (semi == std::string_view::npos) {
        throw Error(ErrorCode::MalformedVector, "line " + std::to_string(line_no) + ": missing ';' after elevation");
      }
      const auto z = numbers(line.substr(0, semi), line_no);
      if (z.size() != 1) {
        throw Error(ErrorCode::MalformedVector, "line " + std::to_string(line_no) + ": expected one elevation");
      }
      Polyline pl;
      pl.elevation = z[0];
      std::string_view rest = line.substr(semi + 1);
      while (true) {
        const auto comma = rest.find(',');
        const auto xy = numbers(rest.substr(0, comma), line_no);
        if (xy.size() != 2) {
          throw Error(ErrorCode::MalformedVector, "line " + std::to_string(line_no) + ": vertex needs 'x y'");
        }
        pl.vertices.emplace_back(xy[0], xy[1]);
        if (comma == std::string_view::npos) break;
        rest = rest.substr(comma + 1);
      }
      if (pl.vertices.size() < 2) {
        throw Error(ErrorCode::MalformedVector, "line " + std::to_string(line_no) + ": polyline needs 2 vertices");
      }
      soup.lines.push_back(std::move(pl));
    }
    if (end == text.size()) break;
  }
  if (declared) {
    soup.bounds = *declared;
  } else {
    Bounds b{std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity(),
             -std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
    for (const auto& pl : soup.lines) {
      for (const auto& [x, y] : pl.vertices) {
        b.min_lon = std::min(b.min_lon, x);
        b.min_lat = std::min(b.min_lat, y);
        b.max_lon = std::max(b.max_lon, x);
        b.max_lat = std::max(b.max_lat, y);
      }
    }
    soup.bounds = soup.lines.empty() ? Bounds{} : b;
  }
  return soup;
}

ContourSet to_contour_set(const Topology& t, const ContourSet& original) {
  ContourSet out;
  out.levels = original.levels;
  out.level_values = original.level_values;
  out.grid_fingerprint = original.grid_fingerprint;
  out.bounds = original.bounds;
  std::vector<std::size_t> reused;
  std::vector<ContourLine> fresh;
  for (const auto& a : t.arcs) {
    if (a.source_line && *a.source_line < original.lines.size() &&
        original.lines[*a.source_line].vertices == a.vertices) {
      reused.push_back(*a.source_line);
      continue;
    }
    ContourLine l;
    l.level = a.elevation;
    l.vertices = a.vertices;
    l.closed = a.closed();
    l.boundary_terminated = !l.closed;
    l.is_index = is_index_level(a.elevation, original.levels);
    fresh.push_back(std::move(l));
  }
  std::sort(reused.begin(), reused.end());
  std::sort(fresh.begin(), fresh.end(), [](const ContourLine& x, const ContourLine& y) {
    if (x.level != y.level) return x.level < y.level;
    return x.vertices.front() < y.vertices.front();
  });
  std::vector<ContourLine> merged;
  for (std::size_t i : reused) merged.push_back(original.lines[i]);
  for (auto& l : fresh) merged.push_back(std::move(l));
  std::stable_sort(merged.begin(), merged.end(),
                   [](const ContourLine& x, const ContourLine& y) { return x.level < y.level; });
  out.lines = std::move(merged);
  return out;
}

}  // namespace isoline
