// One PASS/FAIL line per acceptance criterion; exit status 1 if any fails.
#include <sys/wait.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <set>
#include <sstream>
#include <string>

#include "isoline/analysis.hpp"
#include "isoline/contour.hpp"
#include "isoline/elevation_io.hpp"
#include "isoline/error.hpp"
#include "isoline/mosaic.hpp"
#include "isoline/topology.hpp"
#include "test_support.hpp"

using namespace isoline;
using isoline::testing::make_grid;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok && pass) {
      pass = false;
      detail = what;
    }
  }
};

int failures = 0;

void report(const char* id, const char* title, const std::function<Outcome()>& body) {
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o.pass = false;
    o.detail = std::string("exception: ") + e.what();
  }
  if (!o.pass) ++failures;
  std::cout << id << ' ' << (o.pass ? "PASS" : "FAIL") << ' ' << title;
  if (!o.detail.empty()) std::cout << " (" << o.detail << ')';
  std::cout << std::endl;
}

double bilinear(const ElevationGrid& g, const std::pair<double, double>& v) {
  const auto& geo = g.georef();
  const double row = (geo.origin_lat - v.second) / geo.lat_step;
  const double col = (v.first - geo.origin_lon) / geo.lon_step;
  const auto r0 = static_cast<std::size_t>(std::clamp(std::floor(row), 0.0, static_cast<double>(g.rows() - 2)));
  const auto c0 = static_cast<std::size_t>(std::clamp(std::floor(col), 0.0, static_cast<double>(g.cols() - 2)));
  const double fr = row - static_cast<double>(r0);
  const double fc = col - static_cast<double>(c0);
  return g.at(r0, c0) * (1 - fr) * (1 - fc) + g.at(r0, c0 + 1) * (1 - fr) * fc + g.at(r0 + 1, c0) * fr * (1 - fc) +
         g.at(r0 + 1, c0 + 1) * fr * fc;
}

std::set<EdgeKey> straddling(const ElevationGrid& g, double level) {
  std::set<EdgeKey> out;
  const auto cross = [&](double a, double b) { return (a >= level) != (b >= level); };
  for (std::size_t r = 0; r < g.rows(); ++r) {
    for (std::size_t c = 0; c < g.cols(); ++c) {
      if (c + 1 < g.cols() && cross(g.at(r, c), g.at(r, c + 1))) out.insert({int(r), int(c), EdgeAxis::Horizontal});
      if (r + 1 < g.rows() && cross(g.at(r, c), g.at(r + 1, c))) out.insert({int(r), int(c), EdgeAxis::Vertical});
    }
  }
  return out;
}

bool same_line(const ContourLine& a, const ContourLine& b) {
  return a.level == b.level && a.vertices == b.vertices && a.closed == b.closed;
}

ElevationGrid sub_grid(const ElevationGrid& g, std::size_t r0, std::size_t c0, std::size_t rows, std::size_t cols) {
  GridGeoref geo = g.georef();
  geo.origin_lat = g.georef().row_lat(static_cast<double>(r0));
  geo.origin_lon = g.georef().col_lon(static_cast<double>(c0));
  return make_grid(rows, cols, [&](std::size_t r, std::size_t c) { return g.at(r0 + r, c0 + c); }, geo);
}

int closed_count(const ContourSet& cs, double level) {
  int n = 0;
  for (const auto& l : cs.lines) n += l.level == level && l.closed;
  return n;
}

Outcome ac1() {
  Outcome o;
  LevelSpec s;
  s.base = 400;
  s.interval = 100;
  const auto levels = enumerate_levels(362, 750, s);
  o.require(levels == std::vector<double>{400, 500, 600, 700}, "unexpected level list");
  return o;
}

Outcome ac2() {
  Outcome o;
  o.require(infer_interval(700, 800, 5) == 20.0, "interval differs from 20");
  return o;
}

Outcome ac3() {
  Outcome o;
  const auto g = make_grid(10, 26, [](std::size_t, std::size_t c) { return 690.0 + 5.0 * static_cast<double>(c); });
  LevelSpec s;
  s.base = 700;
  s.interval = 20;
  const auto cs = trace_contours(g, s);
  const auto at = [&](double col) { return std::pair{g.georef().col_lon(col), g.georef().row_lat(4.5)}; };
  const auto a = estimate_point_elevation(at(2), cs, 20);
  const auto b = estimate_point_elevation(at(10), cs, 20);
  const auto c = estimate_point_elevation(at(16), cs, 20);
  const auto d = estimate_point_elevation(at(24), cs, 20);
  o.require(a.estimate == 700 && a.kind == EstimateKind::OnContour, "A != 700");
  o.require(b.estimate == 740 && b.kind == EstimateKind::OnContour, "B != 740");
  o.require(std::abs(c.estimate - 770) <= 1e-9 && c.kind == EstimateKind::Bracketed, "C != 770 bracketed");
  o.require(d.estimate == 820 && d.kind == EstimateKind::Extrapolated, "D != 820 extrapolated");
  return o;
}

Outcome ac4() {
  Outcome o;
  // All sixteen corner patterns.
  for (int mask = 0; mask < 16; ++mask) {
    const auto g = make_grid(2, 2, [mask](std::size_t r, std::size_t c) {
      const int bit = r == 0 ? (c == 0 ? 8 : 4) : (c == 1 ? 2 : 1);
      return (mask & bit) ? 10.0 : 0.0;
    });
    std::set<EdgeKey> got;
    for (const auto& seg : level_segments(g, 5, CellRange{0, 1, 0, 1})) {
      got.insert(seg.from);
      got.insert(seg.to);
    }
    o.require(got == straddling(g, 5), "sign pattern " + std::to_string(mask));
  }
  std::mt19937_64 rng(4004);
  double worst = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const auto g = isoline::testing::random_int_grid(rng, 6, 6, 0, 9);
    for (int k = 0; k <= 18; ++k) {
      const double level = 0.5 * k;
      std::set<EdgeKey> got;
      for (const auto& seg : level_segments(g, level, CellRange{0, 5, 0, 5})) {
        got.insert(seg.from);
        got.insert(seg.to);
      }
      o.require(got == straddling(g, level), "grid " + std::to_string(trial) + " level " + std::to_string(level));
    }
    LevelSpec s;
    s.base = 0;
    s.interval = 0.5;
    const auto cs = trace_contours(g, s);
    std::map<double, std::set<EdgeKey>> traced;
    for (const auto& l : cs.lines) {
      traced[l.level].insert(l.source_keys.begin(), l.source_keys.end());
      for (const auto& v : l.vertices) worst = std::max(worst, std::abs(bilinear(g, v) - l.level));
    }
    for (const auto& [level, keys] : traced) {
      if (std::fmod(level, 1.0) != 0.0) {
        o.require(keys == straddling(g, level), "traced keys, grid " + std::to_string(trial));
      }
    }
  }
  o.require(worst < 1e-9, "vertex off level by " + std::to_string(worst));
  return o;
}

Outcome ac5() {
  Outcome o;
  std::mt19937_64 rng(5005);
  for (int trial = 0; trial < 100; ++trial) {
    const auto g = isoline::testing::smooth_random_grid(rng, 60, 60);
    LevelSpec fine;
    fine.interval = 5;
    LevelSpec coarse;
    coarse.interval = 10;
    const auto a = trace_contours(g, fine);
    const auto b = trace_contours(g, coarse);
    std::vector<const ContourLine*> shared;
    for (const auto& l : a.lines) {
      if (std::fmod(l.level, 10.0) == 0.0) shared.push_back(&l);
    }
    o.require(shared.size() == b.lines.size(), "line count differs on grid " + std::to_string(trial));
    for (std::size_t i = 0; i < std::min(shared.size(), b.lines.size()); ++i) {
      o.require(same_line(*shared[i], b.lines[i]), "line differs on grid " + std::to_string(trial));
    }
  }
  return o;
}

Outcome ac6() {
  Outcome o;
  std::mt19937_64 rng(6006);
  const auto g = isoline::testing::smooth_random_grid(rng, 100, 100);
  const auto m = mosaic_assemble(
      {sub_grid(g, 0, 0, 51, 51), sub_grid(g, 0, 50, 51, 50), sub_grid(g, 50, 0, 50, 51), sub_grid(g, 50, 50, 50, 50)});
  LevelSpec s;
  s.interval = 10;
  const auto pieces = trace_mosaic(m, s);
  const auto seams = seam_continuity_check(pieces, m);
  o.require(seams.seam_break_count == 0, std::to_string(seams.seam_break_count) + " seam breaks");
  const auto joined = stitch_tiles(pieces, m.view(), s);
  const auto whole = trace_contours(g, s);
  o.require(joined.lines.size() == whole.lines.size(), "line counts differ");
  for (std::size_t i = 0; i < std::min(joined.lines.size(), whole.lines.size()); ++i) {
    o.require(same_line(joined.lines[i], whole.lines[i]), "line " + std::to_string(i) + " differs");
  }
  return o;
}

Outcome ac7() {
  Outcome o;
  const std::vector<std::pair<const char*, const char*>> scenarios{
      {"dead-end spur", "500; 0 5, 5 5\n500; 5 5, 10 5\n500; 5 5, 5 6\n"},
      {"connection arcs", "500; 3 3, 2 2, 3 2, 3 3\n500; 7 3, 8 2, 8 3, 7 3\n500; 3 3, 5 4\n500; 5 4, 7 3\n500; 5 4, 5 10\n"},
      {"equal-elevation shared arc", "500; 2 3, 2 4, 4 4, 4 3\n500; 2 3, 2 2, 4 2, 4 3\n500; 2 3, 4 3\n"},
      {"polygon in contour", "500; 0 5, 2 5\n500; 2 5, 5 5\n500; 2 5, 2 8.5, 5 8.5, 5 5\n500; 5 5, 10 5\n"},
      {"touching polygons", "500; 3 5, 5 5\n500; 3 5, 3 7, 5 7, 5 5\n500; 5 5, 6 4, 7 5, 5 5\n"},
      {"cascade", "500; 0 5, 4 5\n500; 4 5, 10 5\n500; 4 5, 4 6\n500; 4 6, 4 7\n500; 4 6, 3 6.5\n"},
  };
  for (const auto& [name, text] : scenarios) {
    const auto soup = parse_polyline_soup(std::string("bounds: 0 0 10 10\n") + text);
    const auto t = build_topology(soup.lines, soup.bounds);
    o.require(has_deletable(t), std::string(name) + ": no defect detected");
    const auto r = clean(t);
    o.require(r.report.passes <= 4, std::string(name) + ": " + std::to_string(r.report.passes) + " passes");
    o.require(r.report.total_deleted() > 0, std::string(name) + ": nothing deleted");
    const auto again = classify(r.topology);
    o.require(!has_deletable(again), std::string(name) + ": deletable arcs remain");
    for (const auto& n : again.nodes) o.require(!n.status.has(NodeClass::DE), std::string(name) + ": DE node remains");
    check_integrity(r.topology);
    const auto twice = clean(r.topology);
    o.require(twice.topology == r.topology && twice.report.total_deleted() == 0, std::string(name) + ": not idempotent");
    o.require(to_tables(twice.topology).aat == to_tables(r.topology).aat, std::string(name) + ": tables differ");
  }
  return o;
}

Outcome ac8() {
  Outcome o;
  const auto g = make_grid(1201, 1201, [](std::size_t r, std::size_t c) {
    if (r == 7 && c == 11) return std::nan("");
    if (r == 0 && c == 0) return 400.0;
    return static_cast<double>(static_cast<int>((r * 7919 + c * 104729) % 9000) - 500);
  });
  const auto bytes = write_hgt(g);
  o.require(bytes.size() == 2884802, "payload is " + std::to_string(bytes.size()) + " bytes");
  o.require(bytes[0] == 0x01 && bytes[1] == 0x90, "400 not encoded as 01 90");
  const std::size_t void_at = 2 * (7 * 1201 + 11);
  o.require(bytes[void_at] == 0x80 && bytes[void_at + 1] == 0x00, "void not encoded as 80 00");
  const auto back = parse_hgt(bytes, hgt_tile_name(g));
  o.require(back == g, "round trip differs");
  return o;
}

Outcome ac9() {
  Outcome o;
  const auto hill = make_grid(97, 97, [](std::size_t r, std::size_t c) {
    if (r >= 40 && r <= 41 && c >= 40 && c <= 41) return 640.0;
    const double dr = static_cast<double>(r) - 48.25;
    const double dc = static_cast<double>(c) - 47.6;
    return 700.0 - 0.05 * (dr * dr + dc * dc);
  });
  LevelSpec s;
  s.explicit_levels = std::vector<double>{600, 625, 650};
  const auto before = trace_contours(hill, s);
  const auto after = trace_contours(degrade(hill, 3), s);
  o.require(closed_count(before, 650) == 2, "fine grid lacks the depression ring");
  o.require(closed_count(after, 650) == 1, "depression ring survived degradation");
  for (double level : {600.0, 625.0}) {
    o.require(closed_count(before, level) == 1 && closed_count(after, level) == 1, "enclosing ring lost");
  }
  std::mt19937_64 rng(9009);
  const auto smooth = isoline::testing::smooth_random_grid(rng, 129, 129);
  LevelSpec sweep;
  sweep.interval = 10;
  double previous = -1;
  std::ostringstream errs;
  for (int factor : {1, 2, 4, 8}) {
    const double err = check_against_dtm(trace_contours(degrade(smooth, factor), sweep), smooth).mean_abs_error;
    errs << (factor == 1 ? "" : ",") << err;
    o.require(err >= previous, "error decreased at factor " + std::to_string(factor));
    previous = err;
  }
  if (o.pass) o.detail = "mean errors " + errs.str();
  return o;
}

int run(const std::string& cmd) {
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Outcome ac10() {
  Outcome o;
  const auto dir = isoline::testing::scratch_dir("acceptance_cli");
  std::mt19937_64 rng(1010);
  save_grid(isoline::testing::smooth_random_grid(rng, 150, 140), dir / "terrain.asc");
  std::string geojson, svg;
  int runs = 0;
  for (const char* threads : {"1", "1", "1", "4"}) {
    const auto tag = std::to_string(runs++);
    const auto gj = dir / ("out" + tag + ".geojson");
    const auto sv = dir / ("out" + tag + ".svg");
    const int code = run(std::string(ISOLINE_CLI_PATH) + " contour " + (dir / "terrain.asc").string() +
                         " --interval 10 --threads " + threads + " --geojson " + gj.string() + " --svg " + sv.string() +
                         " > /dev/null");
    o.require(code == 0, "cli exit " + std::to_string(code));
    const auto g = slurp(gj);
    const auto s = slurp(sv);
    o.require(!g.empty() && !s.empty(), "empty output");
    if (geojson.empty()) {
      geojson = g;
      svg = s;
    }
    o.require(g == geojson, std::string("GeoJSON differs on run ") + tag);
    o.require(s == svg, std::string("SVG differs on run ") + tag);
  }
  return o;
}

}  // namespace

int main() {
  report("AC1", "level enumeration fixed point", ac1);
  report("AC2", "interval inference fixed point", ac2);
  report("AC3", "map-reading point estimates", ac3);
  report("AC4", "marching squares oracle equivalence", ac4);
  report("AC5", "interval nesting identity", ac5);
  report("AC6", "seam continuity", ac6);
  report("AC7", "topology cleaning scenarios", ac7);
  report("AC8", "HGT bit exactness", ac8);
  report("AC9", "degradation reproduction", ac9);
  report("AC10", "CLI determinism", ac10);
  return failures == 0 ? 0 : 1;
}
