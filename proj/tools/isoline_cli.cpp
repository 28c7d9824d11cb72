#include <cstdio>
#include <filesystem>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "isoline/isoline.h"

namespace {

constexpr int kExitUsage = 2;

struct Options {
  std::vector<std::string> inputs;
  double base = 0.0;
  double interval = 50.0;
  std::vector<double> levels;
  int index_every = 5;
  std::string geojson;
  std::string svg;
  std::string report;
  std::string tables;
  std::string output;
  int factor = 0;
  std::string unit = "m";
  unsigned threads = 1;
};

// Thrown after an error line has been printed.
struct Failure {
  int exit_code;
};

int exit_code_for(int status) {
  switch (isoline_status_category(status)) {
    case ISOLINE_CATEGORY_PARSE:
      return 3;
    case ISOLINE_CATEGORY_IO:
      return 5;
    case ISOLINE_CATEGORY_USAGE:
      return kExitUsage;
    default:
      return 4;
  }
}

std::string quoted(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    if (c == '\n') {
      out += "\\n";
      continue;
    }
    out += c;
  }
  return out + '"';
}

void print_error(const std::string& code, const std::string& path, const std::string& message) {
  std::cerr << "error: code=" << code << " path=" << (path.empty() ? "-" : path) << " message=" << quoted(message)
            << '\n';
}

void check(int status, const std::string& path) {
  if (status == ISOLINE_OK) return;
  print_error(isoline_status_name(status), path, isoline_last_error());
  throw Failure{exit_code_for(status)};
}

[[noreturn]] void usage_error(const std::string& message, const std::string& path = "") {
  print_error("UsageError", path, message);
  throw Failure{kExitUsage};
}

template <typename T, void (*Free)(T*)>
struct Deleter {
  void operator()(T* p) const { Free(p); }
};
using Grid = std::unique_ptr<isoline_grid, Deleter<isoline_grid, isoline_grid_free>>;
using Contours = std::unique_ptr<isoline_contours, Deleter<isoline_contours, isoline_contours_free>>;
using Topo = std::unique_ptr<isoline_topology, Deleter<isoline_topology, isoline_topology_free>>;
using Mosaic = std::unique_ptr<isoline_mosaic, Deleter<isoline_mosaic, isoline_mosaic_free>>;
using Report = std::unique_ptr<isoline_report, Deleter<isoline_report, isoline_report_free>>;

bool is_vector_path(const std::string& p) {
  const auto ext = std::filesystem::path(p).extension().string();
  return ext == ".geojson" || ext == ".json";
}

std::string joined(const std::vector<std::string>& v) {
  std::string out;
  for (const auto& s : v) out += (out.empty() ? "" : ";") + s;
  return out;
}

Grid load_grid(const std::string& path) {
  isoline_grid* g = nullptr;
  check(isoline_grid_load(path.c_str(), &g), path);
  return Grid(g);
}

Contours load_contours(const std::string& path) {
  isoline_contours* c = nullptr;
  check(isoline_contours_load_geojson(path.c_str(), &c), path);
  return Contours(c);
}

isoline_level_spec level_spec(const Options& o) {
  isoline_level_spec spec;
  isoline_level_spec_init(&spec);
  spec.base = o.base;
  spec.interval = o.interval;
  spec.index_every = o.index_every;
  if (!o.levels.empty()) {
    spec.levels = o.levels.data();
    spec.level_count = o.levels.size();
  }
  return spec;
}

void write_outputs(const Options& o, const isoline_contours* c) {
  if (!o.geojson.empty()) check(isoline_contours_write_geojson(c, o.geojson.c_str()), o.geojson);
  if (!o.svg.empty()) check(isoline_contours_write_svg(c, o.svg.c_str(), o.unit == "ft"), o.svg);
}

void emit_report(const Options& o, const isoline_report* r) {
  if (o.report.empty()) {
    std::cout << isoline_report_json(r);
  } else {
    check(isoline_report_write(r, o.report.c_str()), o.report);
  }
}

void print_levels(const isoline_contours* c) {
  size_t n = 0;
  check(isoline_contours_levels(c, nullptr, 0, &n), "");
  std::vector<double> levels(n);
  check(isoline_contours_levels(c, levels.data(), levels.size(), &n), "");
  std::cout << "lines=" << isoline_contours_line_count(c) << " levels=";
  for (size_t i = 0; i < levels.size(); ++i) std::cout << (i ? "," : "") << levels[i];
  std::cout << '\n';
}

Contours clean_contours(const Options& o, const isoline_contours* traced, const std::string& path) {
  isoline_topology* t = nullptr;
  check(isoline_topology_build(traced, &t), path);
  Topo topo(t);
  isoline_clean_report rep{};
  check(isoline_topology_clean(topo.get(), 16, &rep), path);
  if (!o.tables.empty()) check(isoline_topology_write_tables(topo.get(), o.tables.c_str()), o.tables);
  isoline_contours* c = nullptr;
  check(isoline_topology_to_contours(topo.get(), traced, &c), path);
  return Contours(c);
}

void validate_report(const Options& o, const isoline_contours* c, const isoline_grid* g, const std::string& path) {
  if (o.report.empty()) return;
  isoline_report* r = nullptr;
  check(isoline_validate(&c, &g, 1, 32, &r), path);
  Report report(r);
  emit_report(o, report.get());
}

void cmd_info(const Options& o) {
  for (const auto& path : o.inputs) {
    if (is_vector_path(path)) {
      const auto c = load_contours(path);
      std::cout << path << ": ";
      print_levels(c.get());
      continue;
    }
    const auto g = load_grid(path);
    isoline_grid_info info{};
    check(isoline_grid_info_get(g.get(), &info), path);
    std::cout << path << ": rows=" << info.rows << " cols=" << info.cols << " origin=" << info.origin_lat << ','
              << info.origin_lon << " step=" << info.lat_step << ',' << info.lon_step
              << " registration=" << (info.cell_centered ? "cell" : "point") << " voids=" << info.void_count;
    if (!info.all_void) std::cout << " min=" << info.min_elevation << " max=" << info.max_elevation;
    std::cout << " fingerprint=" << info.fingerprint << '\n';
  }
}

void cmd_contour(const Options& o) {
  if (o.inputs.size() != 1) usage_error("contour takes exactly one grid");
  const auto& path = o.inputs[0];
  const auto g = load_grid(path);
  const auto spec = level_spec(o);
  isoline_contours* raw = nullptr;
  check(isoline_trace(g.get(), &spec, o.threads, &raw), path);
  const Contours traced(raw);
  const auto cleaned = clean_contours(o, traced.get(), path);
  write_outputs(o, cleaned.get());
  validate_report(o, cleaned.get(), g.get(), path);
  print_levels(cleaned.get());
}

void cmd_clean(const Options& o) {
  if (o.inputs.size() != 1) usage_error("clean takes exactly one vector file");
  const auto& path = o.inputs[0];
  if (is_vector_path(path)) {
    const auto c = load_contours(path);
    const auto cleaned = clean_contours(o, c.get(), path);
    write_outputs(o, cleaned.get());
    print_levels(cleaned.get());
    return;
  }
  if (!o.geojson.empty() || !o.svg.empty()) usage_error("polyline text input only supports --tables", path);
  FILE* f = std::fopen(path.c_str(), "rb");
  if (!f) {
    print_error("IoFailure", path, "cannot open file");
    throw Failure{5};
  }
  std::string text;
  char buf[65536];
  size_t n = 0;
  while ((n = std::fread(buf, 1, sizeof buf, f)) > 0) text.append(buf, n);
  std::fclose(f);
  isoline_topology* t = nullptr;
  check(isoline_topology_parse_soup(text.data(), text.size(), &t), path);
  const Topo topo(t);
  isoline_clean_report rep{};
  check(isoline_topology_clean(topo.get(), 16, &rep), path);
  if (!o.tables.empty()) check(isoline_topology_write_tables(topo.get(), o.tables.c_str()), o.tables);
  size_t nodes = 0;
  size_t arcs = 0;
  size_t polys = 0;
  check(isoline_topology_counts(topo.get(), &nodes, &arcs, &polys), path);
  std::cout << "passes=" << rep.passes << " deleted=DE:" << rep.deleted_de << ",CoA:" << rep.deleted_coa
            << ",AS2P:" << rep.deleted_as2p << ",PIC:" << rep.deleted_pic << ",PTP:" << rep.deleted_ptp
            << " dissolved=" << rep.dissolved << " nodes=" << nodes << " arcs=" << arcs << " polygons=" << polys
            << '\n';
}

void cmd_mosaic(const Options& o) {
  if (o.inputs.empty()) usage_error("mosaic needs at least one tile");
  std::vector<Grid> grids;
  std::vector<const isoline_grid*> handles;
  for (const auto& p : o.inputs) {
    grids.push_back(load_grid(p));
    handles.push_back(grids.back().get());
  }
  const std::string all = joined(o.inputs);
  isoline_mosaic* m = nullptr;
  check(isoline_mosaic_assemble(handles.data(), handles.size(), &m), all);
  const Mosaic mosaic(m);
  const auto spec = level_spec(o);
  isoline_contours* raw = nullptr;
  int breaks = 0;
  check(isoline_mosaic_trace(mosaic.get(), &spec, o.threads, &raw, &breaks), all);
  const Contours traced(raw);
  const auto cleaned = clean_contours(o, traced.get(), all);
  write_outputs(o, cleaned.get());
  isoline_grid* v = nullptr;
  check(isoline_mosaic_view(mosaic.get(), &v), all);
  const Grid view(v);
  validate_report(o, cleaned.get(), view.get(), all);
  std::cout << "seam_breaks=" << breaks << ' ';
  print_levels(cleaned.get());
}

void cmd_compare(const Options& o) {
  if (o.inputs.size() != 2) usage_error("compare takes exactly two vector files");
  const auto a = load_contours(o.inputs[0]);
  const auto b = load_contours(o.inputs[1]);
  isoline_report* r = nullptr;
  check(isoline_compare(a.get(), b.get(), &r), joined(o.inputs));
  const Report report(r);
  emit_report(o, report.get());
}

void cmd_validate(const Options& o) {
  std::vector<std::string> vec_paths;
  std::vector<std::string> grid_paths;
  for (const auto& p : o.inputs) (is_vector_path(p) ? vec_paths : grid_paths).push_back(p);
  if (vec_paths.empty() || grid_paths.empty()) usage_error("validate needs contour files and grids");
  std::vector<Contours> sets;
  std::vector<const isoline_contours*> set_handles;
  for (const auto& p : vec_paths) {
    sets.push_back(load_contours(p));
    set_handles.push_back(sets.back().get());
  }
  std::vector<Grid> grids;
  std::vector<const isoline_grid*> grid_handles;
  for (const auto& p : grid_paths) {
    grids.push_back(load_grid(p));
    grid_handles.push_back(grids.back().get());
  }
  isoline_report* r = nullptr;
  const std::string all = joined(o.inputs);
  if (vec_paths.size() == grid_paths.size()) {
    check(isoline_validate(set_handles.data(), grid_handles.data(), grids.size(), 32, &r), all);
  } else if (vec_paths.size() == 1) {
    check(isoline_validate_mosaic(set_handles[0], grid_handles.data(), grids.size(), 32, &r), all);
  } else {
    usage_error("give one contour file per grid, or one contour file for a tile set", all);
  }
  const Report report(r);
  emit_report(o, report.get());
}

void cmd_degrade(const Options& o) {
  if (o.inputs.size() != 1) usage_error("degrade takes exactly one grid");
  if (o.factor < 1) usage_error("degrade needs --factor N with N >= 1", o.inputs[0]);
  if (o.output.empty()) usage_error("degrade needs -o/--output PATH", o.inputs[0]);
  const auto g = load_grid(o.inputs[0]);
  isoline_grid* d = nullptr;
  check(isoline_grid_degrade(g.get(), o.factor, &d), o.inputs[0]);
  const Grid degraded(d);
  check(isoline_grid_save(degraded.get(), o.output.c_str()), o.output);
}

void add_common(CLI::App* cmd, Options& o, bool needs_inputs) {
  auto* in = cmd->add_option("inputs", o.inputs, "Input files");
  if (needs_inputs) in->required();
  cmd->add_option("--base", o.base, "Base contour elevation (m)");
  cmd->add_option("--interval", o.interval, "Contour interval (m)");
  cmd->add_option("--levels", o.levels, "Explicit levels a,b,c")->delimiter(',');
  cmd->add_option("--index-every", o.index_every, "Index contour every N levels");
  cmd->add_option("--geojson", o.geojson, "GeoJSON output path");
  cmd->add_option("--svg", o.svg, "SVG output path");
  cmd->add_option("--report", o.report, "Report output path (.json or .csv)");
  cmd->add_option("--factor", o.factor, "Degradation factor");
  cmd->add_option("--unit", o.unit, "Label unit")->check(CLI::IsMember({"m", "ft"}));
  cmd->add_option("--threads", o.threads, "Worker threads for tracing");
  cmd->add_option("--tables", o.tables, "Directory for NAT/AAT/PAT/PAL CSV tables");
  cmd->add_option("-o,--output", o.output, "Output grid path");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Contour lines from elevation grids"};
  app.name("isoline");
  Options o;
  auto* info = app.add_subcommand("info", "Describe grids or contour files");
  auto* contour = app.add_subcommand("contour", "Trace, clean and export contours of one grid");
  auto* clean = app.add_subcommand("clean", "Clean contour topology from GeoJSON or polyline text");
  auto* mosaic = app.add_subcommand("mosaic", "Trace contours across adjacent tiles");
  auto* compare = app.add_subcommand("compare", "Compare two contour files");
  auto* validate = app.add_subcommand("validate", "Check contours against their grids");
  auto* degrade = app.add_subcommand("degrade", "Decimate a grid");
  add_common(info, o, false);
  for (auto* c : {contour, clean, mosaic, compare, validate, degrade}) add_common(c, o, true);
  app.require_subcommand(0, 1);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    print_error("UsageError", "", e.what());
    return kExitUsage;
  }

  try {
    if (info->parsed()) {
      if (o.inputs.empty()) {
        std::cout << app.help();
        return 0;
      }
      cmd_info(o);
    } else if (contour->parsed()) {
      cmd_contour(o);
    } else if (clean->parsed()) {
      cmd_clean(o);
    } else if (mosaic->parsed()) {
      cmd_mosaic(o);
    } else if (compare->parsed()) {
      cmd_compare(o);
    } else if (validate->parsed()) {
      cmd_validate(o);
    } else if (degrade->parsed()) {
      cmd_degrade(o);
    } else {
      std::cerr << app.help();
      return kExitUsage;
    }
  } catch (const Failure& f) {
    return f.exit_code;
  }
  return 0;
}
