#include <algorithm>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <new>
#include <string>
#include <variant>

#include "isoline/analysis.hpp"
#include "isoline/contour.hpp"
#include "isoline/elevation_io.hpp"
#include "isoline/error.hpp"
#include "isoline/export.hpp"
#include "isoline/isoline.h"
#include "isoline/mosaic.hpp"
#include "isoline/topology.hpp"

struct isoline_grid {
  isoline::ElevationGrid grid;
};

struct isoline_contours {
  isoline::ContourSet set;
};

struct isoline_topology {
  isoline::Topology topo;
};

struct isoline_mosaic {
  isoline::TileMosaic mosaic;
};

struct isoline_report {
  std::variant<isoline::ComparisonReport, isoline::ValidationReport> report;
  std::string json;
};

namespace {

thread_local std::string g_last_error;

template <typename F>
int guarded(F&& f) {
  try {
    f();
    g_last_error.clear();
    return ISOLINE_OK;
  } catch (const isoline::Error& e) {
    g_last_error = e.what();
    return static_cast<int>(e.code());
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
    return ISOLINE_Internal;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return ISOLINE_Internal;
  }
}

void require(bool ok, const char* what) {
  if (!ok) throw isoline::Error(isoline::ErrorCode::InvalidArgument, what);
}

isoline::LevelSpec to_spec(const isoline_level_spec* spec) {
  isoline::LevelSpec out;
  if (!spec) return out;
  out.base = spec->base;
  out.interval = spec->interval;
  out.index_every = spec->index_every;
  if (spec->levels && spec->level_count > 0) {
    out.explicit_levels = std::vector<double>(spec->levels, spec->levels + spec->level_count);
  }
  return out;
}

std::vector<isoline::ElevationGrid> copy_grids(const isoline_grid* const* grids, size_t count) {
  require(grids != nullptr || count == 0, "grid list is null");
  std::vector<isoline::ElevationGrid> out;
  out.reserve(count);
  for (size_t i = 0; i < count; ++i) {
    require(grids[i] != nullptr, "grid handle is null");
    out.push_back(grids[i]->grid);
  }
  return out;
}

}  // namespace

extern "C" {

const char* isoline_status_name(int status) {
  switch (status) {
    case ISOLINE_OK:
      return "Ok";
#define ISOLINE_X(name, value, cat) \
  case value:                       \
    return #name;
      ISOLINE_ERROR_CODES(ISOLINE_X)
#undef ISOLINE_X
    case ISOLINE_Internal:
      return "Internal";
    default:
      return "Unknown";
  }
}

int isoline_status_category(int status) {
  switch (status) {
    case ISOLINE_OK:
      return ISOLINE_CATEGORY_NONE;
#define ISOLINE_CAT_P ISOLINE_CATEGORY_PARSE
#define ISOLINE_CAT_R ISOLINE_CATEGORY_PROCESSING
#define ISOLINE_CAT_I ISOLINE_CATEGORY_IO
#define ISOLINE_CAT_U ISOLINE_CATEGORY_USAGE
#define ISOLINE_X(name, value, cat) \
  case value:                       \
    return ISOLINE_CAT_##cat;
      ISOLINE_ERROR_CODES(ISOLINE_X)
#undef ISOLINE_X
    default:
      return ISOLINE_CATEGORY_PROCESSING;
  }
}

const char* isoline_last_error(void) { return g_last_error.c_str(); }

void isoline_level_spec_init(isoline_level_spec* spec) {
  if (!spec) return;
  spec->base = 0.0;
  spec->interval = 50.0;
  spec->levels = nullptr;
  spec->level_count = 0;
  spec->index_every = 5;
}

int isoline_grid_load(const char* path, isoline_grid** out) {
  return guarded([&] {
    require(path && out, "null argument");
    *out = new isoline_grid{isoline::load_grid(path)};
  });
}

int isoline_grid_parse_hgt(const uint8_t* bytes, size_t len, const char* tile_name, isoline_grid** out) {
  return guarded([&] {
    require((bytes || len == 0) && tile_name && out, "null argument");
    *out = new isoline_grid{isoline::parse_hgt(std::span<const uint8_t>(bytes, len), tile_name)};
  });
}

int isoline_grid_parse_ascii(const char* text, size_t len, isoline_grid** out) {
  return guarded([&] {
    require((text || len == 0) && out, "null argument");
    *out = new isoline_grid{isoline::parse_ascii_grid(std::string_view(text, len))};
  });
}

int isoline_grid_create(size_t rows, size_t cols, const double* samples, double origin_lat, double origin_lon,
                        double lat_step, double lon_step, isoline_grid** out) {
  return guarded([&] {
    require(samples && out, "null argument");
    std::vector<double> z(samples, samples + rows * cols);
    std::vector<std::uint8_t> mask(z.size(), 0);
    for (size_t i = 0; i < z.size(); ++i) {
      if (std::isnan(z[i])) {
        mask[i] = 1;
        z[i] = 0.0;
      }
    }
    isoline::GridGeoref g;
    g.origin_lat = origin_lat;
    g.origin_lon = origin_lon;
    g.lat_step = lat_step;
    g.lon_step = lon_step;
    *out = new isoline_grid{isoline::ElevationGrid(rows, cols, std::move(z), std::move(mask), g)};
  });
}

int isoline_grid_save(const isoline_grid* grid, const char* path) {
  return guarded([&] {
    require(grid && path, "null argument");
    isoline::save_grid(grid->grid, path);
  });
}

int isoline_grid_info_get(const isoline_grid* grid, isoline_grid_info* out) {
  return guarded([&] {
    require(grid && out, "null argument");
    const auto& g = grid->grid;
    isoline_grid_info info{};
    info.rows = g.rows();
    info.cols = g.cols();
    info.origin_lat = g.georef().origin_lat;
    info.origin_lon = g.georef().origin_lon;
    info.lat_step = g.georef().lat_step;
    info.lon_step = g.georef().lon_step;
    info.cell_centered = g.georef().registration == isoline::Registration::CellCentered;
    info.void_count = g.void_count();
    info.all_void = info.void_count == info.rows * info.cols;
    if (!info.all_void) {
      const auto [lo, hi] = isoline::min_max(g);
      info.min_elevation = lo;
      info.max_elevation = hi;
    }
    const auto fp = g.footprint();
    info.min_lon = fp.min_lon;
    info.min_lat = fp.min_lat;
    info.max_lon = fp.max_lon;
    info.max_lat = fp.max_lat;
    const std::string print = g.fingerprint();
    std::strncpy(info.fingerprint, print.c_str(), sizeof info.fingerprint - 1);
    *out = info;
  });
}

int isoline_grid_sample(const isoline_grid* grid, double lat, double lon, double* value, int* is_void) {
  return guarded([&] {
    require(grid && value && is_void, "null argument");
    const auto z = isoline::sample_bilinear(grid->grid, lat, lon);
    *is_void = z ? 0 : 1;
    *value = z.value_or(0.0);
  });
}

int isoline_grid_degrade(const isoline_grid* grid, int factor, isoline_grid** out) {
  return guarded([&] {
    require(grid && out, "null argument");
    *out = new isoline_grid{isoline::degrade(grid->grid, factor)};
  });
}

void isoline_grid_free(isoline_grid* grid) { delete grid; }

int isoline_trace(const isoline_grid* grid, const isoline_level_spec* spec, unsigned threads,
                  isoline_contours** out) {
  return guarded([&] {
    require(grid && out, "null argument");
    isoline::TraceOptions opts;
    opts.threads = threads;
    *out = new isoline_contours{isoline::trace_contours(grid->grid, to_spec(spec), opts)};
  });
}

int isoline_contours_load_geojson(const char* path, isoline_contours** out) {
  return guarded([&] {
    require(path && out, "null argument");
    *out = new isoline_contours{isoline::load_geojson(path)};
  });
}

int isoline_contours_write_geojson(const isoline_contours* contours, const char* path) {
  return guarded([&] {
    require(contours && path, "null argument");
    isoline::export_geojson(contours->set, path);
  });
}

int isoline_contours_write_svg(const isoline_contours* contours, const char* path, int unit_feet) {
  return guarded([&] {
    require(contours && path, "null argument");
    isoline::SvgOptions opts;
    opts.unit = unit_feet ? isoline::UnitLabel::Feet : isoline::UnitLabel::Meters;
    isoline::export_svg(contours->set, contours->set.bounds, path, opts);
  });
}

size_t isoline_contours_line_count(const isoline_contours* contours) {
  return contours ? contours->set.lines.size() : 0;
}

int isoline_contours_levels(const isoline_contours* contours, double* out, size_t cap, size_t* count) {
  return guarded([&] {
    require(contours && count && (out || cap == 0), "null argument");
    std::vector<double> levels;
    for (const auto& l : contours->set.lines) levels.push_back(l.level);
    std::sort(levels.begin(), levels.end());
    levels.erase(std::unique(levels.begin(), levels.end()), levels.end());
    for (size_t i = 0; i < levels.size() && i < cap; ++i) out[i] = levels[i];
    *count = levels.size();
  });
}

void isoline_contours_free(isoline_contours* contours) { delete contours; }

int isoline_topology_build(const isoline_contours* contours, isoline_topology** out) {
  return guarded([&] {
    require(contours && out, "null argument");
    *out = new isoline_topology{isoline::build_topology(contours->set)};
  });
}

int isoline_topology_parse_soup(const char* text, size_t len, isoline_topology** out) {
  return guarded([&] {
    require((text || len == 0) && out, "null argument");
    const auto soup = isoline::parse_polyline_soup(std::string_view(text, len));
    *out = new isoline_topology{isoline::build_topology(soup.lines, soup.bounds)};
  });
}

int isoline_topology_clean(isoline_topology* topo, int max_passes, isoline_clean_report* report) {
  return guarded([&] {
    require(topo != nullptr, "null argument");
    auto result = isoline::clean(topo->topo, max_passes);
    if (report) {
      using isoline::ArcClass;
      report->passes = result.report.passes;
      report->deleted_de = result.report.deleted[ArcClass::DE];
      report->deleted_coa = result.report.deleted[ArcClass::CoA];
      report->deleted_as2p = result.report.deleted[ArcClass::AS2P];
      report->deleted_pic = result.report.deleted[ArcClass::PIC];
      report->deleted_ptp = result.report.deleted[ArcClass::PTP];
      report->dissolved = result.report.dissolved;
      report->elevation_mismatches = static_cast<int>(result.report.elevation_mismatches.size());
    }
    topo->topo = std::move(result.topology);
  });
}

int isoline_topology_counts(const isoline_topology* topo, size_t* nodes, size_t* arcs, size_t* polygons) {
  return guarded([&] {
    require(topo != nullptr, "null argument");
    if (nodes) *nodes = topo->topo.nodes.size();
    if (arcs) *arcs = topo->topo.arcs.size();
    if (polygons) *polygons = topo->topo.polygons.size();
  });
}

int isoline_topology_write_tables(const isoline_topology* topo, const char* dir) {
  return guarded([&] {
    require(topo && dir, "null argument");
    const std::filesystem::path d(dir);
    if (!std::filesystem::is_directory(d)) {
      throw isoline::Error(isoline::ErrorCode::IoFailure, "not a directory: " + d.string());
    }
    const auto t = isoline::to_tables(topo->topo);
    isoline::write_file_atomic(d / "nat.csv", t.nat);
    isoline::write_file_atomic(d / "aat.csv", t.aat);
    isoline::write_file_atomic(d / "pat.csv", t.pat);
    isoline::write_file_atomic(d / "pal.csv", t.pal);
  });
}

int isoline_topology_to_contours(const isoline_topology* topo, const isoline_contours* original,
                                 isoline_contours** out) {
  return guarded([&] {
    require(topo && original && out, "null argument");
    *out = new isoline_contours{isoline::to_contour_set(topo->topo, original->set)};
  });
}

void isoline_topology_free(isoline_topology* topo) { delete topo; }

int isoline_mosaic_assemble(const isoline_grid* const* tiles, size_t count, isoline_mosaic** out) {
  return guarded([&] {
    require(out != nullptr, "null argument");
    *out = new isoline_mosaic{isoline::mosaic_assemble(copy_grids(tiles, count))};
  });
}

int isoline_mosaic_view(const isoline_mosaic* mosaic, isoline_grid** out) {
  return guarded([&] {
    require(mosaic && out, "null argument");
    *out = new isoline_grid{mosaic->mosaic.view()};
  });
}

int isoline_mosaic_trace(const isoline_mosaic* mosaic, const isoline_level_spec* spec, unsigned threads,
                         isoline_contours** out, int* seam_breaks) {
  return guarded([&] {
    require(mosaic && out, "null argument");
    const auto level_spec = to_spec(spec);
    isoline::TraceOptions opts;
    opts.threads = threads;
    const auto pieces = isoline::trace_mosaic(mosaic->mosaic, level_spec, opts);
    const auto seams = isoline::seam_continuity_check(pieces, mosaic->mosaic);
    auto joined = isoline::stitch_tiles(pieces, mosaic->mosaic.view(), level_spec);
    if (seam_breaks) *seam_breaks = seams.seam_break_count;
    *out = new isoline_contours{std::move(joined)};
  });
}

void isoline_mosaic_free(isoline_mosaic* mosaic) { delete mosaic; }

int isoline_infer_interval(double elev_a, double elev_b, int lines_crossed, double* out) {
  return guarded([&] {
    require(out != nullptr, "null argument");
    *out = isoline::infer_interval(elev_a, elev_b, lines_crossed);
  });
}

int isoline_estimate_point(const isoline_contours* contours, double lon, double lat, double interval,
                           double* estimate, int* kind) {
  return guarded([&] {
    require(contours && estimate && kind, "null argument");
    const auto e = isoline::estimate_point_elevation({lon, lat}, contours->set, interval);
    *estimate = e.estimate;
    *kind = static_cast<int>(e.kind);
  });
}

int isoline_compare(const isoline_contours* a, const isoline_contours* b, isoline_report** out) {
  return guarded([&] {
    require(a && b && out, "null argument");
    auto r = isoline::compare_contour_sets(a->set, b->set);
    auto json = isoline::to_json(r);
    *out = new isoline_report{std::move(r), std::move(json)};
  });
}

int isoline_validate(const isoline_contours* const* contours, const isoline_grid* const* grids, size_t count,
                     int samples_per_arc, isoline_report** out) {
  return guarded([&] {
    require(contours && out && count > 0, "validate needs at least one contour/grid pair");
    const auto tiles = copy_grids(grids, count);
    isoline::ValidationReport r;
    std::vector<isoline::ContourSet> sets;
    for (size_t i = 0; i < count; ++i) {
      require(contours[i] != nullptr, "contour handle is null");
      r.agreements.push_back(isoline::check_against_dtm(contours[i]->set, tiles[i], samples_per_arc));
      sets.push_back(contours[i]->set);
    }
    if (count > 1) r.seams = isoline::seam_continuity_check(sets, isoline::mosaic_layout(tiles));
    auto json = isoline::to_json(r);
    *out = new isoline_report{std::move(r), std::move(json)};
  });
}

int isoline_validate_mosaic(const isoline_contours* contours, const isoline_grid* const* tiles, size_t count,
                            int samples_per_arc, isoline_report** out) {
  return guarded([&] {
    require(contours && out && count > 0, "validate needs contours and at least one grid");
    const auto mosaic = isoline::mosaic_assemble(copy_grids(tiles, count));
    isoline::ValidationReport r;
    r.agreements.push_back(isoline::check_against_dtm(contours->set, mosaic.view(), samples_per_arc));
    auto json = isoline::to_json(r);
    *out = new isoline_report{std::move(r), std::move(json)};
  });
}

const char* isoline_report_json(const isoline_report* report) { return report ? report->json.c_str() : ""; }

int isoline_report_write(const isoline_report* report, const char* path) {
  return guarded([&] {
    require(report && path, "null argument");
    const std::filesystem::path p(path);
    const bool csv = p.extension() == ".csv";
    const std::string text = csv ? std::visit([](const auto& r) { return isoline::to_csv(r); }, report->report)
                                 : report->json;
    isoline::write_file_atomic(p, text);
  });
}

void isoline_report_free(isoline_report* report) { delete report; }

}  // extern "C"
