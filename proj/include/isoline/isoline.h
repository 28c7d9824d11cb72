#ifndef ISOLINE_ISOLINE_H
#define ISOLINE_ISOLINE_H

#include <stddef.h>
#include <stdint.h>

#include "isoline/error_codes.h"

#if defined(_WIN32)
#define ISOLINE_API __declspec(dllexport)
#else
#define ISOLINE_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

/* Every function returning int returns ISOLINE_OK or one of the codes
 * below. On failure isoline_last_error() holds the detail for the calling
 * thread and output handles are left untouched. */
enum {
  ISOLINE_OK = 0,
#define ISOLINE_X(name, value, cat) ISOLINE_##name = value,
  ISOLINE_ERROR_CODES(ISOLINE_X)
#undef ISOLINE_X
  ISOLINE_Internal = 99
};

enum {
  ISOLINE_CATEGORY_NONE = 0,
  ISOLINE_CATEGORY_PARSE = 1,
  ISOLINE_CATEGORY_PROCESSING = 2,
  ISOLINE_CATEGORY_IO = 3,
  ISOLINE_CATEGORY_USAGE = 4
};

typedef struct isoline_grid isoline_grid;
typedef struct isoline_contours isoline_contours;
typedef struct isoline_topology isoline_topology;
typedef struct isoline_mosaic isoline_mosaic;
typedef struct isoline_report isoline_report;

ISOLINE_API const char* isoline_status_name(int status);
ISOLINE_API int isoline_status_category(int status);
ISOLINE_API const char* isoline_last_error(void);

typedef struct isoline_level_spec {
  double base;
  double interval;
  /* Optional explicit level list; overrides base and interval. */
  const double* levels;
  size_t level_count;
  int index_every;
} isoline_level_spec;

/* base 0, interval 50, index_every 5, no explicit levels. */
ISOLINE_API void isoline_level_spec_init(isoline_level_spec* spec);

/* Grids */

typedef struct isoline_grid_info {
  size_t rows;
  size_t cols;
  double origin_lat;
  double origin_lon;
  double lat_step;
  double lon_step;
  int cell_centered;
  size_t void_count;
  int all_void;
  double min_elevation;
  double max_elevation;
  double min_lon;
  double min_lat;
  double max_lon;
  double max_lat;
  char fingerprint[17];
} isoline_grid_info;

/* Format chosen by extension: .hgt, .asc/.dem/.txt, .raw (+ .rawhdr). */
ISOLINE_API int isoline_grid_load(const char* path, isoline_grid** out);
ISOLINE_API int isoline_grid_parse_hgt(const uint8_t* bytes, size_t len, const char* tile_name, isoline_grid** out);
ISOLINE_API int isoline_grid_parse_ascii(const char* text, size_t len, isoline_grid** out);
/* Row-major samples from the north-west corner; NaN marks a void. */
ISOLINE_API int isoline_grid_create(size_t rows, size_t cols, const double* samples, double origin_lat,
                                    double origin_lon, double lat_step, double lon_step, isoline_grid** out);
ISOLINE_API int isoline_grid_save(const isoline_grid* grid, const char* path);
ISOLINE_API int isoline_grid_info_get(const isoline_grid* grid, isoline_grid_info* out);
/* *is_void is set to 1 when a contributing sample is void; *value is then 0. */
ISOLINE_API int isoline_grid_sample(const isoline_grid* grid, double lat, double lon, double* value, int* is_void);
ISOLINE_API int isoline_grid_degrade(const isoline_grid* grid, int factor, isoline_grid** out);
ISOLINE_API void isoline_grid_free(isoline_grid* grid);

/* Contours */

ISOLINE_API int isoline_trace(const isoline_grid* grid, const isoline_level_spec* spec, unsigned threads,
                              isoline_contours** out);
ISOLINE_API int isoline_contours_load_geojson(const char* path, isoline_contours** out);
ISOLINE_API int isoline_contours_write_geojson(const isoline_contours* contours, const char* path);
/* unit_feet != 0 labels elevations in feet; stored values stay meters. */
ISOLINE_API int isoline_contours_write_svg(const isoline_contours* contours, const char* path, int unit_feet);
ISOLINE_API size_t isoline_contours_line_count(const isoline_contours* contours);
/* Distinct levels that carry at least one line, ascending. Writes up to cap
 * values and stores the full count in *count. */
ISOLINE_API int isoline_contours_levels(const isoline_contours* contours, double* out, size_t cap, size_t* count);
ISOLINE_API void isoline_contours_free(isoline_contours* contours);

/* Topology */

typedef struct isoline_clean_report {
  int passes;
  int deleted_de;
  int deleted_coa;
  int deleted_as2p;
  int deleted_pic;
  int deleted_ptp;
  int dissolved;
  int elevation_mismatches;
} isoline_clean_report;

ISOLINE_API int isoline_topology_build(const isoline_contours* contours, isoline_topology** out);
/* Line format `elevation; x y, x y, ...` with optional `bounds:` line. */
ISOLINE_API int isoline_topology_parse_soup(const char* text, size_t len, isoline_topology** out);
/* Cleans in place; report may be NULL. */
ISOLINE_API int isoline_topology_clean(isoline_topology* topo, int max_passes, isoline_clean_report* report);
ISOLINE_API int isoline_topology_counts(const isoline_topology* topo, size_t* nodes, size_t* arcs, size_t* polygons);
/* Writes nat.csv, aat.csv, pat.csv and pal.csv into an existing directory. */
ISOLINE_API int isoline_topology_write_tables(const isoline_topology* topo, const char* dir);
ISOLINE_API int isoline_topology_to_contours(const isoline_topology* topo, const isoline_contours* original,
                                             isoline_contours** out);
ISOLINE_API void isoline_topology_free(isoline_topology* topo);

/* Mosaics */

ISOLINE_API int isoline_mosaic_assemble(const isoline_grid* const* tiles, size_t count, isoline_mosaic** out);
ISOLINE_API int isoline_mosaic_view(const isoline_mosaic* mosaic, isoline_grid** out);
/* Traces every tile over the shared view, checks the seams and joins the
 * pieces. seam_breaks may be NULL. */
ISOLINE_API int isoline_mosaic_trace(const isoline_mosaic* mosaic, const isoline_level_spec* spec, unsigned threads,
                                     isoline_contours** out, int* seam_breaks);
ISOLINE_API void isoline_mosaic_free(isoline_mosaic* mosaic);

/* Analysis */

ISOLINE_API int isoline_infer_interval(double elev_a, double elev_b, int lines_crossed, double* out);

enum { ISOLINE_ON_CONTOUR = 0, ISOLINE_BRACKETED = 1, ISOLINE_EXTRAPOLATED = 2 };

ISOLINE_API int isoline_estimate_point(const isoline_contours* contours, double lon, double lat, double interval,
                                       double* estimate, int* kind);
ISOLINE_API int isoline_compare(const isoline_contours* a, const isoline_contours* b, isoline_report** out);
/* Pairs contours[i] with grids[i]. With several pairs the grids must tile
 * into a mosaic and the per-tile contours get a seam check. */
ISOLINE_API int isoline_validate(const isoline_contours* const* contours, const isoline_grid* const* grids,
                                 size_t count, int samples_per_arc, isoline_report** out);
/* One contour set against a mosaic of grids. */
ISOLINE_API int isoline_validate_mosaic(const isoline_contours* contours, const isoline_grid* const* tiles,
                                        size_t count, int samples_per_arc, isoline_report** out);
/* JSON text owned by the report. */
ISOLINE_API const char* isoline_report_json(const isoline_report* report);
/* CSV when the path ends in .csv, JSON otherwise. */
ISOLINE_API int isoline_report_write(const isoline_report* report, const char* path);
ISOLINE_API void isoline_report_free(isoline_report* report);

#ifdef __cplusplus
}
#endif

#endif
