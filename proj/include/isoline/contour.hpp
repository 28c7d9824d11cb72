#pragma once

#include <array>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "isoline/grid.hpp"
#include "isoline/mosaic.hpp"

namespace isoline {

struct LevelSpec {
  double base = 0.0;
  double interval = 50.0;
  /// Overrides base/interval when present; must be strictly increasing.
  std::optional<std::vector<double>> explicit_levels;
  int index_every = 5;

  bool operator==(const LevelSpec&) const = default;
};

/// Levels base + k*interval (k >= 0) inside [min_elev, max_elev], or the
/// explicit list filtered to that range.
std::vector<double> enumerate_levels(double min_elev, double max_elev, const LevelSpec& spec);

/// Index contours are every index_every-th level counted from the base
/// (ordinal 0 is an index contour). For explicit levels the ordinal is the
/// position in the explicit list.
bool is_index_level(double level, const LevelSpec& spec);

enum class EdgeAxis : std::uint8_t { Horizontal = 0, Vertical = 1 };

/// Global key of a grid edge. A Horizontal edge joins samples (row, col) and
/// (row, col + 1); a Vertical edge joins (row, col) and (row + 1, col).
struct EdgeKey {
  std::int32_t row = 0;
  std::int32_t col = 0;
  EdgeAxis axis = EdgeAxis::Horizontal;

  auto operator<=>(const EdgeKey&) const = default;
  bool operator==(const EdgeKey&) const = default;
};

enum class CellEdge : std::uint8_t { North, East, South, West };

/// Level crossing on one cell edge. `t` runs west to east on horizontal
/// edges and north to south on vertical ones.
struct EdgeCrossing {
  std::int32_t cell_row = 0;
  std::int32_t cell_col = 0;
  CellEdge edge = CellEdge::North;
  double t = 0.0;

  EdgeKey key() const;
};

struct CellCrossing {
  CellEdge edge = CellEdge::North;
  double t = 0.0;
};

/// Oriented segment: ground at or above the level lies to the left when
/// walking from `from` to `to` in (lon east, lat north) coordinates.
struct CellSegment {
  CellCrossing from;
  CellCrossing to;
};

struct CellSegments {
  std::array<CellSegment, 2> segments{};
  int count = 0;
};

/// Marching-squares case analysis for one cell. A corner is inside when
/// z >= level; saddles connect the inside corners when the corner mean is
/// >= level. Throws VoidCorner on non-finite input.
CellSegments march_cell(double z_nw, double z_ne, double z_se, double z_sw, double level);

struct ContourLine {
  double level = 0.0;
  /// (lon, lat) pairs.
  std::vector<std::pair<double, double>> vertices;
  bool closed = false;
  bool is_index = false;
  bool boundary_terminated = false;
  /// Crossing keys along the line, one per traversed crossing. Consecutive
  /// identical vertices are collapsed in `vertices` but not here.
  std::vector<EdgeKey> source_keys;

  bool operator==(const ContourLine&) const = default;
};

struct ContourSet {
  std::vector<ContourLine> lines;
  LevelSpec levels;
  std::vector<double> level_values;
  std::string grid_fingerprint;
  Bounds bounds;

  bool operator==(const ContourSet&) const = default;
};

struct TraceOptions {
  /// Worker threads for per-level tracing; 0 or 1 runs serially.
  unsigned threads = 1;
  /// Drop lines that collapse to a point or a zero-area ring when samples sit
  /// exactly on a level.
  bool drop_degenerate = true;
};

/// Rectangle of cells [row0, row1) x [col0, col1) in grid cell indices.
struct CellRange {
  std::size_t row0 = 0;
  std::size_t row1 = 0;
  std::size_t col0 = 0;
  std::size_t col1 = 0;
};

/// Raw segments of one level over a cell range, as global crossing keys.
struct KeyedSegment {
  EdgeKey from;
  EdgeKey to;
};
std::vector<KeyedSegment> level_segments(const ElevationGrid& grid, double level, const CellRange& range);

/// Crossing fraction of `level` on the given edge.
double crossing_t(const ElevationGrid& grid, const EdgeKey& key, double level);

ContourSet trace_contours(const ElevationGrid& grid, const LevelSpec& spec, const TraceOptions& opts = {});

/// Traces a cell sub-range of `grid` with the given level list; lines end
/// where they leave the range. Bounds are the range's footprint.
ContourSet trace_region(const ElevationGrid& grid, const LevelSpec& spec, const std::vector<double>& levels,
                        const CellRange& range, const TraceOptions& opts = {});

/// One contour set per tile, traced over the mosaic's global view so seam
/// crossings are coordinate-identical on both sides.
std::vector<ContourSet> trace_mosaic(const TileMosaic& mosaic, const LevelSpec& spec, const TraceOptions& opts = {});

/// Joins per-tile pieces through their shared seam crossings into one set
/// in canonical order. Pieces must carry global source keys.
ContourSet stitch_tiles(const std::vector<ContourSet>& tiles, const ElevationGrid& view, const LevelSpec& spec);

/// Position of a crossing. Throws IndexOutOfGrid.
std::pair<double, double> crossing_to_geo(const EdgeKey& key, double t, const GridGeoref& georef, std::size_t rows,
                                          std::size_t cols);

}  // namespace isoline
