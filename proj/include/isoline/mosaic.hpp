#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "isoline/grid.hpp"

namespace isoline {

/// Placement of one tile in the global sample lattice.
struct TilePlacement {
  std::size_t row_offset = 0;
  std::size_t col_offset = 0;
  std::size_t rows = 0;
  std::size_t cols = 0;

  std::size_t last_row() const { return row_offset + rows - 1; }
  std::size_t last_col() const { return col_offset + cols - 1; }
};

enum class SeamAxis { Column, Row };

/// Shared sample line between two adjacent tiles, in global indices.
/// For a Column seam `line` is the shared column and [begin, end] the row
/// range; for a Row seam `line` is the shared row and [begin, end] columns.
struct Seam {
  std::size_t tile_a = 0;
  std::size_t tile_b = 0;
  SeamAxis axis = SeamAxis::Column;
  std::size_t line = 0;
  std::size_t begin = 0;
  std::size_t end = 0;
};

/// Geometry-only view of a tile set: lattice placement and seams, with the
/// step, gap and overlap-width checks applied but no value comparison.
struct MosaicLayout {
  std::vector<TilePlacement> placements;
  std::vector<Seam> seams;
  std::size_t rows = 0;
  std::size_t cols = 0;
  GridGeoref georef;
};

/// Throws StepMismatch, GapBetweenTiles, or MosaicInconsistent (overlap
/// wider than one pixel).
MosaicLayout mosaic_layout(std::span<const ElevationGrid> tiles);

class TileMosaic {
 public:
  TileMosaic(std::vector<ElevationGrid> tiles, MosaicLayout layout, ElevationGrid view)
      : tiles_(std::move(tiles)), layout_(std::move(layout)), view_(std::move(view)) {}

  const std::vector<ElevationGrid>& tiles() const { return tiles_; }
  const MosaicLayout& layout() const { return layout_; }
  /// Global grid over the union of the tiles.
  const ElevationGrid& view() const { return view_; }

 private:
  std::vector<ElevationGrid> tiles_;
  MosaicLayout layout_;
  ElevationGrid view_;
};

/// Layout checks plus sample identity on every shared position.
TileMosaic mosaic_assemble(std::vector<ElevationGrid> tiles);

}  // namespace isoline
