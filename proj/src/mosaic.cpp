#include "isoline/mosaic.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "isoline/error.hpp"

namespace isoline {

namespace {

bool close_rel(double a, double b) { return std::abs(a - b) <= 1e-9 * std::max(std::abs(a), std::abs(b)); }

long lattice_offset(double delta, double step, std::size_t tile) {
  const double k = delta / step;
  const double r = std::round(k);
  if (std::abs(k - r) > 1e-6) {
    throw Error(ErrorCode::StepMismatch,
                "tile " + std::to_string(tile) + " is not aligned on the global lattice");
  }
  return static_cast<long>(r);
}

}  // namespace

MosaicLayout mosaic_layout(std::span<const ElevationGrid> tiles) {
  if (tiles.empty()) throw Error(ErrorCode::InvalidArgument, "mosaic needs at least one tile");
  const GridGeoref& ref = tiles[0].georef();
  std::vector<long> row_off(tiles.size());
  std::vector<long> col_off(tiles.size());
  for (std::size_t i = 0; i < tiles.size(); ++i) {
    const GridGeoref& g = tiles[i].georef();
    if (!close_rel(g.lat_step, ref.lat_step) || !close_rel(g.lon_step, ref.lon_step) ||
        g.registration != ref.registration) {
      throw Error(ErrorCode::StepMismatch,
                  "tile " + std::to_string(i) + " differs in step size or registration");
    }
    row_off[i] = lattice_offset(ref.origin_lat - g.origin_lat, ref.lat_step, i);
    col_off[i] = lattice_offset(g.origin_lon - ref.origin_lon, ref.lon_step, i);
  }
  const long min_r = *std::min_element(row_off.begin(), row_off.end());
  const long min_c = *std::min_element(col_off.begin(), col_off.end());

  MosaicLayout layout;
  for (std::size_t i = 0; i < tiles.size(); ++i) {
    TilePlacement p;
    p.row_offset = static_cast<std::size_t>(row_off[i] - min_r);
    p.col_offset = static_cast<std::size_t>(col_off[i] - min_c);
    p.rows = tiles[i].rows();
    p.cols = tiles[i].cols();
    layout.rows = std::max(layout.rows, p.last_row() + 1);
    layout.cols = std::max(layout.cols, p.last_col() + 1);
    layout.placements.push_back(p);
  }

  // Prefer the georef of a tile sitting at the global origin so that a
  // single tile, or a split of one grid, reproduces its georef bit-exactly.
  layout.georef = ref;
  layout.georef.origin_lat = ref.row_lat(static_cast<double>(min_r));
  layout.georef.origin_lon = ref.col_lon(static_cast<double>(min_c));
  for (std::size_t i = 0; i < tiles.size(); ++i) {
    if (layout.placements[i].row_offset == 0 && layout.placements[i].col_offset == 0) {
      layout.georef = tiles[i].georef();
      break;
    }
  }

  // Every cell of the union must lie wholly inside one tile; abutting tiles
  // without a shared sample line leave uncovered cells.
  const auto covers_cell = [&](std::size_t r, std::size_t c) {
    return std::any_of(layout.placements.begin(), layout.placements.end(), [&](const TilePlacement& p) {
      return p.row_offset <= r && r + 1 <= p.last_row() && p.col_offset <= c && c + 1 <= p.last_col();
    });
  };
  const auto covers_sample = [&](std::size_t r, std::size_t c) {
    return std::any_of(layout.placements.begin(), layout.placements.end(), [&](const TilePlacement& p) {
      return p.row_offset <= r && r <= p.last_row() && p.col_offset <= c && c <= p.last_col();
    });
  };
  for (std::size_t r = 0; r < layout.rows; ++r) {
    for (std::size_t c = 0; c < layout.cols; ++c) {
      const bool ok = (layout.rows >= 2 && layout.cols >= 2 && r + 1 < layout.rows && c + 1 < layout.cols)
                          ? covers_cell(r, c)
                          : covers_sample(r, c);
      if (!ok) {
        throw Error(ErrorCode::GapBetweenTiles, "global cell (" + std::to_string(r) + ", " +
                                                    std::to_string(c) + ") is not covered by any tile");
      }
    }
  }

  for (std::size_t a = 0; a < tiles.size(); ++a) {
    for (std::size_t b = a + 1; b < tiles.size(); ++b) {
      const TilePlacement& pa = layout.placements[a];
      const TilePlacement& pb = layout.placements[b];
      const std::size_t r0 = std::max(pa.row_offset, pb.row_offset);
      const std::size_t r1 = std::min(pa.last_row(), pb.last_row());
      const std::size_t c0 = std::max(pa.col_offset, pb.col_offset);
      const std::size_t c1 = std::min(pa.last_col(), pb.last_col());
      if (r0 > r1 || c0 > c1) continue;
      const std::size_t h = r1 - r0 + 1;
      const std::size_t w = c1 - c0 + 1;
      if (std::min(h, w) != 1) {
        throw Error(ErrorCode::MosaicInconsistent, "tiles " + std::to_string(a) + " and " +
                                                       std::to_string(b) + " overlap by more than one pixel");
      }
      if (w == 1 && h >= 2) {
        layout.seams.push_back(Seam{a, b, SeamAxis::Column, c0, r0, r1});
      } else if (h == 1 && w >= 2) {
        layout.seams.push_back(Seam{a, b, SeamAxis::Row, r0, c0, c1});
      }
    }
  }
  return layout;
}

TileMosaic mosaic_assemble(std::vector<ElevationGrid> tiles) {
  MosaicLayout layout = mosaic_layout(tiles);
  const std::size_t n = layout.rows * layout.cols;
  std::vector<double> samples(n, 0.0);
  std::vector<std::uint8_t> mask(n, 0);
  std::vector<std::uint8_t> seen(n, 0);
  for (std::size_t i = 0; i < tiles.size(); ++i) {
    const TilePlacement& p = layout.placements[i];
    const ElevationGrid& t = tiles[i];
    for (std::size_t r = 0; r < t.rows(); ++r) {
      for (std::size_t c = 0; c < t.cols(); ++c) {
        const std::size_t k = (p.row_offset + r) * layout.cols + p.col_offset + c;
        const bool v = t.is_void(r, c);
        const double z = t.at(r, c);
        if (seen[k] != 0) {
          if ((mask[k] != 0) != v || (!v && samples[k] != z)) {
            throw Error(ErrorCode::MosaicInconsistent,
                        "shared sample at global (" + std::to_string(p.row_offset + r) + ", " +
                            std::to_string(p.col_offset + c) + ") differs between tiles");
          }
          continue;
        }
        seen[k] = 1;
        samples[k] = z;
        mask[k] = v ? 1 : 0;
      }
    }
  }
  ElevationGrid view(layout.rows, layout.cols, std::move(samples), std::move(mask), layout.georef);
  return TileMosaic(std::move(tiles), std::move(layout), std::move(view));
}

}  // namespace isoline
