#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace isoline {

enum class Registration { PointRegistered, CellCentered };

/// Geographic placement of a north-up raster. The origin is the position of
/// sample (0, 0), the north-west sample; rows advance south and columns east.
struct GridGeoref {
  double origin_lat = 0.0;
  double origin_lon = 0.0;
  double lat_step = 1.0;
  double lon_step = 1.0;
  Registration registration = Registration::PointRegistered;

  double row_lat(double row) const { return origin_lat - row * lat_step; }
  double col_lon(double col) const { return origin_lon + col * lon_step; }

  /// Throws InvalidGeoref when steps are non-positive or the origin is off
  /// the globe.
  void validate() const;

  bool operator==(const GridGeoref&) const = default;
};

/// Axis-aligned lon/lat rectangle.
struct Bounds {
  double min_lon = 0.0;
  double min_lat = 0.0;
  double max_lon = 0.0;
  double max_lat = 0.0;

  bool contains(double lon, double lat, double tol = 0.0) const {
    return lon >= min_lon - tol && lon <= max_lon + tol && lat >= min_lat - tol &&
           lat <= max_lat + tol;
  }
  bool operator==(const Bounds&) const = default;
};

/// Immutable rectangular raster of elevations in meters with a void mask.
/// Void samples hold 0.0 in the sample array; only the mask is meaningful.
class ElevationGrid {
 public:
  ElevationGrid() = default;
  ElevationGrid(std::size_t rows, std::size_t cols, std::vector<double> samples,
                std::vector<std::uint8_t> void_mask, GridGeoref georef);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  const GridGeoref& georef() const { return georef_; }

  double at(std::size_t r, std::size_t c) const { return samples_[r * cols_ + c]; }
  bool is_void(std::size_t r, std::size_t c) const { return void_mask_[r * cols_ + c] != 0; }

  std::span<const double> samples() const { return samples_; }
  std::span<const std::uint8_t> void_mask() const { return void_mask_; }
  std::size_t void_count() const;

  /// Footprint spanned by the sample positions (not cell edges).
  Bounds footprint() const;

  /// FNV-1a digest over shape, georef, samples and mask, as 16 hex digits.
  std::string fingerprint() const;

  bool operator==(const ElevationGrid&) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> samples_;
  std::vector<std::uint8_t> void_mask_;
  GridGeoref georef_;
};

/// Bilinear interpolation of the four samples around (lat, lon). Returns
/// nullopt when any of them is void. Throws OutOfFootprint.
std::optional<double> sample_bilinear(const ElevationGrid& grid, double lat, double lon);

/// Same as sample_bilinear but in fractional (row, col) index space.
std::optional<double> sample_bilinear_index(const ElevationGrid& grid, double row, double col);

/// Decimation: keeps rows and columns 0, factor, 2*factor, ...
ElevationGrid degrade(const ElevationGrid& grid, int factor);

/// Extrema over non-void samples. Throws AllVoid.
std::pair<double, double> min_max(const ElevationGrid& grid);

}  // namespace isoline
