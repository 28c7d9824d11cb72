#include "isoline/grid.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <limits>

#include "isoline/error.hpp"

namespace isoline {

namespace {

// Fractional indices this close to an integer are treated as that integer so
// that queries at sample positions reproduce the sample exactly.
constexpr double kIndexSnap = 1e-9;

double snap_index(double v) {
  const double r = std::round(v);
  return std::abs(v - r) <= kIndexSnap ? r : v;
}

struct Fnv1a {
  std::uint64_t h = 1469598103934665603ULL;
  void bytes(const void* p, std::size_t n) {
    const auto* b = static_cast<const unsigned char*>(p);
    for (std::size_t i = 0; i < n; ++i) {
      h ^= b[i];
      h *= 1099511628211ULL;
    }
  }
  void u64(std::uint64_t v) { bytes(&v, sizeof v); }
  void f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }
};

}  // namespace

void GridGeoref::validate() const {
  if (!(lat_step > 0.0) || !(lon_step > 0.0)) {
    throw Error(ErrorCode::InvalidGeoref, "grid steps must be positive");
  }
  if (!(origin_lat >= -90.0 && origin_lat <= 90.0) ||
      !(origin_lon >= -180.0 && origin_lon <= 180.0)) {
    throw Error(ErrorCode::InvalidGeoref, "grid origin outside [-90,90]x[-180,180]");
  }
}

ElevationGrid::ElevationGrid(std::size_t rows, std::size_t cols, std::vector<double> samples,
                             std::vector<std::uint8_t> void_mask, GridGeoref georef)
    : rows_(rows),
      cols_(cols),
      samples_(std::move(samples)),
      void_mask_(std::move(void_mask)),
      georef_(georef) {
  if (rows_ == 0 || cols_ == 0) {
    throw Error(ErrorCode::InvalidArgument, "grid must have at least one row and column");
  }
  if (samples_.size() != rows_ * cols_ || void_mask_.size() != rows_ * cols_) {
    throw Error(ErrorCode::InvalidArgument, "sample or mask count differs from rows*cols");
  }
  georef_.validate();
  for (std::size_t i = 0; i < samples_.size(); ++i) {
    if (void_mask_[i] != 0) {
      void_mask_[i] = 1;
      samples_[i] = 0.0;
    } else if (!std::isfinite(samples_[i])) {
      throw Error(ErrorCode::InvalidArgument, "non-finite sample outside the void mask");
    }
  }
}

std::size_t ElevationGrid::void_count() const {
  return static_cast<std::size_t>(std::count(void_mask_.begin(), void_mask_.end(), 1));
}

Bounds ElevationGrid::footprint() const {
  return Bounds{georef_.col_lon(0.0), georef_.row_lat(static_cast<double>(rows_ - 1)),
                georef_.col_lon(static_cast<double>(cols_ - 1)), georef_.row_lat(0.0)};
}

std::string ElevationGrid::fingerprint() const {
  Fnv1a f;
  f.u64(rows_);
  f.u64(cols_);
  f.f64(georef_.origin_lat);
  f.f64(georef_.origin_lon);
  f.f64(georef_.lat_step);
  f.f64(georef_.lon_step);
  f.u64(static_cast<std::uint64_t>(georef_.registration));
  for (double s : samples_) f.f64(s);
  f.bytes(void_mask_.data(), void_mask_.size());
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(f.h));
  return buf;
}

std::optional<double> sample_bilinear_index(const ElevationGrid& grid, double row, double col) {
  row = snap_index(row);
  col = snap_index(col);
  const double max_r = static_cast<double>(grid.rows() - 1);
  const double max_c = static_cast<double>(grid.cols() - 1);
  if (!(row >= 0.0 && row <= max_r && col >= 0.0 && col <= max_c)) {
    throw Error(ErrorCode::OutOfFootprint, "query outside grid footprint");
  }
  const auto r0 = static_cast<std::size_t>(std::min(std::floor(row), std::max(max_r - 1.0, 0.0)));
  const auto c0 = static_cast<std::size_t>(std::min(std::floor(col), std::max(max_c - 1.0, 0.0)));
  const double fr = row - static_cast<double>(r0);
  const double fc = col - static_cast<double>(c0);

  double acc = 0.0;
  const auto add = [&](std::size_t r, std::size_t c, double w) {
    if (w == 0.0) return true;
    if (grid.is_void(r, c)) return false;
    acc += w * grid.at(r, c);
    return true;
  };
  const std::size_t r1 = std::min(r0 + 1, grid.rows() - 1);
  const std::size_t c1 = std::min(c0 + 1, grid.cols() - 1);
  if (!add(r0, c0, (1.0 - fr) * (1.0 - fc))) return std::nullopt;
  if (!add(r0, c1, (1.0 - fr) * fc)) return std::nullopt;
  if (!add(r1, c0, fr * (1.0 - fc))) return std::nullopt;
  if (!add(r1, c1, fr * fc)) return std::nullopt;
  return acc;
}

std::optional<double> sample_bilinear(const ElevationGrid& grid, double lat, double lon) {
  const auto& g = grid.georef();
  return sample_bilinear_index(grid, (g.origin_lat - lat) / g.lat_step,
                               (lon - g.origin_lon) / g.lon_step);
}

ElevationGrid degrade(const ElevationGrid& grid, int factor) {
  if (factor < 1) {
    throw Error(ErrorCode::InvalidArgument, "degradation factor must be positive");
  }
  if (factor == 1) return grid;
  if (static_cast<std::size_t>(factor) >= std::min(grid.rows(), grid.cols())) {
    throw Error(ErrorCode::FactorTooLarge, "degradation factor " + std::to_string(factor) +
                                               " not below min(rows, cols)");
  }
  const auto f = static_cast<std::size_t>(factor);
  const std::size_t rows = (grid.rows() - 1) / f + 1;
  const std::size_t cols = (grid.cols() - 1) / f + 1;
  std::vector<double> samples;
  std::vector<std::uint8_t> mask;
  samples.reserve(rows * cols);
  mask.reserve(rows * cols);
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) {
      samples.push_back(grid.at(r * f, c * f));
      mask.push_back(grid.is_void(r * f, c * f) ? 1 : 0);
    }
  }
  GridGeoref g = grid.georef();
  g.lat_step *= factor;
  g.lon_step *= factor;
  return ElevationGrid(rows, cols, std::move(samples), std::move(mask), g);
}

std::pair<double, double> min_max(const ElevationGrid& grid) {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  const auto s = grid.samples();
  const auto m = grid.void_mask();
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (m[i] != 0) continue;
    lo = std::min(lo, s[i]);
    hi = std::max(hi, s[i]);
  }
  if (lo > hi) throw Error(ErrorCode::AllVoid, "grid has no valid samples");
  return {lo, hi};
}

}  // namespace isoline
