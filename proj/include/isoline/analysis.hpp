#pragma once

#include <array>
#include <cstddef>
#include <utility>
#include <vector>

#include "isoline/contour.hpp"
#include "isoline/grid.hpp"
#include "isoline/mosaic.hpp"

namespace isoline {

/// Interval from two known elevations and the number of lines crossed
/// walking from one to the other (the start line is not counted, the end
/// line is). Throws ZeroLines, EqualElevations.
double infer_interval(double elev_a, double elev_b, int lines_crossed);

enum class EstimateKind { OnContour, Bracketed, Extrapolated };

const char* estimate_kind_name(EstimateKind kind);

struct PointEstimate {
  double estimate = 0.0;
  EstimateKind kind = EstimateKind::OnContour;
};

inline constexpr double kSnapToleranceDeg = 1e-6;

/// Elevation of a (lon, lat) point read from contours alone. Lines must be
/// oriented with higher ground on their left, as trace_contours emits them.
/// Throws NoContours, OutsideBounds.
PointEstimate estimate_point_elevation(std::pair<double, double> point, const ContourSet& contours, double interval,
                                       double snap_tolerance_deg = kSnapToleranceDeg);

/// Whether `point` lies in the region at or above `level`, decided by
/// crossing parity along an axis ray. Exposed for testing.
bool above_level(std::pair<double, double> point, const ContourSet& contours, double level);

struct ComparisonReport {
  std::vector<double> levels_compared;
  /// Per compared level, in meters.
  std::vector<double> mean_symmetric_distance;
  std::vector<double> max_symmetric_distance;
  /// Per set: index 0 is `a`, 1 is `b`.
  std::array<int, 2> open_line_count{};
  std::array<int, 2> intersection_count{};
  /// Total length of `a` over total length of `b`, per compared level.
  std::vector<double> length_ratio;
  int seam_break_count = 0;
};

/// Throws NoSharedLevels.
ComparisonReport compare_contour_sets(const ContourSet& a, const ContourSet& b);

/// Pairs of segments in the set that touch anywhere except at a shared
/// endpoint.
int count_intersections(const ContourSet& set);

struct AgreementReport {
  int arcs_checked = 0;
  int nodes_checked = 0;
  double mean_abs_error = 0.0;
  double max_abs_error = 0.0;
  int samples_per_arc = 0;
};

/// Samples each line at evenly spaced vertex positions and compares the
/// grid's bilinear surface with the line's level. Throws FootprintMismatch.
AgreementReport check_against_dtm(const ContourSet& contours, const ElevationGrid& grid, int samples_per_arc = 32);

struct SeamBreak {
  std::size_t seam = 0;
  double level = 0.0;
  std::pair<double, double> location;
};

struct SeamReport {
  int seam_break_count = 0;
  std::vector<SeamBreak> breaks;
};

/// `tile_contours[i]` belongs to tile i of the layout. Open line ends lying on
/// a seam must meet an end of the neighbour tile at the same level and the
/// same coordinates.
SeamReport seam_continuity_check(const std::vector<ContourSet>& tile_contours, const MosaicLayout& layout);
SeamReport seam_continuity_check(const std::vector<ContourSet>& tile_contours, const TileMosaic& mosaic);

}  // namespace isoline
