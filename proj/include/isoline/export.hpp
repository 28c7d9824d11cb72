#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "isoline/analysis.hpp"
#include "isoline/contour.hpp"

namespace isoline {

/// Shortest round-trip text of `v` after rounding to 9 fractional digits.
std::string format_number(double v);

std::string geojson_string(const ContourSet& contours);
/// Throws IoFailure.
void export_geojson(const ContourSet& contours, const std::filesystem::path& path);

/// Reads a FeatureCollection of LineStrings with elevation/index/closed
/// properties. Open lines come back boundary-terminated and without source
/// keys. Throws MalformedVector.
ContourSet parse_geojson(std::string_view text);
ContourSet load_geojson(const std::filesystem::path& path);

enum class UnitLabel { Meters, Feet };

inline constexpr double kFeetPerMeter = 3.28084;

struct SvgOptions {
  UnitLabel unit = UnitLabel::Meters;
};

inline constexpr double kSvgWidth = 1000.0;
inline constexpr double kSvgHeight = 1000.0;

/// Throws DegenerateBounds.
std::string svg_string(const ContourSet& contours, const Bounds& bounds, const SvgOptions& opts = {});
void export_svg(const ContourSet& contours, const Bounds& bounds, const std::filesystem::path& path,
                const SvgOptions& opts = {});

std::string to_json(const ComparisonReport& r);
std::string to_csv(const ComparisonReport& r);
std::string to_json(const AgreementReport& r);
std::string to_csv(const AgreementReport& r);
std::string to_json(const SeamReport& r);
std::string to_csv(const SeamReport& r);

/// Agreement per contour/grid pair plus an optional seam check.
struct ValidationReport {
  std::vector<AgreementReport> agreements;
  std::optional<SeamReport> seams;
};

std::string to_json(const ValidationReport& r);
std::string to_csv(const ValidationReport& r);

}  // namespace isoline
