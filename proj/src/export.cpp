#include "isoline/export.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <sstream>

#include <json.hpp>

#include "isoline/elevation_io.hpp"
#include "isoline/error.hpp"

namespace isoline {

std::string format_number(double v) {
  double r = std::round(v * 1e9) / 1e9;
  if (!std::isfinite(r)) r = v;
  if (r == 0.0) r = 0.0;  // no "-0"
  std::array<char, 64> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), r);
  return std::string(buf.data(), res.ptr);
}

std::string geojson_string(const ContourSet& contours) {
  std::string out;
  const Bounds& b = contours.bounds;
  out += "{\"type\":\"FeatureCollection\",\"bbox\":[" + format_number(b.min_lon) + ',' + format_number(b.min_lat) +
         ',' + format_number(b.max_lon) + ',' + format_number(b.max_lat) + "],\"features\":[";
  for (std::size_t i = 0; i < contours.lines.size(); ++i) {
    const auto& l = contours.lines[i];
    out += i == 0 ? "\n" : ",\n";
    out += "{\"type\":\"Feature\",\"properties\":{\"elevation\":" + format_number(l.level) +
           ",\"index\":" + (l.is_index ? "true" : "false") + ",\"closed\":" + (l.closed ? "true" : "false") +
           "},\"geometry\":{\"type\":\"LineString\",\"coordinates\":[";
    for (std::size_t k = 0; k < l.vertices.size(); ++k) {
      if (k) out += ',';
      out += '[' + format_number(l.vertices[k].first) + ',' + format_number(l.vertices[k].second) + ']';
    }
    out += "]}}";
  }
  out += contours.lines.empty() ? "]}\n" : "\n]}\n";
  return out;
}

void export_geojson(const ContourSet& contours, const std::filesystem::path& path) {
  write_file_atomic(path, geojson_string(contours));
}

ContourSet parse_geojson(std::string_view text) {
  using nlohmann::json;
  const auto fail = [](const std::string& what) { throw Error(ErrorCode::MalformedVector, what); };
  json doc;
  try {
    doc = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    fail(std::string("invalid JSON: ") + e.what());
  }
  if (!doc.is_object() || doc.value("type", "") != "FeatureCollection" || !doc.contains("features") ||
      !doc["features"].is_array()) {
    fail("expected a FeatureCollection");
  }
  ContourSet cs;
  bool have_box = false;
  Bounds box{};
  for (const auto& f : doc["features"]) {
    if (!f.is_object() || !f.contains("geometry") || !f.contains("properties")) fail("feature lacks geometry");
    const auto& g = f["geometry"];
    const auto& p = f["properties"];
    if (!g.is_object() || g.value("type", "") != "LineString" || !g.contains("coordinates") ||
        !g["coordinates"].is_array()) {
      fail("only LineString geometries are supported");
    }
    if (!p.is_object() || !p.contains("elevation") || !p["elevation"].is_number()) {
      fail("feature lacks a numeric elevation");
    }
    ContourLine line;
    line.level = p["elevation"].get<double>();
    line.is_index = p.contains("index") && p["index"].is_boolean() && p["index"].get<bool>();
    for (const auto& c : g["coordinates"]) {
      if (!c.is_array() || c.size() < 2 || !c[0].is_number() || !c[1].is_number()) fail("bad coordinate");
      line.vertices.emplace_back(c[0].get<double>(), c[1].get<double>());
    }
    if (line.vertices.size() < 2) fail("LineString needs two coordinates");
    if (p.contains("closed") && p["closed"].is_boolean()) {
      line.closed = p["closed"].get<bool>();
    } else {
      line.closed = line.vertices.front() == line.vertices.back();
    }
    line.boundary_terminated = !line.closed;
    for (const auto& [x, y] : line.vertices) {
      if (!have_box) {
        box = Bounds{x, y, x, y};
        have_box = true;
      }
      box.min_lon = std::min(box.min_lon, x);
      box.min_lat = std::min(box.min_lat, y);
      box.max_lon = std::max(box.max_lon, x);
      box.max_lat = std::max(box.max_lat, y);
    }
    cs.level_values.push_back(line.level);
    cs.lines.push_back(std::move(line));
  }
  std::sort(cs.level_values.begin(), cs.level_values.end());
  cs.level_values.erase(std::unique(cs.level_values.begin(), cs.level_values.end()), cs.level_values.end());
  if (doc.contains("bbox")) {
    const auto& bb = doc["bbox"];
    if (!bb.is_array() || bb.size() != 4) fail("bbox needs four numbers");
    for (const auto& v : bb) {
      if (!v.is_number()) fail("bbox needs four numbers");
    }
    cs.bounds = Bounds{bb[0].get<double>(), bb[1].get<double>(), bb[2].get<double>(), bb[3].get<double>()};
  } else {
    cs.bounds = box;
  }
  return cs;
}

ContourSet load_geojson(const std::filesystem::path& path) {
  const auto bytes = read_file_bytes(path);
  return parse_geojson(std::string_view(reinterpret_cast<const char*>(bytes.data()), bytes.size()));
}

namespace {

std::string fixed3(double v) {
  std::array<char, 64> buf{};
  double r = std::round(v * 1000.0) / 1000.0;
  if (r == 0.0) r = 0.0;
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), r, std::chars_format::fixed, 3);
  return std::string(buf.data(), res.ptr);
}

std::string display_value(double meters, UnitLabel unit) {
  const double v = unit == UnitLabel::Feet ? meters * kFeetPerMeter : meters;
  return format_number(std::round(v * 100.0) / 100.0);
}

}  // namespace

std::string svg_string(const ContourSet& contours, const Bounds& bounds, const SvgOptions& opts) {
  if (!(bounds.max_lon > bounds.min_lon) || !(bounds.max_lat > bounds.min_lat)) {
    throw Error(ErrorCode::DegenerateBounds, "SVG bounds have zero or negative extent");
  }
  constexpr double margin = 40.0;
  constexpr double footer = 40.0;
  const double mean_lat = 0.5 * (bounds.min_lat + bounds.max_lat);
  const double kx = std::cos(mean_lat * std::numbers::pi / 180.0);
  const double w = (bounds.max_lon - bounds.min_lon) * kx;
  const double h = bounds.max_lat - bounds.min_lat;
  const double avail_w = kSvgWidth - 2 * margin;
  const double avail_h = kSvgHeight - 2 * margin - footer;
  const double scale = std::min(avail_w / w, avail_h / h);
  const double ox = margin + 0.5 * (avail_w - w * scale);
  const double oy = margin + 0.5 * (avail_h - h * scale);
  const auto px = [&](const std::pair<double, double>& p) {
    return std::pair{ox + (p.first - bounds.min_lon) * kx * scale, oy + (bounds.max_lat - p.second) * scale};
  };
  const char* unit = opts.unit == UnitLabel::Feet ? "ft" : "m";

  std::ostringstream s;
  s << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kSvgWidth << "\" height=\"" << kSvgHeight
    << "\" viewBox=\"0 0 " << kSvgWidth << ' ' << kSvgHeight << "\">\n";
  s << "<rect x=\"0\" y=\"0\" width=\"" << kSvgWidth << "\" height=\"" << kSvgHeight << "\" fill=\"#ffffff\"/>\n";
  s << "<g fill=\"none\" stroke=\"#8b4513\" stroke-linejoin=\"round\" stroke-linecap=\"round\">\n";
  for (const auto& l : contours.lines) {
    if (l.vertices.empty()) continue;
    s << "<path class=\"" << (l.is_index ? "index" : "normal") << "\" stroke-width=\"" << (l.is_index ? "1.8" : "0.6")
      << "\" d=\"";
    for (std::size_t k = 0; k < l.vertices.size(); ++k) {
      const auto [x, y] = px(l.vertices[k]);
      s << (k == 0 ? "M" : " L") << fixed3(x) << ' ' << fixed3(y);
    }
    s << "\"/>\n";
  }
  s << "</g>\n";
  s << "<g font-family=\"sans-serif\" font-size=\"10\" fill=\"#8b4513\" text-anchor=\"middle\">\n";
  for (const auto& l : contours.lines) {
    if (!l.is_index || l.vertices.empty()) continue;
    const auto [x, y] = px(l.vertices[l.vertices.size() / 2]);
    s << "<text class=\"label\" x=\"" << fixed3(x) << "\" y=\"" << fixed3(y) << "\">"
      << display_value(l.level, opts.unit) << "</text>\n";
  }
  s << "</g>\n";
  std::string interval_text;
  if (contours.levels.explicit_levels) {
    interval_text = "contour levels as listed, " + std::string(unit);
  } else {
    interval_text = "contour interval " + display_value(contours.levels.interval, opts.unit) + ' ' + unit;
  }
  s << "<text class=\"margin\" x=\"" << fixed3(margin) << "\" y=\"" << fixed3(kSvgHeight - margin / 2)
    << "\" font-family=\"sans-serif\" font-size=\"12\" fill=\"#000000\">" << interval_text << "</text>\n";
  s << "</svg>\n";
  return s.str();
}

void export_svg(const ContourSet& contours, const Bounds& bounds, const std::filesystem::path& path,
                const SvgOptions& opts) {
  write_file_atomic(path, svg_string(contours, bounds, opts));
}

namespace {

using ojson = nlohmann::ordered_json;

ojson comparison_json(const ComparisonReport& r) {
  ojson j;
  j["levels_compared"] = r.levels_compared;
  j["mean_symmetric_distance"] = r.mean_symmetric_distance;
  j["max_symmetric_distance"] = r.max_symmetric_distance;
  j["open_line_count"] = {{"a", r.open_line_count[0]}, {"b", r.open_line_count[1]}};
  j["intersection_count"] = {{"a", r.intersection_count[0]}, {"b", r.intersection_count[1]}};
  j["length_ratio"] = r.length_ratio;
  j["seam_break_count"] = r.seam_break_count;
  return j;
}

ojson agreement_json(const AgreementReport& r) {
  ojson j;
  j["arcs_checked"] = r.arcs_checked;
  j["nodes_checked"] = r.nodes_checked;
  j["mean_abs_error"] = r.mean_abs_error;
  j["max_abs_error"] = r.max_abs_error;
  j["samples_per_arc"] = r.samples_per_arc;
  return j;
}

ojson seam_json(const SeamReport& r) {
  ojson j;
  j["seam_break_count"] = r.seam_break_count;
  j["breaks"] = ojson::array();
  for (const auto& b : r.breaks) {
    j["breaks"].push_back({{"seam", b.seam}, {"level", b.level}, {"lon", b.location.first}, {"lat", b.location.second}});
  }
  return j;
}

std::string dump(const ojson& j) { return j.dump(2) + "\n"; }

std::string num(double v) {
  std::array<char, 64> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), res.ptr);
}

std::string agreement_row(const AgreementReport& r) {
  return std::to_string(r.arcs_checked) + ',' + std::to_string(r.nodes_checked) + ',' + num(r.mean_abs_error) + ',' +
         num(r.max_abs_error) + ',' + std::to_string(r.samples_per_arc);
}

}  // namespace

std::string to_json(const ComparisonReport& r) { return dump(comparison_json(r)); }

std::string to_csv(const ComparisonReport& r) {
  std::string out =
      "levels_compared,mean_symmetric_distance,max_symmetric_distance,length_ratio,open_line_count_a,"
      "open_line_count_b,intersection_count_a,intersection_count_b,seam_break_count\n";
  for (std::size_t i = 0; i < r.levels_compared.size(); ++i) {
    out += num(r.levels_compared[i]) + ',' + num(r.mean_symmetric_distance[i]) + ',' +
           num(r.max_symmetric_distance[i]) + ',' + num(r.length_ratio[i]) + ',' +
           std::to_string(r.open_line_count[0]) + ',' + std::to_string(r.open_line_count[1]) + ',' +
           std::to_string(r.intersection_count[0]) + ',' + std::to_string(r.intersection_count[1]) + ',' +
           std::to_string(r.seam_break_count) + '\n';
  }
  return out;
}

std::string to_json(const AgreementReport& r) { return dump(agreement_json(r)); }

std::string to_csv(const AgreementReport& r) {
  return "arcs_checked,nodes_checked,mean_abs_error,max_abs_error,samples_per_arc\n" + agreement_row(r) + '\n';
}

std::string to_json(const SeamReport& r) { return dump(seam_json(r)); }

std::string to_csv(const SeamReport& r) {
  std::string out = "seam,level,lon,lat\n";
  for (const auto& b : r.breaks) {
    out += std::to_string(b.seam) + ',' + num(b.level) + ',' + num(b.location.first) + ',' + num(b.location.second) +
           '\n';
  }
  return out;
}

std::string to_json(const ValidationReport& r) {
  ojson j;
  j["agreement"] = ojson::array();
  for (const auto& a : r.agreements) j["agreement"].push_back(agreement_json(a));
  if (r.seams) j["seams"] = seam_json(*r.seams);
  return dump(j);
}

std::string to_csv(const ValidationReport& r) {
  std::string out = "pair,arcs_checked,nodes_checked,mean_abs_error,max_abs_error,samples_per_arc,seam_break_count\n";
  const std::string seams = r.seams ? std::to_string(r.seams->seam_break_count) : "";
  for (std::size_t i = 0; i < r.agreements.size(); ++i) {
    out += std::to_string(i) + ',' + agreement_row(r.agreements[i]) + ',' + seams + '\n';
  }
  return out;
}

}  // namespace isoline
