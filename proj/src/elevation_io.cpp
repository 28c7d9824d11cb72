#include "isoline/elevation_io.hpp"

#include <unistd.h>

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>

#include "isoline/error.hpp"

namespace isoline {

namespace {

constexpr std::array<std::size_t, 2> kTileSizes{1201, 3601};

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    const std::size_t start = i;
    while (i < line.size() && !std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    if (i > start) out.push_back(line.substr(start, i - start));
  }
  return out;
}

std::optional<double> to_double(std::string_view tok) {
  if (!tok.empty() && tok.front() == '+') tok.remove_prefix(1);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc() || ptr != tok.data() + tok.size() || !std::isfinite(v)) return std::nullopt;
  return v;
}

std::string fmt_double(double v) {
  std::array<char, 64> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), res.ptr);
}

bool is_key_token(std::string_view tok) {
  return !tok.empty() && std::isalpha(static_cast<unsigned char>(tok.front()));
}

std::vector<std::string_view> split_lines(std::string_view text) {
  std::vector<std::string_view> lines;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(start, end - start);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    lines.push_back(line);
    if (end == text.size()) break;
    start = end + 1;
  }
  return lines;
}

using Header = std::map<std::string, std::string>;

std::string_view require(const Header& h, const std::string& key) {
  const auto it = h.find(key);
  if (it == h.end()) throw Error(ErrorCode::MissingHeaderKey, "missing header key '" + key + "'");
  return it->second;
}

double require_number(const Header& h, const std::string& key) {
  const auto v = to_double(require(h, key));
  if (!v) throw Error(ErrorCode::NonNumericSample, "header key '" + key + "' is not numeric");
  return *v;
}

std::size_t require_count(const Header& h, const std::string& key) {
  const double v = require_number(h, key);
  if (v < 1.0 || v != std::floor(v) || v > 1e9) {
    throw Error(ErrorCode::RowLengthMismatch, "header key '" + key + "' must be a positive integer");
  }
  return static_cast<std::size_t>(v);
}

GridGeoref cell_centered_georef(const Header& h, std::size_t rows) {
  const double xll = require_number(h, "xllcorner");
  const double yll = require_number(h, "yllcorner");
  const double cs = require_number(h, "cellsize");
  GridGeoref g;
  g.lat_step = cs;
  g.lon_step = cs;
  g.origin_lat = yll + (static_cast<double>(rows) - 0.5) * cs;
  g.origin_lon = xll + 0.5 * cs;
  g.registration = Registration::CellCentered;
  g.validate();
  return g;
}

// Parses one "key value" header line into `h`; returns false if the line is
// not a header line.
bool take_header_line(std::string_view line, Header& h) {
  const auto toks = split_ws(line);
  if (toks.empty() || !is_key_token(toks[0])) return false;
  std::string key = lower(toks[0]);
  if (!key.empty() && key.back() == ':') key.pop_back();
  h[key] = toks.size() > 1 ? std::string(toks[1]) : std::string();
  return true;
}

bool is_blank_or_comment(std::string_view line) {
  const auto toks = split_ws(line);
  return toks.empty() || toks[0].front() == '#';
}

struct TileCorner {
  int lat = 0;
  int lon = 0;
};

TileCorner parse_tile_name(std::string_view name) {
  if (const auto slash = name.find_last_of("/\\"); slash != std::string_view::npos) {
    name.remove_prefix(slash + 1);
  }
  if (name.size() > 4 && lower(name.substr(name.size() - 4)) == ".hgt") name.remove_suffix(4);
  const auto bad = [&] { return Error(ErrorCode::BadTileName, "tile name '" + std::string(name) + "' does not match [NS]dd[EW]ddd"); };
  if (name.size() != 7) throw bad();
  const char ns = static_cast<char>(std::toupper(static_cast<unsigned char>(name[0])));
  const char ew = static_cast<char>(std::toupper(static_cast<unsigned char>(name[3])));
  if ((ns != 'N' && ns != 'S') || (ew != 'E' && ew != 'W')) throw bad();
  const auto digits = [&](std::size_t pos, std::size_t n) {
    int v = 0;
    for (std::size_t i = pos; i < pos + n; ++i) {
      if (!std::isdigit(static_cast<unsigned char>(name[i]))) throw bad();
      v = v * 10 + (name[i] - '0');
    }
    return v;
  };
  TileCorner t;
  t.lat = digits(1, 2) * (ns == 'S' ? -1 : 1);
  t.lon = digits(4, 3) * (ew == 'W' ? -1 : 1);
  if (t.lat < -90 || t.lat > 89 || t.lon < -180 || t.lon > 179) throw bad();
  return t;
}

void require_int16_values(const ElevationGrid& grid) {
  const auto s = grid.samples();
  const auto m = grid.void_mask();
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (m[i] != 0) continue;
    if (s[i] != std::floor(s[i]) || s[i] < -32767.0 || s[i] > 32767.0) {
      throw Error(ErrorCode::ValueOutOfInt16Range,
                  "sample " + fmt_double(s[i]) + " is not an integer in [-32767, 32767]");
    }
  }
}

ElevationGrid decode_int16(std::span<const std::uint8_t> bytes, std::size_t rows, std::size_t cols,
                           bool big_endian, std::optional<double> nodata, const GridGeoref& g) {
  std::vector<double> samples(rows * cols);
  std::vector<std::uint8_t> mask(rows * cols, 0);
  for (std::size_t i = 0; i < rows * cols; ++i) {
    const std::uint8_t b0 = bytes[2 * i];
    const std::uint8_t b1 = bytes[2 * i + 1];
    const auto u = static_cast<std::uint16_t>(big_endian ? (b0 << 8) | b1 : (b1 << 8) | b0);
    const auto v = static_cast<std::int16_t>(u);
    if (v == kHgtVoid || (nodata && static_cast<double>(v) == *nodata)) {
      mask[i] = 1;
      samples[i] = 0.0;
    } else {
      samples[i] = v;
    }
  }
  return ElevationGrid(rows, cols, std::move(samples), std::move(mask), g);
}

}  // namespace

std::string_view format_name(FormatKind kind) noexcept {
  switch (kind) {
    case FormatKind::SrtmHgt:
      return "SrtmHgt";
    case FormatKind::AsciiGrid:
      return "AsciiGrid";
    case FormatKind::RawGrid:
      return "RawGrid";
  }
  return "Unknown";
}

ElevationGrid parse_hgt(std::span<const std::uint8_t> bytes, std::string_view tile_name) {
  std::size_t n = 0;
  for (std::size_t size : kTileSizes) {
    if (bytes.size() == 2 * size * size) n = size;
  }
  if (n == 0) {
    throw Error(ErrorCode::LengthNotTileSized,
                "HGT payload of " + std::to_string(bytes.size()) + " bytes is not 2*n^2 for n in {1201, 3601}");
  }
  const TileCorner corner = parse_tile_name(tile_name);
  GridGeoref g;
  g.origin_lat = corner.lat + 1.0;
  g.origin_lon = corner.lon;
  g.lat_step = 1.0 / static_cast<double>(n - 1);
  g.lon_step = g.lat_step;
  g.registration = Registration::PointRegistered;
  return decode_int16(bytes, n, n, true, std::nullopt, g);
}

std::string hgt_tile_name(const ElevationGrid& grid) {
  const int lat = static_cast<int>(std::lround(grid.georef().origin_lat - 1.0));
  const int lon = static_cast<int>(std::lround(grid.georef().origin_lon));
  char buf[32];
  std::snprintf(buf, sizeof buf, "%c%02d%c%03d", lat < 0 ? 'S' : 'N', std::abs(lat), lon < 0 ? 'W' : 'E',
                std::abs(lon));
  return buf;
}

std::vector<std::uint8_t> write_hgt(const ElevationGrid& grid) {
  const std::size_t n = grid.rows();
  const auto& g = grid.georef();
  const bool sized = grid.cols() == n && std::find(kTileSizes.begin(), kTileSizes.end(), n) != kTileSizes.end();
  if (!sized || g.registration != Registration::PointRegistered) {
    throw Error(ErrorCode::NotTileShaped, "grid is not a square point-registered 1201 or 3601 tile");
  }
  const double step = 1.0 / static_cast<double>(n - 1);
  if (g.lat_step != step || g.lon_step != step || g.origin_lat != std::round(g.origin_lat) ||
      g.origin_lon != std::round(g.origin_lon)) {
    throw Error(ErrorCode::NotTileShaped, "grid georef does not match a 1x1 degree tile");
  }
  require_int16_values(grid);
  std::vector<std::uint8_t> out(2 * n * n);
  const auto s = grid.samples();
  const auto m = grid.void_mask();
  for (std::size_t i = 0; i < n * n; ++i) {
    const std::int16_t v = m[i] != 0 ? kHgtVoid : static_cast<std::int16_t>(s[i]);
    const auto u = static_cast<std::uint16_t>(v);
    out[2 * i] = static_cast<std::uint8_t>(u >> 8);
    out[2 * i + 1] = static_cast<std::uint8_t>(u & 0xFF);
  }
  return out;
}

ElevationGrid parse_ascii_grid(std::string_view text) {
  const auto lines = split_lines(text);
  Header h;
  std::size_t i = 0;
  for (; i < lines.size(); ++i) {
    if (is_blank_or_comment(lines[i])) continue;
    if (!take_header_line(lines[i], h)) break;
  }
  const std::size_t cols = require_count(h, "ncols");
  const std::size_t rows = require_count(h, "nrows");
  const double nodata = require_number(h, "nodata_value");
  const GridGeoref g = cell_centered_georef(h, rows);

  std::vector<double> samples;
  std::vector<std::uint8_t> mask;
  samples.reserve(rows * cols);
  mask.reserve(rows * cols);
  std::size_t data_rows = 0;
  for (; i < lines.size(); ++i) {
    const auto toks = split_ws(lines[i]);
    if (toks.empty()) continue;
    if (data_rows == rows || toks.size() != cols) {
      throw Error(ErrorCode::RowLengthMismatch, "data line " + std::to_string(i + 1) + " has " +
                                                    std::to_string(toks.size()) + " values, expected " +
                                                    std::to_string(cols) + " in " + std::to_string(rows) + " rows");
    }
    for (const auto tok : toks) {
      const auto v = to_double(tok);
      if (!v) {
        throw Error(ErrorCode::NonNumericSample,
                    "non-numeric sample '" + std::string(tok) + "' on line " + std::to_string(i + 1));
      }
      const bool is_void = *v == nodata;
      samples.push_back(is_void ? 0.0 : *v);
      mask.push_back(is_void ? 1 : 0);
    }
    ++data_rows;
  }
  if (data_rows != rows) {
    throw Error(ErrorCode::RowLengthMismatch,
                "found " + std::to_string(data_rows) + " data rows, header declares " + std::to_string(rows));
  }
  return ElevationGrid(rows, cols, std::move(samples), std::move(mask), g);
}

std::string write_ascii_grid(const ElevationGrid& grid) {
  const auto& g = grid.georef();
  if (g.lat_step != g.lon_step) {
    throw Error(ErrorCode::InvalidArgument, "ASCII grid carrier needs equal lat/lon steps");
  }
  const double cs = g.lon_step;
  double nodata = -9999.0;
  const auto s = grid.samples();
  const auto m = grid.void_mask();
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (m[i] == 0 && s[i] <= nodata) nodata = std::floor(s[i]) - 1.0;
  }
  std::ostringstream os;
  os << "ncols " << grid.cols() << "\n";
  os << "nrows " << grid.rows() << "\n";
  os << "xllcorner " << fmt_double(g.origin_lon - 0.5 * cs) << "\n";
  os << "yllcorner " << fmt_double(g.origin_lat - (static_cast<double>(grid.rows()) - 0.5) * cs) << "\n";
  os << "cellsize " << fmt_double(cs) << "\n";
  os << "NODATA_value " << fmt_double(nodata) << "\n";
  for (std::size_t r = 0; r < grid.rows(); ++r) {
    for (std::size_t c = 0; c < grid.cols(); ++c) {
      if (c != 0) os << ' ';
      os << fmt_double(grid.is_void(r, c) ? nodata : grid.at(r, c));
    }
    os << "\n";
  }
  return os.str();
}

ElevationGrid parse_raw_grid(std::span<const std::uint8_t> bytes, std::string_view header) {
  Header h;
  for (const auto line : split_lines(header)) {
    if (is_blank_or_comment(line)) continue;
    if (!take_header_line(line, h)) {
      throw Error(ErrorCode::MissingHeaderKey, "unrecognized sidecar line '" + std::string(line) + "'");
    }
  }
  const std::size_t cols = require_count(h, "ncols");
  const std::size_t rows = require_count(h, "nrows");
  const std::string order = lower(require(h, "byteorder"));
  if (order != "big" && order != "little") {
    throw Error(ErrorCode::MissingHeaderKey, "byteorder must be 'big' or 'little'");
  }
  const auto depth = to_double(require(h, "depth"));
  if (!depth || *depth != 16.0) {
    throw Error(ErrorCode::UnsupportedDepth, "only 16-bit samples are supported");
  }
  std::optional<double> nodata;
  if (h.count("nodata_value") != 0) nodata = require_number(h, "nodata_value");
  const GridGeoref g = cell_centered_georef(h, rows);
  if (bytes.size() != 2 * rows * cols) {
    throw Error(ErrorCode::PayloadSizeMismatch, "payload has " + std::to_string(bytes.size()) +
                                                    " bytes, header declares " + std::to_string(2 * rows * cols));
  }
  return decode_int16(bytes, rows, cols, order == "big", nodata, g);
}

RawGridFiles write_raw_grid(const ElevationGrid& grid, bool big_endian) {
  const auto& g = grid.georef();
  if (g.lat_step != g.lon_step) {
    throw Error(ErrorCode::InvalidArgument, "raw grid carrier needs equal lat/lon steps");
  }
  require_int16_values(grid);
  RawGridFiles out;
  out.payload.resize(2 * grid.rows() * grid.cols());
  const auto s = grid.samples();
  const auto m = grid.void_mask();
  for (std::size_t i = 0; i < s.size(); ++i) {
    const auto u = static_cast<std::uint16_t>(m[i] != 0 ? kHgtVoid : static_cast<std::int16_t>(s[i]));
    const auto hi = static_cast<std::uint8_t>(u >> 8);
    const auto lo = static_cast<std::uint8_t>(u & 0xFF);
    out.payload[2 * i] = big_endian ? hi : lo;
    out.payload[2 * i + 1] = big_endian ? lo : hi;
  }
  const double cs = g.lon_step;
  std::ostringstream os;
  os << "ncols " << grid.cols() << "\n";
  os << "nrows " << grid.rows() << "\n";
  os << "xllcorner " << fmt_double(g.origin_lon - 0.5 * cs) << "\n";
  os << "yllcorner " << fmt_double(g.origin_lat - (static_cast<double>(grid.rows()) - 0.5) * cs) << "\n";
  os << "cellsize " << fmt_double(cs) << "\n";
  os << "NODATA_value " << kHgtVoid << "\n";
  os << "byteorder: " << (big_endian ? "big" : "little") << "\n";
  os << "depth: 16\n";
  out.header = os.str();
  return out;
}

FormatKind detect_format(const std::filesystem::path& path) {
  const std::string ext = lower(path.extension().string());
  if (ext == ".hgt") return FormatKind::SrtmHgt;
  if (ext == ".asc" || ext == ".dem" || ext == ".txt") return FormatKind::AsciiGrid;
  if (ext == ".raw") return FormatKind::RawGrid;
  throw Error(ErrorCode::UnknownFormat, "unrecognized elevation file extension '" + ext + "'");
}

std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoFailure, "cannot open '" + path.string() + "'");
  std::vector<std::uint8_t> data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (in.bad()) throw Error(ErrorCode::IoFailure, "read failed for '" + path.string() + "'");
  return data;
}

ElevationGrid load_grid(const std::filesystem::path& path) {
  switch (detect_format(path)) {
    case FormatKind::SrtmHgt:
      return parse_hgt(read_file_bytes(path), path.filename().string());
    case FormatKind::AsciiGrid: {
      const auto bytes = read_file_bytes(path);
      return parse_ascii_grid(std::string_view(reinterpret_cast<const char*>(bytes.data()), bytes.size()));
    }
    case FormatKind::RawGrid: {
      auto sidecar = path;
      sidecar.replace_extension(".rawhdr");
      const auto header = read_file_bytes(sidecar);
      return parse_raw_grid(read_file_bytes(path),
                            std::string_view(reinterpret_cast<const char*>(header.data()), header.size()));
    }
  }
  throw Error(ErrorCode::UnknownFormat, "unhandled format");
}

void save_grid(const ElevationGrid& grid, const std::filesystem::path& path) {
  switch (detect_format(path)) {
    case FormatKind::SrtmHgt: {
      const std::string stem = path.stem().string();
      if (lower(stem) != lower(hgt_tile_name(grid))) {
        throw Error(ErrorCode::BadTileName, "file name '" + stem + "' does not match tile " + hgt_tile_name(grid));
      }
      write_file_atomic(path, write_hgt(grid));
      return;
    }
    case FormatKind::AsciiGrid:
      write_file_atomic(path, write_ascii_grid(grid));
      return;
    case FormatKind::RawGrid: {
      const RawGridFiles files = write_raw_grid(grid);
      auto sidecar = path;
      sidecar.replace_extension(".rawhdr");
      write_file_atomic(path, files.payload);
      write_file_atomic(sidecar, files.header);
      return;
    }
  }
}

void write_file_atomic(const std::filesystem::path& path, std::span<const std::uint8_t> bytes) {
  auto tmp = path;
  tmp += ".tmp-" + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::IoFailure, "cannot create '" + tmp.string() + "'");
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    out.flush();
    if (!out) {
      std::error_code ec;
      std::filesystem::remove(tmp, ec);
      throw Error(ErrorCode::IoFailure, "write failed for '" + path.string() + "'");
    }
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw Error(ErrorCode::IoFailure, "cannot move output into '" + path.string() + "'");
  }
}

void write_file_atomic(const std::filesystem::path& path, std::string_view text) {
  write_file_atomic(path, std::span<const std::uint8_t>(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

}  // namespace isoline
