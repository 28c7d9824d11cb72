#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "isoline/grid.hpp"

namespace isoline {

enum class FormatKind { SrtmHgt, AsciiGrid, RawGrid };

std::string_view format_name(FormatKind kind) noexcept;

inline constexpr std::int16_t kHgtVoid = -32768;

/// Parses an SRTM tile. `tile_name` is the SW-corner name such as "N18E076";
/// a trailing ".hgt" and any leading directories are ignored.
ElevationGrid parse_hgt(std::span<const std::uint8_t> bytes, std::string_view tile_name);

/// Serializes a 1201x1201 or 3601x3601 point-registered grid with integral
/// values. Voids become 0x8000.
std::vector<std::uint8_t> write_hgt(const ElevationGrid& grid);

/// "N18E076" style name of the tile whose SW corner matches the grid.
std::string hgt_tile_name(const ElevationGrid& grid);

ElevationGrid parse_ascii_grid(std::string_view text);

/// Emits the ASCII grid carrier; the grid must have equal lat/lon steps.
/// Point-registered grids are written with a half-cell corner shift so the
/// sample positions are preserved.
std::string write_ascii_grid(const ElevationGrid& grid);

ElevationGrid parse_raw_grid(std::span<const std::uint8_t> bytes, std::string_view header);

struct RawGridFiles {
  std::vector<std::uint8_t> payload;
  std::string header;
};

/// Little-endian int16 payload plus sidecar header. Values must be integral.
RawGridFiles write_raw_grid(const ElevationGrid& grid, bool big_endian = false);

/// Dispatch on extension: .hgt, .asc/.dem/.txt, .raw (with .rawhdr sidecar).
FormatKind detect_format(const std::filesystem::path& path);

ElevationGrid load_grid(const std::filesystem::path& path);

/// Writes in the carrier chosen by extension (.hgt, .asc, .raw).
void save_grid(const ElevationGrid& grid, const std::filesystem::path& path);

std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& path);

/// Writes through a temporary file in the same directory and renames it into
/// place; a failed write leaves no file at `path`.
void write_file_atomic(const std::filesystem::path& path, std::span<const std::uint8_t> bytes);
void write_file_atomic(const std::filesystem::path& path, std::string_view text);

}  // namespace isoline
