#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "stegcost/image.hpp"

namespace stegcost {

/// Pipeline operations need at least this many rows and columns.
inline constexpr int kMinImageSize = 5;

/// Parses a binary PGM ("P5", maxval 255). Header comments start with '#'
/// and run to end of line. Throws ParseError (with byte offset) on malformed
/// magic, unsupported maxval, truncated raster, or — unless enforce_min_dims
/// is cleared for parser-level tests — dimensions below kMinImageSize.
GrayImage read_pgm(std::string_view bytes, bool enforce_min_dims = true);

/// Canonical encoding: "P5\n<w> <h>\n255\n" followed by the row-major raster.
/// read_pgm(write_pgm(img)) == img, bit-exact.
std::string write_pgm(const GrayImage& img);

/// File variants. Throw IoError when the path cannot be read or written;
/// parse errors propagate from read_pgm.
GrayImage load_pgm(const std::filesystem::path& path);
void save_pgm(const GrayImage& img, const std::filesystem::path& path);

/// Whole-file helpers shared by the binary formats and the CLI.
std::string read_binary_file(const std::filesystem::path& path);
void write_binary_file(const std::filesystem::path& path, std::string_view bytes);

}  // namespace stegcost
