#pragma once

#include <filesystem>

#include "sca/image.hpp"

namespace sca {

/// Reads a portable anymap: P2/P5 graymaps directly, P3/P6 pixmaps through
/// to_grayscale. 16-bit maxval is accepted. Throws IoError.
GrayImage read_image(const std::filesystem::path& path);

/// Writes an 8-bit binary graymap (P5). Intensities are rounded to 1/255.
void write_pgm(const std::filesystem::path& path, const GrayImage& img);

/// Writes a binary pixmap (P6) from three channel planes.
void write_ppm(const std::filesystem::path& path, const RgbImage& img);

/// Rounds every intensity to the nearest 8-bit level, as a PGM round trip would.
GrayImage quantize_8bit(const GrayImage& img);

}  // namespace sca
