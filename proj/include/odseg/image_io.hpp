#pragma once

#include <string>

#include "odseg/image.hpp"

namespace odseg {

/// Decode a PNG/PPM/TIFF (or other common raster) file into 1- or 3-channel
/// RGB. 16-bit inputs are rescaled to 8. Throws std::runtime_error naming the
/// path on failure.
ColorImage read_image(const std::string& path);

/// Decode a mask file: pixels >= 128 (first channel) are true.
BinaryMask read_mask(const std::string& path);

/// Write a mask as single-channel PNG with values exactly {0, 255}.
void write_mask_png(const std::string& path, const BinaryMask& mask);

void write_gray_png(const std::string& path, const GrayImage& img);

void write_rgb_png(const std::string& path, const ColorImage& img);

}  // namespace odseg
