#pragma once

#include <string>

#include "derm/image.hpp"

namespace derm {

/// Loads an 8-bit single-channel PNG and binarizes it: value >= 128 -> 1.
/// Throws if the file is missing or is not 8-bit grayscale.
BinaryMask load_mask_png(const std::string& path);

/// Writes a mask as 8-bit grayscale PNG, 1 -> 255 and 0 -> 0.
void save_mask_png(const BinaryMask& mask, const std::string& path);

/// Loads a 16-bit single-channel PNG as a one-channel probability map,
/// value/65535 -> probability.
ProbMap load_probmap_png16(const std::string& path);

/// Loads an 8-bit color image. Grayscale and palette images are expanded to
/// RGB, an alpha channel is dropped; 16-bit files are rejected.
RgbImage load_rgb_png(const std::string& path);

void save_rgb_png(const RgbImage& image, const std::string& path);

/// Raw 8-bit grayscale dump, data.size() must equal width*height. Used for
/// stage-by-stage debug output (e.g. marker maps).
void save_gray8_png(const std::vector<std::uint8_t>& data, int width,
                    int height, const std::string& path);

}  // namespace derm
