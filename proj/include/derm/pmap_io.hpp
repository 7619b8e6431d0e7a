#pragma once

#include <string>

#include "derm/image.hpp"

namespace derm {

// PMAP layout: bytes "PMAP", then width, height, channels as u32 LE, then
// width*height*channels f32 LE values in [0,1], row-major,
// channel-interleaved.

ProbMap load_pmap(const std::string& path);
void save_pmap(const ProbMap& map, const std::string& path);

/// Loads a probability map from either format, sniffed by magic bytes:
/// "PMAP" or a 16-bit grayscale PNG.
ProbMap load_probmap(const std::string& path);

}  // namespace derm
