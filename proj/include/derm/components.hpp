#pragma once

#include "derm/image.hpp"

namespace derm {

/// Labels connected components of the 1-pixels with labels 1..K, assigned in
/// discovery order of a row-major scan (so component 1 contains the smallest
/// 1-pixel index). connectivity is 4 or 8.
LabelMap label_components(const BinaryMask& mask, int connectivity = 8);

/// Keeps only the largest component by pixel count; size ties go to the
/// component containing the smallest row-major pixel index. All-zero input
/// stays all-zero.
BinaryMask largest_component(const BinaryMask& mask, int connectivity = 8);

}  // namespace derm
