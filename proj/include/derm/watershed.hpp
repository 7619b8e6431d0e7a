#pragma once

#include "derm/image.hpp"

namespace derm {

/// Seeds for marker-based watershed: pixels at or above fg_threshold get
/// label 2 (lesion), at or below bg_threshold label 1 (background), the rest
/// stay 0. May return an all-zero map when nothing qualifies.
LabelMap derive_markers(const ProbMap& prob, double fg_threshold = 0.8,
                        double bg_threshold = 0.2);

inline constexpr std::int32_t kBackgroundMarker = 1;
inline constexpr std::int32_t kLesionMarker = 2;

/// Priority-flood from the markers in increasing elevation order; ties break
/// by queue insertion order (FIFO). Flooding is 4-connected; markers enter
/// the queue in row-major order and a flooded pixel claims its unlabeled
/// neighbors north, west, east, south. Every pixel ends up with exactly one
/// marker label; marker pixels keep theirs.
LabelMap watershed(const ProbMap& elevation, const LabelMap& markers);

}  // namespace derm
