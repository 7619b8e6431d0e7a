#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "derm/image.hpp"

namespace derm {

struct AugmentSpec {
  bool flip_horizontal = true;
  bool flip_vertical = true;
  double scale_low = 0.8;
  double scale_high = 1.2;
  double brightness_max_delta = 64.0 / 255.0;
  double contrast_max_delta = 0.75;
  double saturation_max_delta = 0.25;
  double hue_max_delta = 0.04;
  bool color_jitter_enabled = true;
  std::uint64_t seed = 0;

  void validate() const;  // throws on violated invariants

  /// Everything off: the resulting transform is the identity.
  static AugmentSpec disabled();
};

RgbImage flip_h(const RgbImage& image);
RgbImage flip_v(const RgbImage& image);
BinaryMask flip_h(const BinaryMask& mask);
BinaryMask flip_v(const BinaryMask& mask);

/// Bilinear resample to round(w*f) x round(h*f), then center-crop or
/// reflect-pad back to the original size so downstream shapes are stable.
RgbImage scale(const RgbImage& image, double factor);
/// Same geometry with nearest-neighbor sampling, so values stay in {0,1}.
BinaryMask scale(const BinaryMask& mask, double factor);

/// One jitter parameter draw, each component in [-1,1].
struct JitterDraw {
  double brightness = 0.0;
  double contrast = 0.0;
  double saturation = 0.0;
  double hue = 0.0;
};

/// Applies brightness, contrast, saturation, hue in that fixed order (the
/// stages do not commute). Works in [0,1] floats, clamps after each stage,
/// quantizes to 8 bits once at the end.
RgbImage color_jitter(const RgbImage& image, const AugmentSpec& spec,
                      const JitterDraw& draw);

struct AugmentResult {
  RgbImage image;
  std::optional<BinaryMask> mask;
};

/// Full per-entry transform. All random draws come from a stream derived
/// from (spec.seed, index): flips, then scale factor, then jitter deltas.
/// Geometric steps hit image and mask identically; jitter hits the image
/// only.
AugmentResult apply(const RgbImage& image,
                    const std::optional<BinaryMask>& mask,
                    const AugmentSpec& spec, std::uint64_t index);

struct PlanEntry {
  std::string image_id;
  std::string class_label;
  std::uint64_t entry_index;
};

/// Oversampling plan; every class ends up with exactly the target count.
struct SamplePlan {
  std::vector<PlanEntry> entries;
};

/// Cycles each class's images (shuffled by seed) until target_per_class
/// entries exist. Entry indices are unique across the plan, so each entry
/// seeds an independent draw.
SamplePlan balance_plan(const std::map<std::string, std::string>& labels,
                        std::size_t target_per_class, std::uint64_t seed);

}  // namespace derm
