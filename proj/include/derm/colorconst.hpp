#pragma once

#include <cstddef>
#include <vector>

#include "derm/image.hpp"

namespace derm {

/// L2-normalized scene illuminant estimate; every component positive.
struct Illuminant {
  double r;
  double g;
  double b;

  void validate() const;  // throws on non-positive or non-unit values
};

/// Shades-of-gray estimate: e_c proportional to the Minkowski p-mean of the
/// channel, L2-normalized. p = 1 is gray-world, large p approaches max-RGB.
/// Throws if p < 1 or a channel is identically zero.
Illuminant estimate_illuminant(const RgbImage& image, double p = 6.0);

/// Same estimator over interleaved RGB floats in [0,1]; the quantization-free
/// path used for scale-invariance checks.
Illuminant estimate_illuminant(const std::vector<double>& rgb,
                               std::size_t pixel_count, double p = 6.0);

/// Diagonal correction toward equal-energy gray: channel c is scaled by
/// (1/sqrt(3))/e_c, clamped and requantized.
RgbImage correct(const RgbImage& image, const Illuminant& illum);

}  // namespace derm
