#include "derm/colorconst.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace derm {

namespace {

const char* kChannelNames[3] = {"R", "G", "B"};

Illuminant normalize(double mr, double mg, double mb) {
  for (int c = 0; c < 3; ++c) {
    const double m = c == 0 ? mr : c == 1 ? mg : mb;
    if (!(m > 0.0))
      throw std::runtime_error(std::string("degenerate illuminant: channel ") +
                               kChannelNames[c] + " is identically zero");
  }
  const double norm = std::sqrt(mr * mr + mg * mg + mb * mb);
  return Illuminant{mr / norm, mg / norm, mb / norm};
}

}  // namespace

void Illuminant::validate() const {
  if (!(r > 0.0 && g > 0.0 && b > 0.0))
    throw std::invalid_argument("illuminant components must be positive");
  if (std::abs(r * r + g * g + b * b - 1.0) > 1e-9)
    throw std::invalid_argument("illuminant must be L2-normalized");
}

Illuminant estimate_illuminant(const std::vector<double>& rgb,
                               std::size_t pixel_count, double p) {
  if (!(p >= 1.0))
    throw std::invalid_argument("Minkowski order p must be >= 1, got " +
                                std::to_string(p));
  if (pixel_count == 0 || rgb.size() != pixel_count * 3)
    throw std::invalid_argument("rgb buffer length must be pixel_count*3");
  double sum[3] = {0.0, 0.0, 0.0};
  for (std::size_t i = 0; i < pixel_count; ++i)
    for (int c = 0; c < 3; ++c) sum[c] += std::pow(rgb[3 * i + c], p);
  const double n = static_cast<double>(pixel_count);
  return normalize(std::pow(sum[0] / n, 1.0 / p),
                   std::pow(sum[1] / n, 1.0 / p),
                   std::pow(sum[2] / n, 1.0 / p));
}

Illuminant estimate_illuminant(const RgbImage& image, double p) {
  if (!(p >= 1.0))
    throw std::invalid_argument("Minkowski order p must be >= 1, got " +
                                std::to_string(p));
  // Per-value powers come from a 256-entry table; image sizes make pow()
  // per pixel needlessly slow.
  double table[256];
  for (int v = 0; v < 256; ++v) table[v] = std::pow(v / 255.0, p);
  double sum[3] = {0.0, 0.0, 0.0};
  const auto& data = image.data();
  for (std::size_t i = 0; i < data.size(); i += 3) {
    sum[0] += table[data[i]];
    sum[1] += table[data[i + 1]];
    sum[2] += table[data[i + 2]];
  }
  const double n = static_cast<double>(image.pixel_count());
  return normalize(std::pow(sum[0] / n, 1.0 / p),
                   std::pow(sum[1] / n, 1.0 / p),
                   std::pow(sum[2] / n, 1.0 / p));
}

RgbImage correct(const RgbImage& image, const Illuminant& illum) {
  illum.validate();
  const double target = 1.0 / std::sqrt(3.0);
  const double gain[3] = {target / illum.r, target / illum.g,
                          target / illum.b};
  std::vector<std::uint8_t> out(image.data().size());
  for (std::size_t i = 0; i < out.size(); i += 3) {
    for (int c = 0; c < 3; ++c) {
      const double v = image.data()[i + c] * gain[c];
      out[i + c] = static_cast<std::uint8_t>(
          std::lround(v < 0.0 ? 0.0 : (v > 255.0 ? 255.0 : v)));
    }
  }
  return RgbImage(image.width(), image.height(), std::move(out));
}

}  // namespace derm
