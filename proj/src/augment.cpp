#include "derm/augment.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "derm/rng.hpp"

namespace derm {

namespace {

double clamp01(double v) { return v < 0.0 ? 0.0 : (v > 1.0 ? 1.0 : v); }

std::uint8_t quantize(double v) {
  const long q = std::lround(clamp01(v) * 255.0);
  return static_cast<std::uint8_t>(q < 0 ? 0 : (q > 255 ? 255 : q));
}

double luma(double r, double g, double b) {
  return 0.299 * r + 0.587 * g + 0.114 * b;
}

void rgb_to_hsv(double r, double g, double b, double& h, double& s,
                double& v) {
  const double mx = std::max({r, g, b});
  const double mn = std::min({r, g, b});
  const double d = mx - mn;
  v = mx;
  s = mx == 0.0 ? 0.0 : d / mx;
  if (d == 0.0) {
    h = 0.0;
    return;
  }
  if (mx == r)
    h = (g - b) / d;
  else if (mx == g)
    h = 2.0 + (b - r) / d;
  else
    h = 4.0 + (r - g) / d;
  h /= 6.0;
  if (h < 0.0) h += 1.0;
}

void hsv_to_rgb(double h, double s, double v, double& r, double& g,
                double& b) {
  if (s == 0.0) {
    r = g = b = v;
    return;
  }
  const double hh = (h - std::floor(h)) * 6.0;
  const int i = std::min(5, static_cast<int>(hh));
  const double f = hh - i;
  const double p = v * (1.0 - s);
  const double q = v * (1.0 - s * f);
  const double t = v * (1.0 - s * (1.0 - f));
  switch (i) {
    case 0: r = v; g = t; b = p; break;
    case 1: r = q; g = v; b = p; break;
    case 2: r = p; g = v; b = t; break;
    case 3: r = p; g = q; b = v; break;
    case 4: r = t; g = p; b = v; break;
    default: r = v; g = p; b = q; break;
  }
}

// Output-to-source index maps for restoring the original size after a
// resample: center-crop when the resampled axis is longer, reflect-pad
// (edge included) when shorter.
std::vector<int> fit_indices(int resampled, int original) {
  std::vector<int> idx(original);
  if (resampled >= original) {
    const int off = (resampled - original) / 2;
    for (int i = 0; i < original; ++i) idx[i] = i + off;
  } else {
    const int off = (original - resampled) / 2;
    for (int i = 0; i < original; ++i) {
      int j = i - off;
      while (j < 0 || j >= resampled) {
        if (j < 0) j = -j - 1;
        if (j >= resampled) j = 2 * resampled - 1 - j;
      }
      idx[i] = j;
    }
  }
  return idx;
}

void check_factor(double factor, int w, int h, int& rw, int& rh) {
  if (!(factor > 0.0))
    throw std::invalid_argument("scale factor must be > 0, got " +
                                std::to_string(factor));
  rw = static_cast<int>(std::lround(w * factor));
  rh = static_cast<int>(std::lround(h * factor));
  if (rw < 1 || rh < 1)
    throw std::invalid_argument("scale factor " + std::to_string(factor) +
                                " collapses a dimension to 0");
}

// Source coordinate for output sample i under the half-pixel-centers
// convention; identical for the bilinear and nearest paths so image and
// mask stay geometrically aligned.
inline double src_coord(int i, int src_size, int dst_size) {
  return (i + 0.5) * static_cast<double>(src_size) / dst_size - 0.5;
}

}  // namespace

void AugmentSpec::validate() const {
  if (!(scale_low > 0.0) || !(scale_low <= scale_high))
    throw std::invalid_argument("scale range must satisfy 0 < low <= high");
  if (brightness_max_delta < 0.0 || contrast_max_delta < 0.0 ||
      saturation_max_delta < 0.0 || hue_max_delta < 0.0)
    throw std::invalid_argument("jitter max deltas must be >= 0");
  if (hue_max_delta > 0.5)
    throw std::invalid_argument("hue_max_delta must be <= 0.5");
}

AugmentSpec AugmentSpec::disabled() {
  AugmentSpec s;
  s.flip_horizontal = false;
  s.flip_vertical = false;
  s.scale_low = s.scale_high = 1.0;
  s.color_jitter_enabled = false;
  return s;
}

RgbImage flip_h(const RgbImage& image) {
  const int w = image.width(), h = image.height();
  RgbImage out(w, h);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x)
      for (int c = 0; c < 3; ++c)
        out.set(x, y, c, image.at(w - 1 - x, y, c));
  return out;
}

RgbImage flip_v(const RgbImage& image) {
  const int w = image.width(), h = image.height();
  RgbImage out(w, h);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x)
      for (int c = 0; c < 3; ++c)
        out.set(x, y, c, image.at(x, h - 1 - y, c));
  return out;
}

BinaryMask flip_h(const BinaryMask& mask) {
  const int w = mask.width(), h = mask.height();
  BinaryMask out(w, h);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) out.set(x, y, mask.at(w - 1 - x, y) != 0);
  return out;
}

BinaryMask flip_v(const BinaryMask& mask) {
  const int w = mask.width(), h = mask.height();
  BinaryMask out(w, h);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) out.set(x, y, mask.at(x, h - 1 - y) != 0);
  return out;
}

RgbImage scale(const RgbImage& image, double factor) {
  const int w = image.width(), h = image.height();
  int rw = 0, rh = 0;
  check_factor(factor, w, h, rw, rh);

  std::vector<std::uint8_t> resampled(static_cast<std::size_t>(rw) * rh * 3);
  for (int y = 0; y < rh; ++y) {
    const double sy = src_coord(y, h, rh);
    const int y0 = static_cast<int>(std::floor(sy));
    const double ty = sy - y0;
    const int y0c = std::clamp(y0, 0, h - 1);
    const int y1c = std::clamp(y0 + 1, 0, h - 1);
    for (int x = 0; x < rw; ++x) {
      const double sx = src_coord(x, w, rw);
      const int x0 = static_cast<int>(std::floor(sx));
      const double tx = sx - x0;
      const int x0c = std::clamp(x0, 0, w - 1);
      const int x1c = std::clamp(x0 + 1, 0, w - 1);
      for (int c = 0; c < 3; ++c) {
        const double top = (1.0 - tx) * image.at(x0c, y0c, c) +
                           tx * image.at(x1c, y0c, c);
        const double bot = (1.0 - tx) * image.at(x0c, y1c, c) +
                           tx * image.at(x1c, y1c, c);
        resampled[(static_cast<std::size_t>(y) * rw + x) * 3 + c] =
            quantize(((1.0 - ty) * top + ty * bot) / 255.0);
      }
    }
  }

  const auto xi = fit_indices(rw, w);
  const auto yi = fit_indices(rh, h);
  RgbImage out(w, h);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x)
      for (int c = 0; c < 3; ++c)
        out.set(x, y, c,
                resampled[(static_cast<std::size_t>(yi[y]) * rw + xi[x]) * 3 +
                          c]);
  return out;
}

BinaryMask scale(const BinaryMask& mask, double factor) {
  const int w = mask.width(), h = mask.height();
  int rw = 0, rh = 0;
  check_factor(factor, w, h, rw, rh);

  std::vector<std::uint8_t> resampled(static_cast<std::size_t>(rw) * rh);
  for (int y = 0; y < rh; ++y) {
    const int sy =
        std::clamp(static_cast<int>(std::lround(src_coord(y, h, rh))), 0,
                   h - 1);
    for (int x = 0; x < rw; ++x) {
      const int sx =
          std::clamp(static_cast<int>(std::lround(src_coord(x, w, rw))), 0,
                     w - 1);
      resampled[static_cast<std::size_t>(y) * rw + x] = mask.at(sx, sy);
    }
  }

  const auto xi = fit_indices(rw, w);
  const auto yi = fit_indices(rh, h);
  BinaryMask out(w, h);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x)
      out.set(x, y,
              resampled[static_cast<std::size_t>(yi[y]) * rw + xi[x]] != 0);
  return out;
}

RgbImage color_jitter(const RgbImage& image, const AugmentSpec& spec,
                      const JitterDraw& draw) {
  spec.validate();
  const std::size_t n = image.pixel_count();
  std::vector<double> buf(n * 3);
  for (std::size_t i = 0; i < n * 3; ++i)
    buf[i] = image.data()[i] / 255.0;

  // brightness
  const double bd = draw.brightness * spec.brightness_max_delta;
  if (bd != 0.0)
    for (double& v : buf) v = clamp01(v + bd);

  // contrast, scaled around the per-image mean luma
  const double ck = 1.0 + draw.contrast * spec.contrast_max_delta;
  if (ck != 1.0) {
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      sum += luma(buf[3 * i], buf[3 * i + 1], buf[3 * i + 2]);
    const double mu = sum / static_cast<double>(n);
    for (double& v : buf) v = clamp01(mu + (v - mu) * ck);
  }

  // saturation, chroma scaled around per-pixel luma
  const double sk = 1.0 + draw.saturation * spec.saturation_max_delta;
  if (sk != 1.0) {
    for (std::size_t i = 0; i < n; ++i) {
      const double y = luma(buf[3 * i], buf[3 * i + 1], buf[3 * i + 2]);
      for (int c = 0; c < 3; ++c)
        buf[3 * i + c] = clamp01(y + (buf[3 * i + c] - y) * sk);
    }
  }

  // hue rotation, as a fraction of a full turn
  const double hshift = draw.hue * spec.hue_max_delta;
  if (hshift != 0.0) {
    for (std::size_t i = 0; i < n; ++i) {
      double hh, ss, vv;
      rgb_to_hsv(buf[3 * i], buf[3 * i + 1], buf[3 * i + 2], hh, ss, vv);
      hh += hshift;
      hh -= std::floor(hh);
      hsv_to_rgb(hh, ss, vv, buf[3 * i], buf[3 * i + 1], buf[3 * i + 2]);
    }
  }

  std::vector<std::uint8_t> out(n * 3);
  for (std::size_t i = 0; i < n * 3; ++i) out[i] = quantize(buf[i]);
  return RgbImage(image.width(), image.height(), std::move(out));
}

AugmentResult apply(const RgbImage& image,
                    const std::optional<BinaryMask>& mask,
                    const AugmentSpec& spec, std::uint64_t index) {
  spec.validate();
  if (mask && (mask->width() != image.width() ||
               mask->height() != image.height()))
    throw std::invalid_argument("mask dimensions do not match image");

  // Fixed draw order; every value is consumed whether or not its stage is
  // enabled, so toggling one flag never reshuffles the others.
  SplitMix64 rng(mix_seed(spec.seed, index));
  const bool want_fh = rng.next_bool();
  const bool want_fv = rng.next_bool();
  const double scale_u = rng.next_unit();
  JitterDraw draw;
  draw.brightness = rng.next_symmetric();
  draw.contrast = rng.next_symmetric();
  draw.saturation = rng.next_symmetric();
  draw.hue = rng.next_symmetric();

  RgbImage img = image;
  std::optional<BinaryMask> m = mask;
  if (spec.flip_horizontal && want_fh) {
    img = flip_h(img);
    if (m) m = flip_h(*m);
  }
  if (spec.flip_vertical && want_fv) {
    img = flip_v(img);
    if (m) m = flip_v(*m);
  }
  const double factor =
      spec.scale_low + scale_u * (spec.scale_high - spec.scale_low);
  if (factor != 1.0) {
    img = scale(img, factor);
    if (m) m = scale(*m, factor);
  }
  if (spec.color_jitter_enabled) img = color_jitter(img, spec, draw);
  return AugmentResult{std::move(img), std::move(m)};
}

SamplePlan balance_plan(const std::map<std::string, std::string>& labels,
                        std::size_t target_per_class, std::uint64_t seed) {
  if (labels.empty())
    throw std::invalid_argument("balance_plan needs at least one image");

  // std::map keeps classes and per-class ids in sorted order, so the plan is
  // a pure function of (labels, target, seed).
  std::map<std::string, std::vector<std::string>> by_class;
  for (const auto& [id, cls] : labels) by_class[cls].push_back(id);

  SamplePlan plan;
  plan.entries.reserve(by_class.size() * target_per_class);
  SplitMix64 rng(mix_seed(seed, 0x5eedu));
  std::uint64_t next_index = 0;
  for (auto& [cls, ids] : by_class) {
    shuffle(ids, rng);
    for (std::size_t k = 0; k < target_per_class; ++k)
      plan.entries.push_back(
          PlanEntry{ids[k % ids.size()], cls, next_index++});
  }
  return plan;
}

}  // namespace derm
