#pragma once

#include <array>
#include <cstdint>
#include <cstddef>
#include <string>
#include <vector>

namespace derm {

// Canonical 7-class order used everywhere (CSV columns, confusion matrices,
// fused distributions).
inline constexpr int kNumClasses = 7;
inline constexpr std::array<const char*, kNumClasses> kClassNames = {
    "MEL", "NV", "BCC", "AKIEC", "BKL", "DF", "VASC"};

// Attribute channel order for 5-channel probability maps.
inline constexpr int kNumAttributes = 5;
inline constexpr std::array<const char*, kNumAttributes> kAttributeNames = {
    "pigment_network", "negative_network", "streaks", "milia_like_cyst",
    "globules"};

int class_index(const std::string& name);  // throws on unknown name

/// 8-bit interleaved sRGB raster, row-major, channel order R,G,B.
class RgbImage {
 public:
  RgbImage(int width, int height);  // zero-filled
  RgbImage(int width, int height, std::vector<std::uint8_t> data);

  int width() const { return width_; }
  int height() const { return height_; }
  std::size_t pixel_count() const {
    return static_cast<std::size_t>(width_) * height_;
  }

  std::uint8_t at(int x, int y, int c) const {
    return data_[(static_cast<std::size_t>(y) * width_ + x) * 3 + c];
  }
  void set(int x, int y, int c, std::uint8_t v) {
    data_[(static_cast<std::size_t>(y) * width_ + x) * 3 + c] = v;
  }

  const std::vector<std::uint8_t>& data() const { return data_; }

 private:
  int width_;
  int height_;
  std::vector<std::uint8_t> data_;
};

/// Per-pixel {0,1} mask, row-major. Values other than 0/1 are rejected at
/// construction.
class BinaryMask {
 public:
  BinaryMask(int width, int height);  // all zero
  BinaryMask(int width, int height, std::vector<std::uint8_t> data);

  int width() const { return width_; }
  int height() const { return height_; }
  std::size_t pixel_count() const {
    return static_cast<std::size_t>(width_) * height_;
  }

  std::uint8_t at(int x, int y) const {
    return data_[static_cast<std::size_t>(y) * width_ + x];
  }
  std::uint8_t value(std::size_t i) const { return data_[i]; }
  void set(int x, int y, bool v) {
    data_[static_cast<std::size_t>(y) * width_ + x] = v ? 1 : 0;
  }

  const std::vector<std::uint8_t>& data() const { return data_; }

  bool operator==(const BinaryMask& other) const = default;

 private:
  int width_;
  int height_;
  std::vector<std::uint8_t> data_;
};

/// Channel-interleaved float map with every value in [0,1]. One channel for
/// the lesion task, five for the attribute task.
class ProbMap {
 public:
  ProbMap(int width, int height, int channels);  // zero-filled
  ProbMap(int width, int height, int channels, std::vector<float> data);

  int width() const { return width_; }
  int height() const { return height_; }
  int channels() const { return channels_; }
  std::size_t pixel_count() const {
    return static_cast<std::size_t>(width_) * height_;
  }

  float at(int x, int y, int c = 0) const {
    return data_[(static_cast<std::size_t>(y) * width_ + x) * channels_ + c];
  }
  float value(std::size_t i) const { return data_[i]; }
  void set(int x, int y, int c, float v);  // range-checked

  const std::vector<float>& data() const { return data_; }

 private:
  int width_;
  int height_;
  int channels_;
  std::vector<float> data_;
};

/// Per-pixel non-negative integer labels; 0 is background/unassigned.
class LabelMap {
 public:
  LabelMap(int width, int height);  // all zero
  LabelMap(int width, int height, std::vector<std::int32_t> labels);

  int width() const { return width_; }
  int height() const { return height_; }
  std::size_t pixel_count() const {
    return static_cast<std::size_t>(width_) * height_;
  }

  std::int32_t at(int x, int y) const {
    return labels_[static_cast<std::size_t>(y) * width_ + x];
  }
  std::int32_t value(std::size_t i) const { return labels_[i]; }
  void set(int x, int y, std::int32_t v);  // rejects negatives

  std::int32_t max_label() const { return max_label_; }
  const std::vector<std::int32_t>& labels() const { return labels_; }

  bool operator==(const LabelMap& other) const {
    return width_ == other.width_ && height_ == other.height_ &&
           labels_ == other.labels_;
  }

 private:
  int width_;
  int height_;
  std::vector<std::int32_t> labels_;
  std::int32_t max_label_ = 0;
};

/// 7-way disease probability vector in canonical class order; must sum to 1
/// within 1e-6.
class ClassDistribution {
 public:
  explicit ClassDistribution(std::array<double, kNumClasses> probs);

  double at(int i) const { return probs_[i]; }
  const std::array<double, kNumClasses>& probs() const { return probs_; }
  int argmax() const;  // ties broken by lowest canonical index

 private:
  std::array<double, kNumClasses> probs_;
};

/// counts[i][j] = samples with true class i predicted as class j.
class ConfusionMatrix {
 public:
  ConfusionMatrix() : counts_{} {}

  void add(int true_class, int predicted_class, std::uint64_t n = 1);
  std::uint64_t at(int true_class, int predicted_class) const {
    return counts_[true_class][predicted_class];
  }
  std::uint64_t row_sum(int true_class) const;
  std::uint64_t total() const;

 private:
  std::array<std::array<std::uint64_t, kNumClasses>, kNumClasses> counts_;
};

}  // namespace derm
