#include "derm/image.hpp"

#include <cmath>
#include <stdexcept>

namespace derm {

namespace {

void check_dims(int width, int height) {
  if (width < 1 || height < 1)
    throw std::invalid_argument("image dimensions must be >= 1, got " +
                                std::to_string(width) + "x" +
                                std::to_string(height));
}

}  // namespace

int class_index(const std::string& name) {
  for (int i = 0; i < kNumClasses; ++i)
    if (name == kClassNames[i]) return i;
  throw std::invalid_argument("unknown class name: " + name);
}

RgbImage::RgbImage(int width, int height) : width_(width), height_(height) {
  check_dims(width, height);
  data_.assign(pixel_count() * 3, 0);
}

RgbImage::RgbImage(int width, int height, std::vector<std::uint8_t> data)
    : width_(width), height_(height), data_(std::move(data)) {
  check_dims(width, height);
  if (data_.size() != pixel_count() * 3)
    throw std::invalid_argument(
        "RgbImage data length " + std::to_string(data_.size()) +
        " != width*height*3 = " + std::to_string(pixel_count() * 3));
}

BinaryMask::BinaryMask(int width, int height)
    : width_(width), height_(height) {
  check_dims(width, height);
  data_.assign(pixel_count(), 0);
}

BinaryMask::BinaryMask(int width, int height, std::vector<std::uint8_t> data)
    : width_(width), height_(height), data_(std::move(data)) {
  check_dims(width, height);
  if (data_.size() != pixel_count())
    throw std::invalid_argument(
        "BinaryMask data length " + std::to_string(data_.size()) +
        " != width*height = " + std::to_string(pixel_count()));
  for (std::uint8_t v : data_)
    if (v > 1)
      throw std::invalid_argument("BinaryMask values must be 0 or 1, got " +
                                  std::to_string(int(v)));
}

ProbMap::ProbMap(int width, int height, int channels)
    : width_(width), height_(height), channels_(channels) {
  check_dims(width, height);
  if (channels < 1)
    throw std::invalid_argument("ProbMap channels must be >= 1, got " +
                                std::to_string(channels));
  data_.assign(pixel_count() * channels_, 0.0f);
}

ProbMap::ProbMap(int width, int height, int channels, std::vector<float> data)
    : width_(width), height_(height), channels_(channels),
      data_(std::move(data)) {
  check_dims(width, height);
  if (channels < 1)
    throw std::invalid_argument("ProbMap channels must be >= 1, got " +
                                std::to_string(channels));
  if (data_.size() != pixel_count() * channels_)
    throw std::invalid_argument(
        "ProbMap data length " + std::to_string(data_.size()) +
        " != width*height*channels = " +
        std::to_string(pixel_count() * channels_));
  for (float v : data_)
    if (!(v >= 0.0f && v <= 1.0f))
      throw std::invalid_argument("ProbMap value outside [0,1]: " +
                                  std::to_string(v));
}

void ProbMap::set(int x, int y, int c, float v) {
  if (!(v >= 0.0f && v <= 1.0f))
    throw std::invalid_argument("ProbMap value outside [0,1]: " +
                                std::to_string(v));
  data_[(static_cast<std::size_t>(y) * width_ + x) * channels_ + c] = v;
}

LabelMap::LabelMap(int width, int height) : width_(width), height_(height) {
  check_dims(width, height);
  labels_.assign(pixel_count(), 0);
}

LabelMap::LabelMap(int width, int height, std::vector<std::int32_t> labels)
    : width_(width), height_(height), labels_(std::move(labels)) {
  check_dims(width, height);
  if (labels_.size() != pixel_count())
    throw std::invalid_argument(
        "LabelMap data length " + std::to_string(labels_.size()) +
        " != width*height = " + std::to_string(pixel_count()));
  for (std::int32_t v : labels_) {
    if (v < 0)
      throw std::invalid_argument("LabelMap labels must be >= 0, got " +
                                  std::to_string(v));
    if (v > max_label_) max_label_ = v;
  }
}

void LabelMap::set(int x, int y, std::int32_t v) {
  if (v < 0)
    throw std::invalid_argument("LabelMap labels must be >= 0, got " +
                                std::to_string(v));
  labels_[static_cast<std::size_t>(y) * width_ + x] = v;
  if (v > max_label_) max_label_ = v;
}

ClassDistribution::ClassDistribution(std::array<double, kNumClasses> probs)
    : probs_(probs) {
  double sum = 0.0;
  for (int i = 0; i < kNumClasses; ++i) {
    if (!(probs_[i] >= 0.0 && probs_[i] <= 1.0))
      throw std::invalid_argument(
          std::string("class probability for ") + kClassNames[i] +
          " outside [0,1]: " + std::to_string(probs_[i]));
    sum += probs_[i];
  }
  if (std::abs(sum - 1.0) > 1e-6)
    throw std::invalid_argument("class probabilities sum to " +
                                std::to_string(sum) + ", expected 1 +- 1e-6");
}

int ClassDistribution::argmax() const {
  int best = 0;
  for (int i = 1; i < kNumClasses; ++i)
    if (probs_[i] > probs_[best]) best = i;
  return best;
}

void ConfusionMatrix::add(int true_class, int predicted_class,
                          std::uint64_t n) {
  if (true_class < 0 || true_class >= kNumClasses || predicted_class < 0 ||
      predicted_class >= kNumClasses)
    throw std::invalid_argument("confusion matrix index out of range");
  counts_[true_class][predicted_class] += n;
}

std::uint64_t ConfusionMatrix::row_sum(int true_class) const {
  std::uint64_t s = 0;
  for (int j = 0; j < kNumClasses; ++j) s += counts_[true_class][j];
  return s;
}

std::uint64_t ConfusionMatrix::total() const {
  std::uint64_t s = 0;
  for (int i = 0; i < kNumClasses; ++i) s += row_sum(i);
  return s;
}

}  // namespace derm
