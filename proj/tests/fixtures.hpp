#pragma once

#include <unistd.h>

#include <atomic>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "derm/image.hpp"

namespace fixtures {

// Temp directory removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static std::atomic<unsigned> counter{0};
    path_ = std::filesystem::temp_directory_path() /
            ("derm_test_" + tag + "_" + std::to_string(::getpid()) + "_" +
             std::to_string(counter.fetch_add(1)));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  const std::filesystem::path& path() const { return path_; }
  std::string file(const std::string& name) const {
    return (path_ / name).string();
  }

 private:
  std::filesystem::path path_;
};

// Rows separated by '/', e.g. "0110/0110".
inline derm::BinaryMask mask_from_string(const std::string& rows) {
  std::vector<std::vector<std::uint8_t>> grid(1);
  for (char ch : rows) {
    if (ch == '/')
      grid.emplace_back();
    else
      grid.back().push_back(ch == '1' ? 1 : 0);
  }
  const int h = int(grid.size());
  const int w = int(grid[0].size());
  std::vector<std::uint8_t> data;
  for (const auto& row : grid) data.insert(data.end(), row.begin(), row.end());
  return derm::BinaryMask(w, h, std::move(data));
}

inline derm::BinaryMask random_mask(std::mt19937& rng, int w, int h,
                                    double fill = 0.5) {
  std::bernoulli_distribution bit(fill);
  std::vector<std::uint8_t> data(std::size_t(w) * h);
  for (auto& v : data) v = bit(rng) ? 1 : 0;
  return derm::BinaryMask(w, h, std::move(data));
}

inline derm::RgbImage random_image(std::mt19937& rng, int w, int h) {
  std::uniform_int_distribution<int> byte(0, 255);
  std::vector<std::uint8_t> data(std::size_t(w) * h * 3);
  for (auto& v : data) v = std::uint8_t(byte(rng));
  return derm::RgbImage(w, h, std::move(data));
}

inline derm::RgbImage constant_image(int w, int h, std::uint8_t r,
                                     std::uint8_t g, std::uint8_t b) {
  std::vector<std::uint8_t> data(std::size_t(w) * h * 3);
  for (std::size_t i = 0; i < data.size(); i += 3) {
    data[i] = r;
    data[i + 1] = g;
    data[i + 2] = b;
  }
  return derm::RgbImage(w, h, std::move(data));
}

inline derm::ProbMap random_probmap(std::mt19937& rng, int w, int h,
                                    int channels = 1) {
  std::uniform_real_distribution<float> unit(0.0f, 1.0f);
  std::vector<float> data(std::size_t(w) * h * channels);
  for (auto& v : data) v = unit(rng);
  return derm::ProbMap(w, h, channels, std::move(data));
}

}  // namespace fixtures
