#include "derm/components.hpp"

#include <stdexcept>
#include <vector>

namespace derm {

namespace {

void check_connectivity(int connectivity) {
  if (connectivity != 4 && connectivity != 8)
    throw std::invalid_argument("connectivity must be 4 or 8, got " +
                                std::to_string(connectivity));
}

}  // namespace

LabelMap label_components(const BinaryMask& mask, int connectivity) {
  check_connectivity(connectivity);
  const int w = mask.width(), h = mask.height();
  std::vector<std::int32_t> labels(mask.pixel_count(), 0);

  static constexpr int dx8[8] = {-1, 0, 1, -1, 1, -1, 0, 1};
  static constexpr int dy8[8] = {-1, -1, -1, 0, 0, 1, 1, 1};
  static constexpr int dx4[4] = {0, -1, 1, 0};
  static constexpr int dy4[4] = {-1, 0, 0, 1};
  const int* dx = connectivity == 8 ? dx8 : dx4;
  const int* dy = connectivity == 8 ? dy8 : dy4;
  const int nn = connectivity;

  std::int32_t next_label = 0;
  std::vector<std::size_t> stack;
  for (std::size_t start = 0; start < mask.pixel_count(); ++start) {
    if (mask.value(start) == 0 || labels[start] != 0) continue;
    ++next_label;
    labels[start] = next_label;
    stack.assign(1, start);
    while (!stack.empty()) {
      const std::size_t i = stack.back();
      stack.pop_back();
      const int x = static_cast<int>(i % w);
      const int y = static_cast<int>(i / w);
      for (int k = 0; k < nn; ++k) {
        const int nx = x + dx[k], ny = y + dy[k];
        if (nx < 0 || nx >= w || ny < 0 || ny >= h) continue;
        const std::size_t j = static_cast<std::size_t>(ny) * w + nx;
        if (mask.value(j) != 0 && labels[j] == 0) {
          labels[j] = next_label;
          stack.push_back(j);
        }
      }
    }
  }
  return LabelMap(w, h, std::move(labels));
}

BinaryMask largest_component(const BinaryMask& mask, int connectivity) {
  const LabelMap labels = label_components(mask, connectivity);
  if (labels.max_label() == 0) return mask;  // no foreground

  std::vector<std::size_t> sizes(labels.max_label() + 1, 0);
  for (std::size_t i = 0; i < labels.pixel_count(); ++i)
    ++sizes[labels.value(i)];

  // Labels are numbered in row-major discovery order, so a strict comparison
  // realizes the smallest-pixel-index tie rule.
  std::int32_t best = 1;
  for (std::int32_t l = 2; l <= labels.max_label(); ++l)
    if (sizes[l] > sizes[best]) best = l;

  std::vector<std::uint8_t> out(mask.pixel_count(), 0);
  for (std::size_t i = 0; i < out.size(); ++i)
    out[i] = labels.value(i) == best ? 1 : 0;
  return BinaryMask(mask.width(), mask.height(), std::move(out));
}

}  // namespace derm
