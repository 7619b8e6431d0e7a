#include "derm/watershed.hpp"

#include <cstdint>
#include <queue>
#include <stdexcept>
#include <vector>

namespace derm {

LabelMap derive_markers(const ProbMap& prob, double fg_threshold,
                        double bg_threshold) {
  if (prob.channels() != 1)
    throw std::invalid_argument("marker derivation expects a 1-channel map");
  if (!(fg_threshold > bg_threshold))
    throw std::invalid_argument("fg_threshold must be > bg_threshold");
  std::vector<std::int32_t> labels(prob.pixel_count(), 0);
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const float v = prob.value(i);
    if (v >= fg_threshold)
      labels[i] = kLesionMarker;
    else if (v <= bg_threshold)
      labels[i] = kBackgroundMarker;
  }
  return LabelMap(prob.width(), prob.height(), std::move(labels));
}

namespace {

struct QueueItem {
  float elevation;
  std::uint64_t seq;
  std::int32_t index;
  std::int32_t label;
};

struct LaterInQueue {
  bool operator()(const QueueItem& a, const QueueItem& b) const {
    if (a.elevation != b.elevation) return a.elevation > b.elevation;
    return a.seq > b.seq;
  }
};

}  // namespace

LabelMap watershed(const ProbMap& elevation, const LabelMap& markers) {
  if (elevation.channels() != 1)
    throw std::invalid_argument("watershed expects a 1-channel elevation map");
  if (elevation.width() != markers.width() ||
      elevation.height() != markers.height())
    throw std::invalid_argument("elevation and marker dimensions differ");

  const int w = elevation.width(), h = elevation.height();
  std::vector<std::int32_t> out(elevation.pixel_count(), 0);
  std::priority_queue<QueueItem, std::vector<QueueItem>, LaterInQueue> queue;
  std::uint64_t seq = 0;

  bool any_marker = false;
  for (std::size_t i = 0; i < markers.pixel_count(); ++i) {
    const std::int32_t m = markers.value(i);
    if (m == 0) continue;
    any_marker = true;
    out[i] = m;
    queue.push(QueueItem{elevation.value(i), seq++,
                         static_cast<std::int32_t>(i), m});
  }
  if (!any_marker) throw std::invalid_argument("watershed needs at least one marker");

  static constexpr int dx[4] = {0, -1, 1, 0};
  static constexpr int dy[4] = {-1, 0, 0, 1};
  while (!queue.empty()) {
    const QueueItem item = queue.top();
    queue.pop();
    const int x = item.index % w;
    const int y = item.index / w;
    for (int k = 0; k < 4; ++k) {
      const int nx = x + dx[k], ny = y + dy[k];
      if (nx < 0 || nx >= w || ny < 0 || ny >= h) continue;
      const std::size_t j = static_cast<std::size_t>(ny) * w + nx;
      if (out[j] != 0) continue;
      out[j] = item.label;
      queue.push(QueueItem{elevation.value(j), seq++,
                           static_cast<std::int32_t>(j), item.label});
    }
  }
  return LabelMap(w, h, std::move(out));
}

}  // namespace derm
