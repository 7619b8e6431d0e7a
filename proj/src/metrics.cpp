#include "derm/metrics.hpp"

#include <cmath>
#include <stdexcept>
#include <string>
#include <unordered_map>

namespace derm {

namespace {

void check_same_dims(int wa, int ha, int wb, int hb, const char* what) {
  if (wa != wb || ha != hb)
    throw std::invalid_argument(std::string(what) + " dimensions differ: " +
                                std::to_string(wa) + "x" + std::to_string(ha) +
                                " vs " + std::to_string(wb) + "x" +
                                std::to_string(hb));
}

}  // namespace

double jaccard(const BinaryMask& pred, const BinaryMask& gt) {
  check_same_dims(pred.width(), pred.height(), gt.width(), gt.height(),
                  "mask");
  std::size_t inter = 0, uni = 0;
  const auto& a = pred.data();
  const auto& b = gt.data();
  for (std::size_t i = 0; i < a.size(); ++i) {
    inter += a[i] & b[i];
    uni += a[i] | b[i];
  }
  if (uni == 0) return 1.0;
  return static_cast<double>(inter) / static_cast<double>(uni);
}

double thresholded_jaccard(double j, double threshold) {
  if (!(j >= 0.0 && j <= 1.0))
    throw std::invalid_argument("Jaccard value outside [0,1]: " +
                                std::to_string(j));
  return j >= threshold ? j : 0.0;
}

SegScore score_pair(const BinaryMask& pred, const BinaryMask& gt,
                    double threshold) {
  const double j = jaccard(pred, gt);
  return SegScore{j, thresholded_jaccard(j, threshold)};
}

double compensated_mean(std::span<const double> values) {
  if (values.empty())
    throw std::invalid_argument("mean of an empty sequence");
  double sum = 0.0, comp = 0.0;
  for (double v : values) {
    const double y = v - comp;
    const double t = sum + y;
    comp = (t - sum) - y;
    sum = t;
  }
  return sum / static_cast<double>(values.size());
}

double dataset_seg_score(
    const std::vector<std::pair<BinaryMask, BinaryMask>>& pairs,
    double threshold) {
  if (pairs.empty())
    throw std::invalid_argument("dataset_seg_score over an empty sequence");
  std::vector<double> scores;
  scores.reserve(pairs.size());
  for (const auto& [pred, gt] : pairs)
    scores.push_back(score_pair(pred, gt, threshold).thresholded);
  return compensated_mean(scores);
}

AttributeScores attribute_scores(const ProbMap& pred, const ProbMap& gt,
                                 double bin_threshold) {
  check_same_dims(pred.width(), pred.height(), gt.width(), gt.height(),
                  "attribute map");
  if (pred.channels() != kNumAttributes || gt.channels() != kNumAttributes)
    throw std::invalid_argument(
        "attribute maps must have " + std::to_string(kNumAttributes) +
        " channels, got " + std::to_string(pred.channels()) + " and " +
        std::to_string(gt.channels()));

  const int w = pred.width(), h = pred.height();
  AttributeScores out{};
  for (int c = 0; c < kNumAttributes; ++c) {
    std::size_t inter = 0, uni = 0;
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        const float g = gt.at(x, y, c);
        if (g != 0.0f && g != 1.0f)
          throw std::invalid_argument(
              "ground-truth attribute map is not binary-valued at channel " +
              std::to_string(c));
        const bool p = pred.at(x, y, c) >= bin_threshold;
        const bool t = g != 0.0f;
        inter += (p && t) ? 1 : 0;
        uni += (p || t) ? 1 : 0;
      }
    }
    out.per_channel[c] =
        uni == 0 ? 1.0 : static_cast<double>(inter) / static_cast<double>(uni);
  }
  out.mean = compensated_mean(out.per_channel);
  return out;
}

double balanced_accuracy(const ConfusionMatrix& cm) {
  std::vector<double> recalls;
  for (int i = 0; i < kNumClasses; ++i) {
    const std::uint64_t row = cm.row_sum(i);
    if (row == 0) continue;  // class absent from ground truth
    recalls.push_back(static_cast<double>(cm.at(i, i)) /
                      static_cast<double>(row));
  }
  if (recalls.empty())
    throw std::invalid_argument(
        "balanced_accuracy of an all-zero confusion matrix");
  return compensated_mean(recalls);
}

int argmax_class(std::span<const double, kNumClasses> probs) {
  int best = 0;
  for (int i = 1; i < kNumClasses; ++i)
    if (probs[i] > probs[best]) best = i;
  return best;
}

ConfusionMatrix confusion_from_tables(const ProbTable& pred,
                                      const ProbTable& gt) {
  if (pred.columns != class_columns() || gt.columns != class_columns())
    throw std::invalid_argument(
        "confusion tables must use the canonical class columns");
  std::unordered_map<std::string, std::size_t> gt_index;
  for (std::size_t i = 0; i < gt.ids.size(); ++i) gt_index[gt.ids[i]] = i;

  for (const auto& id : gt.ids)
    if (pred.find(id) == ProbTable::npos)
      throw std::runtime_error("image id '" + id +
                               "' present only in the ground-truth table");

  ConfusionMatrix cm;
  bool any = false;
  for (std::size_t i = 0; i < pred.ids.size(); ++i) {
    const auto it = gt_index.find(pred.ids[i]);
    if (it == gt_index.end())
      throw std::runtime_error("image id '" + pred.ids[i] +
                               "' present only in the prediction table");
    const auto& gt_row = gt.rows[it->second];
    int true_class = -1;
    int ones = 0;
    bool clean = true;
    for (int c = 0; c < kNumClasses; ++c) {
      if (gt_row[c] == 1.0) {
        ++ones;
        true_class = c;
      } else if (gt_row[c] != 0.0) {
        clean = false;
      }
    }
    if (ones != 1 || !clean)
      throw std::runtime_error("ground-truth row for '" + pred.ids[i] +
                               "' is not one-hot");
    std::array<double, kNumClasses> row;
    for (int c = 0; c < kNumClasses; ++c) row[c] = pred.rows[i][c];
    cm.add(true_class, argmax_class(row));
    any = true;
  }
  if (!any)
    throw std::runtime_error("no image ids shared between tables");
  return cm;
}

}  // namespace derm
