#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "derm/csv.hpp"
#include "derm/image.hpp"

namespace derm {

inline constexpr double kJaccardThreshold = 0.65;

/// Jaccard index |A∩B| / |A∪B| over 1-pixels. Both masks empty -> 1.0
/// (correctly predicting absence counts as a perfect match).
double jaccard(const BinaryMask& pred, const BinaryMask& gt);

/// Challenge rule: scores strictly below the threshold count as 0. The
/// boundary itself survives.
double thresholded_jaccard(double j, double threshold = kJaccardThreshold);

struct SegScore {
  double raw_jaccard;
  double thresholded;
};

SegScore score_pair(const BinaryMask& pred, const BinaryMask& gt,
                    double threshold = kJaccardThreshold);

/// Mean with compensated (Kahan) summation so reduction order does not leak
/// into dataset-level numbers.
double compensated_mean(std::span<const double> values);

/// Arithmetic mean of thresholded Jaccards over the dataset.
double dataset_seg_score(
    const std::vector<std::pair<BinaryMask, BinaryMask>>& pairs,
    double threshold = kJaccardThreshold);

struct AttributeScores {
  std::array<double, kNumAttributes> per_channel;
  double mean;
};

/// Binarizes each predicted channel at bin_threshold (inclusive) and scores
/// it against the matching ground-truth channel with `jaccard`. The
/// ground-truth map must be binary-valued.
AttributeScores attribute_scores(const ProbMap& pred, const ProbMap& gt,
                                 double bin_threshold = 0.5);

/// Mean of per-class recalls over classes present in the ground truth.
double balanced_accuracy(const ConfusionMatrix& cm);

/// Argmax over a 7-class probability row; ties broken by lowest canonical
/// class index.
int argmax_class(std::span<const double, kNumClasses> probs);

/// Builds a confusion matrix from prediction and ground-truth tables in the
/// canonical class layout. Ground-truth rows must be one-hot; the id sets
/// must match exactly.
ConfusionMatrix confusion_from_tables(const ProbTable& pred,
                                      const ProbTable& gt);

}  // namespace derm
