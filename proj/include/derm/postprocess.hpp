#pragma once

#include <optional>

#include "derm/crf.hpp"
#include "derm/image.hpp"

namespace derm {

/// value >= threshold -> 1.
BinaryMask binarize(const ProbMap& prob, double threshold = 0.5);

struct PostprocessOptions {
  CrfParams crf;
  bool use_crf = true;
  bool use_watershed = true;
  bool exact_crf = false;  // dense O(N^2) inference
  double marker_fg_threshold = 0.8;
  double marker_bg_threshold = 0.2;
  double binarize_threshold = 0.5;
  int connectivity = 8;
  int jobs = 0;
};

/// Intermediate products of the refinement chain, for stage-by-stage dumps.
struct PostprocessTrace {
  ProbMap refined;
  std::optional<LabelMap> markers;
  std::optional<LabelMap> basins;
  bool fallback_used = false;
  BinaryMask mask;
};

/// Full refinement chain: CRF, lesion/background markers, watershed over
/// 1 - refined probability, then largest connected component. Falls back to
/// plain binarization when no lesion seeds emerge.
PostprocessTrace postprocess_chain_traced(const RgbImage& image,
                                          const ProbMap& prob,
                                          const PostprocessOptions& options);

BinaryMask postprocess_chain(const RgbImage& image, const ProbMap& prob,
                             const CrfParams& params);

}  // namespace derm
