#pragma once

#include "derm/image.hpp"

namespace derm {

/// Dense-CRF mean-field parameters for the two-label (lesion/background)
/// Potts model: a Gaussian spatial kernel plus a bilateral kernel on
/// position and color.
struct CrfParams {
  int iterations = 5;
  double w_spatial = 3.0;
  double sigma_spatial = 3.0;
  double w_bilateral = 5.0;
  double sigma_bilateral_xy = 50.0;
  double sigma_bilateral_rgb = 13.0;
  // Messages pass over a square window of radius
  // ceil(kernel_truncation_radius_sigmas * sigma_spatial). Raising it widens
  // the window up to the whole image.
  double kernel_truncation_radius_sigmas = 3.0;

  void validate() const;
  int truncation_radius() const;
};

/// Mean-field refinement of the lesion probability map. Unaries are the
/// negative log of the (epsilon-clamped) input probabilities; each iteration
/// is a Jacobi update, so results do not depend on traversal or thread
/// schedule. iterations == 0 returns the input untouched.
ProbMap crf_refine(const RgbImage& image, const ProbMap& prob,
                   const CrfParams& params, int jobs = 0);

/// Same inference with the pairwise sums taken over every pixel pair,
/// O(N^2). Only sensible for small images; backs the --exact CLI flag.
ProbMap crf_refine_dense(const RgbImage& image, const ProbMap& prob,
                         const CrfParams& params);

}  // namespace derm
