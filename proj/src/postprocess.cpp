#include "derm/postprocess.hpp"

#include <stdexcept>

#include "derm/components.hpp"
#include "derm/watershed.hpp"

namespace derm {

BinaryMask binarize(const ProbMap& prob, double threshold) {
  if (prob.channels() != 1)
    throw std::invalid_argument("binarize expects a 1-channel map, got " +
                                std::to_string(prob.channels()));
  std::vector<std::uint8_t> bits(prob.pixel_count());
  for (std::size_t i = 0; i < bits.size(); ++i)
    bits[i] = prob.value(i) >= threshold ? 1 : 0;
  return BinaryMask(prob.width(), prob.height(), std::move(bits));
}

PostprocessTrace postprocess_chain_traced(const RgbImage& image,
                                          const ProbMap& prob,
                                          const PostprocessOptions& options) {
  ProbMap refined =
      options.use_crf
          ? (options.exact_crf
                 ? crf_refine_dense(image, prob, options.crf)
                 : crf_refine(image, prob, options.crf, options.jobs))
          : prob;

  std::optional<LabelMap> markers;
  std::optional<LabelMap> basins;
  bool fallback = true;
  BinaryMask lesion(prob.width(), prob.height());

  if (options.use_watershed) {
    markers = derive_markers(refined, options.marker_fg_threshold,
                             options.marker_bg_threshold);
    bool has_lesion_seed = false;
    for (std::size_t i = 0; i < markers->pixel_count(); ++i)
      if (markers->value(i) == kLesionMarker) {
        has_lesion_seed = true;
        break;
      }
    if (has_lesion_seed) {
      // Flood the inverted lesion probability: confident lesion pixels are
      // the deepest basins.
      std::vector<float> inverted(refined.pixel_count());
      for (std::size_t i = 0; i < inverted.size(); ++i)
        inverted[i] = 1.0f - refined.value(i);
      ProbMap elevation(refined.width(), refined.height(), 1,
                        std::move(inverted));
      basins = watershed(elevation, *markers);
      std::vector<std::uint8_t> bits(basins->pixel_count());
      for (std::size_t i = 0; i < bits.size(); ++i)
        bits[i] = basins->value(i) == kLesionMarker ? 1 : 0;
      lesion = BinaryMask(refined.width(), refined.height(), std::move(bits));
      fallback = false;
    }
  }
  if (fallback) lesion = binarize(refined, options.binarize_threshold);

  PostprocessTrace trace{std::move(refined), std::move(markers),
                         std::move(basins), fallback,
                         largest_component(lesion, options.connectivity)};
  return trace;
}

BinaryMask postprocess_chain(const RgbImage& image, const ProbMap& prob,
                             const CrfParams& params) {
  PostprocessOptions options;
  options.crf = params;
  return postprocess_chain_traced(image, prob, options).mask;
}

}  // namespace derm
