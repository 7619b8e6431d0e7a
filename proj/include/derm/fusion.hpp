#pragma once

#include "derm/csv.hpp"
#include "derm/image.hpp"

namespace derm {

/// Per-level classifier outputs of the three-level disease hierarchy:
/// level 1 separates NV from everything else, level 2 MEL/BKL from the rest,
/// level 3 the four remaining diseases. Each level sums to 1 within 1e-6.
struct HierarchyOutputs {
  double nv, other1;                      // level 1
  double mel, bkl, other2;                // level 2
  double bcc, akiec, df, vasc;            // level 3

  void validate() const;
};

/// Chained conditional product: deeper levels are read as distributions
/// conditioned on "other" at the levels above, which makes the fused vector
/// telescope to sum 1.
ClassDistribution hierarchy_fuse(const HierarchyOutputs& h);

/// Hard routing: argmax at each level, one-hot result. Level ties go to the
/// first column of that level's table.
ClassDistribution hierarchy_fuse_hard(const HierarchyOutputs& h);

/// Zeroes all attribute channels outside the lesion mask.
ProbMap refine_attributes(const ProbMap& attr, const BinaryMask& lesion);

std::vector<std::string> level1_columns();  // NV,OTHER
std::vector<std::string> level2_columns();  // MEL,BKL,OTHER
std::vector<std::string> level3_columns();  // BCC,AKIEC,DF,VASC

/// Fuses three per-level tables into one canonical classification table.
/// The three id sets must be identical; output rows are in level-1 id order.
ProbTable fuse_tables(const ProbTable& level1, const ProbTable& level2,
                      const ProbTable& level3, bool hard_routing = false);

}  // namespace derm
