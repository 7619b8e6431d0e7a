#include "derm/fusion.hpp"

#include <cmath>
#include <stdexcept>
#include <unordered_map>

namespace derm {

namespace {

void check_level(std::initializer_list<double> values, const char* level) {
  double sum = 0.0;
  for (double v : values) {
    if (!(v >= 0.0 && v <= 1.0))
      throw std::invalid_argument(std::string(level) +
                                  " probability outside [0,1]: " +
                                  std::to_string(v));
    sum += v;
  }
  if (std::abs(sum - 1.0) > 1e-6)
    throw std::invalid_argument(std::string(level) + " sums to " +
                                std::to_string(sum) + ", expected 1 +- 1e-6");
}

}  // namespace

void HierarchyOutputs::validate() const {
  check_level({nv, other1}, "level 1");
  check_level({mel, bkl, other2}, "level 2");
  check_level({bcc, akiec, df, vasc}, "level 3");
}

ClassDistribution hierarchy_fuse(const HierarchyOutputs& h) {
  h.validate();
  // Canonical order: MEL, NV, BCC, AKIEC, BKL, DF, VASC.
  const double deep = h.other1 * h.other2;
  std::array<double, kNumClasses> p = {
      h.other1 * h.mel, h.nv,           deep * h.bcc, deep * h.akiec,
      h.other1 * h.bkl, deep * h.df,    deep * h.vasc};
  // The product can land a hair outside the distribution tolerance after
  // three levels of 1e-6 slack; renormalize the residual.
  double sum = 0.0;
  for (double v : p) sum += v;
  if (sum > 0.0 && std::abs(sum - 1.0) > 1e-12)
    for (double& v : p) v /= sum;
  return ClassDistribution(p);
}

ClassDistribution hierarchy_fuse_hard(const HierarchyOutputs& h) {
  h.validate();
  std::array<double, kNumClasses> p{};
  if (h.nv >= h.other1) {
    p[1] = 1.0;  // NV
  } else if (h.mel >= h.bkl && h.mel >= h.other2) {
    p[0] = 1.0;  // MEL
  } else if (h.bkl >= h.other2) {
    p[4] = 1.0;  // BKL
  } else {
    const double m = std::max({h.bcc, h.akiec, h.df, h.vasc});
    if (h.bcc == m) p[2] = 1.0;
    else if (h.akiec == m) p[3] = 1.0;
    else if (h.df == m) p[5] = 1.0;
    else p[6] = 1.0;
  }
  return ClassDistribution(p);
}

ProbMap refine_attributes(const ProbMap& attr, const BinaryMask& lesion) {
  if (attr.width() != lesion.width() || attr.height() != lesion.height())
    throw std::invalid_argument(
        "attribute map and lesion mask dimensions differ");
  const int ch = attr.channels();
  std::vector<float> out(attr.data());
  for (std::size_t i = 0; i < attr.pixel_count(); ++i)
    if (lesion.value(i) == 0)
      for (int c = 0; c < ch; ++c) out[i * ch + c] = 0.0f;
  return ProbMap(attr.width(), attr.height(), ch, std::move(out));
}

std::vector<std::string> level1_columns() { return {"NV", "OTHER"}; }
std::vector<std::string> level2_columns() { return {"MEL", "BKL", "OTHER"}; }
std::vector<std::string> level3_columns() {
  return {"BCC", "AKIEC", "DF", "VASC"};
}

ProbTable fuse_tables(const ProbTable& level1, const ProbTable& level2,
                      const ProbTable& level3, bool hard_routing) {
  if (level1.columns != level1_columns() ||
      level2.columns != level2_columns() ||
      level3.columns != level3_columns())
    throw std::invalid_argument("level tables have unexpected columns");
  if (level1.ids.empty())
    throw std::runtime_error("level tables are empty");

  std::unordered_map<std::string, std::size_t> idx2, idx3;
  for (std::size_t i = 0; i < level2.ids.size(); ++i) idx2[level2.ids[i]] = i;
  for (std::size_t i = 0; i < level3.ids.size(); ++i) idx3[level3.ids[i]] = i;
  if (level2.size() != level1.size() || level3.size() != level1.size())
    throw std::runtime_error("level tables have different id sets");

  ProbTable out;
  out.columns = class_columns();
  for (std::size_t i = 0; i < level1.ids.size(); ++i) {
    const auto& id = level1.ids[i];
    const auto it2 = idx2.find(id);
    const auto it3 = idx3.find(id);
    if (it2 == idx2.end() || it3 == idx3.end())
      throw std::runtime_error("image id '" + id +
                               "' missing from a level table");
    const auto& r1 = level1.rows[i];
    const auto& r2 = level2.rows[it2->second];
    const auto& r3 = level3.rows[it3->second];
    HierarchyOutputs h{r1[0], r1[1], r2[0], r2[1], r2[2],
                       r3[0], r3[1], r3[2], r3[3]};
    ClassDistribution dist =
        hard_routing ? hierarchy_fuse_hard(h) : hierarchy_fuse(h);
    out.ids.push_back(id);
    out.rows.emplace_back(dist.probs().begin(), dist.probs().end());
  }
  return out;
}

}  // namespace derm
