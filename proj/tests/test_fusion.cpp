#include <doctest.h>

#include <random>
#include <sstream>

#include "derm/fusion.hpp"
#include "fixtures.hpp"

using namespace derm;

namespace {

HierarchyOutputs uniform_levels() {
  return HierarchyOutputs{0.5,       0.5,       1.0 / 3.0, 1.0 / 3.0,
                          1.0 / 3.0, 0.25,      0.25,      0.25,
                          0.25};
}

// random distribution over n cells
std::vector<double> random_simplex(std::mt19937& rng, int n) {
  std::uniform_real_distribution<double> unit(0.01, 1.0);
  std::vector<double> v(n);
  double sum = 0.0;
  for (auto& x : v) {
    x = unit(rng);
    sum += x;
  }
  for (auto& x : v) x /= sum;
  // push residual into the last cell so the sum is exact
  double partial = 0.0;
  for (int i = 0; i + 1 < n; ++i) partial += v[i];
  v[n - 1] = 1.0 - partial;
  return v;
}

HierarchyOutputs random_levels(std::mt19937& rng) {
  const auto l1 = random_simplex(rng, 2);
  const auto l2 = random_simplex(rng, 3);
  const auto l3 = random_simplex(rng, 4);
  return HierarchyOutputs{l1[0], l1[1], l2[0], l2[1], l2[2],
                          l3[0], l3[1], l3[2], l3[3]};
}

}  // namespace

TEST_CASE("refine_attributes masks attribute channels") {
  std::mt19937 rng(61);
  const ProbMap attr = fixtures::random_probmap(rng, 6, 4, 5);

  BinaryMask all_one(6, 4);
  for (int y = 0; y < 4; ++y)
    for (int x = 0; x < 6; ++x) all_one.set(x, y, true);
  CHECK(refine_attributes(attr, all_one).data() == attr.data());

  const BinaryMask all_zero(6, 4);
  const ProbMap zeroed = refine_attributes(attr, all_zero);
  for (float v : zeroed.data()) CHECK(v == 0.0f);

  // checkerboard: values survive exactly on lesion pixels
  BinaryMask checker(6, 4);
  for (int y = 0; y < 4; ++y)
    for (int x = 0; x < 6; ++x) checker.set(x, y, (x + y) % 2 == 0);
  const ProbMap masked = refine_attributes(attr, checker);
  for (int y = 0; y < 4; ++y)
    for (int x = 0; x < 6; ++x)
      for (int c = 0; c < 5; ++c) {
        if (checker.at(x, y))
          CHECK(masked.at(x, y, c) == attr.at(x, y, c));
        else
          CHECK(masked.at(x, y, c) == 0.0f);
      }

  // idempotent, never increases
  const ProbMap twice = refine_attributes(masked, checker);
  CHECK(twice.data() == masked.data());
  for (std::size_t i = 0; i < attr.data().size(); ++i)
    CHECK(masked.data()[i] <= attr.data()[i]);

  CHECK_THROWS_AS(refine_attributes(attr, BinaryMask(5, 4)),
                  std::invalid_argument);
}

TEST_CASE("hierarchy_fuse absorbing and certain cases") {
  // level1 one-hot NV wins regardless of deeper levels
  HierarchyOutputs top{1.0, 0.0, 0.2, 0.3, 0.5, 0.25, 0.25, 0.25, 0.25};
  const ClassDistribution nv = hierarchy_fuse(top);
  CHECK(nv.at(1) == 1.0);
  for (int i : {0, 2, 3, 4, 5, 6}) CHECK(nv.at(i) == 0.0);

  // chained certainty down to DF
  HierarchyOutputs df{0.0, 1.0, 0.0, 0.0, 1.0, 0.0, 0.0, 1.0, 0.0};
  const ClassDistribution d = hierarchy_fuse(df);
  CHECK(d.at(5) == 1.0);
  for (int i : {0, 1, 2, 3, 4, 6}) CHECK(d.at(i) == 0.0);
}

TEST_CASE("hierarchy_fuse of uniform levels gives the derived values") {
  const ClassDistribution dist = hierarchy_fuse(uniform_levels());
  CHECK(dist.at(0) == 1.0 / 6.0);    // MEL
  CHECK(dist.at(1) == 0.5);          // NV
  CHECK(dist.at(2) == 1.0 / 24.0);   // BCC
  CHECK(dist.at(3) == 1.0 / 24.0);   // AKIEC
  CHECK(dist.at(4) == 1.0 / 6.0);    // BKL
  CHECK(dist.at(5) == 1.0 / 24.0);   // DF
  CHECK(dist.at(6) == 1.0 / 24.0);   // VASC
}

TEST_CASE("hierarchy_fuse sums to one on random valid levels") {
  std::mt19937 rng(62);
  for (int trial = 0; trial < 2000; ++trial) {
    const ClassDistribution dist = hierarchy_fuse(random_levels(rng));
    double sum = 0.0;
    for (int i = 0; i < kNumClasses; ++i) sum += dist.at(i);
    CHECK(std::abs(sum - 1.0) <= 1e-9);
  }
}

TEST_CASE("hierarchy_fuse is monotone in level1.NV") {
  std::mt19937 rng(63);
  for (int trial = 0; trial < 200; ++trial) {
    HierarchyOutputs h = random_levels(rng);
    double prev = -1.0;
    for (double nv = 0.0; nv <= 1.0; nv += 0.125) {
      h.nv = nv;
      h.other1 = 1.0 - nv;
      const double p_nv = hierarchy_fuse(h).at(1);
      CHECK(p_nv >= prev);
      prev = p_nv;
    }
  }
}

TEST_CASE("hierarchy_fuse validates level sums") {
  HierarchyOutputs bad{0.5, 0.6, 1.0 / 3, 1.0 / 3, 1.0 / 3, 0.25, 0.25,
                       0.25, 0.25};
  CHECK_THROWS_AS(hierarchy_fuse(bad), std::invalid_argument);
}

TEST_CASE("hard routing follows per-level argmax") {
  // NV wins level 1 on ties
  HierarchyOutputs tie{0.5, 0.5, 1, 0, 0, 1, 0, 0, 0};
  CHECK(hierarchy_fuse_hard(tie).at(1) == 1.0);

  HierarchyOutputs mel{0.2, 0.8, 0.5, 0.2, 0.3, 1, 0, 0, 0};
  CHECK(hierarchy_fuse_hard(mel).at(0) == 1.0);

  HierarchyOutputs vasc{0.2, 0.8, 0.1, 0.2, 0.7, 0.1, 0.2, 0.3, 0.4};
  CHECK(hierarchy_fuse_hard(vasc).at(6) == 1.0);
}

TEST_CASE("fuse_tables merges level CSVs") {
  auto make = [](const std::string& header_cols, const std::string& body,
                 const std::vector<std::string>& cols) {
    std::istringstream in("image," + header_cols + "\n" + body);
    return read_prob_table(in, cols, "test");
  };
  const auto l1 = make("NV,OTHER", "a,0.5,0.5\n", level1_columns());
  const auto l2 = make("MEL,BKL,OTHER",
                       "a,0.333333333333,0.333333333333,0.333333333334\n",
                       level2_columns());
  const auto l3 =
      make("BCC,AKIEC,DF,VASC", "a,0.25,0.25,0.25,0.25\n", level3_columns());

  const ProbTable fused = fuse_tables(l1, l2, l3);
  REQUIRE(fused.size() == 1);
  CHECK(fused.columns == class_columns());
  CHECK(fused.rows[0][0] == doctest::Approx(1.0 / 6).epsilon(1e-9));
  CHECK(fused.rows[0][1] == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(fused.rows[0][2] == doctest::Approx(1.0 / 24).epsilon(1e-9));

  // outputs re-validate as class distributions
  for (const auto& row : fused.rows) {
    std::array<double, kNumClasses> arr;
    std::copy(row.begin(), row.end(), arr.begin());
    CHECK_NOTHROW(ClassDistribution{arr});
  }

  // disjoint ids
  const auto l1b = make("NV,OTHER", "b,0.5,0.5\n", level1_columns());
  CHECK_THROWS_AS(fuse_tables(l1b, l2, l3), std::runtime_error);
}
