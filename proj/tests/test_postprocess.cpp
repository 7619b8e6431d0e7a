#include <doctest.h>

#include <cmath>
#include <random>

#include "derm/components.hpp"
#include "derm/crf.hpp"
#include "derm/postprocess.hpp"
#include "derm/watershed.hpp"
#include "fixtures.hpp"
#include "oracles.hpp"

using namespace derm;

TEST_CASE("binarize") {
  const ProbMap ones(2, 2, 1, {1, 1, 1, 1});
  CHECK(binarize(ones).data() == std::vector<std::uint8_t>(4, 1));

  const ProbMap half(1, 1, 1, {0.5f});
  CHECK(binarize(half).at(0, 0) == 1);  // inclusive rule

  const ProbMap mixed(2, 1, 1, {0.4f, 0.6f});
  CHECK(binarize(mixed).data() == std::vector<std::uint8_t>{0, 1});

  CHECK_THROWS_AS(binarize(ProbMap(2, 2, 3)), std::invalid_argument);
}

TEST_CASE("crf_refine with zero iterations returns the input") {
  std::mt19937 rng(41);
  const ProbMap prob = fixtures::random_probmap(rng, 5, 4);
  const RgbImage img = fixtures::random_image(rng, 5, 4);
  CrfParams params;
  params.iterations = 0;
  const ProbMap out = crf_refine(img, prob, params);
  CHECK(out.data() == prob.data());
}

TEST_CASE("crf_refine with zero pairwise weights is an exact fixed point") {
  std::mt19937 rng(42);
  std::uniform_real_distribution<float> inner(0.01f, 0.99f);
  std::vector<float> values(7 * 6);
  for (auto& v : values) v = inner(rng);
  const ProbMap prob(7, 6, 1, std::move(values));
  const RgbImage img = fixtures::random_image(rng, 7, 6);
  CrfParams params;
  params.w_spatial = 0.0;
  params.w_bilateral = 0.0;
  const ProbMap out = crf_refine(img, prob, params);
  for (std::size_t i = 0; i < prob.pixel_count(); ++i)
    CHECK(std::abs(double(out.value(i)) - prob.value(i)) <= 1e-12);
}

TEST_CASE("crf_refine heals a flipped pixel inside a confident region") {
  const int n = 8;
  std::vector<float> values(n * n, 0.9f);
  values[3 * n + 4] = 0.1f;  // the hole
  const ProbMap prob(n, n, 1, std::move(values));
  const RgbImage img = fixtures::constant_image(n, n, 90, 60, 50);
  CrfParams params;
  params.w_spatial = 3.0;
  params.sigma_spatial = 3.0;
  params.w_bilateral = 0.0;
  params.iterations = 5;
  const ProbMap out = crf_refine(img, prob, params);
  CHECK(out.at(4, 3) > 0.5f);

  // and the dense oracle agrees about the instance
  const ProbMap oracle_out =
      oracle::dense_crf(img, prob, 5, 3.0, 3.0, 0.0, 50.0, 13.0);
  CHECK(oracle_out.at(4, 3) > 0.5f);
}

TEST_CASE("full-window crf_refine matches the dense oracle") {
  std::mt19937 rng(43);
  std::uniform_int_distribution<int> dim(3, 16);
  for (int trial = 0; trial < 6; ++trial) {
    const int w = dim(rng), h = dim(rng);
    const ProbMap prob = fixtures::random_probmap(rng, w, h);
    const RgbImage img = fixtures::random_image(rng, w, h);
    CrfParams params;
    params.iterations = 5;
    params.sigma_spatial = 2.0;
    params.sigma_bilateral_xy = 4.0;
    params.sigma_bilateral_rgb = 20.0;
    // window must cover the whole image
    params.kernel_truncation_radius_sigmas =
        std::max(w, h) / params.sigma_spatial;
    const ProbMap fast = crf_refine(img, prob, params);
    const ProbMap exact = crf_refine_dense(img, prob, params);
    const ProbMap ref = oracle::dense_crf(
        img, prob, params.iterations, params.w_spatial, params.sigma_spatial,
        params.w_bilateral, params.sigma_bilateral_xy,
        params.sigma_bilateral_rgb);
    for (std::size_t i = 0; i < prob.pixel_count(); ++i) {
      CHECK(std::abs(fast.value(i) - ref.value(i)) < 1e-3);
      CHECK(std::abs(exact.value(i) - ref.value(i)) < 1e-3);
    }
  }
}

TEST_CASE("crf_refine output is a valid probability map") {
  std::mt19937 rng(44);
  const ProbMap prob = fixtures::random_probmap(rng, 12, 12);
  const RgbImage img = fixtures::random_image(rng, 12, 12);
  CrfParams params;
  params.iterations = 3;
  const ProbMap out = crf_refine(img, prob, params);  // ctor checks [0,1]
  CHECK(out.pixel_count() == prob.pixel_count());
}

TEST_CASE("crf_refine is schedule independent") {
  std::mt19937 rng(45);
  const ProbMap prob = fixtures::random_probmap(rng, 20, 15);
  const RgbImage img = fixtures::random_image(rng, 20, 15);
  CrfParams params;
  params.iterations = 3;
  const ProbMap a = crf_refine(img, prob, params, 1);
  const ProbMap b = crf_refine(img, prob, params, 8);
  CHECK(a.data() == b.data());
}

TEST_CASE("crf input validation") {
  CrfParams params;
  CHECK_THROWS_AS(crf_refine(fixtures::constant_image(3, 3, 0, 0, 0),
                             ProbMap(4, 4, 1), params),
                  std::invalid_argument);
  params.sigma_spatial = 0.0;
  CHECK_THROWS_AS(params.validate(), std::invalid_argument);
}

TEST_CASE("derive_markers thresholds") {
  const ProbMap high(2, 2, 1, {0.9f, 0.9f, 0.9f, 0.9f});
  const LabelMap all_lesion = derive_markers(high);
  for (std::size_t i = 0; i < 4; ++i)
    CHECK(all_lesion.value(i) == kLesionMarker);

  const ProbMap flat(2, 2, 1, {0.5f, 0.5f, 0.5f, 0.5f});
  const LabelMap none = derive_markers(flat);
  for (std::size_t i = 0; i < 4; ++i) CHECK(none.value(i) == 0);

  const ProbMap three(3, 1, 1, {0.1f, 0.5f, 0.9f});
  const LabelMap mixed = derive_markers(three);
  CHECK(mixed.value(0) == kBackgroundMarker);
  CHECK(mixed.value(1) == 0);
  CHECK(mixed.value(2) == kLesionMarker);

  CHECK_THROWS_AS(derive_markers(three, 0.2, 0.8), std::invalid_argument);
}

TEST_CASE("watershed single marker claims everything") {
  std::mt19937 rng(46);
  const ProbMap elev = fixtures::random_probmap(rng, 6, 5);
  LabelMap markers(6, 5);
  markers.set(2, 2, 7);
  const LabelMap out = watershed(elev, markers);
  for (std::size_t i = 0; i < out.pixel_count(); ++i)
    CHECK(out.value(i) == 7);
}

TEST_CASE("watershed on a flat 1x4 strip splits at the middle") {
  const ProbMap flat(4, 1, 1, {0.5f, 0.5f, 0.5f, 0.5f});
  LabelMap markers(4, 1);
  markers.set(0, 0, 1);
  markers.set(3, 0, 2);
  const LabelMap out = watershed(flat, markers);
  CHECK(out.at(0, 0) == 1);
  CHECK(out.at(1, 0) == 1);
  CHECK(out.at(2, 0) == 2);
  CHECK(out.at(3, 0) == 2);
}

TEST_CASE("watershed respects a ridge between two basins") {
  // elevations: two low basins separated by a high middle column
  const int w = 5, h = 3;
  std::vector<float> elev(w * h, 0.1f);
  for (int y = 0; y < h; ++y) elev[y * w + 2] = 0.9f;
  const ProbMap elevation(w, h, 1, std::move(elev));
  LabelMap markers(w, h);
  markers.set(0, 1, 1);
  markers.set(4, 1, 2);
  const LabelMap out = watershed(elevation, markers);
  for (int y = 0; y < h; ++y) {
    CHECK(out.at(0, y) == 1);
    CHECK(out.at(1, y) == 1);
    CHECK(out.at(3, y) == 2);
    CHECK(out.at(4, y) == 2);
  }
}

TEST_CASE("watershed equals the naive flood oracle on random instances") {
  std::mt19937 rng(47);
  std::uniform_int_distribution<int> dim(1, 8);
  std::uniform_int_distribution<int> nmark(1, 4);
  std::uniform_int_distribution<int> quant(0, 4);  // coarse values force ties
  for (int trial = 0; trial < 100; ++trial) {
    const int w = dim(rng), h = dim(rng);
    std::vector<float> elev(std::size_t(w) * h);
    for (auto& v : elev) v = quant(rng) / 4.0f;
    const ProbMap elevation(w, h, 1, std::move(elev));
    LabelMap markers(w, h);
    const int marks = nmark(rng);
    std::uniform_int_distribution<int> mx(0, w - 1), my(0, h - 1);
    for (int m = 0; m < marks; ++m)
      markers.set(mx(rng), my(rng), 1 + m % 3);
    bool any = false;
    for (std::size_t i = 0; i < markers.pixel_count(); ++i)
      if (markers.value(i)) any = true;
    if (!any) continue;

    const LabelMap fast = watershed(elevation, markers);
    const LabelMap ref = oracle::flood_watershed(elevation, markers);
    CHECK(fast == ref);

    // partition + label containment + marker preservation
    for (std::size_t i = 0; i < fast.pixel_count(); ++i) {
      CHECK(fast.value(i) != 0);
      CHECK(fast.value(i) <= 3);
    }
    for (int y = 0; y < h; ++y)
      for (int x = 0; x < w; ++x)
        if (markers.at(x, y) != 0) CHECK(fast.at(x, y) == markers.at(x, y));
  }
}

TEST_CASE("watershed requires markers") {
  const ProbMap elev(3, 3, 1);
  CHECK_THROWS_WITH_AS(watershed(elev, LabelMap(3, 3)),
                       doctest::Contains("marker"), std::invalid_argument);
}

TEST_CASE("largest_component basics") {
  const BinaryMask blob = fixtures::mask_from_string("110/110/000");
  CHECK(largest_component(blob) == blob);

  // size 5 vs size 3
  const BinaryMask two = fixtures::mask_from_string(
      "11100/11000/00000/00011/00001");
  const BinaryMask kept = largest_component(two);
  CHECK(kept == fixtures::mask_from_string("11100/11000/00000/00000/00000"));

  // two size-2 blobs: the one containing pixel index 0 survives
  const BinaryMask tie = fixtures::mask_from_string("1010/1010");
  CHECK(largest_component(tie) ==
        fixtures::mask_from_string("1000/1000"));

  const BinaryMask empty(4, 4);
  CHECK(largest_component(empty) == empty);
}

TEST_CASE("largest_component agrees with union-find oracle and is idempotent") {
  std::mt19937 rng(48);
  std::uniform_int_distribution<int> dim(1, 24);
  std::uniform_real_distribution<double> fill(0.1, 0.9);
  for (int trial = 0; trial < 200; ++trial) {
    const int w = dim(rng), h = dim(rng);
    const BinaryMask mask = fixtures::random_mask(rng, w, h, fill(rng));
    for (int conn : {4, 8}) {
      const BinaryMask kept = largest_component(mask, conn);
      CHECK(kept == oracle::largest_component_uf(mask, conn));
      CHECK(largest_component(kept, conn) == kept);
      // output is a subset of the input
      for (std::size_t i = 0; i < mask.pixel_count(); ++i)
        CHECK(kept.value(i) <= mask.value(i));
    }
  }
  CHECK_THROWS_AS(largest_component(fixtures::mask_from_string("1"), 6),
                  std::invalid_argument);
}

TEST_CASE("component labeling covers exactly the input 1-set") {
  std::mt19937 rng(49);
  for (int trial = 0; trial < 50; ++trial) {
    const BinaryMask mask = fixtures::random_mask(rng, 15, 10, 0.4);
    for (int conn : {4, 8}) {
      const LabelMap labels = label_components(mask, conn);
      const auto comps = oracle::components_union_find(mask, conn);
      std::size_t total = 0;
      for (const auto& [root, pixels] : comps) total += pixels.size();
      std::size_t labeled = 0;
      for (std::size_t i = 0; i < labels.pixel_count(); ++i) {
        CHECK((labels.value(i) != 0) == (mask.value(i) != 0));
        if (labels.value(i)) ++labeled;
      }
      CHECK(labeled == total);
      CHECK(std::size_t(labels.max_label()) == comps.size());
    }
  }
}

TEST_CASE("postprocess_chain keeps a confident clean blob") {
  const int n = 16;
  std::vector<float> values(n * n, 0.05f);
  BinaryMask expected(n, n);
  for (int y = 5; y < 11; ++y)
    for (int x = 4; x < 12; ++x) {
      values[y * n + x] = 0.95f;
      expected.set(x, y, true);
    }
  const ProbMap prob(n, n, 1, std::move(values));
  // lesion darker than the surrounding skin
  RgbImage img = fixtures::constant_image(n, n, 200, 160, 150);
  for (int y = 5; y < 11; ++y)
    for (int x = 4; x < 12; ++x) {
      img.set(x, y, 0, 90);
      img.set(x, y, 1, 60);
      img.set(x, y, 2, 55);
    }
  const BinaryMask out = postprocess_chain(img, prob, CrfParams{});
  CHECK(out == expected);
}

TEST_CASE("postprocess_chain all-background falls back to an empty mask") {
  const int n = 8;
  const ProbMap prob(n, n, 1, std::vector<float>(n * n, 0.02f));
  const RgbImage img = fixtures::constant_image(n, n, 180, 150, 140);
  PostprocessOptions options;
  const PostprocessTrace trace = postprocess_chain_traced(img, prob, options);
  CHECK(trace.fallback_used);
  for (std::size_t i = 0; i < trace.mask.pixel_count(); ++i)
    CHECK(trace.mask.value(i) == 0);
}

TEST_CASE("postprocess_chain removes a distant speck") {
  const int n = 24;
  std::vector<float> values(n * n, 0.05f);
  for (int y = 4; y < 12; ++y)
    for (int x = 4; x < 12; ++x) values[y * n + x] = 0.95f;
  values[20 * n + 21] = 0.95f;  // speck
  const ProbMap prob(n, n, 1, std::move(values));
  RgbImage img = fixtures::constant_image(n, n, 200, 160, 150);
  for (int y = 4; y < 12; ++y)
    for (int x = 4; x < 12; ++x) {
      img.set(x, y, 0, 90);
      img.set(x, y, 1, 60);
      img.set(x, y, 2, 55);
    }
  const BinaryMask out = postprocess_chain(img, prob, CrfParams{});
  CHECK(out.at(21, 20) == 0);
  CHECK(out.at(8, 8) == 1);
  // exactly one component remains
  const LabelMap labels = label_components(out, 8);
  CHECK(labels.max_label() == 1);
}

TEST_CASE("postprocess_chain without watershed binarizes the refined map") {
  const int n = 6;
  const ProbMap prob(n, n, 1, std::vector<float>(n * n, 0.7f));
  const RgbImage img = fixtures::constant_image(n, n, 100, 100, 100);
  PostprocessOptions options;
  options.use_crf = false;
  options.use_watershed = false;
  const PostprocessTrace trace = postprocess_chain_traced(img, prob, options);
  CHECK(trace.fallback_used);
  for (std::size_t i = 0; i < trace.mask.pixel_count(); ++i)
    CHECK(trace.mask.value(i) == 1);
}
