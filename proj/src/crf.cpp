#include "derm/crf.hpp"

#include <cmath>
#include <stdexcept>
#include <thread>
#include <vector>

namespace derm {

namespace {

constexpr float kProbEpsilon = 1e-6f;

float clamp_prob(float p) {
  return p < kProbEpsilon ? kProbEpsilon
                          : (p > 1.0f - kProbEpsilon ? 1.0f - kProbEpsilon : p);
}

void check_inputs(const RgbImage& image, const ProbMap& prob) {
  if (prob.channels() != 1)
    throw std::invalid_argument("crf_refine expects a 1-channel map");
  if (image.width() != prob.width() || image.height() != prob.height())
    throw std::invalid_argument("image and probability dimensions differ");
}

}  // namespace

void CrfParams::validate() const {
  if (iterations < 0)
    throw std::invalid_argument("iterations must be >= 0");
  if (w_spatial < 0.0 || w_bilateral < 0.0)
    throw std::invalid_argument("kernel weights must be >= 0");
  if (!(sigma_spatial > 0.0) || !(sigma_bilateral_xy > 0.0) ||
      !(sigma_bilateral_rgb > 0.0))
    throw std::invalid_argument("kernel sigmas must be > 0");
  if (!(kernel_truncation_radius_sigmas > 0.0))
    throw std::invalid_argument("truncation radius must be > 0 sigmas");
}

int CrfParams::truncation_radius() const {
  return static_cast<int>(
      std::ceil(kernel_truncation_radius_sigmas * sigma_spatial));
}

ProbMap crf_refine(const RgbImage& image, const ProbMap& prob,
                   const CrfParams& params, int jobs) {
  params.validate();
  check_inputs(image, prob);
  if (params.iterations == 0) return prob;

  const int w = prob.width(), h = prob.height();
  const std::size_t n = prob.pixel_count();
  const int radius = params.truncation_radius();
  const int side = 2 * radius + 1;

  // Unary logits from the epsilon-clamped inputs. Double buffers keep the
  // zero-pairwise fixed point exact through the log/sigmoid round trip.
  std::vector<double> logit(n);
  std::vector<double> q(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double p1 = clamp_prob(prob.value(i));
    q[i] = p1;
    logit[i] = std::log(p1) - std::log(1.0 - p1);
  }

  // 1-D spatial profile and the bilateral's per-offset spatial factor. The
  // spatial kernel is separable over the square window, so its messages are
  // two 1-D passes instead of a per-neighbor term.
  std::vector<float> g_spat(side);
  std::vector<float> w_bxy(static_cast<std::size_t>(side) * side);
  const double inv2ss =
      1.0 / (2.0 * params.sigma_spatial * params.sigma_spatial);
  const double inv2sxy =
      1.0 / (2.0 * params.sigma_bilateral_xy * params.sigma_bilateral_xy);
  for (int d = -radius; d <= radius; ++d)
    g_spat[d + radius] = static_cast<float>(std::exp(-double(d) * d * inv2ss));
  for (int dy = -radius; dy <= radius; ++dy)
    for (int dx = -radius; dx <= radius; ++dx) {
      const double d2 = double(dx) * dx + double(dy) * dy;
      w_bxy[static_cast<std::size_t>(dy + radius) * side + (dx + radius)] =
          static_cast<float>(params.w_bilateral * std::exp(-d2 * inv2sxy));
    }

  // Color table up to where the kernel falls below 1e-9 of its peak; larger
  // distances contribute nothing and stay out of cache.
  const double inv2srgb = 1.0 / (2.0 * params.sigma_bilateral_rgb *
                                 params.sigma_bilateral_rgb);
  const int lut_cutoff = static_cast<int>(
      std::min(double(3 * 255 * 255), std::ceil(std::log(1e9) / inv2srgb)));
  std::vector<float> rgb_lut(lut_cutoff + 1, 0.0f);
  for (int d2 = 0; d2 < lut_cutoff; ++d2)
    rgb_lut[d2] = static_cast<float>(std::exp(-double(d2) * inv2srgb));

  const bool use_spatial = params.w_spatial > 0.0;
  const bool use_bilateral = params.w_bilateral > 0.0;
  const std::uint8_t* rgb = image.data().data();

  const unsigned hw = std::thread::hardware_concurrency();
  const int workers = jobs > 0 ? jobs : static_cast<int>(hw > 0 ? hw : 1);
  auto run_rows = [&](auto&& fn) {
    if (workers <= 1 || h < 2 * workers) {
      fn(0, h);
      return;
    }
    std::vector<std::thread> pool;
    const int chunk = (h + workers - 1) / workers;
    for (int t = 0; t < workers; ++t) {
      const int y0 = t * chunk;
      const int y1 = std::min(h, y0 + chunk);
      if (y0 >= y1) break;
      pool.emplace_back(fn, y0, y1);
    }
    for (auto& th : pool) th.join();
  };

  // Two-pass truncated Gaussian over the clipped square window; out must not
  // alias src.
  std::vector<double> sep_tmp(use_spatial ? n : 0);
  auto spatial_blur = [&](const std::vector<double>& src,
                          std::vector<double>& out) {
    run_rows([&](int y0, int y1) {
      for (int y = y0; y < y1; ++y) {
        const double* row = src.data() + std::size_t(y) * w;
        for (int x = 0; x < w; ++x) {
          const int lo = std::max(-radius, -x), hi = std::min(radius, w - 1 - x);
          double acc = 0.0;
          for (int d = lo; d <= hi; ++d)
            acc += g_spat[d + radius] * row[x + d];
          sep_tmp[std::size_t(y) * w + x] = acc;
        }
      }
    });
    run_rows([&](int y0, int y1) {
      for (int y = y0; y < y1; ++y) {
        for (int x = 0; x < w; ++x) {
          const int lo = std::max(-radius, -y), hi = std::min(radius, h - 1 - y);
          double acc = 0.0;
          for (int d = lo; d <= hi; ++d)
            acc += g_spat[d + radius] * sep_tmp[std::size_t(y + d) * w + x];
          out[std::size_t(y) * w + x] = acc;
        }
      }
    });
  };

  // Kernel mass per pixel is independent of Q: compute it once.
  std::vector<double> ksum(n, 0.0);
  if (use_spatial) {
    std::vector<double> ones(n, 1.0);
    std::vector<double> mass(n);
    spatial_blur(ones, mass);
    for (std::size_t i = 0; i < n; ++i) ksum[i] = params.w_spatial * mass[i];
  }
  if (use_bilateral) {
    run_rows([&](int y0, int y1) {
      for (int y = y0; y < y1; ++y) {
        const int dy_lo = std::max(-radius, -y);
        const int dy_hi = std::min(radius, h - 1 - y);
        for (int x = 0; x < w; ++x) {
          const std::size_t i = std::size_t(y) * w + x;
          const int r0 = rgb[3 * i], g0 = rgb[3 * i + 1], b0 = rgb[3 * i + 2];
          const int dx_lo = std::max(-radius, -x);
          const int dx_hi = std::min(radius, w - 1 - x);
          double acc = 0.0;
          for (int dy = dy_lo; dy <= dy_hi; ++dy) {
            const std::size_t row = i + static_cast<std::ptrdiff_t>(dy) * w;
            const float* wxy =
                w_bxy.data() + std::size_t(dy + radius) * side + radius;
            const std::uint8_t* crow = rgb + 3 * row;
            for (int dx = dx_lo; dx <= dx_hi; ++dx) {
              const int dr = crow[3 * dx] - r0;
              const int dg = crow[3 * dx + 1] - g0;
              const int db = crow[3 * dx + 2] - b0;
              const int d2 = dr * dr + dg * dg + db * db;
              if (d2 <= lut_cutoff) acc += wxy[dx] * rgb_lut[d2];
            }
          }
          ksum[i] += acc;
        }
      }
    });
  }

  std::vector<double> q_next(n);
  std::vector<double> spat_msg(use_spatial ? n : 0);
  const double self_weight = params.w_spatial + params.w_bilateral;

  for (int iter = 0; iter < params.iterations; ++iter) {
    if (use_spatial) spatial_blur(q, spat_msg);
    run_rows([&](int y0, int y1) {
      for (int y = y0; y < y1; ++y) {
        const int dy_lo = std::max(-radius, -y);
        const int dy_hi = std::min(radius, h - 1 - y);
        for (int x = 0; x < w; ++x) {
          const std::size_t i = std::size_t(y) * w + x;
          double kq = use_spatial ? params.w_spatial * spat_msg[i] : 0.0;
          if (use_bilateral) {
            const int r0 = rgb[3 * i], g0 = rgb[3 * i + 1],
                      b0 = rgb[3 * i + 2];
            const int dx_lo = std::max(-radius, -x);
            const int dx_hi = std::min(radius, w - 1 - x);
            double acc = 0.0;
            for (int dy = dy_lo; dy <= dy_hi; ++dy) {
              const std::size_t row = i + static_cast<std::ptrdiff_t>(dy) * w;
              const float* wxy =
                  w_bxy.data() + std::size_t(dy + radius) * side + radius;
              const double* qrow = q.data() + row;
              const std::uint8_t* crow = rgb + 3 * row;
              for (int dx = dx_lo; dx <= dx_hi; ++dx) {
                const int dr = crow[3 * dx] - r0;
                const int dg = crow[3 * dx + 1] - g0;
                const int db = crow[3 * dx + 2] - b0;
                const int d2 = dr * dr + dg * dg + db * db;
                if (d2 <= lut_cutoff) acc += wxy[dx] * rgb_lut[d2] * qrow[dx];
              }
            }
            kq += acc;
          }
          // Remove the self term (offset 0, zero color distance).
          const double total = ksum[i] - self_weight;
          const double s1 = kq - self_weight * q[i];
          // Potts messages: label 1 is penalized by mass on label 0 and vice
          // versa; the update reduces to a sigmoid over the logit.
          const double z = logit[i] + (2.0 * s1 - total);
          q_next[i] = 1.0 / (1.0 + std::exp(-z));
        }
      }
    });
    q.swap(q_next);
  }

  std::vector<float> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = static_cast<float>(q[i]);
  return ProbMap(w, h, 1, std::move(out));
}

ProbMap crf_refine_dense(const RgbImage& image, const ProbMap& prob,
                         const CrfParams& params) {
  params.validate();
  check_inputs(image, prob);
  if (params.iterations == 0) return prob;

  const int w = prob.width(), h = prob.height();
  const std::size_t n = prob.pixel_count();
  std::vector<double> logit(n);
  std::vector<double> q(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double p1 = clamp_prob(prob.value(i));
    q[i] = p1;
    logit[i] = std::log(p1) - std::log(1.0 - p1);
  }

  const double inv2ss =
      1.0 / (2.0 * params.sigma_spatial * params.sigma_spatial);
  const double inv2sxy =
      1.0 / (2.0 * params.sigma_bilateral_xy * params.sigma_bilateral_xy);
  const double inv2srgb = 1.0 / (2.0 * params.sigma_bilateral_rgb *
                                 params.sigma_bilateral_rgb);
  const std::uint8_t* rgb = image.data().data();

  std::vector<double> q_next(n);
  for (int iter = 0; iter < params.iterations; ++iter) {
    for (std::size_t i = 0; i < n; ++i) {
      const int xi = static_cast<int>(i % w), yi = static_cast<int>(i / w);
      double ksum = 0.0, kq = 0.0;
      for (std::size_t j = 0; j < n; ++j) {
        if (j == i) continue;
        const int xj = static_cast<int>(j % w), yj = static_cast<int>(j / w);
        const double dxy =
            double(xi - xj) * (xi - xj) + double(yi - yj) * (yi - yj);
        const double dr = double(rgb[3 * i]) - rgb[3 * j];
        const double dg = double(rgb[3 * i + 1]) - rgb[3 * j + 1];
        const double db = double(rgb[3 * i + 2]) - rgb[3 * j + 2];
        const double k =
            params.w_spatial * std::exp(-dxy * inv2ss) +
            params.w_bilateral *
                std::exp(-dxy * inv2sxy -
                         (dr * dr + dg * dg + db * db) * inv2srgb);
        ksum += k;
        kq += k * q[j];
      }
      const double z = logit[i] + (kq - (ksum - kq));
      q_next[i] = 1.0 / (1.0 + std::exp(-z));
    }
    q.swap(q_next);
  }

  std::vector<float> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = static_cast<float>(q[i]);
  return ProbMap(w, h, 1, std::move(out));
}

}  // namespace derm
