#include "cvo/features.hpp"

#include <algorithm>
#include <array>
#include <cmath>

namespace cvo {

FeatureMapd extract_features(const RasterImage& image) {
  using L = ExtractorLayout;
  const int height = image.height();
  const int width = image.width();
  const int channels = image.channels();
  require(height % (L::kHeight * 8) == 0 && width % L::kStride == 0 && width >= 2 * L::kStride,
          "unsupported input size: height must be a multiple of 32 and width a multiple of 8 (>= 16)");
  require(channels == 1 || channels == 3, "unsupported input size: expected 1 or 3 channels");

  Eigen::ArrayXXd luma(height, width);
  for (int y = 0; y < height; ++y)
    for (int x = 0; x < width; ++x) {
      double s = 0.0;
      for (int c = 0; c < channels; ++c) s += image.at(y, x, c);
      luma(y, x) = s / channels;
    }

  Eigen::ArrayXXd gx(height, width), gy(height, width);
  for (int y = 0; y < height; ++y) {
    const int up = std::max(y - 1, 0);
    const int down = std::min(y + 1, height - 1);
    for (int x = 0; x < width; ++x) {
      gx(y, x) = 0.5 * (luma(y, (x + 1) % width) - luma(y, (x + width - 1) % width));
      gy(y, x) = 0.5 * (luma(down, x) - luma(up, x));
    }
  }

  const int cell_h = height / L::kHeight;
  const int cell_w = L::kStride;
  const double pixels = static_cast<double>(cell_h) * cell_w;
  FeatureMapd out(L::kHeight, width / cell_w, L::kChannels);

  for (int ch = 0; ch < L::kHeight; ++ch) {
    for (int cw = 0; cw < out.width(); ++cw) {
      const int y0 = ch * cell_h;
      const int x0 = cw * cell_w;
      std::array<double, 3> mean{};
      std::array<double, L::kOrientationBins> hist{};
      double abs_gx = 0.0, abs_gy = 0.0, sum = 0.0, sum_sq = 0.0;
      double top = 0.0, bottom = 0.0, left = 0.0, right = 0.0;

      for (int y = y0; y < y0 + cell_h; ++y) {
        for (int x = x0; x < x0 + cell_w; ++x) {
          for (int c = 0; c < 3; ++c) mean[c] += image.at(y, x, channels == 3 ? c : 0);

          const double dx = gx(y, x), dy = gy(y, x);
          const double magnitude = std::hypot(dx, dy);
          if (magnitude > 0.0) {
            const double pos = (std::atan2(dy, dx) + M_PI) / (2.0 * M_PI) * L::kOrientationBins - 0.5;
            const double lower = std::floor(pos);
            const double t = pos - lower;
            const int b0 = wrap_index(static_cast<long long>(lower), L::kOrientationBins);
            const int b1 = (b0 + 1) % L::kOrientationBins;
            hist[b0] += (1.0 - t) * magnitude;
            hist[b1] += t * magnitude;
          }
          abs_gx += std::abs(dx);
          abs_gy += std::abs(dy);

          const double v = luma(y, x);
          sum += v;
          sum_sq += v * v;
          (y - y0 < cell_h / 2 ? top : bottom) += v;
          (x - x0 < cell_w / 2 ? left : right) += v;
        }
      }

      for (int c = 0; c < 3; ++c) out.at(ch, cw, c) = mean[c] / pixels;
      for (int b = 0; b < L::kOrientationBins; ++b) out.at(ch, cw, 3 + b) = hist[b] / pixels;
      out.at(ch, cw, 11) = abs_gx / pixels;
      out.at(ch, cw, 12) = abs_gy / pixels;
      const double mu = sum / pixels;
      out.at(ch, cw, 13) = std::sqrt(std::max(sum_sq / pixels - mu * mu, 0.0));
      out.at(ch, cw, 14) = (top - bottom) / (pixels / 2.0);
      out.at(ch, cw, 15) = (left - right) / (pixels / 2.0);
    }
  }
  return out;
}

}  // namespace cvo
