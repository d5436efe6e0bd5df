#include "cvo/imaging.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

namespace cvo {

Eigen::Vector2d polar_source_coordinate(double x_g, double y_g, int side, int pano_height, int pano_width) {
  const double half = side / 2.0;
  const double radius = (pano_height - y_g) / pano_height;
  const double azimuth = 2.0 * M_PI * x_g / pano_width;
  const double x_s = half - half * radius * std::sin(azimuth);
  const double y_s = half + half * radius * std::cos(azimuth);
  const double last = side - 1;
  return {std::clamp(x_s, 0.0, last), std::clamp(y_s, 0.0, last)};
}

RasterImage polar_transform(const RasterImage& overhead, int pano_height, int pano_width) {
  require(overhead.height() == overhead.width(), "invalid overhead image: must be square");
  require(pano_height >= 1 && pano_width >= 1, "panorama dimensions must be positive");
  const int side = overhead.width();
  RasterImage out(pano_height, pano_width, overhead.channels());
  for (int y = 0; y < pano_height; ++y) {
    for (int x = 0; x < pano_width; ++x) {
      const Eigen::Vector2d src = polar_source_coordinate(x, y, side, pano_height, pano_width);
      for (int c = 0; c < overhead.channels(); ++c) out.at(y, x, c) = overhead.sample_bilinear(src.x(), src.y(), c);
    }
  }
  return out;
}

RasterImage roll_columns(const RasterImage& image, int shift) {
  return image.columns(-shift, image.width());
}

int fov_columns(int width, double fov_degrees) {
  require(fov_degrees > 0.0 && fov_degrees <= 360.0, "field of view must be in (0, 360]");
  const double exact = fov_degrees / 360.0 * width;
  const double rounded = std::round(exact);
  require(std::abs(exact - rounded) < 1e-9 && rounded >= 1.0,
          "field of view " + std::to_string(fov_degrees) + " does not give an integer pixel width for " +
              std::to_string(width) + " columns");
  return static_cast<int>(rounded);
}

ShiftResult shift_and_crop(const RasterImage& street, int x_shift, double fov_degrees, int feature_width) {
  const int width = street.width();
  require(x_shift >= 0 && x_shift < width, "x_shift out of range [0, width)");
  require(feature_width >= 1, "invalid feature width");
  const int kept = fov_columns(width, fov_degrees);

  ShiftResult result;
  // concat(I[W - x:], I[:W - x]) starts at column W - x
  result.image = street.columns(width - x_shift, kept);
  result.x_shift = x_shift;
  const double w = static_cast<double>(width - x_shift) / width * feature_width;
  result.w_gt = std::fmod(w, static_cast<double>(feature_width));
  result.theta_gt = bins_to_degrees(result.w_gt, feature_width);
  return result;
}

int draw_shift(std::uint64_t seed, int width) {
  require(width >= 1, "width must be positive");
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> dist(0, width - 1);
  return dist(rng);
}

ShiftResult random_shift(const RasterImage& street, std::uint64_t seed, double fov_degrees, int feature_width) {
  return shift_and_crop(street, draw_shift(seed, street.width()), fov_degrees, feature_width);
}

}  // namespace cvo
