#pragma once

#include <Eigen/Core>
#include <cstdint>

#include "cvo/angles.hpp"
#include "cvo/image.hpp"

namespace cvo {

/// Overhead-image coordinate (column x, row y) sampled by panorama pixel
/// (x_g, y_g), clamped to [0, side - 1].
Eigen::Vector2d polar_source_coordinate(double x_g, double y_g, int side, int pano_height, int pano_width);

/// Warps a square overhead image into a pano_height x pano_width strip whose
/// column 0 looks due south of the image centre; bilinear sampling.
RasterImage polar_transform(const RasterImage& overhead, int pano_height, int pano_width);

/// Circular column roll: out[x] = in[x - shift].
RasterImage roll_columns(const RasterImage& image, int shift);

struct ShiftResult {
  RasterImage image;
  int x_shift = 0;
  /// Ground-truth orientation in fractional feature bins.
  double w_gt = 0.0;
  SouthAlignedAngle theta_gt;
};

/// Rolls the panorama clockwise by x_shift pixels and keeps the first
/// fov/360 * width columns. Ground truth is expressed in feature bins.
ShiftResult shift_and_crop(const RasterImage& street, int x_shift, double fov_degrees, int feature_width);

/// Uniform integer shift in [0, width) drawn from a generator seeded with `seed`.
int draw_shift(std::uint64_t seed, int width);

ShiftResult random_shift(const RasterImage& street, std::uint64_t seed, double fov_degrees, int feature_width);

/// Number of columns kept out of `width` for a field of view; throws if it is
/// not an integer.
int fov_columns(int width, double fov_degrees);

}  // namespace cvo
