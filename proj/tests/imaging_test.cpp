#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "cvo/imaging.hpp"

namespace cvo {
namespace {

RasterImage random_image(int h, int w, int c, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  RasterImage img(h, w, c);
  for (auto& v : img.samples()) v = u(rng);
  return img;
}

TEST(PolarTransform, SourceCoordinates) {
  const int side = 512, h = 128, w = 512;
  Eigen::Vector2d centre = polar_source_coordinate(0, h, side, h, w);
  EXPECT_DOUBLE_EQ(centre.x(), 256.0);
  EXPECT_DOUBLE_EQ(centre.y(), 256.0);

  Eigen::Vector2d south = polar_source_coordinate(0, 0, side, h, w);
  EXPECT_DOUBLE_EQ(south.x(), 256.0);
  EXPECT_DOUBLE_EQ(south.y(), 511.0);  // 512 clamped

  Eigen::Vector2d west = polar_source_coordinate(w / 4.0, 0, side, h, w);
  EXPECT_NEAR(west.x(), 0.0, 1e-12);
  EXPECT_NEAR(west.y(), 256.0, 1e-12);
}

TEST(PolarTransform, FirstColumnLooksSouth) {
  for (int y = 0; y <= 128; ++y) {
    const Eigen::Vector2d p = polar_source_coordinate(0, y, 512, 128, 512);
    EXPECT_DOUBLE_EQ(p.x(), 256.0);
    EXPECT_GE(p.y(), 256.0);
  }
}

TEST(PolarTransform, OutputShapeAndSampling) {
  RasterImage sat(64, 64, 3);
  for (int y = 0; y < 64; ++y)
    for (int x = 0; x < 64; ++x)
      for (int c = 0; c < 3; ++c) sat.at(y, x, c) = (y * 64 + x) / 4096.0;
  const RasterImage pano = polar_transform(sat, 32, 48);
  EXPECT_EQ(pano.height(), 32);
  EXPECT_EQ(pano.width(), 48);
  EXPECT_EQ(pano.channels(), 3);
  // top of column 0 is the (clamped) bottom-centre pixel of the overhead image
  EXPECT_DOUBLE_EQ(pano.at(0, 0, 1), sat.at(63, 32, 1));
}

TEST(PolarTransform, RejectsNonSquare) {
  EXPECT_THROW(polar_transform(RasterImage(10, 12, 1), 8, 8), std::invalid_argument);
}

TEST(ShiftAndCrop, Examples) {
  const RasterImage img = random_image(4, 512, 3, 1);
  const ShiftResult none = shift_and_crop(img, 0, 360.0, 64);
  EXPECT_EQ(none.image, img);
  EXPECT_EQ(none.w_gt, 0.0);

  const ShiftResult quarter = shift_and_crop(img, 128, 360.0, 64);
  EXPECT_DOUBLE_EQ(quarter.w_gt, 48.0);
  EXPECT_DOUBLE_EQ(quarter.theta_gt.degrees(), 270.0);

  const ShiftResult sub = shift_and_crop(img, 4, 360.0, 64);
  EXPECT_DOUBLE_EQ(sub.w_gt, 63.5);
}

TEST(ShiftAndCrop, ColumnsFollowConcatenation) {
  const RasterImage img = random_image(2, 16, 1, 2);
  const ShiftResult r = shift_and_crop(img, 5, 180.0, 8);
  ASSERT_EQ(r.image.width(), 8);
  for (int x = 0; x < 8; ++x) {
    const int src = x < 5 ? 16 - 5 + x : x - 5;
    EXPECT_EQ(r.image.at(1, x, 0), img.at(1, src, 0));
  }
  EXPECT_DOUBLE_EQ(r.w_gt, 11.0 / 16.0 * 8.0);
}

TEST(ShiftAndCrop, Errors) {
  const RasterImage img = random_image(2, 512, 1, 3);
  EXPECT_THROW(shift_and_crop(img, -1, 360.0, 64), std::invalid_argument);
  EXPECT_THROW(shift_and_crop(img, 512, 360.0, 64), std::invalid_argument);
  EXPECT_THROW(shift_and_crop(img, 0, 100.0, 64), std::invalid_argument);  // 142.2 px
  EXPECT_THROW(shift_and_crop(img, 0, 0.0, 64), std::invalid_argument);
  EXPECT_THROW(shift_and_crop(img, 0, 361.0, 64), std::invalid_argument);
}

TEST(ShiftAndCrop, CompositionAddsShiftsAndGroundTruths) {
  const RasterImage img = random_image(3, 64, 3, 4);
  std::mt19937_64 rng(5);
  std::uniform_int_distribution<int> shift(0, 63);
  for (int i = 0; i < 200; ++i) {
    const int a = shift(rng), b = shift(rng);
    const ShiftResult first = shift_and_crop(img, a, 360.0, 8);
    const ShiftResult second = shift_and_crop(first.image, b, 360.0, 8);
    const ShiftResult direct = shift_and_crop(img, (a + b) % 64, 360.0, 8);
    ASSERT_EQ(second.image, direct.image);
    // w_gt = -x W_f / W mod W_f, so ground truths add modulo W_f
    const double summed = std::fmod(first.w_gt + second.w_gt, 8.0);
    const double d = std::abs(summed - direct.w_gt);
    ASSERT_LT(std::min(d, 8.0 - d), 1e-12);
  }
}

TEST(ShiftAndCrop, FullFovIsColumnPermutation) {
  const RasterImage img = random_image(5, 40, 3, 6);
  const ShiftResult r = shift_and_crop(img, 17, 360.0, 5);
  std::vector<double> a(img.samples().begin(), img.samples().end());
  std::vector<double> b(r.image.samples().begin(), r.image.samples().end());
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  EXPECT_EQ(a, b);
}

TEST(RandomShift, DeterministicAndFullWidth) {
  const RasterImage img = random_image(4, 64, 3, 7);
  const ShiftResult a = random_shift(img, 99, 360.0, 8);
  const ShiftResult b = random_shift(img, 99, 360.0, 8);
  EXPECT_EQ(a.image, b.image);
  EXPECT_EQ(a.x_shift, b.x_shift);
  EXPECT_EQ(a.w_gt, b.w_gt);
  EXPECT_EQ(a.image.width(), img.width());
}

TEST(RandomShift, UniformOverSeeds) {
  const RasterImage img = random_image(1, 16, 1, 8);
  std::vector<int> counts(16, 0);
  const int draws = 100000;
  for (int s = 0; s < draws; ++s) ++counts[random_shift(img, static_cast<std::uint64_t>(s), 360.0, 2).x_shift];
  double chi2 = 0.0;
  const double expected = draws / 16.0;
  for (int c : counts) chi2 += (c - expected) * (c - expected) / expected;
  // chi-square critical value, 15 degrees of freedom, p = 0.01
  EXPECT_LT(chi2, 30.578);
}

}  // namespace
}  // namespace cvo
