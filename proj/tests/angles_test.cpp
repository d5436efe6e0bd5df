#include <gtest/gtest.h>

#include <random>

#include "cvo/angles.hpp"

namespace cvo {
namespace {

TEST(AngleDiff, PaperExampleFavoursShorterArc) {
  EXPECT_DOUBLE_EQ(angle_diff(0.0, 170.0).degrees(), 170.0);
  EXPECT_DOUBLE_EQ(angle_diff(0.0, 240.0).degrees(), 120.0);
}

TEST(AngleDiff, IdentityAndSeam) {
  for (double t : {0.0, 45.5, 180.0, 359.999}) EXPECT_EQ(angle_diff(t, t).degrees(), 0.0);
  EXPECT_NEAR(angle_diff(350.0, 10.0).degrees(), 20.0, 1e-12);
  EXPECT_EQ(angle_diff(0.0, 180.0).degrees(), 180.0);
  EXPECT_EQ(angle_diff(90.0, 270.0).degrees(), 180.0);
}

TEST(AngleDiff, RangeAndSymmetryOnDegreeGrid) {
  for (int a = 0; a < 360; ++a)
    for (int b = 0; b < 360; ++b) {
      const double d = angle_diff(a, b).degrees();
      ASSERT_GE(d, 0.0);
      ASSERT_LE(d, 180.0);
      ASSERT_EQ(d, angle_diff(b, a).degrees());
    }
}

TEST(AngleDiff, ContinuousAcrossSeam) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> angle(0.0, 360.0), eps(0.0, 0.01);
  for (int i = 0; i < 20000; ++i) {
    const double a = i < 1000 ? 360.0 - eps(rng) : angle(rng);
    const double b = angle(rng);
    const double e = eps(rng);
    ASSERT_LE(std::abs(angle_diff(a, b).degrees() - angle_diff(a + e, b).degrees()), e + 1e-9);
  }
}

TEST(Normalize, FlooredModuloAndIdempotent) {
  EXPECT_EQ(SouthAlignedAngle(-90.0).degrees(), 270.0);
  EXPECT_EQ(SouthAlignedAngle(360.0).degrees(), 0.0);
  EXPECT_EQ(SouthAlignedAngle(725.0).degrees(), 5.0);
  EXPECT_EQ(SouthAlignedAngle(-1e-18).degrees(), 0.0);
  for (double t : {-1234.5, -0.25, 0.0, 12.0, 359.75, 1e6}) {
    const double once = normalize_degrees(t);
    EXPECT_GE(once, 0.0);
    EXPECT_LT(once, 360.0);
    EXPECT_EQ(normalize_degrees(once), once);
  }
}

TEST(BinConversion, Examples) {
  EXPECT_DOUBLE_EQ(bins_to_degrees(16, 64).degrees(), 90.0);
  EXPECT_DOUBLE_EQ(bins_to_degrees(1, 64).degrees(), 5.625);
  EXPECT_DOUBLE_EQ(bins_to_degrees(1, 640).degrees(), 0.5625);
  EXPECT_DOUBLE_EQ(degrees_to_bins(SouthAlignedAngle(90.0), 64), 16.0);
  EXPECT_DOUBLE_EQ(degrees_to_bins(SouthAlignedAngle(0.0), 64), 0.0);
  EXPECT_DOUBLE_EQ(degrees_to_bins(SouthAlignedAngle(270.0), 64), 48.0);
  EXPECT_DOUBLE_EQ(resolving_unit_degrees(64, 1), 5.625);
  EXPECT_DOUBLE_EQ(resolving_unit_degrees(64, 10), 0.5625);
}

TEST(BinConversion, ZeroWidthIsRejected) {
  EXPECT_THROW(bins_to_degrees(1.0, 0.0), std::invalid_argument);
  EXPECT_THROW(degrees_to_bins(SouthAlignedAngle(1.0), 0.0), std::invalid_argument);
}

TEST(BinConversion, RoundTrip) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> bins(-200.0, 200.0);
  for (int i = 0; i < 10000; ++i) {
    const double w = bins(rng);
    const double back = degrees_to_bins(bins_to_degrees(w, 64), 64);
    double expected = std::fmod(w, 64.0);
    if (expected < 0) expected += 64.0;
    const double d = std::abs(back - expected);
    ASSERT_LT(std::min(d, 64.0 - d), 1e-9);
  }
}

}  // namespace
}  // namespace cvo
