#pragma once

// Orientation coordinates.
//
// Orientation shifts live in the south-aligned frame: 0 means the first
// panorama column looks due south of the overhead image centre, and the shift
// grows clockwise in [0, 360). Errors between two shifts are measured as the
// shorter arc, which is continuous across the 0/360 seam.

#include <cmath>

#include "cvo/error.hpp"

namespace cvo {

/// Floored modulo into [0, 360).
inline double normalize_degrees(double degrees) {
  double r = std::fmod(degrees, 360.0);
  if (r < 0.0) r += 360.0;
  // -tiny + 360 rounds to 360.0
  if (r >= 360.0) r = 0.0;
  return r;
}

class SouthAlignedAngle {
 public:
  constexpr SouthAlignedAngle() = default;
  explicit SouthAlignedAngle(double degrees) : degrees_(normalize_degrees(degrees)) {}

  double degrees() const { return degrees_; }
  double radians() const { return degrees_ * M_PI / 180.0; }

  friend bool operator==(const SouthAlignedAngle&, const SouthAlignedAngle&) = default;

 private:
  double degrees_ = 0.0;
};

class AngleError {
 public:
  constexpr AngleError() = default;
  explicit AngleError(double degrees) : degrees_(degrees < 0.0 ? 0.0 : (degrees > 180.0 ? 180.0 : degrees)) {}

  double degrees() const { return degrees_; }

  friend auto operator<=>(const AngleError&, const AngleError&) = default;

 private:
  double degrees_ = 0.0;
};

/// Shorter-arc difference 180 - ||a - b| - 180|, in [0, 180].
inline AngleError angle_diff(SouthAlignedAngle a, SouthAlignedAngle b) {
  const double d = std::abs(a.degrees() - b.degrees());
  return AngleError(180.0 - std::abs(d - 180.0));
}

inline AngleError angle_diff(double a_degrees, double b_degrees) {
  return angle_diff(SouthAlignedAngle(a_degrees), SouthAlignedAngle(b_degrees));
}

/// Fractional feature bins on a circular axis of `width` bins to degrees.
inline SouthAlignedAngle bins_to_degrees(double bins, double width) {
  require(width > 0.0, "invalid feature width: must be positive");
  return SouthAlignedAngle(bins / width * 360.0);
}

inline double degrees_to_bins(SouthAlignedAngle angle, double width) {
  require(width > 0.0, "invalid feature width: must be positive");
  return angle.degrees() / 360.0 * width;
}

/// Angular size of one bin after refining `width` coarse bins by `scale`.
inline double resolving_unit_degrees(int width, int scale) {
  require(width > 0 && scale >= 1, "invalid width or scale");
  return 360.0 / (static_cast<double>(width) * scale);
}

}  // namespace cvo
