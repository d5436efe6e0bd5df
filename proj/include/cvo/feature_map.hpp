#pragma once

// H x W x C feature grid whose width axis is circular.
//
// Storage is a W x (H*C) row-major matrix: row m is the slice F[m] across all
// heights and channels, which is the unit the correlation sums over.

#include <Eigen/Core>
#include <cmath>
#include <string>

#include "cvo/error.hpp"

namespace cvo {

template <typename Scalar>
class FeatureMap {
 public:
  using Columns = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

  FeatureMap() = default;
  FeatureMap(int height, int width, int channels) : height_(height), channels_(channels) {
    require(height >= 1 && width >= 1 && channels >= 1, "feature map dimensions must be positive");
    columns_ = Columns::Zero(width, static_cast<Eigen::Index>(height) * channels);
  }
  FeatureMap(int height, int channels, Columns columns)
      : height_(height), channels_(channels), columns_(std::move(columns)) {
    require(height >= 1 && channels >= 1 && columns_.rows() >= 1, "feature map dimensions must be positive");
    require(columns_.cols() == static_cast<Eigen::Index>(height) * channels, "column slice size mismatch");
  }

  int height() const { return height_; }
  int width() const { return static_cast<int>(columns_.rows()); }
  int channels() const { return channels_; }
  Eigen::Index slice_size() const { return columns_.cols(); }

  Scalar& at(int h, int w, int c) { return columns_(w, h * channels_ + c); }
  Scalar at(int h, int w, int c) const { return columns_(w, h * channels_ + c); }

  /// Slice at width position w across all heights and channels.
  auto column(int w) { return columns_.row(w); }
  auto column(int w) const { return columns_.row(w); }

  Columns& columns() { return columns_; }
  const Columns& columns() const { return columns_; }

  bool same_shape(const FeatureMap& other) const {
    return height_ == other.height_ && channels_ == other.channels_ && width() == other.width();
  }
  bool all_finite() const { return columns_.allFinite(); }

  template <typename Other>
  FeatureMap<Other> cast() const {
    return FeatureMap<Other>(height_, channels_, columns_.template cast<Other>());
  }

  friend bool operator==(const FeatureMap& a, const FeatureMap& b) {
    return a.same_shape(b) && a.columns_ == b.columns_;
  }

 private:
  int height_ = 0;
  int channels_ = 0;
  Columns columns_;
};

using FeatureMapf = FeatureMap<float>;
using FeatureMapd = FeatureMap<double>;

inline int wrap_index(long long i, int n) {
  const long long r = i % n;
  return static_cast<int>(r < 0 ? r + n : r);
}

/// Whole-bin circular roll along width: out[j] = in[j - k].
template <typename Scalar>
FeatureMap<Scalar> circular_shift(const FeatureMap<Scalar>& map, int k) {
  FeatureMap<Scalar> out = map;
  const int width = map.width();
  for (int j = 0; j < width; ++j) out.column(j) = map.column(wrap_index(static_cast<long long>(j) - k, width));
  return out;
}

/// Circular linear interpolation along width; output position S*k equals
/// input position k exactly.
template <typename Scalar>
FeatureMap<Scalar> interpolate_width(const FeatureMap<Scalar>& map, int scale) {
  require(scale >= 1, "invalid scaling factor: must be >= 1");
  if (scale == 1) return map;
  const int width = map.width();
  FeatureMap<Scalar> out(map.height(), width * scale, map.channels());
  for (int k = 0; k < width; ++k) {
    const auto left = map.column(k);
    const auto right = map.column((k + 1) % width);
    out.column(k * scale) = left;
    for (int j = 1; j < scale; ++j) {
      const Scalar t = static_cast<Scalar>(j) / static_cast<Scalar>(scale);
      out.column(k * scale + j) = (Scalar(1) - t) * left + t * right;
    }
  }
  return out;
}

/// Samples the map at continuous width offsets: out[m] = in(m + offset) for
/// m in [0, count), linear between neighbouring columns, circular.
template <typename Scalar>
FeatureMap<Scalar> sample_columns(const FeatureMap<Scalar>& map, double offset, int count) {
  require(count >= 1, "column count must be positive");
  const int width = map.width();
  const double base = std::floor(offset);
  const Scalar frac = static_cast<Scalar>(offset - base);
  const long long start = static_cast<long long>(base);
  FeatureMap<Scalar> out(map.height(), count, map.channels());
  for (int m = 0; m < count; ++m) {
    const int i0 = wrap_index(start + m, width);
    if (frac == Scalar(0)) {
      out.column(m) = map.column(i0);
    } else {
      const int i1 = wrap_index(start + m + 1, width);
      out.column(m) = (Scalar(1) - frac) * map.column(i0) + frac * map.column(i1);
    }
  }
  return out;
}

template <typename Scalar>
Scalar frobenius_norm(const FeatureMap<Scalar>& map) {
  return map.columns().norm();
}

template <typename Scalar>
Scalar dot(const FeatureMap<Scalar>& a, const FeatureMap<Scalar>& b) {
  require(a.same_shape(b), "feature map shapes differ");
  return a.columns().cwiseProduct(b.columns()).sum();
}

template <typename Scalar>
FeatureMap<Scalar> l2_normalize(const FeatureMap<Scalar>& map) {
  const Scalar norm = frobenius_norm(map);
  if (!(norm > Scalar(0))) throw DegenerateInput("degenerate features: zero norm");
  FeatureMap<Scalar> out = map;
  out.columns() /= norm;
  return out;
}

template <typename Scalar>
FeatureMap<Scalar> scaled(const FeatureMap<Scalar>& map, Scalar factor) {
  FeatureMap<Scalar> out = map;
  out.columns() *= factor;
  return out;
}

}  // namespace cvo
