#pragma once

#include <Eigen/Core>
#include <filesystem>

namespace cvo {

/// Row-major H x W x C image with samples in [0, 1].
class RasterImage {
 public:
  RasterImage() = default;
  RasterImage(int height, int width, int channels);

  int height() const { return height_; }
  int width() const { return width_; }
  int channels() const { return channels_; }
  bool empty() const { return samples_.size() == 0; }

  double& at(int y, int x, int c) { return samples_[index(y, x, c)]; }
  double at(int y, int x, int c) const { return samples_[index(y, x, c)]; }

  Eigen::ArrayXd& samples() { return samples_; }
  const Eigen::ArrayXd& samples() const { return samples_; }

  /// Bilinear sample at continuous (x, y); coordinates are clamped to the image.
  double sample_bilinear(double x, double y, int c) const;

  /// Columns [first, first + count), with indices taken modulo width.
  RasterImage columns(int first, int count) const;

  friend bool operator==(const RasterImage& a, const RasterImage& b) {
    return a.height_ == b.height_ && a.width_ == b.width_ && a.channels_ == b.channels_ &&
           (a.samples_ == b.samples_).all();
  }

 private:
  Eigen::Index index(int y, int x, int c) const {
    return (static_cast<Eigen::Index>(y) * width_ + x) * channels_ + c;
  }

  int height_ = 0;
  int width_ = 0;
  int channels_ = 0;
  Eigen::ArrayXd samples_;
};

/// 8-bit grey or RGB PNG. Grey+alpha and RGBA drop the alpha channel.
RasterImage read_png(const std::filesystem::path& path);
void write_png(const RasterImage& image, const std::filesystem::path& path);

}  // namespace cvo
