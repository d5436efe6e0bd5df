#include "cvo/synthetic.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <random>

namespace cvo {

void SceneDimensions::validate() const {
  require(overhead_side >= 2, "overhead side must be at least 2 pixels");
  require(pano_height >= 32 && pano_height % 32 == 0, "panorama height must be a positive multiple of 32");
  require(pano_width >= 16 && pano_width % 8 == 0, "panorama width must be a multiple of 8 (>= 16)");
  require(feature_width >= 1, "feature width must be positive");
  require(components >= 1, "texture needs at least one component");
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) {
  // splitmix64 finaliser
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

RasterImage random_texture(std::uint64_t seed, int side, int components) {
  require(side >= 1 && components >= 1, "invalid texture parameters");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> cycles(0.5, 3.0);
  std::uniform_real_distribution<double> angle(0.0, 2.0 * M_PI);
  std::normal_distribution<double> normal(0.0, 1.0);

  // sin(kx x + phi + ky y) = sin(kx x + phi) cos(ky y) + cos(kx x + phi) sin(ky y)
  Eigen::MatrixXd sin_x(side, components), cos_x(side, components);
  Eigen::MatrixXd sin_y(side, components), cos_y(side, components);
  Eigen::MatrixXd amplitude(3, components);
  for (int k = 0; k < components; ++k) {
    const double f = cycles(rng) * 2.0 * M_PI / side;
    const double direction = angle(rng);
    const double kx = f * std::cos(direction);
    const double ky = f * std::sin(direction);
    const double phase = angle(rng);
    for (int i = 0; i < side; ++i) {
      sin_x(i, k) = std::sin(kx * i + phase);
      cos_x(i, k) = std::cos(kx * i + phase);
      sin_y(i, k) = std::sin(ky * i);
      cos_y(i, k) = std::cos(ky * i);
    }
    for (int c = 0; c < 3; ++c) amplitude(c, k) = normal(rng);
  }

  RasterImage image(side, side, 3);
  for (int c = 0; c < 3; ++c) {
    const Eigen::RowVectorXd a = amplitude.row(c);
    // rms of the sum is sqrt(sum a^2 / 2); map +-2.5 rms onto [0, 1]
    const double gain = 0.5 / (2.5 * std::sqrt(a.squaredNorm() / 2.0));
    const Eigen::MatrixXd field = (cos_y * a.asDiagonal()) * sin_x.transpose() + (sin_y * a.asDiagonal()) * cos_x.transpose();
    for (int y = 0; y < side; ++y)
      for (int x = 0; x < side; ++x) image.at(y, x, c) = std::clamp(0.5 + gain * field(y, x), 0.0, 1.0);
  }
  return image;
}

SyntheticScene generate_scene(std::uint64_t seed, int index, const SceneDimensions& dims) {
  require(index >= 0, "scene index must be non-negative");
  dims.validate();
  SyntheticScene scene;
  scene.id = index;
  scene.seed = derive_seed(seed, static_cast<std::uint64_t>(index));
  scene.overhead = random_texture(scene.seed, dims.overhead_side, dims.components);
  scene.panorama = polar_transform(scene.overhead, dims.pano_height, dims.pano_width);
  scene.query = random_shift(scene.panorama, derive_seed(scene.seed, 0), 360.0, dims.feature_width);
  return scene;
}

std::vector<SyntheticScene> generate_scenes(std::uint64_t seed, int count, const SceneDimensions& dims) {
  require(count >= 1, "scene count must be positive");
  dims.validate();
  std::vector<SyntheticScene> scenes;
  scenes.reserve(count);
  for (int i = 0; i < count; ++i) scenes.push_back(generate_scene(seed, i, dims));
  return scenes;
}

}  // namespace cvo
