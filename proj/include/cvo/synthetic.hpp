#pragma once

#include <cstdint>
#include <vector>

#include "cvo/image.hpp"
#include "cvo/imaging.hpp"

namespace cvo {

struct SceneDimensions {
  int overhead_side = 512;
  int pano_height = 128;
  int pano_width = 512;
  int feature_width = 64;
  /// Random sinusoids per texture.
  int components = 40;

  void validate() const;
};

/// Cross-view pair with exactly known orientation: the panorama is the polar
/// transform of the overhead texture and the query is that panorama rolled by
/// a random whole number of pixels (full field of view).
struct SyntheticScene {
  int id = 0;
  std::uint64_t seed = 0;
  RasterImage overhead;
  RasterImage panorama;
  ShiftResult query;
};

/// Smooth RGB texture: a sum of random low-frequency plane waves.
RasterImage random_texture(std::uint64_t seed, int side, int components);

/// Scene `index` of the run seeded with `seed`; generate_scenes(seed, n)[i] equals generate_scene(seed, i).
SyntheticScene generate_scene(std::uint64_t seed, int index, const SceneDimensions& dims = {});

std::vector<SyntheticScene> generate_scenes(std::uint64_t seed, int count, const SceneDimensions& dims = {});

/// Independent stream for item `index` of a run seeded with `seed`.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index);

}  // namespace cvo
