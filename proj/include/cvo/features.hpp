#pragma once

#include <filesystem>

#include "cvo/feature_map.hpp"
#include "cvo/image.hpp"

namespace cvo {

/// Geometry of the hand-crafted extractor.
struct ExtractorLayout {
  static constexpr int kHeight = 4;
  static constexpr int kStride = 8;
  static constexpr int kChannels = 16;
  static constexpr int kOrientationBins = 8;
};

/// Deterministic stand-in for a learned extractor with the same output
/// contract: [4, W/8, 16], one feature column per 8 image columns, circular
/// along width, so shifting the image by 8k pixels rolls the map by k bins.
///
/// Per (H/4) x 8 cell:
///   0-2   per-channel mean (grey input is replicated)
///   3-10  magnitude-weighted gradient orientation histogram, soft-binned
///   11,12 mean |d/dx| and |d/dy| of luminance
///   13    local contrast (luminance standard deviation)
///   14    top-half minus bottom-half luminance
///   15    left-half minus right-half luminance
/// Requires height % 32 == 0, width % 8 == 0, width >= 16 and 1 or 3 channels.
FeatureMapd extract_features(const RasterImage& image);

/// FMAP1: "FMAP1", u32le H, W, C, then H*W*C float32le in (h, w, c) order.
void write_fmap(const FeatureMapf& map, const std::filesystem::path& path);
FeatureMapf read_fmap(const std::filesystem::path& path);

}  // namespace cvo
