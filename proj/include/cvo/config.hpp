#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>

#include "cvo/retrieval.hpp"
#include "cvo/synthetic.hpp"

namespace cvo {

/// Contents of a TOML configuration file. Recognised tables:
///
///   [retrieval]  method, scale, fov, orientation, pool_size, seed, jobs
///   [synthetic]  count, overhead_side, pano_height, pano_width, feature_width, components
struct FileConfig {
  RetrievalConfig retrieval;
  SceneDimensions scene;
  int scene_count = 200;
  /// Whether the file set retrieval.seed explicitly.
  bool has_seed = false;
};

FileConfig load_config(const std::filesystem::path& path);
FileConfig parse_config(std::string_view toml_text, std::string_view source_name = "<config>");

/// Seed from CVO_SEED, if set and numeric.
std::optional<std::uint64_t> seed_from_environment();

}  // namespace cvo
