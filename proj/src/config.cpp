#include "cvo/config.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <toml.hpp>

namespace cvo {
namespace {

template <typename T>
T get_or(const toml::table& table, std::string_view key, T fallback, std::string_view source) {
  const toml::node* node = table.get(key);
  if (!node) return fallback;
  if constexpr (std::is_same_v<T, std::string>) {
    if (auto v = node->value<std::string>()) return *v;
  } else if constexpr (std::is_floating_point_v<T>) {
    if (auto v = node->value<double>()) return static_cast<T>(*v);
  } else {
    if (auto v = node->value<std::int64_t>()) return static_cast<T>(*v);
  }
  throw FormatError(std::string(source) + ": wrong type for key '" + std::string(key) + "'");
}

void reject_unknown(const toml::table& table, std::initializer_list<std::string_view> known, std::string_view where) {
  for (const auto& [key, value] : table) {
    bool ok = false;
    for (auto k : known) ok = ok || key.str() == k;
    if (!ok) throw FormatError(std::string(where) + ": unknown key '" + std::string(key.str()) + "'");
  }
}

}  // namespace

FileConfig parse_config(std::string_view toml_text, std::string_view source_name) {
  toml::table root;
  try {
    root = toml::parse(toml_text, source_name);
  } catch (const toml::parse_error& e) {
    std::ostringstream msg;
    msg << e;
    throw FormatError(msg.str());
  }
  reject_unknown(root, {"retrieval", "synthetic"}, source_name);

  FileConfig config;
  if (const toml::table* r = root["retrieval"].as_table()) {
    reject_unknown(*r, {"method", "scale", "fov", "orientation", "pool_size", "seed", "jobs"}, "[retrieval]");
    RetrievalConfig& rc = config.retrieval;
    rc.method = parse_method(get_or<std::string>(*r, "method", std::string(to_string(rc.method)), source_name));
    rc.scale = get_or<int>(*r, "scale", rc.scale, source_name);
    rc.fov = get_or<double>(*r, "fov", rc.fov, source_name);
    rc.orientation = parse_orientation_mode(
        get_or<std::string>(*r, "orientation", std::string(to_string(rc.orientation)), source_name));
    rc.pool_size = get_or<int>(*r, "pool_size", rc.pool_size, source_name);
    config.has_seed = r->contains("seed");
    rc.seed = get_or<std::uint64_t>(*r, "seed", rc.seed, source_name);
    rc.jobs = get_or<int>(*r, "jobs", rc.jobs, source_name);
    rc.validate();
  }
  if (const toml::table* s = root["synthetic"].as_table()) {
    reject_unknown(*s, {"count", "overhead_side", "pano_height", "pano_width", "feature_width", "components"},
                   "[synthetic]");
    SceneDimensions& d = config.scene;
    config.scene_count = get_or<int>(*s, "count", config.scene_count, source_name);
    d.overhead_side = get_or<int>(*s, "overhead_side", d.overhead_side, source_name);
    d.pano_height = get_or<int>(*s, "pano_height", d.pano_height, source_name);
    d.pano_width = get_or<int>(*s, "pano_width", d.pano_width, source_name);
    d.feature_width = get_or<int>(*s, "feature_width", d.feature_width, source_name);
    d.components = get_or<int>(*s, "components", d.components, source_name);
    d.validate();
    require(config.scene_count >= 1, "[synthetic] count must be >= 1");
  }
  return config;
}

FileConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config(text.str(), path.string());
}

std::optional<std::uint64_t> seed_from_environment() {
  const char* value = std::getenv("CVO_SEED");
  if (!value || !*value) return std::nullopt;
  char* end = nullptr;
  const unsigned long long seed = std::strtoull(value, &end, 10);
  if (*end != '\0') throw std::invalid_argument(std::string("CVO_SEED is not an unsigned integer: ") + value);
  return seed;
}

}  // namespace cvo
