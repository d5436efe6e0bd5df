#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <vector>

#include "cvo/features.hpp"

namespace cvo {
namespace {

constexpr std::array<char, 5> kMagic{'F', 'M', 'A', 'P', '1'};

void put_u32(std::vector<unsigned char>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<unsigned char>(v >> (8 * i)));
}

std::uint32_t get_u32(const unsigned char* p) {
  return std::uint32_t{p[0]} | std::uint32_t{p[1]} << 8 | std::uint32_t{p[2]} << 16 | std::uint32_t{p[3]} << 24;
}

}  // namespace

void write_fmap(const FeatureMapf& map, const std::filesystem::path& path) {
  std::vector<unsigned char> bytes(kMagic.begin(), kMagic.end());
  put_u32(bytes, static_cast<std::uint32_t>(map.height()));
  put_u32(bytes, static_cast<std::uint32_t>(map.width()));
  put_u32(bytes, static_cast<std::uint32_t>(map.channels()));
  for (int h = 0; h < map.height(); ++h)
    for (int w = 0; w < map.width(); ++w)
      for (int c = 0; c < map.channels(); ++c) put_u32(bytes, std::bit_cast<std::uint32_t>(map.at(h, w, c)));

  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw std::runtime_error("failed writing " + path.string());
}

FeatureMapf read_fmap(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  const std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());

  constexpr std::size_t header = kMagic.size() + 12;
  if (bytes.size() < header || std::memcmp(bytes.data(), kMagic.data(), kMagic.size()) != 0)
    throw FormatError(path.string() + ": bad FMAP1 magic");
  const std::uint32_t h = get_u32(bytes.data() + 5);
  const std::uint32_t w = get_u32(bytes.data() + 9);
  const std::uint32_t c = get_u32(bytes.data() + 13);
  if (h == 0 || w < 2 || c == 0 || h > (1u << 16) || w > (1u << 20) || c > (1u << 16))
    throw FormatError(path.string() + ": invalid FMAP1 dimensions");
  const std::uint64_t count = std::uint64_t{h} * w * c;
  if (bytes.size() != header + count * 4)
    throw FormatError(path.string() + (bytes.size() < header + count * 4 ? ": truncated FMAP1 payload"
                                                                         : ": trailing bytes after FMAP1 payload"));

  FeatureMapf map(static_cast<int>(h), static_cast<int>(w), static_cast<int>(c));
  const unsigned char* p = bytes.data() + header;
  for (int hh = 0; hh < map.height(); ++hh)
    for (int ww = 0; ww < map.width(); ++ww)
      for (int cc = 0; cc < map.channels(); ++cc, p += 4) map.at(hh, ww, cc) = std::bit_cast<float>(get_u32(p));
  if (!map.all_finite()) throw FormatError(path.string() + ": non-finite FMAP1 values");
  return map;
}

}  // namespace cvo
