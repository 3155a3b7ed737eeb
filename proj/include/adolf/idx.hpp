#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace adolf::idx {

inline constexpr std::uint32_t kImageMagic = 0x00000803;
inline constexpr std::uint32_t kLabelMagic = 0x00000801;

struct Images {
  std::uint32_t count = 0;
  std::uint32_t rows = 0;
  std::uint32_t cols = 0;
  std::vector<std::uint8_t> pixels;  // count * rows * cols, row-major
};

struct Labels {
  std::uint32_t count = 0;
  std::vector<std::uint8_t> values;
};

Images parse_images(std::span<const std::uint8_t> bytes);
Labels parse_labels(std::span<const std::uint8_t> bytes);

Images read_images(const std::string& path);
Labels read_labels(const std::string& path);

}  // namespace adolf::idx
