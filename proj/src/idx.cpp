#include "adolf/idx.hpp"

#include <fstream>
#include <iterator>

#include "adolf/error.hpp"

namespace adolf::idx {

namespace {

std::uint32_t read_be32(std::span<const std::uint8_t> bytes, std::size_t offset) {
  return (std::uint32_t{bytes[offset]} << 24) |
         (std::uint32_t{bytes[offset + 1]} << 16) |
         (std::uint32_t{bytes[offset + 2]} << 8) |
         std::uint32_t{bytes[offset + 3]};
}

std::vector<std::uint8_t> slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Data, "cannot open IDX file: " + path);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace

Images parse_images(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 16) throw data_error("IDX images: truncated header");
  const std::uint32_t magic = read_be32(bytes, 0);
  if (magic != kImageMagic) {
    throw data_error("IDX images: bad magic number " + std::to_string(magic));
  }
  Images out;
  out.count = read_be32(bytes, 4);
  out.rows = read_be32(bytes, 8);
  out.cols = read_be32(bytes, 12);
  const std::size_t payload =
      std::size_t{out.count} * std::size_t{out.rows} * std::size_t{out.cols};
  if (bytes.size() - 16 < payload) {
    throw data_error("IDX images: truncated payload");
  }
  out.pixels.assign(bytes.begin() + 16, bytes.begin() + 16 + static_cast<std::ptrdiff_t>(payload));
  return out;
}

Labels parse_labels(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 8) throw data_error("IDX labels: truncated header");
  const std::uint32_t magic = read_be32(bytes, 0);
  if (magic != kLabelMagic) {
    throw data_error("IDX labels: bad magic number " + std::to_string(magic));
  }
  Labels out;
  out.count = read_be32(bytes, 4);
  if (bytes.size() - 8 < out.count) throw data_error("IDX labels: truncated payload");
  out.values.assign(bytes.begin() + 8, bytes.begin() + 8 + out.count);
  return out;
}

Images read_images(const std::string& path) {
  const auto bytes = slurp(path);
  return parse_images(bytes);
}

Labels read_labels(const std::string& path) {
  const auto bytes = slurp(path);
  return parse_labels(bytes);
}

}  // namespace adolf::idx
