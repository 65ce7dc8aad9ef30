#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace ofp {

/// Pixel-aligned box: columns [x, x+w), rows [y, y+h).
struct BoundingBox {
  std::uint32_t x = 0;
  std::uint32_t y = 0;
  std::uint32_t w = 1;
  std::uint32_t h = 1;

  std::uint64_t area() const { return std::uint64_t{w} * h; }
  std::uint32_t right() const { return x + w; }
  std::uint32_t bottom() const { return y + h; }

  friend bool operator==(const BoundingBox&, const BoundingBox&) = default;
  friend auto operator<=>(const BoundingBox&, const BoundingBox&) = default;
};

/// Smallest box containing both.
BoundingBox box_union(const BoundingBox& a, const BoundingBox& b);

/// Interleaved 8-bit RGB, row-major. Always at least 1x1.
class RasterImage {
 public:
  static constexpr std::uint32_t kChannels = 3;

  RasterImage(std::uint32_t width, std::uint32_t height);
  RasterImage(std::uint32_t width, std::uint32_t height, std::vector<std::uint8_t> pixels);

  std::uint32_t width() const { return width_; }
  std::uint32_t height() const { return height_; }
  std::uint64_t area() const { return std::uint64_t{width_} * height_; }
  BoundingBox full_box() const { return {0, 0, width_, height_}; }

  std::span<const std::uint8_t> pixels() const { return pixels_; }
  std::span<std::uint8_t> pixels() { return pixels_; }

  std::uint8_t at(std::uint32_t x, std::uint32_t y, std::uint32_t c) const {
    return pixels_[(std::size_t{y} * width_ + x) * kChannels + c];
  }
  std::uint8_t& at(std::uint32_t x, std::uint32_t y, std::uint32_t c) {
    return pixels_[(std::size_t{y} * width_ + x) * kChannels + c];
  }
  void set(std::uint32_t x, std::uint32_t y, std::uint8_t r, std::uint8_t g, std::uint8_t b) {
    at(x, y, 0) = r;
    at(x, y, 1) = g;
    at(x, y, 2) = b;
  }

  bool contains(const BoundingBox& box) const;

  friend bool operator==(const RasterImage&, const RasterImage&) = default;

 private:
  std::uint32_t width_;
  std::uint32_t height_;
  std::vector<std::uint8_t> pixels_;
};

// Binary P6 only, maxval 255. Comments are allowed between header tokens.
RasterImage decode_ppm(std::span<const std::uint8_t> bytes);
std::vector<std::uint8_t> encode_ppm(const RasterImage& img);

RasterImage crop(const RasterImage& img, const BoundingBox& box);

/// Bilinear resampling with half-pixel centers:
///   src = (dst + 0.5) * src_size / dst_size - 0.5, clamped to the image,
/// each channel rounded half-up to 8 bits.
RasterImage resize_bilinear(const RasterImage& img, std::uint32_t out_w, std::uint32_t out_h);

}  // namespace ofp
