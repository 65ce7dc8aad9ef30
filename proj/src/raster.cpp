#include "raster.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <string>

#include "error.hpp"

namespace ofp {

BoundingBox box_union(const BoundingBox& a, const BoundingBox& b) {
  const std::uint32_t x0 = std::min(a.x, b.x);
  const std::uint32_t y0 = std::min(a.y, b.y);
  const std::uint32_t x1 = std::max(a.right(), b.right());
  const std::uint32_t y1 = std::max(a.bottom(), b.bottom());
  return {x0, y0, x1 - x0, y1 - y0};
}

RasterImage::RasterImage(std::uint32_t width, std::uint32_t height)
    : RasterImage(width, height,
                  std::vector<std::uint8_t>(std::size_t{width} * height * kChannels, 0)) {}

RasterImage::RasterImage(std::uint32_t width, std::uint32_t height,
                         std::vector<std::uint8_t> pixels)
    : width_(width), height_(height), pixels_(std::move(pixels)) {
  if (width_ == 0 || height_ == 0) {
    fail(ErrorKind::kArgument, "image dimensions must be at least 1x1");
  }
  if (pixels_.size() != std::size_t{width_} * height_ * kChannels) {
    fail(ErrorKind::kArgument, "pixel buffer has " + std::to_string(pixels_.size()) +
                                   " bytes, expected " +
                                   std::to_string(std::size_t{width_} * height_ * kChannels));
  }
}

bool RasterImage::contains(const BoundingBox& box) const {
  return box.w >= 1 && box.h >= 1 && std::uint64_t{box.x} + box.w <= width_ &&
         std::uint64_t{box.y} + box.h <= height_;
}

namespace {

class PpmHeaderParser {
 public:
  explicit PpmHeaderParser(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

  void expect_magic() {
    if (bytes_.size() < 2 || bytes_[0] != 'P' || bytes_[1] != '6') {
      error(0, "missing P6 magic");
    }
    pos_ = 2;
  }

  std::uint64_t next_uint(const char* what) {
    skip_whitespace_and_comments();
    const std::size_t start = pos_;
    if (pos_ >= bytes_.size()) error(pos_, std::string("unexpected end of header reading ") + what);
    if (!std::isdigit(bytes_[pos_])) error(pos_, std::string("expected digits for ") + what);
    std::uint64_t v = 0;
    while (pos_ < bytes_.size() && std::isdigit(bytes_[pos_])) {
      v = v * 10 + (bytes_[pos_] - '0');
      if (v > 0xFFFFFFFFull) error(start, std::string(what) + " out of range");
      ++pos_;
    }
    return v;
  }

  // Exactly one whitespace byte separates maxval from the raster.
  std::size_t end_of_header() {
    if (pos_ >= bytes_.size() || !std::isspace(bytes_[pos_])) {
      error(pos_, "expected single whitespace after maxval");
    }
    return pos_ + 1;
  }

  std::size_t pos() const { return pos_; }

  [[noreturn]] static void error(std::size_t offset, const std::string& msg) {
    fail(ErrorKind::kDecode, "ppm: " + msg + " at byte offset " + std::to_string(offset));
  }

 private:
  void skip_whitespace_and_comments() {
    while (pos_ < bytes_.size()) {
      if (std::isspace(bytes_[pos_])) {
        ++pos_;
      } else if (bytes_[pos_] == '#') {
        while (pos_ < bytes_.size() && bytes_[pos_] != '\n' && bytes_[pos_] != '\r') ++pos_;
      } else {
        break;
      }
    }
  }

  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
};

}  // namespace

RasterImage decode_ppm(std::span<const std::uint8_t> bytes) {
  PpmHeaderParser p(bytes);
  p.expect_magic();
  const std::size_t width_at = p.pos();
  const auto width = p.next_uint("width");
  const std::size_t height_at = p.pos();
  const auto height = p.next_uint("height");
  const std::size_t maxval_at = p.pos();
  const auto maxval = p.next_uint("maxval");
  if (width == 0) PpmHeaderParser::error(width_at, "zero width");
  if (height == 0) PpmHeaderParser::error(height_at, "zero height");
  if (maxval != 255) {
    PpmHeaderParser::error(maxval_at, "maxval " + std::to_string(maxval) + " unsupported (need 255)");
  }
  const std::size_t start = p.end_of_header();
  const std::uint64_t need = width * height * RasterImage::kChannels;
  const std::uint64_t have = bytes.size() - start;
  if (have < need) {
    PpmHeaderParser::error(start, "truncated pixel payload: expected " + std::to_string(need) +
                                      " bytes, got " + std::to_string(have));
  }
  std::vector<std::uint8_t> pixels(bytes.begin() + static_cast<std::ptrdiff_t>(start),
                                   bytes.begin() + static_cast<std::ptrdiff_t>(start + need));
  return RasterImage(static_cast<std::uint32_t>(width), static_cast<std::uint32_t>(height),
                     std::move(pixels));
}

std::vector<std::uint8_t> encode_ppm(const RasterImage& img) {
  const std::string header =
      "P6\n" + std::to_string(img.width()) + " " + std::to_string(img.height()) + "\n255\n";
  std::vector<std::uint8_t> out(header.begin(), header.end());
  out.insert(out.end(), img.pixels().begin(), img.pixels().end());
  return out;
}

RasterImage crop(const RasterImage& img, const BoundingBox& box) {
  if (!img.contains(box)) {
    fail(ErrorKind::kBounds, "box (" + std::to_string(box.x) + "," + std::to_string(box.y) + "," +
                                 std::to_string(box.w) + "," + std::to_string(box.h) +
                                 ") exceeds " + std::to_string(img.width()) + "x" +
                                 std::to_string(img.height()) + " image");
  }
  RasterImage out(box.w, box.h);
  const std::size_t row_bytes = std::size_t{box.w} * RasterImage::kChannels;
  for (std::uint32_t j = 0; j < box.h; ++j) {
    const auto src = img.pixels().subspan(
        (std::size_t{box.y + j} * img.width() + box.x) * RasterImage::kChannels, row_bytes);
    std::copy(src.begin(), src.end(),
              out.pixels().begin() + static_cast<std::ptrdiff_t>(std::size_t{j} * row_bytes));
  }
  return out;
}

namespace {

struct Tap {
  std::uint32_t i0;
  std::uint32_t i1;
  double frac;
};

std::vector<Tap> bilinear_taps(std::uint32_t src, std::uint32_t dst) {
  std::vector<Tap> taps(dst);
  for (std::uint32_t d = 0; d < dst; ++d) {
    double s = ((d + 0.5) * src) / dst - 0.5;
    s = std::clamp(s, 0.0, static_cast<double>(src - 1));
    const auto i0 = static_cast<std::uint32_t>(std::floor(s));
    taps[d] = {i0, std::min(i0 + 1, src - 1), s - i0};
  }
  return taps;
}

}  // namespace

RasterImage resize_bilinear(const RasterImage& img, std::uint32_t out_w, std::uint32_t out_h) {
  if (out_w == 0 || out_h == 0) {
    fail(ErrorKind::kArgument, "resize target must be at least 1x1");
  }
  if (out_w == img.width() && out_h == img.height()) return img;

  const auto xs = bilinear_taps(img.width(), out_w);
  const auto ys = bilinear_taps(img.height(), out_h);
  RasterImage out(out_w, out_h);
  for (std::uint32_t j = 0; j < out_h; ++j) {
    const Tap& ty = ys[j];
    for (std::uint32_t i = 0; i < out_w; ++i) {
      const Tap& tx = xs[i];
      for (std::uint32_t c = 0; c < RasterImage::kChannels; ++c) {
        const double top = img.at(tx.i0, ty.i0, c) * (1.0 - tx.frac) + img.at(tx.i1, ty.i0, c) * tx.frac;
        const double bot = img.at(tx.i0, ty.i1, c) * (1.0 - tx.frac) + img.at(tx.i1, ty.i1, c) * tx.frac;
        const double v = top * (1.0 - ty.frac) + bot * ty.frac;
        out.at(i, j, c) = static_cast<std::uint8_t>(std::clamp(std::floor(v + 0.5), 0.0, 255.0));
      }
    }
  }
  return out;
}

}  // namespace ofp
