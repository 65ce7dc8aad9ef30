#pragma once

// Little-endian readers/writers shared by the OFPF, model and index formats.

#include <bit>
#include <cstdint>
#include <cstring>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "error.hpp"

namespace ofp::binio {

class Writer {
 public:
  void bytes(std::span<const std::uint8_t> data) { out_.insert(out_.end(), data.begin(), data.end()); }
  void magic(std::string_view tag) {
    for (char c : tag) out_.push_back(static_cast<std::uint8_t>(c));
  }
  void u32(std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  void u64(std::uint64_t v) {
    for (int i = 0; i < 8; ++i) out_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  void f32(float v) { u32(std::bit_cast<std::uint32_t>(v)); }
  void f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }

  const std::vector<std::uint8_t>& data() const& { return out_; }
  std::vector<std::uint8_t> take() && { return std::move(out_); }

 private:
  std::vector<std::uint8_t> out_;
};

// Bounds-checked cursor. Every failure reports the offset where the read
// started plus the expected and available byte counts.
class Reader {
 public:
  Reader(std::span<const std::uint8_t> data, std::string_view format)
      : data_(data), format_(format) {}

  std::size_t offset() const { return pos_; }
  std::size_t remaining() const { return data_.size() - pos_; }

  void require(std::size_t n, std::string_view what) const {
    if (remaining() < n) {
      fail(ErrorKind::kFormat, std::string(format_) + ": truncated " + std::string(what) +
                                   " at offset " + std::to_string(pos_) + ": expected " +
                                   std::to_string(n) + " bytes, got " +
                                   std::to_string(remaining()));
    }
  }

  void expect_magic(std::string_view tag) {
    require(tag.size(), "magic");
    if (std::memcmp(data_.data() + pos_, tag.data(), tag.size()) != 0) {
      fail(ErrorKind::kFormat, std::string(format_) + ": bad magic at offset " +
                                   std::to_string(pos_) + " (expected \"" + std::string(tag) +
                                   "\")");
    }
    pos_ += tag.size();
  }

  void expect_version(std::uint32_t version) {
    const std::size_t at = pos_;
    const std::uint32_t v = u32("version");
    if (v != version) {
      fail(ErrorKind::kFormat, std::string(format_) + ": unsupported version " +
                                   std::to_string(v) + " at offset " + std::to_string(at) +
                                   " (expected " + std::to_string(version) + ")");
    }
  }

  std::uint32_t u32(std::string_view what) {
    require(4, what);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= std::uint32_t{data_[pos_ + i]} << (8 * i);
    pos_ += 4;
    return v;
  }
  std::uint64_t u64(std::string_view what) {
    require(8, what);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= std::uint64_t{data_[pos_ + i]} << (8 * i);
    pos_ += 8;
    return v;
  }
  float f32(std::string_view what) { return std::bit_cast<float>(u32(what)); }
  double f64(std::string_view what) { return std::bit_cast<double>(u64(what)); }

  std::span<const std::uint8_t> bytes(std::size_t n, std::string_view what) {
    require(n, what);
    auto out = data_.subspan(pos_, n);
    pos_ += n;
    return out;
  }

  void expect_end() const {
    if (remaining() != 0) {
      fail(ErrorKind::kFormat, std::string(format_) + ": " + std::to_string(remaining()) +
                                   " trailing bytes at offset " + std::to_string(pos_));
    }
  }

 private:
  std::span<const std::uint8_t> data_;
  std::string_view format_;
  std::size_t pos_ = 0;
};

}  // namespace ofp::binio
