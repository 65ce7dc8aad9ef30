#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "proposals.hpp"
#include "raster.hpp"

namespace ofp {

/// N x dim row-major float32 matrix; row i describes proposal i.
class FeatureMatrix {
 public:
  FeatureMatrix() = default;
  FeatureMatrix(std::string image_id, std::uint32_t dim) : image_id_(std::move(image_id)), dim_(dim) {}

  const std::string& image_id() const { return image_id_; }
  void set_image_id(std::string id) { image_id_ = std::move(id); }
  std::uint32_t dim() const { return dim_; }
  std::size_t rows() const { return dim_ == 0 ? 0 : values_.size() / dim_; }

  std::span<const float> row(std::size_t i) const { return {values_.data() + i * dim_, dim_}; }
  std::span<float> row(std::size_t i) { return {values_.data() + i * dim_, dim_}; }
  std::span<const float> values() const { return values_; }

  void append_row(std::span<const float> row);

  friend bool operator==(const FeatureMatrix&, const FeatureMatrix&) = default;

 private:
  std::string image_id_;
  std::uint32_t dim_ = 0;
  std::vector<float> values_;
};

inline constexpr std::uint32_t kBuiltinDescriptorDim = 128;
inline constexpr std::uint32_t kBuiltinDescriptorSide = 32;
inline constexpr std::uint32_t kBuiltinHistogramBins = 32;

/// Crop resized to 32x32, then four l1-normalized 32-bin blocks:
/// R, G, B intensity histograms and a luma gradient-orientation histogram
/// weighted by magnitude. A block with zero mass stays all-zero.
std::vector<float> builtin_descriptor(const RasterImage& region_crop);

enum class DescriptorKind { kBuiltin, kExternal };

struct DescriptorSource {
  DescriptorKind kind = DescriptorKind::kBuiltin;
  // Required for kExternal: rows aligned with the proposal set's boxes.
  std::optional<ProposalSet> external_proposals;
  std::optional<FeatureMatrix> external_features;
  bool normalize_rows = false;
};

FeatureMatrix describe_regions(const RasterImage& img, const ProposalSet& set,
                               const DescriptorSource& source);

/// In-place l2 normalization of each row; zero rows are left untouched.
void l2_normalize_rows(FeatureMatrix& feats);

}  // namespace ofp
