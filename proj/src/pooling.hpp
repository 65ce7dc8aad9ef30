#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "descriptors.hpp"
#include "raster.hpp"

namespace ofp {

struct PooledRepresentation {
  std::string image_id;
  std::vector<float> vector;
  bool normalized = false;

  friend bool operator==(const PooledRepresentation&, const PooledRepresentation&) = default;
};

/// Component-wise maximum over all rows. Throws kEmptyInput on zero rows.
PooledRepresentation max_pool(const FeatureMatrix& feats);

/// Divides by the l2 norm. An all-zero vector comes back unchanged with
/// `normalized == false`.
PooledRepresentation l2_normalize(PooledRepresentation rep);

// A representation is stored as a single-record OFPF file. The record's box
// is the image extent; its score field is 1 when the vector is normalized.
std::vector<std::uint8_t> write_representation(const PooledRepresentation& rep,
                                               const BoundingBox& extent);
PooledRepresentation read_representation(std::span<const std::uint8_t> bytes,
                                         BoundingBox* extent = nullptr);

}  // namespace ofp
