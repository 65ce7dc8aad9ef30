#include "pooling.hpp"

#include <algorithm>
#include <cmath>

#include "error.hpp"
#include "ofpf.hpp"

namespace ofp {

PooledRepresentation max_pool(const FeatureMatrix& feats) {
  if (feats.rows() == 0) {
    fail(ErrorKind::kEmptyInput, "cannot pool image '" + feats.image_id() + "' with zero regions");
  }
  PooledRepresentation out{feats.image_id(), {feats.row(0).begin(), feats.row(0).end()}, false};
  for (std::size_t i = 1; i < feats.rows(); ++i) {
    const auto row = feats.row(i);
    for (std::size_t j = 0; j < row.size(); ++j) out.vector[j] = std::max(out.vector[j], row[j]);
  }
  return out;
}

PooledRepresentation l2_normalize(PooledRepresentation rep) {
  double sq = 0;
  for (float v : rep.vector) sq += double{v} * v;
  if (sq == 0) {
    rep.normalized = false;
    return rep;
  }
  const double norm = std::sqrt(sq);
  for (float& v : rep.vector) v = static_cast<float>(v / norm);
  rep.normalized = true;
  return rep;
}

std::vector<std::uint8_t> write_representation(const PooledRepresentation& rep,
                                               const BoundingBox& extent) {
  ProposalSet set{rep.image_id, {{extent, rep.normalized ? 1.0f : 0.0f}}};
  FeatureMatrix feats(rep.image_id, static_cast<std::uint32_t>(rep.vector.size()));
  feats.append_row(rep.vector);
  return write_ofpf(set, feats);
}

PooledRepresentation read_representation(std::span<const std::uint8_t> bytes, BoundingBox* extent) {
  auto [set, feats] = read_ofpf(bytes);
  if (set.size() != 1) {
    fail(ErrorKind::kFormat, "representation file must hold exactly one record, found " +
                                 std::to_string(set.size()));
  }
  if (extent != nullptr) *extent = set.proposals[0].box;
  const auto row = feats.row(0);
  return {{}, {row.begin(), row.end()}, set.proposals[0].score == 1.0f};
}

}  // namespace ofp
