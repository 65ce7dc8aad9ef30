#include "ofpf.hpp"

#include <cmath>

#include "binio.hpp"
#include "error.hpp"

namespace ofp {

std::vector<std::uint8_t> write_ofpf(const ProposalSet& set, const FeatureMatrix& feats) {
  if (feats.rows() != set.size()) {
    fail(ErrorKind::kArgument, "OFPF: " + std::to_string(feats.rows()) + " feature rows for " +
                                   std::to_string(set.size()) + " proposals");
  }
  binio::Writer w;
  w.magic("OFPF");
  w.u32(kOfpfVersion);
  w.u32(feats.dim());
  w.u32(static_cast<std::uint32_t>(set.size()));
  for (std::size_t i = 0; i < set.size(); ++i) {
    const Proposal& p = set.proposals[i];
    w.u32(p.box.x);
    w.u32(p.box.y);
    w.u32(p.box.w);
    w.u32(p.box.h);
    w.f32(p.score);
    for (float v : feats.row(i)) w.f32(v);
  }
  return std::move(w).take();
}

std::pair<ProposalSet, FeatureMatrix> read_ofpf(std::span<const std::uint8_t> bytes) {
  binio::Reader r(bytes, "OFPF");
  r.expect_magic("OFPF");
  r.expect_version(kOfpfVersion);
  const std::uint32_t dim = r.u32("dim");
  const std::uint32_t count = r.u32("count");
  if (dim == 0 && count != 0) fail(ErrorKind::kFormat, "OFPF: zero dim with non-empty record list at offset 8");
  const std::uint64_t record = 20 + std::uint64_t{dim} * 4;
  const std::uint64_t need = record * count;
  if (r.remaining() != need) {
    fail(ErrorKind::kFormat, "OFPF: payload length mismatch at offset " + std::to_string(r.offset()) +
                                 ": expected " + std::to_string(need) + " bytes for " +
                                 std::to_string(count) + " records of dim " + std::to_string(dim) +
                                 ", got " + std::to_string(r.remaining()));
  }
  ProposalSet set;
  FeatureMatrix feats({}, dim);
  set.proposals.reserve(count);
  std::vector<float> row(dim);
  for (std::uint32_t i = 0; i < count; ++i) {
    Proposal p;
    p.box.x = r.u32("x");
    p.box.y = r.u32("y");
    p.box.w = r.u32("w");
    p.box.h = r.u32("h");
    p.score = r.f32("score");
    for (float& v : row) {
      const std::size_t at = r.offset();
      v = r.f32("feature");
      if (!std::isfinite(v)) {
        fail(ErrorKind::kFormat, "OFPF: non-finite feature value at offset " + std::to_string(at));
      }
    }
    set.proposals.push_back(p);
    feats.append_row(row);
  }
  return {std::move(set), std::move(feats)};
}

}  // namespace ofp
