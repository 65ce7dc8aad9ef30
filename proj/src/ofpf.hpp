#pragma once

// OFPF v1: the per-region feature interchange format.
//
//   "OFPF" | version u32 = 1 | dim u32 | count u32 |
//   count x ( x y w h : u32 x 4 | score f32 | dim x f32 )
//
// Little-endian, no padding. The file carries no image id; callers attach one.

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "descriptors.hpp"
#include "proposals.hpp"

namespace ofp {

inline constexpr std::uint32_t kOfpfVersion = 1;

std::vector<std::uint8_t> write_ofpf(const ProposalSet& set, const FeatureMatrix& feats);
std::pair<ProposalSet, FeatureMatrix> read_ofpf(std::span<const std::uint8_t> bytes);

}  // namespace ofp
