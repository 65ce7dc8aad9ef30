#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "raster.hpp"

namespace ofp {

struct SegmentLabelMap {
  std::uint32_t width = 0;
  std::uint32_t height = 0;
  std::vector<std::uint32_t> labels;  // row-major, dense ids in [0, segment_count)
  std::uint32_t segment_count = 0;

  std::uint32_t at(std::uint32_t x, std::uint32_t y) const { return labels[std::size_t{y} * width + x]; }
};

/// Graph-based segmentation on the 8-connected grid (edge weight = RGB
/// Euclidean distance, threshold k/|C|), followed by absorbing components
/// smaller than `min_size` along their cheapest boundary edge.
/// Labels are numbered in raster order of first appearance.
SegmentLabelMap felzenszwalb_segment(const RasterImage& img, double k, std::uint32_t min_size);

struct RegionNode {
  static constexpr std::size_t kColorBins = 25;    // per HSV channel
  static constexpr std::size_t kTextureBins = 8;   // orientations per RGB channel

  std::uint64_t pixel_count = 0;
  BoundingBox box;
  std::array<double, 3 * kColorBins> color{};      // l1-normalized
  std::array<double, 3 * kTextureBins> texture{};  // l1-normalized
};

/// Pixel-count weighted combination of two regions.
RegionNode merge_regions(const RegionNode& a, const RegionNode& b);

struct SimilarityTerms {
  double color = 0;
  double texture = 0;
  double size = 0;
  double fill = 0;
  double total() const { return color + texture + size + fill; }
};

SimilarityTerms similarity_terms(const RegionNode& a, const RegionNode& b, std::uint64_t image_area);
inline double region_similarity(const RegionNode& a, const RegionNode& b, std::uint64_t image_area) {
  return similarity_terms(a, b, image_area).total();
}

/// Builds one RegionNode per segment from the image pixels.
std::vector<RegionNode> build_regions(const RasterImage& img, const SegmentLabelMap& segments);

struct Proposal {
  BoundingBox box;
  float score = 0;  // in [0,1]

  friend bool operator==(const Proposal&, const Proposal&) = default;
};

struct ProposalSet {
  std::string image_id;
  std::vector<Proposal> proposals;

  std::size_t size() const { return proposals.size(); }
  friend bool operator==(const ProposalSet&, const ProposalSet&) = default;
};

struct SelectiveSearchConfig {
  double k = 100.0;
  std::uint32_t min_size = 50;
  std::uint64_t seed = 0;
};

struct SelectiveSearchTrace {
  std::uint32_t initial_segments = 0;
  std::uint32_t merges = 0;
  std::uint32_t regions_before_dedup = 0;
};

/// Hierarchical grouping over the graph-based over-segmentation. Emits the
/// box of every region created (deduplicated), scored by
/// (creation step / total steps) * u with u seeded from (seed, image_id).
ProposalSet selective_search(const RasterImage& img, std::string_view image_id,
                             const SelectiveSearchConfig& config,
                             SelectiveSearchTrace* trace = nullptr);

double iou(const BoundingBox& a, const BoundingBox& b);

/// Greedy suppression in the set's (descending score) order: a proposal is
/// kept iff its IoU with every kept proposal is <= iou_threshold. Stops once
/// `top_n` proposals are kept.
ProposalSet nms_filter(const ProposalSet& set, double iou_threshold, std::uint32_t top_n);

// Text format: `image_id x y w h score` per line, score in shortest round-trip form.
std::string format_proposals(const ProposalSet& set);
ProposalSet parse_proposals(std::string_view text);

/// Smallest box covering every proposal.
BoundingBox proposals_extent(const ProposalSet& set);

}  // namespace ofp
