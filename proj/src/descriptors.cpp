#include "descriptors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "error.hpp"

namespace ofp {

void FeatureMatrix::append_row(std::span<const float> row) {
  if (row.size() != dim_) {
    fail(ErrorKind::kArgument, "feature row has length " + std::to_string(row.size()) +
                                   ", matrix dim is " + std::to_string(dim_));
  }
  for (float v : row) {
    if (!std::isfinite(v)) fail(ErrorKind::kArgument, "feature values must be finite");
  }
  values_.insert(values_.end(), row.begin(), row.end());
}

namespace {

void normalize_block(std::span<double> block) {
  double sum = 0;
  for (double v : block) sum += v;
  if (sum <= 0) return;
  for (double& v : block) v /= sum;
}

}  // namespace

std::vector<float> builtin_descriptor(const RasterImage& region_crop) {
  constexpr std::uint32_t kSide = kBuiltinDescriptorSide;
  constexpr std::uint32_t kBins = kBuiltinHistogramBins;
  const RasterImage img = resize_bilinear(region_crop, kSide, kSide);

  std::vector<double> hist(kBuiltinDescriptorDim, 0.0);
  std::vector<double> luma(std::size_t{kSide} * kSide);
  for (std::uint32_t y = 0; y < kSide; ++y) {
    for (std::uint32_t x = 0; x < kSide; ++x) {
      for (std::uint32_t c = 0; c < 3; ++c) hist[c * kBins + img.at(x, y, c) * kBins / 256] += 1;
      luma[std::size_t{y} * kSide + x] =
          0.299 * img.at(x, y, 0) + 0.587 * img.at(x, y, 1) + 0.114 * img.at(x, y, 2);
    }
  }

  auto L = [&](std::uint32_t x, std::uint32_t y) { return luma[std::size_t{y} * kSide + x]; };
  double* grad = hist.data() + 3 * kBins;
  for (std::uint32_t y = 0; y < kSide; ++y) {
    for (std::uint32_t x = 0; x < kSide; ++x) {
      const double dx = L(std::min(x + 1, kSide - 1), y) - L(x == 0 ? 0 : x - 1, y);
      const double dy = L(x, std::min(y + 1, kSide - 1)) - L(x, y == 0 ? 0 : y - 1);
      const double mag = std::hypot(dx, dy);
      if (mag == 0) continue;
      double angle = std::atan2(dy, dx);
      if (angle < 0) angle += 2 * std::numbers::pi;
      const auto bin = std::min<std::size_t>(kBins - 1, static_cast<std::size_t>(angle / (2 * std::numbers::pi) * kBins));
      grad[bin] += mag;
    }
  }

  for (std::uint32_t block = 0; block < 4; ++block) {
    normalize_block(std::span<double>(hist).subspan(block * kBins, kBins));
  }
  return {hist.begin(), hist.end()};
}

void l2_normalize_rows(FeatureMatrix& feats) {
  for (std::size_t i = 0; i < feats.rows(); ++i) {
    auto row = feats.row(i);
    double sq = 0;
    for (float v : row) sq += double{v} * v;
    if (sq == 0) continue;
    const double norm = std::sqrt(sq);
    for (float& v : row) v = static_cast<float>(v / norm);
  }
}

FeatureMatrix describe_regions(const RasterImage& img, const ProposalSet& set,
                               const DescriptorSource& source) {
  FeatureMatrix out;
  if (source.kind == DescriptorKind::kBuiltin) {
    out = FeatureMatrix(set.image_id, kBuiltinDescriptorDim);
    for (const Proposal& p : set.proposals) out.append_row(builtin_descriptor(crop(img, p.box)));
  } else {
    if (!source.external_features || !source.external_proposals) {
      fail(ErrorKind::kConfig, "external descriptor selected without a feature file");
    }
    const ProposalSet& ext = *source.external_proposals;
    if (ext.size() != set.size()) {
      fail(ErrorKind::kConfig, "external feature file has " + std::to_string(ext.size()) +
                                   " records, proposal set has " + std::to_string(set.size()));
    }
    for (std::size_t i = 0; i < set.size(); ++i) {
      if (!img.contains(set.proposals[i].box)) {
        fail(ErrorKind::kBounds, "proposal " + std::to_string(i) + " lies outside the image");
      }
      if (ext.proposals[i].box != set.proposals[i].box) {
        fail(ErrorKind::kConfig, "external feature record " + std::to_string(i) +
                                     " does not match proposal box");
      }
    }
    out = *source.external_features;
    out.set_image_id(set.image_id);
  }
  if (source.normalize_rows) l2_normalize_rows(out);
  return out;
}

}  // namespace ofp
