#include "proposals.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <sstream>
#include <tuple>

#include "error.hpp"

namespace ofp {

namespace {

class DisjointSets {
 public:
  explicit DisjointSets(std::size_t n) : parent_(n), size_(n, 1), rank_(n, 0) {
    std::iota(parent_.begin(), parent_.end(), 0u);
  }

  std::uint32_t find(std::uint32_t x) {
    std::uint32_t root = x;
    while (parent_[root] != root) root = parent_[root];
    while (parent_[x] != root) {
      const std::uint32_t next = parent_[x];
      parent_[x] = root;
      x = next;
    }
    return root;
  }

  std::uint32_t join(std::uint32_t a, std::uint32_t b) {
    if (rank_[a] < rank_[b]) std::swap(a, b);
    parent_[b] = a;
    size_[a] += size_[b];
    if (rank_[a] == rank_[b]) ++rank_[a];
    return a;
  }

  std::uint32_t size(std::uint32_t root) const { return size_[root]; }

 private:
  std::vector<std::uint32_t> parent_;
  std::vector<std::uint32_t> size_;
  std::vector<std::uint8_t> rank_;
};

struct GridEdge {
  std::uint32_t a;
  std::uint32_t b;
  std::uint32_t sq_dist;  // squared RGB distance; exact, so the sort is platform-independent
};

std::uint32_t rgb_sq_dist(const RasterImage& img, std::uint32_t x0, std::uint32_t y0,
                          std::uint32_t x1, std::uint32_t y1) {
  std::uint32_t d = 0;
  for (std::uint32_t c = 0; c < 3; ++c) {
    const int diff = int{img.at(x0, y0, c)} - int{img.at(x1, y1, c)};
    d += static_cast<std::uint32_t>(diff * diff);
  }
  return d;
}

std::vector<GridEdge> grid_edges(const RasterImage& img) {
  const std::uint32_t w = img.width();
  const std::uint32_t h = img.height();
  std::vector<GridEdge> edges;
  edges.reserve(std::size_t{w} * h * 4);
  auto id = [w](std::uint32_t x, std::uint32_t y) { return y * w + x; };
  for (std::uint32_t y = 0; y < h; ++y) {
    for (std::uint32_t x = 0; x < w; ++x) {
      if (x + 1 < w) edges.push_back({id(x, y), id(x + 1, y), rgb_sq_dist(img, x, y, x + 1, y)});
      if (y + 1 < h) edges.push_back({id(x, y), id(x, y + 1), rgb_sq_dist(img, x, y, x, y + 1)});
      if (x + 1 < w && y + 1 < h) {
        edges.push_back({id(x, y), id(x + 1, y + 1), rgb_sq_dist(img, x, y, x + 1, y + 1)});
      }
      if (x + 1 < w && y > 0) {
        edges.push_back({id(x, y), id(x + 1, y - 1), rgb_sq_dist(img, x, y, x + 1, y - 1)});
      }
    }
  }
  // stable_sort keeps generation order among equal weights.
  std::stable_sort(edges.begin(), edges.end(),
                   [](const GridEdge& l, const GridEdge& r) { return l.sq_dist < r.sq_dist; });
  return edges;
}

}  // namespace

SegmentLabelMap felzenszwalb_segment(const RasterImage& img, double k, std::uint32_t min_size) {
  if (!(k > 0) || !std::isfinite(k)) fail(ErrorKind::kArgument, "segmentation k must be > 0");
  if (min_size < 1) fail(ErrorKind::kArgument, "segmentation min_size must be >= 1");

  const std::size_t n = static_cast<std::size_t>(img.area());
  const auto edges = grid_edges(img);
  DisjointSets sets(n);
  std::vector<double> threshold(n, k);

  for (const GridEdge& e : edges) {
    std::uint32_t a = sets.find(e.a);
    std::uint32_t b = sets.find(e.b);
    if (a == b) continue;
    const double w = std::sqrt(static_cast<double>(e.sq_dist));
    if (w <= threshold[a] && w <= threshold[b]) {
      const std::uint32_t root = sets.join(a, b);
      threshold[root] = w + k / sets.size(root);
    }
  }
  for (const GridEdge& e : edges) {
    const std::uint32_t a = sets.find(e.a);
    const std::uint32_t b = sets.find(e.b);
    if (a != b && (sets.size(a) < min_size || sets.size(b) < min_size)) sets.join(a, b);
  }

  SegmentLabelMap out;
  out.width = img.width();
  out.height = img.height();
  out.labels.resize(n);
  std::vector<std::uint32_t> dense(n, UINT32_MAX);
  for (std::size_t p = 0; p < n; ++p) {
    const std::uint32_t root = sets.find(static_cast<std::uint32_t>(p));
    if (dense[root] == UINT32_MAX) dense[root] = out.segment_count++;
    out.labels[p] = dense[root];
  }
  return out;
}

namespace {

struct Hsv {
  double h;  // degrees [0, 360)
  double s;  // [0, 1]
  double v;  // [0, 1]
};

Hsv to_hsv(std::uint8_t r8, std::uint8_t g8, std::uint8_t b8) {
  const int mx = std::max({r8, g8, b8});
  const int mn = std::min({r8, g8, b8});
  const int delta = mx - mn;
  Hsv out{0.0, mx == 0 ? 0.0 : static_cast<double>(delta) / mx, mx / 255.0};
  if (delta == 0) return out;
  double h;
  if (mx == r8) {
    h = 60.0 * (int{g8} - int{b8}) / delta;
  } else if (mx == g8) {
    h = 60.0 * (int{b8} - int{r8}) / delta + 120.0;
  } else {
    h = 60.0 * (int{r8} - int{g8}) / delta + 240.0;
  }
  if (h < 0) h += 360.0;
  out.h = h;
  return out;
}

std::size_t unit_bin(double v, std::size_t bins) {
  return std::min(bins - 1, static_cast<std::size_t>(v * bins));
}

// 45-degree sector of the gradient direction, decided by exact integer
// comparisons; sector k covers [45k, 45(k+1)) degrees. Zero gradients go to 0.
std::size_t orientation_octant(int dx, int dy) {
  if (dx == 0 && dy == 0) return 0;
  if (dy >= 0) {
    if (dx > 0) return dy < dx ? 0 : 1;
    return dy > -dx ? 2 : 3;
  }
  if (dx < 0) return -dy < -dx ? 4 : 5;
  return -dy > dx ? 6 : 7;
}

double intersection(std::span<const double> a, std::span<const double> b) {
  double s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += std::min(a[i], b[i]);
  return s;
}

}  // namespace

std::vector<RegionNode> build_regions(const RasterImage& img, const SegmentLabelMap& segments) {
  const std::uint32_t w = img.width();
  const std::uint32_t h = img.height();
  std::vector<RegionNode> regions(segments.segment_count);
  std::vector<std::array<std::uint32_t, 4>> extent(segments.segment_count,
                                                   {UINT32_MAX, UINT32_MAX, 0, 0});
  constexpr std::size_t kCB = RegionNode::kColorBins;
  constexpr std::size_t kTB = RegionNode::kTextureBins;

  for (std::uint32_t y = 0; y < h; ++y) {
    for (std::uint32_t x = 0; x < w; ++x) {
      RegionNode& r = regions[segments.at(x, y)];
      auto& ext = extent[segments.at(x, y)];
      ext[0] = std::min(ext[0], x);
      ext[1] = std::min(ext[1], y);
      ext[2] = std::max(ext[2], x);
      ext[3] = std::max(ext[3], y);
      ++r.pixel_count;

      const Hsv hsv = to_hsv(img.at(x, y, 0), img.at(x, y, 1), img.at(x, y, 2));
      r.color[unit_bin(hsv.h / 360.0, kCB)] += 1;
      r.color[kCB + unit_bin(hsv.s, kCB)] += 1;
      r.color[2 * kCB + unit_bin(hsv.v, kCB)] += 1;

      const std::uint32_t xl = x == 0 ? 0 : x - 1;
      const std::uint32_t xr = x + 1 < w ? x + 1 : x;
      const std::uint32_t yu = y == 0 ? 0 : y - 1;
      const std::uint32_t yd = y + 1 < h ? y + 1 : y;
      for (std::uint32_t c = 0; c < 3; ++c) {
        const int dx = int{img.at(xr, y, c)} - int{img.at(xl, y, c)};
        const int dy = int{img.at(x, yd, c)} - int{img.at(x, yu, c)};
        r.texture[c * kTB + orientation_octant(dx, dy)] += 1;
      }
    }
  }
  for (std::size_t i = 0; i < regions.size(); ++i) {
    RegionNode& r = regions[i];
    const double norm = 3.0 * static_cast<double>(r.pixel_count);
    for (double& v : r.color) v /= norm;
    for (double& v : r.texture) v /= norm;
    const auto& ext = extent[i];
    r.box = {ext[0], ext[1], ext[2] - ext[0] + 1, ext[3] - ext[1] + 1};
  }
  return regions;
}

RegionNode merge_regions(const RegionNode& a, const RegionNode& b) {
  RegionNode out;
  out.pixel_count = a.pixel_count + b.pixel_count;
  out.box = box_union(a.box, b.box);
  const double wa = static_cast<double>(a.pixel_count) / out.pixel_count;
  const double wb = static_cast<double>(b.pixel_count) / out.pixel_count;
  for (std::size_t i = 0; i < out.color.size(); ++i) out.color[i] = wa * a.color[i] + wb * b.color[i];
  for (std::size_t i = 0; i < out.texture.size(); ++i) {
    out.texture[i] = wa * a.texture[i] + wb * b.texture[i];
  }
  return out;
}

SimilarityTerms similarity_terms(const RegionNode& a, const RegionNode& b, std::uint64_t image_area) {
  if (image_area == 0) fail(ErrorKind::kArgument, "image area must be positive");
  const double area = static_cast<double>(image_area);
  const double sizes = static_cast<double>(a.pixel_count + b.pixel_count);
  const double joint = static_cast<double>(box_union(a.box, b.box).area());
  auto unit = [](double v) { return std::clamp(v, 0.0, 1.0); };
  return {unit(intersection(a.color, b.color)), unit(intersection(a.texture, b.texture)),
          unit(1.0 - sizes / area), unit(1.0 - (joint - sizes) / area)};
}

namespace {

std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 14695981039346656037ull;
  for (char c : s) {
    h ^= static_cast<std::uint8_t>(c);
    h *= 1099511628211ull;
  }
  return h;
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

// Pending merges ordered by descending similarity, then ascending region ids.
struct PairOrder {
  bool operator()(const std::tuple<double, std::uint32_t, std::uint32_t>& l,
                  const std::tuple<double, std::uint32_t, std::uint32_t>& r) const {
    if (std::get<0>(l) != std::get<0>(r)) return std::get<0>(l) > std::get<0>(r);
    return std::tie(std::get<1>(l), std::get<2>(l)) < std::tie(std::get<1>(r), std::get<2>(r));
  }
};

}  // namespace

ProposalSet selective_search(const RasterImage& img, std::string_view image_id,
                             const SelectiveSearchConfig& config, SelectiveSearchTrace* trace) {
  const SegmentLabelMap segments = felzenszwalb_segment(img, config.k, config.min_size);
  std::vector<RegionNode> regions = build_regions(img, segments);
  const std::uint32_t n = segments.segment_count;
  const std::uint64_t image_area = img.area();

  std::vector<std::set<std::uint32_t>> neighbors(n);
  {
    const std::uint32_t w = img.width();
    const std::uint32_t h = img.height();
    auto link = [&](std::uint32_t a, std::uint32_t b) {
      if (a == b) return;
      neighbors[a].insert(b);
      neighbors[b].insert(a);
    };
    for (std::uint32_t y = 0; y < h; ++y) {
      for (std::uint32_t x = 0; x < w; ++x) {
        const std::uint32_t l = segments.at(x, y);
        if (x + 1 < w) link(l, segments.at(x + 1, y));
        if (y + 1 < h) link(l, segments.at(x, y + 1));
        if (x + 1 < w && y + 1 < h) link(l, segments.at(x + 1, y + 1));
        if (x + 1 < w && y > 0) link(l, segments.at(x + 1, y - 1));
      }
    }
  }

  using Entry = std::tuple<double, std::uint32_t, std::uint32_t>;
  std::set<Entry, PairOrder> queue;
  std::map<std::pair<std::uint32_t, std::uint32_t>, double> pair_sim;
  auto push = [&](std::uint32_t a, std::uint32_t b) {
    if (a > b) std::swap(a, b);
    const double s = region_similarity(regions[a], regions[b], image_area);
    pair_sim[{a, b}] = s;
    queue.insert({s, a, b});
  };
  auto drop = [&](std::uint32_t a, std::uint32_t b) {
    if (a > b) std::swap(a, b);
    const auto it = pair_sim.find({a, b});
    if (it == pair_sim.end()) return;
    queue.erase({it->second, a, b});
    pair_sim.erase(it);
  };
  for (std::uint32_t a = 0; a < n; ++a) {
    for (std::uint32_t b : neighbors[a]) {
      if (a < b) push(a, b);
    }
  }

  // creation step per region: 0 for initial segments, t for the t-th merge.
  std::vector<std::uint32_t> step(n, 0);
  std::uint32_t merges = 0;
  while (!queue.empty()) {
    const auto [sim, a, b] = *queue.begin();
    (void)sim;
    const auto t = static_cast<std::uint32_t>(regions.size());
    regions.push_back(merge_regions(regions[a], regions[b]));
    step.push_back(++merges);

    std::set<std::uint32_t> joined;
    for (std::uint32_t m : neighbors[a]) drop(a, m);
    for (std::uint32_t m : neighbors[b]) drop(b, m);
    for (std::uint32_t m : neighbors[a]) {
      if (m != b) joined.insert(m);
    }
    for (std::uint32_t m : neighbors[b]) {
      if (m != a) joined.insert(m);
    }
    for (std::uint32_t m : joined) {
      neighbors[m].erase(a);
      neighbors[m].erase(b);
      neighbors[m].insert(t);
    }
    neighbors[a].clear();
    neighbors[b].clear();
    neighbors.push_back(std::move(joined));
    for (std::uint32_t m : neighbors[t]) push(m, t);
  }

  if (trace != nullptr) {
    trace->initial_segments = n;
    trace->merges = merges;
    trace->regions_before_dedup = static_cast<std::uint32_t>(regions.size());
  }

  struct Candidate {
    BoundingBox box;
    std::uint32_t step;
    std::uint32_t order;
    float score;
  };
  std::vector<Candidate> unique;
  {
    std::set<BoundingBox> seen;
    for (std::size_t i = 0; i < regions.size(); ++i) {
      if (seen.insert(regions[i].box).second) {
        unique.push_back({regions[i].box, step[i], static_cast<std::uint32_t>(i), 0.0f});
      }
    }
  }

  std::mt19937_64 rng(splitmix64(config.seed ^ splitmix64(fnv1a(image_id))));
  const double total_steps = static_cast<double>(merges);
  for (Candidate& c : unique) {
    const double u = static_cast<double>((rng() >> 11) + 1) * 0x1.0p-53;  // (0, 1]
    const double depth = merges == 0 ? 1.0 : c.step / total_steps;
    c.score = static_cast<float>(depth * u);
  }
  std::sort(unique.begin(), unique.end(), [](const Candidate& l, const Candidate& r) {
    if (l.score != r.score) return l.score > r.score;
    if (l.step != r.step) return l.step < r.step;
    return l.order < r.order;
  });

  ProposalSet out;
  out.image_id = std::string(image_id);
  out.proposals.reserve(unique.size());
  for (const Candidate& c : unique) out.proposals.push_back({c.box, c.score});
  return out;
}

double iou(const BoundingBox& a, const BoundingBox& b) {
  const std::int64_t ix = std::int64_t{std::min(a.right(), b.right())} - std::max(a.x, b.x);
  const std::int64_t iy = std::int64_t{std::min(a.bottom(), b.bottom())} - std::max(a.y, b.y);
  if (ix <= 0 || iy <= 0) return 0.0;
  const double inter = static_cast<double>(ix) * static_cast<double>(iy);
  return inter / (static_cast<double>(a.area()) + static_cast<double>(b.area()) - inter);
}

ProposalSet nms_filter(const ProposalSet& set, double iou_threshold, std::uint32_t top_n) {
  if (!(iou_threshold > 0.0 && iou_threshold <= 1.0)) {
    fail(ErrorKind::kArgument, "NMS IoU threshold must lie in (0, 1]");
  }
  if (top_n < 1) fail(ErrorKind::kArgument, "top_n must be >= 1");
  ProposalSet out;
  out.image_id = set.image_id;
  for (const Proposal& p : set.proposals) {
    if (out.proposals.size() >= top_n) break;
    const bool clear = std::all_of(out.proposals.begin(), out.proposals.end(),
                                   [&](const Proposal& k) { return iou(p.box, k.box) <= iou_threshold; });
    if (clear) out.proposals.push_back(p);
  }
  return out;
}

std::string format_proposals(const ProposalSet& set) {
  if (set.image_id.empty() ||
      std::any_of(set.image_id.begin(), set.image_id.end(),
                  [](unsigned char c) { return std::isspace(c) != 0; })) {
    fail(ErrorKind::kArgument, "image id must be non-empty and contain no whitespace");
  }
  std::string out;
  char buf[32];
  for (const Proposal& p : set.proposals) {
    const auto r = std::to_chars(buf, buf + sizeof buf, p.score);
    out += set.image_id;
    out += ' ' + std::to_string(p.box.x) + ' ' + std::to_string(p.box.y) + ' ' +
           std::to_string(p.box.w) + ' ' + std::to_string(p.box.h) + ' ';
    out.append(buf, r.ptr);
    out += '\n';
  }
  return out;
}

namespace {

template <typename T>
T parse_number(std::string_view token, std::size_t line, const char* what) {
  T v{};
  const auto r = std::from_chars(token.data(), token.data() + token.size(), v);
  if (r.ec != std::errc() || r.ptr != token.data() + token.size()) {
    fail(ErrorKind::kFormat, "proposals: line " + std::to_string(line) + ": bad " + what + " '" +
                                 std::string(token) + "'");
  }
  return v;
}

}  // namespace

ProposalSet parse_proposals(std::string_view text) {
  ProposalSet out;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t eol = text.find('\n', pos);
    if (eol == std::string_view::npos) eol = text.size();
    std::string_view line = text.substr(pos, eol - pos);
    pos = eol + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.find_first_not_of(" \t") == std::string_view::npos) continue;

    std::vector<std::string_view> tokens;
    std::size_t t = 0;
    while (t < line.size()) {
      t = line.find_first_not_of(" \t", t);
      if (t == std::string_view::npos) break;
      const std::size_t e = std::min(line.find_first_of(" \t", t), line.size());
      tokens.push_back(line.substr(t, e - t));
      t = e;
    }
    if (tokens.size() != 6) {
      fail(ErrorKind::kFormat, "proposals: line " + std::to_string(line_no) + ": expected 6 fields, got " +
                                   std::to_string(tokens.size()));
    }
    if (out.image_id.empty()) {
      out.image_id = std::string(tokens[0]);
    } else if (tokens[0] != out.image_id) {
      fail(ErrorKind::kFormat, "proposals: line " + std::to_string(line_no) +
                                   ": mixed image ids '" + out.image_id + "' and '" +
                                   std::string(tokens[0]) + "'");
    }
    Proposal p;
    p.box.x = parse_number<std::uint32_t>(tokens[1], line_no, "x");
    p.box.y = parse_number<std::uint32_t>(tokens[2], line_no, "y");
    p.box.w = parse_number<std::uint32_t>(tokens[3], line_no, "w");
    p.box.h = parse_number<std::uint32_t>(tokens[4], line_no, "h");
    p.score = parse_number<float>(tokens[5], line_no, "score");
    if (p.box.w == 0 || p.box.h == 0) {
      fail(ErrorKind::kFormat, "proposals: line " + std::to_string(line_no) + ": empty box");
    }
    if (!(p.score >= 0.0f && p.score <= 1.0f)) {
      fail(ErrorKind::kFormat, "proposals: line " + std::to_string(line_no) + ": score outside [0,1]");
    }
    if (!out.proposals.empty() && p.score > out.proposals.back().score) {
      fail(ErrorKind::kFormat, "proposals: line " + std::to_string(line_no) +
                                   ": scores must be non-increasing");
    }
    out.proposals.push_back(p);
  }
  return out;
}

BoundingBox proposals_extent(const ProposalSet& set) {
  if (set.proposals.empty()) fail(ErrorKind::kEmptyInput, "extent of an empty proposal set");
  BoundingBox out = set.proposals.front().box;
  for (const Proposal& p : set.proposals) out = box_union(out, p.box);
  return out;
}

}  // namespace ofp
