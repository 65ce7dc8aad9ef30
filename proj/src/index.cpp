#include "index.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstring>
#include <numeric>

#include "binio.hpp"
#include "error.hpp"

namespace ofp {

const char* metric_name(Metric m) { return m == Metric::kL2 ? "l2" : "hamming"; }

Metric parse_metric(std::string_view name) {
  if (name == "l2") return Metric::kL2;
  if (name == "hamming") return Metric::kHamming;
  fail(ErrorKind::kArgument, "unknown metric '" + std::string(name) + "' (expected l2 or hamming)");
}

namespace {

std::uint32_t popcount_xor(std::span<const std::uint8_t> a, std::span<const std::uint8_t> b) {
  std::uint32_t d = 0;
  std::size_t i = 0;
  for (; i + 8 <= a.size(); i += 8) {
    std::uint64_t x, y;
    std::memcpy(&x, a.data() + i, 8);
    std::memcpy(&y, b.data() + i, 8);
    d += static_cast<std::uint32_t>(std::popcount(x ^ y));
  }
  for (; i < a.size(); ++i) {
    d += static_cast<std::uint32_t>(std::popcount(static_cast<std::uint8_t>(a[i] ^ b[i])));
  }
  return d;
}

}  // namespace

std::uint32_t hamming_distance(const BinaryCode& a, const BinaryCode& b) {
  if (a.bits != b.bits || a.payload.size() != b.payload.size()) {
    fail(ErrorKind::kArgument, "Hamming distance between " + std::to_string(a.bits) + "-bit and " +
                                   std::to_string(b.bits) + "-bit codes");
  }
  return popcount_xor(a.payload, b.payload);
}

RetrievalIndex::RetrievalIndex(Metric metric, std::uint32_t width) : metric_(metric), width_(width) {
  if (width == 0) fail(ErrorKind::kArgument, "index width must be >= 1");
}

std::size_t RetrievalIndex::payload_bytes() const {
  return metric_ == Metric::kL2 ? std::size_t{width_} * 4 : BinaryCode::bytes_for(width_);
}

std::span<const float> RetrievalIndex::vector(std::size_t i) const {
  if (metric_ != Metric::kL2) fail(ErrorKind::kArgument, "index holds binary codes");
  return {vectors_.data() + i * width_, width_};
}

BinaryCode RetrievalIndex::code(std::size_t i) const {
  if (metric_ != Metric::kHamming) fail(ErrorKind::kArgument, "index holds float vectors");
  BinaryCode c(width_);
  std::copy_n(codes_.begin() + static_cast<std::ptrdiff_t>(i * payload_bytes()), payload_bytes(),
              c.payload.begin());
  return c;
}

void RetrievalIndex::add_id(std::string image_id) {
  if (image_id.empty()) fail(ErrorKind::kArgument, "index entries need a non-empty id");
  if (!id_set_.insert(image_id).second) {
    fail(ErrorKind::kArgument, "duplicate index id '" + image_id + "'");
  }
  ids_.push_back(std::move(image_id));
}

void RetrievalIndex::add(std::string image_id, std::span<const float> vector) {
  if (metric_ != Metric::kL2) fail(ErrorKind::kArgument, "Hamming index takes binary codes");
  if (vector.size() != width_) {
    fail(ErrorKind::kArgument, "vector of length " + std::to_string(vector.size()) +
                                   " added to width-" + std::to_string(width_) + " index");
  }
  add_id(std::move(image_id));
  vectors_.insert(vectors_.end(), vector.begin(), vector.end());
}

void RetrievalIndex::add(std::string image_id, const BinaryCode& code) {
  if (metric_ != Metric::kHamming) fail(ErrorKind::kArgument, "l2 index takes float vectors");
  if (code.bits != width_ || code.payload.size() != payload_bytes()) {
    fail(ErrorKind::kArgument, std::to_string(code.bits) + "-bit code added to " +
                                   std::to_string(width_) + "-bit index");
  }
  if (width_ % 8 != 0 && (code.payload.back() & (0xFFu >> (width_ % 8))) != 0) {
    fail(ErrorKind::kArgument, "code has non-zero padding bits");
  }
  add_id(std::move(image_id));
  codes_.insert(codes_.end(), code.payload.begin(), code.payload.end());
}

RankedList RetrievalIndex::rank(std::vector<double> distances, std::size_t k, std::string query_id) const {
  if (k < 1) fail(ErrorKind::kArgument, "k must be >= 1");
  std::vector<std::uint32_t> order(distances.size());
  std::iota(order.begin(), order.end(), 0u);
  const std::size_t take = std::min(k, order.size());
  auto before = [&](std::uint32_t l, std::uint32_t r) {
    return distances[l] < distances[r] || (distances[l] == distances[r] && l < r);
  };
  std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(take), order.end(), before);
  RankedList out{std::move(query_id), {}};
  out.hits.reserve(take);
  for (std::size_t i = 0; i < take; ++i) {
    const double d = distances[order[i]];
    out.hits.push_back({ids_[order[i]], metric_ == Metric::kL2 ? std::sqrt(d) : d});
  }
  return out;
}

RankedList RetrievalIndex::search(std::span<const float> query, std::size_t k, std::string query_id) const {
  if (metric_ != Metric::kL2) fail(ErrorKind::kArgument, "Hamming index queried with a float vector");
  if (query.size() != width_) {
    fail(ErrorKind::kArgument, "query of length " + std::to_string(query.size()) +
                                   " against width-" + std::to_string(width_) + " index");
  }
  // Squared distances rank identically; the root is taken only for reported hits.
  std::vector<double> dist(size());
  for (std::size_t i = 0; i < size(); ++i) {
    const auto v = vector(i);
    double s = 0;
    for (std::uint32_t j = 0; j < width_; ++j) {
      const double diff = double{v[j]} - double{query[j]};
      s += diff * diff;
    }
    dist[i] = s;
  }
  return rank(std::move(dist), k, std::move(query_id));
}

RankedList RetrievalIndex::search(const BinaryCode& query, std::size_t k, std::string query_id) const {
  if (metric_ != Metric::kHamming) fail(ErrorKind::kArgument, "l2 index queried with a binary code");
  if (query.bits != width_ || query.payload.size() != payload_bytes()) {
    fail(ErrorKind::kArgument, std::to_string(query.bits) + "-bit query against " +
                                   std::to_string(width_) + "-bit index");
  }
  std::vector<double> dist(size());
  const std::size_t stride = payload_bytes();
  for (std::size_t i = 0; i < size(); ++i) {
    dist[i] = popcount_xor(std::span(codes_).subspan(i * stride, stride), query.payload);
  }
  return rank(std::move(dist), k, std::move(query_id));
}

std::vector<std::uint8_t> save_index(const RetrievalIndex& index) {
  binio::Writer w;
  w.magic("OFPI");
  w.u32(1);
  w.u32(static_cast<std::uint32_t>(index.metric()));
  w.u32(index.width());
  w.u32(static_cast<std::uint32_t>(index.size()));
  for (std::size_t i = 0; i < index.size(); ++i) {
    const std::string& id = index.id(i);
    w.u32(static_cast<std::uint32_t>(id.size()));
    w.bytes({reinterpret_cast<const std::uint8_t*>(id.data()), id.size()});
    if (index.metric() == Metric::kL2) {
      for (float v : index.vector(i)) w.f32(v);
    } else {
      w.bytes(index.code(i).payload);
    }
  }
  return std::move(w).take();
}

RetrievalIndex load_index(std::span<const std::uint8_t> bytes) {
  binio::Reader r(bytes, "OFPI");
  r.expect_magic("OFPI");
  r.expect_version(1);
  const std::size_t metric_at = r.offset();
  const std::uint32_t tag = r.u32("metric");
  if (tag > 1) {
    fail(ErrorKind::kFormat, "OFPI: unknown metric tag " + std::to_string(tag) + " at offset " +
                                 std::to_string(metric_at));
  }
  const std::size_t width_at = r.offset();
  const std::uint32_t width = r.u32("width");
  if (width == 0) fail(ErrorKind::kFormat, "OFPI: zero width at offset " + std::to_string(width_at));
  const std::uint32_t count = r.u32("count");
  RetrievalIndex index(static_cast<Metric>(tag), width);
  const std::size_t payload = index.payload_bytes();
  std::vector<float> vec(width);
  for (std::uint32_t i = 0; i < count; ++i) {
    const std::uint32_t len = r.u32("id length");
    const auto id = r.bytes(len, "id");
    std::string image_id(id.begin(), id.end());
    const std::size_t at = r.offset();
    r.require(payload, "payload");
    try {
      if (index.metric() == Metric::kL2) {
        for (float& v : vec) v = r.f32("payload");
        index.add(std::move(image_id), vec);
      } else {
        const auto body = r.bytes(payload, "payload");
        BinaryCode code(width);
        std::copy(body.begin(), body.end(), code.payload.begin());
        index.add(std::move(image_id), code);
      }
    } catch (const Error& e) {
      fail(ErrorKind::kFormat, "OFPI: record at offset " + std::to_string(at) + ": " + e.what());
    }
  }
  r.expect_end();
  return index;
}

std::string format_rankings(std::span<const RankedList> lists, bool with_header) {
  std::string out;
  char buf[64];
  for (const RankedList& list : lists) {
    if (with_header) out += "# query " + list.query_id + "\n";
    for (std::size_t i = 0; i < list.hits.size(); ++i) {
      const auto r = std::to_chars(buf, buf + sizeof buf, list.hits[i].distance);
      out += std::to_string(i + 1) + ' ' + list.hits[i].image_id + ' ';
      out.append(buf, r.ptr);
      out += '\n';
    }
  }
  return out;
}

std::vector<RankedList> parse_rankings(std::string_view text, const std::string& default_query_id) {
  std::vector<RankedList> out;
  std::size_t pos = 0;
  std::size_t line_no = 0;
  std::unordered_set<std::string> seen;
  auto bad = [&](const std::string& msg) {
    fail(ErrorKind::kFormat, "rankings: line " + std::to_string(line_no) + ": " + msg);
  };
  while (pos < text.size()) {
    std::size_t eol = text.find('\n', pos);
    if (eol == std::string_view::npos) eol = text.size();
    std::string_view line = text.substr(pos, eol - pos);
    pos = eol + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.find_first_not_of(" \t") == std::string_view::npos) continue;
    if (line.starts_with("# query ")) {
      out.push_back({std::string(line.substr(8)), {}});
      continue;
    }
    if (line.starts_with('#')) continue;
    if (out.empty()) out.push_back({default_query_id, {}});

    const std::size_t s1 = line.find(' ');
    const std::size_t s2 = s1 == std::string_view::npos ? s1 : line.find(' ', s1 + 1);
    if (s2 == std::string_view::npos) bad("expected `rank image_id distance`");
    std::size_t rank = 0;
    double distance = 0;
    const auto rr = std::from_chars(line.data(), line.data() + s1, rank);
    if (rr.ec != std::errc() || rr.ptr != line.data() + s1) bad("bad rank");
    const auto dr = std::from_chars(line.data() + s2 + 1, line.data() + line.size(), distance);
    if (dr.ec != std::errc() || dr.ptr != line.data() + line.size()) bad("bad distance");
    RankedList& list = out.back();
    if (rank != list.hits.size() + 1) bad("ranks must be consecutive from 1");
    if (!(distance >= 0)) bad("distance must be non-negative");
    if (!list.hits.empty() && distance < list.hits.back().distance) bad("distances must be non-decreasing");
    std::string id(line.substr(s1 + 1, s2 - s1 - 1));
    if (list.hits.empty()) seen.clear();
    if (!seen.insert(id).second) bad("duplicate image id '" + id + "'");
    list.hits.push_back({std::move(id), distance});
  }
  return out;
}

}  // namespace ofp
