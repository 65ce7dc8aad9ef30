#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "compression.hpp"

namespace ofp {

enum class Metric : std::uint32_t { kL2 = 0, kHamming = 1 };

const char* metric_name(Metric m);
Metric parse_metric(std::string_view name);

std::uint32_t hamming_distance(const BinaryCode& a, const BinaryCode& b);

struct Hit {
  std::string image_id;
  double distance = 0;

  friend bool operator==(const Hit&, const Hit&) = default;
};

struct RankedList {
  std::string query_id;
  std::vector<Hit> hits;  // non-decreasing distance

  friend bool operator==(const RankedList&, const RankedList&) = default;
};

/// Exact brute-force store of float vectors (l2) or packed codes (Hamming).
/// `width` is the vector dimension or the bit count.
class RetrievalIndex {
 public:
  RetrievalIndex(Metric metric, std::uint32_t width);

  Metric metric() const { return metric_; }
  std::uint32_t width() const { return width_; }
  std::size_t size() const { return ids_.size(); }
  std::size_t payload_bytes() const;

  const std::string& id(std::size_t i) const { return ids_[i]; }
  std::span<const float> vector(std::size_t i) const;
  BinaryCode code(std::size_t i) const;

  void add(std::string image_id, std::span<const float> vector);
  void add(std::string image_id, const BinaryCode& code);

  /// Exact top-k; ties keep insertion order; k is capped at size().
  RankedList search(std::span<const float> query, std::size_t k, std::string query_id = {}) const;
  RankedList search(const BinaryCode& query, std::size_t k, std::string query_id = {}) const;

  friend bool operator==(const RetrievalIndex&, const RetrievalIndex&) = default;

 private:
  void add_id(std::string image_id);
  RankedList rank(std::vector<double> distances, std::size_t k, std::string query_id) const;

  Metric metric_;
  std::uint32_t width_;
  std::vector<std::string> ids_;
  std::unordered_set<std::string> id_set_;
  std::vector<float> vectors_;        // l2: size() x width
  std::vector<std::uint8_t> codes_;   // hamming: size() x payload_bytes()
};

// OFPI: "OFPI" | 1 | metric u32 | width u32 | count u32 |
//       count x ( id length u32 | UTF-8 id | payload )
std::vector<std::uint8_t> save_index(const RetrievalIndex& index);
RetrievalIndex load_index(std::span<const std::uint8_t> bytes);

// Ranking text: `rank image_id distance` lines. When `with_header` is set,
// each list is preceded by `# query <id>`.
std::string format_rankings(std::span<const RankedList> lists, bool with_header);
/// Headerless content is attributed to `default_query_id`.
std::vector<RankedList> parse_rankings(std::string_view text, const std::string& default_query_id);

}  // namespace ofp
