#include "eval.hpp"

#include <charconv>
#include <cstdio>

#include "error.hpp"

namespace ofp {

GroundTruth parse_ground_truth(std::string_view text) {
  GroundTruth gt;
  std::size_t pos = 0;
  std::size_t line_no = 0;
  while (pos < text.size()) {
    std::size_t eol = text.find('\n', pos);
    if (eol == std::string_view::npos) eol = text.size();
    std::string_view line = text.substr(pos, eol - pos);
    pos = eol + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty() || line.starts_with('#')) continue;
    const std::size_t tab = line.find('\t');
    if (tab == std::string_view::npos || tab == 0) {
      fail(ErrorKind::kFormat, "ground truth: line " + std::to_string(line_no) +
                                   ": expected query_id<TAB>relevant ids");
    }
    std::set<std::string>& relevant = gt[std::string(line.substr(0, tab))];
    std::string_view rest = line.substr(tab + 1);
    while (!rest.empty()) {
      const std::size_t comma = rest.find(',');
      const std::string_view id = rest.substr(0, comma);
      if (!id.empty()) relevant.insert(std::string(id));
      if (comma == std::string_view::npos) break;
      rest.remove_prefix(comma + 1);
    }
    if (relevant.empty()) {
      fail(ErrorKind::kFormat, "ground truth: line " + std::to_string(line_no) + ": empty relevant set");
    }
  }
  return gt;
}

double average_precision(const RankedList& ranked, const std::set<std::string>& relevant,
                         bool exclude_query) {
  std::set<std::string> rel = relevant;
  if (exclude_query) rel.erase(ranked.query_id);
  if (rel.empty()) {
    fail(ErrorKind::kProtocol, "query '" + ranked.query_id + "' has no relevant items after exclusion");
  }
  std::size_t rank = 0;
  std::size_t found = 0;
  double sum = 0;
  for (const Hit& hit : ranked.hits) {
    if (exclude_query && hit.image_id == ranked.query_id) continue;
    ++rank;
    if (rel.count(hit.image_id) != 0) {
      ++found;
      sum += static_cast<double>(found) / static_cast<double>(rank);
    }
  }
  return found == 0 ? 0.0 : sum / static_cast<double>(found);
}

namespace {

const std::set<std::string>& relevant_for(const GroundTruth& gt, const std::string& query) {
  const auto it = gt.find(query);
  if (it == gt.end()) fail(ErrorKind::kProtocol, "no ground truth for query '" + query + "'");
  return it->second;
}

}  // namespace

EvalReport mean_average_precision(std::span<const RankedList> lists, const GroundTruth& gt,
                                  bool exclude_query) {
  if (lists.empty()) fail(ErrorKind::kProtocol, "no rankings to evaluate");
  EvalReport report;
  report.protocol = Protocol::kMeanAveragePrecision;
  double sum = 0;
  for (const RankedList& list : lists) {
    const double ap = average_precision(list, relevant_for(gt, list.query_id), exclude_query);
    report.per_query.push_back({list.query_id, ap});
    sum += ap;
  }
  report.score = sum / static_cast<double>(lists.size());
  return report;
}

EvalReport ukb_score(std::span<const RankedList> lists, const GroundTruth& gt) {
  if (lists.empty()) fail(ErrorKind::kProtocol, "no rankings to evaluate");
  EvalReport report;
  report.protocol = Protocol::kUkb;
  double sum = 0;
  for (const RankedList& list : lists) {
    const auto& rel = relevant_for(gt, list.query_id);
    if (list.hits.size() < 4) {
      fail(ErrorKind::kProtocol, "query '" + list.query_id + "' ranking has " +
                                     std::to_string(list.hits.size()) + " entries; UKB needs 4");
    }
    double hits = 0;
    for (std::size_t i = 0; i < 4; ++i) hits += rel.count(list.hits[i].image_id) != 0 ? 1.0 : 0.0;
    report.per_query.push_back({list.query_id, hits});
    sum += hits;
  }
  report.score = sum / static_cast<double>(lists.size());
  return report;
}

std::string format_report(const EvalReport& report) {
  const bool map = report.protocol == Protocol::kMeanAveragePrecision;
  std::string out = map ? "query\tAP\n" : "query\thits@4\n";
  char buf[64];
  auto shortest = [&buf](double v) {
    const auto r = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, r.ptr);
  };
  for (const QueryScore& q : report.per_query) {
    std::snprintf(buf, sizeof buf, "%.4f", q.value);
    out += q.query_id + '\t' + buf + '\n';
  }
  out += "queries=" + std::to_string(report.query_count()) + '\n';
  out += (map ? "mAP=" : "ukb=") + shortest(report.score) + '\n';
  return out;
}

}  // namespace ofp
