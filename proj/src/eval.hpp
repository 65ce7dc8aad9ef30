#pragma once

#include <map>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "index.hpp"

namespace ofp {

/// query id -> ids judged relevant to it.
using GroundTruth = std::map<std::string, std::set<std::string>>;

/// `query_id<TAB>relevant_id[,relevant_id...]` per line.
GroundTruth parse_ground_truth(std::string_view text);

struct QueryScore {
  std::string query_id;
  double value = 0;  // AP, or hits in the top 4 for UKB
};

enum class Protocol { kMeanAveragePrecision, kUkb };

struct EvalReport {
  Protocol protocol = Protocol::kMeanAveragePrecision;
  std::vector<QueryScore> per_query;
  double score = 0;  // mAP in [0,1] or UKB score in [0,4]

  std::size_t query_count() const { return per_query.size(); }
};

/// Non-interpolated AP: (1/R) * sum over ranks k holding a relevant id of
/// precision@k, with R the number of relevant ids present in the ranking.
/// With `exclude_query`, the query's own entry is dropped from both the
/// ranking and the relevant set first.
double average_precision(const RankedList& ranked, const std::set<std::string>& relevant,
                         bool exclude_query);

EvalReport mean_average_precision(std::span<const RankedList> lists, const GroundTruth& gt,
                                  bool exclude_query);

/// Mean count of relevant ids among the first four hits (query kept).
EvalReport ukb_score(std::span<const RankedList> lists, const GroundTruth& gt);

/// Human-readable table followed by `mAP=<value>` or `ukb=<value>`.
std::string format_report(const EvalReport& report);

}  // namespace ofp
