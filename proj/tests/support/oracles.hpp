#pragma once

// Reference implementations used only by tests. Deliberately naive and
// independent of the library code they check.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace oracle {

using Matrix = std::vector<std::vector<double>>;

// Sample covariance of the rows of `x` (n x D), divided by n-1.
inline Matrix covariance(const Matrix& x) {
  const std::size_t n = x.size();
  const std::size_t d = x[0].size();
  std::vector<double> mean(d, 0.0);
  for (const auto& row : x)
    for (std::size_t j = 0; j < d; ++j) mean[j] += row[j];
  for (auto& m : mean) m /= static_cast<double>(n);
  Matrix c(d, std::vector<double>(d, 0.0));
  for (const auto& row : x)
    for (std::size_t a = 0; a < d; ++a)
      for (std::size_t b = 0; b < d; ++b) c[a][b] += (row[a] - mean[a]) * (row[b] - mean[b]);
  for (auto& r : c)
    for (auto& v : r) v /= static_cast<double>(n - 1);
  return c;
}

struct Eigen {
  std::vector<double> values;         // descending
  std::vector<std::vector<double>> vectors;  // vectors[i] pairs with values[i]
};

// Cyclic Jacobi rotations on a symmetric matrix.
inline Eigen jacobi_eigen(Matrix a) {
  const std::size_t n = a.size();
  Matrix v(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i) v[i][i] = 1.0;
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0;
    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) off += a[p][q] * a[p][q];
    if (off < 1e-30) break;
    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        if (std::abs(a[p][q]) < 1e-300) continue;
        const double theta = (a[q][q] - a[p][p]) / (2 * a[p][q]);
        const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1));
        const double c = 1 / std::sqrt(t * t + 1);
        const double s = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const double akp = a[k][p], akq = a[k][q];
          a[k][p] = c * akp - s * akq;
          a[k][q] = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = a[p][k], aqk = a[q][k];
          a[p][k] = c * apk - s * aqk;
          a[q][k] = s * apk + c * aqk;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double vkp = v[k][p], vkq = v[k][q];
          v[k][p] = c * vkp - s * vkq;
          v[k][q] = s * vkp + c * vkq;
        }
      }
    }
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) { return a[i][i] > a[j][j]; });
  Eigen out;
  for (std::size_t i : order) {
    out.values.push_back(a[i][i]);
    std::vector<double> col(n);
    for (std::size_t k = 0; k < n; ++k) col[k] = v[k][i];
    out.vectors.push_back(col);
  }
  return out;
}

// AP written straight from the definition: walk the list, count relevant hits.
inline double average_precision(std::vector<std::string> ranked, std::set<std::string> relevant,
                                const std::string& query, bool exclude_query) {
  if (exclude_query) {
    ranked.erase(std::remove(ranked.begin(), ranked.end(), query), ranked.end());
    relevant.erase(query);
  }
  double sum = 0;
  int found = 0;
  for (std::size_t k = 0; k < ranked.size(); ++k) {
    if (relevant.count(ranked[k])) {
      ++found;
      sum += static_cast<double>(found) / static_cast<double>(k + 1);
    }
  }
  return found == 0 ? 0.0 : sum / found;
}

struct Box {
  long x, y, w, h;
};

inline double iou(const Box& a, const Box& b) {
  long inter = 0;
  for (long yy = std::max(a.y, b.y); yy < std::min(a.y + a.h, b.y + b.h); ++yy)
    for (long xx = std::max(a.x, b.x); xx < std::min(a.x + a.w, b.x + b.w); ++xx) ++inter;
  const long uni = a.w * a.h + b.w * b.h - inter;
  return static_cast<double>(inter) / static_cast<double>(uni);
}

// Checks a greedy suppression result against its input, both in descending
// score order. `kept` holds indices into `input`. Returns an empty string on
// success or a description of the first violation.
inline std::string validate_nms(const std::vector<Box>& input, const std::vector<std::size_t>& kept,
                                double theta, std::size_t top_n) {
  for (std::size_t i = 0; i < kept.size(); ++i)
    for (std::size_t j = i + 1; j < kept.size(); ++j)
      if (iou(input[kept[i]], input[kept[j]]) > theta)
        return "kept pair " + std::to_string(kept[i]) + "," + std::to_string(kept[j]) + " overlaps";
  if (!std::is_sorted(kept.begin(), kept.end())) return "kept order changed";
  std::set<std::size_t> kept_set(kept.begin(), kept.end());
  const std::size_t horizon = kept.size() == top_n ? kept.back() : input.size() - 1;
  for (std::size_t r = 0; r < input.size() && r <= horizon; ++r) {
    if (kept_set.count(r)) continue;
    bool violates = false;
    for (std::size_t k : kept)
      if (k < r && iou(input[k], input[r]) > theta) violates = true;
    if (!violates) return "rejected box " + std::to_string(r) + " has no higher-scoring conflict";
  }
  return {};
}

inline std::uint32_t hamming_bits(const std::vector<std::uint8_t>& a, const std::vector<std::uint8_t>& b,
                                  std::uint32_t bits) {
  std::uint32_t d = 0;
  for (std::uint32_t j = 0; j < bits; ++j) {
    const int ba = (a[j / 8] >> (7 - j % 8)) & 1;
    const int bb = (b[j / 8] >> (7 - j % 8)) & 1;
    d += ba != bb;
  }
  return d;
}

// Full ranking by (distance, insertion index).
inline std::vector<std::pair<std::size_t, double>> exhaustive_rank(const std::vector<double>& distances) {
  std::vector<std::pair<std::size_t, double>> out;
  for (std::size_t i = 0; i < distances.size(); ++i) out.emplace_back(i, distances[i]);
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second < b.second;
    return a.first < b.first;
  });
  return out;
}

}  // namespace oracle
