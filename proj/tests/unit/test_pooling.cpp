#include <algorithm>
#include <cmath>
#include <random>

#include "doctest.h"
#include "error.hpp"
#include "ofpf.hpp"
#include "pooling.hpp"

using namespace ofp;

namespace {

FeatureMatrix matrix(std::initializer_list<std::vector<float>> rows) {
  FeatureMatrix m("m", static_cast<std::uint32_t>(rows.begin()->size()));
  for (const auto& r : rows) m.append_row(r);
  return m;
}

}  // namespace

TEST_CASE("max_pool examples") {
  CHECK(max_pool(matrix({{1, 5}, {3, 2}})).vector == std::vector<float>{3, 5});
  CHECK(max_pool(matrix({{-1, 0.5f, 7}})).vector == std::vector<float>{-1, 0.5f, 7});
  const auto rep = max_pool(matrix({{1, 5}}));
  CHECK(rep.image_id == "m");
  CHECK_FALSE(rep.normalized);
}

TEST_CASE("max_pool rejects empty input") {
  try {
    max_pool(FeatureMatrix("none", 4));
    FAIL("no error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::kEmptyInput);
  }
}

TEST_CASE("max_pool is invariant to every permutation of a small matrix") {
  std::mt19937_64 rng(4);
  std::normal_distribution<float> g;
  std::vector<std::vector<float>> rows(5, std::vector<float>(6));
  for (auto& r : rows)
    for (auto& v : r) v = g(rng);
  std::vector<int> perm{0, 1, 2, 3, 4};
  std::vector<float> reference;
  do {
    FeatureMatrix m("p", 6);
    for (int i : perm) m.append_row(rows[i]);
    const auto v = max_pool(m).vector;
    if (reference.empty()) reference = v;
    CHECK(v == reference);
  } while (std::next_permutation(perm.begin(), perm.end()));
}

TEST_CASE("rows perturbed by at most eps pool to within eps") {
  std::mt19937_64 rng(9);
  std::normal_distribution<float> g;
  constexpr float kEps = 1e-3f;
  std::uniform_real_distribution<float> jitter(-kEps, kEps);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<std::vector<float>> rows(12, std::vector<float>(8));
    for (auto& r : rows)
      for (auto& v : r) v = g(rng);
    FeatureMatrix a("a", 8), b("b", 8);
    for (const auto& r : rows) a.append_row(r);
    std::shuffle(rows.begin(), rows.end(), rng);
    for (auto& r : rows) {
      for (auto& v : r) v += jitter(rng);
      b.append_row(r);
    }
    const auto pa = max_pool(a).vector;
    const auto pb = max_pool(b).vector;
    for (std::size_t j = 0; j < pa.size(); ++j) CHECK(std::abs(pa[j] - pb[j]) <= kEps);
  }
}

TEST_CASE("l2_normalize") {
  PooledRepresentation r{"a", {3, 4}, false};
  const auto n = l2_normalize(r);
  CHECK(n.normalized);
  CHECK(n.vector[0] == doctest::Approx(0.6));
  CHECK(n.vector[1] == doctest::Approx(0.8));

  PooledRepresentation unit{"u", {0, 1, 0}, false};
  CHECK(l2_normalize(unit).vector == unit.vector);

  PooledRepresentation zero{"z", {0, 0}, false};
  const auto z = l2_normalize(zero);
  CHECK(z.vector == zero.vector);
  CHECK_FALSE(z.normalized);

  std::mt19937_64 rng(1);
  std::normal_distribution<float> g;
  for (int t = 0; t < 20; ++t) {
    PooledRepresentation v{"v", std::vector<float>(64), false};
    for (auto& x : v.vector) x = g(rng);
    double sq = 0;
    for (float x : l2_normalize(v).vector) sq += double{x} * x;
    CHECK(std::sqrt(sq) == doctest::Approx(1.0).epsilon(1e-6));
  }
}

TEST_CASE("representation file round trip") {
  PooledRepresentation rep{"ignored", {0.25f, -1.0f, 3.5f}, true};
  const BoundingBox extent{2, 3, 40, 50};
  const auto bytes = write_representation(rep, extent);
  BoundingBox got;
  const auto back = read_representation(bytes, &got);
  CHECK(back.vector == rep.vector);
  CHECK(back.normalized);
  CHECK(got == extent);

  rep.normalized = false;
  CHECK_FALSE(read_representation(write_representation(rep, extent)).normalized);
}

TEST_CASE("representation file must hold one record") {
  ProposalSet set{"x", {{{0, 0, 1, 1}, 1.0f}, {{0, 0, 2, 2}, 0.5f}}};
  FeatureMatrix feats("x", 2);
  feats.append_row(std::vector<float>{1, 2});
  feats.append_row(std::vector<float>{3, 4});
  CHECK_THROWS_AS(read_representation(write_ofpf(set, feats)), Error);
}
