#include <cmath>
#include <random>
#include <set>

#include "doctest.h"
#include "error.hpp"
#include "index.hpp"
#include "oracles.hpp"

using namespace ofp;

namespace {

BinaryCode random_code(std::uint32_t bits, std::mt19937_64& rng) {
  BinaryCode c(bits);
  for (std::uint32_t j = 0; j < bits; ++j) c.set_bit(j, (rng() & 1u) != 0);
  return c;
}

BinaryCode code_from_byte(std::uint8_t b) {
  BinaryCode c(8);
  c.payload[0] = b;
  return c;
}

}  // namespace

TEST_CASE("hamming distance examples") {
  const auto a = code_from_byte(0b10110010);
  CHECK(hamming_distance(a, a) == 0);
  CHECK(hamming_distance(a, code_from_byte(0b01001101)) == 8);
  CHECK_THROWS_AS(hamming_distance(a, BinaryCode(16)), Error);
}

TEST_CASE("hamming distance matches a bit loop") {
  std::mt19937_64 rng(12);
  for (int i = 0; i < 1000; ++i) {
    const auto a = random_code(256, rng);
    const auto b = random_code(256, rng);
    CHECK(hamming_distance(a, b) == oracle::hamming_bits(a.payload, b.payload, 256));
  }
  for (std::uint32_t bits : {1u, 7u, 63u, 65u, 130u}) {
    const auto a = random_code(bits, rng);
    const auto b = random_code(bits, rng);
    CHECK(hamming_distance(a, b) == oracle::hamming_bits(a.payload, b.payload, bits));
  }
}

TEST_CASE("hamming distance is a metric") {
  std::mt19937_64 rng(3);
  for (int i = 0; i < 200; ++i) {
    const auto a = random_code(64, rng), b = random_code(64, rng), c = random_code(64, rng);
    CHECK(hamming_distance(a, b) == hamming_distance(b, a));
    CHECK(hamming_distance(a, c) <= hamming_distance(a, b) + hamming_distance(b, c));
  }
}

TEST_CASE("metric names") {
  CHECK(parse_metric("l2") == Metric::kL2);
  CHECK(parse_metric("hamming") == Metric::kHamming);
  CHECK(std::string(metric_name(Metric::kHamming)) == "hamming");
  CHECK_THROWS_AS(parse_metric("cosine"), Error);
}

TEST_CASE("l2 search basics") {
  RetrievalIndex index(Metric::kL2, 2);
  index.add("a", std::vector<float>{0, 0});
  index.add("b", std::vector<float>{3, 4});
  index.add("c", std::vector<float>{1, 0});
  const auto hits = index.search(std::vector<float>{3, 4}, 10, "q");
  REQUIRE(hits.hits.size() == 3);
  CHECK(hits.query_id == "q");
  CHECK(hits.hits[0] == Hit{"b", 0.0});
  CHECK(hits.hits[1].image_id == "c");
  CHECK(hits.hits[1].distance == doctest::Approx(std::sqrt(20.0)));
  CHECK(hits.hits[2] == Hit{"a", 5.0});
  CHECK(index.search(std::vector<float>{0, 0}, 1).hits.size() == 1);
}

TEST_CASE("ties keep insertion order") {
  RetrievalIndex index(Metric::kL2, 1);
  for (const char* id : {"z", "y", "x", "w"}) index.add(id, std::vector<float>{1});
  const auto hits = index.search(std::vector<float>{0}, 4);
  CHECK(hits.hits[0].image_id == "z");
  CHECK(hits.hits[3].image_id == "w");
}

TEST_CASE("index validation") {
  RetrievalIndex l2(Metric::kL2, 3);
  l2.add("a", std::vector<float>{1, 2, 3});
  CHECK_THROWS_AS(l2.add("a", std::vector<float>{1, 2, 3}), Error);
  CHECK_THROWS_AS(l2.add("b", std::vector<float>{1, 2}), Error);
  CHECK_THROWS_AS(l2.add("", std::vector<float>{1, 2, 3}), Error);
  CHECK_THROWS_AS(l2.add("c", BinaryCode(3)), Error);
  CHECK_THROWS_AS(l2.search(std::vector<float>{1, 2}, 1), Error);
  CHECK_THROWS_AS(l2.search(std::vector<float>{1, 2, 3}, 0), Error);

  RetrievalIndex ham(Metric::kHamming, 12);
  CHECK(ham.search(BinaryCode(12), 5).hits.empty());
  CHECK(ham.payload_bytes() == 2);
  BinaryCode dirty(12);
  dirty.payload[1] = 0x01;
  CHECK_THROWS_AS(ham.add("d", dirty), Error);
  CHECK_THROWS_AS(ham.add("e", BinaryCode(16)), Error);
  CHECK_THROWS_AS(ham.search(BinaryCode(8), 1), Error);
  CHECK_THROWS_AS(RetrievalIndex(Metric::kL2, 0), Error);
}

TEST_CASE("search equals an exhaustive sort") {
  std::mt19937_64 rng(99);
  std::uniform_int_distribution<int> small(-2, 2);

  RetrievalIndex l2(Metric::kL2, 8);
  std::vector<std::vector<float>> vectors;
  for (int i = 0; i < 300; ++i) {
    std::vector<float> v(8);
    for (auto& x : v) x = static_cast<float>(small(rng));  // coarse values force ties
    vectors.push_back(v);
    l2.add("v" + std::to_string(i), v);
  }
  RetrievalIndex ham(Metric::kHamming, 24);
  std::vector<BinaryCode> codes;
  for (int i = 0; i < 300; ++i) {
    codes.push_back(random_code(24, rng));
    ham.add("h" + std::to_string(i), codes.back());
  }

  for (int q = 0; q < 10; ++q) {
    std::vector<float> query(8);
    for (auto& x : query) x = static_cast<float>(small(rng));
    std::vector<double> d(300);
    for (int i = 0; i < 300; ++i) {
      double s = 0;
      for (int j = 0; j < 8; ++j) s += (double{vectors[i][j]} - query[j]) * (double{vectors[i][j]} - query[j]);
      d[i] = s;
    }
    const auto expected = oracle::exhaustive_rank(d);
    const auto got = l2.search(query, 300);
    REQUIRE(got.hits.size() == 300);
    for (int r = 0; r < 300; ++r) {
      CHECK(got.hits[r].image_id == "v" + std::to_string(expected[r].first));
      CHECK(got.hits[r].distance == std::sqrt(expected[r].second));
    }
    const auto top = l2.search(query, 17);
    CHECK(std::equal(top.hits.begin(), top.hits.end(), got.hits.begin()));

    const auto qc = random_code(24, rng);
    std::vector<double> hd(300);
    for (int i = 0; i < 300; ++i) hd[i] = oracle::hamming_bits(codes[i].payload, qc.payload, 24);
    const auto hexp = oracle::exhaustive_rank(hd);
    const auto hgot = ham.search(qc, 50);
    REQUIRE(hgot.hits.size() == 50);
    for (int r = 0; r < 50; ++r) {
      CHECK(hgot.hits[r].image_id == "h" + std::to_string(hexp[r].first));
      CHECK(hgot.hits[r].distance == hexp[r].second);
    }
  }
}

TEST_CASE("index file round trip") {
  std::mt19937_64 rng(1);
  RetrievalIndex ham(Metric::kHamming, 70);
  for (const char* id : {"a", "longer_identifier", "ü-utf8", "x"}) ham.add(id, random_code(70, rng));
  const auto bytes = save_index(ham);
  CHECK(load_index(bytes) == ham);
  CHECK(save_index(load_index(bytes)) == bytes);

  RetrievalIndex l2(Metric::kL2, 3);
  l2.add("p", std::vector<float>{1.5f, -2, 1e-20f});
  CHECK(load_index(save_index(l2)) == l2);

  RetrievalIndex empty(Metric::kL2, 32);
  CHECK(load_index(save_index(empty)) == empty);

  auto cut = bytes;
  cut.pop_back();
  try {
    load_index(cut);
    FAIL("no error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::kFormat);
    const std::string msg = e.what();
    CHECK(msg.find("offset") != std::string::npos);
    CHECK(msg.find("expected 9") != std::string::npos);
  }
  auto bad = bytes;
  bad[8] = 7;
  CHECK_THROWS_AS(load_index(bad), Error);
}

TEST_CASE("ranking text round trip") {
  std::vector<RankedList> lists{
      {"q1", {{"a", 0.0}, {"b", 0.1}, {"c", 1.0 / 3.0}}},
      {"q2", {{"c", 2.0}, {"a", 7.0}}},
  };
  const auto text = format_rankings(lists, true);
  CHECK(text.rfind("# query q1\n1 a 0\n2 b 0.1\n", 0) == 0);
  CHECK(parse_rankings(text, "unused") == lists);

  const auto single = format_rankings(std::span(lists.data(), 1), false);
  CHECK(single == "1 a 0\n2 b 0.1\n3 c 0.3333333333333333\n");
  const auto parsed = parse_rankings(single, "fallback");
  REQUIRE(parsed.size() == 1);
  CHECK(parsed[0].query_id == "fallback");
  CHECK(parsed[0].hits == lists[0].hits);

  CHECK_THROWS_AS(parse_rankings("1 a\n", "x"), Error);
  CHECK_THROWS_AS(parse_rankings("1 a 0.5\n2 b 0.1\n", "x"), Error);
}
