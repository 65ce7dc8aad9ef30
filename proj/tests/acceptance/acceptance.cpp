// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fail.

#include <sys/wait.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "compression.hpp"
#include "descriptors.hpp"
#include "eval.hpp"
#include "fileio.hpp"
#include "index.hpp"
#include "oracles.hpp"
#include "pooling.hpp"
#include "proposals.hpp"
#include "raster.hpp"
#include "synthetic.hpp"

namespace fs = std::filesystem;
using namespace ofp;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

// Records the first failed expectation and keeps going.
struct Checker {
  Outcome out;
  void expect(bool ok, const std::string& what) {
    if (!ok && out.pass) {
      out.pass = false;
      out.detail = what;
    }
  }
};

struct Criterion {
  std::string name;
  double limit_seconds;  // <= 0: no runtime limit
  std::function<Outcome()> run;
};

RasterImage to_image(const synthetic::Canvas& c) { return RasterImage(c.width(), c.height(), c.rgb()); }

double cosine(const std::vector<float>& a, const std::vector<float>& b) {
  double ab = 0, aa = 0, bb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ab += double{a[i]} * b[i];
    aa += double{a[i]} * a[i];
    bb += double{b[i]} * b[i];
  }
  return ab / std::sqrt(aa * bb);
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

// --------------------------------------------------------------- pipeline

struct ProposalSettings {
  SelectiveSearchConfig search;
  double nms_iou = 0.9;
  std::uint32_t top_n = 500;
};

struct Represented {
  std::string id;
  std::vector<float> vector;
  std::size_t proposals = 0;
};

Represented represent(const RasterImage& img, const std::string& id, const ProposalSettings& s) {
  const auto set = nms_filter(selective_search(img, id, s.search), s.nms_iou, s.top_n);
  const auto feats = describe_regions(img, set, {});
  return {id, l2_normalize(max_pool(feats)).vector, set.size()};
}

Eigen::MatrixXd stack(const std::vector<Represented>& reps) {
  Eigen::MatrixXd m(static_cast<Eigen::Index>(reps.size()), static_cast<Eigen::Index>(reps[0].vector.size()));
  for (std::size_t i = 0; i < reps.size(); ++i)
    for (std::size_t j = 0; j < reps[i].vector.size(); ++j) m(i, j) = reps[i].vector[j];
  return m;
}

std::vector<Represented> corpus_representations(const ProposalSettings& s, double* mean_proposals = nullptr) {
  std::vector<Represented> out;
  std::vector<std::string> files;
  for (const auto& e : fs::directory_iterator(OFP_CORPUS_DIR))
    if (e.path().extension() == ".ppm") files.push_back(e.path().string());
  std::sort(files.begin(), files.end());
  double total = 0;
  for (const auto& f : files) {
    const auto bytes = read_file(f);
    out.push_back(represent(decode_ppm(bytes), fs::path(f).stem().string(), s));
    total += static_cast<double>(out.back().proposals);
  }
  if (mean_proposals != nullptr) *mean_proposals = total / static_cast<double>(files.size());
  return out;
}

std::vector<Represented> training_representations(const ProposalSettings& s) {
  std::vector<Represented> out;
  for (const auto& scene : synthetic::training_scenes(80, 7)) out.push_back(represent(to_image(scene.canvas), scene.id, s));
  return out;
}

GroundTruth corpus_ground_truth() {
  return parse_ground_truth(read_text_file(std::string(OFP_CORPUS_DIR) + "/ground_truth.txt"));
}

double map_pca_l2(const std::vector<Represented>& db, const PcaModel& pca) {
  RetrievalIndex index(Metric::kL2, pca.output_dim);
  std::vector<std::vector<float>> projected;
  for (const auto& r : db) {
    const Eigen::VectorXd p = pca_project(pca, r.vector);
    projected.emplace_back(p.data(), p.data() + p.size());
    index.add(r.id, projected.back());
  }
  std::vector<RankedList> lists;
  for (std::size_t i = 0; i < db.size(); ++i) lists.push_back(index.search(projected[i], db.size(), db[i].id));
  return mean_average_precision(lists, corpus_ground_truth(), true).score;
}

double map_itq_hamming(const std::vector<Represented>& db, const ItqModel& itq) {
  RetrievalIndex index(Metric::kHamming, itq.bits);
  std::vector<BinaryCode> codes;
  for (const auto& r : db) {
    codes.push_back(itq_encode(itq, r.vector));
    index.add(r.id, codes.back());
  }
  std::vector<RankedList> lists;
  for (std::size_t i = 0; i < db.size(); ++i) lists.push_back(index.search(codes[i], db.size(), db[i].id));
  return mean_average_precision(lists, corpus_ground_truth(), true).score;
}

// ------------------------------------------------------------- criteria

Outcome pooling_invariance() {
  Checker c;
  std::mt19937_64 rng(2024);
  std::normal_distribution<float> g;
  for (int m = 0; m < 100; ++m) {
    std::vector<std::vector<float>> rows(50, std::vector<float>(16));
    for (auto& r : rows)
      for (auto& v : r) v = g(rng);
    FeatureMatrix base("m", 16);
    for (const auto& r : rows) base.append_row(r);
    const auto pooled = max_pool(base).vector;

    std::vector<int> perm(50);
    std::iota(perm.begin(), perm.end(), 0);
    for (int p = 0; p < 20; ++p) {
      std::shuffle(perm.begin(), perm.end(), rng);
      FeatureMatrix shuffled("m", 16);
      for (int i : perm) shuffled.append_row(rows[i]);
      c.expect(max_pool(shuffled).vector == pooled, "permutation changed the pooled vector");
    }

    FeatureMatrix grown = base;
    std::vector<float> extra(16);
    for (auto& v : extra) v = g(rng) * 2;
    grown.append_row(extra);
    const auto bigger = max_pool(grown).vector;
    for (int j = 0; j < 16; ++j) {
      c.expect(bigger[j] >= pooled[j], "adding a row lowered a component");
      c.expect(bigger[j] == std::max(pooled[j], extra[j]), "adding a row gave a wrong maximum");
    }

    FeatureMatrix twice("m", 16);
    twice.append_row(pooled);
    twice.append_row(pooled);
    c.expect(max_pool(twice).vector == pooled, "pooling is not idempotent");
  }
  c.out.detail = c.out.pass ? "100 matrices x 20 permutations" : c.out.detail;
  return c.out;
}

Outcome rearrangement_invariance() {
  Checker c;
  const auto a = to_image(synthetic::two_rectangle_scene(false));
  const auto b = to_image(synthetic::two_rectangle_scene(true));
  const ProposalSettings defaults;
  const auto ra = represent(a, "a", defaults);
  const auto rb = represent(b, "b", defaults);
  const double pooled = cosine(ra.vector, rb.vector);
  const double whole = cosine(builtin_descriptor(a), builtin_descriptor(b));
  c.expect(pooled >= 0.99, "pooled cosine " + fmt(pooled) + " < 0.99");
  c.expect(whole < pooled, "whole-image cosine " + fmt(whole) + " not below pooled " + fmt(pooled));
  if (c.out.pass) c.out.detail = "pooled cosine " + fmt(pooled) + ", whole-image cosine " + fmt(whole);
  return c.out;
}

Outcome itq_optimization() {
  Checker c;
  std::mt19937_64 rng(1);
  std::normal_distribution<double> g;
  Eigen::MatrixXd data(1000, 64);
  for (Eigen::Index i = 0; i < data.rows(); ++i)
    for (Eigen::Index j = 0; j < data.cols(); ++j) data(i, j) = g(rng);

  double worst_orth = 0;
  const auto model = fit_itq(data, 32, 50, 1, [&](std::uint32_t, const Eigen::MatrixXd& r) {
    worst_orth = std::max(worst_orth, (r.transpose() * r - Eigen::MatrixXd::Identity(32, 32)).cwiseAbs().maxCoeff());
  });
  c.expect(model.loss_trace.size() == 50, "loss trace has " + std::to_string(model.loss_trace.size()) + " entries");
  for (std::size_t i = 1; i < model.loss_trace.size(); ++i)
    c.expect(model.loss_trace[i] <= model.loss_trace[i - 1], "loss rose at iteration " + std::to_string(i));
  c.expect(worst_orth < 1e-6, "orthogonality error " + fmt(worst_orth));

  // Loss of the final rotation, recomputed from scratch.
  Eigen::MatrixXd v(data.rows(), 32);
  std::vector<double> row(64);
  for (Eigen::Index i = 0; i < data.rows(); ++i) {
    for (int j = 0; j < 64; ++j) row[j] = data(i, j);
    v.row(i) = pca_project(model.pca, std::span<const double>(row)).transpose();
  }
  const Eigen::MatrixXd z = v * model.rotation;
  const Eigen::MatrixXd bcode = z.unaryExpr([](double x) { return x >= 0 ? 1.0 : -1.0; });
  const double final_loss = (bcode - z).squaredNorm();
  const double initial = model.loss_trace.front();
  const double reduction = 1 - final_loss / initial;
  c.expect(reduction >= 0.05, "loss reduced by only " + fmt(100 * reduction) + "%");
  if (c.out.pass)
    c.out.detail = "loss " + fmt(initial) + " -> " + fmt(final_loss) + " (-" + fmt(100 * reduction) +
                   "%), max |R'R - I| " + fmt(worst_orth);
  return c.out;
}

Outcome pca_oracle() {
  Checker c;
  std::mt19937_64 rng(50);
  std::normal_distribution<double> g;
  Eigen::MatrixXd data(50, 8);
  oracle::Matrix rows(50, std::vector<double>(8));
  for (int i = 0; i < 50; ++i)
    for (int j = 0; j < 8; ++j) rows[i][j] = data(i, j) = g(rng) * (1.0 + 0.5 * j);
  const auto model = fit_pca(data, 8);
  const auto eig = oracle::jacobi_eigen(oracle::covariance(rows));
  double worst = 0;
  for (int k = 0; k < 8; ++k) worst = std::max(worst, std::abs(model.explained_variance(k) - eig.values[k]));
  c.expect(worst <= 1e-8, "variance mismatch " + fmt(worst));

  double worst_rel = 0;
  for (int i = 0; i < 50; ++i) {
    const Eigen::VectorXd p = pca_project(model, rows[i]);
    const Eigen::VectorXd back = model.components.transpose() * p + model.mean;
    worst_rel = std::max(worst_rel, (back - data.row(i).transpose()).norm() / data.row(i).norm());
  }
  c.expect(worst_rel < 1e-6, "reconstruction error " + fmt(worst_rel));
  if (c.out.pass) c.out.detail = "max variance error " + fmt(worst) + ", max reconstruction error " + fmt(worst_rel);
  return c.out;
}

Outcome search_oracle() {
  Checker c;
  std::mt19937_64 rng(500);
  std::uniform_int_distribution<int> coarse(-2, 2);
  constexpr int kEntries = 500, kQueries = 20, kDim = 16, kBits = 64;

  RetrievalIndex l2(Metric::kL2, kDim);
  RetrievalIndex ham(Metric::kHamming, kBits);
  std::vector<std::vector<float>> vecs;
  std::vector<BinaryCode> codes;
  for (int i = 0; i < kEntries; ++i) {
    std::vector<float> v(kDim);
    BinaryCode code(kBits);
    if (i % 10 == 9) {  // exact duplicates guarantee ties
      v = vecs[i - 5];
      code = codes[i - 5];
    } else {
      for (auto& x : v) x = static_cast<float>(coarse(rng)) * 0.5f;
      for (std::uint32_t j = 0; j < kBits; ++j) code.set_bit(j, rng() & 1u);
    }
    vecs.push_back(v);
    codes.push_back(code);
    l2.add("e" + std::to_string(i), v);
    ham.add("e" + std::to_string(i), code);
  }

  std::size_t ties = 0;
  for (int q = 0; q < kQueries; ++q) {
    std::vector<float> qv(kDim);
    for (auto& x : qv) x = static_cast<float>(coarse(rng)) * 0.5f;
    BinaryCode qc(kBits);
    for (std::uint32_t j = 0; j < kBits; ++j) qc.set_bit(j, rng() & 1u);

    std::vector<double> d2(kEntries), dh(kEntries);
    for (int i = 0; i < kEntries; ++i) {
      double s = 0;
      for (int j = 0; j < kDim; ++j) s += (double{vecs[i][j]} - qv[j]) * (double{vecs[i][j]} - qv[j]);
      d2[i] = s;
      dh[i] = oracle::hamming_bits(codes[i].payload, qc.payload, kBits);
    }
    const auto e2 = oracle::exhaustive_rank(d2);
    const auto eh = oracle::exhaustive_rank(dh);
    const auto r2 = l2.search(qv, kEntries);
    const auto rh = ham.search(qc, kEntries);
    c.expect(r2.hits.size() == kEntries && rh.hits.size() == kEntries, "ranking length");
    for (int r = 0; r < kEntries && c.out.pass; ++r) {
      c.expect(r2.hits[r].image_id == "e" + std::to_string(e2[r].first), "l2 order differs at rank " + std::to_string(r));
      c.expect(r2.hits[r].distance == std::sqrt(e2[r].second), "l2 distance differs at rank " + std::to_string(r));
      c.expect(rh.hits[r].image_id == "e" + std::to_string(eh[r].first), "hamming order differs at rank " + std::to_string(r));
      c.expect(rh.hits[r].distance == eh[r].second, "hamming distance differs at rank " + std::to_string(r));
      if (r > 0 && e2[r].second == e2[r - 1].second) ++ties;
      if (r > 0 && eh[r].second == eh[r - 1].second) ++ties;
    }
    const auto top = l2.search(qv, 10);
    c.expect(std::equal(top.hits.begin(), top.hits.end(), r2.hits.begin()), "top-10 is not a prefix");
  }
  if (c.out.pass) c.out.detail = "500 entries x 20 queries, both metrics, " + std::to_string(ties) + " tied neighbours";
  return c.out;
}

Outcome eval_oracle() {
  Checker c;
  std::mt19937_64 rng(10);
  double worst = 0;
  for (int t = 0; t < 10; ++t) {
    std::vector<std::string> ids;
    for (int i = 0; i < 60; ++i) ids.push_back("d" + std::to_string(i));
    std::shuffle(ids.begin(), ids.end(), rng);
    std::set<std::string> relevant;
    for (int i = 0; i < 60; ++i)
      if (rng() % 5 == 0) relevant.insert("d" + std::to_string(i));
    const std::string query = ids[rng() % ids.size()];
    relevant.insert(query);
    relevant.insert(query == ids[0] ? ids[1] : ids[0]);
    RankedList list{query, {}};
    for (std::size_t i = 0; i < ids.size(); ++i) list.hits.push_back({ids[i], static_cast<double>(i)});
    const bool exclude = t % 2 == 0;
    const double got = average_precision(list, relevant, exclude);
    const double want = oracle::average_precision(ids, relevant, query, exclude);
    worst = std::max(worst, std::abs(got - want));
  }
  c.expect(worst <= 1e-9, "AP differs from the oracle by " + fmt(worst));

  const RankedList fixture{"q", {{"r1", 0}, {"x", 1}, {"r2", 2}}};
  const double ap = average_precision(fixture, {"r1", "r2"}, false);
  c.expect(std::abs(ap - 5.0 / 6.0) <= 1e-12, "[relevant, other, relevant] scored " + fmt(ap));

  const GroundTruth gt{{"a", {"a", "b", "c", "d"}}, {"e", {"e", "f", "g", "h"}}, {"i", {"i", "j", "k", "l"}}};
  const std::vector<RankedList> ukb{
      {"a", {{"a", 0}, {"b", 1}, {"c", 2}, {"d", 3}}},
      {"e", {{"e", 0}, {"x", 1}, {"f", 2}, {"y", 3}}},
      {"i", {{"i", 0}, {"j", 1}, {"z", 2}, {"k", 3}}},
  };
  const double score = ukb_score(ukb, gt).score;
  c.expect(score == 3.0, "UKB fixture scored " + fmt(score));
  if (c.out.pass) c.out.detail = "max AP error " + fmt(worst) + ", fixture 5/6, UKB 3";
  return c.out;
}

Outcome nms_validity() {
  Checker c;
  std::mt19937_64 rng(200);
  std::uniform_int_distribution<std::uint32_t> pos(0, 80), ext(5, 40);
  std::uniform_real_distribution<float> score(0.0f, 1.0f);
  ProposalSet set{"nms", {}};
  for (int i = 0; i < 200; ++i) set.proposals.push_back({{pos(rng), pos(rng), ext(rng), ext(rng)}, score(rng)});
  std::stable_sort(set.proposals.begin(), set.proposals.end(),
                   [](const Proposal& a, const Proposal& b) { return a.score > b.score; });
  const auto kept = nms_filter(set, 0.5, 200);

  std::vector<oracle::Box> boxes;
  for (const auto& p : set.proposals) boxes.push_back({long{p.box.x}, long{p.box.y}, long{p.box.w}, long{p.box.h}});
  std::vector<std::size_t> idx;
  std::size_t cursor = 0;
  for (const auto& p : kept.proposals) {
    while (cursor < set.size() && !(set.proposals[cursor] == p)) ++cursor;
    c.expect(cursor < set.size(), "kept proposal not found in input order");
    if (!c.out.pass) return c.out;
    idx.push_back(cursor++);
  }
  const std::string verdict = oracle::validate_nms(boxes, idx, 0.5, 200);
  c.expect(verdict.empty(), verdict);
  if (c.out.pass) c.out.detail = std::to_string(kept.size()) + " of 200 boxes kept";
  return c.out;
}

Outcome end_to_end() {
  Checker c;
  const ProposalSettings defaults;
  const auto db = corpus_representations(defaults);
  const auto train = training_representations(defaults);
  const auto x = stack(train);
  const double float_map = map_pca_l2(db, fit_pca(x, 32));
  const double binary_map = map_itq_hamming(db, fit_itq(x, 64, 50, 1));
  c.expect(db.size() == 12, "corpus has " + std::to_string(db.size()) + " images");
  c.expect(float_map >= 0.9, "PCA-32 l2 mAP " + fmt(float_map));
  c.expect(std::abs(binary_map - float_map) <= 0.15, "ITQ-64 mAP " + fmt(binary_map) + " vs " + fmt(float_map));
  if (c.out.pass) c.out.detail = "PCA-32 l2 mAP " + fmt(float_map) + ", ITQ-64 Hamming mAP " + fmt(binary_map);
  return c.out;
}

Outcome top_n_truncation() {
  Checker c;
  // A finer segmentation scale so the full proposal set exceeds 100 per image.
  ProposalSettings all;
  all.search.k = 50;
  all.top_n = 1000000;
  ProposalSettings top = all;
  top.top_n = 100;

  double mean_all = 0, mean_top = 0;
  const auto db_all = corpus_representations(all, &mean_all);
  const auto db_top = corpus_representations(top, &mean_top);
  const double map_all = map_pca_l2(db_all, fit_pca(stack(training_representations(all)), 32));
  const double map_top = map_pca_l2(db_top, fit_pca(stack(training_representations(top)), 32));
  c.expect(mean_all > 100, "only " + fmt(mean_all) + " proposals per image; truncation would be vacuous");
  c.expect(std::abs(map_all - map_top) <= 0.05, "top-100 mAP " + fmt(map_top) + " vs all " + fmt(map_all));
  if (c.out.pass)
    c.out.detail = "all (" + fmt(mean_all) + "/image) mAP " + fmt(map_all) + ", top-100 (" + fmt(mean_top) +
                   "/image) mAP " + fmt(map_top);
  return c.out;
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(OFP_CLI) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

// Runs every CLI stage over the corpus into `dir`; returns an error or "".
std::string cli_pipeline(const fs::path& dir) {
  fs::create_directories(dir);
  std::string images;
  std::vector<std::string> stems;
  for (const auto& e : fs::directory_iterator(OFP_CORPUS_DIR))
    if (e.path().extension() == ".ppm") stems.push_back(e.path().stem().string());
  std::sort(stems.begin(), stems.end());
  std::string props, feats, reps;
  for (const auto& s : stems) {
    images += " " + std::string(OFP_CORPUS_DIR) + "/" + s + ".ppm";
    props += " " + (dir / "props" / (s + ".props")).string();
    feats += " " + (dir / "feats" / (s + ".ofpf")).string();
    reps += " " + (dir / "reps" / (s + ".rep")).string();
  }
  const std::string d = dir.string();
  const std::vector<std::string> steps{
      "propose --seed 11 --jobs 2 --input" + images + " --out-dir " + d + "/props",
      "describe --jobs 2 --input" + images + " --proposals" + props + " --out-dir " + d + "/feats",
      "pool --l2-normalize --input" + feats + " --out-dir " + d + "/reps",
      "fit-pca --dim 8 --out " + d + "/model.pca" + reps,
      "fit-itq --bits 8 --seed 11 --out " + d + "/model.itq" + reps,
      "index --metric l2 --pca " + d + "/model.pca --out " + d + "/l2.idx" + reps,
      "index --metric hamming --itq " + d + "/model.itq --out " + d + "/hamming.idx" + reps,
      "search --k 12 --index " + d + "/l2.idx --pca " + d + "/model.pca --out " + d + "/l2.rank --query" + reps,
      "search --k 12 --index " + d + "/hamming.idx --itq " + d + "/model.itq --out " + d + "/hamming.rank --query" + reps,
      "evaluate --gt " + std::string(OFP_CORPUS_DIR) + "/ground_truth.txt --out " + d + "/l2.report " + d + "/l2.rank",
      "evaluate --gt " + std::string(OFP_CORPUS_DIR) + "/ground_truth.txt --out " + d + "/hamming.report " + d +
          "/hamming.rank",
  };
  for (const auto& s : steps)
    if (run_cli(s) != 0) return "step failed: ofp " + s.substr(0, s.find(' '));
  return {};
}

Outcome determinism() {
  Checker c;
  std::random_device rd;
  const fs::path root = fs::temp_directory_path() / ("ofp_accept_" + std::to_string(rd()));
  const auto first = cli_pipeline(root / "run1");
  const auto second = first.empty() ? cli_pipeline(root / "run2") : first;
  c.expect(first.empty() && second.empty(), first.empty() ? second : first);
  std::size_t files = 0;
  if (c.out.pass) {
    for (const auto& e : fs::recursive_directory_iterator(root / "run1")) {
      if (!e.is_regular_file()) continue;
      const auto rel = fs::relative(e.path(), root / "run1");
      const auto other = root / "run2" / rel;
      c.expect(fs::exists(other) && read_file(e.path().string()) == read_file(other.string()),
               "artifact differs: " + rel.string());
      ++files;
    }
  }
  fs::remove_all(root);
  if (c.out.pass) c.out.detail = std::to_string(files) + " artifacts byte-identical across two runs";
  return c.out;
}

}  // namespace

int main() {
  const std::vector<Criterion> criteria{
      {"pooling-invariance", 1.0, pooling_invariance},
      {"rearrangement-invariance", 5.0, rearrangement_invariance},
      {"itq-optimization", 10.0, itq_optimization},
      {"pca-oracle", 0, pca_oracle},
      {"search-oracle", 2.0, search_oracle},
      {"evaluation-oracle", 0, eval_oracle},
      {"nms-validity", 0, nms_validity},
      {"end-to-end-retrieval", 60.0, end_to_end},
      {"top-n-truncation", 0, top_n_truncation},
      {"determinism", 0, determinism},
  };
  int failures = 0;
  for (const auto& cr : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = cr.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (o.pass && cr.limit_seconds > 0 && secs >= cr.limit_seconds) {
      o = {false, "took " + fmt(secs) + " s, limit " + fmt(cr.limit_seconds) + " s"};
    }
    failures += o.pass ? 0 : 1;
    std::printf("%s %-26s %7.3fs  %s\n", o.pass ? "PASS" : "FAIL", cr.name.c_str(), secs, o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
