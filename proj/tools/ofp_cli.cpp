// ofp command-line front end. Every stage reads and writes files so the
// pipeline can be run, inspected and tested one step at a time.

#include <CLI11.hpp>

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "ofp/ofp.h"

namespace fs = std::filesystem;

namespace {

struct CliError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void check(ofp_status status) {
  if (status != OFP_OK) throw CliError(std::string(ofp_status_name(status)) + ": " + ofp_last_error());
}

template <typename T, void (*Free)(T*)>
struct Deleter {
  void operator()(T* p) const { Free(p); }
};

using Image = std::unique_ptr<ofp_image, Deleter<ofp_image, ofp_image_free>>;
using Proposals = std::unique_ptr<ofp_proposals, Deleter<ofp_proposals, ofp_proposals_free>>;
using Features = std::unique_ptr<ofp_features, Deleter<ofp_features, ofp_features_free>>;
using Vector = std::unique_ptr<ofp_vector, Deleter<ofp_vector, ofp_vector_free>>;
using Pca = std::unique_ptr<ofp_pca, Deleter<ofp_pca, ofp_pca_free>>;
using Itq = std::unique_ptr<ofp_itq, Deleter<ofp_itq, ofp_itq_free>>;
using Index = std::unique_ptr<ofp_index, Deleter<ofp_index, ofp_index_free>>;
using Ranking = std::unique_ptr<ofp_ranking, Deleter<ofp_ranking, ofp_ranking_free>>;
using RankingSet = std::unique_ptr<ofp_ranking_set, Deleter<ofp_ranking_set, ofp_ranking_set_free>>;
using GroundTruth = std::unique_ptr<ofp_ground_truth, Deleter<ofp_ground_truth, ofp_ground_truth_free>>;
using Report = std::unique_ptr<ofp_report, Deleter<ofp_report, ofp_report_free>>;

template <typename Handle, typename F>
Handle make(F&& fn) {
  typename Handle::pointer raw = nullptr;
  check(fn(&raw));
  return Handle(raw);
}

// Runs job(i) for i in [0, n) on up to `jobs` threads. Errors are reported
// for the lowest failing index so the diagnostic does not depend on timing.
void for_each_input(std::size_t n, unsigned jobs, const std::function<void(std::size_t)>& job) {
  std::vector<std::optional<std::string>> errors(n);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        job(i);
      } catch (const std::exception& e) {
        errors[i] = e.what();
      }
    }
  };
  const unsigned threads = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(n)));
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  for (const auto& e : errors) {
    if (e) throw CliError(*e);
  }
}

// One output per input: an explicit --out for a single input, otherwise
// <out-dir>/<input stem><extension>.
std::vector<std::string> output_paths(const std::vector<std::string>& inputs, const std::string& out,
                                      const std::string& out_dir, const std::string& extension) {
  if (!out.empty()) {
    if (inputs.size() != 1) throw CliError("--out takes a single input; use --out-dir for several");
    return {out};
  }
  if (out_dir.empty()) throw CliError("one of --out or --out-dir is required");
  fs::create_directories(out_dir);
  std::vector<std::string> paths;
  for (const auto& in : inputs) paths.push_back((fs::path(out_dir) / fs::path(in).stem()).string() + extension);
  return paths;
}

std::vector<Vector> read_vectors(const std::vector<std::string>& paths) {
  std::vector<Vector> reps;
  for (const auto& p : paths) reps.push_back(make<Vector>([&](ofp_vector** o) { return ofp_vector_read(p.c_str(), nullptr, o); }));
  return reps;
}

std::vector<const ofp_vector*> raw_pointers(const std::vector<Vector>& reps) {
  std::vector<const ofp_vector*> out;
  for (const auto& r : reps) out.push_back(r.get());
  return out;
}

// Maps a representation into the index payload space.
struct Encoder {
  Pca pca;
  Itq itq;

  static Encoder load(const std::string& metric, const std::string& pca_path, const std::string& itq_path) {
    Encoder e;
    if (metric == "hamming") {
      if (itq_path.empty()) throw CliError("the hamming metric needs --itq");
      if (!pca_path.empty()) throw CliError("--pca is embedded in the ITQ model; drop it for hamming");
      e.itq = make<Itq>([&](ofp_itq** o) { return ofp_itq_read(itq_path.c_str(), o); });
    } else {
      if (!itq_path.empty()) throw CliError("--itq applies to the hamming metric only");
      if (!pca_path.empty()) e.pca = make<Pca>([&](ofp_pca** o) { return ofp_pca_read(pca_path.c_str(), o); });
    }
    return e;
  }

  uint32_t width(std::size_t raw_dim) const {
    if (itq) return ofp_itq_bits(itq.get());
    if (pca) return ofp_pca_output_dim(pca.get());
    return static_cast<uint32_t>(raw_dim);
  }

  std::vector<float> vector(const ofp_vector* rep) const {
    const float* data = ofp_vector_data(rep);
    const std::size_t dim = ofp_vector_dim(rep);
    if (!pca) return {data, data + dim};
    std::vector<float> out(ofp_pca_output_dim(pca.get()));
    check(ofp_pca_project(pca.get(), data, dim, out.data(), out.size()));
    return out;
  }

  std::vector<uint8_t> code(const ofp_vector* rep) const {
    std::vector<uint8_t> out((ofp_itq_bits(itq.get()) + 7) / 8);
    check(ofp_itq_encode(itq.get(), ofp_vector_data(rep), ofp_vector_dim(rep), out.data(), out.size()));
    return out;
  }
};

void write_or_print(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw CliError("cannot write " + path);
  out << text;
}

std::string read_all(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CliError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Flat `key = value` config: every key becomes `--key value` for the chosen
// subcommand, placed ahead of the real arguments so explicit flags win.
std::vector<std::string> expand_config(std::vector<std::string> args) {
  std::string config_path;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config") {
      if (i + 1 >= args.size()) throw CliError("--config needs a file");
      config_path = args[i + 1];
      args.erase(args.begin() + static_cast<std::ptrdiff_t>(i), args.begin() + static_cast<std::ptrdiff_t>(i + 2));
      break;
    }
    if (args[i].rfind("--config=", 0) == 0) {
      config_path = args[i].substr(9);
      args.erase(args.begin() + static_cast<std::ptrdiff_t>(i));
      break;
    }
  }
  if (config_path.empty()) return args;
  if (args.empty()) throw CliError("--config needs a subcommand");

  std::vector<std::string> injected;
  std::istringstream lines(read_all(config_path));
  std::string line;
  int line_no = 0;
  auto trim = [](std::string s) {
    const auto b = s.find_first_not_of(" \t\r");
    const auto e = s.find_last_not_of(" \t\r");
    return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
  };
  while (std::getline(lines, line)) {
    ++line_no;
    line = trim(line);
    if (line.empty() || line[0] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw CliError(config_path + ":" + std::to_string(line_no) + ": expected key = value");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (value == "true") {
      injected.push_back("--" + key);
    } else if (value != "false") {
      injected.push_back("--" + key);
      injected.push_back(value);
    }
  }
  args.insert(args.begin() + 1, injected.begin(), injected.end());
  return args;
}

struct ProposeArgs {
  std::vector<std::string> inputs;
  std::string out, out_dir, image_id;
  double k = 100.0;
  uint32_t min_size = 50;
  double nms_iou = 0.9;
  uint32_t top_n = 500;
  uint64_t seed = 0;
  unsigned jobs = 1;
};

void run_propose(const ProposeArgs& a) {
  if (!a.image_id.empty() && a.inputs.size() != 1) throw CliError("--image-id takes a single input");
  const auto outs = output_paths(a.inputs, a.out, a.out_dir, ".props");
  ofp_proposal_params params;
  ofp_proposal_params_default(&params);
  params.k = a.k;
  params.min_size = a.min_size;
  params.nms_iou = a.nms_iou;
  params.top_n = a.top_n;
  params.seed = a.seed;
  for_each_input(a.inputs.size(), a.jobs, [&](std::size_t i) {
    const std::string id = a.image_id.empty() ? fs::path(a.inputs[i]).stem().string() : a.image_id;
    auto img = make<Image>([&](ofp_image** o) { return ofp_image_read_ppm(a.inputs[i].c_str(), o); });
    auto set = make<Proposals>([&](ofp_proposals** o) { return ofp_propose(img.get(), id.c_str(), &params, o); });
    check(ofp_proposals_write(set.get(), outs[i].c_str()));
  });
}

struct DescribeArgs {
  std::vector<std::string> inputs, proposals, features;
  std::string out, out_dir;
  std::string descriptor = "builtin";
  bool normalize_rows = false;
  unsigned jobs = 1;
};

void run_describe(const DescribeArgs& a) {
  if (a.proposals.size() != a.inputs.size()) throw CliError("give one --proposals file per --input image");
  const bool external = a.descriptor == "external";
  if (external && a.features.size() != a.inputs.size()) {
    throw CliError("configuration error: external descriptor needs one --features file per input");
  }
  const auto outs = output_paths(a.inputs, a.out, a.out_dir, ".ofpf");
  for_each_input(a.inputs.size(), a.jobs, [&](std::size_t i) {
    auto img = make<Image>([&](ofp_image** o) { return ofp_image_read_ppm(a.inputs[i].c_str(), o); });
    auto set = make<Proposals>([&](ofp_proposals** o) { return ofp_proposals_read(a.proposals[i].c_str(), o); });
    auto feats = make<Features>([&](ofp_features** o) {
      return ofp_describe(img.get(), set.get(), external ? OFP_DESCRIPTOR_EXTERNAL : OFP_DESCRIPTOR_BUILTIN,
                          external ? a.features[i].c_str() : nullptr, a.normalize_rows ? 1 : 0, o);
    });
    check(ofp_ofpf_write(set.get(), feats.get(), outs[i].c_str()));
  });
}

struct PoolArgs {
  std::vector<std::string> inputs;
  std::string out, out_dir;
  bool l2_normalize = false;
  unsigned jobs = 1;
};

void run_pool(const PoolArgs& a) {
  const auto outs = output_paths(a.inputs, a.out, a.out_dir, ".rep");
  for_each_input(a.inputs.size(), a.jobs, [&](std::size_t i) {
    ofp_proposals* raw_set = nullptr;
    ofp_features* raw_feats = nullptr;
    check(ofp_ofpf_read(a.inputs[i].c_str(), nullptr, &raw_set, &raw_feats));
    Proposals set(raw_set);
    Features feats(raw_feats);
    auto rep = make<Vector>([&](ofp_vector** o) { return ofp_pool(set.get(), feats.get(), a.l2_normalize ? 1 : 0, o); });
    check(ofp_vector_write(rep.get(), outs[i].c_str()));
  });
}

struct FitArgs {
  std::vector<std::string> inputs;
  std::string out;
  uint32_t dim = 0;
  uint32_t bits = 0;
  uint32_t iters = 50;
  uint64_t seed = 0;
};

void run_fit_pca(const FitArgs& a) {
  const auto reps = read_vectors(a.inputs);
  const auto ptrs = raw_pointers(reps);
  auto model = make<Pca>([&](ofp_pca** o) { return ofp_pca_fit(ptrs.data(), ptrs.size(), a.dim, o); });
  check(ofp_pca_write(model.get(), a.out.c_str()));
}

void run_fit_itq(const FitArgs& a) {
  const auto reps = read_vectors(a.inputs);
  const auto ptrs = raw_pointers(reps);
  auto model = make<Itq>([&](ofp_itq** o) { return ofp_itq_fit(ptrs.data(), ptrs.size(), a.bits, a.iters, a.seed, o); });
  check(ofp_itq_write(model.get(), a.out.c_str()));
}

struct IndexArgs {
  std::vector<std::string> inputs;
  std::string out, metric = "l2", pca, itq;
};

void run_index(const IndexArgs& a) {
  const auto reps = read_vectors(a.inputs);
  const Encoder enc = Encoder::load(a.metric, a.pca, a.itq);
  const bool hamming = a.metric == "hamming";
  const uint32_t width = enc.width(reps.empty() ? 0 : ofp_vector_dim(reps.front().get()));
  if (width == 0) throw CliError("cannot infer the index width from zero inputs; pass --pca or --itq");
  auto index = make<Index>([&](ofp_index** o) { return ofp_index_create(hamming ? OFP_METRIC_HAMMING : OFP_METRIC_L2, width, o); });
  for (const auto& rep : reps) {
    const char* id = ofp_vector_image_id(rep.get());
    if (hamming) {
      const auto code = enc.code(rep.get());
      check(ofp_index_add_code(index.get(), id, code.data(), code.size()));
    } else {
      const auto v = enc.vector(rep.get());
      check(ofp_index_add_vector(index.get(), id, v.data(), v.size()));
    }
  }
  check(ofp_index_write(index.get(), a.out.c_str()));
}

struct SearchArgs {
  std::string index, metric, pca, itq, out;
  std::vector<std::string> queries;
  std::size_t k = 10;
  bool with_header = false;
};

void run_search(const SearchArgs& a) {
  auto index = make<Index>([&](ofp_index** o) { return ofp_index_read(a.index.c_str(), o); });
  const std::string metric = ofp_index_metric(index.get()) == OFP_METRIC_HAMMING ? "hamming" : "l2";
  if (!a.metric.empty() && a.metric != metric) {
    throw CliError("--metric " + a.metric + " does not match the index metric " + metric);
  }
  const Encoder enc = Encoder::load(metric, a.pca, a.itq);
  const auto reps = read_vectors(a.queries);
  auto set = make<RankingSet>([](ofp_ranking_set** o) { return ofp_ranking_set_create(o); });
  for (const auto& rep : reps) {
    const char* id = ofp_vector_image_id(rep.get());
    Ranking r;
    if (metric == "hamming") {
      const auto code = enc.code(rep.get());
      r = make<Ranking>([&](ofp_ranking** o) { return ofp_index_search_code(index.get(), id, code.data(), code.size(), a.k, o); });
    } else {
      const auto v = enc.vector(rep.get());
      r = make<Ranking>([&](ofp_ranking** o) { return ofp_index_search_vector(index.get(), id, v.data(), v.size(), a.k, o); });
    }
    check(ofp_ranking_set_add(set.get(), r.get()));
  }
  const bool header = a.with_header || reps.size() > 1;
  std::size_t needed = 0;
  check(ofp_ranking_set_format(set.get(), header ? 1 : 0, nullptr, 0, &needed));
  std::string text(needed, '\0');
  check(ofp_ranking_set_format(set.get(), header ? 1 : 0, text.data(), text.size(), &needed));
  write_or_print(a.out, text);
}

struct EvaluateArgs {
  std::vector<std::string> rankings;
  std::string gt, protocol = "map", out;
  bool no_exclude_query = false;
};

void run_evaluate(const EvaluateArgs& a) {
  auto gt = make<GroundTruth>([&](ofp_ground_truth** o) { return ofp_ground_truth_read(a.gt.c_str(), o); });
  auto set = make<RankingSet>([](ofp_ranking_set** o) { return ofp_ranking_set_create(o); });
  for (const auto& path : a.rankings) check(ofp_ranking_set_read(set.get(), path.c_str(), nullptr));
  Report report;
  if (a.protocol == "ukb") {
    report = make<Report>([&](ofp_report** o) { return ofp_evaluate_ukb(set.get(), gt.get(), o); });
  } else {
    report = make<Report>([&](ofp_report** o) { return ofp_evaluate_map(set.get(), gt.get(), a.no_exclude_query ? 0 : 1, o); });
  }
  write_or_print(a.out, ofp_report_text(report.get()));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Object-level feature pooling: proposals, descriptors, pooling, compact codes and retrieval"};
  app.require_subcommand(1);
  app.set_version_flag("--version", ofp_version());
  app.option_defaults()->always_capture_default();

  auto jobs_check = CLI::Range(1u, 256u);

  ProposeArgs pa;
  auto* propose = app.add_subcommand("propose", "Selective-search proposals, IoU-suppressed and truncated");
  propose->add_option("--input", pa.inputs, "Input PPM image(s)")->required();
  propose->add_option("--out", pa.out, "Proposal file (single input)");
  propose->add_option("--out-dir", pa.out_dir, "Directory for <stem>.props outputs");
  propose->add_option("--image-id", pa.image_id, "Image id (single input; default: file stem)");
  propose->add_option("--k", pa.k, "Segmentation scale parameter")->check(CLI::PositiveNumber)->take_last();
  propose->add_option("--min-size", pa.min_size, "Minimum segment size in pixels")->check(CLI::Range(1u, 1u << 30))->take_last();
  propose->add_option("--nms-iou", pa.nms_iou, "IoU rejection threshold in (0,1]")->take_last();
  propose->add_option("--top-n", pa.top_n, "Proposals kept after suppression")->check(CLI::Range(1u, 1u << 30))->take_last();
  propose->add_option("--seed", pa.seed, "Score randomization seed")->take_last();
  propose->add_option("--jobs", pa.jobs, "Worker threads")->check(jobs_check)->take_last();

  DescribeArgs da;
  auto* describe = app.add_subcommand("describe", "Per-proposal descriptors written as OFPF");
  describe->add_option("--input", da.inputs, "Input PPM image(s)")->required();
  describe->add_option("--proposals", da.proposals, "Proposal file per image")->required();
  describe->add_option("--out", da.out, "OFPF file (single input)");
  describe->add_option("--out-dir", da.out_dir, "Directory for <stem>.ofpf outputs");
  describe->add_option("--descriptor", da.descriptor, "Descriptor source")
      ->check(CLI::IsMember({"builtin", "external"}))->take_last();
  describe->add_option("--features", da.features, "External OFPF feature file per image");
  describe->add_flag("--normalize-rows", da.normalize_rows, "l2-normalize each region descriptor");
  describe->add_option("--jobs", da.jobs, "Worker threads")->check(jobs_check)->take_last();

  PoolArgs pl;
  auto* pool = app.add_subcommand("pool", "Max-pool region descriptors into one representation");
  pool->add_option("--input", pl.inputs, "OFPF feature file(s)")->required();
  pool->add_option("--out", pl.out, "Representation file (single input)");
  pool->add_option("--out-dir", pl.out_dir, "Directory for <stem>.rep outputs");
  pool->add_flag("--l2-normalize", pl.l2_normalize, "l2-normalize the pooled vector");
  pool->add_option("--jobs", pl.jobs, "Worker threads")->check(jobs_check)->take_last();

  FitArgs fp;
  auto* fit_pca = app.add_subcommand("fit-pca", "Fit a PCA model on representations");
  fit_pca->add_option("--input,inputs", fp.inputs, "Representation files")->required();
  fit_pca->add_option("--dim", fp.dim, "Output dimension")->required()->take_last();
  fit_pca->add_option("--out", fp.out, "OFPM model file")->required();

  FitArgs fq;
  fq.iters = 50;
  auto* fit_itq = app.add_subcommand("fit-itq", "Fit an ITQ binary code model on representations");
  fit_itq->add_option("--input,inputs", fq.inputs, "Representation files")->required();
  fit_itq->add_option("--bits", fq.bits, "Code length in bits")->required()->take_last();
  fit_itq->add_option("--iters", fq.iters, "Alternating minimization iterations")->take_last();
  fit_itq->add_option("--seed", fq.seed, "Rotation initialization seed")->required()->take_last();
  fit_itq->add_option("--out", fq.out, "OFPQ model file")->required();

  IndexArgs ia;
  auto* index = app.add_subcommand("index", "Build a retrieval index from representations");
  index->add_option("--input,inputs", ia.inputs, "Representation files")->required();
  index->add_option("--metric", ia.metric, "Distance")->check(CLI::IsMember({"l2", "hamming"}))->take_last();
  index->add_option("--pca", ia.pca, "OFPM model applied before indexing (l2)");
  index->add_option("--itq", ia.itq, "OFPQ model used to encode (hamming)");
  index->add_option("--out", ia.out, "OFPI index file")->required();

  SearchArgs sa;
  auto* search = app.add_subcommand("search", "Exact k-nearest-neighbor search");
  search->add_option("--index", sa.index, "OFPI index file")->required();
  search->add_option("--query,queries", sa.queries, "Query representation file(s)")->required();
  search->add_option("--k", sa.k, "Results per query")->check(CLI::PositiveNumber)->take_last();
  search->add_option("--metric", sa.metric, "Expected index metric")->check(CLI::IsMember({"l2", "hamming"}));
  search->add_option("--pca", sa.pca, "OFPM model used when the index was built");
  search->add_option("--itq", sa.itq, "OFPQ model used when the index was built");
  search->add_option("--out", sa.out, "Ranking file (default: stdout)");
  search->add_flag("--with-header", sa.with_header, "Emit `# query <id>` before each list");

  EvaluateArgs ea;
  auto* evaluate = app.add_subcommand("evaluate", "Score rankings against ground truth");
  evaluate->add_option("--rankings,rankings", ea.rankings, "Ranking file(s)")->required();
  evaluate->add_option("--gt", ea.gt, "Ground-truth file")->required();
  evaluate->add_option("--protocol", ea.protocol, "map (query-excluded mAP) or ukb (4 x precision@4)")
      ->check(CLI::IsMember({"map", "ukb"}))->take_last();
  evaluate->add_flag("--no-exclude-query", ea.no_exclude_query, "Keep the query in its own ranking (map)");
  evaluate->add_option("--out", ea.out, "Report file (default: stdout)");

  try {
    std::vector<std::string> args(argv + 1, argv + argc);
    args = expand_config(std::move(args));
    std::reverse(args.begin(), args.end());
    app.parse(args);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    std::cerr << "ofp: error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "ofp: error: " << e.what() << "\n";
    return 2;
  }

  try {
    if (propose->parsed()) run_propose(pa);
    if (describe->parsed()) run_describe(da);
    if (pool->parsed()) run_pool(pl);
    if (fit_pca->parsed()) run_fit_pca(fp);
    if (fit_itq->parsed()) run_fit_itq(fq);
    if (index->parsed()) run_index(ia);
    if (search->parsed()) run_search(sa);
    if (evaluate->parsed()) run_evaluate(ea);
  } catch (const std::exception& e) {
    std::cerr << "ofp: error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
