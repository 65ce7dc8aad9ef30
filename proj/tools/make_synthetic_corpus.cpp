// Writes the synthetic retrieval corpus (or a random training set) as PPM files.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "ofp/ofp.h"
#include "synthetic.hpp"

namespace fs = std::filesystem;

namespace {

bool write_scene(const ofp::synthetic::Scene& scene, const fs::path& dir) {
  ofp_image* img = nullptr;
  const auto& c = scene.canvas;
  ofp_status st = ofp_image_from_rgb(c.width(), c.height(), c.rgb().data(), &img);
  if (st == OFP_OK) st = ofp_image_write_ppm(img, (dir / (scene.id + ".ppm")).string().c_str());
  ofp_image_free(img);
  if (st != OFP_OK) {
    std::fprintf(stderr, "make_synthetic_corpus: %s\n", ofp_last_error());
    return false;
  }
  return true;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Generate synthetic scenes"};
  std::string out_dir;
  std::size_t training = 0;
  std::uint64_t seed = 1;
  app.add_option("--out-dir", out_dir, "Output directory")->required();
  app.add_option("--training", training, "Write N random training scenes instead of the corpus");
  app.add_option("--seed", seed, "Seed for training scenes");
  CLI11_PARSE(app, argc, argv);

  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) {
    std::fprintf(stderr, "make_synthetic_corpus: cannot create %s: %s\n", out_dir.c_str(), ec.message().c_str());
    return 1;
  }

  if (training > 0) {
    for (const auto& scene : ofp::synthetic::training_scenes(training, seed))
      if (!write_scene(scene, out_dir)) return 1;
    return 0;
  }

  const auto scenes = ofp::synthetic::retrieval_corpus();
  std::map<int, std::vector<std::string>> groups;
  for (const auto& scene : scenes) {
    if (!write_scene(scene, out_dir)) return 1;
    groups[scene.group].push_back(scene.id);
  }
  std::ofstream gt(fs::path(out_dir) / "ground_truth.txt");
  for (const auto& scene : scenes) {
    gt << scene.id << '\t';
    const auto& members = groups[scene.group];
    for (std::size_t i = 0; i < members.size(); ++i) gt << (i ? "," : "") << members[i];
    gt << '\n';
  }
  if (!gt) {
    std::fprintf(stderr, "make_synthetic_corpus: cannot write ground truth\n");
    return 1;
  }
  return 0;
}
