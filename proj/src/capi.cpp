#include "ofp/ofp.h"

#include <algorithm>
#include <cstring>
#include <filesystem>
#include <memory>
#include <new>
#include <string>
#include <utility>
#include <vector>

#include "compression.hpp"
#include "descriptors.hpp"
#include "error.hpp"
#include "eval.hpp"
#include "fileio.hpp"
#include "index.hpp"
#include "ofpf.hpp"
#include "pooling.hpp"
#include "proposals.hpp"
#include "raster.hpp"

struct ofp_image {
  ofp::RasterImage img;
};
struct ofp_proposals {
  ofp::ProposalSet set;
};
struct ofp_features {
  ofp::FeatureMatrix feats;
};
struct ofp_vector {
  ofp::PooledRepresentation rep;
  ofp::BoundingBox extent;
};
struct ofp_pca {
  ofp::PcaModel model;
};
struct ofp_itq {
  ofp::ItqModel model;
};
struct ofp_index {
  ofp::RetrievalIndex index;
};
struct ofp_ranking {
  ofp::RankedList list;
};
struct ofp_ranking_set {
  std::vector<ofp_ranking> lists;
};
struct ofp_ground_truth {
  ofp::GroundTruth gt;
};
struct ofp_report {
  ofp::EvalReport report;
  std::string text;
};

namespace {

thread_local std::string last_error;

ofp_status to_status(ofp::ErrorKind kind) {
  switch (kind) {
    case ofp::ErrorKind::kArgument: return OFP_ERR_ARGUMENT;
    case ofp::ErrorKind::kBounds: return OFP_ERR_BOUNDS;
    case ofp::ErrorKind::kDecode: return OFP_ERR_DECODE;
    case ofp::ErrorKind::kFormat: return OFP_ERR_FORMAT;
    case ofp::ErrorKind::kProtocol: return OFP_ERR_PROTOCOL;
    case ofp::ErrorKind::kConfig: return OFP_ERR_CONFIG;
    case ofp::ErrorKind::kEmptyInput: return OFP_ERR_EMPTY_INPUT;
    case ofp::ErrorKind::kIo: return OFP_ERR_IO;
  }
  return OFP_ERR_INTERNAL;
}

template <typename F>
ofp_status guarded(F&& body) {
  try {
    body();
    return OFP_OK;
  } catch (const ofp::Error& e) {
    last_error = e.what();
    return to_status(e.kind());
  } catch (const std::bad_alloc&) {
    last_error = "out of memory";
    return OFP_ERR_INTERNAL;
  } catch (const std::exception& e) {
    last_error = e.what();
    return OFP_ERR_INTERNAL;
  }
}

template <typename T>
void require(const T* p, const char* name) {
  if (p == nullptr) ofp::fail(ofp::ErrorKind::kArgument, std::string(name) + " must not be NULL");
}

std::string id_or_empty(const char* id) { return id == nullptr ? std::string() : std::string(id); }

ofp::BoundingBox to_box(ofp_box b) { return {b.x, b.y, b.w, b.h}; }
ofp_box from_box(const ofp::BoundingBox& b) { return {b.x, b.y, b.w, b.h}; }

Eigen::MatrixXd stack(const ofp_vector* const* reps, std::size_t count) {
  require(reps, "reps");
  if (count == 0) ofp::fail(ofp::ErrorKind::kArgument, "no representations to fit on");
  require(reps[0], "reps[0]");
  const std::size_t dim = reps[0]->rep.vector.size();
  Eigen::MatrixXd data(static_cast<Eigen::Index>(count), static_cast<Eigen::Index>(dim));
  for (std::size_t i = 0; i < count; ++i) {
    require(reps[i], "reps[i]");
    const auto& v = reps[i]->rep.vector;
    if (v.size() != dim) {
      ofp::fail(ofp::ErrorKind::kArgument, "representation '" + reps[i]->rep.image_id + "' has dim " +
                                               std::to_string(v.size()) + ", expected " +
                                               std::to_string(dim));
    }
    for (std::size_t j = 0; j < dim; ++j) {
      data(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = v[j];
    }
  }
  return data;
}

std::vector<ofp::RankedList> lists_of(const ofp_ranking_set* set) {
  std::vector<ofp::RankedList> out;
  out.reserve(set->lists.size());
  for (const ofp_ranking& r : set->lists) out.push_back(r.list);
  return out;
}

}  // namespace

extern "C" {

const char* ofp_version(void) { return "1.0.0"; }

const char* ofp_status_name(ofp_status status) {
  switch (status) {
    case OFP_OK: return "ok";
    case OFP_ERR_ARGUMENT: return "argument error";
    case OFP_ERR_BOUNDS: return "bounds error";
    case OFP_ERR_DECODE: return "decode error";
    case OFP_ERR_FORMAT: return "format error";
    case OFP_ERR_PROTOCOL: return "protocol error";
    case OFP_ERR_CONFIG: return "configuration error";
    case OFP_ERR_EMPTY_INPUT: return "empty input";
    case OFP_ERR_IO: return "i/o error";
    case OFP_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

const char* ofp_last_error(void) { return last_error.c_str(); }

/* images */

ofp_status ofp_image_read_ppm(const char* path, ofp_image** out) {
  return guarded([&] {
    require(path, "path");
    require(out, "out");
    *out = new ofp_image{ofp::decode_ppm(ofp::read_file(path))};
  });
}

ofp_status ofp_image_decode_ppm(const uint8_t* bytes, size_t len, ofp_image** out) {
  return guarded([&] {
    require(bytes, "bytes");
    require(out, "out");
    *out = new ofp_image{ofp::decode_ppm({bytes, len})};
  });
}

ofp_status ofp_image_from_rgb(uint32_t width, uint32_t height, const uint8_t* rgb, ofp_image** out) {
  return guarded([&] {
    require(rgb, "rgb");
    require(out, "out");
    std::vector<uint8_t> pixels(rgb, rgb + std::size_t{width} * height * 3);
    *out = new ofp_image{ofp::RasterImage(width, height, std::move(pixels))};
  });
}

ofp_status ofp_image_write_ppm(const ofp_image* img, const char* path) {
  return guarded([&] {
    require(img, "img");
    require(path, "path");
    ofp::write_file(path, ofp::encode_ppm(img->img));
  });
}

ofp_status ofp_image_crop(const ofp_image* img, ofp_box box, ofp_image** out) {
  return guarded([&] {
    require(img, "img");
    require(out, "out");
    *out = new ofp_image{ofp::crop(img->img, to_box(box))};
  });
}

ofp_status ofp_image_resize(const ofp_image* img, uint32_t width, uint32_t height, ofp_image** out) {
  return guarded([&] {
    require(img, "img");
    require(out, "out");
    *out = new ofp_image{ofp::resize_bilinear(img->img, width, height)};
  });
}

uint32_t ofp_image_width(const ofp_image* img) { return img == nullptr ? 0 : img->img.width(); }
uint32_t ofp_image_height(const ofp_image* img) { return img == nullptr ? 0 : img->img.height(); }
const uint8_t* ofp_image_pixels(const ofp_image* img) {
  return img == nullptr ? nullptr : img->img.pixels().data();
}
void ofp_image_free(ofp_image* img) { delete img; }

/* proposals */

void ofp_proposal_params_default(ofp_proposal_params* params) {
  if (params == nullptr) return;
  params->k = 100.0;
  params->min_size = 50;
  params->seed = 0;
  params->nms_iou = 0.9;
  params->top_n = 500;
}

ofp_status ofp_propose(const ofp_image* img, const char* image_id, const ofp_proposal_params* params,
                       ofp_proposals** out) {
  return guarded([&] {
    require(img, "img");
    require(params, "params");
    require(out, "out");
    // Validate suppression arguments before the expensive grouping step.
    ofp::nms_filter({}, params->nms_iou, params->top_n);
    const auto raw = ofp::selective_search(img->img, id_or_empty(image_id),
                                           {params->k, params->min_size, params->seed});
    *out = new ofp_proposals{ofp::nms_filter(raw, params->nms_iou, params->top_n)};
  });
}

ofp_status ofp_selective_search(const ofp_image* img, const char* image_id, double k, uint32_t min_size,
                                uint64_t seed, ofp_proposals** out) {
  return guarded([&] {
    require(img, "img");
    require(out, "out");
    *out = new ofp_proposals{ofp::selective_search(img->img, id_or_empty(image_id), {k, min_size, seed})};
  });
}

ofp_status ofp_proposals_nms(const ofp_proposals* set, double iou_threshold, uint32_t top_n,
                             ofp_proposals** out) {
  return guarded([&] {
    require(set, "set");
    require(out, "out");
    *out = new ofp_proposals{ofp::nms_filter(set->set, iou_threshold, top_n)};
  });
}

ofp_status ofp_proposals_create(const char* image_id, const ofp_box* boxes, const float* scores,
                                size_t count, ofp_proposals** out) {
  return guarded([&] {
    require(out, "out");
    if (count > 0) {
      require(boxes, "boxes");
      require(scores, "scores");
    }
    ofp::ProposalSet set;
    set.image_id = id_or_empty(image_id);
    for (size_t i = 0; i < count; ++i) {
      if (boxes[i].w == 0 || boxes[i].h == 0) ofp::fail(ofp::ErrorKind::kArgument, "empty box");
      if (!(scores[i] >= 0.0f && scores[i] <= 1.0f)) {
        ofp::fail(ofp::ErrorKind::kArgument, "proposal score outside [0,1]");
      }
      if (i > 0 && scores[i] > scores[i - 1]) {
        ofp::fail(ofp::ErrorKind::kArgument, "proposal scores must be non-increasing");
      }
      set.proposals.push_back({to_box(boxes[i]), scores[i]});
    }
    *out = new ofp_proposals{std::move(set)};
  });
}

ofp_status ofp_proposals_read(const char* path, ofp_proposals** out) {
  return guarded([&] {
    require(path, "path");
    require(out, "out");
    auto set = ofp::parse_proposals(ofp::read_text_file(path));
    if (set.image_id.empty()) set.image_id = std::filesystem::path(path).stem().string();
    *out = new ofp_proposals{std::move(set)};
  });
}

ofp_status ofp_proposals_write(const ofp_proposals* set, const char* path) {
  return guarded([&] {
    require(set, "set");
    require(path, "path");
    ofp::write_text_file(path, ofp::format_proposals(set->set));
  });
}

size_t ofp_proposals_count(const ofp_proposals* set) { return set == nullptr ? 0 : set->set.size(); }
const char* ofp_proposals_image_id(const ofp_proposals* set) {
  return set == nullptr ? "" : set->set.image_id.c_str();
}

ofp_status ofp_proposals_get(const ofp_proposals* set, size_t i, ofp_box* box, float* score) {
  return guarded([&] {
    require(set, "set");
    if (i >= set->set.size()) ofp::fail(ofp::ErrorKind::kArgument, "proposal index out of range");
    if (box != nullptr) *box = from_box(set->set.proposals[i].box);
    if (score != nullptr) *score = set->set.proposals[i].score;
  });
}

void ofp_proposals_free(ofp_proposals* set) { delete set; }

double ofp_iou(ofp_box a, ofp_box b) { return ofp::iou(to_box(a), to_box(b)); }

/* descriptors */

ofp_status ofp_describe(const ofp_image* img, const ofp_proposals* set, ofp_descriptor_kind kind,
                        const char* external_ofpf, int normalize_rows, ofp_features** out) {
  return guarded([&] {
    require(img, "img");
    require(set, "set");
    require(out, "out");
    ofp::DescriptorSource source;
    source.normalize_rows = normalize_rows != 0;
    if (kind == OFP_DESCRIPTOR_EXTERNAL) {
      source.kind = ofp::DescriptorKind::kExternal;
      if (external_ofpf != nullptr) {
        auto [ext_set, ext_feats] = ofp::read_ofpf(ofp::read_file(external_ofpf));
        source.external_proposals = std::move(ext_set);
        source.external_features = std::move(ext_feats);
      }
    } else if (kind != OFP_DESCRIPTOR_BUILTIN) {
      ofp::fail(ofp::ErrorKind::kArgument, "unknown descriptor kind");
    }
    *out = new ofp_features{ofp::describe_regions(img->img, set->set, source)};
  });
}

ofp_status ofp_builtin_descriptor(const ofp_image* region, float* out, size_t len) {
  return guarded([&] {
    require(region, "region");
    require(out, "out");
    if (len != ofp::kBuiltinDescriptorDim) {
      ofp::fail(ofp::ErrorKind::kArgument, "builtin descriptor needs a 128-float buffer");
    }
    const auto d = ofp::builtin_descriptor(region->img);
    std::memcpy(out, d.data(), d.size() * sizeof(float));
  });
}

size_t ofp_features_rows(const ofp_features* feats) { return feats == nullptr ? 0 : feats->feats.rows(); }
uint32_t ofp_features_dim(const ofp_features* feats) { return feats == nullptr ? 0 : feats->feats.dim(); }
const float* ofp_features_row(const ofp_features* feats, size_t i) {
  if (feats == nullptr || i >= feats->feats.rows()) return nullptr;
  return feats->feats.row(i).data();
}
void ofp_features_free(ofp_features* feats) { delete feats; }

ofp_status ofp_ofpf_write(const ofp_proposals* set, const ofp_features* feats, const char* path) {
  return guarded([&] {
    require(set, "set");
    require(feats, "feats");
    require(path, "path");
    ofp::write_file(path, ofp::write_ofpf(set->set, feats->feats));
  });
}

ofp_status ofp_ofpf_read(const char* path, const char* image_id, ofp_proposals** set, ofp_features** feats) {
  return guarded([&] {
    require(path, "path");
    require(set, "set");
    require(feats, "feats");
    auto [s, f] = ofp::read_ofpf(ofp::read_file(path));
    const std::string id =
        image_id != nullptr ? std::string(image_id) : std::filesystem::path(path).stem().string();
    s.image_id = id;
    f.set_image_id(id);
    auto owned_set = std::make_unique<ofp_proposals>(ofp_proposals{std::move(s)});
    *feats = new ofp_features{std::move(f)};
    *set = owned_set.release();
  });
}

/* pooling */

ofp_status ofp_pool(const ofp_proposals* set, const ofp_features* feats, int l2_normalize,
                    ofp_vector** out) {
  return guarded([&] {
    require(set, "set");
    require(feats, "feats");
    require(out, "out");
    if (set->set.size() != feats->feats.rows()) {
      ofp::fail(ofp::ErrorKind::kArgument, "proposal and feature counts differ");
    }
    auto rep = ofp::max_pool(feats->feats);
    rep.image_id = set->set.image_id;
    if (l2_normalize != 0) rep = ofp::l2_normalize(std::move(rep));
    *out = new ofp_vector{std::move(rep), ofp::proposals_extent(set->set)};
  });
}

ofp_status ofp_vector_create(const char* image_id, const float* values, size_t dim, ofp_vector** out) {
  return guarded([&] {
    require(values, "values");
    require(out, "out");
    if (dim == 0) ofp::fail(ofp::ErrorKind::kArgument, "vector dim must be >= 1");
    *out = new ofp_vector{{id_or_empty(image_id), {values, values + dim}, false}, {0, 0, 1, 1}};
  });
}

ofp_status ofp_vector_write(const ofp_vector* rep, const char* path) {
  return guarded([&] {
    require(rep, "rep");
    require(path, "path");
    ofp::write_file(path, ofp::write_representation(rep->rep, rep->extent));
  });
}

ofp_status ofp_vector_read(const char* path, const char* image_id, ofp_vector** out) {
  return guarded([&] {
    require(path, "path");
    require(out, "out");
    ofp::BoundingBox extent;
    auto rep = ofp::read_representation(ofp::read_file(path), &extent);
    rep.image_id =
        image_id != nullptr ? std::string(image_id) : std::filesystem::path(path).stem().string();
    *out = new ofp_vector{std::move(rep), extent};
  });
}

size_t ofp_vector_dim(const ofp_vector* rep) { return rep == nullptr ? 0 : rep->rep.vector.size(); }
const float* ofp_vector_data(const ofp_vector* rep) { return rep == nullptr ? nullptr : rep->rep.vector.data(); }
int ofp_vector_normalized(const ofp_vector* rep) { return rep != nullptr && rep->rep.normalized ? 1 : 0; }
const char* ofp_vector_image_id(const ofp_vector* rep) { return rep == nullptr ? "" : rep->rep.image_id.c_str(); }
void ofp_vector_free(ofp_vector* rep) { delete rep; }

/* compression */

ofp_status ofp_pca_fit(const ofp_vector* const* reps, size_t count, uint32_t dim, ofp_pca** out) {
  return guarded([&] {
    require(out, "out");
    *out = new ofp_pca{ofp::fit_pca(stack(reps, count), dim)};
  });
}

ofp_status ofp_pca_read(const char* path, ofp_pca** out) {
  return guarded([&] {
    require(path, "path");
    require(out, "out");
    *out = new ofp_pca{ofp::read_pca(ofp::read_file(path))};
  });
}

ofp_status ofp_pca_write(const ofp_pca* model, const char* path) {
  return guarded([&] {
    require(model, "model");
    require(path, "path");
    ofp::write_file(path, ofp::write_pca(model->model));
  });
}

uint32_t ofp_pca_input_dim(const ofp_pca* model) { return model == nullptr ? 0 : model->model.input_dim; }
uint32_t ofp_pca_output_dim(const ofp_pca* model) { return model == nullptr ? 0 : model->model.output_dim; }

ofp_status ofp_pca_explained_variance(const ofp_pca* model, double* out, size_t len) {
  return guarded([&] {
    require(model, "model");
    require(out, "out");
    if (len != model->model.output_dim) ofp::fail(ofp::ErrorKind::kArgument, "buffer length must equal output dim");
    for (size_t i = 0; i < len; ++i) out[i] = model->model.explained_variance[static_cast<Eigen::Index>(i)];
  });
}

ofp_status ofp_pca_project(const ofp_pca* model, const float* x, size_t len, float* out, size_t out_len) {
  return guarded([&] {
    require(model, "model");
    require(x, "x");
    require(out, "out");
    if (out_len != model->model.output_dim) {
      ofp::fail(ofp::ErrorKind::kArgument, "output buffer length must equal PCA output dim");
    }
    const Eigen::VectorXd y = ofp::pca_project(model->model, std::span<const float>(x, len));
    for (size_t i = 0; i < out_len; ++i) out[i] = static_cast<float>(y[static_cast<Eigen::Index>(i)]);
  });
}

void ofp_pca_free(ofp_pca* model) { delete model; }

ofp_status ofp_itq_fit(const ofp_vector* const* reps, size_t count, uint32_t bits, uint32_t iters,
                       uint64_t seed, ofp_itq** out) {
  return guarded([&] {
    require(out, "out");
    *out = new ofp_itq{ofp::fit_itq(stack(reps, count), bits, iters, seed)};
  });
}

ofp_status ofp_itq_read(const char* path, ofp_itq** out) {
  return guarded([&] {
    require(path, "path");
    require(out, "out");
    *out = new ofp_itq{ofp::read_itq(ofp::read_file(path))};
  });
}

ofp_status ofp_itq_write(const ofp_itq* model, const char* path) {
  return guarded([&] {
    require(model, "model");
    require(path, "path");
    ofp::write_file(path, ofp::write_itq(model->model));
  });
}

uint32_t ofp_itq_bits(const ofp_itq* model) { return model == nullptr ? 0 : model->model.bits; }
uint32_t ofp_itq_input_dim(const ofp_itq* model) { return model == nullptr ? 0 : model->model.pca.input_dim; }
size_t ofp_itq_loss_trace_len(const ofp_itq* model) {
  return model == nullptr ? 0 : model->model.loss_trace.size();
}
double ofp_itq_loss_trace_at(const ofp_itq* model, size_t i) {
  if (model == nullptr || i >= model->model.loss_trace.size()) return 0.0;
  return model->model.loss_trace[i];
}

ofp_status ofp_itq_encode(const ofp_itq* model, const float* x, size_t len, uint8_t* out, size_t out_len) {
  return guarded([&] {
    require(model, "model");
    require(x, "x");
    require(out, "out");
    if (out_len != ofp::BinaryCode::bytes_for(model->model.bits)) {
      ofp::fail(ofp::ErrorKind::kArgument, "code buffer must hold exactly ceil(bits/8) bytes");
    }
    const auto code = ofp::itq_encode(model->model, std::span<const float>(x, len));
    std::memcpy(out, code.payload.data(), code.payload.size());
  });
}

void ofp_itq_free(ofp_itq* model) { delete model; }

/* index */

uint32_t ofp_hamming_distance(const uint8_t* a, const uint8_t* b, size_t len) {
  if (a == nullptr || b == nullptr) return 0;
  ofp::BinaryCode ca(static_cast<uint32_t>(len * 8));
  ofp::BinaryCode cb(static_cast<uint32_t>(len * 8));
  std::memcpy(ca.payload.data(), a, len);
  std::memcpy(cb.payload.data(), b, len);
  return ofp::hamming_distance(ca, cb);
}

ofp_status ofp_index_create(ofp_metric metric, uint32_t width, ofp_index** out) {
  return guarded([&] {
    require(out, "out");
    if (metric != OFP_METRIC_L2 && metric != OFP_METRIC_HAMMING) {
      ofp::fail(ofp::ErrorKind::kArgument, "unknown metric");
    }
    *out = new ofp_index{ofp::RetrievalIndex(static_cast<ofp::Metric>(metric), width)};
  });
}

ofp_status ofp_index_add_vector(ofp_index* index, const char* image_id, const float* x, size_t len) {
  return guarded([&] {
    require(index, "index");
    require(x, "x");
    index->index.add(id_or_empty(image_id), std::span<const float>(x, len));
  });
}

ofp_status ofp_index_add_code(ofp_index* index, const char* image_id, const uint8_t* code, size_t len) {
  return guarded([&] {
    require(index, "index");
    require(code, "code");
    if (len != ofp::BinaryCode::bytes_for(index->index.width())) {
      ofp::fail(ofp::ErrorKind::kArgument, "code length does not match index width");
    }
    ofp::BinaryCode c(index->index.width());
    std::memcpy(c.payload.data(), code, len);
    index->index.add(id_or_empty(image_id), c);
  });
}

ofp_status ofp_index_read(const char* path, ofp_index** out) {
  return guarded([&] {
    require(path, "path");
    require(out, "out");
    *out = new ofp_index{ofp::load_index(ofp::read_file(path))};
  });
}

ofp_status ofp_index_write(const ofp_index* index, const char* path) {
  return guarded([&] {
    require(index, "index");
    require(path, "path");
    ofp::write_file(path, ofp::save_index(index->index));
  });
}

ofp_metric ofp_index_metric(const ofp_index* index) {
  return index == nullptr ? OFP_METRIC_L2 : static_cast<ofp_metric>(index->index.metric());
}
uint32_t ofp_index_width(const ofp_index* index) { return index == nullptr ? 0 : index->index.width(); }
size_t ofp_index_size(const ofp_index* index) { return index == nullptr ? 0 : index->index.size(); }

ofp_status ofp_index_search_vector(const ofp_index* index, const char* query_id, const float* x, size_t len,
                                   size_t k, ofp_ranking** out) {
  return guarded([&] {
    require(index, "index");
    require(x, "x");
    require(out, "out");
    *out = new ofp_ranking{index->index.search(std::span<const float>(x, len), k, id_or_empty(query_id))};
  });
}

ofp_status ofp_index_search_code(const ofp_index* index, const char* query_id, const uint8_t* code,
                                 size_t len, size_t k, ofp_ranking** out) {
  return guarded([&] {
    require(index, "index");
    require(code, "code");
    require(out, "out");
    if (len != ofp::BinaryCode::bytes_for(index->index.width())) {
      ofp::fail(ofp::ErrorKind::kArgument, "query code length does not match index width");
    }
    ofp::BinaryCode c(index->index.width());
    std::memcpy(c.payload.data(), code, len);
    *out = new ofp_ranking{index->index.search(c, k, id_or_empty(query_id))};
  });
}

void ofp_index_free(ofp_index* index) { delete index; }

const char* ofp_ranking_query_id(const ofp_ranking* ranking) {
  return ranking == nullptr ? "" : ranking->list.query_id.c_str();
}
size_t ofp_ranking_count(const ofp_ranking* ranking) { return ranking == nullptr ? 0 : ranking->list.hits.size(); }

ofp_status ofp_ranking_hit(const ofp_ranking* ranking, size_t i, const char** image_id, double* distance) {
  return guarded([&] {
    require(ranking, "ranking");
    if (i >= ranking->list.hits.size()) ofp::fail(ofp::ErrorKind::kArgument, "hit index out of range");
    if (image_id != nullptr) *image_id = ranking->list.hits[i].image_id.c_str();
    if (distance != nullptr) *distance = ranking->list.hits[i].distance;
  });
}

void ofp_ranking_free(ofp_ranking* ranking) { delete ranking; }

ofp_status ofp_ranking_set_create(ofp_ranking_set** out) {
  return guarded([&] {
    require(out, "out");
    *out = new ofp_ranking_set{};
  });
}

ofp_status ofp_ranking_set_add(ofp_ranking_set* set, const ofp_ranking* ranking) {
  return guarded([&] {
    require(set, "set");
    require(ranking, "ranking");
    set->lists.push_back(*ranking);
  });
}

ofp_status ofp_ranking_set_read(ofp_ranking_set* set, const char* path, const char* default_query_id) {
  return guarded([&] {
    require(set, "set");
    require(path, "path");
    const std::string fallback = default_query_id != nullptr
                                     ? std::string(default_query_id)
                                     : std::filesystem::path(path).stem().string();
    for (auto& list : ofp::parse_rankings(ofp::read_text_file(path), fallback)) {
      set->lists.push_back({std::move(list)});
    }
  });
}

ofp_status ofp_ranking_set_write(const ofp_ranking_set* set, const char* path, int with_header) {
  return guarded([&] {
    require(set, "set");
    require(path, "path");
    const auto lists = lists_of(set);
    ofp::write_text_file(path, ofp::format_rankings(lists, with_header != 0));
  });
}

ofp_status ofp_ranking_set_format(const ofp_ranking_set* set, int with_header, char* buf, size_t capacity,
                                  size_t* needed) {
  return guarded([&] {
    require(set, "set");
    require(needed, "needed");
    const auto lists = lists_of(set);
    const std::string text = ofp::format_rankings(lists, with_header != 0);
    *needed = text.size();
    if (buf != nullptr) std::memcpy(buf, text.data(), std::min(capacity, text.size()));
  });
}

size_t ofp_ranking_set_count(const ofp_ranking_set* set) { return set == nullptr ? 0 : set->lists.size(); }
const ofp_ranking* ofp_ranking_set_at(const ofp_ranking_set* set, size_t i) {
  if (set == nullptr || i >= set->lists.size()) return nullptr;
  return &set->lists[i];
}
void ofp_ranking_set_free(ofp_ranking_set* set) { delete set; }

/* evaluation */

ofp_status ofp_ground_truth_read(const char* path, ofp_ground_truth** out) {
  return guarded([&] {
    require(path, "path");
    require(out, "out");
    *out = new ofp_ground_truth{ofp::parse_ground_truth(ofp::read_text_file(path))};
  });
}

ofp_status ofp_ground_truth_parse(const char* text, size_t len, ofp_ground_truth** out) {
  return guarded([&] {
    require(text, "text");
    require(out, "out");
    *out = new ofp_ground_truth{ofp::parse_ground_truth({text, len})};
  });
}

size_t ofp_ground_truth_count(const ofp_ground_truth* gt) { return gt == nullptr ? 0 : gt->gt.size(); }
void ofp_ground_truth_free(ofp_ground_truth* gt) { delete gt; }

ofp_status ofp_average_precision(const ofp_ranking* ranking, const ofp_ground_truth* gt, int exclude_query,
                                 double* out) {
  return guarded([&] {
    require(ranking, "ranking");
    require(gt, "gt");
    require(out, "out");
    const auto it = gt->gt.find(ranking->list.query_id);
    if (it == gt->gt.end()) {
      ofp::fail(ofp::ErrorKind::kProtocol, "no ground truth for query '" + ranking->list.query_id + "'");
    }
    *out = ofp::average_precision(ranking->list, it->second, exclude_query != 0);
  });
}

ofp_status ofp_evaluate_map(const ofp_ranking_set* rankings, const ofp_ground_truth* gt, int exclude_query,
                            ofp_report** out) {
  return guarded([&] {
    require(rankings, "rankings");
    require(gt, "gt");
    require(out, "out");
    const auto lists = lists_of(rankings);
    auto report = ofp::mean_average_precision(lists, gt->gt, exclude_query != 0);
    std::string text = ofp::format_report(report);
    *out = new ofp_report{std::move(report), std::move(text)};
  });
}

ofp_status ofp_evaluate_ukb(const ofp_ranking_set* rankings, const ofp_ground_truth* gt, ofp_report** out) {
  return guarded([&] {
    require(rankings, "rankings");
    require(gt, "gt");
    require(out, "out");
    const auto lists = lists_of(rankings);
    auto report = ofp::ukb_score(lists, gt->gt);
    std::string text = ofp::format_report(report);
    *out = new ofp_report{std::move(report), std::move(text)};
  });
}

double ofp_report_score(const ofp_report* report) { return report == nullptr ? 0.0 : report->report.score; }
size_t ofp_report_query_count(const ofp_report* report) {
  return report == nullptr ? 0 : report->report.query_count();
}

ofp_status ofp_report_query(const ofp_report* report, size_t i, const char** query_id, double* value) {
  return guarded([&] {
    require(report, "report");
    if (i >= report->report.per_query.size()) ofp::fail(ofp::ErrorKind::kArgument, "query index out of range");
    if (query_id != nullptr) *query_id = report->report.per_query[i].query_id.c_str();
    if (value != nullptr) *value = report->report.per_query[i].value;
  });
}

const char* ofp_report_text(const ofp_report* report) { return report == nullptr ? "" : report->text.c_str(); }
void ofp_report_free(ofp_report* report) { delete report; }

}  // extern "C"
