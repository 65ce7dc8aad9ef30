#ifndef OFP_OFP_H
#define OFP_OFP_H

/*
 * ofp: object-level feature pooling for compact image retrieval.
 *
 * Pipeline: region proposals -> per-region descriptors -> component-wise
 * max-pooling -> PCA / ITQ compression -> exact l2 / Hamming search ->
 * mAP / UKB evaluation.
 *
 * Conventions:
 *  - Every fallible call returns an ofp_status. On failure the output
 *    handle is left untouched and ofp_last_error() describes the problem
 *    (thread-local, valid until the next failing call on the same thread).
 *  - Handles are opaque and owned by the caller; release each with its
 *    matching *_free function. Passing NULL to a *_free function is a no-op.
 *  - Handles are immutable once built, except ofp_index which grows through
 *    ofp_index_add_*. Immutable handles may be shared across threads.
 *  - Strings returned by accessors are owned by the handle.
 */

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(OFP_BUILDING_LIBRARY)
#    define OFP_API __declspec(dllexport)
#  else
#    define OFP_API __declspec(dllimport)
#  endif
#else
#  define OFP_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum ofp_status {
  OFP_OK = 0,
  OFP_ERR_ARGUMENT = 1,    /* invalid parameter or dimension mismatch */
  OFP_ERR_BOUNDS = 2,      /* box outside the image */
  OFP_ERR_DECODE = 3,      /* malformed image file */
  OFP_ERR_FORMAT = 4,      /* malformed OFPF / OFPM / OFPQ / OFPI / text file */
  OFP_ERR_PROTOCOL = 5,    /* evaluation protocol violated */
  OFP_ERR_CONFIG = 6,      /* inconsistent configuration */
  OFP_ERR_EMPTY_INPUT = 7, /* pooling an image without regions */
  OFP_ERR_IO = 8,          /* file could not be read or written */
  OFP_ERR_INTERNAL = 9
} ofp_status;

OFP_API const char* ofp_version(void);
OFP_API const char* ofp_status_name(ofp_status status);
OFP_API const char* ofp_last_error(void);

/* ---------------------------------------------------------------- images */

typedef struct ofp_box {
  uint32_t x, y, w, h;
} ofp_box;

typedef struct ofp_image ofp_image;

OFP_API ofp_status ofp_image_read_ppm(const char* path, ofp_image** out);
OFP_API ofp_status ofp_image_decode_ppm(const uint8_t* bytes, size_t len, ofp_image** out);
/* `rgb` holds width*height*3 interleaved bytes. */
OFP_API ofp_status ofp_image_from_rgb(uint32_t width, uint32_t height, const uint8_t* rgb,
                                      ofp_image** out);
OFP_API ofp_status ofp_image_write_ppm(const ofp_image* img, const char* path);
OFP_API ofp_status ofp_image_crop(const ofp_image* img, ofp_box box, ofp_image** out);
OFP_API ofp_status ofp_image_resize(const ofp_image* img, uint32_t width, uint32_t height,
                                    ofp_image** out);
OFP_API uint32_t ofp_image_width(const ofp_image* img);
OFP_API uint32_t ofp_image_height(const ofp_image* img);
OFP_API const uint8_t* ofp_image_pixels(const ofp_image* img);
OFP_API void ofp_image_free(ofp_image* img);

/* ------------------------------------------------------------- proposals */

typedef struct ofp_proposal_params {
  double k;           /* segmentation scale, > 0 (default 100) */
  uint32_t min_size;  /* smallest segment in pixels, >= 1 (default 50) */
  uint64_t seed;      /* score randomization seed (default 0) */
  double nms_iou;     /* IoU rejection threshold in (0, 1] (default 0.9) */
  uint32_t top_n;     /* proposals kept after suppression, >= 1 (default 500) */
} ofp_proposal_params;

typedef struct ofp_proposals ofp_proposals;

OFP_API void ofp_proposal_params_default(ofp_proposal_params* params);

/* Selective search followed by score-ordered IoU suppression. */
OFP_API ofp_status ofp_propose(const ofp_image* img, const char* image_id,
                               const ofp_proposal_params* params, ofp_proposals** out);
/* Selective search alone (no suppression, no truncation). */
OFP_API ofp_status ofp_selective_search(const ofp_image* img, const char* image_id, double k,
                                        uint32_t min_size, uint64_t seed, ofp_proposals** out);
OFP_API ofp_status ofp_proposals_nms(const ofp_proposals* set, double iou_threshold,
                                     uint32_t top_n, ofp_proposals** out);
/* `scores` must be non-increasing and within [0, 1]. */
OFP_API ofp_status ofp_proposals_create(const char* image_id, const ofp_box* boxes,
                                        const float* scores, size_t count, ofp_proposals** out);
OFP_API ofp_status ofp_proposals_read(const char* path, ofp_proposals** out);
OFP_API ofp_status ofp_proposals_write(const ofp_proposals* set, const char* path);
OFP_API size_t ofp_proposals_count(const ofp_proposals* set);
OFP_API const char* ofp_proposals_image_id(const ofp_proposals* set);
OFP_API ofp_status ofp_proposals_get(const ofp_proposals* set, size_t i, ofp_box* box,
                                     float* score);
OFP_API void ofp_proposals_free(ofp_proposals* set);

OFP_API double ofp_iou(ofp_box a, ofp_box b);

/* ----------------------------------------------------------- descriptors */

typedef enum ofp_descriptor_kind {
  OFP_DESCRIPTOR_BUILTIN = 0,  /* 128-D color/gradient histogram descriptor */
  OFP_DESCRIPTOR_EXTERNAL = 1  /* rows taken from an OFPF file (e.g. CNN activations) */
} ofp_descriptor_kind;

typedef struct ofp_features ofp_features;

/* For OFP_DESCRIPTOR_EXTERNAL, `external_ofpf` must name an OFPF file whose
 * records match `set` box-for-box; otherwise it is ignored and may be NULL. */
OFP_API ofp_status ofp_describe(const ofp_image* img, const ofp_proposals* set,
                                ofp_descriptor_kind kind, const char* external_ofpf,
                                int normalize_rows, ofp_features** out);
OFP_API ofp_status ofp_builtin_descriptor(const ofp_image* region, float* out, size_t len);
OFP_API size_t ofp_features_rows(const ofp_features* feats);
OFP_API uint32_t ofp_features_dim(const ofp_features* feats);
OFP_API const float* ofp_features_row(const ofp_features* feats, size_t i);
OFP_API void ofp_features_free(ofp_features* feats);

/* OFPF v1 interchange file. The proposal set takes `image_id`. */
OFP_API ofp_status ofp_ofpf_write(const ofp_proposals* set, const ofp_features* feats,
                                  const char* path);
OFP_API ofp_status ofp_ofpf_read(const char* path, const char* image_id, ofp_proposals** set,
                                 ofp_features** feats);

/* --------------------------------------------------------------- pooling */

typedef struct ofp_vector ofp_vector;

/* Component-wise max over rows, optionally l2-normalized. The proposal set
 * supplies the extent box recorded in the representation file. */
OFP_API ofp_status ofp_pool(const ofp_proposals* set, const ofp_features* feats,
                            int l2_normalize, ofp_vector** out);
OFP_API ofp_status ofp_vector_create(const char* image_id, const float* values, size_t dim,
                                     ofp_vector** out);
OFP_API ofp_status ofp_vector_write(const ofp_vector* rep, const char* path);
/* The file does not carry the id; `image_id` is attached to the result. */
OFP_API ofp_status ofp_vector_read(const char* path, const char* image_id, ofp_vector** out);
OFP_API size_t ofp_vector_dim(const ofp_vector* rep);
OFP_API const float* ofp_vector_data(const ofp_vector* rep);
OFP_API int ofp_vector_normalized(const ofp_vector* rep);
OFP_API const char* ofp_vector_image_id(const ofp_vector* rep);
OFP_API void ofp_vector_free(ofp_vector* rep);

/* ----------------------------------------------------------- compression */

typedef struct ofp_pca ofp_pca;
typedef struct ofp_itq ofp_itq;

/* Fits on `count` representations of equal dimension. */
OFP_API ofp_status ofp_pca_fit(const ofp_vector* const* reps, size_t count, uint32_t dim,
                               ofp_pca** out);
OFP_API ofp_status ofp_pca_read(const char* path, ofp_pca** out);
OFP_API ofp_status ofp_pca_write(const ofp_pca* model, const char* path);
OFP_API uint32_t ofp_pca_input_dim(const ofp_pca* model);
OFP_API uint32_t ofp_pca_output_dim(const ofp_pca* model);
OFP_API ofp_status ofp_pca_explained_variance(const ofp_pca* model, double* out, size_t len);
OFP_API ofp_status ofp_pca_project(const ofp_pca* model, const float* x, size_t len, float* out,
                                   size_t out_len);
OFP_API void ofp_pca_free(ofp_pca* model);

OFP_API ofp_status ofp_itq_fit(const ofp_vector* const* reps, size_t count, uint32_t bits,
                               uint32_t iters, uint64_t seed, ofp_itq** out);
OFP_API ofp_status ofp_itq_read(const char* path, ofp_itq** out);
OFP_API ofp_status ofp_itq_write(const ofp_itq* model, const char* path);
OFP_API uint32_t ofp_itq_bits(const ofp_itq* model);
OFP_API uint32_t ofp_itq_input_dim(const ofp_itq* model);
OFP_API size_t ofp_itq_loss_trace_len(const ofp_itq* model);
OFP_API double ofp_itq_loss_trace_at(const ofp_itq* model, size_t i);
/* Writes ceil(bits/8) bytes; bit j is byte j/8, position 7 - j%8. */
OFP_API ofp_status ofp_itq_encode(const ofp_itq* model, const float* x, size_t len,
                                  uint8_t* out, size_t out_len);
OFP_API void ofp_itq_free(ofp_itq* model);

/* ----------------------------------------------------------------- index */

typedef enum ofp_metric { OFP_METRIC_L2 = 0, OFP_METRIC_HAMMING = 1 } ofp_metric;

typedef struct ofp_index ofp_index;
typedef struct ofp_ranking ofp_ranking;
typedef struct ofp_ranking_set ofp_ranking_set;

OFP_API uint32_t ofp_hamming_distance(const uint8_t* a, const uint8_t* b, size_t len);

/* `width` is the vector dimension (l2) or the bit count (Hamming). */
OFP_API ofp_status ofp_index_create(ofp_metric metric, uint32_t width, ofp_index** out);
OFP_API ofp_status ofp_index_add_vector(ofp_index* index, const char* image_id, const float* x,
                                        size_t len);
OFP_API ofp_status ofp_index_add_code(ofp_index* index, const char* image_id,
                                      const uint8_t* code, size_t len);
OFP_API ofp_status ofp_index_read(const char* path, ofp_index** out);
OFP_API ofp_status ofp_index_write(const ofp_index* index, const char* path);
OFP_API ofp_metric ofp_index_metric(const ofp_index* index);
OFP_API uint32_t ofp_index_width(const ofp_index* index);
OFP_API size_t ofp_index_size(const ofp_index* index);
OFP_API ofp_status ofp_index_search_vector(const ofp_index* index, const char* query_id,
                                           const float* x, size_t len, size_t k,
                                           ofp_ranking** out);
OFP_API ofp_status ofp_index_search_code(const ofp_index* index, const char* query_id,
                                         const uint8_t* code, size_t len, size_t k,
                                         ofp_ranking** out);
OFP_API void ofp_index_free(ofp_index* index);

OFP_API const char* ofp_ranking_query_id(const ofp_ranking* ranking);
OFP_API size_t ofp_ranking_count(const ofp_ranking* ranking);
OFP_API ofp_status ofp_ranking_hit(const ofp_ranking* ranking, size_t i, const char** image_id,
                                   double* distance);
OFP_API void ofp_ranking_free(ofp_ranking* ranking);

/* A collection of rankings, as stored in a ranking text file. */
OFP_API ofp_status ofp_ranking_set_create(ofp_ranking_set** out);
/* Copies `ranking` into the set. */
OFP_API ofp_status ofp_ranking_set_add(ofp_ranking_set* set, const ofp_ranking* ranking);
/* Appends the lists found in `path`; headerless content is attributed to `default_query_id`. */
OFP_API ofp_status ofp_ranking_set_read(ofp_ranking_set* set, const char* path,
                                        const char* default_query_id);
/* `with_header` prefixes each list with `# query <id>`. */
OFP_API ofp_status ofp_ranking_set_write(const ofp_ranking_set* set, const char* path,
                                         int with_header);
/* Renders the set in the ranking text format. Copies at most `capacity`
 * bytes (no terminator) into `buf` and stores the full length in `needed`;
 * call with buf = NULL to size the buffer. */
OFP_API ofp_status ofp_ranking_set_format(const ofp_ranking_set* set, int with_header, char* buf,
                                          size_t capacity, size_t* needed);
OFP_API size_t ofp_ranking_set_count(const ofp_ranking_set* set);
OFP_API const ofp_ranking* ofp_ranking_set_at(const ofp_ranking_set* set, size_t i);
OFP_API void ofp_ranking_set_free(ofp_ranking_set* set);

/* ------------------------------------------------------------ evaluation */

typedef struct ofp_ground_truth ofp_ground_truth;
typedef struct ofp_report ofp_report;

OFP_API ofp_status ofp_ground_truth_read(const char* path, ofp_ground_truth** out);
OFP_API ofp_status ofp_ground_truth_parse(const char* text, size_t len, ofp_ground_truth** out);
OFP_API size_t ofp_ground_truth_count(const ofp_ground_truth* gt);
OFP_API void ofp_ground_truth_free(ofp_ground_truth* gt);

OFP_API ofp_status ofp_average_precision(const ofp_ranking* ranking, const ofp_ground_truth* gt,
                                         int exclude_query, double* out);
OFP_API ofp_status ofp_evaluate_map(const ofp_ranking_set* rankings, const ofp_ground_truth* gt,
                                    int exclude_query, ofp_report** out);
OFP_API ofp_status ofp_evaluate_ukb(const ofp_ranking_set* rankings, const ofp_ground_truth* gt,
                                    ofp_report** out);
/* mAP in [0,1] or UKB score in [0,4]. */
OFP_API double ofp_report_score(const ofp_report* report);
OFP_API size_t ofp_report_query_count(const ofp_report* report);
OFP_API ofp_status ofp_report_query(const ofp_report* report, size_t i, const char** query_id,
                                    double* value);
/* Table plus a final `mAP=<value>` or `ukb=<value>` line. */
OFP_API const char* ofp_report_text(const ofp_report* report);
OFP_API void ofp_report_free(ofp_report* report);

#ifdef __cplusplus
}
#endif

#endif /* OFP_OFP_H */
