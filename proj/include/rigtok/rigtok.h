// Copyright 2026 The rigtok Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef RIGTOK_RIGTOK_H_
#define RIGTOK_RIGTOK_H_

/* C interface to the rigtok library. Objects are opaque handles created and
 * released through this API. Every fallible call returns a rigtok_status;
 * on failure rigtok_last_error() describes the error for the calling thread
 * until its next failing call. Strings returned through char** are owned by
 * the caller and released with rigtok_string_free. */

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#if defined(RIGTOK_BUILDING_LIBRARY)
#define RIGTOK_API __declspec(dllexport)
#else
#define RIGTOK_API __declspec(dllimport)
#endif
#else
#define RIGTOK_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum rigtok_status {
  RIGTOK_OK = 0,
  RIGTOK_ERR_PARSE = 1,
  RIGTOK_ERR_STRUCTURE = 2,
  RIGTOK_ERR_CYCLE = 3,
  RIGTOK_ERR_WEIGHT_RANGE = 4,
  RIGTOK_ERR_DUPLICATE_ENTRY = 5,
  RIGTOK_ERR_DEGENERATE = 6,
  RIGTOK_ERR_CAPACITY = 7,
  RIGTOK_ERR_INVALID_ARGUMENT = 8,
  RIGTOK_ERR_DECODE = 9,
  RIGTOK_ERR_IO = 10,
  RIGTOK_ERR_NUMERIC = 11,
  RIGTOK_ERR_INTERNAL = 100
} rigtok_status;

RIGTOK_API const char* rigtok_version(void);
RIGTOK_API const char* rigtok_status_name(rigtok_status status);
RIGTOK_API const char* rigtok_last_error(void);
RIGTOK_API void rigtok_string_free(char* s);

typedef struct rigtok_mesh rigtok_mesh;
typedef struct rigtok_rig rigtok_rig;
typedef struct rigtok_vocab rigtok_vocab;
typedef struct rigtok_sequence rigtok_sequence;

/* ---- Meshes (Wavefront OBJ) ---------------------------------------------- */

RIGTOK_API rigtok_status rigtok_mesh_load(const char* path, rigtok_mesh** out);
RIGTOK_API rigtok_status rigtok_mesh_parse(const char* text, size_t length, rigtok_mesh** out);
RIGTOK_API rigtok_status rigtok_mesh_save(const rigtok_mesh* mesh, const char* path);
RIGTOK_API void rigtok_mesh_free(rigtok_mesh* mesh);
RIGTOK_API int rigtok_mesh_vertex_count(const rigtok_mesh* mesh);
RIGTOK_API int rigtok_mesh_face_count(const rigtok_mesh* mesh);
RIGTOK_API rigtok_status rigtok_mesh_vertex(const rigtok_mesh* mesh, int index, double out[3]);

/* ---- Rigs (JSON rig files) ----------------------------------------------- */

RIGTOK_API rigtok_status rigtok_rig_load(const char* path, rigtok_rig** out);
RIGTOK_API rigtok_status rigtok_rig_parse(const char* text, size_t length, rigtok_rig** out);
RIGTOK_API rigtok_status rigtok_rig_save(const rigtok_rig* rig, const char* path);
/* Canonical JSON text, newline terminated. */
RIGTOK_API rigtok_status rigtok_rig_to_json(const rigtok_rig* rig, char** out);
RIGTOK_API void rigtok_rig_free(rigtok_rig* rig);
RIGTOK_API int rigtok_rig_joint_count(const rigtok_rig* rig);
RIGTOK_API int rigtok_rig_vertex_count(const rigtok_rig* rig);
RIGTOK_API int rigtok_rig_entry_count(const rigtok_rig* rig);
/* parent is -1 for a root. */
RIGTOK_API rigtok_status rigtok_rig_joint(const rigtok_rig* rig, int index, double position[3],
                                          int* parent);
/* Rescales every vertex with positive total weight to sum to 1. */
RIGTOK_API rigtok_status rigtok_rig_renormalize(rigtok_rig* rig);
/* Writes one "code: message" line per violated invariant to *report (empty
 * when clean) and the count to *violations. mesh may be NULL. */
RIGTOK_API rigtok_status rigtok_rig_validate(const rigtok_rig* rig, const rigtok_mesh* mesh,
                                             int* violations, char** report);

/* ---- FSQ codebooks ------------------------------------------------------- */

RIGTOK_API rigtok_status rigtok_fsq_codebook_size(const int* levels, size_t dim, int64_t* out);
/* Quantizes one dim-vector of latents to its token id. */
RIGTOK_API rigtok_status rigtok_fsq_quantize(const int* levels, size_t dim, const double* z,
                                             int64_t* token);
/* Grid values of a token id, dim entries. */
RIGTOK_API rigtok_status rigtok_fsq_dequantize(const int* levels, size_t dim, int64_t token,
                                               double* values);

typedef enum rigtok_compression_mode {
  RIGTOK_COMPRESSION_FP16_STORAGE = 0,
  RIGTOK_COMPRESSION_BIT_EXACT = 1
} rigtok_compression_mode;

RIGTOK_API rigtok_status rigtok_fsq_compression_ratio(int vertex_count, int tokens,
                                                      const int* levels, size_t dim,
                                                      rigtok_compression_mode mode, double* out);

/* ---- Token sequences ----------------------------------------------------- */

/* type_names is a comma-separated registry, or NULL for the default one. */
RIGTOK_API rigtok_status rigtok_vocab_create(int bins, const int* levels, size_t dim,
                                             const char* type_names, rigtok_vocab** out);
/* Default registry extended by the chain types used in the rig. */
RIGTOK_API rigtok_status rigtok_vocab_for_rig(int bins, const int* levels, size_t dim,
                                              const rigtok_rig* rig, rigtok_vocab** out);
RIGTOK_API void rigtok_vocab_free(rigtok_vocab* vocab);
RIGTOK_API int rigtok_vocab_size(const rigtok_vocab* vocab);

/* Encodes the skeleton with t_d skin tokens per joint. Skin tokens come from
 * a fixed random projection of each joint's weight column, seeded by seed. */
RIGTOK_API rigtok_status rigtok_encode(const rigtok_rig* rig, const rigtok_vocab* vocab, int t_d,
                                       uint64_t seed, rigtok_sequence** out);
RIGTOK_API rigtok_status rigtok_sequence_create(const int* tokens, size_t length, int t_d,
                                                rigtok_sequence** out);
RIGTOK_API void rigtok_sequence_free(rigtok_sequence* sequence);
RIGTOK_API size_t rigtok_sequence_length(const rigtok_sequence* sequence);
RIGTOK_API int rigtok_sequence_td(const rigtok_sequence* sequence);
RIGTOK_API const int* rigtok_sequence_tokens(const rigtok_sequence* sequence);
/* Token stream files: a header line followed by whitespace-separated ids. */
RIGTOK_API rigtok_status rigtok_sequence_read(const char* path, rigtok_vocab** vocab,
                                              rigtok_sequence** sequence);
RIGTOK_API rigtok_status rigtok_sequence_write(const rigtok_vocab* vocab,
                                               const rigtok_sequence* sequence, const char* path);
RIGTOK_API rigtok_status rigtok_sequence_parse(const char* text, size_t length,
                                               rigtok_vocab** vocab, rigtok_sequence** sequence);
RIGTOK_API rigtok_status rigtok_sequence_format(const rigtok_vocab* vocab,
                                                const rigtok_sequence* sequence, char** out);
/* Decodes a sequence into a skeleton-only rig (empty skin). Skin token ids of
 * each joint, t_d per joint in joint order, are returned through
 * skin_tokens when non-NULL and *skin_count provides room; *skin_count
 * receives the number written or required. A malformed sequence returns
 * RIGTOK_ERR_DECODE with the failure name leading rigtok_last_error(). */
RIGTOK_API rigtok_status rigtok_decode(const rigtok_vocab* vocab, const rigtok_sequence* sequence,
                                       rigtok_rig** out, int64_t* skin_tokens,
                                       size_t* skin_count);
/* *valid is 1 iff the sequence decodes to a rig passing validation. */
RIGTOK_API rigtok_status rigtok_sequence_validate(const rigtok_vocab* vocab,
                                                  const rigtok_sequence* sequence, int* valid,
                                                  char** failure);

/* ---- Rewards ------------------------------------------------------------- */

typedef enum rigtok_fill_mode { RIGTOK_FILL_SURFACE = 0, RIGTOK_FILL_SOLID = 1 } rigtok_fill_mode;

typedef struct rigtok_reward_config {
  double alpha;
  int resolution;
  rigtok_fill_mode fill;
  int bone_samples;
  double beta;
  int max_influences;
  double alpha_z;
  double alpha_m;
  double motion_scale;
  double motion_eps;
  int n_poses;
  double max_angle;
  uint64_t seed;
  double w_vj;
  double w_vk;
  double w_sc;
  double w_mo;
} rigtok_reward_config;

typedef struct rigtok_reward_report {
  double r_vj;
  double r_vk;
  double r_sc;
  double r_z;
  double r_m;
  double r_mo;
  double composite;
  int valid;
  int no_bones;
  int voxel_fallback;
} rigtok_reward_report;

RIGTOK_API void rigtok_reward_config_default(rigtok_reward_config* config);
/* An invalid rig yields RIGTOK_OK with report->valid = 0 and composite 0;
 * the reason is then available from rigtok_last_error(). */
RIGTOK_API rigtok_status rigtok_reward_evaluate(const rigtok_mesh* mesh, const rigtok_rig* rig,
                                                const rigtok_reward_config* config,
                                                rigtok_reward_report* report);

/* ---- Metrics ------------------------------------------------------------- */

typedef struct rigtok_metrics_config {
  double eps;
  int n_poses;
  double max_angle;
  uint64_t seed;
  int bone_samples;
} rigtok_metrics_config;

typedef struct rigtok_skeleton_metrics {
  double j2j;
  double j2b;
  double b2b;
} rigtok_skeleton_metrics;

typedef struct rigtok_skin_metrics {
  double l1;
  double l1_var;
  double precision;
  double recall;
  double iou;
  double mask_accuracy;
  double motion_loss;
} rigtok_skin_metrics;

typedef struct rigtok_sparsity_report {
  int rig_count;
  double avg_n;
  double avg_j;
  double avg_nnz;
  double avg_sparsity;
} rigtok_sparsity_report;

RIGTOK_API void rigtok_metrics_config_default(rigtok_metrics_config* config);
/* Skinning metrics need equal vertex and joint counts; motion loss poses the
 * ground-truth skeleton. */
RIGTOK_API rigtok_status rigtok_metrics_evaluate(const rigtok_rig* pred, const rigtok_rig* gt,
                                                 const rigtok_mesh* mesh,
                                                 const rigtok_metrics_config* config,
                                                 rigtok_skeleton_metrics* skeleton,
                                                 rigtok_skin_metrics* skin);
RIGTOK_API rigtok_status rigtok_sparsity(const rigtok_rig* const* rigs, size_t count,
                                         rigtok_sparsity_report* report);

/* ---- Augmentation -------------------------------------------------------- */

typedef struct rigtok_augment_config {
  double p_delete;
  double max_delete_frac;
  double p_subtree;
  double p_reconnect;
  double max_reconnect_frac;
  double p_scale;
  double min_scale;
  double max_scale;
  double p_rotate;
  double max_rotate;
  double p_pose;
  double max_pose;
  double p_noise;
  double sigma_joint;
  double sigma_vertex;
  int delete_vertices;
} rigtok_augment_config;

RIGTOK_API void rigtok_augment_config_default(rigtok_augment_config* config);
/* ops is a comma-separated subset of delete,subtree,reconnect,scale,rotate,
 * noise,pose, applied in that order with their configured probabilities. */
RIGTOK_API rigtok_status rigtok_augment(const rigtok_rig* rig, const rigtok_mesh* mesh,
                                        const rigtok_augment_config* config, const char* ops,
                                        uint64_t seed, rigtok_rig** out_rig,
                                        rigtok_mesh** out_mesh);

/* ---- GRPO demo ----------------------------------------------------------- */

typedef enum rigtok_objective_mode {
  RIGTOK_OBJECTIVE_AS_WRITTEN = 0,
  RIGTOK_OBJECTIVE_PPO_STANDARD = 1
} rigtok_objective_mode;

typedef struct rigtok_grpo_config {
  int group_size;
  double clip_epsilon;
  double kl_beta;
  double learning_rate;
  double advantage_eps;
  int inner_steps;
  rigtok_objective_mode mode;
} rigtok_grpo_config;

typedef struct rigtok_grpo_row {
  int step;
  double mean_reward;
  double success_rate;
  double kl;
  double objective;
} rigtok_grpo_row;

typedef void (*rigtok_grpo_callback)(const rigtok_grpo_row* row, void* user);

RIGTOK_API void rigtok_grpo_config_default(rigtok_grpo_config* config);
/* task is "match" or "valid". The callback receives every trace row. */
RIGTOK_API rigtok_status rigtok_grpo_demo(const char* task, int steps,
                                          const rigtok_grpo_config* config, uint64_t seed,
                                          rigtok_grpo_callback callback, void* user);

#ifdef __cplusplus
}
#endif

#endif /* RIGTOK_RIGTOK_H_ */
