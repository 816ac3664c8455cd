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

#include "rigtok/rigtok.h"

#include <cmath>
#include <cstdlib>
#include <cstring>
#include <exception>
#include <fstream>
#include <new>
#include <sstream>
#include <string>
#include <vector>

#include "rigtok/augment.hpp"
#include "rigtok/error.hpp"
#include "rigtok/fsq.hpp"
#include "rigtok/grpo.hpp"
#include "rigtok/metrics.hpp"
#include "rigtok/rewards.hpp"
#include "rigtok/rigcore.hpp"
#include "rigtok/seqcodec.hpp"

struct rigtok_mesh {
  rigtok::Mesh value;
};
struct rigtok_rig {
  rigtok::Rig value;
};
struct rigtok_vocab {
  rigtok::Vocab value;
};
struct rigtok_sequence {
  rigtok::RigSequence value;
};

namespace {

thread_local std::string g_last_error;

rigtok_status Fail(rigtok_status status, std::string message) {
  g_last_error = std::move(message);
  return status;
}

rigtok_status FromCode(rigtok::ErrorCode code) {
  return static_cast<rigtok_status>(static_cast<int>(code));
}

// Runs `body`, translating exceptions into status codes.
template <typename Fn>
rigtok_status Guard(Fn&& body) {
  try {
    return body();
  } catch (const rigtok::Error& e) {
    return Fail(FromCode(e.code()), e.what());
  } catch (const std::bad_alloc&) {
    return Fail(RIGTOK_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return Fail(RIGTOK_ERR_INTERNAL, e.what());
  } catch (...) {
    return Fail(RIGTOK_ERR_INTERNAL, "unknown exception");
  }
}

#define RIGTOK_REQUIRE(cond, what)                                                 \
  do {                                                                             \
    if (!(cond)) return Fail(RIGTOK_ERR_INVALID_ARGUMENT, std::string(what)); \
  } while (0)

char* CopyString(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

rigtok::FsqLevels MakeLevels(const int* levels, size_t dim) {
  if (!levels || dim == 0) throw rigtok::Error(rigtok::ErrorCode::kInvalidArgument, "fsq: empty level list");
  return rigtok::FsqLevels(std::vector<int>(levels, levels + dim));
}

std::vector<std::string> SplitCommas(const char* text) {
  std::vector<std::string> out;
  std::string cur;
  for (const char* p = text; *p; ++p) {
    if (*p == ',') {
      out.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(*p);
    }
  }
  out.push_back(cur);
  return out;
}

}  // namespace

extern "C" {

const char* rigtok_version(void) { return "0.1.0"; }

const char* rigtok_status_name(rigtok_status status) {
  switch (status) {
    case RIGTOK_OK: return "ok";
    case RIGTOK_ERR_INTERNAL: return "internal";
    default:
      if (status >= RIGTOK_ERR_PARSE && status <= RIGTOK_ERR_NUMERIC) {
        return rigtok::ErrorCodeName(static_cast<rigtok::ErrorCode>(status));
      }
      return "unknown";
  }
}

const char* rigtok_last_error(void) { return g_last_error.c_str(); }

void rigtok_string_free(char* s) { std::free(s); }

// ---- Meshes ---------------------------------------------------------------

rigtok_status rigtok_mesh_load(const char* path, rigtok_mesh** out) {
  RIGTOK_REQUIRE(path && out, "mesh_load: null argument");
  return Guard([&] {
    *out = new rigtok_mesh{rigtok::LoadObj(path)};
    return RIGTOK_OK;
  });
}

rigtok_status rigtok_mesh_parse(const char* text, size_t length, rigtok_mesh** out) {
  RIGTOK_REQUIRE((text || length == 0) && out, "mesh_parse: null argument");
  return Guard([&] {
    *out = new rigtok_mesh{rigtok::ParseObj(std::string_view(text ? text : "", length))};
    return RIGTOK_OK;
  });
}

rigtok_status rigtok_mesh_save(const rigtok_mesh* mesh, const char* path) {
  RIGTOK_REQUIRE(mesh && path, "mesh_save: null argument");
  return Guard([&] {
    std::ofstream file(path);
    if (!file) return Fail(RIGTOK_ERR_IO, std::string("cannot open ") + path + " for writing");
    rigtok::WriteObj(mesh->value, file);
    if (!file) return Fail(RIGTOK_ERR_IO, std::string("write failed: ") + path);
    return RIGTOK_OK;
  });
}

void rigtok_mesh_free(rigtok_mesh* mesh) { delete mesh; }

int rigtok_mesh_vertex_count(const rigtok_mesh* mesh) { return mesh ? mesh->value.vertex_count() : 0; }

int rigtok_mesh_face_count(const rigtok_mesh* mesh) {
  return mesh ? static_cast<int>(mesh->value.faces.size()) : 0;
}

rigtok_status rigtok_mesh_vertex(const rigtok_mesh* mesh, int index, double out[3]) {
  RIGTOK_REQUIRE(mesh && out, "mesh_vertex: null argument");
  RIGTOK_REQUIRE(index >= 0 && index < mesh->value.vertex_count(), "mesh_vertex: index out of range");
  for (int k = 0; k < 3; ++k) out[k] = mesh->value.vertices[index][k];
  return RIGTOK_OK;
}

// ---- Rigs -----------------------------------------------------------------

rigtok_status rigtok_rig_load(const char* path, rigtok_rig** out) {
  RIGTOK_REQUIRE(path && out, "rig_load: null argument");
  return Guard([&] {
    *out = new rigtok_rig{rigtok::LoadRig(path)};
    return RIGTOK_OK;
  });
}

rigtok_status rigtok_rig_parse(const char* text, size_t length, rigtok_rig** out) {
  RIGTOK_REQUIRE((text || length == 0) && out, "rig_parse: null argument");
  return Guard([&] {
    *out = new rigtok_rig{rigtok::ParseRig(std::string_view(text ? text : "", length))};
    return RIGTOK_OK;
  });
}

rigtok_status rigtok_rig_save(const rigtok_rig* rig, const char* path) {
  RIGTOK_REQUIRE(rig && path, "rig_save: null argument");
  return Guard([&] {
    rigtok::SaveRig(rig->value, path);
    return RIGTOK_OK;
  });
}

rigtok_status rigtok_rig_to_json(const rigtok_rig* rig, char** out) {
  RIGTOK_REQUIRE(rig && out, "rig_to_json: null argument");
  return Guard([&] {
    *out = CopyString(rigtok::SerializeRig(rig->value));
    return RIGTOK_OK;
  });
}

void rigtok_rig_free(rigtok_rig* rig) { delete rig; }

int rigtok_rig_joint_count(const rigtok_rig* rig) { return rig ? rig->value.skeleton.size() : 0; }

int rigtok_rig_vertex_count(const rigtok_rig* rig) { return rig ? rig->value.skin.vertex_count : 0; }

int rigtok_rig_entry_count(const rigtok_rig* rig) {
  return rig ? static_cast<int>(rig->value.skin.entries.size()) : 0;
}

rigtok_status rigtok_rig_joint(const rigtok_rig* rig, int index, double position[3], int* parent) {
  RIGTOK_REQUIRE(rig, "rig_joint: null rig");
  RIGTOK_REQUIRE(index >= 0 && index < rig->value.skeleton.size(), "rig_joint: index out of range");
  const auto& joint = rig->value.skeleton.joints[index];
  if (position) {
    for (int k = 0; k < 3; ++k) position[k] = joint.position[k];
  }
  if (parent) *parent = joint.parent ? *joint.parent : -1;
  return RIGTOK_OK;
}

rigtok_status rigtok_rig_renormalize(rigtok_rig* rig) {
  RIGTOK_REQUIRE(rig, "rig_renormalize: null rig");
  return Guard([&] {
    rig->value.skin = rigtok::RenormalizeWeights(rig->value.skin);
    return RIGTOK_OK;
  });
}

rigtok_status rigtok_rig_validate(const rigtok_rig* rig, const rigtok_mesh* mesh, int* violations,
                                  char** report) {
  RIGTOK_REQUIRE(rig && violations, "rig_validate: null argument");
  return Guard([&] {
    const auto found = rigtok::ValidateRig(rig->value, mesh ? &mesh->value : nullptr);
    *violations = static_cast<int>(found.size());
    if (report) {
      std::string text;
      for (const auto& v : found) text += v.code + ": " + v.message + "\n";
      *report = CopyString(text);
    }
    return RIGTOK_OK;
  });
}

// ---- FSQ --------------------------------------------------------------------

rigtok_status rigtok_fsq_codebook_size(const int* levels, size_t dim, int64_t* out) {
  RIGTOK_REQUIRE(out, "fsq_codebook_size: null output");
  return Guard([&] {
    *out = rigtok::CodebookSize(MakeLevels(levels, dim));
    return RIGTOK_OK;
  });
}

rigtok_status rigtok_fsq_quantize(const int* levels, size_t dim, const double* z, int64_t* token) {
  RIGTOK_REQUIRE(z && token, "fsq_quantize: null argument");
  return Guard([&] {
    const auto lv = MakeLevels(levels, dim);
    *token = rigtok::CodeToToken(lv, rigtok::Quantize(lv, std::span<const double>(z, dim))).value;
    return RIGTOK_OK;
  });
}

rigtok_status rigtok_fsq_dequantize(const int* levels, size_t dim, int64_t token, double* values) {
  RIGTOK_REQUIRE(values, "fsq_dequantize: null output");
  return Guard([&] {
    const auto lv = MakeLevels(levels, dim);
    const auto v = rigtok::Dequantize(lv, rigtok::TokenToCode(lv, rigtok::TokenId{token}));
    std::copy(v.begin(), v.end(), values);
    return RIGTOK_OK;
  });
}

rigtok_status rigtok_fsq_compression_ratio(int vertex_count, int tokens, const int* levels,
                                           size_t dim, rigtok_compression_mode mode, double* out) {
  RIGTOK_REQUIRE(out, "fsq_compression_ratio: null output");
  RIGTOK_REQUIRE(mode == RIGTOK_COMPRESSION_FP16_STORAGE || mode == RIGTOK_COMPRESSION_BIT_EXACT,
                 "fsq_compression_ratio: unknown mode");
  return Guard([&] {
    *out = rigtok::CompressionRatio(vertex_count, tokens, MakeLevels(levels, dim),
                                    mode == RIGTOK_COMPRESSION_BIT_EXACT
                                        ? rigtok::CompressionMode::kBitExact
                                        : rigtok::CompressionMode::kFp16Storage);
    return RIGTOK_OK;
  });
}

// ---- Sequences --------------------------------------------------------------

rigtok_status rigtok_vocab_create(int bins, const int* levels, size_t dim, const char* type_names,
                                  rigtok_vocab** out) {
  RIGTOK_REQUIRE(out, "vocab_create: null output");
  return Guard([&] {
    auto lv = MakeLevels(levels, dim);
    if (type_names) {
      *out = new rigtok_vocab{rigtok::Vocab(bins, std::move(lv), SplitCommas(type_names))};
    } else {
      *out = new rigtok_vocab{rigtok::Vocab(bins, std::move(lv))};
    }
    return RIGTOK_OK;
  });
}

rigtok_status rigtok_vocab_for_rig(int bins, const int* levels, size_t dim, const rigtok_rig* rig,
                                   rigtok_vocab** out) {
  RIGTOK_REQUIRE(rig && out, "vocab_for_rig: null argument");
  return Guard([&] {
    *out = new rigtok_vocab{rigtok::Vocab::ForSkeleton(bins, MakeLevels(levels, dim), rig->value.skeleton)};
    return RIGTOK_OK;
  });
}

void rigtok_vocab_free(rigtok_vocab* vocab) { delete vocab; }

int rigtok_vocab_size(const rigtok_vocab* vocab) { return vocab ? vocab->value.size() : 0; }

rigtok_status rigtok_encode(const rigtok_rig* rig, const rigtok_vocab* vocab, int t_d,
                            uint64_t seed, rigtok_sequence** out) {
  RIGTOK_REQUIRE(rig && vocab && out, "encode: null argument");
  return Guard([&] {
    const auto& r = rig->value;
    const rigtok::DenseSkin dense = rigtok::ToDense(r.skin);
    std::vector<std::vector<rigtok::TokenId>> skin(r.skeleton.size());
    for (int j = 0; j < r.skeleton.size(); ++j) {
      std::vector<double> column(dense.rows(), 0.0);
      if (j < dense.cols()) {
        for (Eigen::Index i = 0; i < dense.rows(); ++i) column[i] = dense(i, j);
      }
      skin[j] = rigtok::ProjectWeightsToTokens(column, vocab->value.levels(), t_d, seed);
    }
    *out = new rigtok_sequence{rigtok::EncodeRig(r.skeleton, skin, vocab->value, t_d)};
    return RIGTOK_OK;
  });
}

rigtok_status rigtok_sequence_create(const int* tokens, size_t length, int t_d,
                                     rigtok_sequence** out) {
  RIGTOK_REQUIRE((tokens || length == 0) && out, "sequence_create: null argument");
  RIGTOK_REQUIRE(t_d >= 0, "sequence_create: negative t_d");
  return Guard([&] {
    *out = new rigtok_sequence{rigtok::RigSequence{std::vector<int>(tokens, tokens + length), t_d}};
    return RIGTOK_OK;
  });
}

void rigtok_sequence_free(rigtok_sequence* sequence) { delete sequence; }

size_t rigtok_sequence_length(const rigtok_sequence* sequence) {
  return sequence ? sequence->value.tokens.size() : 0;
}

int rigtok_sequence_td(const rigtok_sequence* sequence) { return sequence ? sequence->value.t_d : 0; }

const int* rigtok_sequence_tokens(const rigtok_sequence* sequence) {
  return sequence ? sequence->value.tokens.data() : nullptr;
}

rigtok_status rigtok_sequence_read(const char* path, rigtok_vocab** vocab,
                                   rigtok_sequence** sequence) {
  RIGTOK_REQUIRE(path && vocab && sequence, "sequence_read: null argument");
  return Guard([&] {
    std::ifstream file(path);
    if (!file) return Fail(RIGTOK_ERR_IO, std::string("cannot open ") + path);
    auto stream = rigtok::ReadTokenStream(file);
    *vocab = new rigtok_vocab{std::move(stream.vocab)};
    *sequence = new rigtok_sequence{std::move(stream.sequence)};
    return RIGTOK_OK;
  });
}

rigtok_status rigtok_sequence_write(const rigtok_vocab* vocab, const rigtok_sequence* sequence,
                                    const char* path) {
  RIGTOK_REQUIRE(vocab && sequence && path, "sequence_write: null argument");
  return Guard([&] {
    std::ofstream file(path);
    if (!file) return Fail(RIGTOK_ERR_IO, std::string("cannot open ") + path + " for writing");
    rigtok::WriteTokenStream(vocab->value, sequence->value, file);
    if (!file) return Fail(RIGTOK_ERR_IO, std::string("write failed: ") + path);
    return RIGTOK_OK;
  });
}

rigtok_status rigtok_sequence_parse(const char* text, size_t length, rigtok_vocab** vocab,
                                    rigtok_sequence** sequence) {
  RIGTOK_REQUIRE((text || length == 0) && vocab && sequence, "sequence_parse: null argument");
  return Guard([&] {
    std::istringstream in(std::string(text ? text : "", length));
    auto stream = rigtok::ReadTokenStream(in);
    *vocab = new rigtok_vocab{std::move(stream.vocab)};
    *sequence = new rigtok_sequence{std::move(stream.sequence)};
    return RIGTOK_OK;
  });
}

rigtok_status rigtok_sequence_format(const rigtok_vocab* vocab, const rigtok_sequence* sequence,
                                     char** out) {
  RIGTOK_REQUIRE(vocab && sequence && out, "sequence_format: null argument");
  return Guard([&] {
    std::ostringstream text;
    rigtok::WriteTokenStream(vocab->value, sequence->value, text);
    *out = CopyString(text.str());
    return RIGTOK_OK;
  });
}

rigtok_status rigtok_decode(const rigtok_vocab* vocab, const rigtok_sequence* sequence,
                            rigtok_rig** out, int64_t* skin_tokens, size_t* skin_count) {
  RIGTOK_REQUIRE(vocab && sequence && out, "decode: null argument");
  return Guard([&] {
    auto decoded = rigtok::DecodeRig(sequence->value, vocab->value);
    if (!decoded.ok()) {
      return Fail(RIGTOK_ERR_DECODE, std::string(rigtok::DecodeFailureName(decoded.failure)) +
                                         ": " + decoded.detail);
    }
    std::vector<int64_t> flat;
    for (const auto& joint : decoded.skin_tokens) {
      for (const auto& t : joint) flat.push_back(t.value);
    }
    if (skin_count) {
      if (skin_tokens) {
        if (*skin_count < flat.size()) {
          *skin_count = flat.size();
          return Fail(RIGTOK_ERR_CAPACITY, "decode: skin token buffer too small");
        }
        std::copy(flat.begin(), flat.end(), skin_tokens);
      }
      *skin_count = flat.size();
    }
    rigtok::Rig rig;
    rig.skeleton = std::move(decoded.skeleton);
    rig.skin = {0, rig.skeleton.size(), {}};
    *out = new rigtok_rig{std::move(rig)};
    return RIGTOK_OK;
  });
}

rigtok_status rigtok_sequence_validate(const rigtok_vocab* vocab, const rigtok_sequence* sequence,
                                       int* valid, char** failure) {
  RIGTOK_REQUIRE(vocab && sequence && valid, "sequence_validate: null argument");
  return Guard([&] {
    const auto check = rigtok::ValidateSequence(sequence->value, vocab->value);
    *valid = check.valid ? 1 : 0;
    if (failure) {
      *failure = CopyString(check.valid ? std::string()
                                        : std::string(rigtok::DecodeFailureName(check.failure)) +
                                              (check.detail.empty() ? "" : ": " + check.detail));
    }
    return RIGTOK_OK;
  });
}

// ---- Rewards ----------------------------------------------------------------

void rigtok_reward_config_default(rigtok_reward_config* config) {
  if (!config) return;
  const rigtok::RewardConfig d;
  *config = {d.alpha,        d.resolution,  d.fill == rigtok::FillMode::kSolid ? RIGTOK_FILL_SOLID : RIGTOK_FILL_SURFACE,
             d.bone_samples, d.beta,        d.max_influences, d.alpha_z, d.alpha_m, d.motion_scale,
             d.motion_eps,   d.n_poses,     d.max_angle,      d.seed,    d.w_vj,    d.w_vk,
             d.w_sc,         d.w_mo};
}

rigtok_status rigtok_reward_evaluate(const rigtok_mesh* mesh, const rigtok_rig* rig,
                                     const rigtok_reward_config* config,
                                     rigtok_reward_report* report) {
  RIGTOK_REQUIRE(mesh && rig && config && report, "reward_evaluate: null argument");
  return Guard([&] {
    rigtok::RewardConfig c;
    c.alpha = config->alpha;
    c.resolution = config->resolution;
    c.fill = config->fill == RIGTOK_FILL_SURFACE ? rigtok::FillMode::kSurface : rigtok::FillMode::kSolid;
    c.bone_samples = config->bone_samples;
    c.beta = config->beta;
    c.max_influences = config->max_influences;
    c.alpha_z = config->alpha_z;
    c.alpha_m = config->alpha_m;
    c.motion_scale = config->motion_scale;
    c.motion_eps = config->motion_eps;
    c.n_poses = config->n_poses;
    c.max_angle = config->max_angle;
    c.seed = config->seed;
    c.w_vj = config->w_vj;
    c.w_vk = config->w_vk;
    c.w_sc = config->w_sc;
    c.w_mo = config->w_mo;
    const auto r = rigtok::EvaluateRig(mesh->value, rig->value, c);
    *report = {r.r_vj, r.r_vk,     r.r_sc,     r.r_z,        r.r_m,
               r.r_mo, r.composite, r.valid ? 1 : 0, r.no_bones ? 1 : 0, r.voxel_fallback ? 1 : 0};
    if (!r.valid) g_last_error = r.failure;
    return RIGTOK_OK;
  });
}

// ---- Metrics ----------------------------------------------------------------

void rigtok_metrics_config_default(rigtok_metrics_config* config) {
  if (!config) return;
  const rigtok::RewardConfig reward;
  *config = {rigtok::kSkinActiveEps, reward.n_poses, reward.max_angle, reward.seed,
             rigtok::kDefaultBoneSamples};
}

rigtok_status rigtok_metrics_evaluate(const rigtok_rig* pred, const rigtok_rig* gt,
                                      const rigtok_mesh* mesh, const rigtok_metrics_config* config,
                                      rigtok_skeleton_metrics* skeleton, rigtok_skin_metrics* skin) {
  RIGTOK_REQUIRE(pred && gt && config, "metrics_evaluate: null argument");
  return Guard([&] {
    if (skeleton) {
      const auto m = rigtok::ChamferSkeleton(pred->value.skeleton, gt->value.skeleton, config->bone_samples);
      *skeleton = {m.j2j, m.j2b, m.b2b};
    }
    if (skin) {
      const auto& p = pred->value.skin;
      const auto& g = gt->value.skin;
      if (p.vertex_count != g.vertex_count || p.joint_count != g.joint_count) {
        return Fail(RIGTOK_ERR_INVALID_ARGUMENT,
                    "metrics: predicted and ground-truth skins differ in shape");
      }
      auto m = rigtok::SkinReport(rigtok::ToDense(p), rigtok::ToDense(g), config->eps);
      m.motion_loss = mesh ? rigtok::MotionLoss(mesh->value, gt->value.skeleton, g, p, config->n_poses,
                                                config->max_angle, config->seed)
                           : std::nan("");
      *skin = {m.l1, m.l1_var, m.precision, m.recall, m.iou, m.mask_accuracy, m.motion_loss};
    }
    return RIGTOK_OK;
  });
}

rigtok_status rigtok_sparsity(const rigtok_rig* const* rigs, size_t count,
                              rigtok_sparsity_report* report) {
  RIGTOK_REQUIRE((rigs || count == 0) && report, "sparsity: null argument");
  return Guard([&] {
    std::vector<rigtok::Rig> values;
    values.reserve(count);
    for (size_t i = 0; i < count; ++i) {
      if (!rigs[i]) return Fail(RIGTOK_ERR_INVALID_ARGUMENT, "sparsity: null rig in collection");
      values.push_back(rigs[i]->value);
    }
    const auto r = rigtok::ComputeSparsity(values);
    *report = {r.rig_count, r.avg_n, r.avg_j, r.avg_nnz, r.avg_sparsity};
    return RIGTOK_OK;
  });
}

// ---- Augmentation -----------------------------------------------------------

void rigtok_augment_config_default(rigtok_augment_config* config) {
  if (!config) return;
  const rigtok::AugmentConfig d;
  *config = {d.p_delete, d.max_delete_frac, d.p_subtree, d.p_reconnect, d.max_reconnect_frac,
             d.p_scale,  d.min_scale,       d.max_scale, d.p_rotate,    d.max_rotate,
             d.p_pose,   d.max_pose,        d.p_noise,   d.sigma_joint, d.sigma_vertex,
             d.delete_vertices ? 1 : 0};
}

rigtok_status rigtok_augment(const rigtok_rig* rig, const rigtok_mesh* mesh,
                             const rigtok_augment_config* config, const char* ops, uint64_t seed,
                             rigtok_rig** out_rig, rigtok_mesh** out_mesh) {
  RIGTOK_REQUIRE(rig && mesh && config && ops && out_rig && out_mesh, "augment: null argument");
  return Guard([&] {
    rigtok::AugmentConfig c;
    c.p_delete = config->p_delete;
    c.max_delete_frac = config->max_delete_frac;
    c.p_subtree = config->p_subtree;
    c.p_reconnect = config->p_reconnect;
    c.max_reconnect_frac = config->max_reconnect_frac;
    c.p_scale = config->p_scale;
    c.min_scale = config->min_scale;
    c.max_scale = config->max_scale;
    c.p_rotate = config->p_rotate;
    c.max_rotate = config->max_rotate;
    c.p_pose = config->p_pose;
    c.max_pose = config->max_pose;
    c.p_noise = config->p_noise;
    c.sigma_joint = config->sigma_joint;
    c.sigma_vertex = config->sigma_vertex;
    c.delete_vertices = config->delete_vertices != 0;
    std::vector<std::string> names;
    if (*ops) names = SplitCommas(ops);
    auto result = rigtok::Augment(rig->value, mesh->value, c, names, seed);
    *out_rig = new rigtok_rig{std::move(result.rig)};
    *out_mesh = new rigtok_mesh{std::move(result.mesh)};
    return RIGTOK_OK;
  });
}

// ---- GRPO -------------------------------------------------------------------

void rigtok_grpo_config_default(rigtok_grpo_config* config) {
  if (!config) return;
  const rigtok::GrpoConfig d;
  *config = {d.group_size, d.clip_epsilon, d.kl_beta,
             d.learning_rate, d.advantage_eps, d.inner_steps,
             d.mode == rigtok::ObjectiveMode::kPpoStandard ? RIGTOK_OBJECTIVE_PPO_STANDARD
                                                           : RIGTOK_OBJECTIVE_AS_WRITTEN};
}

rigtok_status rigtok_grpo_demo(const char* task, int steps, const rigtok_grpo_config* config,
                               uint64_t seed, rigtok_grpo_callback callback, void* user) {
  RIGTOK_REQUIRE(task && config, "grpo_demo: null argument");
  return Guard([&] {
    rigtok::DemoTask demo = [&] {
      if (std::strcmp(task, "match") == 0) return rigtok::MatchTargetTask();
      if (std::strcmp(task, "valid") == 0) return rigtok::ValiditySequenceTask();
      throw rigtok::Error(rigtok::ErrorCode::kInvalidArgument,
                          std::string("grpo: unknown task '") + task + "' (expected match or valid)");
    }();
    rigtok::GrpoConfig c;
    c.group_size = config->group_size;
    c.clip_epsilon = config->clip_epsilon;
    c.kl_beta = config->kl_beta;
    c.learning_rate = config->learning_rate;
    c.advantage_eps = config->advantage_eps;
    c.inner_steps = config->inner_steps;
    c.mode = config->mode == RIGTOK_OBJECTIVE_PPO_STANDARD ? rigtok::ObjectiveMode::kPpoStandard
                                                           : rigtok::ObjectiveMode::kAsWritten;
    rigtok::TrainLoop(demo.initial, demo.reward, steps, c, seed, demo.success,
                      [&](const rigtok::TraceRow& row) {
                        if (!callback) return;
                        const rigtok_grpo_row out{row.step, row.mean_reward, row.success_rate,
                                                  row.kl, row.objective};
                        callback(&out, user);
                      });
    return RIGTOK_OK;
  });
}

}  // extern "C"
