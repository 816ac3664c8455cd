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

// rigtok: command-line front end over the rigtok C API.

#include "rigtok/rigtok.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <iterator>
#include <memory>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

namespace {

using Json = nlohmann::ordered_json;

constexpr int kExitDomain = 1;
constexpr int kExitUsage = 2;

struct DomainError {
  std::string message;
};

void Check(rigtok_status status) {
  if (status != RIGTOK_OK) throw DomainError{rigtok_last_error()};
}

struct MeshFree {
  void operator()(rigtok_mesh* m) const { rigtok_mesh_free(m); }
};
struct RigFree {
  void operator()(rigtok_rig* r) const { rigtok_rig_free(r); }
};
struct VocabFree {
  void operator()(rigtok_vocab* v) const { rigtok_vocab_free(v); }
};
struct SequenceFree {
  void operator()(rigtok_sequence* s) const { rigtok_sequence_free(s); }
};
struct StringFree {
  void operator()(char* s) const { rigtok_string_free(s); }
};
using MeshPtr = std::unique_ptr<rigtok_mesh, MeshFree>;
using RigPtr = std::unique_ptr<rigtok_rig, RigFree>;
using VocabPtr = std::unique_ptr<rigtok_vocab, VocabFree>;
using SequencePtr = std::unique_ptr<rigtok_sequence, SequenceFree>;
using StringPtr = std::unique_ptr<char, StringFree>;

MeshPtr LoadMesh(const std::string& path) {
  rigtok_mesh* m = nullptr;
  Check(rigtok_mesh_load(path.c_str(), &m));
  return MeshPtr(m);
}

RigPtr LoadRig(const std::string& path) {
  rigtok_rig* r = nullptr;
  Check(rigtok_rig_load(path.c_str(), &r));
  return RigPtr(r);
}

std::string RigJson(const rigtok_rig* rig) {
  char* text = nullptr;
  Check(rigtok_rig_to_json(rig, &text));
  return StringPtr(text).get();
}

std::string ReadAll(const std::string& path) {
  if (path == "-") {
    return {std::istreambuf_iterator<char>(std::cin), std::istreambuf_iterator<char>()};
  }
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DomainError{"cannot open " + path};
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void WriteAll(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out || !(out << text)) throw DomainError{"cannot write " + path};
}

std::string Num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  return buf;
}

Json JNum(double v) {
  if (!std::isfinite(v)) return nullptr;
  return std::stod(Num(v));
}

double Radians(double degrees) { return degrees * std::numbers::pi / 180.0; }

// Ordered list of key/value pairs printed as "key value" lines or as one
// JSON object.
class Report {
 public:
  void Add(const std::string& key, double value) { rows_.push_back({key, JNum(value)}); }
  void Add(const std::string& key, int value) { rows_.push_back({key, value}); }
  void Add(const std::string& key, bool value) { rows_.push_back({key, value}); }
  void Add(const std::string& key, const std::string& value) { rows_.push_back({key, value}); }
  void Comment(const std::string& text) { comments_.push_back(text); }

  void Print(bool json) const {
    if (json) {
      Json out = Json::object();
      if (!comments_.empty()) out["notes"] = comments_;
      for (const auto& [k, v] : rows_) out[k] = v;
      std::cout << out.dump() << "\n";
      return;
    }
    for (const auto& c : comments_) std::cout << "# " << c << "\n";
    for (const auto& [k, v] : rows_) {
      std::cout << k << " ";
      if (v.is_null()) {
        std::cout << "nan";
      } else if (v.is_number_float()) {
        std::cout << Num(v.get<double>());
      } else if (v.is_boolean()) {
        std::cout << (v.get<bool>() ? 1 : 0);
      } else if (v.is_string()) {
        std::cout << v.get<std::string>();
      } else {
        std::cout << v.dump();
      }
      std::cout << "\n";
    }
  }

 private:
  std::vector<std::pair<std::string, Json>> rows_;
  std::vector<std::string> comments_;
};

void EchoConfig(const CLI::App& sub) {
  std::cerr << "# rigtok " << sub.get_name() << " resolved configuration\n"
            << sub.config_to_str(true, false);
}

// ---------------------------------------------------------------------------

struct Globals {
  std::string format = "text";
  bool json() const { return format == "json"; }
};

struct TokenizeArgs {
  std::string rig, out;
  int td = 4;
  int bins = 256;
  std::vector<int> levels = {8, 8, 8, 5, 5, 5};
  std::uint64_t seed = 7;
};

int RunTokenize(const TokenizeArgs& a, const Globals&) {
  auto rig = LoadRig(a.rig);
  rigtok_vocab* v = nullptr;
  Check(rigtok_vocab_for_rig(a.bins, a.levels.data(), a.levels.size(), rig.get(), &v));
  VocabPtr vocab(v);
  rigtok_sequence* s = nullptr;
  Check(rigtok_encode(rig.get(), vocab.get(), a.td, a.seed, &s));
  SequencePtr seq(s);
  char* text = nullptr;
  Check(rigtok_sequence_format(vocab.get(), seq.get(), &text));
  StringPtr owned(text);
  if (a.out.empty() || a.out == "-") {
    std::cout << text;
  } else {
    WriteAll(a.out, text);
    std::cerr << "wrote " << rigtok_sequence_length(seq.get()) << " tokens to " << a.out << "\n";
  }
  return 0;
}

struct DetokenizeArgs {
  std::string in = "-", out;
};

int RunDetokenize(const DetokenizeArgs& a, const Globals& g) {
  const std::string text = ReadAll(a.in);
  rigtok_vocab* v = nullptr;
  rigtok_sequence* s = nullptr;
  Check(rigtok_sequence_parse(text.data(), text.size(), &v, &s));
  VocabPtr vocab(v);
  SequencePtr seq(s);
  size_t count = 0;
  rigtok_rig* r = nullptr;
  Check(rigtok_decode(vocab.get(), seq.get(), &r, nullptr, &count));
  RigPtr rig(r);
  std::vector<int64_t> skin(count);
  rigtok_rig* again = nullptr;
  Check(rigtok_decode(vocab.get(), seq.get(), &again, skin.data(), &count));
  rigtok_rig_free(again);

  const std::string rig_json = RigJson(rig.get());
  if (!a.out.empty()) WriteAll(a.out, rig_json);
  if (g.json()) {
    const int td = rigtok_sequence_td(seq.get());
    Json out;
    out["joints"] = rigtok_rig_joint_count(rig.get());
    out["t_d"] = td;
    Json blocks = Json::array();
    for (int j = 0; j < rigtok_rig_joint_count(rig.get()); ++j) {
      blocks.push_back(std::vector<int64_t>(skin.begin() + j * td, skin.begin() + (j + 1) * td));
    }
    out["skin_tokens"] = blocks;
    out["rig"] = Json::parse(rig_json);
    std::cout << out.dump() << "\n";
  } else if (a.out.empty()) {
    std::cout << rig_json;
  } else {
    std::cout << "joints " << rigtok_rig_joint_count(rig.get()) << "\n";
  }
  return 0;
}

struct ValidateArgs {
  std::string rig, seq, mesh;
};

int RunValidate(const ValidateArgs& a, const Globals& g) {
  Report report;
  bool valid = false;
  if (!a.seq.empty()) {
    const std::string text = ReadAll(a.seq);
    rigtok_vocab* v = nullptr;
    rigtok_sequence* s = nullptr;
    Check(rigtok_sequence_parse(text.data(), text.size(), &v, &s));
    VocabPtr vocab(v);
    SequencePtr seq(s);
    int ok = 0;
    char* failure = nullptr;
    Check(rigtok_sequence_validate(vocab.get(), seq.get(), &ok, &failure));
    StringPtr owned(failure);
    valid = ok != 0;
    report.Add("valid", valid);
    if (!valid) report.Add("failure", std::string(failure));
  } else {
    auto rig = LoadRig(a.rig);
    MeshPtr mesh;
    if (!a.mesh.empty()) mesh = LoadMesh(a.mesh);
    int violations = 0;
    char* text = nullptr;
    Check(rigtok_rig_validate(rig.get(), mesh.get(), &violations, &text));
    StringPtr owned(text);
    valid = violations == 0;
    report.Add("valid", valid);
    report.Add("violations", violations);
    std::istringstream lines(text);
    std::string line;
    int k = 0;
    while (std::getline(lines, line)) report.Add("violation_" + std::to_string(k++), line);
  }
  report.Print(g.json());
  return valid ? 0 : kExitDomain;
}

struct RewardArgs {
  std::string mesh, rig, fill = "solid";
  int res = 64;
  double alpha = 0.05, beta = 0.1;
  int poses = 5, samples = 8, max_influences = 4;
  double max_angle_deg = 30.0, motion_scale = 1.0;
  std::vector<double> weights = {5.0, 1.0, 1.0, 1.0};
  std::uint64_t seed = 7;
  bool renormalize = false;
};

int RunReward(const RewardArgs& a, const Globals& g) {
  auto mesh = LoadMesh(a.mesh);
  auto rig = LoadRig(a.rig);
  if (a.renormalize) Check(rigtok_rig_renormalize(rig.get()));
  rigtok_reward_config c;
  rigtok_reward_config_default(&c);
  c.resolution = a.res;
  c.alpha = a.alpha;
  c.beta = a.beta;
  c.fill = a.fill == "surface" ? RIGTOK_FILL_SURFACE : RIGTOK_FILL_SOLID;
  c.n_poses = a.poses;
  c.bone_samples = a.samples;
  c.max_influences = a.max_influences;
  c.max_angle = Radians(a.max_angle_deg);
  c.motion_scale = a.motion_scale;
  c.seed = a.seed;
  c.w_vj = a.weights[0];
  c.w_vk = a.weights[1];
  c.w_sc = a.weights[2];
  c.w_mo = a.weights[3];
  rigtok_reward_report r;
  Check(rigtok_reward_evaluate(mesh.get(), rig.get(), &c, &r));
  Report report;
  report.Add("valid", r.valid != 0);
  if (!r.valid) report.Add("failure", std::string(rigtok_last_error()));
  report.Add("r_vj", r.r_vj);
  report.Add("r_vk", r.r_vk);
  report.Add("r_sc", r.r_sc);
  report.Add("r_z", r.r_z);
  report.Add("r_m", r.r_m);
  report.Add("r_mo", r.r_mo);
  report.Add("composite", r.composite);
  report.Add("no_bones", r.no_bones != 0);
  report.Add("voxel_fallback", r.voxel_fallback != 0);
  report.Print(g.json());
  return r.valid ? 0 : kExitDomain;
}

struct MetricsArgs {
  std::string pred, gt, mesh;
  double eps = 1e-2, max_angle_deg = 30.0;
  int poses = 5, samples = 10;
  std::uint64_t seed = 7;
  bool renormalize = false;
};

int RunMetrics(const MetricsArgs& a, const Globals& g) {
  auto pred = LoadRig(a.pred);
  auto gt = LoadRig(a.gt);
  auto mesh = LoadMesh(a.mesh);
  if (a.renormalize) {
    Check(rigtok_rig_renormalize(pred.get()));
    Check(rigtok_rig_renormalize(gt.get()));
  }
  rigtok_metrics_config c;
  rigtok_metrics_config_default(&c);
  c.eps = a.eps;
  c.n_poses = a.poses;
  c.max_angle = Radians(a.max_angle_deg);
  c.seed = a.seed;
  c.bone_samples = a.samples;
  const bool same_shape = rigtok_rig_vertex_count(pred.get()) == rigtok_rig_vertex_count(gt.get()) &&
                          rigtok_rig_joint_count(pred.get()) == rigtok_rig_joint_count(gt.get());
  rigtok_skeleton_metrics sk;
  rigtok_skin_metrics sm;
  Check(rigtok_metrics_evaluate(pred.get(), gt.get(), mesh.get(), &c, &sk, same_shape ? &sm : nullptr));

  Report report;
  report.Comment("skeleton: symmetric mean nearest distances (raw, and x100 as *_x100)");
  report.Comment("skin: active = weight > eps; l1 = per-vertex L1 averaged over vertices; "
                 "precision, recall and iou are 1 on empty sets");
  report.Add("j2j", sk.j2j);
  report.Add("j2b", sk.j2b);
  report.Add("b2b", sk.b2b);
  report.Add("j2j_x100", 100.0 * sk.j2j);
  report.Add("j2b_x100", 100.0 * sk.j2b);
  report.Add("b2b_x100", 100.0 * sk.b2b);
  if (same_shape) {
    report.Add("skin_l1", sm.l1);
    report.Add("skin_l1_var", sm.l1_var);
    report.Add("precision", sm.precision);
    report.Add("recall", sm.recall);
    report.Add("iou", sm.iou);
    report.Add("mask_accuracy", sm.mask_accuracy);
    report.Add("motion_loss", sm.motion_loss);
    report.Add("skin_l1_x100", 100.0 * sm.l1);
    report.Add("skin_l1_var_x100", 100.0 * sm.l1_var);
    report.Add("motion_loss_x100", 100.0 * sm.motion_loss);
  } else {
    report.Comment("skin metrics skipped: joint or vertex counts differ");
  }
  report.Print(g.json());
  return 0;
}

struct StatsArgs {
  std::string dir;
};

int RunStats(const StatsArgs& a, const Globals& g) {
  namespace fs = std::filesystem;
  std::error_code ec;
  if (!fs::is_directory(a.dir, ec)) throw DomainError{"not a directory: " + a.dir};
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(a.dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".json") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  std::vector<RigPtr> rigs;
  for (const auto& f : files) rigs.push_back(LoadRig(f.string()));
  std::vector<const rigtok_rig*> raw;
  for (const auto& r : rigs) raw.push_back(r.get());
  rigtok_sparsity_report s;
  Check(rigtok_sparsity(raw.data(), raw.size(), &s));
  Report report;
  report.Add("rigs", s.rig_count);
  report.Add("avg_n", s.avg_n);
  report.Add("avg_j", s.avg_j);
  report.Add("avg_nnz", s.avg_nnz);
  report.Add("avg_sparsity", s.avg_sparsity);
  report.Add("avg_sparsity_pct", 100.0 * s.avg_sparsity);
  report.Print(g.json());
  return 0;
}

struct AugmentArgs {
  std::string rig, mesh, prefix = "aug_";
  std::vector<std::string> ops = {"delete", "subtree", "reconnect", "scale", "rotate", "noise", "pose"};
  std::uint64_t seed = 7;
  int count = 1;
  bool always = false, with_vertices = false;
};

int RunAugment(const AugmentArgs& a, const Globals& g) {
  auto rig = LoadRig(a.rig);
  auto mesh = LoadMesh(a.mesh);
  rigtok_augment_config c;
  rigtok_augment_config_default(&c);
  c.delete_vertices = a.with_vertices ? 1 : 0;
  if (a.always) {
    c.p_delete = c.p_subtree = c.p_reconnect = c.p_scale = c.p_rotate = c.p_pose = c.p_noise = 1.0;
  }
  std::string ops;
  for (size_t i = 0; i < a.ops.size(); ++i) ops += (i ? "," : "") + a.ops[i];
  Json written = Json::array();
  for (int k = 0; k < a.count; ++k) {
    rigtok_rig* r = nullptr;
    rigtok_mesh* m = nullptr;
    Check(rigtok_augment(rig.get(), mesh.get(), &c, ops.c_str(), a.seed + k, &r, &m));
    RigPtr out_rig(r);
    MeshPtr out_mesh(m);
    const std::string stem = a.count == 1 ? a.prefix : a.prefix + std::to_string(k) + "_";
    Check(rigtok_rig_save(out_rig.get(), (stem + "rig.json").c_str()));
    Check(rigtok_mesh_save(out_mesh.get(), (stem + "mesh.obj").c_str()));
    written.push_back({{"rig", stem + "rig.json"},
                       {"mesh", stem + "mesh.obj"},
                       {"joints", rigtok_rig_joint_count(out_rig.get())},
                       {"vertices", rigtok_mesh_vertex_count(out_mesh.get())}});
  }
  if (g.json()) {
    std::cout << written.dump() << "\n";
  } else {
    for (const auto& w : written) {
      std::cout << w["rig"].get<std::string>() << " " << w["mesh"].get<std::string>() << " joints "
                << w["joints"].get<int>() << " vertices " << w["vertices"].get<int>() << "\n";
    }
  }
  return 0;
}

struct FsqArgs {
  std::vector<int> levels;
  bool size = false;
  std::string roundtrip;
  int vertices = 0, td = 0;
  std::string mode = "fp16";
};

int RunFsq(const FsqArgs& a, const Globals& g) {
  const size_t dim = a.levels.size();
  if (!a.roundtrip.empty()) {
    const std::string text = ReadAll(a.roundtrip);
    std::istringstream in(text);
    std::vector<double> values;
    std::string word;
    while (in >> word) {
      try {
        size_t used = 0;
        values.push_back(std::stod(word, &used));
        if (used != word.size()) throw std::invalid_argument(word);
      } catch (const std::exception&) {
        throw DomainError{"not a real number: '" + word + "'"};
      }
    }
    if (values.size() % dim != 0) {
      throw DomainError{std::to_string(values.size()) + " values do not form whole " +
                        std::to_string(dim) + "-vectors"};
    }
    Json tokens = Json::array();
    for (size_t i = 0; i < values.size(); i += dim) {
      int64_t token = 0;
      Check(rigtok_fsq_quantize(a.levels.data(), dim, values.data() + i, &token));
      if (g.json()) {
        tokens.push_back(token);
      } else {
        std::cout << token << "\n";
      }
    }
    if (g.json()) std::cout << Json{{"tokens", tokens}}.dump() << "\n";
    return 0;
  }
  int64_t size = 0;
  Check(rigtok_fsq_codebook_size(a.levels.data(), dim, &size));
  if (a.vertices > 0) {
    double ratio = 0.0;
    Check(rigtok_fsq_compression_ratio(a.vertices, a.td, a.levels.data(), dim,
                                       a.mode == "bits" ? RIGTOK_COMPRESSION_BIT_EXACT
                                                        : RIGTOK_COMPRESSION_FP16_STORAGE,
                                       &ratio));
    Report report;
    report.Add("codebook_size", static_cast<int>(size));
    report.Add("compression_ratio", ratio);
    report.Print(g.json());
    return 0;
  }
  if (g.json()) {
    std::cout << Json{{"codebook_size", size}}.dump() << "\n";
  } else {
    std::cout << size << "\n";
  }
  return 0;
}

struct GrpoArgs {
  std::string task = "match", mode = "as-written";
  int steps = 500, group = 24, inner = 1;
  double clip = 0.2, beta = 0.1, lr = 0.0;
  std::uint64_t seed = 7;
};

int RunGrpo(const GrpoArgs& a, const Globals& g) {
  rigtok_grpo_config c;
  rigtok_grpo_config_default(&c);
  c.group_size = a.group;
  c.clip_epsilon = a.clip;
  c.kl_beta = a.beta;
  if (a.lr > 0.0) c.learning_rate = a.lr;
  c.inner_steps = a.inner;
  c.mode = a.mode == "ppo" ? RIGTOK_OBJECTIVE_PPO_STANDARD : RIGTOK_OBJECTIVE_AS_WRITTEN;
  struct Sink {
    bool json;
    Json rows = Json::array();
  } sink{g.json()};
  if (!sink.json) std::cout << "step,mean_reward,success_rate,kl,objective\n";
  auto on_row = [](const rigtok_grpo_row* row, void* user) {
    auto* s = static_cast<Sink*>(user);
    if (s->json) {
      s->rows.push_back({{"step", row->step},
                         {"mean_reward", JNum(row->mean_reward)},
                         {"success_rate", JNum(row->success_rate)},
                         {"kl", JNum(row->kl)},
                         {"objective", JNum(row->objective)}});
    } else {
      std::cout << row->step << "," << Num(row->mean_reward) << "," << Num(row->success_rate) << ","
                << Num(row->kl) << "," << Num(row->objective) << "\n";
    }
  };
  Check(rigtok_grpo_demo(a.task.c_str(), a.steps, &c, a.seed, on_row, &sink));
  if (sink.json) std::cout << sink.rows.dump() << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"rigtok: rig tokenization, rewards, metrics and augmentation"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals globals;
  app.add_option("--format", globals.format, "Output format")
      ->check(CLI::IsMember({"text", "json"}))
      ->capture_default_str();

  int exit_code = 0;
  auto guarded = [&](auto fn) {
    return [&, fn] {
      try {
        exit_code = fn();
      } catch (const DomainError& e) {
        std::cerr << "error: " << e.message << "\n";
        exit_code = kExitDomain;
      }
    };
  };

  TokenizeArgs tok;
  auto* tokenize = app.add_subcommand("tokenize", "Encode a rig file as a token stream");
  tokenize->add_option("--rig", tok.rig, "Input rig JSON")->required();
  tokenize->add_option("--out", tok.out, "Output token stream (stdout when omitted)");
  tokenize->add_option("--td", tok.td, "Skin tokens per joint")->check(CLI::NonNegativeNumber)->capture_default_str();
  tokenize->add_option("--bins", tok.bins, "Coordinate bins")->check(CLI::Range(2, 1 << 20))->capture_default_str();
  tokenize->add_option("--levels", tok.levels, "FSQ levels")->delimiter(',')->capture_default_str();
  tokenize->add_option("--seed", tok.seed, "Seed of the skin projection")->capture_default_str();
  tokenize->callback(guarded([&] {
    EchoConfig(*tokenize);
    return RunTokenize(tok, globals);
  }));

  DetokenizeArgs detok;
  auto* detokenize = app.add_subcommand("detokenize", "Decode a token stream into a rig file");
  detokenize->add_option("--in", detok.in, "Token stream ('-' for stdin)")->capture_default_str();
  detokenize->add_option("--out", detok.out, "Output rig JSON (stdout when omitted)");
  detokenize->callback(guarded([&] {
    EchoConfig(*detokenize);
    return RunDetokenize(detok, globals);
  }));

  ValidateArgs val;
  auto* validate = app.add_subcommand("validate", "Check a rig file or a token stream");
  auto* vrig = validate->add_option("--rig", val.rig, "Rig JSON");
  auto* vseq = validate->add_option("--seq", val.seq, "Token stream");
  validate->add_option("--mesh", val.mesh, "Mesh OBJ checked against the rig");
  vrig->excludes(vseq);
  validate->callback(guarded([&] {
    EchoConfig(*validate);
    if (val.rig.empty() && val.seq.empty()) throw CLI::RequiredError("--rig or --seq");
    return RunValidate(val, globals);
  }));

  RewardArgs rw;
  auto* reward = app.add_subcommand("reward", "Score a rig against its mesh");
  reward->add_option("--mesh", rw.mesh, "Mesh OBJ")->required();
  reward->add_option("--rig", rw.rig, "Rig JSON")->required();
  reward->add_option("--res", rw.res, "Voxel resolution")->check(CLI::Range(3, 1024))->capture_default_str();
  reward->add_option("--fill", rw.fill, "Voxel fill")->check(CLI::IsMember({"solid", "surface"}))->capture_default_str();
  reward->add_option("--alpha", rw.alpha, "Joint coverage falloff per voxel")->capture_default_str();
  reward->add_option("--beta", rw.beta, "Skin weight threshold")->capture_default_str();
  reward->add_option("--samples", rw.samples, "Bone containment samples")->check(CLI::NonNegativeNumber)->capture_default_str();
  reward->add_option("--max-influences", rw.max_influences, "Influence cap")->capture_default_str();
  reward->add_option("--poses", rw.poses, "Deformation poses")->check(CLI::NonNegativeNumber)->capture_default_str();
  reward->add_option("--max-angle", rw.max_angle_deg, "Pose angle bound in degrees")->capture_default_str();
  reward->add_option("--motion-scale", rw.motion_scale, "Deformation reward scale")->capture_default_str();
  reward->add_option("--weights", rw.weights, "Composite weights vj,vk,sc,mo")->delimiter(',')->expected(4)->capture_default_str();
  reward->add_option("--seed", rw.seed, "Pose seed")->capture_default_str();
  reward->add_flag("--renormalize", rw.renormalize, "Rescale vertex weights to sum to 1");
  reward->callback(guarded([&] {
    EchoConfig(*reward);
    return RunReward(rw, globals);
  }));

  MetricsArgs mt;
  auto* metrics = app.add_subcommand("metrics", "Compare a predicted rig with ground truth");
  metrics->add_option("--pred", mt.pred, "Predicted rig JSON")->required();
  metrics->add_option("--gt", mt.gt, "Ground-truth rig JSON")->required();
  metrics->add_option("--mesh", mt.mesh, "Mesh OBJ")->required();
  metrics->add_option("--eps", mt.eps, "Active weight threshold")->capture_default_str();
  metrics->add_option("--poses", mt.poses, "Motion loss poses")->check(CLI::NonNegativeNumber)->capture_default_str();
  metrics->add_option("--max-angle", mt.max_angle_deg, "Pose angle bound in degrees")->capture_default_str();
  metrics->add_option("--samples", mt.samples, "Samples per bone")->check(CLI::Range(2, 100000))->capture_default_str();
  metrics->add_option("--seed", mt.seed, "Pose seed")->capture_default_str();
  metrics->add_flag("--renormalize", mt.renormalize, "Rescale vertex weights to sum to 1");
  metrics->callback(guarded([&] {
    EchoConfig(*metrics);
    return RunMetrics(mt, globals);
  }));

  StatsArgs st;
  auto* stats = app.add_subcommand("stats", "Skinning sparsity over a directory of rig files");
  stats->add_option("--dir", st.dir, "Directory of *.json rigs")->required();
  stats->callback(guarded([&] {
    EchoConfig(*stats);
    return RunStats(st, globals);
  }));

  AugmentArgs au;
  auto* augment = app.add_subcommand("augment", "Write seeded augmentations of a rig and mesh");
  augment->add_option("--rig", au.rig, "Rig JSON")->required();
  augment->add_option("--mesh", au.mesh, "Mesh OBJ")->required();
  augment->add_option("--ops", au.ops, "Operations")
      ->delimiter(',')
      ->check(CLI::IsMember({"delete", "subtree", "reconnect", "scale", "rotate", "noise", "pose"}))
      ->capture_default_str();
  augment->add_option("--seed", au.seed, "Seed")->capture_default_str();
  augment->add_option("--count", au.count, "Number of augmented copies")->check(CLI::PositiveNumber)->capture_default_str();
  augment->add_option("--out-prefix", au.prefix, "Output path prefix")->capture_default_str();
  augment->add_flag("--always", au.always, "Apply every selected operation");
  augment->add_flag("--with-vertices", au.with_vertices, "Deletion also removes dominated vertices");
  augment->callback(guarded([&] {
    EchoConfig(*augment);
    return RunAugment(au, globals);
  }));

  FsqArgs fq;
  auto* fsq = app.add_subcommand("fsq", "FSQ codebook arithmetic and quantization");
  fsq->add_option("--levels", fq.levels, "Levels per dimension")->delimiter(',')->required();
  fsq->add_flag("--size", fq.size, "Print the codebook size (default action)");
  fsq->add_option("--roundtrip", fq.roundtrip, "File of reals to quantize ('-' for stdin)");
  fsq->add_option("--vertices", fq.vertices, "Vertex count for the compression ratio")->check(CLI::NonNegativeNumber)->capture_default_str();
  fsq->add_option("--td", fq.td, "Tokens per joint for the compression ratio")->check(CLI::NonNegativeNumber)->capture_default_str();
  fsq->add_option("--mode", fq.mode, "Compression accounting")->check(CLI::IsMember({"fp16", "bits"}))->capture_default_str();
  fsq->callback(guarded([&] {
    EchoConfig(*fsq);
    return RunFsq(fq, globals);
  }));

  GrpoArgs gr;
  auto* grpo = app.add_subcommand("grpo-demo", "Run GRPO on a toy task and print the trace");
  grpo->add_option("--task", gr.task, "Toy task")->check(CLI::IsMember({"match", "valid"}))->capture_default_str();
  grpo->add_option("--steps", gr.steps, "Training steps")->check(CLI::PositiveNumber)->capture_default_str();
  grpo->add_option("--group", gr.group, "Group size")->check(CLI::Range(2, 1 << 20))->capture_default_str();
  grpo->add_option("--seed", gr.seed, "Seed")->capture_default_str();
  grpo->add_option("--clip", gr.clip, "Clip epsilon")->capture_default_str();
  grpo->add_option("--beta", gr.beta, "KL penalty")->capture_default_str();
  grpo->add_option("--lr", gr.lr, "Learning rate (library default when 0)")->capture_default_str();
  grpo->add_option("--inner", gr.inner, "Gradient steps per group")->check(CLI::PositiveNumber)->capture_default_str();
  grpo->add_option("--mode", gr.mode, "Objective form")->check(CLI::IsMember({"as-written", "ppo"}))->capture_default_str();
  grpo->callback(guarded([&] {
    EchoConfig(*grpo);
    return RunGrpo(gr, globals);
  }));

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n\n" << app.help();
    return kExitUsage;
  }
  return exit_code;
}
