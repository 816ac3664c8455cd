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

#include "rigtok/rigcore.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <utility>

#include <json.hpp>

#include "rigtok/error.hpp"

namespace rigtok {

const char* ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kParse: return "parse error";
    case ErrorCode::kStructure: return "structural error";
    case ErrorCode::kCycle: return "cycle";
    case ErrorCode::kWeightRange: return "weight out of range";
    case ErrorCode::kDuplicateEntry: return "duplicate entry";
    case ErrorCode::kDegenerate: return "degenerate input";
    case ErrorCode::kCapacity: return "capacity exceeded";
    case ErrorCode::kInvalidArgument: return "invalid argument";
    case ErrorCode::kDecode: return "decode failure";
    case ErrorCode::kIo: return "i/o error";
    case ErrorCode::kNumeric: return "non-finite value";
  }
  return "unknown error";
}

int Skeleton::root_count() const {
  return static_cast<int>(std::count_if(
      joints.begin(), joints.end(),
      [](const Joint& j) { return !j.parent.has_value(); }));
}

std::vector<Bone> Skeleton::bones() const {
  std::vector<Bone> out;
  for (int j = 0; j < size(); ++j) {
    const auto& parent = joints[j].parent;
    if (!parent) continue;
    out.push_back({joints[*parent].position, joints[j].position, j});
  }
  return out;
}

std::vector<std::vector<int>> Skeleton::children() const {
  std::vector<std::vector<int>> out(joints.size());
  for (int j = 0; j < size(); ++j) {
    const auto& parent = joints[j].parent;
    if (parent && *parent >= 0 && *parent < size()) out[*parent].push_back(j);
  }
  return out;
}

std::vector<Vec3> Skeleton::positions() const {
  std::vector<Vec3> out;
  out.reserve(joints.size());
  for (const auto& j : joints) out.push_back(j.position);
  return out;
}

void SparseSkin::canonicalize() {
  std::sort(entries.begin(), entries.end(),
            [](const SkinEntry& a, const SkinEntry& b) {
              return std::pair(a.vertex, a.joint) < std::pair(b.vertex, b.joint);
            });
}

Pose Pose::Identity(int joint_count) {
  Pose pose;
  pose.rotations.assign(joint_count, AxisAngle{});
  return pose;
}

// ---------------------------------------------------------------------------
// OBJ

namespace {

std::vector<std::string_view> SplitWhitespace(std::string_view line) {
  std::vector<std::string_view> out;
  size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    size_t start = i;
    while (i < line.size() && !std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    if (i > start) out.push_back(line.substr(start, i - start));
  }
  return out;
}

[[noreturn]] void ObjError(ErrorCode code, int line, const std::string& what) {
  throw Error(code, "obj line " + std::to_string(line) + ": " + what);
}

}  // namespace

Mesh ParseObj(std::istream& in) {
  Mesh mesh;
  struct PendingFace {
    std::array<long, 3> corners;
    int line;
  };
  std::vector<PendingFace> pending;
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string_view line(raw);
    if (auto hash = line.find('#'); hash != std::string_view::npos) {
      line = line.substr(0, hash);
    }
    auto tokens = SplitWhitespace(line);
    if (tokens.empty()) continue;
    if (tokens[0] == "v") {
      if (tokens.size() < 4) ObjError(ErrorCode::kParse, line_no, "vertex needs 3 coordinates");
      Vec3 p;
      for (int k = 0; k < 3; ++k) {
        auto tok = tokens[k + 1];
        double value = 0.0;
        auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), value);
        if (ec != std::errc() || ptr != tok.data() + tok.size() || !std::isfinite(value)) {
          ObjError(ErrorCode::kParse, line_no, "bad coordinate '" + std::string(tok) + "'");
        }
        p[k] = value;
      }
      mesh.vertices.push_back(p);
    } else if (tokens[0] == "f") {
      if (tokens.size() < 4) ObjError(ErrorCode::kParse, line_no, "face needs at least 3 corners");
      std::vector<long> corners;
      for (size_t k = 1; k < tokens.size(); ++k) {
        auto tok = tokens[k].substr(0, tokens[k].find('/'));
        long index = 0;
        auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), index);
        if (ec != std::errc() || ptr != tok.data() + tok.size() || index == 0) {
          ObjError(ErrorCode::kParse, line_no, "bad face index '" + std::string(tokens[k]) + "'");
        }
        // Negative indices are relative to the vertices read so far.
        corners.push_back(index > 0 ? index - 1
                                    : static_cast<long>(mesh.vertices.size()) + index);
      }
      for (size_t k = 1; k + 1 < corners.size(); ++k) {
        pending.push_back({{corners[0], corners[k], corners[k + 1]}, line_no});
      }
    }
  }
  const long n = static_cast<long>(mesh.vertices.size());
  mesh.faces.reserve(pending.size());
  for (const auto& face : pending) {
    std::array<int, 3> tri{};
    for (int k = 0; k < 3; ++k) {
      if (face.corners[k] < 0 || face.corners[k] >= n) {
        ObjError(ErrorCode::kStructure, face.line,
                 "face index " + std::to_string(face.corners[k] + 1) +
                     " out of range (" + std::to_string(n) + " vertices)");
      }
      tri[k] = static_cast<int>(face.corners[k]);
    }
    mesh.faces.push_back(tri);
  }
  return mesh;
}

Mesh ParseObj(std::string_view text) {
  std::istringstream in{std::string(text)};
  return ParseObj(in);
}

Mesh LoadObj(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open mesh '" + path + "'");
  return ParseObj(in);
}

void WriteObj(const Mesh& mesh, std::ostream& out) {
  char buf[128];
  for (const auto& v : mesh.vertices) {
    std::snprintf(buf, sizeof(buf), "v %.9g %.9g %.9g\n", v.x(), v.y(), v.z());
    out << buf;
  }
  for (const auto& f : mesh.faces) {
    out << "f " << f[0] + 1 << ' ' << f[1] + 1 << ' ' << f[2] + 1 << '\n';
  }
}

// ---------------------------------------------------------------------------
// Rig file

double RoundSignificant9(double value) {
  if (!std::isfinite(value)) throw Error(ErrorCode::kNumeric, "cannot serialize non-finite value");
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.9g", value);
  return std::strtod(buf, nullptr);
}

namespace {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

[[noreturn]] void RigError(ErrorCode code, const std::string& what) {
  throw Error(code, "rig: " + what);
}

int RequireInt(const json& value, const std::string& what) {
  if (!value.is_number_integer()) RigError(ErrorCode::kStructure, what + " must be an integer");
  return value.get<int>();
}

double RequireReal(const json& value, const std::string& what) {
  if (!value.is_number()) RigError(ErrorCode::kStructure, what + " must be a number");
  return value.get<double>();
}

// Returns a joint on a parent cycle, or -1.
int FindCycle(const std::vector<Joint>& joints) {
  const int n = static_cast<int>(joints.size());
  std::vector<int> state(n, 0);  // 0 unvisited, 1 on current walk, 2 done
  for (int start = 0; start < n; ++start) {
    if (state[start]) continue;
    std::vector<int> walk;
    int j = start;
    while (j >= 0 && j < n && state[j] == 0) {
      state[j] = 1;
      walk.push_back(j);
      j = joints[j].parent.value_or(-1);
    }
    if (j >= 0 && j < n && state[j] == 1) return j;
    for (int w : walk) state[w] = 2;
  }
  return -1;
}

}  // namespace

Rig ParseRig(std::istream& in) {
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    RigError(ErrorCode::kParse, e.what());
  }
  if (!doc.is_object()) RigError(ErrorCode::kStructure, "top level must be an object");
  if (!doc.contains("format_version") || RequireInt(doc["format_version"], "format_version") != 1) {
    RigError(ErrorCode::kStructure, "unsupported or missing format_version");
  }
  if (!doc.contains("joints") || !doc["joints"].is_array()) {
    RigError(ErrorCode::kStructure, "missing joints array");
  }

  Rig rig;
  const auto& joints = doc["joints"];
  const int joint_count = static_cast<int>(joints.size());
  for (int j = 0; j < joint_count; ++j) {
    const auto& src = joints[j];
    const std::string where = "joints[" + std::to_string(j) + "]";
    if (!src.is_object()) RigError(ErrorCode::kStructure, where + " must be an object");
    Joint joint;
    if (src.contains("name")) {
      if (!src["name"].is_string()) RigError(ErrorCode::kStructure, where + ".name must be a string");
      joint.name = src["name"].get<std::string>();
    }
    if (src.contains("chain_type")) {
      if (!src["chain_type"].is_string()) {
        RigError(ErrorCode::kStructure, where + ".chain_type must be a string");
      }
      joint.chain_type = src["chain_type"].get<std::string>();
    }
    if (!src.contains("parent")) RigError(ErrorCode::kStructure, where + " missing parent");
    const int parent = RequireInt(src["parent"], where + ".parent");
    if (parent < -1 || parent >= joint_count) {
      RigError(ErrorCode::kStructure, where + ".parent out of range");
    }
    if (parent >= 0) joint.parent = parent;
    if (!src.contains("position") || !src["position"].is_array() || src["position"].size() != 3) {
      RigError(ErrorCode::kStructure, where + ".position must be [x,y,z]");
    }
    for (int k = 0; k < 3; ++k) {
      joint.position[k] = RequireReal(src["position"][k], where + ".position");
    }
    rig.skeleton.joints.push_back(std::move(joint));
  }
  if (int c = FindCycle(rig.skeleton.joints); c >= 0) {
    RigError(ErrorCode::kCycle, "cycle in parent links through joint " + std::to_string(c));
  }
  if (joint_count > 0 && rig.skeleton.root_count() == 0) {
    RigError(ErrorCode::kStructure, "skeleton has no root");
  }

  rig.skin.joint_count = joint_count;
  if (doc.contains("skin")) {
    const auto& skin = doc["skin"];
    if (!skin.is_object()) RigError(ErrorCode::kStructure, "skin must be an object");
    if (!skin.contains("vertex_count")) RigError(ErrorCode::kStructure, "skin.vertex_count missing");
    rig.skin.vertex_count = RequireInt(skin["vertex_count"], "skin.vertex_count");
    if (rig.skin.vertex_count < 0) RigError(ErrorCode::kStructure, "skin.vertex_count negative");
    if (skin.contains("entries")) {
      if (!skin["entries"].is_array()) RigError(ErrorCode::kStructure, "skin.entries must be an array");
      std::set<std::pair<int, int>> seen;
      for (const auto& e : skin["entries"]) {
        if (!e.is_array() || e.size() != 3) {
          RigError(ErrorCode::kStructure, "skin entry must be [vertex, joint, weight]");
        }
        SkinEntry entry{RequireInt(e[0], "entry vertex"), RequireInt(e[1], "entry joint"),
                        RequireReal(e[2], "entry weight")};
        if (entry.vertex < 0 || entry.vertex >= rig.skin.vertex_count || entry.joint < 0 ||
            entry.joint >= joint_count) {
          RigError(ErrorCode::kStructure, "skin entry index out of range");
        }
        if (!(entry.weight >= 0.0 && entry.weight <= 1.0)) {
          RigError(ErrorCode::kWeightRange, "weight " + std::to_string(entry.weight) +
                                                " outside [0,1]");
        }
        if (!seen.insert({entry.vertex, entry.joint}).second) {
          RigError(ErrorCode::kDuplicateEntry,
                   "duplicate entry (" + std::to_string(entry.vertex) + ", " +
                       std::to_string(entry.joint) + ")");
        }
        rig.skin.entries.push_back(entry);
      }
    }
  }
  rig.skin.canonicalize();
  return rig;
}

Rig ParseRig(std::string_view text) {
  std::istringstream in{std::string(text)};
  return ParseRig(in);
}

Rig LoadRig(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open rig '" + path + "'");
  return ParseRig(in);
}

std::string SerializeRig(const Rig& rig) {
  ordered_json doc;
  doc["format_version"] = 1;
  ordered_json joints = ordered_json::array();
  for (const auto& j : rig.skeleton.joints) {
    ordered_json out;
    out["name"] = j.name;
    out["parent"] = j.parent.value_or(-1);
    out["position"] = {RoundSignificant9(j.position.x()), RoundSignificant9(j.position.y()),
                       RoundSignificant9(j.position.z())};
    out["chain_type"] = j.chain_type;
    joints.push_back(std::move(out));
  }
  doc["joints"] = std::move(joints);

  SparseSkin skin = rig.skin;
  skin.canonicalize();
  ordered_json entries = ordered_json::array();
  for (const auto& e : skin.entries) {
    entries.push_back({e.vertex, e.joint, RoundSignificant9(e.weight)});
  }
  doc["skin"]["vertex_count"] = skin.vertex_count;
  doc["skin"]["entries"] = std::move(entries);
  return doc.dump() + "\n";
}

void SaveRig(const Rig& rig, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::kIo, "cannot write rig '" + path + "'");
  out << SerializeRig(rig);
}

// ---------------------------------------------------------------------------
// Validation

std::vector<Violation> ValidateSkeleton(const Skeleton& skeleton) {
  std::vector<Violation> out;
  const int n = skeleton.size();
  if (n == 0) {
    out.push_back({"no root", "skeleton has no joints"});
    return out;
  }
  bool parents_ok = true;
  for (int j = 0; j < n; ++j) {
    const auto& joint = skeleton.joints[j];
    if (joint.parent && (*joint.parent < 0 || *joint.parent >= n)) {
      out.push_back({"parent out of range", "joint " + std::to_string(j) + " has parent " +
                                                std::to_string(*joint.parent)});
      parents_ok = false;
    }
    if (!joint.position.allFinite()) {
      out.push_back({"non-finite position", "joint " + std::to_string(j)});
    }
  }
  if (parents_ok) {
    if (int c = FindCycle(skeleton.joints); c >= 0) {
      out.push_back({"cycle", "parent cycle through joint " + std::to_string(c)});
    }
  }
  if (skeleton.root_count() == 0) out.push_back({"no root", "skeleton has no root joint"});
  return out;
}

std::vector<Violation> ValidateRig(const Rig& rig, const Mesh* mesh) {
  auto out = ValidateSkeleton(rig.skeleton);
  const auto& skin = rig.skin;
  if (skin.joint_count != rig.skeleton.size()) {
    out.push_back({"joint count mismatch", "skin has " + std::to_string(skin.joint_count) +
                                               " joints, skeleton " +
                                               std::to_string(rig.skeleton.size())});
  }
  if (mesh) {
    if (skin.vertex_count != mesh->vertex_count()) {
      out.push_back({"vertex count mismatch", "skin has " + std::to_string(skin.vertex_count) +
                                                  " vertices, mesh " +
                                                  std::to_string(mesh->vertex_count())});
    }
    for (const auto& f : mesh->faces) {
      if (std::any_of(f.begin(), f.end(),
                      [&](int v) { return v < 0 || v >= mesh->vertex_count(); })) {
        out.push_back({"face index out of range", "mesh face references a missing vertex"});
        break;
      }
    }
  }
  std::set<std::pair<int, int>> seen;
  std::map<int, double> sums;
  for (const auto& e : skin.entries) {
    const std::string where =
        "(" + std::to_string(e.vertex) + ", " + std::to_string(e.joint) + ")";
    if (e.vertex < 0 || e.vertex >= skin.vertex_count || e.joint < 0 ||
        e.joint >= skin.joint_count) {
      out.push_back({"entry out of range", "entry " + where});
    }
    if (!seen.insert({e.vertex, e.joint}).second) {
      out.push_back({"duplicate entry", "entry " + where});
    }
    if (!(e.weight >= 0.0 && e.weight <= 1.0)) {
      out.push_back({"weight out of range", "entry " + where + " weight " +
                                                std::to_string(e.weight)});
    }
    sums[e.vertex] += e.weight;
  }
  for (const auto& [vertex, sum] : sums) {
    if (sum > 1.0 + 1e-6) {
      out.push_back({"weight sum exceeds 1", "vertex " + std::to_string(vertex) + " sums to " +
                                                 std::to_string(sum)});
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Normalization

NormalizedScene NormalizeUnitCube(const Mesh& mesh, const Skeleton& skeleton) {
  if (mesh.vertices.empty()) throw Error(ErrorCode::kInvalidArgument, "mesh has no vertices");
  Vec3 lo = mesh.vertices.front();
  Vec3 hi = lo;
  for (const auto& v : mesh.vertices) {
    lo = lo.cwiseMin(v);
    hi = hi.cwiseMax(v);
  }
  const double extent = (hi - lo).maxCoeff();
  if (!(extent > 0.0)) throw Error(ErrorCode::kDegenerate, "mesh bounding box is degenerate");

  NormalizedScene out;
  out.transform.center = (lo + hi) * 0.5;
  out.transform.scale = 2.0 / extent;
  out.mesh.faces = mesh.faces;
  out.mesh.vertices.reserve(mesh.vertices.size());
  for (const auto& v : mesh.vertices) out.mesh.vertices.push_back(out.transform.Apply(v));
  out.skeleton = skeleton;
  for (auto& j : out.skeleton.joints) j.position = out.transform.Apply(j.position);
  return out;
}

// ---------------------------------------------------------------------------
// Dense / sparse

DenseSkin ToDense(const SparseSkin& skin) {
  DenseSkin dense = DenseSkin::Zero(skin.vertex_count, skin.joint_count);
  for (const auto& e : skin.entries) dense(e.vertex, e.joint) = e.weight;
  return dense;
}

SparseSkin Sparsify(const DenseSkin& dense, double threshold) {
  SparseSkin skin;
  skin.vertex_count = static_cast<int>(dense.rows());
  skin.joint_count = static_cast<int>(dense.cols());
  for (int i = 0; i < dense.rows(); ++i) {
    for (int j = 0; j < dense.cols(); ++j) {
      if (dense(i, j) > threshold) skin.entries.push_back({i, j, dense(i, j)});
    }
  }
  return skin;
}

SparseSkin RenormalizeWeights(const SparseSkin& skin) {
  std::vector<double> sums(skin.vertex_count, 0.0);
  for (const auto& e : skin.entries) sums[e.vertex] += e.weight;
  SparseSkin out = skin;
  for (auto& e : out.entries) {
    if (sums[e.vertex] > 0.0) e.weight /= sums[e.vertex];
  }
  return out;
}

}  // namespace rigtok
