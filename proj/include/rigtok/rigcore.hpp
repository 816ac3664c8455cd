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

#ifndef RIGTOK_RIGCORE_HPP_
#define RIGTOK_RIGCORE_HPP_

// Data model for meshes, skeletons, sparse skinning and poses, plus the OBJ
// and rig-file codecs.

#include <array>
#include <cstddef>
#include <istream>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

namespace rigtok {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

// Dense N x J skinning table, one column per joint.
using DenseSkin = Eigen::MatrixXd;

struct Mesh {
  std::vector<Vec3> vertices;
  std::vector<std::array<int, 3>> faces;

  int vertex_count() const { return static_cast<int>(vertices.size()); }
};

struct Joint {
  std::string name;
  Vec3 position = Vec3::Zero();
  std::optional<int> parent;
  std::string chain_type;

  bool operator==(const Joint&) const = default;
};

// Segment parent(j) -> j for a non-root joint j.
struct Bone {
  Vec3 head;
  Vec3 tail;
  int joint;
};

struct Skeleton {
  std::vector<Joint> joints;

  int size() const { return static_cast<int>(joints.size()); }
  int root_count() const;
  std::vector<Bone> bones() const;
  // children[j] in ascending index order.
  std::vector<std::vector<int>> children() const;
  std::vector<Vec3> positions() const;

  bool operator==(const Skeleton&) const = default;
};

struct SkinEntry {
  int vertex = 0;
  int joint = 0;
  double weight = 0.0;

  bool operator==(const SkinEntry&) const = default;
};

struct SparseSkin {
  int vertex_count = 0;
  int joint_count = 0;
  std::vector<SkinEntry> entries;

  // Sorts entries by (vertex, joint).
  void canonicalize();
  bool operator==(const SparseSkin&) const = default;
};

struct AxisAngle {
  Vec3 axis = Vec3::UnitZ();
  double angle = 0.0;
};

// One local rotation per joint, applied about the joint's rest position.
struct Pose {
  std::vector<AxisAngle> rotations;

  static Pose Identity(int joint_count);
};

struct Rig {
  Skeleton skeleton;
  SparseSkin skin;

  bool operator==(const Rig&) const = default;
};

// ---------------------------------------------------------------------------
// OBJ

// Reads the v/f subset of Wavefront OBJ. Texture and normal references on
// face corners are ignored, polygons are fan-triangulated and face indices
// become 0-based. Other record types are skipped.
Mesh ParseObj(std::istream& in);
Mesh ParseObj(std::string_view text);
Mesh LoadObj(const std::string& path);
void WriteObj(const Mesh& mesh, std::ostream& out);

// ---------------------------------------------------------------------------
// Rig file (JSON)

Rig ParseRig(std::istream& in);
Rig ParseRig(std::string_view text);
Rig LoadRig(const std::string& path);
// Canonical form: entries sorted by (vertex, joint), reals rounded to 9
// significant digits.
std::string SerializeRig(const Rig& rig);
void SaveRig(const Rig& rig, const std::string& path);

// Rounds to 9 significant digits, the precision of every serialized real.
double RoundSignificant9(double value);

// ---------------------------------------------------------------------------
// Validation

struct Violation {
  std::string code;
  std::string message;
};

// Empty iff every invariant of the rig holds. When `mesh` is given the skin
// vertex count must also match it.
std::vector<Violation> ValidateRig(const Rig& rig, const Mesh* mesh = nullptr);
std::vector<Violation> ValidateSkeleton(const Skeleton& skeleton);

// ---------------------------------------------------------------------------
// Normalization

struct UnitCubeTransform {
  Vec3 center = Vec3::Zero();
  double scale = 1.0;

  Vec3 Apply(const Vec3& p) const { return (p - center) * scale; }
  Vec3 Invert(const Vec3& p) const { return p / scale + center; }
};

struct NormalizedScene {
  Mesh mesh;
  Skeleton skeleton;
  UnitCubeTransform transform;
};

// Maps the mesh bounding box into [-1,1]^3, longest axis spanning [-1,1].
NormalizedScene NormalizeUnitCube(const Mesh& mesh, const Skeleton& skeleton);

// ---------------------------------------------------------------------------
// Dense / sparse skin conversion

DenseSkin ToDense(const SparseSkin& skin);
// Keeps entries with weight > threshold, in canonical order.
SparseSkin Sparsify(const DenseSkin& dense, double threshold);
// Rescales each vertex with positive total weight to sum to 1.
SparseSkin RenormalizeWeights(const SparseSkin& skin);

}  // namespace rigtok

#endif  // RIGTOK_RIGCORE_HPP_
