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

#include "rigtok/augment.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <string>
#include <utility>

#include "rigtok/error.hpp"
#include "rigtok/random.hpp"

namespace rigtok {
namespace {

void CheckUnit(double value, const char* name) {
  if (!(value >= 0.0 && value <= 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, std::string("augment: ") + name + " must lie in [0,1]");
  }
}

void CheckJoint(const Skeleton& skeleton, int joint) {
  if (joint < 0 || joint >= skeleton.size()) {
    throw Error(ErrorCode::kInvalidArgument, "augment: joint index out of range");
  }
}

std::vector<int> NonRoots(const Skeleton& skeleton) {
  std::vector<int> out;
  for (int j = 0; j < skeleton.size(); ++j) {
    if (skeleton.joints[j].parent) out.push_back(j);
  }
  return out;
}

// First `count` entries of a seeded Fisher-Yates shuffle.
std::vector<int> ChooseSubset(std::vector<int> pool, int count, Rng& rng) {
  count = std::min<int>(count, static_cast<int>(pool.size()));
  for (int i = 0; i < count; ++i) {
    std::uniform_int_distribution<int> pick(i, static_cast<int>(pool.size()) - 1);
    std::swap(pool[i], pool[pick(rng)]);
  }
  pool.resize(count);
  return pool;
}

std::vector<bool> SubtreeMask(const Skeleton& skeleton, int joint) {
  const auto children = skeleton.children();
  std::vector<bool> mask(skeleton.size(), false);
  std::vector<int> stack = {joint};
  while (!stack.empty()) {
    const int j = stack.back();
    stack.pop_back();
    if (mask[j]) continue;
    mask[j] = true;
    for (int c : children[j]) stack.push_back(c);
  }
  return mask;
}

// Sums duplicate (vertex, joint) entries and clamps each sum at 1.
SparseSkin MergeEntries(int vertex_count, int joint_count, std::vector<SkinEntry> entries) {
  std::sort(entries.begin(), entries.end(), [](const SkinEntry& a, const SkinEntry& b) {
    return a.vertex != b.vertex ? a.vertex < b.vertex : a.joint < b.joint;
  });
  SparseSkin out{vertex_count, joint_count, {}};
  for (const auto& e : entries) {
    if (!out.entries.empty() && out.entries.back().vertex == e.vertex &&
        out.entries.back().joint == e.joint) {
      out.entries.back().weight += e.weight;
    } else {
      out.entries.push_back(e);
    }
  }
  for (auto& e : out.entries) e.weight = std::min(e.weight, 1.0);
  return out;
}

// Keeps the joints with keep[j] set; parents are resolved through `attach`,
// which maps every joint to itself or to the survivor taking its place.
Skeleton CompactSkeleton(const Skeleton& skeleton, const std::vector<bool>& keep,
                         const std::vector<int>& attach, std::vector<int>& remap) {
  remap.assign(skeleton.size(), -1);
  Skeleton out;
  for (int j = 0; j < skeleton.size(); ++j) {
    if (!keep[j]) continue;
    remap[j] = out.size();
    out.joints.push_back(skeleton.joints[j]);
  }
  for (int j = 0; j < skeleton.size(); ++j) {
    if (!keep[j]) continue;
    auto& joint = out.joints[remap[j]];
    if (joint.parent) joint.parent = remap[attach[*joint.parent]];
  }
  return out;
}

Vec3 BoxCenter(const Mesh& mesh, const Skeleton& skeleton) {
  const auto& pts = mesh.vertices.empty() ? skeleton.positions() : mesh.vertices;
  if (pts.empty()) return Vec3::Zero();
  Vec3 lo = pts.front(), hi = pts.front();
  for (const auto& p : pts) {
    lo = lo.cwiseMin(p);
    hi = hi.cwiseMax(p);
  }
  return 0.5 * (lo + hi);
}

}  // namespace

void AugmentConfig::Check() const {
  CheckUnit(p_delete, "p_delete");
  CheckUnit(max_delete_frac, "max_delete_frac");
  CheckUnit(p_subtree, "p_subtree");
  CheckUnit(p_reconnect, "p_reconnect");
  CheckUnit(max_reconnect_frac, "max_reconnect_frac");
  CheckUnit(p_scale, "p_scale");
  CheckUnit(p_rotate, "p_rotate");
  CheckUnit(p_pose, "p_pose");
  CheckUnit(p_noise, "p_noise");
  if (max_delete_frac >= 1.0) throw Error(ErrorCode::kInvalidArgument, "augment: max_delete_frac must be < 1");
  if (!(min_scale > 0.0 && min_scale <= max_scale && std::isfinite(max_scale))) {
    throw Error(ErrorCode::kInvalidArgument, "augment: scale range must satisfy 0 < min <= max");
  }
  if (!(max_rotate >= 0.0) || !(max_pose >= 0.0) || !(sigma_joint >= 0.0) || !(sigma_vertex >= 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "augment: angles and noise levels must be non-negative");
  }
}

RigMesh DeleteJointSet(const Rig& rig, const Mesh& mesh, std::span<const int> joints,
                       bool with_vertices) {
  const Skeleton& skel = rig.skeleton;
  std::vector<bool> keep(skel.size(), true);
  for (int j : joints) {
    CheckJoint(skel, j);
    if (!skel.joints[j].parent) throw Error(ErrorCode::kInvalidArgument, "augment: roots cannot be deleted");
    keep[j] = false;
  }
  std::vector<int> attach(skel.size());
  for (int j = 0; j < skel.size(); ++j) {
    int a = j;
    while (!keep[a]) a = *skel.joints[a].parent;
    attach[j] = a;
  }
  RigMesh out;
  std::vector<int> remap;
  out.rig.skeleton = CompactSkeleton(skel, keep, attach, remap);

  std::vector<int> vertex_map(mesh.vertices.size());
  std::iota(vertex_map.begin(), vertex_map.end(), 0);
  out.mesh = mesh;
  if (with_vertices) {
    // Dominant joint per vertex: largest weight, lowest index on ties.
    std::vector<int> dominant(mesh.vertices.size(), -1);
    std::vector<double> best(mesh.vertices.size(), 0.0);
    for (const auto& e : rig.skin.entries) {
      if (e.vertex < 0 || e.vertex >= static_cast<int>(mesh.vertices.size())) continue;
      if (e.weight > best[e.vertex] || (e.weight == best[e.vertex] && e.weight > 0.0 &&
                                        e.joint < dominant[e.vertex])) {
        best[e.vertex] = e.weight;
        dominant[e.vertex] = e.joint;
      }
    }
    out.mesh.vertices.clear();
    for (size_t v = 0; v < mesh.vertices.size(); ++v) {
      if (dominant[v] >= 0 && !keep[dominant[v]]) {
        vertex_map[v] = -1;
      } else {
        vertex_map[v] = static_cast<int>(out.mesh.vertices.size());
        out.mesh.vertices.push_back(mesh.vertices[v]);
      }
    }
    out.mesh.faces.clear();
    for (const auto& f : mesh.faces) {
      if (vertex_map[f[0]] < 0 || vertex_map[f[1]] < 0 || vertex_map[f[2]] < 0) continue;
      out.mesh.faces.push_back({vertex_map[f[0]], vertex_map[f[1]], vertex_map[f[2]]});
    }
  }

  std::vector<SkinEntry> entries;
  entries.reserve(rig.skin.entries.size());
  for (const auto& e : rig.skin.entries) {
    const int v = e.vertex < static_cast<int>(vertex_map.size()) ? vertex_map[e.vertex] : e.vertex;
    if (v < 0) continue;
    entries.push_back({v, remap[attach[e.joint]], e.weight});
  }
  const int n = with_vertices ? out.mesh.vertex_count() : rig.skin.vertex_count;
  out.rig.skin = MergeEntries(n, out.rig.skeleton.size(), std::move(entries));
  return out;
}

RigMesh DeleteJoints(const Rig& rig, const Mesh& mesh, double frac, std::uint64_t seed,
                     bool with_vertices) {
  if (!(frac >= 0.0 && frac < 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "augment: delete fraction must lie in [0,1)");
  }
  const int count = static_cast<int>(std::floor(frac * rig.skeleton.size()));
  Rng rng(seed);
  const auto chosen = ChooseSubset(NonRoots(rig.skeleton), count, rng);
  if (chosen.empty()) return {rig, mesh};
  return DeleteJointSet(rig, mesh, chosen, with_vertices);
}

RigMesh DropSubtree(const Rig& rig, const Mesh& mesh, std::uint64_t seed) {
  const auto candidates = NonRoots(rig.skeleton);
  if (candidates.empty()) return {rig, mesh};
  Rng rng(seed);
  std::uniform_int_distribution<int> pick(0, static_cast<int>(candidates.size()) - 1);
  const auto removed = SubtreeMask(rig.skeleton, candidates[pick(rng)]);
  std::vector<bool> keep(removed.size());
  for (size_t j = 0; j < removed.size(); ++j) keep[j] = !removed[j];
  std::vector<int> attach(rig.skeleton.size());
  std::iota(attach.begin(), attach.end(), 0);
  RigMesh out{{}, mesh};
  std::vector<int> remap;
  out.rig.skeleton = CompactSkeleton(rig.skeleton, keep, attach, remap);
  out.rig.skin = {rig.skin.vertex_count, out.rig.skeleton.size(), {}};
  for (const auto& e : rig.skin.entries) {
    if (keep[e.joint]) out.rig.skin.entries.push_back({e.vertex, remap[e.joint], e.weight});
  }
  return out;
}

Rig ReconnectJoint(const Rig& rig, int joint, int new_parent) {
  CheckJoint(rig.skeleton, joint);
  CheckJoint(rig.skeleton, new_parent);
  if (SubtreeMask(rig.skeleton, joint)[new_parent]) {
    throw Error(ErrorCode::kCycle, "augment: new parent lies in the reconnected joint's subtree");
  }
  Rig out = rig;
  out.skeleton.joints[joint].parent = new_parent;
  std::vector<SkinEntry> entries = rig.skin.entries;
  for (auto& e : entries) {
    if (e.joint == joint) e.joint = new_parent;
  }
  out.skin = MergeEntries(rig.skin.vertex_count, rig.skin.joint_count, std::move(entries));
  return out;
}

Rig ReconnectJoints(const Rig& rig, double frac, std::uint64_t seed) {
  CheckUnit(frac, "reconnect fraction");
  const int count = static_cast<int>(std::floor(frac * rig.skeleton.size()));
  Rng rng(seed);
  const auto chosen = ChooseSubset(NonRoots(rig.skeleton), count, rng);
  Rig out = rig;
  for (int j : chosen) {
    const auto subtree = SubtreeMask(out.skeleton, j);
    std::vector<int> targets;
    for (int k = 0; k < out.skeleton.size(); ++k) {
      if (!subtree[k]) targets.push_back(k);
    }
    if (targets.empty()) continue;
    std::uniform_int_distribution<int> pick(0, static_cast<int>(targets.size()) - 1);
    out = ReconnectJoint(out, j, targets[pick(rng)]);
  }
  return out;
}

RigMesh PerturbGeometry(const Rig& rig, const Mesh& mesh, const AugmentConfig& config,
                        std::uint64_t seed) {
  config.Check();
  RigMesh out{rig, mesh};
  auto& joints = out.rig.skeleton.joints;
  auto& verts = out.mesh.vertices;
  const Vec3 center = BoxCenter(mesh, rig.skeleton);
  auto transform = [&](const Mat3& m) {
    for (auto& j : joints) j.position = m * (j.position - center) + center;
    for (auto& v : verts) v = m * (v - center) + center;
  };

  Rng scale_rng(DeriveSeed(seed, 0));
  if (Uniform01(scale_rng) < config.p_scale) {
    std::uniform_real_distribution<double> factor(config.min_scale, config.max_scale);
    Mat3 m = Mat3::Zero();
    for (int k = 0; k < 3; ++k) m(k, k) = factor(scale_rng);
    transform(m);
  }
  Rng rotate_rng(DeriveSeed(seed, 1));
  if (Uniform01(rotate_rng) < config.p_rotate) {
    std::uniform_int_distribution<int> axis_pick(0, 2);
    AxisAngle r;
    r.axis = Vec3::Unit(axis_pick(rotate_rng));
    r.angle = (2.0 * Uniform01(rotate_rng) - 1.0) * config.max_rotate;
    transform(RotationMatrix(r));
  }
  Rng noise_rng(DeriveSeed(seed, 2));
  if (Uniform01(noise_rng) < config.p_noise) {
    std::normal_distribution<double> joint_noise(0.0, 1.0);
    for (auto& j : joints) {
      for (int k = 0; k < 3; ++k) j.position[k] += config.sigma_joint * joint_noise(noise_rng);
    }
    for (auto& v : verts) {
      for (int k = 0; k < 3; ++k) v[k] += config.sigma_vertex * joint_noise(noise_rng);
    }
  }
  return out;
}

RigMesh PerturbPose(const Mesh& mesh, const Rig& rig, double max_angle, std::uint64_t seed) {
  const Pose pose = SamplePose(rig.skeleton, max_angle, seed);
  RigMesh out{rig, mesh};
  out.mesh.vertices = LbsDeform(mesh, rig, pose);
  const auto posed = PosedJointPositions(rig.skeleton, pose);
  for (int j = 0; j < rig.skeleton.size(); ++j) out.rig.skeleton.joints[j].position = posed[j];
  return out;
}

ImportanceSamples ImportanceSample(const Mesh& mesh, const SparseSkin& skin, int joint,
                                   int n_uniform, int n_dense, std::uint64_t seed) {
  if (joint < 0 || joint >= skin.joint_count) {
    throw Error(ErrorCode::kInvalidArgument, "importance sample: joint index out of range");
  }
  if (skin.vertex_count != mesh.vertex_count()) {
    throw Error(ErrorCode::kInvalidArgument, "importance sample: skin vertex count differs from the mesh");
  }
  ImportanceSamples out;
  out.uniform = SampleSurfaceFaces(mesh, n_uniform, DeriveSeed(seed, 0));
  if (n_dense == 0) return out;
  std::vector<bool> weighted(mesh.vertices.size(), false);
  bool any = false;
  for (const auto& e : skin.entries) {
    if (e.joint == joint && e.weight > 0.0) {
      weighted[e.vertex] = true;
      any = true;
    }
  }
  if (!any) throw Error(ErrorCode::kInvalidArgument, "importance sample: joint has no positive weight");
  std::vector<int> faces;
  for (int f = 0; f < static_cast<int>(mesh.faces.size()); ++f) {
    const auto& face = mesh.faces[f];
    if (weighted[face[0]] || weighted[face[1]] || weighted[face[2]]) faces.push_back(f);
  }
  if (faces.empty()) throw Error(ErrorCode::kDegenerate, "importance sample: weighted vertices touch no face");
  out.dense = SampleSurfaceFaces(mesh, n_dense, DeriveSeed(seed, 1), faces);
  return out;
}

const std::vector<std::string>& AugmentOpNames() {
  static const std::vector<std::string> names = {"delete", "subtree", "reconnect", "scale",
                                                 "rotate", "noise", "pose"};
  return names;
}

RigMesh Augment(const Rig& rig, const Mesh& mesh, const AugmentConfig& config,
                std::span<const std::string> ops, std::uint64_t seed) {
  config.Check();
  const auto& names = AugmentOpNames();
  std::vector<bool> enabled(names.size(), false);
  for (const auto& op : ops) {
    const auto it = std::find(names.begin(), names.end(), op);
    if (it == names.end()) throw Error(ErrorCode::kInvalidArgument, "augment: unknown operation '" + op + "'");
    enabled[it - names.begin()] = true;
  }
  auto on = [&](const char* name) {
    return enabled[std::find(names.begin(), names.end(), name) - names.begin()];
  };

  RigMesh cur{rig, mesh};
  Rng gate(DeriveSeed(seed, 100));
  if (on("delete") && Uniform01(gate) < config.p_delete) {
    const double frac = Uniform01(gate) * config.max_delete_frac;
    cur = DeleteJoints(cur.rig, cur.mesh, frac, DeriveSeed(seed, 101), config.delete_vertices);
  }
  if (on("subtree") && Uniform01(gate) < config.p_subtree) {
    cur = DropSubtree(cur.rig, cur.mesh, DeriveSeed(seed, 102));
  }
  if (on("reconnect") && Uniform01(gate) < config.p_reconnect) {
    const double frac = Uniform01(gate) * config.max_reconnect_frac;
    cur.rig = ReconnectJoints(cur.rig, frac, DeriveSeed(seed, 103));
  }
  AugmentConfig geometry = config;
  if (!on("scale")) geometry.p_scale = 0.0;
  if (!on("rotate")) geometry.p_rotate = 0.0;
  if (!on("noise")) geometry.p_noise = 0.0;
  if (on("scale") || on("rotate") || on("noise")) {
    cur = PerturbGeometry(cur.rig, cur.mesh, geometry, DeriveSeed(seed, 104));
  }
  if (on("pose") && Uniform01(gate) < config.p_pose) {
    cur = PerturbPose(cur.mesh, cur.rig, config.max_pose, DeriveSeed(seed, 105));
  }
  return cur;
}

}  // namespace rigtok
