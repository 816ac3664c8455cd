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

#ifndef RIGTOK_REWARDS_HPP_
#define RIGTOK_REWARDS_HPP_

// Rig quality rewards used as the GRPO signal: volumetric joint coverage,
// bone containment, skinning coverage/sparsity and deformation smoothness.

#include <cstdint>
#include <functional>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "rigtok/geom.hpp"
#include "rigtok/rigcore.hpp"
#include "rigtok/seqcodec.hpp"

namespace rigtok {

inline constexpr int kDeskVoxelResolution = 64;

struct RewardConfig {
  double alpha = 0.05;        // joint coverage falloff, per voxel unit
  int resolution = 196;       // voxel grid resolution
  FillMode fill = FillMode::kSolid;
  int bone_samples = 8;       // s: bone containment samples are s + 1 per bone
  double beta = 0.1;          // weight threshold
  int max_influences = 4;
  double alpha_z = 1.0;
  double alpha_m = 1.0;
  double motion_scale = 1.0;
  double motion_eps = 1e-6;
  int n_poses = 5;
  double max_angle = std::numbers::pi / 6.0;
  std::uint64_t seed = 7;
  double w_vj = 5.0;
  double w_vk = 1.0;
  double w_sc = 1.0;
  double w_mo = 1.0;

  // Throws kInvalidArgument on a negative, out-of-range or non-finite field.
  void Check() const;
};

struct RewardReport {
  double r_vj = 0.0;
  double r_vk = 0.0;
  double r_sc = 0.0;
  double r_z = 0.0;
  double r_m = 0.0;
  double r_mo = 0.0;
  double composite = 0.0;
  bool valid = false;
  bool no_bones = false;         // r_vk defaulted to 1
  bool voxel_fallback = false;   // solid fill degraded to surface
  std::string failure;           // why the rig was rejected, when !valid
};

// (1/V) sum_i exp(-alpha * min_j |v_i - J_j|) over occupied voxel centers,
// distances in voxel units. Throws on an empty joint list or an empty grid.
double JointCoverageReward(const VoxelGrid& grid, std::span<const Vec3> joints, double alpha);

struct ContainmentResult {
  double value = 1.0;
  bool no_bones = false;
};

// Fraction of the samples t = k/s, k = 0..s (the midpoint when s = 0) on
// every bone that fall inside occupied voxels. A root-only skeleton scores 1
// with no_bones set.
ContainmentResult BoneContainmentReward(const Skeleton& skeleton, const VoxelGrid& grid,
                                        int samples);

struct SkinCoverage {
  double r_sc = 0.0;
  double r_z = 0.0;
  double r_m = 0.0;
};

// r_z: fraction of vertices with every weight < beta, raised to alpha_z.
// r_m: fraction with more than `max_influences` weights > beta, to alpha_m.
// r_sc = 1 - r_z / 2 - r_m / 2.
SkinCoverage SkinCoverageReward(const DenseSkin& weights, double beta, double alpha_z,
                                double alpha_m, int max_influences = 4);

// (1 + s * mean_p[max_e max(1, l'(e) / (l(e) + eps))])^-1 over n_poses
// seeded poses.
double DeformationReward(const Mesh& mesh, const Rig& rig, const RewardConfig& config);

double CompositeReward(const RewardReport& report, const RewardConfig& config, bool valid);

// Full report. A rig failing validation against the mesh is reported
// invalid with every reward zero.
RewardReport EvaluateRig(const Mesh& mesh, const Rig& rig, const RewardConfig& config);

// Produces vertex weights for a decoded skeleton from its skin tokens.
using SkinDecoder = std::function<SparseSkin(const Skeleton& skeleton,
                                             const std::vector<std::vector<TokenId>>& skin_tokens,
                                             const Mesh& mesh)>;

// Decodes a generated sequence and scores it; an undecodable sequence gets
// composite 0.
RewardReport EvaluateSequence(const RigSequence& sequence, const Vocab& vocab, const Mesh& mesh,
                              const SkinDecoder& decoder, const RewardConfig& config);

}  // namespace rigtok

#endif  // RIGTOK_REWARDS_HPP_
