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

#include "rigtok/rewards.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "parallel.hpp"
#include "rigtok/error.hpp"
#include "rigtok/random.hpp"

namespace rigtok {

void RewardConfig::Check() const {
  auto require = [](bool ok, const char* what) {
    if (!ok) throw Error(ErrorCode::kInvalidArgument, std::string("reward config: ") + what);
  };
  auto nonneg = [](double x) { return std::isfinite(x) && x >= 0.0; };
  require(nonneg(alpha), "alpha must be non-negative");
  require(resolution >= 2, "resolution must be >= 2");
  require(bone_samples >= 0, "bone_samples must be non-negative");
  require(std::isfinite(beta) && beta > 0.0 && beta < 1.0, "beta must lie in (0,1)");
  require(max_influences >= 0, "max_influences must be non-negative");
  require(nonneg(alpha_z) && nonneg(alpha_m), "alpha_z and alpha_m must be non-negative");
  require(nonneg(motion_scale) && nonneg(motion_eps), "motion scale and eps must be non-negative");
  require(n_poses >= 1, "n_poses must be >= 1");
  require(nonneg(max_angle), "max_angle must be non-negative");
  require(nonneg(w_vj) && nonneg(w_vk) && nonneg(w_sc) && nonneg(w_mo),
          "reward weights must be non-negative");
}

double JointCoverageReward(const VoxelGrid& grid, std::span<const Vec3> joints, double alpha) {
  if (joints.empty()) throw Error(ErrorCode::kInvalidArgument, "joint coverage needs at least one joint");
  const auto voxels = grid.OccupiedVoxels();
  if (voxels.empty()) throw Error(ErrorCode::kInvalidArgument, "joint coverage needs an occupied voxel");

  std::vector<Vec3> joint_idx;
  joint_idx.reserve(joints.size());
  for (const auto& j : joints) joint_idx.push_back(grid.ToIndexSpace(j));

  std::vector<double> terms(voxels.size());
  internal::ParallelFor(voxels.size(), 4096, [&](size_t begin, size_t end) {
    for (size_t i = begin; i < end; ++i) {
      const Vec3 center(voxels[i][0] + 0.5, voxels[i][1] + 0.5, voxels[i][2] + 0.5);
      double best = std::numeric_limits<double>::infinity();
      for (const auto& j : joint_idx) best = std::min(best, (center - j).squaredNorm());
      terms[i] = std::exp(-alpha * std::sqrt(best));
    }
  });
  double sum = 0.0;
  for (double t : terms) sum += t;
  return sum / static_cast<double>(voxels.size());
}

ContainmentResult BoneContainmentReward(const Skeleton& skeleton, const VoxelGrid& grid,
                                        int samples) {
  if (samples < 0) throw Error(ErrorCode::kInvalidArgument, "bone samples must be non-negative");
  const auto bones = skeleton.bones();
  if (bones.empty()) return {1.0, true};
  std::int64_t inside = 0;
  std::int64_t total = 0;
  for (const auto& bone : bones) {
    for (int k = 0; k <= samples; ++k) {
      const double t = samples == 0 ? 0.5 : static_cast<double>(k) / samples;
      if (grid.ContainsPoint(bone.head + t * (bone.tail - bone.head))) ++inside;
      ++total;
    }
  }
  return {static_cast<double>(inside) / static_cast<double>(total), false};
}

SkinCoverage SkinCoverageReward(const DenseSkin& weights, double beta, double alpha_z,
                                double alpha_m, int max_influences) {
  const auto n = weights.rows();
  if (n < 1) throw Error(ErrorCode::kInvalidArgument, "skin coverage needs at least one vertex");
  std::int64_t unbound = 0;
  std::int64_t crowded = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    bool all_below = true;
    int influences = 0;
    for (Eigen::Index j = 0; j < weights.cols(); ++j) {
      const double w = weights(i, j);
      if (!(w < beta)) all_below = false;
      if (w > beta) ++influences;
    }
    if (all_below) ++unbound;
    if (influences > max_influences) ++crowded;
  }
  SkinCoverage out;
  out.r_z = std::pow(static_cast<double>(unbound) / n, alpha_z);
  out.r_m = std::pow(static_cast<double>(crowded) / n, alpha_m);
  out.r_sc = 1.0 - 0.5 * out.r_z - 0.5 * out.r_m;
  return out;
}

double DeformationReward(const Mesh& mesh, const Rig& rig, const RewardConfig& config) {
  const auto edges = MeshEdges(mesh);
  if (edges.empty()) throw Error(ErrorCode::kInvalidArgument, "deformation reward needs mesh edges");
  std::vector<double> rest_length(edges.size());
  for (size_t e = 0; e < edges.size(); ++e) {
    rest_length[e] = (mesh.vertices[edges[e][0]] - mesh.vertices[edges[e][1]]).norm();
  }
  double sum = 0.0;
  for (int p = 0; p < config.n_poses; ++p) {
    const Pose pose = SamplePose(rig.skeleton, config.max_angle, DeriveSeed(config.seed, p));
    const auto deformed = LbsDeform(mesh, rig, pose);
    double worst = 1.0;
    for (size_t e = 0; e < edges.size(); ++e) {
      const double len = (deformed[edges[e][0]] - deformed[edges[e][1]]).norm();
      worst = std::max(worst, len / (rest_length[e] + config.motion_eps));
    }
    sum += worst;
  }
  return 1.0 / (1.0 + config.motion_scale * (sum / config.n_poses));
}

double CompositeReward(const RewardReport& report, const RewardConfig& config, bool valid) {
  if (!valid) return 0.0;
  return config.w_vj * report.r_vj + config.w_vk * report.r_vk + config.w_sc * report.r_sc +
         config.w_mo * report.r_mo;
}

namespace {

RewardReport Invalid(std::string why) {
  RewardReport out;
  out.valid = false;
  out.failure = std::move(why);
  return out;
}

}  // namespace

RewardReport EvaluateRig(const Mesh& mesh, const Rig& rig, const RewardConfig& config) {
  config.Check();
  if (auto violations = ValidateRig(rig, &mesh); !violations.empty()) {
    return Invalid(violations.front().code);
  }
  if (mesh.faces.empty()) return Invalid("mesh has no faces");

  RewardReport report;
  const VoxelGrid grid = Voxelize(mesh, config.resolution, config.fill);
  report.voxel_fallback = grid.fell_back_to_surface();
  const auto joints = rig.skeleton.positions();
  report.r_vj = JointCoverageReward(grid, joints, config.alpha);
  const auto containment = BoneContainmentReward(rig.skeleton, grid, config.bone_samples);
  report.r_vk = containment.value;
  report.no_bones = containment.no_bones;
  const auto coverage = SkinCoverageReward(ToDense(rig.skin), config.beta, config.alpha_z,
                                           config.alpha_m, config.max_influences);
  report.r_sc = coverage.r_sc;
  report.r_z = coverage.r_z;
  report.r_m = coverage.r_m;
  report.r_mo = DeformationReward(mesh, rig, config);
  report.valid = true;
  report.composite = CompositeReward(report, config, true);
  return report;
}

RewardReport EvaluateSequence(const RigSequence& sequence, const Vocab& vocab, const Mesh& mesh,
                              const SkinDecoder& decoder, const RewardConfig& config) {
  const auto check = ValidateSequence(sequence, vocab);
  if (!check.valid) return Invalid(DecodeFailureName(check.failure));
  auto decoded = DecodeRig(sequence, vocab);
  Rig rig;
  rig.skeleton = std::move(decoded.skeleton);
  rig.skin = decoder(rig.skeleton, decoded.skin_tokens, mesh);
  return EvaluateRig(mesh, rig, config);
}

}  // namespace rigtok
